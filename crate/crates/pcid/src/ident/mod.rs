//! Identifiability: the boolean ID algorithm, hedge witnesses, the literal
//! hedge validator, and the exhaustive small-graph oracle.

mod algorithm;
mod hedge;
mod oracle;
mod validate;

pub use algorithm::{id_decide, Decision, IdResult};
pub use hedge::Hedge;
pub use oracle::{
    enumerate_hedges, enumerate_hedges_with, HedgeVariant, DEFAULT_MAX_VERTICES,
};
pub use validate::{validate_hedge, Forest, Violation};
