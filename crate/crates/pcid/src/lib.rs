//! Identifiability of causal effects P(Y | do X) in periodic time-series
//! graphs with latent confounders.
//!
//! The crate decides identifiability on finite segments (`ident`), unrolls
//! periodic edge templates into such segments (`periodic`), and implements
//! the bounded-lookback and all-future-shifts decision procedures together
//! with constructive hedge compression (`bounded`).

pub mod admg;
pub mod bounded;
pub mod error;
pub mod families;
pub mod ident;
pub mod periodic;
pub mod report;

pub use admg::{SegmentGraph, VertexId, VertexSet};
pub use error::{Error, Result};
