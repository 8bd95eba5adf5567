//! Bounded-lookback identifiability, the all-future-shifts decision, layer
//! signatures, the cutting map Φ, and constructive hedge compression.

mod cut;
mod decide;
mod signature;

pub use cut::{compress_hedge, phi_cut, CompressRegion, CutPlan};
pub use decide::{
    decide_all_shifts, decide_all_shifts_seq, decide_all_shifts_with, decide_bounded,
    decide_bounded_with, minimal_lookback, planned_window, DecideOptions, Lookback, MinLookback,
    ShiftDecision, DEFAULT_MAX_WINDOW,
};
pub use signature::{layer_signature, LayerSignature};
