//! Bounded-lookback identifiability, the all-future-shifts decision, and
//! the empirical minimal-lookback probe.

use num_bigint::BigUint;

use crate::admg::VertexSet;
use crate::error::{Error, Result};
use crate::ident::{id_decide, Decision, Hedge, IdResult};
use crate::periodic::{shift_set, PeriodicSpec};

/// How many past layers the unrolled window may include before tmin(x).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lookback {
    /// The proved constant C; refuses when the window exceeds the budget.
    Auto,
    /// Exactly n layers; a heuristic unless n >= tmin(x).
    Layers(u64),
    /// Back to the initialization layer 0.
    Full,
}

#[derive(Clone, Debug)]
pub struct DecideOptions {
    /// Refusal threshold for the unrolled window, in layers.
    pub max_window_layers: u64,
}

pub const DEFAULT_MAX_WINDOW: u64 = 100_000;

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            max_window_layers: DEFAULT_MAX_WINDOW,
        }
    }
}

impl DecideOptions {
    /// Default budget, overridable through `PCID_MAX_WINDOW`.
    pub fn from_env() -> Result<Self> {
        match std::env::var("PCID_MAX_WINDOW") {
            Err(_) => Ok(Self::default()),
            Ok(s) => {
                let max_window_layers = s.parse().map_err(|_| {
                    Error::Parse(format!("PCID_MAX_WINDOW must be an integer, got `{s}`"))
                })?;
                Ok(DecideOptions { max_window_layers })
            }
        }
    }
}

impl Lookback {
    /// Whether a decision under this lookback is proved rather than
    /// heuristic: Auto and Full always are, an explicit layer count only
    /// when it reaches the initialization layer.
    pub fn is_proved(&self, tmin_x: u32) -> bool {
        match self {
            Lookback::Auto | Lookback::Full => true,
            Lookback::Layers(n) => *n >= u64::from(tmin_x),
        }
    }
}

/// Decides P(y | do x) on the window `[max(tmin(x) - c, 0), tmax(y)]`.
pub fn decide_bounded(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    lookback: Lookback,
) -> Result<IdResult> {
    decide_bounded_with(spec, x, y, lookback, &DecideOptions::from_env()?)
}

pub fn decide_bounded_with(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    lookback: Lookback,
    opts: &DecideOptions,
) -> Result<IdResult> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Query("x and y must be non-empty".into()));
    }
    if !x.is_disjoint(y) {
        return Err(Error::Query("x and y overlap".into()));
    }
    for v in x.iter().chain(y.iter()) {
        if v.row >= spec.width() {
            return Err(Error::Query(format!(
                "vertex {v} has a row outside width {}",
                spec.width()
            )));
        }
    }
    let (start, hi) = planned_window(spec, x, y, &lookback);
    let layers = u64::from(hi - start) + 1;
    if layers > opts.max_window_layers {
        return Err(Error::WindowBudget {
            layers: BigUint::from(layers),
            budget: opts.max_window_layers,
            constant: spec.lookback_constant(),
        });
    }

    let g = spec.unroll((start, hi))?;
    // treatment vertices after tmax(y) cannot be ancestors of y; drop them
    let x_in: VertexSet = x.iter().copied().filter(|v| g.contains(v)).collect();
    if x_in.is_empty() {
        return Ok(IdResult::identifiable());
    }
    for v in y.iter() {
        if !g.contains(v) {
            return Err(Error::VertexOutsideGraph(*v));
        }
    }
    id_decide(&g, &x_in, y)
}

/// The window `[max(tmin(x) - c, 0), tmax(y)]` a bounded decision unrolls,
/// widened to cover y when the query runs backward in time.
pub fn planned_window(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    lookback: &Lookback,
) -> (u32, u32) {
    let tmin_x = x.tmin().expect("x non-empty");
    let lookback_layers: u64 = match lookback {
        Lookback::Full => u64::from(tmin_x),
        Lookback::Layers(n) => *n,
        Lookback::Auto => {
            let c = spec.lookback_constant();
            // anything past tmin(x) is clamped away, so cap before
            // converting out of big-integer range
            if c > BigUint::from(tmin_x) {
                u64::from(tmin_x)
            } else {
                u64::try_from(&c).expect("c <= tmin_x here")
            }
        }
    };
    let start = u32::try_from(u64::from(tmin_x).saturating_sub(lookback_layers))
        .expect("start <= tmin_x")
        .min(y.tmin().expect("y non-empty"));
    let hi = y.tmax().expect("y non-empty").max(start);
    (start, hi)
}

/// Outcome of the all-future-shifts decision.
#[derive(Clone, Debug)]
pub enum ShiftDecision {
    AllIdentifiable,
    UnidentifiableAt { delta: u64, witness: Box<Hedge> },
}

/// Decides identifiability of P(shift(y, Δ) | do x) for every Δ >= 0 by
/// checking Δ = 0 .. c-1, where c is the proved constant C or an override.
///
/// With the override the answer is only a heuristic unless the override
/// dominates the true stabilization constant.
pub fn decide_all_shifts(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    c_override: Option<u64>,
) -> Result<ShiftDecision> {
    decide_all_shifts_with(spec, x, y, c_override, &DecideOptions::from_env()?)
}

pub fn decide_all_shifts_with(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    c_override: Option<u64>,
    opts: &DecideOptions,
) -> Result<ShiftDecision> {
    let c = shifts_horizon(spec, x, y, c_override, opts)?;

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..c)
            .into_par_iter()
            .find_map_first(|delta| check_shift(spec, x, y, delta, opts).transpose())
            .transpose()
            .map(|hit| match hit {
                None => ShiftDecision::AllIdentifiable,
                Some((delta, witness)) => ShiftDecision::UnidentifiableAt {
                    delta,
                    witness: Box::new(witness),
                },
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        decide_shifts_loop(spec, x, y, c, opts)
    }
}

/// Sequential variant of the per-Δ loop; always available so the two
/// strategies can be compared.
pub fn decide_all_shifts_seq(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    c_override: Option<u64>,
    opts: &DecideOptions,
) -> Result<ShiftDecision> {
    let c = shifts_horizon(spec, x, y, c_override, opts)?;
    decide_shifts_loop(spec, x, y, c, opts)
}

fn decide_shifts_loop(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    c: u64,
    opts: &DecideOptions,
) -> Result<ShiftDecision> {
    for delta in 0..c {
        if let Some((delta, witness)) = check_shift(spec, x, y, delta, opts)? {
            return Ok(ShiftDecision::UnidentifiableAt {
                delta,
                witness: Box::new(witness),
            });
        }
    }
    Ok(ShiftDecision::AllIdentifiable)
}

fn shifts_horizon(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    c_override: Option<u64>,
    opts: &DecideOptions,
) -> Result<u64> {
    let (Some(tmax_x), Some(tmin_y)) = (x.tmax(), y.tmin()) else {
        return Err(Error::Query("x and y must be non-empty".into()));
    };
    if tmax_x != tmin_y {
        return Err(Error::Query(format!(
            "shift scan requires tmax(x) = tmin(y), got {tmax_x} and {tmin_y}"
        )));
    }
    if !x.is_disjoint(y) {
        return Err(Error::Query("x and y overlap".into()));
    }
    match c_override {
        Some(c) => Ok(c),
        None => {
            let c = spec.lookback_constant();
            if c > BigUint::from(opts.max_window_layers) {
                return Err(Error::WindowBudget {
                    layers: c.clone(),
                    budget: opts.max_window_layers,
                    constant: c,
                });
            }
            Ok(u64::try_from(&c).expect("c fits the budget"))
        }
    }
}

fn check_shift(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    delta: u64,
    opts: &DecideOptions,
) -> Result<Option<(u64, Hedge)>> {
    let shifted = shift_set(y, delta as i64)?;
    let r = decide_bounded_with(spec, x, &shifted, Lookback::Auto, opts)?;
    Ok(match r.decision {
        Decision::Identifiable => None,
        Decision::Unidentifiable => {
            Some((delta, r.witness.expect("witness accompanies the decision")))
        }
    })
}

/// Result of the minimal-lookback probe.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MinLookback {
    Stabilized(u64),
    NotStabilized,
}

/// Smallest c whose decision agrees with every larger lookback up to
/// `probe_limit` (and with full lookback when the probe reaches layer 0).
/// When the probe range ends right where the decision last changed, there
/// is no evidence of stabilization and `NotStabilized` is returned.
pub fn minimal_lookback(
    spec: &PeriodicSpec,
    x: &VertexSet,
    y: &VertexSet,
    probe_limit: u64,
) -> Result<MinLookback> {
    let opts = DecideOptions::from_env()?;
    let tmin_x = x
        .tmin()
        .ok_or_else(|| Error::Query("x must be non-empty".into()))?;
    // beyond tmin(x) the window is clamped at layer 0 and nothing changes
    let m = probe_limit.min(u64::from(tmin_x));
    let mut decisions = Vec::with_capacity(m as usize + 1);
    for c in 0..=m {
        let r = decide_bounded_with(spec, x, y, Lookback::Layers(c), &opts)?;
        decisions.push(r.decision);
    }
    let last = *decisions.last().expect("at least one probe");
    let settle = decisions
        .iter()
        .rposition(|&d| d != last)
        .map_or(0, |i| i as u64 + 1);
    let full_seen = probe_limit >= u64::from(tmin_x);
    if !full_seen && settle == m && m > 0 {
        return Ok(MinLookback::NotStabilized);
    }
    Ok(MinLookback::Stabilized(settle))
}
