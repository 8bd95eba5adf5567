//! JSON report types emitted by the command-line front end.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::admg::VertexSet;
use crate::bounded::{Lookback, ShiftDecision};
use crate::ident::{Decision, Hedge};
use crate::periodic::PeriodicSpec;

/// Whether the reported decision is backed by the proved lookback bound or
/// by a user-chosen layer budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Proved,
    Heuristic,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QueryReport {
    pub spec_sha256: String,
    pub x: VertexSet,
    pub y: VertexSet,
    pub mode: String,
    pub decision: Decision,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Hedge>,
    pub window: (u32, u32),
    pub constant_c: String,
    pub label: Label,
    pub wall_time_ms: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ShiftReport {
    pub spec_sha256: String,
    pub x: VertexSet,
    pub y: VertexSet,
    pub shifts_checked: u64,
    pub all_identifiable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_delta: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Hedge>,
    pub constant_c: String,
    pub label: Label,
    pub wall_time_ms: f64,
}

/// Canonical content hash of a spec (over its text form).
pub fn spec_hash(spec: &PeriodicSpec) -> String {
    let digest = Sha256::digest(spec.to_text().as_bytes());
    format!("{digest:x}")
}

pub fn mode_string(lookback: &Lookback) -> String {
    match lookback {
        Lookback::Auto => "auto".into(),
        Lookback::Full => "full".into(),
        Lookback::Layers(n) => format!("layers:{n}"),
    }
}

pub fn query_label(lookback: &Lookback, x: &VertexSet) -> Label {
    let tmin_x = x.tmin().unwrap_or(0);
    if lookback.is_proved(tmin_x) {
        Label::Proved
    } else {
        Label::Heuristic
    }
}

impl ShiftReport {
    pub fn new(
        spec: &PeriodicSpec,
        x: &VertexSet,
        y: &VertexSet,
        shifts_checked: u64,
        override_used: bool,
        decision: &ShiftDecision,
        wall_time_ms: f64,
    ) -> Self {
        let (all_identifiable, failing_delta, witness) = match decision {
            ShiftDecision::AllIdentifiable => (true, None, None),
            ShiftDecision::UnidentifiableAt { delta, witness } => {
                (false, Some(*delta), Some((**witness).clone()))
            }
        };
        ShiftReport {
            spec_sha256: spec_hash(spec),
            x: x.clone(),
            y: y.clone(),
            shifts_checked,
            all_identifiable,
            failing_delta,
            witness,
            constant_c: spec.lookback_constant().to_string(),
            // an unidentifiable answer is a certificate either way; only an
            // all-clear from a truncated scan is heuristic
            label: if override_used && all_identifiable {
                Label::Heuristic
            } else {
                Label::Proved
            },
            wall_time_ms,
        }
    }
}
