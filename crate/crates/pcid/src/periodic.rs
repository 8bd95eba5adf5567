//! Periodic graph templates, unrolling into segments, time shifts,
//! distances, the lookback constant, and the latency-1 aggregation.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use num_bigint::BigUint;
use serde::Deserialize;

use crate::admg::{SegmentGraph, VertexId, VertexSet};
use crate::error::{Error, Result};

/// Finite edge-template description of an infinite periodic causal graph.
///
/// A directed template `(from, to, lag)` stands for the edges
/// `X[from, t] -> X[to, t+lag]` for every `t`; bidirected likewise.
/// The declared latency is an upper bound on template lags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicSpec {
    width: u32,
    latency: u32,
    directed: BTreeSet<(u32, u32, u32)>,
    bidirected: BTreeSet<(u32, u32, u32)>,
}

impl PeriodicSpec {
    pub fn new(
        width: u32,
        latency: u32,
        directed: impl IntoIterator<Item = (u32, u32, u32)>,
        bidirected: impl IntoIterator<Item = (u32, u32, u32)>,
    ) -> Result<Self> {
        if width == 0 {
            return Err(Error::InvalidSpec("width must be positive".into()));
        }
        if latency == 0 {
            return Err(Error::InvalidSpec("latency must be positive".into()));
        }
        let mut dir = BTreeSet::new();
        for (a, b, lag) in directed {
            if a >= width || b >= width {
                return Err(Error::InvalidSpec(format!(
                    "directed template ({a}, {b}, {lag}) has a row >= width {width}"
                )));
            }
            if lag > latency {
                return Err(Error::InvalidSpec(format!(
                    "directed template ({a}, {b}, {lag}) exceeds latency {latency}"
                )));
            }
            if a == b && lag == 0 {
                return Err(Error::InvalidSpec(format!("self-template ({a}, {b}, 0)")));
            }
            dir.insert((a, b, lag));
        }
        let mut bi = BTreeSet::new();
        for (a, b, lag) in bidirected {
            if a >= width || b >= width {
                return Err(Error::InvalidSpec(format!(
                    "bidirected template ({a}, {b}, {lag}) has a row >= width {width}"
                )));
            }
            if lag > latency {
                return Err(Error::InvalidSpec(format!(
                    "bidirected template ({a}, {b}, {lag}) exceeds latency {latency}"
                )));
            }
            if a == b && lag == 0 {
                return Err(Error::InvalidSpec(format!("self-template ({a}, {b}, 0)")));
            }
            // lag-0 bidirected pairs are unordered; store row_a < row_b
            if lag == 0 {
                bi.insert((a.min(b), a.max(b), 0));
            } else {
                bi.insert((a, b, lag));
            }
        }
        let spec = PeriodicSpec {
            width,
            latency,
            directed: dir,
            bidirected: bi,
        };
        spec.check_lag0_acyclic()?;
        Ok(spec)
    }

    fn check_lag0_acyclic(&self) -> Result<()> {
        // building one layer validates the contemporaneous part
        self.unroll((0, 0)).map(|_| ())
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn latency(&self) -> u32 {
        self.latency
    }

    pub fn directed_templates(&self) -> &BTreeSet<(u32, u32, u32)> {
        &self.directed
    }

    pub fn bidirected_templates(&self) -> &BTreeSet<(u32, u32, u32)> {
        &self.bidirected
    }

    /// Materializes the segment on layers `[lo, hi]`. Edges crossing the
    /// window boundary are dropped.
    pub fn unroll(&self, window: (u32, u32)) -> Result<SegmentGraph> {
        let (lo, hi) = window;
        if lo > hi {
            return Err(Error::InvalidWindow(lo, hi));
        }
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        for t in lo..=hi {
            for &(a, b, lag) in &self.directed {
                if t + lag <= hi {
                    directed.push((VertexId::new(a, t), VertexId::new(b, t + lag)));
                }
            }
            for &(a, b, lag) in &self.bidirected {
                if t + lag <= hi {
                    bidirected.push((VertexId::new(a, t), VertexId::new(b, t + lag)));
                }
            }
        }
        SegmentGraph::new(self.width, window, directed, bidirected)
    }

    /// The constant `C = L * 2^(Lw) * (Lw + 1)^(2Lw + 2)`, evaluated exactly.
    pub fn lookback_constant(&self) -> BigUint {
        let lw = u64::from(self.latency) * u64::from(self.width);
        let two_pow = BigUint::from(2u32).pow(lw as u32);
        let base = BigUint::from(lw + 1);
        let power = base.pow((2 * lw + 2) as u32);
        BigUint::from(self.latency) * two_pow * power
    }

    /// Relabels the graph so that each aggregated layer holds `L` original
    /// layers, giving an isomorphic spec of width `L*w` and latency 1.
    pub fn reduce_latency(&self) -> LatencyReduction {
        let w = self.width;
        let l = self.latency;
        if l == 1 {
            return LatencyReduction {
                reduced: self.clone(),
                width: w,
                latency: 1,
            };
        }
        let mut directed = BTreeSet::new();
        let mut bidirected = BTreeSet::new();
        for &(a, b, lag) in &self.directed {
            for phase in 0..l {
                let from = a + w * phase;
                let to = b + w * ((phase + lag) % l);
                let agg_lag = (phase + lag) / l;
                directed.insert((from, to, agg_lag));
            }
        }
        for &(a, b, lag) in &self.bidirected {
            for phase in 0..l {
                let from = a + w * phase;
                let to = b + w * ((phase + lag) % l);
                let agg_lag = (phase + lag) / l;
                if agg_lag == 0 {
                    bidirected.insert((from.min(to), from.max(to), 0));
                } else {
                    bidirected.insert((from, to, agg_lag));
                }
            }
        }
        let reduced = PeriodicSpec::new(w * l, 1, directed, bidirected)
            .expect("aggregation of a valid spec stays valid");
        LatencyReduction {
            reduced,
            width: w,
            latency: l,
        }
    }

    /// Line-oriented text form (the `.pcg` format).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "width {}", self.width).unwrap();
        writeln!(s, "latency {}", self.latency).unwrap();
        for &(a, b, lag) in &self.directed {
            writeln!(s, "dir  {a} {b} {lag}").unwrap();
        }
        for &(a, b, lag) in &self.bidirected {
            writeln!(s, "bi   {a} {b} {lag}").unwrap();
        }
        s
    }

    /// Parses either the text format or the JSON equivalent.
    pub fn parse(input: &str) -> Result<Self> {
        if input.trim_start().starts_with('{') {
            Self::parse_json(input)
        } else {
            Self::parse_text(input)
        }
    }

    pub fn parse_text(input: &str) -> Result<Self> {
        let mut width = None;
        let mut latency = None;
        let mut directed = Vec::new();
        let mut bidirected = Vec::new();
        for (lineno, raw) in input.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let key = parts.next().unwrap();
            let nums: Vec<u32> = parts
                .map(|p| {
                    p.parse().map_err(|_| {
                        Error::Parse(format!("line {}: bad number `{p}`", lineno + 1))
                    })
                })
                .collect::<Result<_>>()?;
            match (key, nums.as_slice()) {
                ("width", [n]) => width = Some(*n),
                ("latency", [n]) => latency = Some(*n),
                ("dir", [a, b, lag]) => directed.push((*a, *b, *lag)),
                ("bi", [a, b, lag]) => bidirected.push((*a, *b, *lag)),
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: unrecognized `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        let width = width.ok_or_else(|| Error::Parse("missing `width`".into()))?;
        let latency = latency.ok_or_else(|| Error::Parse("missing `latency`".into()))?;
        PeriodicSpec::new(width, latency, directed, bidirected)
    }

    pub fn parse_json(input: &str) -> Result<Self> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct SpecFile {
            width: u32,
            latency: u32,
            #[serde(default)]
            directed: Vec<[u32; 3]>,
            #[serde(default)]
            bidirected: Vec<[u32; 3]>,
        }
        let f: SpecFile =
            serde_json::from_str(input).map_err(|e| Error::Parse(e.to_string()))?;
        PeriodicSpec::new(
            f.width,
            f.latency,
            f.directed.iter().map(|&[a, b, l]| (a, b, l)),
            f.bidirected.iter().map(|&[a, b, l]| (a, b, l)),
        )
    }
}

/// Vertex relabeling between a spec and its latency-1 aggregation.
///
/// Original vertex `(i, t)` maps to `(i + w*(t mod L), t div L)`.
#[derive(Clone, Debug)]
pub struct LatencyReduction {
    reduced: PeriodicSpec,
    width: u32,
    latency: u32,
}

impl LatencyReduction {
    pub fn reduced(&self) -> &PeriodicSpec {
        &self.reduced
    }

    pub fn is_identity(&self) -> bool {
        self.latency == 1
    }

    pub fn to_reduced(&self, v: VertexId) -> VertexId {
        VertexId::new(v.row + self.width * (v.time % self.latency), v.time / self.latency)
    }

    pub fn to_original(&self, v: VertexId) -> VertexId {
        VertexId::new(v.row % self.width, v.time * self.latency + v.row / self.width)
    }

    pub fn set_to_reduced(&self, s: &VertexSet) -> VertexSet {
        s.iter().map(|&v| self.to_reduced(v)).collect()
    }

    pub fn set_to_original(&self, s: &VertexSet) -> VertexSet {
        s.iter().map(|&v| self.to_original(v)).collect()
    }
}

/// Every `(i, t)` becomes `(i, t + delta)`; negative shifts must not cross
/// layer 0.
pub fn shift_set(s: &VertexSet, delta: i64) -> Result<VertexSet> {
    let mut out = VertexSet::new();
    for &v in s.iter() {
        let t = i64::from(v.time) + delta;
        if t < 0 {
            return Err(Error::ShiftBelowZero { vertex: v, delta });
        }
        out.insert(VertexId::new(v.row, t as u32));
    }
    Ok(out)
}

/// Minimum absolute layer difference over all pairs.
pub fn distance(a: &VertexSet, b: &VertexSet) -> Result<u32> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Domain("distance of an empty set".into()));
    }
    let mut best = u32::MAX;
    for u in a.iter() {
        for v in b.iter() {
            best = best.min(u.time.abs_diff(v.time));
        }
    }
    Ok(best)
}
