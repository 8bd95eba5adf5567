//! The cut-and-glue map Φ_{b,Δ} on hedges, and the repeated-compression
//! driver built on it.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::admg::{SegmentGraph, VertexId, VertexSet};
use crate::bounded::signature::signatures_range;
use crate::error::{Error, Result};
use crate::ident::{validate_hedge, Hedge};
use crate::periodic::PeriodicSpec;

/// Remove layers `b+1 ..= b+delta` and pull everything above down by delta.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutPlan {
    pub b: u32,
    pub delta: u32,
}

/// Where `compress_hedge` looks for cuttable layer pairs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CompressRegion {
    /// Layers strictly before tmin(x).
    PastOfX,
    /// Layers strictly between tmax(x) and tmin(y).
    BetweenXY,
}

/// Applies Φ_{b,Δ} to a hedge whose signatures at layers b and b+Δ agree.
///
/// Vertices at layers <= b stay put, vertices above the cut move down by
/// delta, and hedge vertices inside the cut are dropped. Child maps are
/// re-derived on the glued graph. Returns the mapped hedge and query; the
/// result provably validates for them.
pub fn phi_cut(
    spec: &PeriodicSpec,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
    plan: CutPlan,
) -> Result<(Hedge, VertexSet, VertexSet)> {
    if spec.latency() != 1 {
        return Err(Error::Precondition(format!(
            "cutting requires latency 1, spec has latency {}",
            spec.latency()
        )));
    }
    if plan.delta == 0 {
        return Err(Error::Precondition("cut of zero layers".into()));
    }
    let hi = window_top(h, x, y)?;
    if plan.b + plan.delta > hi {
        return Err(Error::Precondition(format!(
            "cut [{}+1, {}+{}] exceeds the occupied window [0, {hi}]",
            plan.b, plan.b, plan.delta
        )));
    }
    let g = spec.unroll((0, hi))?;
    let violations = validate_hedge(&g, x, y, h);
    if !violations.is_empty() {
        return Err(Error::Query(format!(
            "hedge does not validate before cutting: {}",
            violations[0]
        )));
    }
    let in_cut = |v: &VertexId| v.time > plan.b && v.time <= plan.b + plan.delta;
    if x.iter().chain(y.iter()).any(in_cut) {
        return Err(Error::Precondition(
            "cut region intersects x or y".into(),
        ));
    }
    let sigs = signatures_range(&g, h, x, y, plan.b, plan.b + plan.delta)?;
    if sigs[0] != sigs[plan.delta as usize] {
        return Err(Error::Precondition(format!(
            "signatures at layers {} and {} differ",
            plan.b,
            plan.b + plan.delta
        )));
    }

    let phi = |v: &VertexId| -> Option<VertexId> {
        if v.time <= plan.b {
            Some(*v)
        } else if v.time > plan.b + plan.delta {
            Some(VertexId::new(v.row, v.time - plan.delta))
        } else {
            None
        }
    };
    let map_set = |s: &VertexSet| -> VertexSet { s.iter().filter_map(phi).collect() };

    let x2 = map_set(x);
    let y2 = map_set(y);
    let f2 = map_set(&h.f_vertices);
    let fp2 = map_set(&h.fprime_vertices);
    let g2 = spec.unroll((0, hi - plan.delta))?;

    let roots = fp2.intersection(&g2.mutilate_incoming(&x2)?.ancestors(&y2)?);
    let f_child = rebuild_children(&g2, &f2, &roots)?;
    let fprime_child = rebuild_children(&g2, &fp2, &roots)?;
    let h2 = Hedge {
        f_vertices: f2,
        f_child,
        fprime_vertices: fp2,
        fprime_child,
        roots,
        sub_query: None,
    };
    let violations = validate_hedge(&g2, &x2, &y2, &h2);
    if !violations.is_empty() {
        return Err(Error::Internal(format!(
            "cut output fails validation: {}",
            violations[0]
        )));
    }
    Ok((h2, x2, y2))
}

/// Reverse BFS from the roots within `set`; fails if some vertex cannot
/// reach the roots (the cut preconditions rule this out).
fn rebuild_children(
    g: &SegmentGraph,
    set: &VertexSet,
    roots: &VertexSet,
) -> Result<BTreeMap<VertexId, VertexId>> {
    let mut out = BTreeMap::new();
    let mut assigned = roots.clone();
    let mut queue: Vec<VertexId> = roots.iter().copied().collect();
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        for &p in g.parents_of(&u) {
            if set.contains(&p) && assigned.insert(p) {
                out.insert(p, u);
                queue.push(p);
            }
        }
    }
    if assigned.len() != set.len() {
        return Err(Error::Internal(
            "glued forest no longer reaches its roots".into(),
        ));
    }
    Ok(out)
}

fn window_top(h: &Hedge, x: &VertexSet, y: &VertexSet) -> Result<u32> {
    [h.f_vertices.tmax(), x.tmax(), y.tmax()]
        .into_iter()
        .flatten()
        .max()
        .ok_or_else(|| Error::Query("empty hedge and query".into()))
}

/// Repeatedly cuts signature-equal layer pairs out of the chosen region
/// until none remain. Works in latency-1 coordinates (aggregating first if
/// needed) and maps the result back. The query moves with the cuts, so the
/// possibly-shifted x and y are returned alongside the hedge.
pub fn compress_hedge(
    spec: &PeriodicSpec,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
    region: CompressRegion,
) -> Result<(Hedge, VertexSet, VertexSet)> {
    if region == CompressRegion::BetweenXY {
        let (tmax_x, tmin_y) = match (x.tmax(), y.tmin()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::Query("x and y must be non-empty".into())),
        };
        if tmax_x > tmin_y {
            return Err(Error::Precondition(
                "between-region compression needs tmax(x) <= tmin(y)".into(),
            ));
        }
    }
    {
        let hi = window_top(h, x, y)?;
        let g = spec.unroll((0, hi))?;
        let violations = validate_hedge(&g, x, y, h);
        if !violations.is_empty() {
            return Err(Error::Query(format!(
                "hedge does not validate: {}",
                violations[0]
            )));
        }
    }

    let red = spec.reduce_latency();
    let map_child =
        |m: &BTreeMap<VertexId, VertexId>, fwd: bool| -> BTreeMap<VertexId, VertexId> {
            m.iter()
                .map(|(&k, &v)| {
                    if fwd {
                        (red.to_reduced(k), red.to_reduced(v))
                    } else {
                        (red.to_original(k), red.to_original(v))
                    }
                })
                .collect()
        };
    let mut h = Hedge {
        f_vertices: red.set_to_reduced(&h.f_vertices),
        f_child: map_child(&h.f_child, true),
        fprime_vertices: red.set_to_reduced(&h.fprime_vertices),
        fprime_child: map_child(&h.fprime_child, true),
        roots: red.set_to_reduced(&h.roots),
        sub_query: None,
    };
    let mut x = red.set_to_reduced(x);
    let mut y = red.set_to_reduced(y);
    let rspec = red.reduced().clone();

    while let Some(plan) = find_cut(&rspec, &h, &x, &y, region)? {
        let (h2, x2, y2) = phi_cut(&rspec, &h, &x, &y, plan)?;
        h = h2;
        x = x2;
        y = y2;
    }

    Ok((
        Hedge {
            f_vertices: red.set_to_original(&h.f_vertices),
            f_child: map_child(&h.f_child, false),
            fprime_vertices: red.set_to_original(&h.fprime_vertices),
            fprime_child: map_child(&h.fprime_child, false),
            roots: red.set_to_original(&h.roots),
            sub_query: None,
        },
        red.set_to_original(&x),
        red.set_to_original(&y),
    ))
}

/// First layer b (left to right) with any signature-equal partner in the
/// region, paired with the largest such delta.
fn find_cut(
    spec: &PeriodicSpec,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
    region: CompressRegion,
) -> Result<Option<CutPlan>> {
    let (lo, hi_excl) = match region {
        CompressRegion::PastOfX => {
            let Some(tmin_x) = x.tmin() else {
                return Ok(None);
            };
            (0, tmin_x) // cut region must stay below tmin(x)
        }
        CompressRegion::BetweenXY => {
            let (Some(tmax_x), Some(tmin_y)) = (x.tmax(), y.tmin()) else {
                return Ok(None);
            };
            (tmax_x, tmin_y) // region is the open interval between them
        }
    };
    // need b and b + delta with delta >= 1 inside [lo, hi_excl - 1]
    if hi_excl < lo + 2 {
        return Ok(None);
    }
    let top = hi_excl - 1;
    let occupied: std::collections::BTreeSet<u32> =
        x.iter().chain(y.iter()).map(|v| v.time).collect();
    let g = spec.unroll((0, window_top(h, x, y)?))?;
    let sigs = signatures_range(&g, h, x, y, lo, top)?;
    for b in lo..top {
        for partner in (b + 1..=top).rev() {
            if occupied.range(b + 1..=partner).next().is_some() {
                continue;
            }
            if sigs[(b - lo) as usize] == sigs[(partner - lo) as usize] {
                return Ok(Some(CutPlan {
                    b,
                    delta: partner - b,
                }));
            }
        }
    }
    Ok(None)
}
