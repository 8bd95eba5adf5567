//! Exhaustive hedge enumeration for small graphs.
//!
//! Every hedge vertex is an ancestor of y (roots lie in An(y, G_x̄) and all
//! other forest vertices reach the roots by directed paths), so enumeration
//! runs over subsets of An(y). Subset/submask iteration is O(3^|An(y)|),
//! which the size guard keeps tractable.

use std::collections::BTreeMap;

use crate::admg::{SegmentGraph, VertexId, VertexSet};
use crate::error::{Error, Result};
use crate::ident::Hedge;

/// Which reading of the treatment condition the enumeration uses.
///
/// `Containment` demands x ⊆ V(F) \ V(F'); `Intersection` demands only
/// F ∩ x ≠ ∅ and F' ∩ x = ∅, the weaker classical condition.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HedgeVariant {
    Containment,
    Intersection,
}

pub const DEFAULT_MAX_VERTICES: usize = 14;

/// Enumerates all minimal hedges for `(x, y)` under the containment variant.
///
/// Reported triples are Pareto-minimal: a hedge is dropped when another
/// reported hedge has componentwise-contained (V(F), V(F'), R). The result
/// is empty iff no hedge exists at all.
pub fn enumerate_hedges(
    g: &SegmentGraph,
    x: &VertexSet,
    y: &VertexSet,
    max_vertices: usize,
) -> Result<Vec<Hedge>> {
    enumerate_hedges_with(g, x, y, max_vertices, HedgeVariant::Containment)
}

pub fn enumerate_hedges_with(
    g: &SegmentGraph,
    x: &VertexSet,
    y: &VertexSet,
    max_vertices: usize,
    variant: HedgeVariant,
) -> Result<Vec<Hedge>> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Query("x and y must be non-empty".into()));
    }
    if !x.is_disjoint(y) {
        return Err(Error::Query("x and y overlap".into()));
    }
    for v in x.iter().chain(y.iter()) {
        if !g.contains(v) {
            return Err(Error::VertexOutsideGraph(*v));
        }
    }
    if g.vertex_count() > max_vertices {
        return Err(Error::SizeGuard {
            vertices: g.vertex_count(),
            max: max_vertices,
        });
    }

    let universe = g.ancestors(y)?;
    let anc_xbar = g.mutilate_incoming(x)?.ancestors(y)?;

    let ids: Vec<VertexId> = universe.iter().copied().collect();
    let n = ids.len();
    if n > 32 {
        return Err(Error::SizeGuard {
            vertices: n,
            max: 32,
        });
    }
    let index = |v: &VertexId| ids.binary_search(v).ok().map(|i| i as u32);
    let mask_of = |s: &VertexSet| -> u32 {
        s.iter().filter_map(index).map(|i| 1 << i).sum()
    };

    let mut child_mask = vec![0u32; n];
    let mut parent_mask = vec![0u32; n];
    let mut spouse_mask = vec![0u32; n];
    for (i, v) in ids.iter().enumerate() {
        for c in g.children_of(v) {
            if let Some(j) = index(c) {
                child_mask[i] |= 1 << j;
                parent_mask[j as usize] |= 1 << i;
            }
        }
        for s in g.spouses_of(v) {
            if let Some(j) = index(s) {
                spouse_mask[i] |= 1 << j;
            }
        }
    }

    let x_mask = mask_of(x);
    let anc_mask = mask_of(&anc_xbar);
    if variant == HedgeVariant::Containment && (x_mask.count_ones() as usize) < x.len() {
        // some treatment vertex is no ancestor of y, so x ⊆ V(F) is impossible
        return Ok(Vec::new());
    }

    let connected = |set: u32| -> bool {
        if set == 0 {
            return false;
        }
        let mut seen = set & set.wrapping_neg(); // lowest bit
        loop {
            let mut grown = seen;
            let mut rest = seen;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                grown |= spouse_mask[i] & set;
            }
            if grown == seen {
                return seen == set;
            }
            seen = grown;
        }
    };
    // all vertices of `set` that reach `targets` by directed edges in `set`
    let reaches = |set: u32, targets: u32| -> u32 {
        let mut closure = targets & set;
        loop {
            let mut grown = closure;
            let mut rest = set & !closure;
            while rest != 0 {
                let i = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                if child_mask[i] & closure != 0 {
                    grown |= 1 << i;
                }
            }
            if grown == closure {
                return closure;
            }
            closure = grown;
        }
    };
    let sinks = |set: u32| -> u32 {
        let mut out = 0;
        let mut rest = set;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            if child_mask[i] & set == 0 {
                out |= 1 << i;
            }
        }
        out
    };

    let mut found: Vec<(u32, u32, u32)> = Vec::new();
    for vf in 1u32..1 << n {
        let ok_x = match variant {
            HedgeVariant::Containment => vf & x_mask == x_mask,
            HedgeVariant::Intersection => vf & x_mask != 0,
        };
        if !ok_x || !connected(vf) {
            continue;
        }
        let avail = vf & !x_mask;
        // submask enumeration of V(F') over V(F) \ x
        let mut fp = avail;
        while fp != 0 {
            'this_fp: {
                if !connected(fp) {
                    break 'this_fp;
                }
                // the largest admissible root set; if it fails, every R does
                let k = fp & anc_mask;
                if k == 0 || reaches(vf, k) != vf || reaches(fp, k) != fp {
                    break 'this_fp;
                }
                let r = sinks(vf) | sinks(fp);
                debug_assert_eq!(r & k, r, "forced roots must be admissible");
                found.push((vf, fp, r));
            }
            fp = (fp - 1) & avail;
        }
    }

    // keep only the Pareto-minimal triples under componentwise inclusion
    let minimal: Vec<&(u32, u32, u32)> = found
        .iter()
        .filter(|&&(vf, fp, r)| {
            !found.iter().any(|&(vf2, fp2, r2)| {
                (vf2, fp2, r2) != (vf, fp, r)
                    && vf2 & vf == vf2
                    && fp2 & fp == fp2
                    && r2 & r == r2
            })
        })
        .collect();

    Ok(minimal
        .into_iter()
        .map(|&(vf, fp, r)| build_hedge(&ids, &parent_mask, vf, fp, r))
        .collect())
}

fn build_hedge(ids: &[VertexId], parent_mask: &[u32], vf: u32, fp: u32, r: u32) -> Hedge {
    let set = |mask: u32| -> VertexSet {
        (0..ids.len() as u32)
            .filter(|i| mask >> i & 1 == 1)
            .map(|i| ids[i as usize])
            .collect()
    };
    Hedge {
        f_vertices: set(vf),
        f_child: child_map(ids, parent_mask, vf, r),
        fprime_vertices: set(fp),
        fprime_child: child_map(ids, parent_mask, fp, r),
        roots: set(r),
        sub_query: None,
    }
}

/// Reverse BFS from the roots; each non-root records the vertex it was
/// discovered from as its unique child.
fn child_map(
    ids: &[VertexId],
    parent_mask: &[u32],
    set: u32,
    roots: u32,
) -> BTreeMap<VertexId, VertexId> {
    let mut assigned = roots;
    let mut queue: Vec<u32> = (0..32).filter(|i| roots >> i & 1 == 1).collect();
    let mut out = BTreeMap::new();
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        let mut ps = parent_mask[u as usize] & set & !assigned;
        while ps != 0 {
            let p = ps.trailing_zeros();
            ps &= ps - 1;
            assigned |= 1 << p;
            out.insert(ids[p as usize], ids[u as usize]);
            queue.push(p);
        }
    }
    out
}
