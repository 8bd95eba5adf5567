//! Per-layer structural fingerprints of a hedge: the left-connected
//! partitions of rows for F and F', plus the ancestral row set.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::admg::{SegmentGraph, VertexId, VertexSet};
use crate::error::{Error, Result};
use crate::ident::{validate_hedge, Hedge};

/// Fingerprint of one layer. Two layers with equal signatures are
/// interchangeable for the cut-and-glue map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LayerSignature {
    /// w+1 blocks: rows absent from F at this layer, then the
    /// left-connected components sorted by smallest row, padded with
    /// empty blocks.
    pub alpha_f: Vec<Vec<u32>>,
    pub alpha_fprime: Vec<Vec<u32>>,
    /// Rows i with (i, t) an ancestor of y in the x-mutilated graph.
    pub beta: BTreeSet<u32>,
}

/// Signature of a single layer; the hedge is validated first.
pub fn layer_signature(
    g: &SegmentGraph,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
    t: u32,
) -> Result<LayerSignature> {
    let (lo, hi) = g.window();
    if t < lo || t > hi {
        return Err(Error::Domain(format!("layer {t} outside window [{lo}, {hi}]")));
    }
    let violations = validate_hedge(g, x, y, h);
    if !violations.is_empty() {
        return Err(Error::Query(format!(
            "hedge does not validate: {}",
            violations
                .iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join("; ")
        )));
    }
    Ok(signatures_range(g, h, x, y, t, t)?.remove(0))
}

/// Signatures of every layer in `[lo, hi]`, sharing one incremental
/// connectivity pass. The hedge is assumed valid.
pub(crate) fn signatures_range(
    g: &SegmentGraph,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
    lo: u32,
    hi: u32,
) -> Result<Vec<LayerSignature>> {
    let anc = g.mutilate_incoming(x)?.ancestors(y)?;
    let alpha_f = alpha_range(g, &h.f_vertices, lo, hi);
    let alpha_fprime = alpha_range(g, &h.fprime_vertices, lo, hi);
    Ok((lo..=hi)
        .map(|t| {
            let i = (t - lo) as usize;
            LayerSignature {
                alpha_f: alpha_f[i].clone(),
                alpha_fprime: alpha_fprime[i].clone(),
                beta: anc
                    .iter()
                    .filter(|v| v.time == t)
                    .map(|v| v.row)
                    .collect(),
            }
        })
        .collect())
}

/// Left-connected partitions of rows for one forest, for each layer of
/// `[lo, hi]`. Connectivity at layer t may use bidirected paths through any
/// forest vertex at layers <= t, so components only ever merge as t grows;
/// a union-find over the forest processes layers in ascending order.
fn alpha_range(g: &SegmentGraph, forest: &VertexSet, lo: u32, hi: u32) -> Vec<Vec<Vec<u32>>> {
    let w = g.width();
    let ids: Vec<VertexId> = forest.iter().copied().collect();
    let index: BTreeMap<VertexId, usize> =
        ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();

    let mut edges_by_layer: BTreeMap<u32, Vec<(usize, usize)>> = BTreeMap::new();
    for &(u, v) in g.bidirected_edges() {
        if let (Some(&ui), Some(&vi)) = (index.get(&u), index.get(&v)) {
            edges_by_layer
                .entry(u.time.max(v.time))
                .or_default()
                .push((ui, vi));
        }
    }

    let mut uf: Vec<usize> = (0..ids.len()).collect();
    fn find(uf: &mut Vec<usize>, i: usize) -> usize {
        if uf[i] != i {
            let r = find(uf, uf[i]);
            uf[i] = r;
        }
        uf[i]
    }

    let mut out = Vec::with_capacity((hi - lo + 1) as usize);
    for t in 0..=hi {
        for &(a, b) in edges_by_layer.get(&t).into_iter().flatten() {
            let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
            uf[ra] = rb;
        }
        if t < lo {
            continue;
        }
        // group this layer's present rows by component
        let mut groups: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
        let mut present: BTreeSet<u32> = BTreeSet::new();
        for (i, v) in ids.iter().enumerate() {
            if v.time == t {
                present.insert(v.row);
                groups.entry(find(&mut uf, i)).or_default().push(v.row);
            }
        }
        let absent: Vec<u32> = (0..w).filter(|r| !present.contains(r)).collect();
        let mut blocks: Vec<Vec<u32>> = groups.into_values().collect();
        for b in &mut blocks {
            b.sort_unstable();
        }
        blocks.sort_by_key(|b| b[0]);
        let mut partition = Vec::with_capacity(w as usize + 1);
        partition.push(absent);
        partition.extend(blocks);
        partition.resize(w as usize + 1, Vec::new());
        out.push(partition);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::admg::vs;
    use crate::families::{self, FamilyRequest};

    fn g7_fixture() -> (SegmentGraph, Hedge, VertexSet, VertexSet) {
        let g = families::generate(&FamilyRequest::Gw { w: 7 })
            .unwrap()
            .unroll((0, 5))
            .unwrap();
        let (h, x, y) = families::gw_known_hedge(7).unwrap();
        (g, h, x, y)
    }

    #[test]
    fn empty_layer_signature() {
        let (g, h, x, y) = g7_fixture();
        let sig = layer_signature(&g, &h, &x, &y, 4).unwrap();
        let mut expected = vec![vec![0, 1, 2, 3, 4, 5, 6]];
        expected.resize(8, Vec::new());
        assert_eq!(sig.alpha_f, expected);
        assert_eq!(sig.alpha_fprime, expected);
    }

    #[test]
    fn g7_layer0_each_row_own_block() {
        // no bidirected edge has both endpoints at layer <= 0, so each
        // present row of layer 0 stands alone
        let (g, h, x, y) = g7_fixture();
        let sig = layer_signature(&g, &h, &x, &y, 0).unwrap();
        assert_eq!(
            sig.alpha_f,
            vec![
                vec![1, 2, 3],
                vec![0],
                vec![4],
                vec![5],
                vec![6],
                vec![],
                vec![],
                vec![]
            ]
        );
        // F' lacks X00
        assert_eq!(
            sig.alpha_fprime,
            vec![
                vec![0, 1, 2, 3],
                vec![4],
                vec![5],
                vec![6],
                vec![],
                vec![],
                vec![],
                vec![]
            ]
        );
    }

    #[test]
    fn g7_layer1_roots_merge() {
        let (g, h, x, y) = g7_fixture();
        let sig = layer_signature(&g, &h, &x, &y, 1).unwrap();
        // X01 ~ X11 via the lag-1 edge from X00? no: left-connectivity at
        // layer 1 may route through layer-0 vertices: X01 <-> X60 (6+2=1),
        // X11 <-> X60 (6+2)? 6+2 = 8 mod 7 = 1, and 6+1 = 0: X60 links to
        // both X01 and X11, and X61 <-> X40/X50 paths join via X50 <-> X61?
        // assert the computed invariants instead of hand-derived blocks:
        // the partition covers all rows exactly once
        let mut seen: Vec<u32> = sig.alpha_f.iter().flatten().copied().collect();
        seen.sort_unstable();
        assert_eq!(seen, (0..7).collect::<Vec<_>>());
        assert_eq!(sig.alpha_f.len(), 8);
        assert_eq!(sig.alpha_f[0], vec![2, 3, 4, 5]); // rows absent at layer 1
    }

    #[test]
    fn beta_rows_follow_ancestors() {
        let (g, h, x, y) = g7_fixture();
        let anc = g.mutilate_incoming(&x).unwrap().ancestors(&y).unwrap();
        for t in 0..=5 {
            let sig = layer_signature(&g, &h, &x, &y, t).unwrap();
            let rows: BTreeSet<u32> =
                anc.iter().filter(|v| v.time == t).map(|v| v.row).collect();
            assert_eq!(sig.beta, rows);
        }
    }

    #[test]
    fn invalid_hedge_rejected() {
        let (g, mut h, x, y) = g7_fixture();
        h.roots = vs(&[(0, 1)]);
        assert!(matches!(
            layer_signature(&g, &h, &x, &y, 0),
            Err(Error::Query(_))
        ));
        let (g, h, x, y) = g7_fixture();
        assert!(matches!(
            layer_signature(&g, &h, &x, &y, 9),
            Err(Error::Domain(_))
        ));
    }
}
