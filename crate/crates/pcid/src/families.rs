//! Built-in graph generators: the lower-bound family G_w, the two worked
//! fixtures, and seeded random specs for property corpora.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::admg::{VertexId, VertexSet};
use crate::error::{Error, Result};
use crate::ident::Hedge;
use crate::periodic::PeriodicSpec;

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyRequest {
    /// The width-w lower-bound family; requires w ≡ 1 (mod 3), w ≥ 4.
    Gw { w: u32 },
    Fig2,
    Fig3,
    Random {
        seed: u64,
        w: u32,
        l: u32,
        density_dir: f64,
        density_bi: f64,
    },
}

pub fn generate(req: &FamilyRequest) -> Result<PeriodicSpec> {
    match *req {
        FamilyRequest::Gw { w } => {
            if w % 3 != 1 || w < 4 {
                return Err(Error::Domain(format!(
                    "G_w needs w = 3k+1 with w >= 4, got {w}"
                )));
            }
            // row arithmetic is modulo w throughout
            let directed = (0..w).flat_map(|i| [(i, i, 1), (i, (i + 3) % w, 1)]);
            let bidirected = (0..w).flat_map(|i| [(i, (i + 1) % w, 1), (i, (i + 2) % w, 1)]);
            PeriodicSpec::new(w, 1, directed, bidirected)
        }
        FamilyRequest::Fig2 => PeriodicSpec::new(
            3,
            1,
            // every row feeds row 2 of the next layer
            [(0, 2, 1), (1, 2, 1), (2, 2, 1)],
            // confounding: row 0 with next-layer rows 1 and 2, row 2 with itself
            [(0, 1, 1), (0, 2, 1), (2, 2, 1)],
        ),
        FamilyRequest::Fig3 => PeriodicSpec::new(
            3,
            1,
            [(0, 0, 1), (0, 1, 0), (1, 0, 1), (2, 1, 1), (2, 2, 1)],
            [(1, 2, 1)],
        ),
        FamilyRequest::Random {
            seed,
            w,
            l,
            density_dir,
            density_bi,
        } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            // resample until the contemporaneous part is acyclic
            loop {
                let mut dir = Vec::new();
                let mut bi = Vec::new();
                for a in 0..w {
                    for b in 0..w {
                        for lag in 0..=l {
                            if lag == 0 && a == b {
                                continue;
                            }
                            if rng.gen_bool(density_dir) {
                                dir.push((a, b, lag));
                            }
                            if (lag > 0 || a < b) && rng.gen_bool(density_bi) {
                                bi.push((a, b, lag));
                            }
                        }
                    }
                }
                match PeriodicSpec::new(w, l, dir, bi) {
                    Ok(spec) => return Ok(spec),
                    Err(Error::InLayerCycle(_)) => continue,
                    Err(e) => return Err(e),
                }
            }
        }
    }
}

/// The explicit hedge showing P(X_{w-1,w-2} | do X_{0,0}) unidentifiable
/// in G_w, together with its query. Child maps follow the construction's
/// directed arrows: rows 0 and w-1 descend within their row, rows w-3 and
/// w-2 take the +3 diagonal (wrapping to rows 0 and 1).
pub fn gw_known_hedge(w: u32) -> Result<(Hedge, VertexSet, VertexSet)> {
    if w % 3 != 1 || w < 7 {
        return Err(Error::Domain(format!(
            "known hedge needs w = 3k+1 with w >= 7, got {w}"
        )));
    }
    let v = VertexId::new;
    let x = VertexSet::singleton(v(0, 0));
    let y = VertexSet::singleton(v(w - 1, w - 2));
    let f_vertices: VertexSet = [
        v(0, 0),
        v(0, 1),
        v(1, 1),
        v(w - 3, 0),
        v(w - 2, 0),
        v(w - 1, 0),
        v(w - 1, 1),
    ]
    .into_iter()
    .collect();
    let fprime_vertices = f_vertices.difference(&x);
    let roots: VertexSet = [v(0, 1), v(1, 1), v(w - 1, 1)].into_iter().collect();
    let f_child: std::collections::BTreeMap<_, _> = [
        (v(0, 0), v(0, 1)),
        (v(w - 3, 0), v(0, 1)),
        (v(w - 2, 0), v(1, 1)),
        (v(w - 1, 0), v(w - 1, 1)),
    ]
    .into();
    let mut fprime_child = f_child.clone();
    fprime_child.remove(&v(0, 0));
    Ok((
        Hedge {
            f_vertices,
            f_child,
            fprime_vertices,
            fprime_child,
            roots,
            sub_query: None,
        },
        x,
        y,
    ))
}
