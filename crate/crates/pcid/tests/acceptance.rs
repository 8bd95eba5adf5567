//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single pass line; any failure panics with context.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pcid::admg::{SegmentGraph, VertexId, VertexSet};
use pcid::bounded::{
    compress_hedge, decide_bounded_with, layer_signature, phi_cut, CompressRegion, CutPlan,
    DecideOptions, Lookback,
};
use pcid::families::{self, FamilyRequest};
use pcid::ident::{
    enumerate_hedges, enumerate_hedges_with, id_decide, validate_hedge, Decision, Hedge,
    HedgeVariant,
};
use pcid::periodic::{distance, shift_set, PeriodicSpec};

fn vs(items: &[(u32, u32)]) -> VertexSet {
    items.iter().map(|&(r, t)| VertexId::new(r, t)).collect()
}

fn random_spec(rng: &mut ChaCha8Rng, w: u32, l: u32, dd: f64, db: f64) -> PeriodicSpec {
    families::generate(&FamilyRequest::Random {
        seed: rng.gen(),
        w,
        l,
        density_dir: dd,
        density_bi: db,
    })
    .expect("random specs are always valid")
}

/// Criterion 1: the fig2 fixture has exactly one minimal hedge,
/// and the decision flips when the past layer is out of scope.
#[test]
fn acceptance_1_fig2_reproduction() {
    let spec = families::generate(&FamilyRequest::Fig2).unwrap();
    let (x, y) = (vs(&[(1, 1)]), vs(&[(2, 2)]));
    let opts = DecideOptions::default();

    let full = decide_bounded_with(&spec, &x, &y, Lookback::Full, &opts).unwrap();
    assert_eq!(full.decision, Decision::Unidentifiable);
    let g = spec.unroll((0, 2)).unwrap();
    assert_eq!(validate_hedge(&g, &x, &y, &full.witness.unwrap()), vec![]);

    let hedges = enumerate_hedges(&g, &x, &y, 14).unwrap();
    assert_eq!(hedges.len(), 1, "expected a unique minimal hedge");
    assert_eq!(hedges[0].f_vertices, vs(&[(0, 0), (1, 1), (2, 1), (2, 2)]));
    assert_eq!(hedges[0].fprime_vertices, vs(&[(2, 2)]));
    assert_eq!(hedges[0].roots, vs(&[(2, 2)]));

    let short = decide_bounded_with(&spec, &x, &y, Lookback::Layers(0), &opts).unwrap();
    assert_eq!(short.decision, Decision::Identifiable);

    println!("criterion 1 (unique-hedge fixture reproduction): pass");
}

/// Criterion 2: the lower-bound family G_w for w in {7, 10, 13}.
#[test]
fn acceptance_2_gw_suite() {
    for w in [7u32, 10, 13] {
        let spec = families::generate(&FamilyRequest::Gw { w }).unwrap();
        let g = spec.unroll((0, w - 2)).unwrap();
        let x = vs(&[(0, 0)]);
        let far_y = vs(&[(w - 1, w - 2)]);

        let r = id_decide(&g, &x, &far_y).unwrap();
        assert_eq!(
            r.decision,
            Decision::Unidentifiable,
            "far query must fail for w={w}"
        );

        let (h, hx, hy) = families::gw_known_hedge(w).unwrap();
        assert_eq!((hx.clone(), hy.clone()), (x.clone(), far_y.clone()));
        assert_eq!(validate_hedge(&g, &hx, &hy, &h), vec![], "known hedge w={w}");

        // every vertex within the safe distance is identifiable
        let bound = w / 3 - 1; // floor of w/3 - 1 for w = 3k+1
        for t in 0..=bound {
            for j in 0..w {
                if (j, t) == (0, 0) {
                    continue;
                }
                let y = vs(&[(j, t)]);
                assert_eq!(distance(&x, &y).unwrap(), t);
                let r = id_decide(&g, &x, &y).unwrap();
                assert_eq!(
                    r.decision,
                    Decision::Identifiable,
                    "near query X_{{{j},{t}}} must be identifiable for w={w}"
                );
            }
        }
    }
    println!("criterion 2 (lower-bound family suite, w in {{7,10,13}}): pass");
}

fn random_query(rng: &mut ChaCha8Rng, g: &SegmentGraph) -> Option<(VertexSet, VertexSet)> {
    let verts: Vec<VertexId> = g.vertices().iter().copied().collect();
    if verts.len() < 4 {
        return None;
    }
    let x_len = if rng.gen_bool(0.5) { 1 } else { 2 };
    let y_len = if rng.gen_bool(0.5) { 1 } else { 2 };
    let mut pick = || verts[rng.gen_range(0..verts.len())];
    let mut x = VertexSet::new();
    let mut y = VertexSet::new();
    for _ in 0..20 {
        if x.len() < x_len {
            x.insert(pick());
        }
        let v = pick();
        if y.len() < y_len && !x.contains(&v) {
            y.insert(v);
        }
        if x.len() == x_len && y.len() == y_len {
            break;
        }
    }
    (!x.is_empty() && !y.is_empty() && x.is_disjoint(&y)).then_some((x, y))
}

/// Criterion 3: the recursive decision agrees with brute-force hedge
/// existence on 300+ random small graphs.
#[test]
fn acceptance_3_oracle_equivalence() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC3);
    let mut cases = 0;
    while cases < 300 {
        let w = rng.gen_range(1..=3u32);
        let l = rng.gen_range(1..=2u32);
        let spec = random_spec(&mut rng, w, l, 0.35, 0.35);
        let layers = (12 / w).min(4 + l);
        let g = spec.unroll((0, layers - 1)).unwrap();
        assert!(g.vertex_count() <= 12);
        let Some((x, y)) = random_query(&mut rng, &g) else {
            continue;
        };
        let decision = id_decide(&g, &x, &y).unwrap().decision;
        let hedges =
            enumerate_hedges_with(&g, &x, &y, 12, HedgeVariant::Intersection).unwrap();
        assert_eq!(
            decision == Decision::Unidentifiable,
            !hedges.is_empty(),
            "oracle disagreement: spec {spec:?}, x={x:?}, y={y:?}"
        );
        cases += 1;
    }
    println!("criterion 3 (oracle equivalence on {cases} random queries): pass");
}

/// All (b, b+delta) pairs with equal signatures whose cut region avoids
/// x and y.
fn cut_plans(
    g: &SegmentGraph,
    h: &Hedge,
    x: &VertexSet,
    y: &VertexSet,
) -> Vec<CutPlan> {
    // cuts must stay within the window occupied by the hedge and the query
    let hi = [h.span().unwrap().1, x.tmax().unwrap(), y.tmax().unwrap()]
        .into_iter()
        .max()
        .unwrap();
    let sigs: Vec<_> = (0..=hi)
        .map(|t| layer_signature(g, h, x, y, t).unwrap())
        .collect();
    let occupied: std::collections::BTreeSet<u32> =
        x.iter().chain(y.iter()).map(|v| v.time).collect();
    let mut plans = Vec::new();
    for b in 0..hi {
        for partner in b + 1..=hi {
            if occupied.range(b + 1..=partner).next().is_some() {
                continue;
            }
            if sigs[b as usize] == sigs[partner as usize] {
                plans.push(CutPlan {
                    b,
                    delta: partner - b,
                });
            }
        }
    }
    plans
}

/// Criterion 4: every signature-equal cut of every found hedge stays a
/// valid hedge, and repeated compression only shrinks.
#[test]
fn acceptance_4_cut_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC4);
    let mut cut_cases = 0;
    let mut hedges_seen = 0;
    while cut_cases < 500 {
        let w = rng.gen_range(1..=3u32);
        let spec = random_spec(&mut rng, w, 1, 0.3, 0.4);
        let hi = rng.gen_range(6..=10u32);
        let g = spec.unroll((0, hi)).unwrap();
        let Some((x, y)) = random_query(&mut rng, &g) else {
            continue;
        };
        let r = id_decide(&g, &x, &y).unwrap();
        let Some(h) = r.witness else { continue };
        if h.sub_query.is_some() {
            continue; // certificate holds for a sub-query, not (x, y)
        }
        hedges_seen += 1;

        for plan in cut_plans(&g, &h, &x, &y) {
            let (h2, x2, y2) = phi_cut(&spec, &h, &x, &y, plan).unwrap();
            let g2 = spec.unroll((0, hi - plan.delta)).unwrap();
            assert_eq!(
                validate_hedge(&g2, &x2, &y2, &h2),
                vec![],
                "cut {plan:?} broke the hedge: spec {spec:?}, x={x:?}, y={y:?}"
            );
            cut_cases += 1;
        }

        // compression: validates, and never grows the span
        let span = |h: &Hedge| {
            let (a, b) = h.span().unwrap();
            b - a
        };
        for region in [CompressRegion::PastOfX, CompressRegion::BetweenXY] {
            if region == CompressRegion::BetweenXY
                && x.tmax().unwrap() > y.tmin().unwrap()
            {
                continue;
            }
            let (h2, x2, y2) = compress_hedge(&spec, &h, &x, &y, region).unwrap();
            assert!(span(&h2) <= span(&h), "compression grew the span");
            let top = y2.tmax().unwrap().max(h2.span().unwrap().1);
            let g2 = spec.unroll((0, top)).unwrap();
            assert_eq!(validate_hedge(&g2, &x2, &y2, &h2), vec![]);
        }
    }
    println!(
        "criterion 4 (cut-and-glue suite, {cut_cases} cuts over {hedges_seen} hedges): pass"
    );
}

/// Criterion 5: the proved lookback window gives the same answers as full
/// history on queries 3000 layers in.
#[test]
fn acceptance_5_bounded_equals_full() {
    let opts = DecideOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC5);
    let mut cases = 0;
    while cases < 20 {
        let spec = random_spec(&mut rng, 2, 1, 0.4, 0.4);
        let x = vs(&[(rng.gen_range(0..2), 3000)]);
        let y = vs(&[(rng.gen_range(0..2), 3000 + rng.gen_range(1..=3))]);
        let auto = decide_bounded_with(&spec, &x, &y, Lookback::Auto, &opts).unwrap();
        let full = decide_bounded_with(&spec, &x, &y, Lookback::Full, &opts).unwrap();
        assert_eq!(
            auto.decision, full.decision,
            "bounded/full disagreement: spec {spec:?}, x={x:?}, y={y:?}"
        );
        cases += 1;
    }
    println!("criterion 5 (proved lookback = full history on {cases} deep queries): pass");
}

/// Criterion 6: the shift scan is exactly the per-shift loop, and the
/// lower-bound family fails first at shift w - 2.
#[test]
fn acceptance_6_shift_scan_consistency() {
    let opts = DecideOptions::default();
    let mut rng = ChaCha8Rng::seed_from_u64(0xC6);
    let mut cases = 0;
    while cases < 12 {
        let w = rng.gen_range(1..=3u32);
        let l = rng.gen_range(1..=2u32);
        let spec = random_spec(&mut rng, w, l, 0.35, 0.35);
        let t = rng.gen_range(0..=3u32);
        let xr = rng.gen_range(0..w);
        let yr = rng.gen_range(0..w);
        let (x, y) = (vs(&[(xr, t)]), vs(&[(yr, t)]));
        if !x.is_disjoint(&y) {
            continue;
        }
        let scan =
            pcid::bounded::decide_all_shifts_with(&spec, &x, &y, Some(50), &opts).unwrap();
        let mut first_failure = None;
        for delta in 0..50u64 {
            let shifted = shift_set(&y, delta as i64).unwrap();
            let r = decide_bounded_with(&spec, &x, &shifted, Lookback::Auto, &opts)
                .unwrap();
            if r.decision == Decision::Unidentifiable {
                first_failure = Some(delta);
                break;
            }
        }
        match (&scan, first_failure) {
            (pcid::bounded::ShiftDecision::AllIdentifiable, None) => {}
            (
                pcid::bounded::ShiftDecision::UnidentifiableAt { delta, .. },
                Some(expected),
            ) => assert_eq!(*delta, expected),
            other => panic!("scan/loop mismatch: {other:?} for spec {spec:?}"),
        }
        cases += 1;
    }

    let g7 = families::generate(&FamilyRequest::Gw { w: 7 }).unwrap();
    let scan =
        pcid::bounded::decide_all_shifts_with(&g7, &vs(&[(0, 0)]), &vs(&[(6, 0)]), Some(7), &opts)
            .unwrap();
    match scan {
        pcid::bounded::ShiftDecision::UnidentifiableAt { delta, .. } => {
            assert_eq!(delta, 5)
        }
        other => panic!("expected failure at shift 5, got {other:?}"),
    }
    println!("criterion 6 (shift scan = per-shift loop, {cases} specs + G_7): pass");
}

/// Criterion 7: exact constants and the aggregation bijection.
#[test]
fn acceptance_7_constants_and_reduction() {
    use num_bigint::BigUint;
    let c = |w, l| {
        PeriodicSpec::new(w, l, [], [])
            .unwrap()
            .lookback_constant()
    };
    assert_eq!(c(1, 1), BigUint::from(32u32));
    assert_eq!(c(2, 1), BigUint::from(2916u32));
    assert_eq!(c(3, 1), BigUint::from(524288u32));

    let mut rng = ChaCha8Rng::seed_from_u64(0xC7);
    for _ in 0..40 {
        let w = rng.gen_range(1..=3u32);
        let l = rng.gen_range(2..=3u32);
        let spec = random_spec(&mut rng, w, l, 0.4, 0.4);
        let red = spec.reduce_latency();
        let blocks = 12 / l;
        let orig = spec.unroll((0, blocks * l - 1)).unwrap();
        let agg = red.reduced().unroll((0, blocks - 1)).unwrap();
        assert_eq!(orig.vertex_count(), agg.vertex_count());
        for &v in orig.vertices() {
            assert_eq!(red.to_original(red.to_reduced(v)), v);
            assert!(agg.contains(&red.to_reduced(v)));
        }
        let mapped_dir: std::collections::BTreeSet<_> = orig
            .directed_edges()
            .iter()
            .map(|&(u, v)| (red.to_reduced(u), red.to_reduced(v)))
            .collect();
        assert_eq!(&mapped_dir, agg.directed_edges());
        let mapped_bi: std::collections::BTreeSet<_> = orig
            .bidirected_edges()
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (red.to_reduced(u), red.to_reduced(v));
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        assert_eq!(&mapped_bi, agg.bidirected_edges());
    }
    println!("criterion 7 (exact constants, aggregation bijection): pass");
}
