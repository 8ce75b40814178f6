use lipwidth_core::carl::{check_carl_consistency, width_lower_from_carl};
use lipwidth_core::entropy::{covering_number, entropy_profile};
use lipwidth_core::lipbounds::{deep_bound_for, empirical_lipschitz};
use lipwidth_core::spaces::{tensor_nodes, uniform_nodes};
use lipwidth_core::takagi::{build_takagi_network, psi};
use lipwidth_core::widths::{polyline_family, width_upper};
use lipwidth_core::{
    Activation, ActivationSpec, CoverMode, FeedForwardNet, Layout, Norm, PointCloudSet, SolveMode, SolverConfig,
    TakagiSpec, WidthRecord,
};
use proptest::prelude::*;

fn activation() -> impl Strategy<Value = Activation> {
    prop_oneof![Just(Activation::Relu), (1.0f64..3.0).prop_map(|l| Activation::sigmoidal(l).unwrap())]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn flatten_round_trip(d in 1usize..4, w in 1usize..5, n in 1usize..5, seed in any::<u64>(), act in activation()) {
        let layout = Layout::new(d, w, n).unwrap();
        let count = layout.param_count();
        let values: Vec<f64> = (0..count).map(|i| ((seed.wrapping_add(i as u64 * 7919) % 2001) as f64 / 1000.0) - 1.0).collect();
        let spec = ActivationSpec::Uniform(act);
        let net = FeedForwardNet::from_params(layout, values.clone(), 1.0, &spec).unwrap();
        let flat = net.flatten();
        prop_assert_eq!(flat.values(), &values[..]);
        let back = FeedForwardNet::unflatten(&flat, &spec).unwrap();
        prop_assert_eq!(back, net);
    }

    #[test]
    fn lp_triangle_inequality(p in 1.0f64..6.0, xs in prop::collection::vec(-5.0f64..5.0, 9)) {
        let nrm = Norm::lp(p, 3).unwrap();
        let (x, y, z) = (&xs[0..3], &xs[3..6], &xs[6..9]);
        prop_assert!(nrm.dist(x, z) <= nrm.dist(x, y) + nrm.dist(y, z) + 1e-12);
        let inf = Norm::linf(3).unwrap();
        prop_assert!(inf.dist(x, z) <= inf.dist(x, y) + inf.dist(y, z) + 1e-12);
    }

    #[test]
    fn covering_number_monotone(pts in prop::collection::vec(prop::collection::vec(0.0f64..1.0, 2), 1..12), a in 0.01f64..0.6, b in 0.01f64..0.6) {
        let k = PointCloudSet::new(pts, Norm::linf(2).unwrap(), "p").unwrap();
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let small = covering_number(&k, lo, CoverMode::Exact).unwrap();
        let large = covering_number(&k, hi, CoverMode::Exact).unwrap();
        prop_assert!(large <= small);
        prop_assert!(small <= k.len());
    }

    #[test]
    fn takagi_network_matches_sum(cs in prop::collection::vec(-1.0f64..1.0, 1..8)) {
        let spec = TakagiSpec::from_coefficients(cs).unwrap();
        let t = build_takagi_network(&spec).unwrap();
        for x in uniform_nodes(513) {
            prop_assert!((t.net.evaluate(&[x]).unwrap() - psi(&spec, x)).abs() < 1e-12);
        }
    }
}

#[test]
fn empirical_lipschitz_below_certificate() {
    let grid = tensor_nodes(&[uniform_nodes(9), uniform_nodes(9)]);
    for act in [Activation::Relu, Activation::sigmoidal(1.0).unwrap()] {
        for (width, depth) in [(2, 1), (3, 2), (2, 3)] {
            let layout = Layout::new(2, width, depth).unwrap();
            let cert = deep_bound_for(2, width, act, 1.0, depth).unwrap();
            let emp = empirical_lipschitz(layout, &ActivationSpec::Uniform(act), 1.0, 400, &grid, 11).unwrap();
            assert!(emp > 0.0 && emp <= cert.value, "{act:?} W={width} n={depth}: {emp} > {}", cert.value);
        }
    }
}

fn desk_cloud() -> (Vec<Vec<f64>>, PointCloudSet) {
    let verts: Vec<Vec<f64>> = (0..9).map(|i| vec![i as f64 / 8.0, ((i * 5) % 9) as f64 / 8.0]).collect();
    let k = PointCloudSet::new(verts.clone(), Norm::linf(2).unwrap(), "desk").unwrap();
    (verts, k)
}

#[test]
fn polyline_widths_respect_entropy() {
    let (verts, k) = desk_cloud();
    let prof = entropy_profile(&k, 3, SolveMode::Exact, &SolverConfig::default()).unwrap();
    let par = polyline_family(verts, Norm::linf(2).unwrap()).unwrap();
    let mut records = Vec::new();
    for delta in [0.5, 0.1, 0.02] {
        let est = width_upper(&k, &par, delta).unwrap();
        assert!(est.raw <= 1e-12 + est.upper);
        records.push(WidthRecord { m: 1, gamma: est.gamma, upper: est.upper });
    }
    let report = check_carl_consistency(&prof, &records);
    assert!(report.is_clean(), "{report:?}");
    assert!(report.checked > 0);
    for r in &records {
        assert!(width_lower_from_carl(&prof, r.m, r.gamma) <= r.upper);
    }
}

#[test]
fn inflated_width_flags_inconsistency() {
    let (_, k) = desk_cloud();
    let prof = entropy_profile(&k, 3, SolveMode::Exact, &SolverConfig::default()).unwrap();
    let fake = [WidthRecord { m: 1, gamma: 2e-7, upper: 1e-7 }];
    assert!(!check_carl_consistency(&prof, &fake).is_clean());
}
