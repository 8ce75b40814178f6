use lipwidth_core::entropy::{covering_number, entropy_profile};
use lipwidth_core::{CoverMode, Norm, PointCloudSet, SolveMode, SolverConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Minimum number of coverable groups, by dynamic programming over subsets.
fn oracle_cover(points: &[Vec<f64>], norm: &Norm, eps: f64) -> usize {
    let n = points.len();
    let full = (1usize << n) - 1;
    let covered_by = |c: &[f64], mask: usize| (0..n).filter(|j| mask >> j & 1 == 1).all(|j| norm.dist(c, &points[j]) <= eps);
    let coverable: Vec<bool> = (0..=full)
        .map(|mask| {
            if mask == 0 {
                return true;
            }
            if norm.is_max_norm() {
                let dim = points[0].len();
                (0..dim).all(|k| {
                    let vals = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| points[j][k]);
                    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)));
                    hi - lo <= 2.0 * eps
                })
            } else {
                let mut cands: Vec<Vec<f64>> = points.to_vec();
                for i in 0..n {
                    for j in i + 1..n {
                        cands.push(points[i].iter().zip(&points[j]).map(|(a, b)| 0.5 * (a + b)).collect());
                    }
                }
                cands.iter().any(|c| covered_by(c, mask))
            }
        })
        .collect();
    let mut best = vec![usize::MAX; full + 1];
    best[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub > 0 {
            if sub & low != 0 && coverable[sub] && best[mask ^ sub] != usize::MAX {
                best[mask] = best[mask].min(best[mask ^ sub] + 1);
            }
            sub = (sub - 1) & mask;
        }
    }
    best[full]
}

fn random_cloud(rng: &mut ChaCha8Rng, norm_kind: usize) -> PointCloudSet {
    let n = rng.gen_range(1..=10);
    let dim = rng.gen_range(1..=3);
    let norm = match norm_kind {
        0 => Norm::linf(dim).unwrap(),
        1 => Norm::lp(2.0, dim).unwrap(),
        _ => Norm::lp(1.0, dim).unwrap(),
    };
    // coarse lattice coordinates make ties and exact threshold hits common
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0..9) as f64 / 8.0).collect()).collect();
    PointCloudSet::new(pts, norm, "random").unwrap()
}

#[test]
fn exact_covering_equals_subset_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut clouds = 0;
    while clouds < 200 {
        let k = random_cloud(&mut rng, clouds % 3);
        clouds += 1;
        let mut radii: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..0.8)).collect();
        if k.len() > 1 {
            let (i, j) = (rng.gen_range(0..k.len()), rng.gen_range(0..k.len()));
            if i != j {
                radii.push(0.5 * k.dist(i, j));
            }
        }
        for eps in radii {
            let got = covering_number(&k, eps, CoverMode::Exact).unwrap();
            assert_eq!(got, oracle_cover(k.points(), k.norm(), eps), "{k:?} eps={eps}");
        }
    }
}

#[test]
fn exact_entropy_equals_oracle_threshold() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for _ in 0..60 {
        let k = random_cloud(&mut rng, 0);
        let prof = entropy_profile(&k, 4, SolveMode::Exact, &SolverConfig::default()).unwrap();
        let mut halves: Vec<f64> = (0..k.len()).flat_map(|i| (i + 1..k.len()).map(move |j| (i, j))).map(|(i, j)| 0.5 * k.dist(i, j)).collect();
        halves.sort_by(f64::total_cmp);
        for e in prof.entries() {
            let cap = 1usize << e.n;
            let truth = if k.len() <= cap {
                0.0
            } else {
                *halves.iter().find(|&&t| oracle_cover(k.points(), k.norm(), t) <= cap).unwrap()
            };
            assert_eq!((e.lower, e.upper), (truth, truth), "{k:?}");
        }
    }
}

#[test]
fn greedy_never_beats_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for c in 0..100 {
        let k = random_cloud(&mut rng, c % 3);
        for eps in [0.05, 0.2, 0.4] {
            let exact = covering_number(&k, eps, CoverMode::Exact).unwrap();
            let greedy = covering_number(&k, eps, CoverMode::Greedy).unwrap();
            assert!(greedy >= exact);
        }
    }
}
