//! The ten acceptance computations, each returning a pass/fail outcome.

use crate::corpus;
use lipwidth_core::carl::{check_carl_consistency, entropy_upper_from_nn_error, nn_lower_rate_deep, nn_lower_rate_shallow};
use lipwidth_core::entropy::{covering_number, cover_from_lipschitz, entropy_number, entropy_profile};
use lipwidth_core::lipbounds::{deep_bound_for, empirical_lipschitz, phi_gamma_of};
use lipwidth_core::spaces::{interval_grid, sigma_set, tensor_nodes, uniform_nodes};
use lipwidth_core::takagi::{build_takagi_network, psi};
use lipwidth_core::widths::{takagi_family, width_upper};
use lipwidth_core::{
    Activation, ActivationSpec, BoundFamily, CoverMode, EntropyProfile, Layout, LipschitzParametrization, NetRegime,
    Norm, PointCloudSet, RateFunction, RateKind, SolveMode, SolverConfig, TakagiSpec, WidthRecord,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::time::{Duration, Instant};

/// Faults injected into the computations to check that the suite notices.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Faults {
    /// Perturb every Takagi coefficient by 5% before it reaches a sum or a network.
    pub corrupt_takagi: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Outcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

pub struct Criterion {
    pub id: u8,
    pub name: &'static str,
    pub limit: Duration,
    /// Part of the `--quick` subset.
    pub quick: bool,
    pub run: fn(&Faults) -> (bool, String),
}

impl Criterion {
    pub fn evaluate(&self, faults: &Faults) -> (Outcome, Duration) {
        let start = Instant::now();
        let (passed, detail) = (self.run)(faults);
        (Outcome { id: self.id, name: self.name, passed, detail }, start.elapsed())
    }
}

const fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

pub const CRITERIA: [Criterion; 10] = [
    Criterion { id: 1, name: "takagi identity", limit: secs(1), quick: true, run: takagi_identity },
    Criterion { id: 2, name: "network equals sum", limit: secs(5), quick: true, run: network_equals_sum },
    Criterion { id: 3, name: "lipschitz sandwich", limit: secs(60), quick: true, run: lipschitz_sandwich },
    Criterion { id: 4, name: "dyadic entropy", limit: secs(30), quick: false, run: dyadic_entropy },
    Criterion { id: 5, name: "sigma rate", limit: secs(60), quick: true, run: sigma_rate },
    Criterion { id: 6, name: "constructive cover", limit: secs(30), quick: true, run: constructive_cover },
    Criterion { id: 7, name: "carl consistency", limit: secs(60), quick: false, run: carl_consistency },
    Criterion { id: 8, name: "table reproduction", limit: secs(1), quick: true, run: table_reproduction },
    Criterion { id: 9, name: "rate round-trips", limit: secs(1), quick: true, run: rate_roundtrips },
    Criterion { id: 10, name: "oracle equivalence", limit: secs(120), quick: true, run: oracle_equivalence },
];

pub fn criterion(id: u8) -> &'static Criterion {
    CRITERIA.iter().find(|c| c.id == id).expect("criterion ids are 1..=10")
}

fn lambda_spec(lambda: f64, n: usize, faults: &Faults) -> TakagiSpec {
    let spec = TakagiSpec::from_lambda(lambda, n).expect("|lambda| > 1");
    if faults.corrupt_takagi {
        TakagiSpec::from_coefficients(spec.coefficients().iter().map(|c| c * 1.05).collect()).expect("finite")
    } else {
        spec
    }
}

fn takagi_identity(faults: &Faults) -> (bool, String) {
    let nodes = uniform_nodes(4097);
    let mut worst = (0, 0.0f64);
    let mut fails = Vec::new();
    for n in 1..=25 {
        let spec = lambda_spec(4.0, n, faults);
        let err = nodes.iter().map(|&t| (psi(&spec, t) - t * (1.0 - t)).abs()).fold(0.0, f64::max);
        let bound = 4f64.powi(-(n as i32)) / 3.0;
        if err / bound > worst.1 {
            worst = (n, err / bound);
        }
        if err > bound {
            fails.push(n);
        }
    }
    (fails.is_empty(), format!("max error/bound {:.3e} at n={}; failing n: {fails:?}", worst.1, worst.0))
}

fn network_equals_sum(faults: &Faults) -> (bool, String) {
    let nodes = uniform_nodes(4097);
    let mut worst = 0.0f64;
    let mut bounds = Vec::new();
    for lambda in [2.0, 4.0] {
        for n in 1..=20 {
            let clean = TakagiSpec::from_lambda(lambda, n).expect("|lambda| > 1");
            let net = match build_takagi_network(&lambda_spec(lambda, n, faults)) {
                Ok(t) => t,
                Err(e) => return (false, format!("lambda={lambda} n={n}: {e}")),
            };
            bounds.push(net.param_bound);
            for &t in &nodes {
                match net.net.evaluate(&[t]) {
                    Ok(v) => worst = worst.max((v - psi(&clean, t)).abs()),
                    Err(e) => return (false, format!("lambda={lambda} n={n}: {e}")),
                }
            }
        }
    }
    let constant = bounds.iter().all(|b| *b == bounds[0]);
    (worst <= 1e-10 && constant, format!("sup error {worst:.3e}; parameter bound constant in n: {constant} (w = {})", bounds[0]))
}

fn lipschitz_sandwich(_: &Faults) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut violations = Vec::new();
    let mut tightest = 0.0f64;
    for i in 0..50 {
        let width = rng.gen_range(2..=4);
        let depth = rng.gen_range(1..=5);
        let w = if rng.gen_bool(0.5) { 1.0 } else { 2.0 };
        let d = rng.gen_range(1..=2);
        let act = if i % 2 == 0 { Activation::Relu } else { Activation::sigmoidal(1.0).expect("tanh is 1-Lipschitz") };
        let grid = if d == 1 {
            uniform_nodes(33).into_iter().map(|t| vec![t]).collect()
        } else {
            tensor_nodes(&[uniform_nodes(9), uniform_nodes(9)])
        };
        let layout = Layout::new(d, width, depth).expect("positive layout");
        let cert = deep_bound_for(d, width, act, w, depth);
        let emp = empirical_lipschitz(layout, &ActivationSpec::Uniform(act), w, 200, &grid, 1000 + i as u64);
        let ok = match (&cert, &emp) {
            (Ok(c), Ok(e)) => {
                tightest = tightest.max(e / c.value);
                *e <= c.value && c.closed_form.is_some_and(|f| c.value <= f)
            }
            _ => false,
        };
        if !ok {
            violations.push(format!("{i}: d={d} W={width} n={depth} w={w} {act:?}"));
        }
    }
    (violations.is_empty(), format!("violations: {violations:?}; max empirical/certificate {tightest:.3}"))
}

fn dyadic_entropy(_: &Faults) -> (bool, String) {
    let set = interval_grid(4097).expect("grid");
    let mut bad = Vec::new();
    let mut widest = 0.0f64;
    for n in 0..=6u32 {
        let target = 2f64.powi(-(n as i32 + 1));
        match entropy_number(&set, n, 1e-6) {
            Ok(b) => {
                widest = widest.max(b.width());
                if !(b.lower <= target && target <= b.upper && b.width() <= 1e-4) {
                    bad.push(format!("n={n}: [{}, {}]", b.lower, b.upper));
                }
            }
            Err(e) => bad.push(format!("n={n}: {e}")),
        }
    }
    (bad.is_empty(), format!("widest bracket {widest:.3e}; failures: {bad:?}"))
}

fn sigma_rate(_: &Faults) -> (bool, String) {
    let mut c1 = f64::INFINITY;
    let mut c2 = 0.0f64;
    let mut rows = Vec::new();
    for j in [20, 40] {
        let set = sigma_set(j).expect("sigma set");
        for n in 1..=5u32 {
            match entropy_number(&set, n, 1e-6) {
                Ok(b) => {
                    c1 = c1.min(b.lower * n as f64);
                    c2 = c2.max(b.upper * n as f64);
                    if b.lower == 0.0 {
                        rows.push(format!("J={j} n={n}: eps=0 since 2^n >= |K| = {}", set.len()));
                    }
                }
                Err(e) => return (false, format!("J={j} n={n}: {e}")),
            }
        }
    }
    let passed = c1 > 0.0 && c2 / c1 <= 8.0;
    (passed, format!("c1={c1:.4}, c2={c2:.4}, c2/c1={:.3}; {rows:?}", c2 / c1))
}

fn constructive_cover(_: &Faults) -> (bool, String) {
    let par = match takagi_family(3, &uniform_nodes(4097)) {
        Ok(p) => p,
        Err(e) => return (false, e.to_string()),
    };
    let gamma = par.constant();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut samples: Vec<Vec<f64>> = (0..256).map(|_| (0..3).map(|_| rng.gen_range(-1.0..=1.0)).collect()).collect();
    for corner in 0..8 {
        samples.push((0..3).map(|k| if corner >> k & 1 == 1 { 1.0 } else { -1.0 }).collect());
    }
    let mut notes = Vec::new();
    let mut passed = true;
    for eps in [0.5, 0.25] {
        let limit = (2.0 * (gamma / eps).ceil() + 1.0).powi(3) as usize;
        match cover_from_lipschitz(&**par.map(), gamma, 3, eps, par.norm(), &samples) {
            Ok(c) => {
                passed &= c.verified && c.len() <= limit;
                notes.push(format!("eps={eps}: {} centers (limit {limit}), verified {}", c.len(), c.verified));
            }
            Err(e) => {
                passed = false;
                notes.push(format!("eps={eps}: {e}"));
            }
        }
    }
    (passed, format!("gamma={gamma}; {}", notes.join("; ")))
}

/// One corpus entry: the set, its entropy profile and width records.
pub struct CorpusEntry {
    pub label: String,
    pub profile: EntropyProfile,
    pub widths: Vec<WidthRecord>,
}

fn width_records(set: &PointCloudSet, pars: &[LipschitzParametrization], deltas: &[f64]) -> lipwidth_core::Result<Vec<WidthRecord>> {
    let mut out = Vec::new();
    for p in pars {
        for &d in deltas {
            let e = width_upper(set, p, d)?;
            out.push(WidthRecord { m: e.n, gamma: e.gamma, upper: e.upper });
        }
    }
    Ok(out)
}

/// Dyadic interval, sigma sets and the Takagi corpus with their width families.
pub fn consistency_corpus() -> anyhow::Result<Vec<CorpusEntry>> {
    let cfg = SolverConfig::default();
    let mut out = Vec::new();
    let interval = interval_grid(257)?;
    out.push(CorpusEntry {
        label: interval.label().to_string(),
        profile: entropy_profile(&interval, 8, SolveMode::Auto, &cfg)?,
        widths: width_records(
            &interval,
            &[corpus::interval_family()?, corpus::interval_family_2d()?],
            &[0.25, 0.05, 0.01],
        )?,
    });
    for j in [20, 40] {
        let set = sigma_set(j)?;
        let pars = (1..=3).map(|m| corpus::sigma_family(j, m)).collect::<anyhow::Result<Vec<_>>>()?;
        out.push(CorpusEntry {
            label: set.label().to_string(),
            profile: entropy_profile(&set, 6, SolveMode::Auto, &cfg)?,
            widths: width_records(&set, &pars, &[0.25, 0.1, 0.05])?,
        });
    }
    let taka = corpus::takagi_corpus(257)?;
    let pars = (1..=3).map(|m| corpus::takagi_family_for(&taka, m)).collect::<anyhow::Result<Vec<_>>>()?;
    out.push(CorpusEntry {
        label: taka.label().to_string(),
        profile: entropy_profile(&taka, 5, SolveMode::Auto, &cfg)?,
        widths: width_records(&taka, &pars, &[0.5, 0.2, 0.1])?,
    });
    Ok(out)
}

fn carl_consistency(_: &Faults) -> (bool, String) {
    let entries = match consistency_corpus() {
        Ok(e) => e,
        Err(e) => return (false, e.to_string()),
    };
    let mut passed = true;
    let mut notes = Vec::new();
    for e in &entries {
        let r = check_carl_consistency(&e.profile, &e.widths);
        passed &= r.is_clean() && !r.partial;
        notes.push(format!("{}: checked {}, violations {}", e.label, r.checked, r.violations.len()));
    }
    (passed, notes.join("; "))
}

#[derive(Deserialize)]
struct GrowthTables {
    error_rate: RateKind,
    rows: Vec<TableRow>,
}

#[derive(Deserialize)]
struct TableRow {
    regime: NetRegime,
    wfam: BoundFamily,
    phi: PowerExponents,
    nn_lower: PolyExponents,
}

#[derive(Deserialize)]
struct PowerExponents {
    p: [i64; 2],
    q: [i64; 2],
}

#[derive(Deserialize)]
struct PolyExponents {
    alpha: [i64; 2],
    beta: [i64; 2],
}

fn frac(f: [i64; 2]) -> f64 {
    f[0] as f64 / f[1] as f64
}

const GROWTH_TABLES: &str = include_str!("../data/growth_tables.json");
const RATE_ROUNDTRIPS: &str = include_str!("../data/rate_roundtrips.json");

fn table_reproduction(_: &Faults) -> (bool, String) {
    let tables: GrowthTables = serde_json::from_str(GROWTH_TABLES).expect("bundled table data parses");
    let err = RateFunction { kind: tables.error_rate, scale: 1.0, up_to_constants: false };
    let mut bad = Vec::new();
    for (i, row) in tables.rows.iter().enumerate() {
        let check = || -> lipwidth_core::Result<bool> {
            let lead = phi_gamma_of(&row.wfam, 2, row.regime, 1.0)?.asymptotic;
            let Some((c, p, q)) = lead.as_power() else { return Ok(false) };
            let symbolic = p == frac(row.phi.p) && q == frac(row.phi.q);
            // φ(n) / (c n^p log₂^q n) must approach 1
            let rel = |n: f64| -> lipwidth_core::Result<f64> {
                let pg = phi_gamma_of(&row.wfam, n as u64, row.regime, 1.0)?;
                Ok((pg.phi / lead.eval(n) - 1.0).abs())
            };
            let (r10, r20) = (rel(1024.0)?, rel(1048576.0)?);
            let numeric = r20 <= 0.1 && r20 <= r10 && c > 0.0;
            let g = phi_gamma_of(&row.wfam, 3, row.regime, 1.0)?;
            let gamma_ok = g.gamma == g.phi.exp2();
            let nn = match row.regime {
                NetRegime::Deep => nn_lower_rate_deep(&err, &row.wfam)?,
                NetRegime::Shallow => nn_lower_rate_shallow(&err, &row.wfam)?,
            };
            let nn_ok = nn.polylog_exponents() == Some((frac(row.nn_lower.alpha), frac(row.nn_lower.beta)));
            Ok(symbolic && numeric && gamma_ok && nn_ok)
        };
        if !matches!(check(), Ok(true)) {
            bad.push(i);
        }
    }
    (bad.is_empty(), format!("{} rows, mismatched rows: {bad:?}", tables.rows.len()))
}

#[derive(Deserialize)]
struct RoundTrip {
    regime: NetRegime,
    wfam: BoundFamily,
    error: RateKind,
    entropy: ExpectedRate,
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ExpectedRate {
    PolyLog { alpha: [i64; 2], beta: [i64; 2] },
    Expo { a: [i64; 2], log_power: [i64; 2] },
}

fn rate_roundtrips(_: &Faults) -> (bool, String) {
    let rows: Vec<RoundTrip> = serde_json::from_str(RATE_ROUNDTRIPS).expect("bundled round-trip data parses");
    let mut bad = Vec::new();
    for (i, row) in rows.iter().enumerate() {
        let err = RateFunction { kind: row.error, scale: 1.0, up_to_constants: false };
        let ok = match (entropy_upper_from_nn_error(&err, &row.wfam, row.regime).map(|r| r.kind), &row.entropy) {
            (Ok(RateKind::PolyLog { alpha, beta }), ExpectedRate::PolyLog { alpha: ea, beta: eb }) => {
                alpha == frac(*ea) && beta == frac(*eb)
            }
            (Ok(RateKind::Expo { a, log_power, .. }), ExpectedRate::Expo { a: ea, log_power: el }) => {
                a == frac(*ea) && log_power == frac(*el)
            }
            _ => false,
        };
        if !ok {
            bad.push(i);
        }
    }
    (rows.len() == 8 && bad.is_empty(), format!("{} combinations, mismatched: {bad:?}", rows.len()))
}

/// Minimum cover size by dynamic programming over subsets.
pub fn exhaustive_cover(points: &[Vec<f64>], norm: &Norm, eps: f64) -> usize {
    let n = points.len();
    let full = (1usize << n) - 1;
    let mut centers: Vec<Vec<f64>> = points.to_vec();
    if !norm.is_max_norm() {
        for i in 0..n {
            for j in i + 1..n {
                centers.push(points[i].iter().zip(&points[j]).map(|(a, b)| 0.5 * (a + b)).collect());
            }
        }
    }
    let coverable: Vec<bool> = (0..=full)
        .map(|mask| {
            let members: Vec<&Vec<f64>> = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| &points[j]).collect();
            if members.is_empty() {
                return true;
            }
            if norm.is_max_norm() {
                (0..members[0].len()).all(|k| {
                    let lo = members.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
                    let hi = members.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
                    hi - lo <= 2.0 * eps
                })
            } else {
                centers.iter().any(|c| members.iter().all(|p| norm.dist(c, p) <= eps))
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

fn oracle_equivalence(_: &Faults) -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut mismatches = Vec::new();
    let mut checks = 0;
    for cloud in 0..200 {
        let n = rng.gen_range(1..=10);
        let dim = rng.gen_range(1..=3);
        let norm = match cloud % 3 {
            0 => Norm::linf(dim),
            1 => Norm::lp(2.0, dim),
            _ => Norm::lp(1.0, dim),
        }
        .expect("valid norm");
        let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..dim).map(|_| rng.gen_range(0..9) as f64 / 8.0).collect()).collect();
        let set = PointCloudSet::new(pts, norm, "random").expect("nonempty cloud");
        let mut radii: Vec<f64> = (0..3).map(|_| rng.gen_range(0.01..0.8)).collect();
        let (i, j) = (rng.gen_range(0..set.len()), rng.gen_range(0..set.len()));
        if i != j {
            radii.push(0.5 * set.dist(i, j));
        }
        for eps in radii {
            checks += 1;
            let got = covering_number(&set, eps, CoverMode::Exact);
            let want = exhaustive_cover(set.points(), set.norm(), eps);
            if got.as_ref().ok() != Some(&want) {
                mismatches.push(format!("cloud {cloud} eps={eps}: {got:?} vs {want}"));
            }
        }
    }
    (mismatches.is_empty(), format!("{checks} comparisons, mismatches: {mismatches:?}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exhaustive_cover_small_cases() {
        let line = |v: &[f64]| v.iter().map(|&x| vec![x]).collect::<Vec<_>>();
        let n = Norm::linf(1).unwrap();
        assert_eq!(exhaustive_cover(&line(&[0.0, 1.0]), &n, 0.5), 1);
        assert_eq!(exhaustive_cover(&line(&[0.0, 1.0]), &n, 0.49), 2);
        assert_eq!(exhaustive_cover(&line(&[0.0, 0.25, 0.5, 0.75, 1.0]), &n, 0.25), 2);
        let l2 = Norm::lp(2.0, 2).unwrap();
        let tri = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]];
        assert_eq!(exhaustive_cover(&tri, &l2, 0.5), 2);
        assert_eq!(exhaustive_cover(&tri, &l2, 1.0), 1);
    }

    #[test]
    fn corrupted_takagi_fails_takagi_criteria_only() {
        let f = Faults { corrupt_takagi: true };
        assert!(!(criterion(1).run)(&f).0);
        assert!(!(criterion(2).run)(&f).0);
        assert!((criterion(8).run)(&f).0);
        assert!((criterion(6).run)(&f).0);
    }
}
