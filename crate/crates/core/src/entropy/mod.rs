//! Covering numbers, entropy numbers `ε_n(𝒦)` and covers built through a
//! Lipschitz parametrization.
//!
//! Under a max norm (`ℓ∞` or a sup over grid nodes) a finite set fits in one
//! ball of radius `ε` iff its coordinatewise range is at most `2ε`, which
//! happens iff all pairwise distances are at most `2ε`. Exact covering
//! numbers are then minimum clique covers of the threshold graph, and
//! `ε_n` is half of some pairwise distance. Under other `ℓp` norms centers
//! are restricted to the points and their pairwise midpoints, and the clique
//! cover number still gives a lower bound.

mod setcover;

pub use setcover::{exact_cover, greedy_cover, maximal_cliques, BitSet};

use crate::error::{input, Error, Result};
use crate::spaces::{Norm, PointCloudSet};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub const DEFAULT_EXACT_CAP: usize = 22;
pub const DEFAULT_GREEDY_CAP: usize = 5000;
pub const DEFAULT_TOL: f64 = 1e-6;
/// Relative slack allowed when re-checking a cover in floating point.
pub const VERIFY_SLACK: f64 = 1e-12;
/// Largest lattice built by [`cover_from_lipschitz`].
pub const MAX_LATTICE: usize = 2_000_000;
/// Midpoints are added to the greedy candidate set for `ℓp` up to this size.
const GREEDY_MIDPOINT_CAP: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoverMode {
    Exact,
    Greedy,
}

/// Solver choice for entropy numbers; `Auto` is exact up to the cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Auto,
    Exact,
    Greedy,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub exact_cap: usize,
    pub greedy_cap: usize,
    pub tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { exact_cap: DEFAULT_EXACT_CAP, greedy_cap: DEFAULT_GREEDY_CAP, tol: DEFAULT_TOL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cover {
    pub centers: Vec<Vec<f64>>,
    pub radius: f64,
    pub verified: bool,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }
}

/// Independent re-check that every point lies within the radius of a center.
pub fn verify_cover(centers: &[Vec<f64>], radius: f64, points: &[Vec<f64>], norm: &Norm) -> bool {
    let limit = radius * (1.0 + VERIFY_SLACK) + f64::MIN_POSITIVE;
    crate::parallel::install(|| points.par_iter().all(|p| centers.iter().any(|c| norm.dist(c, p) <= limit)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Exact,
    GreedyUpper,
    PackingLower,
    Trivial,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Exact => "exact",
            Method::GreedyUpper => "greedy-upper",
            Method::PackingLower => "packing-lower",
            Method::Trivial => "trivial",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "exact" => Some(Method::Exact),
            "greedy-upper" => Some(Method::GreedyUpper),
            "packing-lower" => Some(Method::PackingLower),
            "trivial" => Some(Method::Trivial),
            _ => None,
        }
    }
}

/// `lower ≤ ε_n ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyBracket {
    pub n: u32,
    pub lower: f64,
    pub upper: f64,
    pub lower_method: Method,
    pub upper_method: Method,
}

impl EntropyBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn method_tag(&self) -> String {
        if self.lower_method == self.upper_method {
            self.lower_method.as_str().to_string()
        } else {
            format!("{}/{}", self.lower_method.as_str(), self.upper_method.as_str())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyProfile {
    entries: Vec<EntropyBracket>,
    /// `|𝒦|`, when known: `ε_n = 0` once `2^n ≥ |𝒦|`.
    cardinality: Option<usize>,
}

impl EntropyProfile {
    /// Entries must be indexed `0, 1, …` in order.
    pub fn new(entries: Vec<EntropyBracket>, cardinality: Option<usize>) -> Result<Self> {
        for (i, e) in entries.iter().enumerate() {
            if e.n as usize != i {
                return input(format!("profile entry {i} has index {}", e.n));
            }
            if !(e.lower <= e.upper) || e.lower < 0.0 {
                return input(format!("profile entry {i} has lower {} > upper {}", e.lower, e.upper));
            }
        }
        Ok(EntropyProfile { entries, cardinality })
    }

    pub fn entries(&self) -> &[EntropyBracket] {
        &self.entries
    }

    pub fn cardinality(&self) -> Option<usize> {
        self.cardinality
    }

    pub fn lower_at(&self, k: u64) -> Option<f64> {
        if let Some(e) = self.entries.get(k as usize) {
            return Some(e.lower);
        }
        match self.cardinality {
            Some(c) if k >= 63 || (1u64 << k) >= c as u64 => Some(0.0),
            _ => None,
        }
    }

    pub fn upper_at(&self, k: u64) -> Option<f64> {
        if let Some(e) = self.entries.get(k as usize) {
            return Some(e.upper);
        }
        match (self.cardinality, self.entries.last()) {
            (Some(c), _) if k >= 63 || (1u64 << k) >= c as u64 => Some(0.0),
            (_, Some(last)) => Some(last.upper),
            _ => None,
        }
    }
}

/// Pairwise geometry cached across the many covering-number calls of an
/// entropy computation.
struct Geometry<'a> {
    set: &'a PointCloudSet,
    max_norm: bool,
    /// Row `i`: all indices sorted by distance from `i`, ties by index.
    order: Option<Vec<Vec<u32>>>,
}

impl<'a> Geometry<'a> {
    fn new(set: &'a PointCloudSet, with_order: bool) -> Self {
        let n = set.len();
        let order = with_order.then(|| {
            crate::parallel::install(|| {
                (0..n)
                    .into_par_iter()
                    .map(|i| {
                        let d: Vec<f64> = (0..n).map(|j| set.dist(i, j)).collect();
                        let mut idx: Vec<u32> = (0..n as u32).collect();
                        idx.sort_by(|&a, &b| d[a as usize].total_cmp(&d[b as usize]).then(a.cmp(&b)));
                        idx
                    })
                    .collect()
            })
        });
        Geometry { set, max_norm: set.norm().is_max_norm(), order }
    }

    fn pts(&self) -> &[Vec<f64>] {
        self.set.points()
    }

    fn mask_adjacency(&self, eps: f64) -> Vec<u64> {
        let n = self.set.len();
        (0..n)
            .map(|i| (0..n).filter(|&j| j != i && self.set.dist(i, j) <= 2.0 * eps).fold(0u64, |m, j| m | 1 << j))
            .collect()
    }

    /// Exact minimum clique cover of the `2ε` threshold graph, with box
    /// midpoints as centers.
    fn exact_clique_cover(&self, eps: f64) -> Vec<Vec<f64>> {
        let n = self.set.len();
        let cliques = maximal_cliques(&self.mask_adjacency(eps));
        let universe = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let pick = exact_cover(&cliques, universe).expect("cliques cover every vertex");
        pick.into_iter().map(|c| self.box_center(cliques[c])).collect()
    }

    fn box_center(&self, mask: u64) -> Vec<f64> {
        let pts = self.pts();
        let members: Vec<usize> = (0..pts.len()).filter(|&j| mask >> j & 1 == 1).collect();
        let dim = pts[0].len();
        (0..dim)
            .map(|k| {
                let (lo, hi) = members
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &j| (lo.min(pts[j][k]), hi.max(pts[j][k])));
                0.5 * (lo + hi)
            })
            .collect()
    }

    fn lp_candidates(&self, with_midpoints: bool) -> Vec<Vec<f64>> {
        let pts = self.pts();
        let mut out = pts.to_vec();
        if with_midpoints {
            for i in 0..pts.len() {
                for j in i + 1..pts.len() {
                    out.push(pts[i].iter().zip(&pts[j]).map(|(a, b)| 0.5 * (a + b)).collect());
                }
            }
        }
        out
    }

    /// Exact cover with centers restricted to points and pairwise midpoints.
    fn exact_lp_cover(&self, eps: f64) -> Vec<Vec<f64>> {
        let pts = self.pts();
        let norm = self.set.norm();
        let cands = self.lp_candidates(true);
        let sets: Vec<u64> = cands
            .iter()
            .map(|c| (0..pts.len()).filter(|&j| norm.dist(c, &pts[j]) <= eps).fold(0u64, |m, j| m | 1 << j))
            .collect();
        let universe = (1u64 << pts.len()) - 1;
        let pick = exact_cover(&sets, universe).expect("each point covers itself");
        pick.into_iter().map(|k| cands[k].clone()).collect()
    }

    /// Candidate balls for the greedy cover under a max norm: from each
    /// point, grow a set nearest-first while its coordinate box stays within
    /// `2ε`, then take everything within `ε` of the box midpoint.
    fn greedy_max_cover(&self, eps: f64) -> (Vec<Vec<f64>>, Vec<BitSet>) {
        let pts = self.pts();
        let n = pts.len();
        let dim = pts[0].len();
        let order = self.order.as_ref().expect("greedy geometry has orderings");
        let two = 2.0 * eps;
        crate::parallel::install(|| {
            (0..n)
                .into_par_iter()
                .map(|i| {
                    let row = &order[i];
                    let mut lo = pts[i].clone();
                    let mut hi = pts[i].clone();
                    let mut members = BitSet::new(n);
                    let mut reach = 0;
                    for &j in row.iter() {
                        let j = j as usize;
                        if self.set.dist(i, j) > two {
                            break;
                        }
                        reach += 1;
                        let p = &pts[j];
                        if (0..dim).all(|k| hi[k].max(p[k]) - lo[k].min(p[k]) <= two) {
                            for k in 0..dim {
                                lo[k] = lo[k].min(p[k]);
                                hi[k] = hi[k].max(p[k]);
                            }
                            members.insert(j);
                        }
                    }
                    let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
                    for &j in &row[..reach] {
                        let j = j as usize;
                        if self.set.norm().dist(&center, &pts[j]) <= eps {
                            members.insert(j);
                        }
                    }
                    (center, members)
                })
                .unzip()
        })
    }

    fn greedy_lp_cover(&self, eps: f64) -> (Vec<Vec<f64>>, Vec<BitSet>) {
        let pts = self.pts();
        let norm = self.set.norm();
        let cands = self.lp_candidates(pts.len() <= GREEDY_MIDPOINT_CAP);
        let sets = crate::parallel::install(|| {
            cands
                .par_iter()
                .map(|c| {
                    let mut s = BitSet::new(pts.len());
                    for (j, p) in pts.iter().enumerate() {
                        if norm.dist(c, p) <= eps {
                            s.insert(j);
                        }
                    }
                    s
                })
                .collect()
        });
        (cands, sets)
    }

    fn cover(&self, eps: f64, mode: CoverMode) -> Vec<Vec<f64>> {
        match (mode, self.max_norm) {
            (CoverMode::Exact, true) => self.exact_clique_cover(eps),
            (CoverMode::Exact, false) => self.exact_lp_cover(eps),
            (CoverMode::Greedy, max) => {
                let (centers, sets) = if max { self.greedy_max_cover(eps) } else { self.greedy_lp_cover(eps) };
                let pick = greedy_cover(&sets, self.set.len()).expect("each candidate covers its own point");
                pick.into_iter().map(|k| centers[k].clone()).collect()
            }
        }
    }

    fn count(&self, eps: f64, mode: CoverMode) -> usize {
        self.cover(eps, mode).len()
    }

    fn clique_cover_number(&self, eps: f64) -> usize {
        let n = self.set.len();
        let cliques = maximal_cliques(&self.mask_adjacency(eps));
        exact_cover(&cliques, (1u64 << n) - 1).expect("cliques cover every vertex").len()
    }

    /// Sorted distinct halves of pairwise distances.
    fn thresholds(&self) -> Vec<f64> {
        let n = self.set.len();
        let mut t: Vec<f64> = crate::parallel::install(|| {
            (0..n)
                .into_par_iter()
                .flat_map_iter(|i| (i + 1..n).map(move |j| 0.5 * self.set.dist(i, j)))
                .collect()
        });
        t.par_sort_unstable_by(f64::total_cmp);
        t.dedup();
        t
    }
}

fn check_mode(set: &PointCloudSet, mode: CoverMode, cfg: &SolverConfig) -> Result<()> {
    if set.is_empty() {
        return input("the point set is empty");
    }
    match mode {
        CoverMode::Exact if set.len() > cfg.exact_cap.min(63) => Err(Error::Capacity(format!(
            "exact covering is capped at {} points, the set has {}; use greedy mode",
            cfg.exact_cap.min(63),
            set.len()
        ))),
        CoverMode::Greedy if set.len() > cfg.greedy_cap => Err(Error::Capacity(format!(
            "greedy covering is capped at {} points, the set has {}",
            cfg.greedy_cap,
            set.len()
        ))),
        _ => Ok(()),
    }
}

/// `N_ε(𝒦)` (exact) or the greedy upper bound for it.
pub fn covering_number(set: &PointCloudSet, eps: f64, mode: CoverMode) -> Result<usize> {
    Ok(cover(set, eps, mode, &SolverConfig::default())?.len())
}

/// A cover of the set by balls of radius `eps`, re-verified.
pub fn cover(set: &PointCloudSet, eps: f64, mode: CoverMode, cfg: &SolverConfig) -> Result<Cover> {
    if !(eps > 0.0) {
        return input("covering radius must be positive");
    }
    check_mode(set, mode, cfg)?;
    let geo = Geometry::new(set, mode == CoverMode::Greedy);
    let centers = geo.cover(eps, mode);
    let verified = verify_cover(&centers, eps, set.points(), set.norm());
    Ok(Cover { centers, radius: eps, verified })
}

/// Farthest-point separations: `r[k]` is the distance of the `k`-th chosen
/// point (0-based) to the previously chosen ones (`r[0] = ∞`).
fn farthest_point_radii(set: &PointCloudSet, start: usize) -> Vec<f64> {
    let n = set.len();
    let mut near: Vec<f64> = (0..n).map(|j| set.dist(start, j)).collect();
    let mut radii = vec![f64::INFINITY];
    for _ in 1..n {
        let (next, r) = near
            .iter()
            .enumerate()
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, (j, &d)| if d > acc.1 { (j, d) } else { acc });
        if !(r > 0.0) {
            break;
        }
        radii.push(r);
        for j in 0..n {
            near[j] = near[j].min(set.dist(next, j));
        }
    }
    radii
}

/// Packing bounds for every `n`: `ε_n ≥ r/2` whenever `2^n + 1` points are
/// pairwise at least `r` apart. Index `n` of the result bounds `ε_n`.
pub fn packing_profile(set: &PointCloudSet, n_max: u32) -> Vec<f64> {
    if set.is_empty() {
        return vec![0.0; n_max as usize + 1];
    }
    let first = farthest_point_radii(set, 0);
    let far = (0..set.len()).fold(0, |b, j| if set.dist(0, j) > set.dist(0, b) { j } else { b });
    let second = if far == 0 { first.clone() } else { farthest_point_radii(set, far) };
    (0..=n_max)
        .map(|n| {
            let m = if n >= 63 { usize::MAX } else { (1usize << n).saturating_add(1) };
            let at = |r: &Vec<f64>| r.get(m - 1).map_or(0.0, |v| 0.5 * v);
            at(&first).max(at(&second))
        })
        .collect()
}

/// Largest farthest-point packing bound for `ε_n`.
pub fn packing_lower_bound(set: &PointCloudSet, n: u32) -> f64 {
    packing_profile(set, n)[n as usize]
}

fn capacity(n: u32) -> usize {
    if n >= 63 {
        usize::MAX
    } else {
        1usize << n
    }
}

fn resolve(set: &PointCloudSet, mode: SolveMode, cfg: &SolverConfig) -> Result<CoverMode> {
    let m = match mode {
        SolveMode::Exact => CoverMode::Exact,
        SolveMode::Greedy => CoverMode::Greedy,
        SolveMode::Auto if set.len() <= cfg.exact_cap.min(63) => CoverMode::Exact,
        SolveMode::Auto => CoverMode::Greedy,
    };
    check_mode(set, m, cfg)?;
    Ok(m)
}

struct Solver<'a> {
    geo: Geometry<'a>,
    mode: CoverMode,
    tol: f64,
    thresholds: Option<Vec<f64>>,
    packing: Vec<f64>,
}

impl<'a> Solver<'a> {
    fn new(set: &'a PointCloudSet, n_max: u32, mode: CoverMode, tol: f64) -> Self {
        let geo = Geometry::new(set, mode == CoverMode::Greedy);
        let exact_lp = mode == CoverMode::Exact && !geo.max_norm;
        let thresholds = (geo.max_norm || exact_lp).then(|| geo.thresholds());
        Solver { geo, mode, tol, thresholds, packing: packing_profile(set, n_max) }
    }

    fn bracket(&self, n: u32, ceiling: f64) -> EntropyBracket {
        let cap = capacity(n);
        let set = self.geo.set;
        if set.len() <= cap {
            return EntropyBracket { n, lower: 0.0, upper: 0.0, lower_method: Method::Trivial, upper_method: Method::Trivial };
        }
        let pack = self.packing[n as usize];
        let upper_method = if self.mode == CoverMode::Exact { Method::Exact } else { Method::GreedyUpper };
        if self.geo.max_norm {
            let t = self.thresholds.as_ref().expect("max-norm thresholds");
            let feasible = |e: f64| self.geo.count(e, self.mode) <= cap;
            let start = t.partition_point(|&v| v < pack).min(t.len() - 1);
            let end = t.partition_point(|&v| v <= ceiling).clamp(start + 1, t.len());
            let upper = search_thresholds(&t[start..end], feasible).unwrap_or(t[t.len() - 1]);
            let (lower, lower_method) =
                if self.mode == CoverMode::Exact { (upper, Method::Exact) } else { (pack, Method::PackingLower) };
            return EntropyBracket { n, lower: lower.min(upper), upper, lower_method, upper_method };
        }
        // ℓp: bisection on the restricted-center cover
        let (mut lower, mut lower_method) = (pack, Method::PackingLower);
        if self.mode == CoverMode::Exact {
            let t = self.thresholds.as_ref().expect("lp thresholds");
            if let Some(l) = search_thresholds(t, |e| self.geo.clique_cover_number(e) <= cap) {
                if l > lower {
                    lower = l;
                    lower_method = Method::Exact;
                }
            }
        }
        let feasible = |e: f64| e > 0.0 && self.geo.count(e, self.mode) <= cap;
        let mut hi = if ceiling.is_finite() { ceiling.max(lower) } else { set.diameter() };
        if !feasible(hi) {
            hi = set.diameter();
        }
        let mut lo = lower;
        if feasible(lo) {
            hi = lo;
        }
        while hi - lo > self.tol * hi {
            let mid = 0.5 * (lo + hi);
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        EntropyBracket { n, lower, upper: hi, lower_method, upper_method }
    }
}

/// Smallest threshold accepted by `feasible`, assuming the last one is.
fn search_thresholds(t: &[f64], feasible: impl Fn(f64) -> bool) -> Option<f64> {
    if t.is_empty() {
        return None;
    }
    if feasible(t[0]) {
        return Some(t[0]);
    }
    let (mut lo, mut hi) = (0usize, t.len() - 1);
    if !feasible(t[hi]) {
        return None;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if feasible(t[mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(t[hi])
}

/// Bracket on `ε_n(𝒦)`.
pub fn entropy_number(set: &PointCloudSet, n: u32, tol: f64) -> Result<EntropyBracket> {
    let cfg = SolverConfig { tol, ..SolverConfig::default() };
    let p = entropy_profile(set, n, SolveMode::Auto, &cfg)?;
    Ok(p.entries[n as usize])
}

/// Brackets on `ε_0..ε_{n_max}`, made monotone in `n`.
pub fn entropy_profile(set: &PointCloudSet, n_max: u32, mode: SolveMode, cfg: &SolverConfig) -> Result<EntropyProfile> {
    if !(cfg.tol > 0.0) {
        return input("tolerance must be positive");
    }
    let mode = resolve(set, mode, cfg)?;
    let solver = Solver::new(set, n_max, mode, cfg.tol);
    let mut entries: Vec<EntropyBracket> = Vec::with_capacity(n_max as usize + 1);
    let mut ceiling = f64::INFINITY;
    for n in 0..=n_max {
        let b = solver.bracket(n, ceiling);
        ceiling = ceiling.min(b.upper);
        entries.push(b);
    }
    for i in 1..entries.len() {
        if entries[i].upper > entries[i - 1].upper {
            entries[i].upper = entries[i - 1].upper;
            entries[i].upper_method = entries[i - 1].upper_method;
        }
    }
    for i in (0..entries.len().saturating_sub(1)).rev() {
        if entries[i].lower < entries[i + 1].lower {
            entries[i].lower = entries[i + 1].lower;
            entries[i].lower_method = entries[i + 1].lower_method;
        }
    }
    EntropyProfile::new(entries, Some(set.len()))
}

/// Per-axis lattice `−1, −1+2δ, …` of `[−1,1]`, closed by the endpoint `1`.
pub fn axis_lattice(delta: f64) -> Vec<f64> {
    let steps = (1.0 / delta).floor() as usize;
    let mut axis: Vec<f64> = (0..=steps).map(|i| -1.0 + 2.0 * delta * i as f64).filter(|v| *v < 1.0).collect();
    axis.push(1.0);
    axis
}

/// All points of the product lattice, last coordinate fastest.
pub fn product_lattice(axis: &[f64], dim: usize) -> Result<Vec<Vec<f64>>> {
    let total = axis.len().checked_pow(dim as u32).filter(|&t| t <= MAX_LATTICE).ok_or_else(|| {
        Error::Capacity(format!("lattice with {} points per axis in dimension {dim} is too large", axis.len()))
    })?;
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; dim];
    for _ in 0..total {
        out.push(idx.iter().map(|&i| axis[i]).collect());
        for k in (0..dim).rev() {
            idx[k] += 1;
            if idx[k] < axis.len() {
                break;
            }
            idx[k] = 0;
        }
    }
    Ok(out)
}

/// Cover of the image of a `γ`-Lipschitz map `(B_{ℓ∞^m}(1), ℓ∞) → (ℝ^D, norm)`
/// by the images of a `δ`-net, `δ = ε/γ`.
///
/// The cover is checked on the images of `samples` (parameter vectors in the
/// unit ball); a miss means the Lipschitz claim is wrong.
pub fn cover_from_lipschitz(
    map: &(dyn Fn(&[f64]) -> Vec<f64> + Sync),
    gamma: f64,
    param_dim: usize,
    eps: f64,
    norm: &Norm,
    samples: &[Vec<f64>],
) -> Result<Cover> {
    if !(gamma > 0.0) || !(eps > 0.0) || param_dim == 0 {
        return input("cover_from_lipschitz needs gamma, eps > 0 and param_dim >= 1");
    }
    if let Some(s) = samples.iter().find(|s| s.len() != param_dim || s.iter().any(|v| !(v.abs() <= 1.0))) {
        return input(format!("sample {s:?} is not in the unit ball of dimension {param_dim}"));
    }
    let delta = eps / gamma;
    let axis = axis_lattice(delta);
    let lattice = product_lattice(&axis, param_dim)?;
    let centers: Vec<Vec<f64>> = crate::parallel::install(|| lattice.par_iter().map(|y| map(y)).collect());
    if let Some(c) = centers.iter().find(|c| c.len() != norm.dimension()) {
        return input(format!("map output has dimension {}, norm expects {}", c.len(), norm.dimension()));
    }
    let limit = eps * (1.0 + VERIFY_SLACK);
    let nearest = |y: &[f64]| {
        y.iter().fold(0usize, |acc, &v| {
            let i = (((v + 1.0) / (2.0 * delta)).round() as usize).min(axis.len() - 1);
            let i = if (axis[i] - v).abs() > (1.0 - v).abs() { axis.len() - 1 } else { i };
            acc * axis.len() + i
        })
    };
    let miss = crate::parallel::install(|| {
        samples.par_iter().find_any(|y| {
            let f = map(y);
            norm.dist(&centers[nearest(y)], &f) > limit && centers.iter().all(|c| norm.dist(c, &f) > limit)
        })
    });
    if let Some(y) = miss {
        return Err(Error::InvalidCertificate(format!(
            "image of {y:?} is farther than {eps} from every center; the map is not {gamma}-Lipschitz"
        )));
    }
    let images: Vec<Vec<f64>> = samples.iter().map(|y| map(y)).collect();
    let verified = verify_cover(&centers, eps, &images, norm);
    Ok(Cover { centers, radius: eps, verified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{interval_grid, sigma_set, SigmaExampleSet};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[f64]) -> PointCloudSet {
        PointCloudSet::new(points.iter().map(|&p| vec![p]).collect(), Norm::linf(1).unwrap(), "line").unwrap()
    }

    #[test]
    fn two_point_covers() {
        let k = line(&[0.0, 1.0]);
        for mode in [CoverMode::Exact, CoverMode::Greedy] {
            assert_eq!(covering_number(&k, 0.5, mode).unwrap(), 1);
            assert_eq!(covering_number(&k, 0.4, mode).unwrap(), 2);
        }
    }

    #[test]
    fn sigma6_matches_analytic_count() {
        // {σ_j e_j} ∪ {0}: points with σ_j > 2ε are isolated, the rest share a ball with 0
        let k = sigma_set(6).unwrap();
        let eps = 0.3;
        let isolated = (1..=6).filter(|&j| SigmaExampleSet::sigma(j) > 2.0 * eps).count();
        assert_eq!(covering_number(&k, eps, CoverMode::Exact).unwrap(), isolated + 1);
    }

    #[test]
    fn exact_capacity_error() {
        let k = interval_grid(30).unwrap();
        assert!(matches!(covering_number(&k, 0.1, CoverMode::Exact), Err(Error::Capacity(_))));
    }

    #[test]
    fn covers_are_verified() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for norm in [Norm::linf(3).unwrap(), Norm::lp(2.0, 3).unwrap(), Norm::lp(1.0, 3).unwrap()] {
            let pts: Vec<Vec<f64>> = (0..15).map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
            let k = PointCloudSet::new(pts, norm.clone(), "r").unwrap();
            for eps in [0.1, 0.3, 0.6] {
                for mode in [CoverMode::Exact, CoverMode::Greedy] {
                    let c = cover(&k, eps, mode, &SolverConfig::default()).unwrap();
                    assert!(c.verified);
                    assert!(verify_cover(&c.centers, eps, k.points(), &norm));
                }
            }
        }
    }

    #[test]
    fn covering_number_nonincreasing_in_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let pts: Vec<Vec<f64>> = (0..18).map(|_| (0..2).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
        let k = PointCloudSet::new(pts, Norm::linf(2).unwrap(), "r").unwrap();
        let mut prev = usize::MAX;
        for i in 1..60 {
            let c = covering_number(&k, i as f64 / 100.0, CoverMode::Exact).unwrap();
            assert!(c <= prev);
            prev = c;
        }
    }

    #[test]
    fn dyadic_grid_small() {
        let k = interval_grid(257).unwrap();
        for n in 0..=5 {
            let b = entropy_number(&k, n, 1e-6).unwrap();
            let target = 0.5f64.powi(n as i32 + 1);
            assert!(b.lower <= target && target <= b.upper, "{b:?}");
            assert!(b.width() <= 1e-9);
        }
    }

    #[test]
    fn singleton_is_zero() {
        let k = line(&[0.3]);
        for n in 0..4 {
            let b = entropy_number(&k, n, 1e-6).unwrap();
            assert_eq!((b.lower, b.upper), (0.0, 0.0));
        }
        assert_eq!(packing_lower_bound(&k, 0), 0.0);
    }

    #[test]
    fn packing_examples() {
        assert_eq!(packing_lower_bound(&line(&[0.0, 1.0]), 0), 0.5);
        let k = sigma_set(8).unwrap();
        let p = packing_lower_bound(&k, 2);
        let b = entropy_number(&k, 2, 1e-6).unwrap();
        assert!(p <= b.upper);
    }

    #[test]
    fn sigma_profile_matches_closed_form() {
        for j in [6usize, 12, 20] {
            let k = sigma_set(j).unwrap();
            let prof = entropy_profile(&k, 5, SolveMode::Auto, &SolverConfig::default()).unwrap();
            for e in prof.entries() {
                let m = 1usize << e.n;
                let truth = if m <= j { 0.5 * SigmaExampleSet::sigma(m) } else { 0.0 };
                assert!(e.lower <= truth + 1e-15 && truth <= e.upper + 1e-15, "J={j} {e:?}");
            }
        }
    }

    #[test]
    fn greedy_sigma_is_tight() {
        let k = sigma_set(40).unwrap();
        let prof = entropy_profile(&k, 5, SolveMode::Greedy, &SolverConfig::default()).unwrap();
        for e in prof.entries() {
            let truth = 0.5 * SigmaExampleSet::sigma(1 << e.n);
            assert_eq!(e.lower, truth);
            assert_eq!(e.upper, truth);
        }
    }

    #[test]
    fn lp_brackets_contain_exact_value_on_line() {
        // on ℝ every ℓp norm is |·|, so the interval value 2^{-(n+1)} applies
        let k = PointCloudSet::new(
            crate::spaces::uniform_nodes(65).into_iter().map(|t| vec![t]).collect(),
            Norm::lp(2.0, 1).unwrap(),
            "l2 line",
        )
        .unwrap();
        for n in 0..4 {
            let b = entropy_profile(&k, n, SolveMode::Greedy, &SolverConfig::default()).unwrap().entries()[n as usize];
            let target = 0.5f64.powi(n as i32 + 1);
            assert!(b.lower <= target + 1e-12 && target <= b.upper * (1.0 + 1e-9), "{b:?}");
        }
    }

    #[test]
    fn profile_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for norm in [Norm::linf(2).unwrap(), Norm::lp(2.0, 2).unwrap()] {
            let pts: Vec<Vec<f64>> = (0..40).map(|_| (0..2).map(|_| rng.gen_range(0.0..1.0)).collect()).collect();
            let k = PointCloudSet::new(pts, norm, "r").unwrap();
            let p = entropy_profile(&k, 6, SolveMode::Greedy, &SolverConfig::default()).unwrap();
            for w in p.entries().windows(2) {
                assert!(w[1].upper <= w[0].upper);
                assert!(w[1].lower <= w[0].lower);
            }
            assert!(p.entries().iter().all(|e| e.lower <= e.upper));
        }
    }

    #[test]
    fn lattice_cover_identity() {
        let id = |y: &[f64]| y.to_vec();
        let samples: Vec<Vec<f64>> = (0..=100).map(|i| vec![-1.0 + 0.02 * i as f64]).collect();
        let c = cover_from_lipschitz(&id, 1.0, 1, 0.5, &Norm::linf(1).unwrap(), &samples).unwrap();
        assert_eq!(c.centers, vec![vec![-1.0], vec![0.0], vec![1.0]]);
        assert!(c.verified);
    }

    #[test]
    fn lattice_cover_rejects_false_constant() {
        let double = |y: &[f64]| vec![2.0 * y[0]];
        let samples: Vec<Vec<f64>> = (0..=100).map(|i| vec![-1.0 + 0.02 * i as f64]).collect();
        let r = cover_from_lipschitz(&double, 1.0, 1, 0.5, &Norm::linf(1).unwrap(), &samples);
        assert!(matches!(r, Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn lattice_size_bound() {
        for (gamma, eps) in [(1.0, 0.5), (3.0, 0.25), (2.25, 0.25), (0.1, 1.0), (7.0, 0.3)] {
            let per_axis = axis_lattice(eps / gamma).len();
            assert!(per_axis <= 2 * (gamma / eps as f64).ceil() as usize + 1);
        }
        assert_eq!(product_lattice(&[0.0, 1.0], 3).unwrap().len(), 8);
        assert!(matches!(product_lattice(&axis_lattice(1e-4), 3), Err(Error::Capacity(_))));
    }
}
