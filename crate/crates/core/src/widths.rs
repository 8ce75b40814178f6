//! Lipschitz-width upper bounds from explicit parametrizations of the
//! `ℓ∞` parameter ball.

use crate::entropy::{axis_lattice, product_lattice};
use crate::error::{input, Error, Result};
use crate::spaces::{Norm, PointCloudSet};
use crate::takagi::hat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::sync::Arc;

pub type ParamMap = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

/// Pairs sampled when a parametrization is constructed.
pub const SPOT_CHECK_PAIRS: usize = 256;
/// Relative slack tolerated by the spot check.
pub const SPOT_CHECK_SLACK: f64 = 1e-9;

/// A map `(B_{ℓ∞^n}(r), ℓ∞) → X` with a claimed Lipschitz constant.
#[derive(Clone)]
pub struct LipschitzParametrization {
    param_dim: usize,
    radius: f64,
    constant: f64,
    norm: Norm,
    description: String,
    map: ParamMap,
}

impl std::fmt::Debug for LipschitzParametrization {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LipschitzParametrization")
            .field("param_dim", &self.param_dim)
            .field("radius", &self.radius)
            .field("constant", &self.constant)
            .field("description", &self.description)
            .finish()
    }
}

impl LipschitzParametrization {
    /// `constant` is the claimed Lipschitz constant on `B(radius)`. The claim
    /// is spot-checked on seeded random pairs.
    pub fn new(
        param_dim: usize,
        radius: f64,
        constant: f64,
        norm: Norm,
        description: impl Into<String>,
        map: ParamMap,
    ) -> Result<Self> {
        if param_dim == 0 || !(radius > 0.0) || !(constant >= 0.0) || !constant.is_finite() {
            return input("parametrization needs n >= 1, r > 0 and a finite constant >= 0");
        }
        let par = LipschitzParametrization { param_dim, radius, constant, norm, description: description.into(), map };
        par.spot_check(0x5EED)?;
        Ok(par)
    }

    fn spot_check(&self, seed: u64) -> Result<()> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = self.radius;
        let probe = self.apply_unchecked(&vec![0.0; self.param_dim]);
        if probe.len() != self.norm.dimension() {
            return input(format!("map output has dimension {}, norm expects {}", probe.len(), self.norm.dimension()));
        }
        for t in 0..SPOT_CHECK_PAIRS {
            let y: Vec<f64> = (0..self.param_dim).map(|_| rng.gen_range(-r..=r)).collect();
            let z: Vec<f64> = if t % 2 == 0 {
                (0..self.param_dim).map(|_| rng.gen_range(-r..=r)).collect()
            } else {
                y.iter().map(|v| (v + rng.gen_range(-r..=r) * 1e-3).clamp(-r, r)).collect()
            };
            let dy = y.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
            if dy == 0.0 {
                continue;
            }
            let df = self.norm.dist(&self.apply_unchecked(&y), &self.apply_unchecked(&z));
            if df > self.constant * dy * (1.0 + SPOT_CHECK_SLACK) + f64::MIN_POSITIVE {
                return Err(Error::InvalidCertificate(format!(
                    "{}: sampled ratio {} exceeds the claimed constant {}",
                    self.description,
                    df / dy,
                    self.constant
                )));
            }
        }
        Ok(())
    }

    pub fn param_dim(&self) -> usize {
        self.param_dim
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Claimed Lipschitz constant on `B(radius)`.
    pub fn constant(&self) -> f64 {
        self.constant
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    fn apply_unchecked(&self, y: &[f64]) -> Vec<f64> {
        (self.map)(y)
    }

    pub fn apply(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.param_dim {
            return input(format!("parameter has dimension {}, expected {}", y.len(), self.param_dim));
        }
        if y.iter().any(|v| !(v.abs() <= self.radius * (1.0 + 1e-12))) {
            return input(format!("parameter leaves the ball of radius {}", self.radius));
        }
        Ok(self.apply_unchecked(y))
    }

    pub fn map(&self) -> &ParamMap {
        &self.map
    }
}

/// `y ↦ map(ry)` on the unit ball, constant multiplied by `r`.
pub fn rescale(par: &LipschitzParametrization) -> LipschitzParametrization {
    if par.radius == 1.0 {
        return par.clone();
    }
    let r = par.radius;
    let inner = par.map.clone();
    LipschitzParametrization {
        param_dim: par.param_dim,
        radius: 1.0,
        constant: par.constant * r,
        norm: par.norm.clone(),
        description: format!("{} rescaled from radius {r}", par.description),
        map: Arc::new(move |y: &[f64]| {
            let scaled: Vec<f64> = y.iter().map(|v| v * r).collect();
            inner(&scaled)
        }),
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct WidthEstimate {
    pub n: usize,
    pub gamma: f64,
    /// `max_f min_i ‖f − ℒ(y_i)‖ + γδ`.
    pub upper: f64,
    /// The same without the `γδ` inflation.
    pub raw: f64,
    pub witness: String,
    pub delta: f64,
    pub lattice_size: usize,
}

/// Upper bound for `sup_{f∈𝒦} inf_{y∈B(1)} ‖f − ℒ(y)‖` over the lattice of
/// spacing `2δ` in the unit parameter ball.
pub fn width_upper(set: &PointCloudSet, par: &LipschitzParametrization, delta: f64) -> Result<WidthEstimate> {
    if par.radius != 1.0 {
        return input("width_upper expects a unit-ball parametrization; rescale first");
    }
    if !(delta > 0.0) {
        return input("grid spacing must be positive");
    }
    if set.is_empty() {
        return input("the point set is empty");
    }
    if set.dim() != par.norm.dimension() {
        return input("set and parametrization live in different spaces");
    }
    let lattice = product_lattice(&axis_lattice(delta), par.param_dim)?;
    if lattice.is_empty() {
        return input("empty search grid");
    }
    let norm = set.norm();
    let raw = crate::parallel::install(|| {
        let images: Vec<Vec<f64>> = lattice.par_iter().map(|y| (par.map)(y)).collect();
        set.points()
            .par_iter()
            .map(|f| images.iter().map(|g| norm.dist(f, g)).fold(f64::INFINITY, f64::min))
            .reduce(|| 0.0, f64::max)
    });
    Ok(WidthEstimate {
        n: par.param_dim,
        gamma: par.constant,
        upper: raw + par.constant * delta,
        raw,
        witness: par.description.clone(),
        delta,
        lattice_size: lattice.len(),
    })
}

/// `(2n+1, 2√n+1)`.
pub fn norm_change_penalty(n: usize) -> Result<(f64, f64)> {
    if n == 0 {
        return input("norm_change_penalty needs n >= 1");
    }
    let nf = n as f64;
    Ok((2.0 * nf + 1.0, 2.0 * nf.sqrt() + 1.0))
}

/// `y ↦ Σ_k y_k H^{∘k}` sampled at `nodes`, constant `max_t Σ_k H^{∘k}(t)`.
pub fn takagi_family(m: usize, nodes: &[f64]) -> Result<LipschitzParametrization> {
    if m == 0 || nodes.is_empty() {
        return input("Takagi family needs m >= 1 and at least one node");
    }
    let iterates: Vec<Vec<f64>> = (1..=m)
        .map(|k| nodes.iter().map(|&t| (0..k).fold(t, |g, _| hat(g))).collect())
        .collect();
    let constant = (0..nodes.len()).map(|i| iterates.iter().map(|h| h[i]).sum::<f64>()).fold(0.0, f64::max);
    let norm = Norm::sup_grid(vec![nodes.to_vec()])?;
    let iterates = Arc::new(iterates);
    let map: ParamMap = Arc::new(move |y: &[f64]| {
        let len = iterates[0].len();
        let mut out = vec![0.0; len];
        for (c, h) in y.iter().zip(iterates.iter()) {
            for (o, v) in out.iter_mut().zip(h) {
                *o += c * v;
            }
        }
        out
    });
    LipschitzParametrization::new(m, 1.0, constant, norm, format!("takagi(m={m})"), map)
}

/// `y ↦ b + Σ_j y_j a_j`, constant `Σ_j ‖a_j‖`.
pub fn linear_family(offset: Vec<f64>, columns: Vec<Vec<f64>>, norm: Norm) -> Result<LipschitzParametrization> {
    if columns.is_empty() || columns.iter().any(|c| c.len() != offset.len()) {
        return input("linear family needs columns matching the offset dimension");
    }
    let constant = columns.iter().map(|c| norm.norm_of(c)).sum();
    let m = columns.len();
    let map: ParamMap = Arc::new(move |y: &[f64]| {
        let mut out = offset.clone();
        for (c, a) in y.iter().zip(&columns) {
            for (o, v) in out.iter_mut().zip(a) {
                *o += c * v;
            }
        }
        out
    });
    LipschitzParametrization::new(m, 1.0, constant, norm, format!("linear(m={m})"), map)
}

/// Path through `vertices` at uniform speed in `y ∈ [−1,1]`; vertex `i`
/// sits at `y = −1 + 2i/L`. Constant `(L/2)·max segment length`.
pub fn polyline_family(vertices: Vec<Vec<f64>>, norm: Norm) -> Result<LipschitzParametrization> {
    if vertices.is_empty() || vertices.iter().any(|v| v.len() != norm.dimension()) {
        return input("polyline needs vertices of the norm's dimension");
    }
    let segs = vertices.len().saturating_sub(1);
    let longest = vertices.windows(2).map(|w| norm.dist(&w[0], &w[1])).fold(0.0, f64::max);
    let constant = segs as f64 / 2.0 * longest;
    let map: ParamMap = Arc::new(move |y: &[f64]| {
        if segs == 0 {
            return vertices[0].clone();
        }
        let s = ((y[0] + 1.0) / 2.0 * segs as f64).clamp(0.0, segs as f64);
        let i = (s.floor() as usize).min(segs - 1);
        let t = s - i as f64;
        vertices[i].iter().zip(&vertices[i + 1]).map(|(a, b)| a + t * (b - a)).collect()
    });
    LipschitzParametrization::new(1, 1.0, constant, norm, format!("polyline({} vertices)", segs + 1), map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::uniform_nodes;

    fn identity_on(r: f64) -> LipschitzParametrization {
        LipschitzParametrization::new(1, r, 1.0, Norm::linf(1).unwrap(), "id", Arc::new(|y: &[f64]| y.to_vec()))
            .unwrap()
    }

    #[test]
    fn rescale_examples() {
        let p = LipschitzParametrization::new(1, 2.0, 3.0, Norm::linf(1).unwrap(), "3y", Arc::new(|y: &[f64]| vec![3.0 * y[0]]))
            .unwrap();
        let u = rescale(&p);
        assert_eq!((u.radius(), u.constant()), (1.0, 6.0));
        let same = rescale(&identity_on(1.0));
        assert_eq!((same.radius(), same.constant()), (1.0, 1.0));
        let five = rescale(&identity_on(5.0));
        assert_eq!(five.apply(&[0.2]).unwrap(), vec![1.0]);
        assert_eq!(five.constant(), 5.0);
    }

    #[test]
    fn rescale_preserves_image() {
        let p = identity_on(3.0);
        let u = rescale(&p);
        for i in 0..=60 {
            let y = -1.0 + i as f64 / 30.0;
            assert_eq!(u.apply(&[y]).unwrap(), p.apply(&[3.0 * y]).unwrap());
        }
    }

    #[test]
    fn false_constant_rejected() {
        let r = LipschitzParametrization::new(1, 1.0, 1.0, Norm::linf(1).unwrap(), "2y", Arc::new(|y: &[f64]| vec![2.0 * y[0]]));
        assert!(matches!(r, Err(Error::InvalidCertificate(_))));
    }

    #[test]
    fn width_of_image_points() {
        let par = identity_on(1.0);
        let delta = 0.125;
        let pts = axis_lattice(delta).into_iter().map(|v| vec![v]).collect();
        let k = PointCloudSet::new(pts, Norm::linf(1).unwrap(), "grid").unwrap();
        let w = width_upper(&k, &par, delta).unwrap();
        assert_eq!(w.raw, 0.0);
        assert!(w.upper <= par.constant() * delta);
    }

    #[test]
    fn width_of_zero_map() {
        let zero = LipschitzParametrization::new(2, 1.0, 0.5, Norm::linf(1).unwrap(), "0", Arc::new(|_: &[f64]| vec![0.0]))
            .unwrap();
        let k = PointCloudSet::new(vec![vec![0.0]], Norm::linf(1).unwrap(), "0").unwrap();
        let mut prev = f64::INFINITY;
        for delta in [0.5, 0.25, 0.125, 0.0625] {
            let w = width_upper(&k, &zero, delta).unwrap();
            assert_eq!(w.upper, 0.5 * delta);
            assert!(w.upper < prev);
            prev = w.upper;
        }
    }

    #[test]
    fn refining_grid_never_increases() {
        let nodes = uniform_nodes(65);
        let par = takagi_family(2, &nodes).unwrap();
        let pts = [[0.3, -0.2], [0.9, 0.1], [-0.7, 0.77]]
            .iter()
            .map(|y| par.apply(y).unwrap().iter().map(|v| v + 0.01).collect())
            .collect();
        let k = PointCloudSet::new(pts, par.norm().clone(), "takagi samples").unwrap();
        let mut prev = f64::INFINITY;
        for delta in [0.5, 0.25, 0.125, 0.0625, 0.03125] {
            let w = width_upper(&k, &par, delta).unwrap();
            assert!(w.upper <= prev);
            assert!(w.raw >= 0.01 - 1e-12);
            prev = w.upper;
        }
    }

    #[test]
    fn penalty_examples() {
        assert_eq!(norm_change_penalty(4).unwrap(), (9.0, 5.0));
        assert_eq!(norm_change_penalty(1).unwrap(), (3.0, 3.0));
        assert_eq!(norm_change_penalty(100).unwrap(), (201.0, 21.0));
        assert!(norm_change_penalty(0).is_err());
    }

    #[test]
    fn takagi_family_constant() {
        let par = takagi_family(3, &uniform_nodes(4097)).unwrap();
        assert_eq!(par.constant(), 2.25);
    }

    #[test]
    fn linear_and_polyline_constants() {
        let lin = linear_family(vec![0.0, 0.0], vec![vec![1.0, -2.0]], Norm::linf(2).unwrap()).unwrap();
        assert_eq!(lin.constant(), 2.0);
        assert_eq!(lin.apply(&[0.5]).unwrap(), vec![0.5, -1.0]);
        let poly = polyline_family(vec![vec![0.0], vec![1.0], vec![3.0]], Norm::linf(1).unwrap()).unwrap();
        assert_eq!(poly.constant(), 2.0);
        assert_eq!(poly.apply(&[-1.0]).unwrap(), vec![0.0]);
        assert_eq!(poly.apply(&[0.0]).unwrap(), vec![1.0]);
        assert_eq!(poly.apply(&[1.0]).unwrap(), vec![3.0]);
    }
}
