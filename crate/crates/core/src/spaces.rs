//! Normed ambient spaces and finite stand-ins for compact sets.
//!
//! A compact set is represented by a finite point cloud in `ℝ^D` together with
//! the norm it is measured in. Function classes on `[0,1]^d` are represented
//! by their samples on a tensor grid, measured in the sampled sup norm.

use crate::error::{input, Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;

/// A norm on `ℝ^D`.
#[derive(Debug, Clone, PartialEq)]
pub enum Norm {
    /// `ℓ_p` on `ℝ^dim`; `p` may be `f64::INFINITY`.
    Lp { p: f64, dim: usize },
    /// Sup norm over samples on a tensor grid in `[0,1]^d`; a vector holds one
    /// value per grid node, in row-major order over the axes.
    SupGrid { axes: Vec<Vec<f64>> },
}

impl Norm {
    pub fn lp(p: f64, dim: usize) -> Result<Self> {
        if !(p >= 1.0) {
            return input(format!("l_p norm needs p >= 1, got {p}"));
        }
        if dim == 0 {
            return input("norm dimension must be positive");
        }
        Ok(Norm::Lp { p, dim })
    }

    pub fn linf(dim: usize) -> Result<Self> {
        Self::lp(f64::INFINITY, dim)
    }

    pub fn sup_grid(axes: Vec<Vec<f64>>) -> Result<Self> {
        if axes.is_empty() || axes.iter().any(|a| a.is_empty()) {
            return input("sup grid needs at least one node per axis");
        }
        for axis in &axes {
            if axis.iter().any(|t| !t.is_finite() || !(0.0..=1.0).contains(t)) {
                return input("sup grid nodes must lie in [0,1]");
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return input("sup grid axes must be strictly increasing");
            }
        }
        Ok(Norm::SupGrid { axes })
    }

    /// Uniform grid with `nodes` points per axis on `[0,1]^d`.
    pub fn uniform_sup_grid(nodes: usize, d: usize) -> Result<Self> {
        if nodes < 2 || d == 0 {
            return input("uniform grid needs d >= 1 and at least two nodes per axis");
        }
        let axis = uniform_nodes(nodes);
        Self::sup_grid(vec![axis; d])
    }

    pub fn dimension(&self) -> usize {
        match self {
            Norm::Lp { dim, .. } => *dim,
            Norm::SupGrid { axes } => axes.iter().map(Vec::len).product(),
        }
    }

    /// True for the coordinate-max norms (`ℓ∞` and sampled sup norms).
    pub fn is_max_norm(&self) -> bool {
        match self {
            Norm::Lp { p, .. } => p.is_infinite(),
            Norm::SupGrid { .. } => true,
        }
    }

    /// `‖v‖` without dimension checks.
    pub fn norm_of(&self, v: &[f64]) -> f64 {
        match self {
            Norm::Lp { p, .. } if p.is_infinite() => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::SupGrid { .. } => v.iter().fold(0.0, |m, x| m.max(x.abs())),
            Norm::Lp { p, .. } if *p == 1.0 => v.iter().map(|x| x.abs()).sum(),
            Norm::Lp { p, .. } if *p == 2.0 => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::Lp { p, .. } => v.iter().map(|x| x.abs().powf(*p)).sum::<f64>().powf(1.0 / p),
        }
    }

    /// `‖x − y‖` without dimension checks.
    pub fn dist(&self, x: &[f64], y: &[f64]) -> f64 {
        if self.is_max_norm() {
            return x.iter().zip(y).fold(0.0, |m, (a, b)| m.max((a - b).abs()));
        }
        let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
        self.norm_of(&diff)
    }

    /// Grid nodes of a sup-grid norm, row-major. `None` for `ℓ_p`.
    pub fn grid_nodes(&self) -> Option<Vec<Vec<f64>>> {
        match self {
            Norm::Lp { .. } => None,
            Norm::SupGrid { axes } => Some(tensor_nodes(axes)),
        }
    }
}

/// `n` equally spaced nodes on `[0,1]`, endpoints included.
pub fn uniform_nodes(n: usize) -> Vec<f64> {
    assert!(n >= 2, "need at least two nodes");
    let h = (n - 1) as f64;
    (0..n).map(|i| i as f64 / h).collect()
}

/// Row-major enumeration of a tensor grid.
pub fn tensor_nodes(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut nodes = vec![Vec::with_capacity(axes.len())];
    for axis in axes {
        let mut next = Vec::with_capacity(nodes.len() * axis.len());
        for prefix in &nodes {
            for &t in axis {
                let mut node = prefix.clone();
                node.push(t);
                next.push(node);
            }
        }
        nodes = next;
    }
    nodes
}

/// `‖x − y‖` under `nrm`, checking dimensions.
pub fn distance(x: &[f64], y: &[f64], nrm: &Norm) -> Result<f64> {
    let dim = nrm.dimension();
    if x.len() != dim || y.len() != dim {
        return input(format!(
            "dimension mismatch: {} and {} against norm dimension {dim}",
            x.len(),
            y.len()
        ));
    }
    Ok(nrm.dist(x, y))
}

/// Finite point cloud standing in for a compact set.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloudSet {
    points: Vec<Vec<f64>>,
    norm: Norm,
    label: String,
}

impl PointCloudSet {
    /// Builds the set, dropping bit-identical duplicates (first occurrence kept).
    pub fn new(points: Vec<Vec<f64>>, norm: Norm, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return input("point cloud must be nonempty");
        }
        let dim = norm.dimension();
        let mut seen = HashSet::with_capacity(points.len());
        let mut kept = Vec::with_capacity(points.len());
        for (i, p) in points.into_iter().enumerate() {
            if p.len() != dim {
                return input(format!("point {i} has dimension {}, norm has {dim}", p.len()));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return input(format!("point {i} has a non-finite coordinate"));
            }
            let key: Vec<u64> = p.iter().map(|x| x.to_bits()).collect();
            if seen.insert(key) {
                kept.push(p);
            }
        }
        Ok(PointCloudSet { points: kept, norm, label: label.into() })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn norm(&self) -> &Norm {
        &self.norm
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.norm.dimension()
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.norm.dist(&self.points[i], &self.points[j])
    }

    pub fn diameter(&self) -> f64 {
        let n = self.points.len();
        let mut diam = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                diam = diam.max(self.dist(i, j));
            }
        }
        diam
    }

    /// Largest distance from `center` to a point of the set.
    pub fn max_dist_from(&self, center: &[f64]) -> f64 {
        self.points.iter().fold(0.0, |m, p| m.max(self.norm.dist(center, p)))
    }

    pub fn to_json(&self) -> String {
        crate::fmt::to_json_string(&PointCloudRepr::from(self)).expect("point clouds serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: PointCloudRepr =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("bad point cloud json: {e}")))?;
        let norm = repr.norm.into_norm()?;
        PointCloudSet::new(repr.points, norm, repr.label)
    }
}

/// Chebyshev radius with a certified bracket and the best center found.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebyshevRadius {
    /// Best radius found; equals `upper`.
    pub radius: f64,
    pub lower: f64,
    pub upper: f64,
    pub center: Vec<f64>,
    pub exact: bool,
}

/// Chebyshev radius `inf_g sup_f ‖g − f‖` of a finite set.
///
/// Exact for max norms (coordinate midpoints of the bounding box). For other
/// norms the center is the best of all points and pairwise midpoints, and the
/// radius is bracketed by `[diam/2, best]`.
pub fn chebyshev_radius(set: &PointCloudSet) -> ChebyshevRadius {
    let pts = set.points();
    let dim = set.dim();
    if set.norm().is_max_norm() {
        let mut lo = pts[0].clone();
        let mut hi = pts[0].clone();
        for p in &pts[1..] {
            for k in 0..dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = lo.iter().zip(&hi).fold(0.0f64, |m, (a, b)| m.max(0.5 * (b - a)));
        return ChebyshevRadius { radius, lower: radius, upper: radius, center, exact: true };
    }
    let mut best = (set.max_dist_from(&pts[0]), pts[0].clone());
    let mut consider = |c: Vec<f64>| {
        let r = set.max_dist_from(&c);
        if r < best.0 {
            best = (r, c);
        }
    };
    for i in 0..pts.len() {
        consider(pts[i].clone());
        for j in i + 1..pts.len() {
            consider(pts[i].iter().zip(&pts[j]).map(|(a, b)| 0.5 * (a + b)).collect());
        }
    }
    let lower = 0.5 * set.diameter();
    ChebyshevRadius { radius: best.0, lower, upper: best.0, center: best.1, exact: false }
}

/// `K(σ) = {σ_j e_j}_{j≤J} ∪ {0}` with `σ_j = 1/log₂(j+1)`, truncated at `J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SigmaExampleSet {
    pub truncation: usize,
}

impl SigmaExampleSet {
    pub fn new(truncation: usize) -> Result<Self> {
        if truncation == 0 {
            return input("sigma set truncation must be at least 1");
        }
        Ok(SigmaExampleSet { truncation })
    }

    /// `σ_j` for `j ≥ 1`.
    pub fn sigma(j: usize) -> f64 {
        1.0 / ((j + 1) as f64).log2()
    }

    pub fn includes_zero(&self) -> bool {
        true
    }

    /// Points `σ_1e_1, …, σ_Je_J, 0` in `ℝ^J` under `ℓ∞`.
    pub fn to_point_cloud(&self) -> PointCloudSet {
        let dim = self.truncation;
        let mut points = Vec::with_capacity(dim + 1);
        for j in 1..=dim {
            let mut p = vec![0.0; dim];
            p[j - 1] = Self::sigma(j);
            points.push(p);
        }
        points.push(vec![0.0; dim]);
        PointCloudSet::new(points, Norm::Lp { p: f64::INFINITY, dim }, format!("sigma(J={dim})"))
            .expect("sigma set is well formed")
    }
}

pub fn sigma_set(truncation: usize) -> Result<PointCloudSet> {
    Ok(SigmaExampleSet::new(truncation)?.to_point_cloud())
}

/// Uniform discretization `{i/(m−1)}` of `[0,1]` under `ℓ∞` on `ℝ`.
pub fn interval_grid(nodes: usize) -> Result<PointCloudSet> {
    if nodes < 1 {
        return input("interval grid needs at least one node");
    }
    let points = if nodes == 1 { vec![vec![0.0]] } else { uniform_nodes(nodes).into_iter().map(|t| vec![t]).collect() };
    PointCloudSet::new(points, Norm::linf(1)?, format!("interval[0,1] ({nodes} nodes)"))
}

/// Embedding constant `c₀` of `C([0,1]^d)` into the ambient Banach space.
/// Every bound scales linearly in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EmbeddingConstant(pub f64);

impl Default for EmbeddingConstant {
    fn default() -> Self {
        EmbeddingConstant(1.0)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum Exponent {
    Finite(f64),
    Named(String),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum NormRepr {
    Lp { p: Exponent, dim: usize },
    SupGrid { axes: Vec<Vec<f64>> },
}

impl NormRepr {
    fn into_norm(self) -> Result<Norm> {
        match self {
            NormRepr::Lp { p: Exponent::Finite(p), dim } => Norm::lp(p, dim),
            NormRepr::Lp { p: Exponent::Named(s), dim } => match s.as_str() {
                "inf" | "infinity" | "Infinity" => Norm::linf(dim),
                other => input(format!("unknown norm exponent {other:?}")),
            },
            NormRepr::SupGrid { axes } => Norm::sup_grid(axes),
        }
    }
}

impl From<&Norm> for NormRepr {
    fn from(n: &Norm) -> Self {
        match n {
            Norm::Lp { p, dim } if p.is_infinite() => {
                NormRepr::Lp { p: Exponent::Named("inf".into()), dim: *dim }
            }
            Norm::Lp { p, dim } => NormRepr::Lp { p: Exponent::Finite(*p), dim: *dim },
            Norm::SupGrid { axes } => NormRepr::SupGrid { axes: axes.clone() },
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PointCloudRepr {
    norm: NormRepr,
    points: Vec<Vec<f64>>,
    #[serde(default)]
    label: String,
}

impl From<&PointCloudSet> for PointCloudRepr {
    fn from(s: &PointCloudSet) -> Self {
        PointCloudRepr { norm: (&s.norm).into(), points: s.points.clone(), label: s.label.clone() }
    }
}

impl Serialize for Norm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NormRepr::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Norm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        NormRepr::deserialize(d)?.into_norm().map_err(serde::de::Error::custom)
    }
}
