//! Deep and shallow feed-forward networks as parameter-to-function maps.
//!
//! A network of input dimension `d`, width `W` and depth `n` is
//! `A⁽ⁿ⁾ ∘ σ̄ ∘ A⁽ⁿ⁻¹⁾ ∘ … ∘ σ̄ ∘ A⁽⁰⁾` with `A⁽⁰⁾: ℝ^d → ℝ^W`,
//! `A⁽ʲ⁾: ℝ^W → ℝ^W` and `A⁽ⁿ⁾: ℝ^W → ℝ`. The activation `σ̄` acts channel by
//! channel and may differ per channel and per layer.
//!
//! Parameters are flattened layer by layer, `A⁽⁰⁾` first; within a layer the
//! matrix entries come row-major, followed by the bias.

use crate::error::{input, Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Activation {
    Relu,
    Identity,
    /// `tanh`, carrying the Lipschitz constant used by the bounds.
    Sigmoidal {
        #[serde(rename = "L")]
        lipschitz: f64,
    },
}

impl Activation {
    /// Sigmoidal activation with claimed Lipschitz constant `lipschitz`.
    ///
    /// The concrete function is `tanh`; the claim `|σ| ≤ 1` and
    /// `|σ(s) − σ(t)| ≤ L|s − t|` is checked on a dense sample.
    pub fn sigmoidal(lipschitz: f64) -> Result<Self> {
        if !(lipschitz > 0.0) || !lipschitz.is_finite() {
            return input("sigmoidal Lipschitz constant must be positive");
        }
        let step = 1e-3;
        let mut prev_t = -20.0f64;
        let mut prev = prev_t.tanh();
        let mut t = prev_t + step;
        while t <= 20.0 {
            let v = t.tanh();
            if v.abs() > 1.0 || (v - prev).abs() > lipschitz * (t - prev_t) * (1.0 + 1e-12) {
                return Err(Error::Domain(format!(
                    "tanh is not {lipschitz}-Lipschitz (violated near t = {t})"
                )));
            }
            prev_t = t;
            prev = v;
            t += step;
        }
        Ok(Activation::Sigmoidal { lipschitz })
    }

    #[inline]
    pub fn apply(self, t: f64) -> f64 {
        match self {
            Activation::Relu => t.max(0.0),
            Activation::Identity => t,
            Activation::Sigmoidal { .. } => t.tanh(),
        }
    }

    pub fn lipschitz(self) -> f64 {
        match self {
            Activation::Relu | Activation::Identity => 1.0,
            Activation::Sigmoidal { lipschitz } => lipschitz,
        }
    }

    pub fn is_bounded(self) -> bool {
        matches!(self, Activation::Sigmoidal { .. })
    }
}

/// `x ↦ Mx + b`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffineLayer {
    matrix: Vec<Vec<f64>>,
    bias: Vec<f64>,
}

impl AffineLayer {
    pub fn new(matrix: Vec<Vec<f64>>, bias: Vec<f64>) -> Result<Self> {
        if matrix.len() != bias.len() {
            return input(format!("{} matrix rows but {} bias entries", matrix.len(), bias.len()));
        }
        if matrix.is_empty() {
            return input("affine layer needs at least one row");
        }
        let cols = matrix[0].len();
        if cols == 0 || matrix.iter().any(|r| r.len() != cols) {
            return input("affine layer matrix rows must share a positive length");
        }
        Ok(AffineLayer { matrix, bias })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        AffineLayer { matrix: vec![vec![0.0; cols]; rows], bias: vec![0.0; rows] }
    }

    pub fn rows(&self) -> usize {
        self.matrix.len()
    }

    pub fn cols(&self) -> usize {
        self.matrix[0].len()
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix
            .iter()
            .zip(&self.bias)
            .map(|(row, b)| row.iter().zip(x).fold(*b, |acc, (w, v)| acc + w * v))
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix
            .iter()
            .flatten()
            .chain(&self.bias)
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    fn scaled(&self, lambda: f64) -> Self {
        AffineLayer {
            matrix: self.matrix.iter().map(|r| r.iter().map(|v| v * lambda).collect()).collect(),
            bias: self.bias.iter().map(|v| v * lambda).collect(),
        }
    }
}

/// Shape of a network: `d → W → … → W → 1` with `n` activation layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub input_dim: usize,
    pub width: usize,
    pub depth: usize,
}

impl Layout {
    pub fn new(input_dim: usize, width: usize, depth: usize) -> Result<Self> {
        if input_dim == 0 || width == 0 || depth == 0 {
            return input("layout needs d, W, n >= 1");
        }
        Ok(Layout { input_dim, width, depth })
    }

    /// `(rows, cols)` of `A⁽⁰⁾, …, A⁽ⁿ⁾`.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut shapes = Vec::with_capacity(self.depth + 1);
        shapes.push((self.width, self.input_dim));
        for _ in 1..self.depth {
            shapes.push((self.width, self.width));
        }
        shapes.push((1, self.width));
        shapes
    }

    /// Exact parameter count `ñ`.
    pub fn param_count(&self) -> usize {
        self.layer_shapes().iter().map(|(r, c)| r * c + r).sum()
    }
}

/// Activation assignment for every hidden channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ActivationSpec {
    Uniform(Activation),
    /// `depth` rows of `width` activations each.
    PerChannel(Vec<Vec<Activation>>),
}

impl ActivationSpec {
    fn expand(&self, layout: &Layout) -> Result<Vec<Vec<Activation>>> {
        match self {
            ActivationSpec::Uniform(a) => Ok(vec![vec![*a; layout.width]; layout.depth]),
            ActivationSpec::PerChannel(rows) => {
                if rows.len() != layout.depth || rows.iter().any(|r| r.len() != layout.width) {
                    return input(format!(
                        "per-channel activations must be {} rows of {}",
                        layout.depth, layout.width
                    ));
                }
                Ok(rows.clone())
            }
        }
    }
}

/// Flattened parameter vector `y ∈ B_{ℓ∞}(w)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamVector {
    values: Vec<f64>,
    bound: f64,
    layout: Layout,
}

impl ParamVector {
    pub fn new(values: Vec<f64>, bound: f64, layout: Layout) -> Result<Self> {
        if !(bound > 0.0) {
            return input("parameter bound must be positive");
        }
        if values.len() != layout.param_count() {
            return input(format!(
                "layout {:?} needs {} parameters, got {}",
                layout,
                layout.param_count(),
                values.len()
            ));
        }
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(v.abs() <= bound)) {
            return input(format!("parameter {i} = {v} exceeds bound {bound}"));
        }
        Ok(ParamVector { values, bound, layout })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn bound(&self) -> f64 {
        self.bound
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }
}

/// Forward-pass result with the out-of-domain flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub value: f64,
    /// Input was outside `Ω = [0,1]^d`.
    pub outside_domain: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeedForwardNet {
    layout: Layout,
    layers: Vec<AffineLayer>,
    activations: Vec<Vec<Activation>>,
    param_bound: f64,
}

impl FeedForwardNet {
    /// Builds a network from its affine layers `A⁽⁰⁾..A⁽ⁿ⁾`.
    ///
    /// `param_bound` is the declared `w`; every entry must satisfy `|entry| ≤ w`.
    pub fn new(layers: Vec<AffineLayer>, activations: ActivationSpec, param_bound: f64) -> Result<Self> {
        if layers.len() < 2 {
            return input("a network needs at least A(0) and A(1)");
        }
        let layout = Layout::new(layers[0].cols(), layers[0].rows(), layers.len() - 1)?;
        for (l, (layer, (rows, cols))) in layers.iter().zip(layout.layer_shapes()).enumerate() {
            if layer.rows() != rows || layer.cols() != cols {
                return input(format!(
                    "layer {l} is {}x{}, expected {rows}x{cols}",
                    layer.rows(),
                    layer.cols()
                ));
            }
        }
        let activations = activations.expand(&layout)?;
        let net = FeedForwardNet { layout, layers, activations, param_bound };
        let max = net.max_abs_param();
        if !(max <= param_bound) {
            return input(format!("max |parameter| = {max} exceeds declared bound {param_bound}"));
        }
        Ok(net)
    }

    pub fn zeros(layout: Layout, act: Activation, param_bound: f64) -> Result<Self> {
        let layers = layout.layer_shapes().into_iter().map(|(r, c)| AffineLayer::zeros(r, c)).collect();
        Self::new(layers, ActivationSpec::Uniform(act), param_bound)
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn layers(&self) -> &[AffineLayer] {
        &self.layers
    }

    pub fn activations(&self) -> &[Vec<Activation>] {
        &self.activations
    }

    pub fn param_bound(&self) -> f64 {
        self.param_bound
    }

    pub fn max_abs_param(&self) -> f64 {
        self.layers.iter().fold(0.0, |m, l| m.max(l.max_abs()))
    }

    pub fn flatten(&self) -> ParamVector {
        let mut values = Vec::with_capacity(self.layout.param_count());
        for layer in &self.layers {
            for row in &layer.matrix {
                values.extend_from_slice(row);
            }
            values.extend_from_slice(&layer.bias);
        }
        ParamVector { values, bound: self.param_bound, layout: self.layout }
    }

    pub fn unflatten(y: &ParamVector, activations: &ActivationSpec) -> Result<Self> {
        let layout = y.layout;
        if y.values.len() != layout.param_count() {
            return input("parameter vector length does not match its layout");
        }
        let mut cursor = y.values.iter().copied();
        let mut layers = Vec::with_capacity(layout.depth + 1);
        for (rows, cols) in layout.layer_shapes() {
            let matrix = (0..rows).map(|_| cursor.by_ref().take(cols).collect()).collect();
            let bias = cursor.by_ref().take(rows).collect();
            layers.push(AffineLayer { matrix, bias });
        }
        Self::new(layers, activations.clone(), y.bound)
    }

    /// Builds the network for raw parameters `values` of the given layout.
    pub fn from_params(layout: Layout, values: Vec<f64>, bound: f64, activations: &ActivationSpec) -> Result<Self> {
        Self::unflatten(&ParamVector::new(values, bound, layout)?, activations)
    }

    /// Exact forward pass.
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        Ok(self.evaluate_flagged(x)?.value)
    }

    pub fn evaluate_flagged(&self, x: &[f64]) -> Result<Evaluation> {
        if x.len() != self.layout.input_dim {
            return input(format!("input has dimension {}, network expects {}", x.len(), self.layout.input_dim));
        }
        let outside_domain = x.iter().any(|t| !(0.0..=1.0).contains(t));
        let mut state = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            state = layer.apply(&state);
            if let Some(acts) = self.activations.get(l) {
                for (v, a) in state.iter_mut().zip(acts) {
                    *v = a.apply(*v);
                }
            }
            if state.iter().any(|v| !v.is_finite()) {
                return Err(Error::Numeric { layer: l, message: "non-finite value".into() });
            }
        }
        Ok(Evaluation { value: state[0], outside_domain })
    }

    /// Activated hidden states `σ̄(A⁽ʲ⁾ …)` for `j = 0..n−1`.
    pub fn hidden_states(&self, x: &[f64]) -> Result<Vec<Vec<f64>>> {
        if x.len() != self.layout.input_dim {
            return input("input dimension mismatch");
        }
        let mut out = Vec::with_capacity(self.layout.depth);
        let mut state = x.to_vec();
        for (l, acts) in self.activations.iter().enumerate() {
            state = self.layers[l].apply(&state);
            for (v, a) in state.iter_mut().zip(acts) {
                *v = a.apply(*v);
            }
            out.push(state.clone());
        }
        Ok(out)
    }

    /// Same network with `A⁽ⁿ⁾` (matrix and bias) multiplied by `lambda`.
    pub fn scale_output(&self, lambda: f64) -> Result<Self> {
        let mut layers = self.layers.clone();
        let last = layers.len() - 1;
        layers[last] = layers[last].scaled(lambda);
        let bound = self.param_bound.max(layers[last].max_abs());
        Self::new(layers, ActivationSpec::PerChannel(self.activations.clone()), bound)
    }

    /// Values on `nodes`, in order.
    pub fn values_on(&self, nodes: &[Vec<f64>]) -> Result<Vec<f64>> {
        nodes.iter().map(|x| self.evaluate(x)).collect()
    }

    pub fn to_json(&self) -> String {
        crate::fmt::to_json_string(&NetRepr::from(self)).expect("networks serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: NetRepr =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("bad network json: {e}")))?;
        let net = FeedForwardNet::new(repr.layers, repr.activation, repr.param_bound)?;
        let l = net.layout;
        if (l.input_dim, l.width, l.depth) != (repr.d, repr.w, repr.n) {
            return input("network header (d, W, n) disagrees with the layer shapes");
        }
        Ok(net)
    }
}

#[derive(Serialize, Deserialize)]
struct NetRepr {
    d: usize,
    #[serde(rename = "W")]
    w: usize,
    n: usize,
    activation: ActivationSpec,
    layers: Vec<AffineLayer>,
    param_bound: f64,
}

impl From<&FeedForwardNet> for NetRepr {
    fn from(net: &FeedForwardNet) -> Self {
        let first = net.activations[0][0];
        let uniform = net.activations.iter().flatten().all(|a| *a == first);
        NetRepr {
            d: net.layout.input_dim,
            w: net.layout.width,
            n: net.layout.depth,
            activation: if uniform {
                ActivationSpec::Uniform(first)
            } else {
                ActivationSpec::PerChannel(net.activations.clone())
            },
            layers: net.layers.clone(),
            param_bound: net.param_bound,
        }
    }
}

/// One-hidden-layer network `A⁽¹⁾ ∘ σ̄ ∘ A⁽⁰⁾` of width `width`.
pub fn evaluate_shallow(
    width: usize,
    inner: &AffineLayer,
    outer: &AffineLayer,
    act: Activation,
    x: &[f64],
) -> Result<f64> {
    if inner.rows() != width || outer.cols() != width || outer.rows() != 1 {
        return input(format!("shallow layers do not have width {width}"));
    }
    if x.len() != inner.cols() {
        return input("input dimension mismatch");
    }
    let hidden: Vec<f64> = inner.apply(x).into_iter().map(|v| act.apply(v)).collect();
    if hidden.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric { layer: 0, message: "non-finite value".into() });
    }
    let out = outer.apply(&hidden)[0];
    if !out.is_finite() {
        return Err(Error::Numeric { layer: 1, message: "non-finite value".into() });
    }
    Ok(out)
}

/// Sampled sup distance `max_x |a(x) − b(x)|` over `nodes`.
pub fn sup_distance(a: &FeedForwardNet, b: &FeedForwardNet, nodes: &[Vec<f64>]) -> Result<f64> {
    let mut best = 0.0f64;
    for x in nodes {
        best = best.max((a.evaluate(x)? - b.evaluate(x)?).abs());
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{tensor_nodes, uniform_nodes};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn hat_net() -> FeedForwardNet {
        FeedForwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1.0], vec![1.0]], vec![0.0, -0.5]).unwrap(),
                AffineLayer::new(vec![vec![2.0, -4.0]], vec![0.0]).unwrap(),
            ],
            ActivationSpec::Uniform(Activation::Relu),
            4.0,
        )
        .unwrap()
    }

    fn random_net(rng: &mut ChaCha8Rng, layout: Layout, w: f64, act: &ActivationSpec) -> FeedForwardNet {
        let vals = (0..layout.param_count()).map(|_| rng.gen_range(-w..=w)).collect();
        FeedForwardNet::from_params(layout, vals, w, act).unwrap()
    }

    #[test]
    fn flatten_order_and_length() {
        let layout = Layout::new(1, 2, 1).unwrap();
        assert_eq!(layout.param_count(), 7);
        let net = FeedForwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1.0], vec![2.0]], vec![3.0, 4.0]).unwrap(),
                AffineLayer::new(vec![vec![5.0, 6.0]], vec![7.0]).unwrap(),
            ],
            ActivationSpec::Uniform(Activation::Identity),
            7.0,
        )
        .unwrap();
        assert_eq!(net.flatten().values(), &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]);
        let zero = FeedForwardNet::zeros(Layout::new(2, 3, 4).unwrap(), Activation::Relu, 1.0).unwrap();
        assert!(zero.flatten().values().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn flatten_unflatten_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let act = ActivationSpec::Uniform(Activation::Relu);
        for _ in 0..100 {
            let layout = Layout::new(rng.gen_range(1..4), rng.gen_range(1..5), rng.gen_range(1..5)).unwrap();
            let vals: Vec<f64> = (0..layout.param_count()).map(|_| rng.gen_range(-2.0..=2.0)).collect();
            let y = ParamVector::new(vals, 2.0, layout).unwrap();
            let net = FeedForwardNet::unflatten(&y, &act).unwrap();
            assert_eq!(net.flatten(), y);
            assert_eq!(FeedForwardNet::unflatten(&net.flatten(), &act).unwrap(), net);
        }
    }

    #[test]
    fn unflatten_contracts() {
        let layout = Layout::new(1, 2, 1).unwrap();
        let act = ActivationSpec::Uniform(Activation::Relu);
        let net = FeedForwardNet::unflatten(&ParamVector::new(vec![0.0; 7], 1.0, layout).unwrap(), &act).unwrap();
        for t in [0.0, 0.3, 1.0, 5.0] {
            assert_eq!(net.evaluate(&[t]).unwrap(), 0.0);
        }
        assert!(ParamVector::new(vec![0.0; 6], 1.0, layout).is_err());
        let mut vals = vec![0.0; 7];
        vals[3] = 1.5;
        assert!(matches!(ParamVector::new(vals, 1.0, layout), Err(Error::Input(_))));
    }

    #[test]
    fn evaluates_hat() {
        let net = hat_net();
        assert_eq!(net.evaluate(&[0.25]).unwrap(), 0.5);
        assert_eq!(net.evaluate(&[0.5]).unwrap(), 1.0);
        assert_eq!(net.evaluate(&[1.0]).unwrap(), 0.0);
        let e = net.evaluate_flagged(&[1.5]).unwrap();
        assert!(e.outside_domain);
        assert!(!net.evaluate_flagged(&[0.5]).unwrap().outside_domain);
    }

    #[test]
    fn identity_depth_one_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let layout = Layout::new(3, 4, 1).unwrap();
        let net = random_net(&mut rng, layout, 1.0, &ActivationSpec::Uniform(Activation::Identity));
        let (a0, a1) = (&net.layers()[0], &net.layers()[1]);
        // collapse A1 A0 into a single affine map
        let m: Vec<f64> = (0..3)
            .map(|c| (0..4).map(|r| a1.matrix()[0][r] * a0.matrix()[r][c]).sum())
            .collect();
        let b: f64 = a1.bias()[0] + (0..4).map(|r| a1.matrix()[0][r] * a0.bias()[r]).sum::<f64>();
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..1.0)).collect();
            let direct = b + m.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>();
            assert!((net.evaluate(&x).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn shallow_matches_depth_one_net() {
        let inner = AffineLayer::new(vec![vec![1.0]], vec![0.0]).unwrap();
        let outer = AffineLayer::new(vec![vec![1.0]], vec![0.0]).unwrap();
        assert_eq!(evaluate_shallow(1, &inner, &outer, Activation::Relu, &[-1.0]).unwrap(), 0.0);
        assert_eq!(evaluate_shallow(1, &inner, &outer, Activation::Relu, &[0.5]).unwrap(), 0.5);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for act in [Activation::Relu, Activation::sigmoidal(1.0).unwrap()] {
            let net = random_net(&mut rng, Layout::new(2, 5, 1).unwrap(), 2.0, &ActivationSpec::Uniform(act));
            for _ in 0..50 {
                let x = [rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0)];
                let s = evaluate_shallow(5, &net.layers()[0], &net.layers()[1], act, &x).unwrap();
                assert_eq!(s, net.evaluate(&x).unwrap());
            }
        }
    }

    #[test]
    fn non_finite_reports_layer() {
        let net = FeedForwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1e308], vec![1e308]], vec![0.0, 0.0]).unwrap(),
                AffineLayer::new(vec![vec![1e308, 1e308]], vec![0.0]).unwrap(),
                AffineLayer::new(vec![vec![1e308, 1e308]], vec![0.0]).unwrap(),
            ],
            ActivationSpec::Uniform(Activation::Identity),
            1e308,
        );
        // shape error: middle layer must be 2x2
        assert!(net.is_err());
        let net = FeedForwardNet::new(
            vec![
                AffineLayer::new(vec![vec![1e308], vec![1e308]], vec![0.0, 0.0]).unwrap(),
                AffineLayer::new(vec![vec![1e308, 1e308]], vec![0.0]).unwrap(),
            ],
            ActivationSpec::Uniform(Activation::Identity),
            1e308,
        )
        .unwrap();
        assert_eq!(net.evaluate(&[1.0]), Err(Error::Numeric { layer: 1, message: "non-finite value".into() }));
    }

    #[test]
    fn sigmoidal_claims_checked() {
        assert!(Activation::sigmoidal(1.0).is_ok());
        assert!(Activation::sigmoidal(2.5).is_ok());
        assert!(matches!(Activation::sigmoidal(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn sigmoidal_hidden_values_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let act = ActivationSpec::Uniform(Activation::sigmoidal(1.0).unwrap());
        for _ in 0..20 {
            let net = random_net(&mut rng, Layout::new(2, 4, 3).unwrap(), 3.0, &act);
            for x in tensor_nodes(&[uniform_nodes(9), uniform_nodes(9)]) {
                for h in net.hidden_states(&x).unwrap() {
                    assert!(h.iter().all(|v| v.abs() <= 1.0));
                }
            }
        }
    }

    #[test]
    fn relu_hidden_growth_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for width in 2..=4 {
            for w in [1.0, 1.5, 2.0] {
                let layout = Layout::new(1, width, 5).unwrap();
                let net = random_net(&mut rng, layout, w, &ActivationSpec::Uniform(Activation::Relu));
                let d = 1.0;
                for x in uniform_nodes(257) {
                    let states = net.hidden_states(&[x]).unwrap();
                    for (j, h) in states.iter().enumerate().take(5) {
                        let bound = (d + 2.0) * w * (width as f64 * w).powi(j as i32);
                        assert!(h.iter().all(|v| v.abs() <= bound));
                    }
                }
            }
        }
    }

    #[test]
    fn output_is_linear_in_last_layer() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let net = random_net(&mut rng, Layout::new(1, 3, 3).unwrap(), 1.0, &ActivationSpec::Uniform(Activation::Relu));
        let scaled = net.scale_output(-2.5).unwrap();
        for x in uniform_nodes(33) {
            let a = net.evaluate(&[x]).unwrap();
            assert!((scaled.evaluate(&[x]).unwrap() + 2.5 * a).abs() < 1e-12);
        }
    }

    #[test]
    fn json_roundtrip() {
        let net = hat_net();
        let back = FeedForwardNet::from_json(&net.to_json()).unwrap();
        assert_eq!(back, net);
        let mixed = FeedForwardNet::zeros(Layout::new(1, 2, 2).unwrap(), Activation::Relu, 1.0).unwrap();
        let mixed = FeedForwardNet::new(
            mixed.layers().to_vec(),
            ActivationSpec::PerChannel(vec![
                vec![Activation::Relu, Activation::Identity],
                vec![Activation::sigmoidal(1.0).unwrap(), Activation::Relu],
            ]),
            1.0,
        )
        .unwrap();
        let text = mixed.to_json();
        assert!(text.contains("\"W\":2"));
        assert_eq!(FeedForwardNet::from_json(&text).unwrap(), mixed);
    }
}
