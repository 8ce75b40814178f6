//! Hat-function iterates, Takagi-class sums `ψ_n = Σ c_k H^{∘k}` and a
//! mixed ReLU/identity network computing `ψ_n` exactly.

use crate::error::{domain, input, Result};
use crate::network::{Activation, ActivationSpec, AffineLayer, FeedForwardNet};
use serde::{Deserialize, Serialize};

/// `H(t) = 2(t)₊ − 4(t−½)₊`.
#[inline]
pub fn hat(t: f64) -> f64 {
    2.0 * t.max(0.0) - 4.0 * (t - 0.5).max(0.0)
}

/// `H^{∘k}(t)`; `k = 0` is the identity.
pub fn hat_iterate(k: usize, t: f64) -> f64 {
    (0..k).fold(t, |g, _| hat(g))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TakagiSpec {
    coefficients: Vec<f64>,
    lambda: Option<f64>,
}

impl TakagiSpec {
    pub fn from_coefficients(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.iter().any(|c| !c.is_finite()) {
            return input("Takagi coefficients must be finite");
        }
        Ok(TakagiSpec { coefficients, lambda: None })
    }

    /// `c_k = λ^{−k}` for `k = 1..n`.
    pub fn from_lambda(lambda: f64, n: usize) -> Result<Self> {
        if !(lambda.abs() > 1.0) || !lambda.is_finite() {
            return domain(format!("|lambda| must exceed 1, got {lambda}"));
        }
        let coefficients = (1..=n).map(|k| lambda.powi(-(k as i32))).collect();
        Ok(TakagiSpec { coefficients, lambda: Some(lambda) })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    pub fn terms(&self) -> usize {
        self.coefficients.len()
    }

    pub fn abs_sum(&self) -> f64 {
        self.coefficients.iter().map(|c| c.abs()).sum()
    }

    /// `Σ|c_k| ≤ 1`.
    pub fn in_class(&self) -> bool {
        self.abs_sum() <= 1.0
    }
}

/// `ψ_n(t) = Σ_{k=1}^n c_k H^{∘k}(t)`.
pub fn psi(spec: &TakagiSpec, t: f64) -> f64 {
    let mut g = t;
    let mut sum = 0.0;
    for c in &spec.coefficients {
        g = hat(g);
        sum += c * g;
    }
    sum
}

/// `Σ_{k>n} |λ|^{−k} = |λ|^{−n}/(|λ|−1)`.
pub fn tail_bound(lambda: f64, n: usize) -> Result<f64> {
    let a = lambda.abs();
    if !(a > 1.0) {
        return domain(format!("|lambda| must exceed 1, got {lambda}"));
    }
    if a.is_infinite() {
        return Ok(0.0);
    }
    Ok(a.powi(-(n as i32)) / (a - 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TakagiNetwork {
    pub net: FeedForwardNet,
    /// `max(4, largest absolute parameter)`.
    pub param_bound: f64,
}

/// Width-3, depth-`n` network with `evaluate(t) = ψ_n(t)` on `[0,1]`.
///
/// Channels are `(g)₊`, `(g−½)₊` (ReLU) and a running sum (identity), where
/// `g = H^{∘(j−1)}(t)` after layer `j−1`, so `2(g)₊ − 4(g−½)₊ = H^{∘j}(t)`.
pub fn build_takagi_network(spec: &TakagiSpec) -> Result<TakagiNetwork> {
    let n = spec.terms();
    if n == 0 {
        return input("a Takagi network needs at least one term");
    }
    let c = spec.coefficients();
    let mut layers = Vec::with_capacity(n + 1);
    layers.push(AffineLayer::new(vec![vec![1.0], vec![1.0], vec![0.0]], vec![0.0, -0.5, 0.0])?);
    for &cj in &c[..n - 1] {
        layers.push(AffineLayer::new(
            vec![vec![2.0, -4.0, 0.0], vec![2.0, -4.0, 0.0], vec![2.0 * cj, -4.0 * cj, 1.0]],
            vec![0.0, -0.5, 0.0],
        )?);
    }
    let cn = c[n - 1];
    layers.push(AffineLayer::new(vec![vec![2.0 * cn, -4.0 * cn, 1.0]], vec![0.0])?);
    let param_bound = layers.iter().fold(4.0f64, |m, l| m.max(l.max_abs()));
    let row = vec![Activation::Relu, Activation::Relu, Activation::Identity];
    let net = FeedForwardNet::new(layers, ActivationSpec::PerChannel(vec![row; n]), param_bound)?;
    Ok(TakagiNetwork { net, param_bound })
}

/// `max_t Σ_{k≤m} H^{∘k}(t)` over `nodes`: the `ℓ∞ → sup` Lipschitz constant
/// of `y ↦ Σ y_k H^{∘k}` on those nodes.
pub fn coefficient_lipschitz(m: usize, nodes: &[f64]) -> f64 {
    nodes
        .iter()
        .map(|&t| {
            let mut g = t;
            (0..m).map(|_| {
                g = hat(g);
                g
            })
            .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::uniform_nodes;

    #[test]
    fn hat_examples() {
        assert_eq!(hat(0.5), 1.0);
        assert_eq!(hat(0.0), 0.0);
        assert_eq!(hat(1.0), 0.0);
        assert_eq!(hat(0.75), 0.5);
    }

    #[test]
    fn iterate_examples() {
        assert_eq!(hat_iterate(2, 0.25), 1.0);
        assert_eq!(hat_iterate(2, 0.5), 0.0);
        for k in 0..30 {
            assert_eq!(hat_iterate(k, 0.0), 0.0);
        }
        assert_eq!(hat_iterate(0, 0.3), 0.3);
    }

    #[test]
    fn iterate_has_expected_teeth() {
        let nodes = uniform_nodes(4097);
        for k in 1..=6 {
            let peaks = nodes.iter().filter(|&&t| hat_iterate(k, t) == 1.0).count();
            assert_eq!(peaks, 1 << (k - 1));
        }
    }

    #[test]
    fn psi_examples() {
        let s = TakagiSpec::from_lambda(4.0, 20).unwrap();
        assert!((psi(&s, 0.5) - 0.25).abs() <= tail_bound(4.0, 20).unwrap());
        let z = TakagiSpec::from_coefficients(vec![0.0; 5]).unwrap();
        assert_eq!(psi(&z, 0.3), 0.0);
        let s = TakagiSpec::from_lambda(2.0, 1).unwrap();
        assert_eq!(psi(&s, 0.25), 0.25);
    }

    #[test]
    fn tail_examples() {
        assert_eq!(tail_bound(2.0, 3).unwrap(), 0.125);
        assert_eq!(tail_bound(4.0, 2).unwrap(), 1.0 / 48.0);
        assert!(tail_bound(1e300, 2).unwrap() < 1e-300);
        assert_eq!(tail_bound(f64::INFINITY, 2).unwrap(), 0.0);
        assert!(tail_bound(1.0, 2).is_err());
        assert!(tail_bound(-0.5, 2).is_err());
        assert_eq!(tail_bound(-2.0, 3).unwrap(), 0.125);
    }

    #[test]
    fn spec_flags() {
        let s = TakagiSpec::from_lambda(2.0, 10).unwrap();
        assert!(s.in_class());
        assert!(!TakagiSpec::from_coefficients(vec![0.7, 0.7]).unwrap().in_class());
        assert!(TakagiSpec::from_lambda(0.5, 3).is_err());
    }

    #[test]
    fn network_realizes_hat() {
        let s = TakagiSpec::from_coefficients(vec![1.0]).unwrap();
        let t = build_takagi_network(&s).unwrap();
        for x in uniform_nodes(4097) {
            assert!((t.net.evaluate(&[x]).unwrap() - hat(x)).abs() < 1e-12);
        }
        let z = build_takagi_network(&TakagiSpec::from_coefficients(vec![0.0; 4]).unwrap()).unwrap();
        assert!(uniform_nodes(257).iter().all(|&x| z.net.evaluate(&[x]).unwrap() == 0.0));
    }

    #[test]
    fn network_matches_psi() {
        let nodes = uniform_nodes(4097);
        for lambda in [2.0, 4.0, -3.0] {
            for n in [1, 2, 5, 10] {
                let s = TakagiSpec::from_lambda(lambda, n).unwrap();
                let t = build_takagi_network(&s).unwrap();
                assert_eq!(t.net.layout().depth, n);
                assert_eq!(t.param_bound, 4.0);
                let err = nodes.iter().map(|&x| (t.net.evaluate(&[x]).unwrap() - psi(&s, x)).abs()).fold(0.0, f64::max);
                assert!(err < 1e-10);
            }
        }
    }

    #[test]
    fn coefficient_constant_three_terms() {
        assert_eq!(coefficient_lipschitz(3, &uniform_nodes(4097)), 2.25);
        assert_eq!(coefficient_lipschitz(1, &uniform_nodes(3)), 1.0);
    }
}
