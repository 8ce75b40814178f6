//! Certified Lipschitz constants of the parameter-to-function maps and a
//! sampled lower estimate.

use crate::carl::GrowthFunction;
use crate::error::{domain, input, Error, Result};
use crate::network::{Activation, ActivationSpec, FeedForwardNet, Layout};
use crate::spaces::EmbeddingConstant;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Growth of the parameter bound `w(n)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundFamily {
    /// `w(n) = C`
    Constant { c: f64 },
    /// `w(n) = C n^δ`
    Polynomial { c: f64, delta: f64 },
    /// `w(n) = C 2^{rate·n^ν}`
    Exponential { c: f64, rate: f64, nu: f64 },
}

impl BoundFamily {
    pub fn constant(c: f64) -> Result<Self> {
        Self::Constant { c }.validated()
    }

    pub fn polynomial(c: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) {
            return input("polynomial bound needs delta > 0");
        }
        Self::Polynomial { c, delta }.validated()
    }

    pub fn exponential(c: f64, rate: f64, nu: f64) -> Result<Self> {
        if !(rate > 0.0) || !(nu >= 0.0) {
            return input("exponential bound needs rate > 0 and nu >= 0");
        }
        Self::Exponential { c, rate, nu }.validated()
    }

    fn validated(self) -> Result<Self> {
        let (Self::Constant { c } | Self::Polynomial { c, .. } | Self::Exponential { c, .. }) = self;
        if !(c > 0.0) || !(self.eval(1.0) >= 1.0) {
            return input(format!("bound family must satisfy w(1) >= 1, got {}", self.eval(1.0)));
        }
        Ok(self)
    }

    pub fn eval(&self, n: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::Polynomial { c, delta } => c * n.powf(delta),
            Self::Exponential { c, rate, nu } => c * (rate * n.powf(nu)).exp2(),
        }
    }

    pub fn log2_eval(&self, n: f64) -> f64 {
        match *self {
            Self::Constant { c } => c.log2(),
            Self::Polynomial { c, delta } => c.log2() + delta * n.log2(),
            Self::Exponential { c, rate, nu } => c.log2() + rate * n.powf(nu),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    DeepSigmoidal,
    DeepRelu,
    ShallowSigmoidal,
    ShallowRelu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NetRegime {
    Deep,
    Shallow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActKind {
    Sigmoidal,
    Relu,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LipschitzCertificate {
    pub value: f64,
    /// `C_0..C_n` or `D_0..D_n`; a single entry for shallow bounds.
    pub recursion_trace: Vec<f64>,
    /// `None` when the closed form's hypothesis `LWw ≥ 2` fails.
    pub closed_form: Option<f64>,
    pub regime: Regime,
}

fn check_dims(d: usize, width: usize, n: usize) -> Result<()> {
    if d == 0 || width == 0 || n == 0 {
        return input("d, W and n must be at least 1");
    }
    Ok(())
}

/// `C_0 = L(d+1)`, `C_j = LWw·C_{j−1} + L(W+1)`.
pub fn deep_bound_sigmoidal(d: usize, width: usize, l: f64, w: f64, n: usize) -> Result<LipschitzCertificate> {
    check_dims(d, width, n)?;
    if !(l > 0.0) || !(w > 0.0) {
        return input("L and w must be positive");
    }
    let wf = width as f64;
    let a = l * wf * w;
    let b = l * (wf + 1.0);
    let mut trace = vec![l * (d as f64 + 1.0)];
    for j in 1..=n {
        trace.push(a * trace[j - 1] + b);
    }
    let closed_form = (a >= 2.0).then(|| 2.0 * l * (width.max(d) as f64 + 1.0) * a.powi(n as i32));
    Ok(LipschitzCertificate { value: trace[n], recursion_trace: trace, closed_form, regime: Regime::DeepSigmoidal })
}

/// `D_0 = d+1`, `D_j = Ww·D_{j−1} + (d+2)w(Ww)^j + 1`.
pub fn deep_bound_relu(d: usize, width: usize, w: f64, n: usize) -> Result<LipschitzCertificate> {
    check_dims(d, width, n)?;
    let a = width as f64 * w;
    if !(a >= 2.0) {
        return domain(format!("the ReLU bound assumes W w >= 2, got {a}"));
    }
    let df = d as f64;
    let mut trace = vec![df + 1.0];
    for j in 1..=n {
        trace.push(a * trace[j - 1] + (df + 2.0) * w * a.powi(j as i32) + 1.0);
    }
    let closed_form = Some((df + 2.0) * n as f64 * a.powi(n as i32 + 1));
    Ok(LipschitzCertificate { value: trace[n], recursion_trace: trace, closed_form, regime: Regime::DeepRelu })
}

/// One-hidden-layer bounds `c₀(L(d+1)+2L)Ww` and `3c₀(d+2)Ww²`.
pub fn shallow_bound(d: usize, width: usize, l: f64, w: f64, kind: ActKind, c0: EmbeddingConstant) -> Result<LipschitzCertificate> {
    check_dims(d, width, 1)?;
    if !(w >= 1.0) {
        return domain(format!("the shallow bound assumes w >= 1, got {w}"));
    }
    let (df, wf) = (d as f64, width as f64);
    let (value, regime) = match kind {
        ActKind::Sigmoidal => {
            if !(l > 0.0) {
                return input("L must be positive");
            }
            (c0.0 * (l * (df + 1.0) + 2.0 * l) * wf * w, Regime::ShallowSigmoidal)
        }
        ActKind::Relu => (3.0 * c0.0 * (df + 2.0) * wf * w * w, Regime::ShallowRelu),
    };
    Ok(LipschitzCertificate { value, recursion_trace: vec![value], closed_form: Some(value), regime })
}

/// Sampled lower estimate of the `ℓ∞ → C(Ω)` Lipschitz constant of
/// `y ↦ Φ(y)` over `B_{ℓ∞}(w)`, with `C(Ω)` replaced by the max over `grid`.
///
/// Half the pairs are independent uniform draws, half are local
/// perturbations of magnitude `≤ w/100`. Deterministic given `seed`.
pub fn empirical_lipschitz(
    layout: Layout,
    act: &ActivationSpec,
    w: f64,
    trials: usize,
    grid: &[Vec<f64>],
    seed: u64,
) -> Result<f64> {
    if trials == 0 {
        return input("empirical_lipschitz needs at least one trial");
    }
    if grid.is_empty() {
        return input("empirical_lipschitz needs a nonempty grid");
    }
    if !(w > 0.0) {
        return input("parameter bound must be positive");
    }
    let count = layout.param_count();
    let ratios: Vec<Result<Option<f64>>> = crate::parallel::install(|| {
        (0..trials)
            .into_par_iter()
            .map(|t| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (t as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
                let y: Vec<f64> = (0..count).map(|_| rng.gen_range(-w..=w)).collect();
                let z: Vec<f64> = if t % 2 == 0 {
                    (0..count).map(|_| rng.gen_range(-w..=w)).collect()
                } else {
                    let h = w / 100.0;
                    y.iter().map(|v| (v + rng.gen_range(-h..=h)).clamp(-w, w)).collect()
                };
                let dy = y.iter().zip(&z).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
                if dy == 0.0 {
                    return Ok(None);
                }
                let a = FeedForwardNet::from_params(layout, y, w, act)?;
                let b = FeedForwardNet::from_params(layout, z, w, act)?;
                Ok(Some(crate::network::sup_distance(&a, &b, grid)? / dy))
            })
            .collect()
    });
    let mut best: Option<f64> = None;
    for r in ratios {
        if let Some(v) = r? {
            best = Some(best.map_or(v, |b: f64| b.max(v)));
        }
    }
    best.ok_or_else(|| Error::Input("all sampled pairs were degenerate".into()))
}

/// The deep certificate matching a uniform activation.
pub fn deep_bound_for(d: usize, width: usize, act: Activation, w: f64, n: usize) -> Result<LipschitzCertificate> {
    match act {
        Activation::Relu | Activation::Identity => deep_bound_relu(d, width, w, n),
        Activation::Sigmoidal { lipschitz } => deep_bound_sigmoidal(d, width, lipschitz, w, n),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhiGamma {
    pub phi: f64,
    /// `2^φ`; infinite when it overflows.
    pub gamma: f64,
    /// Leading-order form of `φ`, as listed in the tables.
    pub asymptotic: GrowthFunction,
}

/// `φ(n) = cn(1+log₂w(n))` (deep) or `φ(W) = c(log₂W + log₂w(W))` (shallow).
pub fn phi_gamma_of(wfam: &BoundFamily, n: u64, regime: NetRegime, c: f64) -> Result<PhiGamma> {
    if n < 2 {
        return input("phi_gamma_of needs n >= 2");
    }
    if !(c > 0.0) {
        return input("the constant c must be positive");
    }
    let nf = n as f64;
    let (phi, asymptotic) = match regime {
        NetRegime::Deep => {
            let phi = c * nf * (1.0 + wfam.log2_eval(nf));
            let lead = match *wfam {
                BoundFamily::Constant { c: cw } => GrowthFunction::power(c * (1.0 + cw.log2()), 1.0, 0.0),
                BoundFamily::Polynomial { delta, .. } => GrowthFunction::power(c * delta, 1.0, 1.0),
                BoundFamily::Exponential { c: cw, rate, nu } if nu == 0.0 => {
                    GrowthFunction::power(c * (1.0 + cw.log2() + rate), 1.0, 0.0)
                }
                BoundFamily::Exponential { rate, nu, .. } => GrowthFunction::power(c * rate, nu + 1.0, 0.0),
            };
            (phi, lead)
        }
        NetRegime::Shallow => {
            let phi = c * (nf.log2() + wfam.log2_eval(nf));
            let lead = match *wfam {
                BoundFamily::Constant { .. } => GrowthFunction::power(c, 0.0, 1.0),
                BoundFamily::Polynomial { delta, .. } => GrowthFunction::power(c * (1.0 + delta), 0.0, 1.0),
                BoundFamily::Exponential { nu, .. } if nu == 0.0 => GrowthFunction::power(c, 0.0, 1.0),
                BoundFamily::Exponential { rate, nu, .. } => GrowthFunction::power(c * rate, nu, 0.0),
            };
            (phi, lead)
        }
    };
    Ok(PhiGamma { phi, gamma: phi.exp2(), asymptotic })
}

/// Smallest and largest `log₂(L)/(n(1+log₂w))` over the samples, widened by
/// 1%: `2^{c₁n(1+log₂w)} < L < 2^{c₂n(1+log₂w)}` on every sample.
pub fn fit_exponent_bracket(samples: &[(usize, f64, f64)]) -> Result<(f64, f64)> {
    if samples.is_empty() {
        return input("no samples to fit");
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &(n, w, l) in samples {
        let s = n as f64 * (1.0 + w.log2());
        if !(s > 0.0) || !(l > 1.0) {
            return domain("fit needs n(1+log2 w) > 0 and L > 1");
        }
        let r = l.log2() / s;
        lo = lo.min(r);
        hi = hi.max(r);
    }
    Ok((lo * 0.99, hi * 1.01))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::uniform_nodes;

    #[test]
    fn sigmoidal_examples() {
        let c = deep_bound_sigmoidal(1, 2, 1.0, 1.0, 1).unwrap();
        assert_eq!(c.recursion_trace, vec![2.0, 7.0]);
        let c = deep_bound_sigmoidal(1, 2, 1.0, 1.0, 3).unwrap();
        let (mut v, a, b) = (2.0, 2.0, 3.0);
        for _ in 0..3 {
            v = a * v + b;
        }
        assert_eq!(c.value, v);
        assert_eq!(c.value, 37.0);
        assert_eq!(c.closed_form, Some(48.0));
        for (j, pair) in c.recursion_trace.windows(2).enumerate() {
            assert_eq!(pair[1], a * pair[0] + b, "step {j}");
        }
        assert_eq!(deep_bound_sigmoidal(1, 1, 1.0, 1.0, 2).unwrap().closed_form, None);
    }

    #[test]
    fn relu_examples() {
        let c = deep_bound_relu(1, 2, 1.0, 2).unwrap();
        assert_eq!(c.recursion_trace, vec![2.0, 11.0, 35.0]);
        assert_eq!(c.closed_form, Some(48.0));
        assert!(matches!(deep_bound_relu(1, 1, 1.0, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn shallow_examples() {
        let c0 = EmbeddingConstant::default();
        assert_eq!(shallow_bound(1, 4, 1.0, 1.0, ActKind::Sigmoidal, c0).unwrap().value, 16.0);
        assert_eq!(shallow_bound(1, 4, 1.0, 1.0, ActKind::Relu, c0).unwrap().value, 36.0);
        let s = shallow_bound(1, 1, 1.0, 1.0, ActKind::Sigmoidal, c0).unwrap().value;
        let r = shallow_bound(1, 1, 1.0, 1.0, ActKind::Relu, c0).unwrap().value;
        assert!(r >= s);
        assert!(matches!(shallow_bound(1, 4, 1.0, 0.5, ActKind::Relu, c0), Err(Error::Domain(_))));
        assert_eq!(shallow_bound(1, 4, 1.0, 1.0, ActKind::Relu, EmbeddingConstant(2.0)).unwrap().value, 72.0);
    }

    #[test]
    fn bounds_monotone_in_every_argument() {
        let base = (2usize, 3usize, 1.0f64, 1.5f64, 3usize);
        let s = |d, wd, l, w, n| deep_bound_sigmoidal(d, wd, l, w, n).unwrap().value;
        let r = |d, wd, w, n| deep_bound_relu(d, wd, w, n).unwrap().value;
        let (d, wd, l, w, n) = base;
        assert!(s(d + 1, wd, l, w, n) >= s(d, wd, l, w, n));
        assert!(s(d, wd + 1, l, w, n) >= s(d, wd, l, w, n));
        assert!(s(d, wd, l + 0.5, w, n) >= s(d, wd, l, w, n));
        assert!(s(d, wd, l, w + 0.5, n) >= s(d, wd, l, w, n));
        assert!(s(d, wd, l, w, n + 1) >= s(d, wd, l, w, n));
        assert!(r(d + 1, wd, w, n) >= r(d, wd, w, n));
        assert!(r(d, wd + 1, w, n) >= r(d, wd, w, n));
        assert!(r(d, wd, w + 0.5, n) >= r(d, wd, w, n));
        assert!(r(d, wd, w, n + 1) >= r(d, wd, w, n));
    }

    #[test]
    fn recursion_below_closed_form_on_grid() {
        for d in 1..4 {
            for wd in 2..6 {
                for w in [1.0, 1.5, 2.0, 4.0] {
                    for n in 1..15 {
                        let c = deep_bound_relu(d, wd, w, n).unwrap();
                        assert!(c.value <= c.closed_form.unwrap());
                        assert!(c.recursion_trace.windows(2).all(|p| p[1] >= p[0]));
                        let c = deep_bound_sigmoidal(d, wd, 1.0, w, n).unwrap();
                        assert!(c.value <= c.closed_form.unwrap());
                        assert!(c.recursion_trace.windows(2).all(|p| p[1] >= p[0]));
                    }
                }
            }
        }
    }

    #[test]
    fn exponent_bracket_fits() {
        for regime in 0..2 {
            let mut samples = Vec::new();
            for n in 2..=20 {
                for w in [1.0, 2.0, 4.0] {
                    let v = if regime == 0 {
                        deep_bound_sigmoidal(1, 2, 1.0, w, n).unwrap().value
                    } else {
                        deep_bound_relu(1, 2, w, n).unwrap().value
                    };
                    samples.push((n, w, v));
                }
            }
            let (c1, c2) = fit_exponent_bracket(&samples).unwrap();
            assert!(c1 > 0.0 && c2 > c1);
            for (n, w, v) in samples {
                let s = n as f64 * (1.0 + w.log2());
                assert!((c1 * s).exp2() < v && v < (c2 * s).exp2());
            }
        }
    }

    #[test]
    fn identity_unit_empirical_below_analytic() {
        // Φ(y)(x) = a1 (a0 x + b0) + b1
        let layout = Layout::new(1, 1, 1).unwrap();
        let grid: Vec<Vec<f64>> = uniform_nodes(17).into_iter().map(|t| vec![t]).collect();
        let act = ActivationSpec::Uniform(Activation::Identity);
        let e = empirical_lipschitz(layout, &act, 1.0, 400, &grid, 7).unwrap();
        // gradient (a1 x, a1, a0 x + b0, 1) has ℓ1 norm at most 5 on the unit ball, attained at x = 1
        assert!(e <= 5.0);
        assert!(e > 0.5);
    }

    #[test]
    fn empirical_contracts() {
        let layout = Layout::new(1, 2, 1).unwrap();
        let grid = vec![vec![0.5]];
        let act = ActivationSpec::Uniform(Activation::Relu);
        assert!(matches!(empirical_lipschitz(layout, &act, 1.0, 0, &grid, 1), Err(Error::Input(_))));
        let a = empirical_lipschitz(layout, &act, 1.0, 50, &grid, 3).unwrap();
        let b = empirical_lipschitz(layout, &act, 1.0, 50, &grid, 3).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn phi_gamma_tables() {
        let c1 = BoundFamily::constant(1.0).unwrap();
        let p = phi_gamma_of(&c1, 10, NetRegime::Deep, 1.0).unwrap();
        assert_eq!(p.phi, 10.0);
        assert_eq!(p.gamma, 1024.0);
        assert_eq!(p.asymptotic, GrowthFunction::power(1.0, 1.0, 0.0));
        let poly = BoundFamily::polynomial(1.0, 2.0).unwrap();
        let p = phi_gamma_of(&poly, 8, NetRegime::Deep, 1.0).unwrap();
        assert_eq!(p.phi, 8.0 * (1.0 + 6.0));
        assert_eq!(p.asymptotic.as_power().map(|(_, p, q)| (p, q)), Some((1.0, 1.0)));
        let sp = phi_gamma_of(&poly, 8, NetRegime::Shallow, 1.0).unwrap();
        assert_eq!(sp.phi, 9.0);
        assert_eq!(sp.asymptotic.as_power().map(|(_, p, q)| (p, q)), Some((0.0, 1.0)));
        assert!(phi_gamma_of(&poly, 1, NetRegime::Deep, 1.0).is_err());
    }

    #[test]
    fn bound_family_checks() {
        assert!(BoundFamily::constant(0.5).is_err());
        assert!(BoundFamily::polynomial(1.0, 0.0).is_err());
        assert!(BoundFamily::exponential(0.25, 1.0, 1.0).is_err());
        assert!(BoundFamily::exponential(0.5, 1.0, 1.0).is_ok());
        let e = BoundFamily::exponential(1.0, 1.0, 1.0).unwrap();
        assert_eq!(e.eval(3.0), 8.0);
    }
}
