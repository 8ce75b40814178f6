//! Rate calculus: Carl-type index arithmetic and the implications between
//! entropy numbers, Lipschitz widths and network approximation rates.
//!
//! Every rate produced here is only determined up to a multiplicative
//! constant; such rates carry `scale = 1` and `up_to_constants = true`.

use crate::entropy::EntropyProfile;
use crate::error::{domain, input, Error, Result};
use crate::lipbounds::{phi_gamma_of, BoundFamily, NetRegime};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RateKind {
    /// `[log₂n]^β n^{−α}`
    PolyLog { alpha: f64, beta: f64 },
    /// `[log₂n]^{−α}`
    LogInv { alpha: f64 },
    /// `2^{−c n^a [log₂n]^b}`
    Expo { c: f64, a: f64, log_power: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFunction {
    pub kind: RateKind,
    pub scale: f64,
    pub up_to_constants: bool,
}

impl RateFunction {
    pub fn polylog(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0) || !beta.is_finite() {
            return input("polylog rate needs alpha > 0 and finite beta");
        }
        Ok(Self::exact(RateKind::PolyLog { alpha, beta }))
    }

    pub fn loginv(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return input("loginv rate needs alpha > 0");
        }
        Ok(Self::exact(RateKind::LogInv { alpha }))
    }

    pub fn expo(c: f64, a: f64) -> Result<Self> {
        Self::expo_log(c, a, 0.0)
    }

    /// `2^{−c n^a [log₂n]^b}`.
    pub fn expo_log(c: f64, a: f64, log_power: f64) -> Result<Self> {
        if !(c > 0.0) || !(a > 0.0 && a <= 1.0) || !log_power.is_finite() {
            return input("expo rate needs c > 0 and a in (0, 1]");
        }
        Ok(Self::exact(RateKind::Expo { c, a, log_power }))
    }

    fn exact(kind: RateKind) -> Self {
        RateFunction { kind, scale: 1.0, up_to_constants: false }
    }

    fn implied(kind: RateKind) -> Self {
        RateFunction { kind, scale: 1.0, up_to_constants: true }
    }

    pub fn with_scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    pub fn eval(&self, n: f64) -> f64 {
        let l = n.log2();
        self.scale
            * match self.kind {
                RateKind::PolyLog { alpha, beta } => l.powf(beta) * n.powf(-alpha),
                RateKind::LogInv { alpha } => l.powf(-alpha),
                RateKind::Expo { c, a, log_power } => (-c * n.powf(a) * l.powf(log_power)).exp2(),
            }
    }

    /// Point from which the rate is monotonically decreasing.
    ///
    /// For `t^{−α}[log₂t]^β` the derivative of the logarithm is
    /// `(β/ln t − α)/t`, so the threshold is `e^{β/α}`.
    pub fn monotone_from(&self) -> f64 {
        let n0 = match self.kind {
            RateKind::PolyLog { alpha, beta } if beta > 0.0 => (beta / alpha).exp(),
            RateKind::Expo { a, log_power, .. } if log_power < 0.0 => (-log_power / a).exp(),
            _ => 2.0,
        };
        n0.max(2.0)
    }

    /// Exponent and log-power of a polylog rate.
    pub fn polylog_exponents(&self) -> Option<(f64, f64)> {
        match self.kind {
            RateKind::PolyLog { alpha, beta } => Some((alpha, beta)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GrowthFunction {
    Const { c: f64 },
    Linear { c: f64 },
    NLogN { c: f64 },
    /// `c n^p [log₂n]^q`
    Power { c: f64, p: f64, q: f64 },
    /// `values[n]` for `n = 0, 1, …`.
    Tabulated { values: Vec<f64> },
}

impl GrowthFunction {
    pub fn power(c: f64, p: f64, q: f64) -> Self {
        GrowthFunction::Power { c, p, q }
    }

    /// `φ(n)`; tabulated functions are read at the nearest integer and give
    /// NaN outside their table.
    pub fn eval(&self, n: f64) -> f64 {
        match self {
            GrowthFunction::Const { c } => *c,
            GrowthFunction::Linear { c } => c * n,
            GrowthFunction::NLogN { c } => c * n * n.log2(),
            GrowthFunction::Power { c, p, q } => {
                if *q == 0.0 {
                    c * n.powf(*p)
                } else {
                    c * n.powf(*p) * n.log2().powf(*q)
                }
            }
            GrowthFunction::Tabulated { values } => {
                let i = n.round();
                if i < 0.0 || i as usize >= values.len() {
                    f64::NAN
                } else {
                    values[i as usize]
                }
            }
        }
    }

    /// `(c, p, q)` with `φ(n) = c n^p [log₂n]^q`, when the kind is a power.
    pub fn as_power(&self) -> Option<(f64, f64, f64)> {
        match self {
            GrowthFunction::Const { c } => Some((*c, 0.0, 0.0)),
            GrowthFunction::Linear { c } => Some((*c, 1.0, 0.0)),
            GrowthFunction::NLogN { c } => Some((*c, 1.0, 1.0)),
            GrowthFunction::Power { c, p, q } => Some((*c, *p, *q)),
            GrowthFunction::Tabulated { .. } => None,
        }
    }

    /// Whether `φ(n) ≥ c log₂n` for `n ≥ 2` with some `c > 0`.
    pub fn dominates_log(&self) -> bool {
        match self {
            GrowthFunction::Tabulated { values } => {
                values.len() > 2
                    && values.iter().enumerate().skip(2).all(|(n, v)| *v > 0.0 && (*v / (n as f64).log2()) > 0.0)
            }
            other => {
                let (c, p, q) = other.as_power().expect("power kinds");
                c > 0.0 && (p > 0.0 || q >= 1.0)
            }
        }
    }
}

/// `m log₂(3γ/δ)` and its ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CarlIndex {
    pub value: f64,
    pub index: i64,
    /// `δ ≥ 3γ`, so the index is not positive.
    pub degenerate: bool,
}

pub fn carl_index(m: usize, gamma: f64, delta: f64) -> Result<CarlIndex> {
    if m == 0 || !(gamma > 0.0) || !(delta > 0.0) {
        return input("carl index needs m >= 1 and gamma, delta > 0");
    }
    let value = m as f64 * (3.0 * gamma / delta).log2();
    Ok(CarlIndex { value, index: value.ceil() as i64, degenerate: delta >= 3.0 * gamma })
}

fn require_log_hypothesis(phi: &GrowthFunction) -> Result<()> {
    if !phi.dominates_log() {
        return domain("growth function does not satisfy phi(n) >= c log2 n");
    }
    Ok(())
}

/// Lower bound `[log₂(nφ(n))]^β [nφ(n)]^{−α}` (or `[log₂(nφ(n))]^{−α}`) for
/// `d_n^{γ_n}` given the entropy rate.
pub fn width_lower_from_entropy(rate: &RateFunction, phi: &GrowthFunction, n: f64) -> Result<f64> {
    require_log_hypothesis(phi)?;
    let m = n * phi.eval(n);
    if !(m > 1.0) {
        return domain(format!("n phi(n) = {m} is not above 1"));
    }
    let l = m.log2();
    Ok(rate.scale
        * match rate.kind {
            RateKind::PolyLog { alpha, beta } => l.powf(beta) * m.powf(-alpha),
            RateKind::LogInv { alpha } => l.powf(-alpha),
            RateKind::Expo { .. } => {
                return Err(Error::Unsupported("no width lower bound from an exponential entropy rate".into()))
            }
        })
}

/// Asymptotic form of [`width_lower_from_entropy`] for power growth functions.
pub fn width_lower_rate(rate: &RateFunction, phi: &GrowthFunction) -> Result<RateFunction> {
    require_log_hypothesis(phi)?;
    let (_, p, q) = phi
        .as_power()
        .ok_or_else(|| Error::Unsupported("symbolic rates need a power growth function".into()))?;
    match rate.kind {
        RateKind::PolyLog { alpha, beta } => {
            Ok(RateFunction::implied(RateKind::PolyLog { alpha: alpha * (1.0 + p), beta: beta - alpha * q }))
        }
        RateKind::LogInv { alpha } => Ok(RateFunction::implied(RateKind::LogInv { alpha })),
        RateKind::Expo { .. } => Err(Error::Unsupported("no width lower bound from an exponential entropy rate".into())),
    }
}

/// Rate of the lower bound for `E(𝒦, Σ_{n,σ}(w(n)))`.
pub fn nn_lower_rate_deep(rate: &RateFunction, wfam: &BoundFamily) -> Result<RateFunction> {
    match (rate.kind, wfam) {
        (RateKind::PolyLog { alpha, beta }, BoundFamily::Polynomial { .. }) => {
            Ok(RateFunction::implied(RateKind::PolyLog { alpha: 2.0 * alpha, beta: beta - alpha }))
        }
        (RateKind::PolyLog { alpha, beta }, BoundFamily::Exponential { nu, .. }) => {
            Ok(RateFunction::implied(RateKind::PolyLog { alpha: (2.0 + nu) * alpha, beta }))
        }
        (RateKind::PolyLog { alpha, beta }, BoundFamily::Constant { .. }) => {
            Ok(RateFunction::implied(RateKind::PolyLog { alpha: 2.0 * alpha, beta }))
        }
        (RateKind::LogInv { alpha }, _) => Ok(RateFunction::implied(RateKind::LogInv { alpha })),
        (RateKind::Expo { .. }, _) => Err(Error::Unsupported("no network lower bound from an exponential entropy rate".into())),
    }
}

/// Rate of the lower bound for `E(𝒦, Ξ_{W,σ}(w(W)))`.
pub fn nn_lower_rate_shallow(rate: &RateFunction, wfam: &BoundFamily) -> Result<RateFunction> {
    match (rate.kind, wfam) {
        (RateKind::PolyLog { alpha, beta }, BoundFamily::Polynomial { .. } | BoundFamily::Constant { .. }) => {
            Ok(RateFunction::implied(RateKind::PolyLog { alpha, beta: beta - alpha }))
        }
        (RateKind::PolyLog { alpha, beta }, BoundFamily::Exponential { nu, .. }) => {
            if *nu == 0.0 {
                Ok(RateFunction::implied(RateKind::PolyLog { alpha, beta: beta - alpha }))
            } else {
                Ok(RateFunction::implied(RateKind::PolyLog { alpha: (1.0 + nu) * alpha, beta }))
            }
        }
        (RateKind::LogInv { alpha }, _) => Ok(RateFunction::implied(RateKind::LogInv { alpha })),
        (RateKind::Expo { .. }, _) => Err(Error::Unsupported("no network lower bound from an exponential entropy rate".into())),
    }
}

/// Lower bound for deep networks at depth `n`; `lw` is `L·W`, used to check
/// `LWw(n) ≥ 2`.
pub fn nn_lower_bound_deep(rate: &RateFunction, wfam: &BoundFamily, n: f64, lw: f64) -> Result<f64> {
    if lw * wfam.eval(n) < 2.0 {
        return domain(format!("L W w(n) = {} is below 2", lw * wfam.eval(n)));
    }
    Ok(nn_lower_rate_deep(rate, wfam)?.with_scale(rate.scale).eval(n))
}

pub fn nn_lower_bound_shallow(rate: &RateFunction, wfam: &BoundFamily, width: f64) -> Result<f64> {
    Ok(nn_lower_rate_shallow(rate, wfam)?.with_scale(rate.scale).eval(width))
}

/// Entropy rate implied by a width rate when `γ_n = 2^{cn^p[log₂n]^q}`.
pub fn entropy_upper_from_width(width_rate: &RateFunction, p: f64, q: f64) -> Result<RateFunction> {
    if !(p >= 0.0) || !q.is_finite() {
        return Err(Error::Unsupported(format!("growth exponents p = {p}, q = {q}")));
    }
    match width_rate.kind {
        RateKind::PolyLog { alpha, beta } => {
            if p > 0.0 || q >= 1.0 {
                Ok(RateFunction::implied(RateKind::PolyLog {
                    alpha: alpha / (1.0 + p),
                    beta: beta + alpha * q / (1.0 + p),
                }))
            } else {
                Ok(RateFunction::implied(RateKind::PolyLog { alpha, beta: alpha + beta }))
            }
        }
        RateKind::Expo { c, a, log_power } if a == 1.0 && log_power == 0.0 => {
            if p < 1.0 || (p == 1.0 && q <= 0.0) {
                Ok(RateFunction::implied(RateKind::Expo { c, a: 0.5, log_power: 0.0 }))
            } else {
                Ok(RateFunction::implied(RateKind::Expo { c, a: 1.0 / (p + 1.0), log_power: -q / (p + 1.0) }))
            }
        }
        _ => Err(Error::Unsupported("width rate must be polylog or 2^{-cn}".into())),
    }
}

/// Entropy rate implied by a network approximation rate.
pub fn entropy_upper_from_nn_error(err_rate: &RateFunction, wfam: &BoundFamily, regime: NetRegime) -> Result<RateFunction> {
    let growth = phi_gamma_of(wfam, 2, regime, 1.0)?.asymptotic;
    let (_, p, q) = growth.as_power().expect("asymptotic growth is a power");
    let out = entropy_upper_from_width(err_rate, p, q)?;
    // shallow networks with exponential bounds and exponential error decay
    match (regime, wfam, err_rate.kind) {
        (NetRegime::Shallow, BoundFamily::Exponential { nu, .. }, RateKind::Expo { c, .. }) if *nu > 0.0 => {
            Ok(RateFunction::implied(RateKind::Expo { c, a: 1.0 / (nu + 1.0), log_power: 0.0 }))
        }
        _ => Ok(out),
    }
}

/// `n ⌈φ(n)/2⌉`.
pub fn width_upper_from_entropy_index(n: u64, phi: &GrowthFunction) -> Result<u64> {
    let v = phi.eval(n as f64);
    if !v.is_finite() || v < 0.0 {
        return input(format!("phi({n}) = {v} is not a nonnegative number"));
    }
    Ok(n * (v / 2.0).ceil() as u64)
}

/// `(nk, 6·2^{φ(n)−k})`.
pub fn zero_width_entropy_decay(n: u64, phi_n: f64, k: u64) -> Result<(u64, f64)> {
    if (k as f64) <= phi_n {
        return domain(format!("k = {k} must exceed phi(n) = {phi_n}"));
    }
    Ok((n * k, 6.0 * (phi_n - k as f64).exp2()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Doubling {
    Finite,
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingSup {
    pub value: f64,
    pub argmax: u64,
    pub classification: Doubling,
}

/// `max_{2 ≤ n ≤ N} φ(cn)/φ(n)`.
pub fn doubling_sup(phi: &GrowthFunction, c: f64, big_n: u64) -> Result<DoublingSup> {
    if !(c > 1.0) || big_n < 2 {
        return input("doubling_sup needs c > 1 and N >= 2");
    }
    let mut best = DoublingSup { value: f64::NEG_INFINITY, argmax: 0, classification: Doubling::Finite };
    for n in 2..=big_n {
        let (a, b) = (phi.eval(c * n as f64), phi.eval(n as f64));
        if a.is_nan() || b.is_nan() {
            break;
        }
        let r = a / b;
        if r > best.value {
            best.value = r;
            best.argmax = n;
        }
    }
    if best.argmax == 0 {
        return input("growth function has no values in range");
    }
    if matches!(phi, GrowthFunction::Tabulated { .. }) {
        best.classification = Doubling::Unknown;
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBound {
    pub value: f64,
    pub ratio: f64,
    pub degenerate: bool,
}

/// `r^α [log₂r]^{−β}` (`r^α` when `β ≤ 0`) for `r = φ(cn)/φ(n)`.
pub fn ratio_divergence_bound(alpha: f64, beta: f64, phi: &GrowthFunction, c: f64, n: f64) -> Result<RatioBound> {
    if !(alpha > 0.0) || n < 2.0 {
        return input("ratio bound needs alpha > 0 and n >= 2");
    }
    let ratio = phi.eval(c * n) / phi.eval(n);
    Ok(ratio_bound_from_ratio(alpha, beta, ratio))
}

pub fn ratio_bound_from_ratio(alpha: f64, beta: f64, ratio: f64) -> RatioBound {
    if !(ratio > 1.0) {
        return RatioBound { value: f64::NAN, ratio, degenerate: true };
    }
    let value = if beta > 0.0 { ratio.powf(alpha) * ratio.log2().powf(-beta) } else { ratio.powf(alpha) };
    RatioBound { value, ratio, degenerate: false }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum XiKind {
    /// `ξ_n = 2^{−n}`
    Expo2,
    /// `ξ_n = n^{−α}`
    Poly { alpha: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaChain {
    /// `log₂` of the Lipschitz constant `c₁ ξ_n^{−c}`.
    pub log2_gamma: f64,
    pub entropy_index: u64,
    pub degenerate: bool,
}

pub fn const_gamma_chain(xi: XiKind, n: u64, c: f64, c1: f64) -> Result<GammaChain> {
    if n < 2 || !(c > 0.0) || !(c1 > 0.0) {
        return input("gamma chain needs n >= 2 and c, c1 > 0");
    }
    let nf = n as f64;
    let log2_inv_xi = match xi {
        XiKind::Expo2 => nf,
        XiKind::Poly { alpha } => alpha * nf.log2(),
    };
    Ok(GammaChain {
        log2_gamma: c1.log2() + c * log2_inv_xi,
        entropy_index: (c * (nf * log2_inv_xi).ceil()).ceil() as u64,
        degenerate: log2_inv_xi <= 0.0,
    })
}

/// One Lipschitz-width upper estimate `d_m^γ ≤ upper`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WidthRecord {
    pub m: usize,
    pub gamma: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub m: usize,
    pub gamma: f64,
    pub width_upper: f64,
    pub delta: f64,
    pub index: u64,
    pub entropy_lower: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConsistencyReport {
    pub checked: usize,
    pub skipped: usize,
    pub violations: Vec<Violation>,
    /// No `(width, δ)` pair landed inside the entropy data.
    pub partial: bool,
}

impl ConsistencyReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Default `δ/u` factors tried above each width upper bound.
pub const DELTA_FACTORS: [f64; 12] = [1.0 + 1e-9, 1.01, 1.1, 1.25, 1.5, 2.0, 3.0, 4.0, 8.0, 16.0, 64.0, 256.0];

/// Checks `η_{⌈m log₂(3γ/δ)⌉} < 2δ` for every width record and `δ > upper`.
///
/// Records with `upper = 0` are probed at `δ = ℓ_k/2` for the entropy lower
/// bounds `ℓ_k` in the profile.
pub fn check_carl_consistency(entropy: &EntropyProfile, widths: &[WidthRecord]) -> ConsistencyReport {
    let mut report = ConsistencyReport { checked: 0, skipped: 0, violations: Vec::new(), partial: false };
    let probes: Vec<f64> = entropy.entries().iter().map(|e| e.lower / 2.0).filter(|v| *v > 0.0).collect();
    for w in widths {
        let deltas: Vec<f64> = if w.upper > 0.0 {
            DELTA_FACTORS.iter().map(|f| w.upper * f).collect()
        } else {
            probes.iter().flat_map(|p| [*p, p * 1.5]).collect()
        };
        for delta in deltas {
            let Ok(ci) = carl_index(w.m.max(1), w.gamma, delta) else {
                report.skipped += 1;
                continue;
            };
            let index = ci.index.max(0) as u64;
            match entropy.lower_at(index) {
                Some(lower) => {
                    report.checked += 1;
                    if lower > 2.0 * delta {
                        report.violations.push(Violation {
                            m: w.m,
                            gamma: w.gamma,
                            width_upper: w.upper,
                            delta,
                            index,
                            entropy_lower: lower,
                        });
                    }
                }
                None => report.skipped += 1,
            }
        }
    }
    report.partial = report.checked == 0;
    report
}

/// Width lower bound obtained from the contrapositive of the Carl-type
/// inequality: the largest `δ = ℓ_k/2` with `m log₂(3γ/δ) ≤ k`.
pub fn width_lower_from_carl(entropy: &EntropyProfile, m: usize, gamma: f64) -> f64 {
    entropy
        .entries()
        .iter()
        .filter(|e| e.lower > 0.0)
        .filter(|e| (m as f64) * (6.0 * gamma / e.lower).log2() <= e.n as f64)
        .map(|e| e.lower / 2.0)
        .fold(0.0, f64::max)
}
