//! Rate and exponent thresholds for code existence and for stabilization,
//! plus the polynomial root tools they rely on.
//!
//! Rates are in bits per channel use and exponents follow the convention
//! `P(error at delay ≥ d) ≤ η 2^{-nβd}`, i.e. β is per channel use.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BoundsError {
    #[error("{0}")]
    Domain(String),
    #[error("root finder did not converge (relative residual {residual:e})")]
    NoConvergence { residual: f64 },
    #[error("no rate in [0, {limit}] makes the scaled matrix stable")]
    NoBracket { limit: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Bec,
    Bsc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelSpec {
    pub kind: ChannelKind,
    pub epsilon: f64,
}

impl ChannelSpec {
    pub fn bec(epsilon: f64) -> Self {
        Self {
            kind: ChannelKind::Bec,
            epsilon,
        }
    }

    pub fn bsc(epsilon: f64) -> Self {
        Self {
            kind: ChannelKind::Bsc,
            epsilon,
        }
    }

    pub fn validate(&self) -> Result<(), BoundsError> {
        if (0.0..=1.0).contains(&self.epsilon) {
            Ok(())
        } else {
            Err(BoundsError::Domain(format!(
                "channel parameter must lie in [0, 1], got {}",
                self.epsilon
            )))
        }
    }
}

/// Bhattacharyya parameter `ζ = Σ_z √(p(z|0) p(z|1))`.
pub fn bhattacharyya(ch: &ChannelSpec) -> f64 {
    match ch.kind {
        ChannelKind::Bec => ch.epsilon,
        ChannelKind::Bsc => 2.0 * (ch.epsilon * (1.0 - ch.epsilon)).sqrt(),
    }
}

pub fn binary_entropy(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Smaller root of `H(x) = y`, in `[0, 1/2]`.
pub fn entropy_inv(y: f64) -> f64 {
    if y <= 0.0 {
        return 0.0;
    }
    if y >= 1.0 {
        return 0.5;
    }
    let (mut lo, mut hi) = (0.0f64, 0.5f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if binary_entropy(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-16 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Binary KL divergence `D(p ‖ q)` in bits.
pub fn kl_bits(p: f64, q: f64) -> f64 {
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).log2() };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Which closed-form condition a report evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Formula {
    /// Finite-horizon existence for dense codes.
    FiniteHorizon,
    /// Existence within the sparse Toeplitz ensemble.
    ToeplitzEnsemble,
    /// KL-based exponent for the binary symmetric channel.
    BscKl,
    CuboidNoFeedback,
    CuboidFeedback,
    EllipsoidNoFeedback,
    EllipsoidFeedback,
    Limit,
}

impl Formula {
    pub fn label(self) -> &'static str {
        match self {
            Formula::FiniteHorizon => "code existence, finite horizon",
            Formula::ToeplitzEnsemble => "code existence, Toeplitz ensemble",
            Formula::BscKl => "code existence, BSC",
            Formula::CuboidNoFeedback => "hypercuboid filter, observer blind to inputs",
            Formula::CuboidFeedback => "hypercuboid filter, observer knows inputs",
            Formula::EllipsoidNoFeedback => "ellipsoid filter, observer blind to inputs",
            Formula::EllipsoidFeedback => "ellipsoid filter, observer knows inputs",
            Formula::Limit => "limiting values",
        }
    }
}

/// Largest rate and exponent for which good codes exist.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CodeThresholds {
    pub formula: Formula,
    pub rate_max: f64,
    /// Exponent bound evaluated at the requested rate.
    pub beta_max: f64,
    pub rate: f64,
    /// `rate < rate_max` and `beta_max > 0`.
    pub achievable: bool,
}

fn check_unit_open(name: &str, x: f64) -> Result<(), BoundsError> {
    if x > 0.0 && x < 1.0 {
        Ok(())
    } else {
        Err(BoundsError::Domain(format!("{name} must lie in (0, 1), got {x}")))
    }
}

/// Rate and exponent thresholds for the ensemble with Bernoulli(`p`) entries:
/// `R < 1 - log2(1+ζ)/log2(1/(1-p))` and
/// `β < H⁻¹(1-R)(log2(1/ζ) + log2[(1-p)^{-(1-R)} - 1])`.
pub fn toeplitz_thresholds(zeta: f64, p: f64, rate: f64) -> Result<CodeThresholds, BoundsError> {
    check_unit_open("p", p)?;
    if !(0.0..=1.0).contains(&zeta) {
        return Err(BoundsError::Domain(format!("ζ must lie in [0, 1], got {zeta}")));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(BoundsError::Domain(format!("rate must lie in [0, 1], got {rate}")));
    }
    let inv = (1.0 / (1.0 - p)).log2();
    let rate_max = 1.0 - (1.0 + zeta).log2() / inv;
    let beta_max = entropy_inv(1.0 - rate)
        * ((1.0 / zeta).log2() + ((1.0 - p).powf(-(1.0 - rate)) - 1.0).log2());
    let formula = if p == 0.5 {
        Formula::FiniteHorizon
    } else {
        Formula::ToeplitzEnsemble
    };
    Ok(CodeThresholds {
        formula,
        rate_max,
        beta_max,
        rate,
        achievable: rate < rate_max && beta_max > 0.0,
    })
}

/// The dense-code thresholds, i.e. the ensemble thresholds at `p = 1/2`.
pub fn finite_horizon_thresholds(zeta: f64, rate: f64) -> Result<CodeThresholds, BoundsError> {
    toeplitz_thresholds(zeta, 0.5, rate)
}

/// `R < 1 - H(ε)` and `β < D(H⁻¹(1-R) ‖ min{ε, 1-ε})`.
pub fn bsc_thresholds(epsilon: f64, rate: f64) -> Result<CodeThresholds, BoundsError> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(BoundsError::Domain(format!("ε must lie in [0, 1], got {epsilon}")));
    }
    let rate_max = 1.0 - binary_entropy(epsilon);
    let q = epsilon.min(1.0 - epsilon);
    let beta_max = if rate < rate_max {
        kl_bits(entropy_inv(1.0 - rate), q)
    } else {
        0.0
    };
    Ok(CodeThresholds {
        formula: Formula::BscKl,
        rate_max,
        beta_max,
        rate,
        achievable: rate < rate_max && beta_max > 0.0,
    })
}

/// Sufficient rate and exponent for stabilization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub formula: Formula,
    pub n: u32,
    /// Moment order of the stability notion (2 for mean square).
    pub moment: f64,
    /// Rate threshold in bits per channel use.
    pub rate: f64,
    /// Closed-form upper bound on `rate`, where one exists.
    pub rate_bound: Option<f64>,
    /// Exponent threshold per channel use.
    pub beta: f64,
}

impl ThresholdReport {
    /// Bits per time step, `nR`.
    pub fn bits(&self) -> f64 {
        self.rate * self.n as f64
    }

    pub fn n_beta(&self) -> f64 {
        self.beta * self.n as f64
    }

    /// Smallest message size meeting the rate condition, at least one bit.
    pub fn k_min(&self) -> u64 {
        let bits = self.bits();
        let snapped = if (bits - bits.round()).abs() < 1e-9 {
            bits.round()
        } else {
            bits.ceil()
        };
        snapped.max(1.0) as u64
    }
}

impl fmt::Display for ThresholdReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.formula.label())?;
        writeln!(f, "  rate    R  > {:.6}  (nR = {:.4}, k_min = {})", self.rate, self.bits(), self.k_min())?;
        if let Some(b) = self.rate_bound {
            writeln!(f, "  rate bound  {:.6}  (n·bound = {:.4})", b, b * self.n as f64)?;
        }
        write!(f, "  exponent β > {:.6}  (nβ = {:.4}, moment {})", self.beta, self.n_beta(), self.moment)
    }
}

/// Coefficient sets of `F`: `f(z) = z^m + a_1 z^{m-1} + … + a_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub coefficients: Vec<f64>,
    /// `λ(F)`.
    pub lambda: f64,
    /// `λ(F̄)` for the entrywise absolute value of `F`.
    pub lambda_abs: f64,
    /// Fujiwara bound on the roots of `f`.
    pub fujiwara: f64,
}

pub fn spectral_report(a: &[f64]) -> Result<SpectralReport, BoundsError> {
    check_plant(a)?;
    Ok(SpectralReport {
        coefficients: a.to_vec(),
        lambda: spectral_radius(a)?,
        lambda_abs: nonneg_radius(&abs(a)),
        fujiwara: fujiwara(a),
    })
}

fn abs(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| x.abs()).collect()
}

fn check_plant(a: &[f64]) -> Result<(), BoundsError> {
    if a.is_empty() || a.iter().any(|x| !x.is_finite()) {
        return Err(BoundsError::Domain("plant needs finite coefficients a_1..a_m".into()));
    }
    Ok(())
}

fn check_n(n: u32) -> Result<(), BoundsError> {
    if n == 0 {
        return Err(BoundsError::Domain("n must be positive".into()));
    }
    Ok(())
}

/// Observer blind to inputs, box filter:
/// `R = (1/n) log2 Σ|a_i|`, `β = (ρ/n) log2 λ(F̄)`.
pub fn cuboid_no_feedback(a: &[f64], n: u32, moment: f64) -> Result<ThresholdReport, BoundsError> {
    check_plant(a)?;
    check_n(n)?;
    let nf = n as f64;
    Ok(ThresholdReport {
        formula: Formula::CuboidNoFeedback,
        n,
        moment,
        rate: abs(a).iter().sum::<f64>().log2() / nf,
        rate_bound: None,
        beta: moment / nf * nonneg_radius(&abs(a)).log2(),
    })
}

/// Observer knows inputs, box filter: the least `r` with
/// `λ(F̄ diag(2^{-nr}, 1, …, 1)) < 1`, and the coefficient bound
/// `(1/n) log2 max{|a_m| 2^{m-1}, max_{i<m} |a_i| 2^i}`.
pub fn cuboid_feedback(a: &[f64], n: u32, moment: f64) -> Result<ThresholdReport, BoundsError> {
    check_plant(a)?;
    check_n(n)?;
    let m = a.len();
    let nf = n as f64;
    let base = abs(a);
    let rate = bisect_rate(n, |s| base.iter().map(|x| x * s).collect())?;
    let bound = (0..m)
        .map(|i| {
            if i + 1 == m {
                base[i] * 2f64.powi(m as i32 - 1)
            } else {
                base[i] * 2f64.powi(i as i32 + 1)
            }
        })
        .fold(0.0, f64::max)
        .log2()
        / nf;
    Ok(ThresholdReport {
        formula: Formula::CuboidFeedback,
        n,
        moment,
        rate,
        rate_bound: Some(bound),
        beta: moment / nf * nonneg_radius(&base).log2(),
    })
}

fn ellipsoid_dim(a: &[f64]) -> Result<f64, BoundsError> {
    check_plant(a)?;
    if a.len() < 2 {
        return Err(BoundsError::Domain(
            "ellipsoid thresholds need m ≥ 2; for m = 1 use the hypercuboid thresholds".into(),
        ));
    }
    Ok(a.len() as f64)
}

/// Observer blind to inputs, ellipsoid filter:
/// `R = (1/n) log2[(√m/2) Σ|a_i| θ^{i-1}]` with `θ = m/(m-1)`,
/// `β = (ρ/n) log2 λ(F)`.
pub fn ellipsoid_no_feedback(a: &[f64], n: u32, moment: f64) -> Result<ThresholdReport, BoundsError> {
    let mf = ellipsoid_dim(a)?;
    check_n(n)?;
    let nf = n as f64;
    let theta = mf / (mf - 1.0);
    let sum: f64 = a
        .iter()
        .enumerate()
        .map(|(i, x)| x.abs() * theta.powi(i as i32))
        .sum();
    Ok(ThresholdReport {
        formula: Formula::EllipsoidNoFeedback,
        n,
        moment,
        rate: (mf.sqrt() / 2.0 * sum).log2() / nf,
        rate_bound: None,
        beta: moment / nf * spectral_radius(a)?.log2(),
    })
}

/// Observer knows inputs, ellipsoid filter: the least `r` with
/// `λ(F̄ diag(√m 2^{-nr}, √θ, …, √θ)) < 1`, and the coefficient bound
/// `(1/2n) log2 m + (1/n) log2 max{|a_m|(2θ)^{m-1}, max_{i<m} 2|a_i|(2θ)^{i-1}}`.
///
/// The scaled matrix has characteristic polynomial
/// `x^m - √m 2^{-nr} Σ |a_i| θ^{(i-1)/2} x^{m-i}`.
pub fn ellipsoid_feedback(a: &[f64], n: u32, moment: f64) -> Result<ThresholdReport, BoundsError> {
    let mf = ellipsoid_dim(a)?;
    check_n(n)?;
    let m = a.len();
    let nf = n as f64;
    let theta = mf / (mf - 1.0);
    let base: Vec<f64> = a
        .iter()
        .enumerate()
        .map(|(i, x)| mf.sqrt() * x.abs() * theta.powf(i as f64 / 2.0))
        .collect();
    let rate = bisect_rate(n, |s| base.iter().map(|x| x * s).collect())?;
    let two_theta = 2.0 * theta;
    let inner = (0..m)
        .map(|i| {
            if i + 1 == m {
                a[i].abs() * two_theta.powi(m as i32 - 1)
            } else {
                2.0 * a[i].abs() * two_theta.powi(i as i32)
            }
        })
        .fold(0.0, f64::max);
    let bound = mf.log2() / (2.0 * nf) + inner.log2() / nf;
    Ok(ThresholdReport {
        formula: Formula::EllipsoidFeedback,
        n,
        moment,
        rate,
        rate_bound: Some(bound),
        beta: moment / nf * spectral_radius(a)?.log2(),
    })
}

const MAX_BITS_PER_STEP: f64 = 4096.0;

/// Least `r ≥ 0` such that the nonnegative companion polynomial with
/// coefficients `coeffs(2^{-nr})` has spectral radius below one.
fn bisect_rate<G>(n: u32, coeffs: G) -> Result<f64, BoundsError>
where
    G: Fn(f64) -> Vec<f64>,
{
    let nf = n as f64;
    let radius = |r: f64| nonneg_radius(&coeffs((-nf * r).exp2()));
    if radius(0.0) < 1.0 {
        return Ok(0.0);
    }
    // Start at 64 bits per step and double; very unstable plants need more.
    let mut limit = 64.0 / nf;
    while radius(limit) >= 1.0 {
        if limit >= MAX_BITS_PER_STEP / nf {
            return Err(BoundsError::NoBracket { limit });
        }
        limit *= 2.0;
    }
    let (mut lo, mut hi) = (0.0, limit);
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if radius(mid) < 1.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// `R* = Σ_{|μ|>1} log2|μ|` and `β* = 2 log2 max|μ|`.
pub fn limiting_values(mu: &[f64]) -> (f64, f64) {
    let r = mu.iter().filter(|x| x.abs() > 1.0).map(|x| x.abs().log2()).sum();
    let top = mu.iter().fold(0.0f64, |acc, x| acc.max(x.abs()));
    (r, 2.0 * top.log2())
}

/// Coefficients `a_1..a_m` of `Π (z - μ_i^n)`.
pub fn coefficients_from_roots(mu: &[f64], n: u32) -> Vec<f64> {
    let mut poly = vec![1.0];
    for &x in mu {
        let root = x.powi(n as i32);
        let mut next = vec![0.0; poly.len() + 1];
        for (i, &c) in poly.iter().enumerate() {
            next[i] += c;
            next[i + 1] -= c * root;
        }
        poly = next;
    }
    poly[1..].to_vec()
}

/// Fujiwara's bound for the roots of `x^m + c_1 x^{m-1} + … + c_m`:
/// `2 max{|c_1|, |c_2|^{1/2}, …, |c_{m-1}|^{1/(m-1)}, |c_m/2|^{1/m}}`.
pub fn fujiwara(c: &[f64]) -> f64 {
    let m = c.len();
    let best = c.iter().enumerate().fold(0.0f64, |acc, (i, x)| {
        let v = if i + 1 == m { x.abs() / 2.0 } else { x.abs() };
        acc.max(v.powf(1.0 / (i + 1) as f64))
    });
    2.0 * best
}

/// Positive root of `x^m - Σ c_i x^{m-i}` for `c_i ≥ 0`, i.e. the spectral
/// radius of the nonnegative companion matrix with first column `c`.
pub fn nonneg_radius(c: &[f64]) -> f64 {
    debug_assert!(c.iter().all(|&x| x >= 0.0));
    if c.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    // 1 - Σ c_i x^{-i} is increasing for x > 0.
    let g = |x: f64| {
        let mut s = 0.0;
        let mut pw = 1.0;
        for &ci in c {
            pw /= x;
            s += ci * pw;
        }
        1.0 - s
    };
    let mut hi = 1.0f64.max(c.iter().sum::<f64>());
    while g(hi) < 0.0 {
        hi *= 2.0;
    }
    let mut lo = 0.0f64;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All roots of `x^m + c_1 x^{m-1} + … + c_m` by Aberth–Ehrlich iteration.
pub fn polynomial_roots(c: &[f64]) -> Result<Vec<Complex64>, BoundsError> {
    let m = c.len();
    if m == 0 {
        return Ok(Vec::new());
    }
    let coeffs: Vec<Complex64> = std::iter::once(1.0)
        .chain(c.iter().copied())
        .map(|x| Complex64::new(x, 0.0))
        .collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &a in &coeffs {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let radius = fujiwara(c).max(1e-3);
    let mut z: Vec<Complex64> = (0..m)
        .map(|k| {
            let angle = 2.0 * std::f64::consts::PI * k as f64 / m as f64 + 0.4;
            Complex64::from_polar(0.5 * radius, angle)
        })
        .collect();
    for _ in 0..2000 {
        let mut max_step = 0.0f64;
        for i in 0..m {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..m)
                .filter(|&j| j != i)
                .map(|j| {
                    let diff = z[i] - z[j];
                    if diff.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        diff.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            break;
        }
    }
    let residual = z
        .iter()
        .map(|&r| {
            let (p, _) = eval(r);
            let scale: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a.norm() * r.norm().powi((m - k) as i32))
                .sum();
            p.norm() / scale.max(f64::MIN_POSITIVE)
        })
        .fold(0.0f64, f64::max);
    if !(residual <= 1e-9) {
        return Err(BoundsError::NoConvergence { residual });
    }
    Ok(z)
}

/// Largest root modulus of `x^m + c_1 x^{m-1} + … + c_m`.
pub fn spectral_radius(c: &[f64]) -> Result<f64, BoundsError> {
    if c.iter().all(|&x| x <= 0.0) {
        // x^m - Σ|c_i| x^{m-i}: the nonnegative case has a real dominant root.
        return Ok(nonneg_radius(&abs(c)));
    }
    Ok(polynomial_roots(c)?
        .iter()
        .fold(0.0f64, |acc, z| acc.max(z.norm())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bhattacharyya_cases() {
        assert_eq!(bhattacharyya(&ChannelSpec::bec(0.3)), 0.3);
        assert_eq!(bhattacharyya(&ChannelSpec::bsc(0.0)), 0.0);
        assert!((bhattacharyya(&ChannelSpec::bsc(0.11)) - 0.625_780).abs() < 1e-6);
    }

    #[test]
    fn entropy_inverse_ends() {
        assert_eq!(entropy_inv(1.0), 0.5);
        assert_eq!(entropy_inv(0.0), 0.0);
        let x = entropy_inv(0.6);
        assert!((binary_entropy(x) - 0.6).abs() < 1e-10);
        assert!(x < 0.5);
    }

    #[test]
    fn bec_rate_threshold() {
        let t = toeplitz_thresholds(0.3, 0.5, 0.4).unwrap();
        assert!((t.rate_max - (1.0 - 1.3f64.log2())).abs() < 1e-12);
        assert!(t.achievable);
        let low = finite_horizon_thresholds(0.3, 0.0).unwrap();
        assert!((low.beta_max - 0.5 * (1.0 / 0.3f64).log2()).abs() < 1e-6);
        let useless = toeplitz_thresholds(1.0, 0.5, 0.1).unwrap();
        assert!(useless.rate_max.abs() < 1e-12);
        assert!(!useless.achievable);
    }

    #[test]
    fn exponent_changes_sign_at_rate_limit() {
        for &(zeta, p) in &[(0.3, 0.5), (0.2, 0.3), (0.05, 0.2)] {
            let rmax = toeplitz_thresholds(zeta, p, 0.0).unwrap().rate_max;
            let below = toeplitz_thresholds(zeta, p, rmax - 1e-6).unwrap();
            let above = toeplitz_thresholds(zeta, p, rmax + 1e-6).unwrap();
            assert!(below.beta_max > 0.0 && above.beta_max < 0.0);
        }
    }

    #[test]
    fn bsc_edges() {
        assert_eq!(bsc_thresholds(0.5, 0.0).unwrap().rate_max, 0.0);
        let cap = 1.0 - binary_entropy(0.11);
        assert!(bsc_thresholds(0.11, cap - 1e-9).unwrap().beta_max < 1e-3);
        assert!((kl_bits(0.2, 0.2)).abs() < 1e-15);
    }

    #[test]
    fn scalar_plant() {
        let r = cuboid_no_feedback(&[-2.0], 15, 1.0).unwrap();
        assert!((r.bits() - 1.0).abs() < 1e-12);
        assert_eq!(r.k_min(), 1);
        assert!((r.beta - 1.0 / 15.0).abs() < 1e-12);
    }

    #[test]
    fn three_state_plant() {
        let a = [-2.0, -0.25, 0.5];
        let r = cuboid_feedback(&a, 15, 2.0).unwrap();
        let s = spectral_report(&a).unwrap();
        assert!((s.lambda_abs - 2.215).abs() < 1e-3);
        assert!((s.lambda - 2.0).abs() < 1e-9);
        assert!((r.n_beta() - 2.0 * 2.2148f64.log2()).abs() < 1e-3);
        assert_eq!(r.k_min(), 2);
        assert!((r.bits() - 2.75f64.log2()).abs() < 1e-9);
        let e = ellipsoid_no_feedback(&a, 15, 2.0).unwrap();
        assert!((e.beta - 2.0 / 15.0).abs() < 1e-9);
        assert!(e.beta < r.beta);
    }

    #[test]
    fn ellipsoid_two_state() {
        let r = ellipsoid_no_feedback(&[-2.0, 0.0], 10, 2.0).unwrap();
        assert!((r.rate - 0.05).abs() < 1e-12);
        assert!(ellipsoid_no_feedback(&[-2.0], 10, 2.0).is_err());
        let f = ellipsoid_feedback(&[-2.0, 0.0], 10, 2.0).unwrap();
        assert!(f.rate <= f.rate_bound.unwrap() + 1e-12);
    }

    #[test]
    fn limiting_examples() {
        assert_eq!(limiting_values(&[2.0, 0.5, 0.5]), (1.0, 2.0));
        assert_eq!(limiting_values(&[0.9, -1.0]).0, 0.0);
        assert_eq!(coefficients_from_roots(&[2.0, 3.0], 1), vec![-5.0, 6.0]);
    }

    #[test]
    fn fujiwara_cases() {
        assert!((fujiwara(&[0.0, -1.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(fujiwara(&[-3.0]), 3.0);
    }

    #[test]
    fn roots_of_known_polynomials() {
        assert_eq!(spectral_radius(&[-2.0]).unwrap(), 2.0);
        // (x - 2)(x + 0.5)(x - 0.5) = x^3 - 2x^2 - 0.25x + 0.5
        let r = spectral_radius(&[-2.0, -0.25, 0.5]).unwrap();
        assert!((r - 2.0).abs() < 1e-10);
        // x^2 + 1
        let r = spectral_radius(&[0.0, 1.0]).unwrap();
        assert!((r - 1.0).abs() < 1e-10);
    }
}
