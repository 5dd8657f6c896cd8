use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::{DesyncKind, EstimationError, PlantModel, SetFilter};

const EPS_FLOOR: f64 = 1e-9;
const EIG_FLOOR: f64 = 1e-12;

/// Ellipsoid `E(P, c) = {x : (x - c)ᵀ P⁻¹ (x - c) ≤ 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EllipsoidState {
    pub p: DMatrix<f64>,
    pub c: DVector<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MinVolCase {
    /// The slab contains enough of the ellipsoid that it is kept as is.
    Unchanged,
    /// Slab symmetric about the center.
    Symmetric,
    General,
}

/// Shape of the covering ellipsoid in whitened coordinates, where the prior
/// is the unit ball and the slab is `γ ≤ z₁ ≤ δ`. The cover is
/// `(z₁ - ξ)²/a + ‖z_rest‖²/b ≤ 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinVol {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
    pub case: MinVolCase,
}

/// Minimum-volume ellipsoid covering the unit ball cut by `γ ≤ z₁ ≤ δ` in
/// dimension `m ≥ 2`. Inputs are clamped to `[-1, 1]`; when `|δ| < |γ|` the
/// problem is mirrored through the origin.
pub fn min_vol_coefficients(m: usize, gamma: f64, delta: f64) -> MinVol {
    let g = gamma.clamp(-1.0, 1.0);
    let d = delta.clamp(-1.0, 1.0);
    if d.abs() < g.abs() {
        let mut out = min_vol_coefficients(m, -d, -g);
        out.xi = -out.xi;
        return out;
    }
    let mf = m as f64;
    if g * d <= -1.0 / mf {
        return MinVol {
            a: 1.0,
            b: 1.0,
            xi: 0.0,
            case: MinVolCase::Unchanged,
        };
    }
    let s = g + d;
    if s.abs() <= 1e-12 {
        let d2 = d * d;
        return MinVol {
            a: mf * d2,
            b: mf * (1.0 - d2) / (mf - 1.0),
            xi: 0.0,
            case: MinVolCase::Symmetric,
        };
    }
    let disc = mf * mf * (d * d - g * g).powi(2) + 4.0 * (1.0 - g * g) * (1.0 - d * d);
    let xi = (mf * s * s + 2.0 * (1.0 + g * d) - disc.sqrt()) / (2.0 * (mf + 1.0) * s);
    let a = mf * (xi - g) * (d - xi);
    let b = (a - a * g * g) / (a - (xi - g).powi(2));
    MinVol {
        a,
        b,
        xi,
        case: MinVolCase::General,
    }
}

/// Covers `E ∩ {lo ≤ x₁ ≤ hi}` given the slab in whitened units
/// `γ = (lo - c₁)/√P₁₁`, `δ = (hi - c₁)/√P₁₁`.
pub fn min_vol_ellipsoid(
    e: &EllipsoidState,
    gamma: f64,
    delta: f64,
) -> Result<(EllipsoidState, MinVol), EstimationError> {
    let mv = min_vol_coefficients(e.dim(), gamma, delta);
    if mv.case == MinVolCase::Unchanged {
        return Ok((e.clone(), mv));
    }
    let p11 = e.p[(0, 0)];
    let ph = e.p.column(0).into_owned();
    let p = &e.p * mv.b - (&ph * ph.transpose()) * ((mv.b - mv.a) / p11);
    let c = &e.c + &ph * (mv.xi / p11.sqrt());
    if !(mv.a > 0.0 && mv.b > 0.0) || p.iter().chain(c.iter()).any(|v| !v.is_finite()) {
        return Err(EstimationError::Degenerate);
    }
    Ok((EllipsoidState { p: spd_floor(p), c }, mv))
}

/// Symmetrizes and lifts eigenvalues to at least `1e-12 · tr(P)/m`.
fn spd_floor(p: DMatrix<f64>) -> DMatrix<f64> {
    let m = p.nrows();
    let sym = (&p + p.transpose()) * 0.5;
    let floor = EIG_FLOOR * sym.trace().max(0.0) / m as f64;
    let eig = SymmetricEigen::new(sym.clone());
    if eig.eigenvalues.iter().all(|&l| l >= floor) {
        return sym;
    }
    let lifted = eig.eigenvalues.map(|l| l.max(floor));
    &eig.eigenvectors * DMatrix::from_diagonal(&lifted) * eig.eigenvectors.transpose()
}

impl EllipsoidState {
    pub fn new(p: DMatrix<f64>, c: DVector<f64>) -> Result<Self, EstimationError> {
        if !p.is_square() || p.nrows() != c.len() || p.nrows() == 0 {
            return Err(EstimationError::NotSpd);
        }
        if (&p - p.transpose()).amax() > 1e-9 * p.amax().max(1.0) {
            return Err(EstimationError::NotSpd);
        }
        if p.clone().cholesky().is_none() {
            return Err(EstimationError::NotSpd);
        }
        Ok(Self { p, c })
    }

    /// Ball of radius `r` about `center`.
    pub fn ball(center: DVector<f64>, r: f64) -> Self {
        let m = center.len();
        Self {
            p: DMatrix::identity(m, m) * (r * r),
            c: center,
        }
    }

    /// `(x - c)ᵀ P⁻¹ (x - c)`.
    pub fn metric(&self, x: &DVector<f64>) -> f64 {
        let diff = x - &self.c;
        match self.p.clone().cholesky() {
            Some(ch) => diff.dot(&ch.solve(&diff)),
            None => f64::INFINITY,
        }
    }

    pub fn log_det(&self) -> f64 {
        self.p.clone().cholesky().map_or(f64::NEG_INFINITY, |ch| {
            2.0 * ch.l().diagonal().iter().map(|x| x.ln()).sum::<f64>()
        })
    }

    /// Outer bound of `{F x + u + w : x ∈ E, ‖w‖∞ ≤ W/2}` using
    /// `(1+ε) F P Fᵀ + (1 + 1/ε) q I` with `q = mW²/4` and the trace-minimizing ε.
    pub fn time_update(&self, plant: &PlantModel, u: &DVector<f64>) -> Self {
        let m = self.dim();
        let f = plant.f();
        let fpf = &f * &self.p * f.transpose();
        let q = m as f64 * plant.w * plant.w / 4.0;
        let eps = time_update_epsilon(fpf.trace(), m as f64 * q);
        let p = fpf * (1.0 + eps) + DMatrix::identity(m, m) * ((1.0 + 1.0 / eps) * q);
        Self {
            p: spd_floor(p),
            c: plant.apply(&self.c) + u,
        }
    }

    /// Covering ellipsoid of `E ∩ {lo ≤ x₁ ≤ hi}`.
    pub fn meas_update(&self, lo: f64, hi: f64) -> Result<Self, EstimationError> {
        let p11 = self.p[(0, 0)];
        let r = p11.sqrt();
        let gamma = (lo - self.c[0]) / r;
        let delta = (hi - self.c[0]) / r;
        if gamma > 1.0 || delta < -1.0 || lo > hi {
            return Err(EstimationError::Desync(DesyncKind::Empty));
        }
        if self.dim() == 1 {
            let nlo = (self.c[0] - r).max(lo);
            let nhi = (self.c[0] + r).min(hi);
            let half = (nhi - nlo) / 2.0;
            return Ok(Self {
                p: DMatrix::from_element(1, 1, half * half),
                c: DVector::from_element(1, (nlo + nhi) / 2.0),
            });
        }
        min_vol_ellipsoid(self, gamma, delta).map(|(e, _)| e)
    }
}

/// `ε = √(tr N / tr(F P Fᵀ))` with a floor of `1e-9`.
pub(crate) fn time_update_epsilon(trace_fpf: f64, trace_noise: f64) -> f64 {
    if trace_fpf <= 0.0 {
        return 1.0 / EPS_FLOOR;
    }
    (trace_noise / trace_fpf).sqrt().max(EPS_FLOOR)
}

impl SetFilter for EllipsoidState {
    fn dim(&self) -> usize {
        self.c.len()
    }

    fn first_interval(&self) -> (f64, f64) {
        let r = self.p[(0, 0)].sqrt();
        (self.c[0] - r, self.c[0] + r)
    }

    fn center(&self) -> DVector<f64> {
        self.c.clone()
    }

    fn widths(&self) -> DVector<f64> {
        self.p.diagonal().map(|v| 2.0 * v.max(0.0).sqrt())
    }

    fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        self.metric(x) <= 1.0 + tol
    }

    fn time_update(&self, plant: &PlantModel, u: &DVector<f64>) -> Self {
        EllipsoidState::time_update(self, plant, u)
    }

    fn intersect_slab(&self, lo: f64, hi: f64) -> Result<Self, EstimationError> {
        self.meas_update(lo, hi)
    }
}
