use nalgebra::DVector;

use super::{DesyncKind, EstimationError, PlantModel, SetFilter};

/// Axis-aligned box `lo ≤ x ≤ hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypercuboid {
    pub lo: DVector<f64>,
    pub hi: DVector<f64>,
}

impl Hypercuboid {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "bound dimension mismatch");
        assert!(
            lo.iter().zip(hi.iter()).all(|(a, b)| a <= b),
            "lower bound exceeds upper bound"
        );
        Self { lo, hi }
    }

    /// Box of half-width `half` in every coordinate around `center`.
    pub fn around(center: &DVector<f64>, half: f64) -> Self {
        Self::new(center.add_scalar(-half), center.add_scalar(half))
    }

    pub fn point(x: &DVector<f64>) -> Self {
        Self::new(x.clone(), x.clone())
    }

    pub fn width(&self) -> DVector<f64> {
        &self.hi - &self.lo
    }

    /// Exact interval image of `{F x + u + w : x in box, ‖w‖∞ ≤ W/2}`.
    pub fn time_update(&self, plant: &PlantModel, u: &DVector<f64>) -> Self {
        let m = plant.dim();
        let half_w = plant.w / 2.0;
        let mut lo = DVector::zeros(m);
        let mut hi = DVector::zeros(m);
        for i in 0..m {
            let g = -plant.a[i];
            let (glo, ghi) = if g >= 0.0 {
                (g * self.lo[0], g * self.hi[0])
            } else {
                (g * self.hi[0], g * self.lo[0])
            };
            let (slo, shi) = if i + 1 < m {
                (self.lo[i + 1], self.hi[i + 1])
            } else {
                (0.0, 0.0)
            };
            lo[i] = glo + slo + u[i] - half_w;
            hi[i] = ghi + shi + u[i] + half_w;
        }
        Self { lo, hi }
    }

    /// Measurement update when the observer quantizes `y` on its own: the
    /// first coordinate is intersected with `[y_lo - V/2, y_hi + V/2]`.
    pub fn meas_update_nofeedback(&self, y_lo: f64, y_hi: f64, v: f64) -> Result<Self, EstimationError> {
        self.intersect_slab(y_lo - v / 2.0, y_hi + v / 2.0)
    }

    /// Measurement update when the observer knows the predicted interval: the
    /// interval `[lo₁ - V/2, hi₁ + V/2]` is split into `levels` equal parts and
    /// the first coordinate becomes the chosen part widened by `V/2` each side.
    pub fn meas_update_feedback(&self, index: u64, levels: u64, v: f64) -> Result<Self, EstimationError> {
        if index >= levels {
            return Err(EstimationError::BinIndex { index, levels });
        }
        let (ylo, yhi) = (self.lo[0] - v / 2.0, self.hi[0] + v / 2.0);
        let step = (yhi - ylo) / levels as f64;
        let s_lo = ylo + index as f64 * step;
        let s_hi = s_lo + step;
        let mut out = self.clone();
        out.lo[0] = s_lo - v / 2.0;
        out.hi[0] = s_hi + v / 2.0;
        Ok(out)
    }
}

impl SetFilter for Hypercuboid {
    fn dim(&self) -> usize {
        self.lo.len()
    }

    fn first_interval(&self) -> (f64, f64) {
        (self.lo[0], self.hi[0])
    }

    fn center(&self) -> DVector<f64> {
        (&self.lo + &self.hi) / 2.0
    }

    fn widths(&self) -> DVector<f64> {
        self.width()
    }

    fn contains(&self, x: &DVector<f64>, tol: f64) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(v, (l, h))| *v >= l - tol && *v <= h + tol)
    }

    fn time_update(&self, plant: &PlantModel, u: &DVector<f64>) -> Self {
        Hypercuboid::time_update(self, plant, u)
    }

    fn intersect_slab(&self, lo: f64, hi: f64) -> Result<Self, EstimationError> {
        let nlo = self.lo[0].max(lo);
        let nhi = self.hi[0].min(hi);
        if nlo > nhi {
            return Err(EstimationError::Desync(DesyncKind::Empty));
        }
        let mut out = self.clone();
        out.lo[0] = nlo;
        out.hi[0] = nhi;
        Ok(out)
    }

    fn replace_first(&self, lo: f64, hi: f64) -> Result<Self, EstimationError> {
        let mut out = self.clone();
        out.lo[0] = lo;
        out.hi[0] = hi;
        Ok(out)
    }
}

/// One step of the shared-interval width recursion, measurement update then
/// time update: `Δ⁺ = F̄ (D Δ + V(1 + 2^{-bits}) e₁) + W 1` with
/// `D = diag(2^{-bits}, 1, …, 1)`. The measurement noise enters through the
/// first column of `F̄`, not only the first coordinate.
pub fn feedback_width_step(plant: &PlantModel, bits: u32, delta: &DVector<f64>) -> DVector<f64> {
    let shrink = (-(bits as f64)).exp2();
    let mut post = delta.clone();
    post[0] = shrink * delta[0] + plant.v * (1.0 + shrink);
    let mut out = plant.f_abs() * post;
    out.add_scalar_mut(plant.w);
    out
}

/// Steady-state predicted widths without observer feedback, and the rate check
/// that keeps the modulo quantizer unambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyState {
    pub widths: DVector<f64>,
    /// Levels needed: `max{Σ|a| + (V + VΣ|a| + mW)/δ, Δ₀⁽¹⁾/δ}`.
    pub required_levels: f64,
}

impl SteadyState {
    /// Strict inequality `2^bits > required_levels`.
    pub fn feasible(&self, bits: u32) -> bool {
        (bits as f64).exp2() > self.required_levels
    }
}

/// `Δ∞ = (δ + V) L_u |a| + W L_u 1` where `(L_u x)_i = Σ_{j ≥ i} x_j`.
pub fn steady_state_width(plant: &PlantModel, delta: f64, initial_first_width: f64) -> SteadyState {
    let m = plant.dim();
    let abs: Vec<f64> = plant.a.iter().map(|x| x.abs()).collect();
    let widths = DVector::from_fn(m, |i, _| {
        (i..m).map(|j| (delta + plant.v) * abs[j] + plant.w).sum()
    });
    let sum_a: f64 = abs.iter().sum();
    let required = (sum_a + (plant.v + plant.v * sum_a + m as f64 * plant.w) / delta)
        .max(initial_first_width / delta);
    SteadyState {
        widths,
        required_levels: required,
    }
}
