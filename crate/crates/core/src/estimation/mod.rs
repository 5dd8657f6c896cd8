//! Quantization and set-membership state estimation for companion-form plants.
//!
//! The plant is `x⁺ = F x + u + w`, `y = x₁ + v` with `F` in observable
//! companion form (first column `-a`, identity superdiagonal),
//! `‖w‖∞ ≤ W/2` and `|v| ≤ V/2`. Two filters bound the state: axis-aligned
//! boxes ([`Hypercuboid`]) and ellipsoids ([`EllipsoidState`]). Both implement
//! [`SetFilter`], which is what the replay machinery and the closed loop use.

mod cuboid;
mod ellipsoid;
mod quantizer;
mod replay;

pub use cuboid::{feedback_width_step, steady_state_width, Hypercuboid, SteadyState};
pub use ellipsoid::{min_vol_coefficients, min_vol_ellipsoid, EllipsoidState, MinVol, MinVolCase};
pub use quantizer::{dequantize_bin, quantize, sub_bin_index, QuantizerConfig};
pub use replay::{FeedbackMode, FilterCheckpoint, FilterSession, MeasurementModel, StepRecord};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesyncKind {
    /// No candidate bin meets the predicted interval.
    Empty,
    /// More than one candidate bin meets the predicted interval.
    Ambiguous,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimationError {
    #[error("measurement inconsistent with the filter set ({0:?})")]
    Desync(DesyncKind),
    #[error("bin index {index} out of range for {levels} levels")]
    BinIndex { index: u64, levels: u64 },
    #[error("matrix is not symmetric positive definite")]
    NotSpd,
    #[error("degenerate ellipsoid update")]
    Degenerate,
    #[error("invalid plant: {0}")]
    Plant(String),
    #[error("no checkpoint for time {0}")]
    MissingCheckpoint(usize),
    #[error("revision at time {time} is beyond the current horizon {horizon}")]
    BeyondHorizon { time: usize, horizon: usize },
    #[error("invalid quantizer: {0}")]
    Quantizer(String),
}

/// Companion-form plant with bounded noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantModel {
    /// Characteristic polynomial coefficients `a_1..a_m` of
    /// `z^m + a_1 z^{m-1} + ... + a_m`.
    pub a: Vec<f64>,
    /// Process noise box width: `‖w‖∞ ≤ W/2`.
    pub w: f64,
    /// Measurement noise width: `|v| ≤ V/2`.
    pub v: f64,
}

impl PlantModel {
    pub fn new(a: Vec<f64>, w: f64, v: f64) -> Result<Self, EstimationError> {
        let plant = Self { a, w, v };
        plant.validate()?;
        Ok(plant)
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if self.a.is_empty() {
            return Err(EstimationError::Plant("need at least one coefficient".into()));
        }
        if self.a.iter().any(|x| !x.is_finite()) {
            return Err(EstimationError::Plant("coefficients must be finite".into()));
        }
        if !(self.w >= 0.0 && self.v >= 0.0) {
            return Err(EstimationError::Plant("noise widths must be nonnegative".into()));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn f(&self) -> DMatrix<f64> {
        companion(&self.a.iter().map(|x| -x).collect::<Vec<_>>())
    }

    /// Entrywise absolute value of `F`.
    pub fn f_abs(&self) -> DMatrix<f64> {
        companion(&self.a.iter().map(|x| x.abs()).collect::<Vec<_>>())
    }

    /// `F x` without forming the matrix.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        let m = self.dim();
        DVector::from_fn(m, |i, _| {
            let shift = if i + 1 < m { x[i + 1] } else { 0.0 };
            -self.a[i] * x[0] + shift
        })
    }

    pub fn step(&self, x: &DVector<f64>, u: &DVector<f64>, w: &DVector<f64>) -> DVector<f64> {
        self.apply(x) + u + w
    }
}

/// Matrix with `first_column` in column 0 and ones on the superdiagonal.
pub fn companion(first_column: &[f64]) -> DMatrix<f64> {
    let m = first_column.len();
    DMatrix::from_fn(m, m, |i, j| {
        if j == 0 {
            first_column[i]
        } else if j == i + 1 {
            1.0
        } else {
            0.0
        }
    })
}

/// Common interface of the set-membership filters.
///
/// The filter holds a set that contains the current state. Measurements
/// arrive as a slab on the first coordinate.
pub trait SetFilter: Clone + std::fmt::Debug {
    fn dim(&self) -> usize;

    /// Range of the first state coordinate over the set.
    fn first_interval(&self) -> (f64, f64);

    fn center(&self) -> DVector<f64>;

    /// Extent of the set along each axis.
    fn widths(&self) -> DVector<f64>;

    fn contains(&self, x: &DVector<f64>, tol: f64) -> bool;

    /// Image under `x ↦ F x + u + w` for all admissible `w`.
    fn time_update(&self, plant: &PlantModel, u: &DVector<f64>) -> Self;

    /// Restricts the set to `lo ≤ x₁ ≤ hi`. Errors leave no partial state:
    /// callers keep the prior on failure.
    fn intersect_slab(&self, lo: f64, hi: f64) -> Result<Self, EstimationError>;

    /// Measurement update when observer and estimator share the predicted
    /// interval: the first coordinate becomes `[lo, hi]`. The default
    /// intersects, which preserves containment for any filter.
    fn replace_first(&self, lo: f64, hi: f64) -> Result<Self, EstimationError> {
        self.intersect_slab(lo, hi)
    }
}
