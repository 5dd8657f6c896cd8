use serde::{Deserialize, Serialize};

use super::{DesyncKind, EstimationError};

/// Uniform modulo quantizer: `Q(y) = floor(y / delta) mod 2^bits`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantizerConfig {
    pub bits: u32,
    /// Bin width. Only used when the observer does not know the inputs.
    #[serde(default = "default_delta")]
    pub delta: f64,
}

fn default_delta() -> f64 {
    1.0
}

impl QuantizerConfig {
    pub fn new(bits: u32, delta: f64) -> Result<Self, EstimationError> {
        let q = Self { bits, delta };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<(), EstimationError> {
        if self.bits == 0 || self.bits > 62 {
            return Err(EstimationError::Quantizer(format!(
                "bits must be in 1..=62, got {}",
                self.bits
            )));
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(EstimationError::Quantizer(format!(
                "bin width must be positive, got {}",
                self.delta
            )));
        }
        Ok(())
    }

    pub fn levels(&self) -> u64 {
        1u64 << self.bits
    }
}

pub fn quantize(y: f64, q: &QuantizerConfig) -> u64 {
    let j = (y / q.delta).floor() as i64;
    j.rem_euclid(q.levels() as i64) as u64
}

/// Resolves a bin index to the unique bin `[jδ, (j+1)δ)` with
/// `j ≡ index (mod L)` that meets `[lo, hi]`.
pub fn dequantize_bin(
    index: u64,
    lo: f64,
    hi: f64,
    q: &QuantizerConfig,
) -> Result<(f64, f64), EstimationError> {
    let levels = q.levels();
    if index >= levels {
        return Err(EstimationError::BinIndex { index, levels });
    }
    let jmin = (lo / q.delta).floor() as i64;
    let jmax = (hi / q.delta).floor() as i64;
    let l = levels as i64;
    let j0 = jmin + (index as i64 - jmin).rem_euclid(l);
    if j0 > jmax {
        return Err(EstimationError::Desync(DesyncKind::Empty));
    }
    if j0 + l <= jmax {
        return Err(EstimationError::Desync(DesyncKind::Ambiguous));
    }
    Ok((j0 as f64 * q.delta, (j0 + 1) as f64 * q.delta))
}

/// Index of the sub-interval containing `y` when `[lo, hi]` is split into
/// `levels` equal parts. Values on or past the ends clamp to the end bins.
pub fn sub_bin_index(y: f64, lo: f64, hi: f64, levels: u64) -> u64 {
    let width = (hi - lo) / levels as f64;
    if width <= 0.0 {
        return 0;
    }
    let raw = ((y - lo) / width).floor();
    raw.clamp(0.0, (levels - 1) as f64) as u64
}
