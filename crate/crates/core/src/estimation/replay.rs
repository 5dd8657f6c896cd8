//! Filter sessions that can rewind when decoded bin indices are revised.

use std::collections::VecDeque;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use super::quantizer::{dequantize_bin, quantize, sub_bin_index, QuantizerConfig};
use super::{DesyncKind, EstimationError, PlantModel, SetFilter};
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeedbackMode {
    /// Observer does not know the inputs: modulo lattice quantizer.
    NoFeedback,
    /// Observer tracks the controller's set and splits the predicted
    /// measurement interval into `2^bits` parts.
    Feedback,
}

/// How a bin index is produced from `y` and turned back into a set update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementModel {
    pub mode: FeedbackMode,
    pub quantizer: QuantizerConfig,
    /// Measurement noise width `V`.
    pub v: f64,
}

impl MeasurementModel {
    fn predicted_y<F: SetFilter>(&self, predicted: &F) -> (f64, f64) {
        let (lo, hi) = predicted.first_interval();
        (lo - self.v / 2.0, hi + self.v / 2.0)
    }

    /// Observer side: the bin index sent for measurement `y`.
    pub fn encode<F: SetFilter>(&self, predicted: &F, y: f64) -> u64 {
        match self.mode {
            FeedbackMode::NoFeedback => quantize(y, &self.quantizer),
            FeedbackMode::Feedback => {
                let (lo, hi) = self.predicted_y(predicted);
                sub_bin_index(y, lo, hi, self.quantizer.levels())
            }
        }
    }

    /// Controller side: posterior set after receiving `index`.
    pub fn update<F: SetFilter>(&self, predicted: &F, index: u64) -> Result<F, EstimationError> {
        let half_v = self.v / 2.0;
        match self.mode {
            FeedbackMode::NoFeedback => {
                let (lo, hi) = self.predicted_y(predicted);
                let (ylo, yhi) = dequantize_bin(index, lo, hi, &self.quantizer)?;
                predicted.intersect_slab(ylo - half_v, yhi + half_v)
            }
            FeedbackMode::Feedback => {
                let levels = self.quantizer.levels();
                if index >= levels {
                    return Err(EstimationError::BinIndex { index, levels });
                }
                let (lo, hi) = self.predicted_y(predicted);
                let step = (hi - lo) / levels as f64;
                let s_lo = lo + index as f64 * step;
                predicted.replace_first(s_lo - half_v, s_lo + step + half_v)
            }
        }
    }
}

/// Predicted set before the measurement at `time`, tagged with a hash of the
/// indices that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCheckpoint<F> {
    pub time: usize,
    pub state: F,
    pub bits_hash: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord<F> {
    pub time: usize,
    pub index: u64,
    /// Set after the measurement update (the prior when desynchronized).
    pub posterior: F,
    pub desync: Option<DesyncKind>,
}

fn chain_hash(prev: u64, time: usize, index: u64) -> u64 {
    rng::mix(prev, 0x6269_6e73, time as u64, index, 0)
}

/// Measurement and time updates driven by bin indices and recorded inputs.
///
/// Checkpoint `t` is the predicted set for time `t`. Step `t` consumes index
/// `t` and input `u_t` and produces checkpoint `t + 1`.
#[derive(Debug, Clone)]
pub struct FilterSession<F: SetFilter> {
    plant: PlantModel,
    model: MeasurementModel,
    /// Oldest retained checkpoint time.
    base: usize,
    checkpoints: VecDeque<FilterCheckpoint<F>>,
    records: VecDeque<StepRecord<F>>,
    indices: Vec<u64>,
    inputs: Vec<DVector<f64>>,
    retention: Option<usize>,
}

impl<F: SetFilter> FilterSession<F> {
    pub fn new(plant: PlantModel, model: MeasurementModel, initial: F) -> Self {
        let mut checkpoints = VecDeque::new();
        checkpoints.push_back(FilterCheckpoint {
            time: 0,
            state: initial,
            bits_hash: 0,
        });
        Self {
            plant,
            model,
            base: 0,
            checkpoints,
            records: VecDeque::new(),
            indices: Vec::new(),
            inputs: Vec::new(),
            retention: None,
        }
    }

    /// Keeps only the last `window` checkpoints; older revisions then fail
    /// with [`EstimationError::MissingCheckpoint`].
    pub fn with_retention(mut self, window: usize) -> Self {
        self.retention = Some(window.max(1));
        self
    }

    pub fn plant(&self) -> &PlantModel {
        &self.plant
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.model
    }

    /// Number of completed steps.
    pub fn time(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u64] {
        &self.indices
    }

    pub fn inputs(&self) -> &[DVector<f64>] {
        &self.inputs
    }

    /// Predicted set for the next measurement.
    pub fn predicted(&self) -> &F {
        &self.checkpoints.back().expect("session keeps a checkpoint").state
    }

    pub fn checkpoint(&self, time: usize) -> Option<&FilterCheckpoint<F>> {
        time.checked_sub(self.base).and_then(|i| self.checkpoints.get(i))
    }

    pub fn last_record(&self) -> Option<&StepRecord<F>> {
        self.records.back()
    }

    pub fn record(&self, time: usize) -> Option<&StepRecord<F>> {
        time.checked_sub(self.base).and_then(|i| self.records.get(i))
    }

    fn advance(&mut self, index: u64, u: &DVector<f64>) -> Result<(), EstimationError> {
        let cp = self.checkpoints.back().expect("session keeps a checkpoint");
        let time = cp.time;
        let (posterior, desync) = match self.model.update(&cp.state, index) {
            Ok(s) => (s, None),
            Err(EstimationError::Desync(kind)) => (cp.state.clone(), Some(kind)),
            Err(EstimationError::Degenerate) => (cp.state.clone(), Some(DesyncKind::Empty)),
            Err(e) => return Err(e),
        };
        let next = FilterCheckpoint {
            time: time + 1,
            state: posterior.time_update(&self.plant, u),
            bits_hash: chain_hash(cp.bits_hash, time, index),
        };
        self.records.push_back(StepRecord {
            time,
            index,
            posterior,
            desync,
        });
        self.checkpoints.push_back(next);
        Ok(())
    }

    fn prune(&mut self) {
        if let Some(window) = self.retention {
            while self.checkpoints.len() > window + 1 {
                self.checkpoints.pop_front();
                self.records.pop_front();
                self.base += 1;
            }
        }
    }

    /// Measurement update with `index`, then time update with `u`.
    pub fn step(&mut self, index: u64, u: DVector<f64>) -> Result<&StepRecord<F>, EstimationError> {
        self.advance(index, &u)?;
        self.indices.push(index);
        self.inputs.push(u);
        self.prune();
        Ok(self.records.back().expect("just pushed"))
    }

    /// Replaces the indices from `from_time` on with `revised` and recomputes
    /// every later step from the stored checkpoint and recorded inputs.
    pub fn replay_from(&mut self, from_time: usize, revised: &[u64]) -> Result<(), EstimationError> {
        let horizon = self.time();
        if from_time > horizon || from_time + revised.len() > horizon {
            return Err(EstimationError::BeyondHorizon {
                time: from_time + revised.len(),
                horizon,
            });
        }
        if from_time < self.base {
            return Err(EstimationError::MissingCheckpoint(from_time));
        }
        self.indices[from_time..from_time + revised.len()].copy_from_slice(revised);
        let keep = from_time - self.base;
        self.checkpoints.truncate(keep + 1);
        self.records.truncate(keep);
        for t in from_time..horizon {
            let u = self.inputs[t].clone();
            self.advance(self.indices[t], &u)?;
        }
        Ok(())
    }

    /// Brings the session in line with the decoder's current index estimates
    /// for times `start..start + indices.len()`. Returns the earliest revised
    /// time.
    pub fn sync(&mut self, start: usize, indices: &[u64]) -> Result<Option<usize>, EstimationError> {
        let horizon = self.time();
        if start + indices.len() > horizon {
            return Err(EstimationError::BeyondHorizon {
                time: start + indices.len(),
                horizon,
            });
        }
        let first = (0..indices.len()).find(|&i| self.indices[start + i] != indices[i]);
        if let Some(i) = first {
            self.replay_from(start + i, &indices[i..])?;
        }
        Ok(first.map(|i| start + i))
    }
}
