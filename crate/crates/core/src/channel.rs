//! Memoryless binary erasure channel.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2::BitVec;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelSymbol {
    Zero,
    One,
    Erased,
}

impl ChannelSymbol {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            ChannelSymbol::One
        } else {
            ChannelSymbol::Zero
        }
    }

    /// The carried bit, if not erased.
    pub fn bit(self) -> Option<bool> {
        match self {
            ChannelSymbol::Zero => Some(false),
            ChannelSymbol::One => Some(true),
            ChannelSymbol::Erased => None,
        }
    }

    pub fn is_erased(self) -> bool {
        self == ChannelSymbol::Erased
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("erasure probability must lie in [0, 1], got {0}")]
    Epsilon(f64),
    #[error("mask has {got} entries for a {expected}-bit codeword")]
    MaskLength { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    pub epsilon: f64,
    #[serde(default)]
    pub seed: u64,
}

impl ChannelConfig {
    pub fn new(epsilon: f64, seed: u64) -> Result<Self, ChannelError> {
        let cfg = Self { epsilon, seed };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ChannelError> {
        if (0.0..=1.0).contains(&self.epsilon) {
            Ok(())
        } else {
            Err(ChannelError::Epsilon(self.epsilon))
        }
    }

    /// Erasure decision for bit `pos` of the codeword sent at time `t`.
    pub fn erased(&self, t: u64, pos: usize) -> bool {
        rng::bernoulli(self.epsilon, self.seed, rng::DOMAIN_CHANNEL, t, pos as u64, 0)
    }

    /// Sends `codeword` at time `t`; each bit is erased independently.
    pub fn transmit(&self, codeword: &BitVec, t: u64) -> Vec<ChannelSymbol> {
        codeword
            .iter()
            .enumerate()
            .map(|(i, b)| {
                if self.erased(t, i) {
                    ChannelSymbol::Erased
                } else {
                    ChannelSymbol::from_bit(b)
                }
            })
            .collect()
    }
}

/// Erases exactly the positions flagged in `mask`.
pub fn apply_pattern(codeword: &BitVec, mask: &[bool]) -> Result<Vec<ChannelSymbol>, ChannelError> {
    if mask.len() != codeword.len() {
        return Err(ChannelError::MaskLength {
            expected: codeword.len(),
            got: mask.len(),
        });
    }
    Ok(codeword
        .iter()
        .zip(mask)
        .map(|(b, &e)| if e { ChannelSymbol::Erased } else { ChannelSymbol::from_bit(b) })
        .collect())
}
