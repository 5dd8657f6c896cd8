//! Anytime-reliable Toeplitz tree codes over the binary erasure channel, with
//! the set-membership filters and closed-loop simulation needed to stabilize
//! unstable linear plants over such a channel.
//!
//! Module map:
//!
//! - [`gf2`]: packed GF(2) vectors and matrices, elimination, null spaces
//! - [`code`]: the Toeplitz code ensemble and its systematic causal encoder
//! - [`channel`]: seeded binary erasure channel
//! - [`decoder`]: incremental ML erasure decoder and reliability estimation
//! - [`estimation`]: quantizer, hypercuboidal and ellipsoidal filters, replay
//! - [`control`]: closed-loop simulation, code sweeps, metrics
//! - [`bounds`]: rate/exponent thresholds and spectral radius tools
//! - [`cli`]: the `anytime-sim` command line front end

pub mod bounds;
pub mod cli;
pub mod channel;
pub mod code;
pub mod control;
pub mod decoder;
pub mod estimation;
pub mod gf2;
pub mod rng;
