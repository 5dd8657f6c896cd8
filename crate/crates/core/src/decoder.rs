//! Incremental maximum-likelihood decoding of Toeplitz codes on the erasure
//! channel, plus a Monte Carlo estimator of the anytime error profile.
//!
//! At every step the decoder solves the parity equations restricted to the
//! window of times `>= r`, where `r` is the earliest time that still has an
//! undetermined bit. Earlier rows only involve resolved bits, so their
//! contribution is folded into a cached partial syndrome per window row. One
//! reduced-row-echelon pass over the window gives the exact set of erased
//! positions on which every consistent codeword agrees; those become
//! determined, and the rest receive a tentative fill (free variables at zero).

use std::collections::VecDeque;

use rayon::prelude::*;
use thiserror::Error;

use crate::channel::{ChannelConfig, ChannelSymbol};
use crate::code::{CodeError, CodeParams, Encoder, ToeplitzCode};
use crate::gf2::{self, BitMatrix, BitVec, Gf2Error};
use crate::rng;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecodeError {
    #[error("received {got} symbols, code length is {expected}")]
    SymbolCount { expected: usize, got: usize },
    #[error("time {tau} has not been received yet (decoder is at {t})")]
    OutOfRange { tau: usize, t: usize },
    #[error("parity system is inconsistent; symbols do not come from a codeword")]
    Inconsistent(#[from] Gf2Error),
    #[error(transparent)]
    Code(#[from] CodeError),
}

/// Confidence in a decoded bit, ordered from weakest to strongest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BitStatus {
    /// Erased and not forced: one of several consistent values.
    Tentative,
    /// Erased but forced by the parity equations.
    Determined,
    /// Received unerased.
    Known,
}

/// Per-step summary of the decoder's work.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecodeReport {
    /// Time of this step (1-based).
    pub t: usize,
    /// Delay of the earliest unresolved time, `t - r + 1`; zero if all resolved.
    pub d: usize,
    pub window_rows: usize,
    pub window_cols: usize,
    pub newly_determined: usize,
}

#[derive(Debug, Clone)]
pub struct BecDecoder {
    code: ToeplitzCode,
    /// Current estimate of every codeword, indexed by 0-based time.
    values: Vec<BitVec>,
    /// One where the bit is known or determined.
    fixed: Vec<BitVec>,
    status: Vec<Vec<BitStatus>>,
    /// Every time below this index is fully known or determined.
    resolved_before: usize,
    /// Contribution of times `< resolved_before` to each window row block,
    /// front entry belongs to time `resolved_before`.
    partial: VecDeque<BitVec>,
}

impl BecDecoder {
    pub fn new(code: ToeplitzCode) -> Self {
        Self {
            code,
            values: Vec::new(),
            fixed: Vec::new(),
            status: Vec::new(),
            resolved_before: 0,
            partial: VecDeque::new(),
        }
    }

    pub fn code(&self) -> &ToeplitzCode {
        &self.code
    }

    /// Number of steps observed.
    pub fn time(&self) -> usize {
        self.values.len()
    }

    /// 0-based index of the earliest time with an undetermined bit.
    pub fn resolved_before(&self) -> usize {
        self.resolved_before
    }

    /// Current codeword estimate at 0-based time `tau`.
    pub fn codeword(&self, tau: usize) -> Option<(&BitVec, &[BitStatus])> {
        Some((self.values.get(tau)?, self.status.get(tau)?.as_slice()))
    }

    pub fn observe_step(&mut self, symbols: &[ChannelSymbol]) -> Result<DecodeReport, DecodeError> {
        let n = self.code.n();
        if symbols.len() != n {
            return Err(DecodeError::SymbolCount {
                expected: n,
                got: symbols.len(),
            });
        }
        let t = self.values.len();
        self.code.extend_to(t + 1);

        let mut value = BitVec::zeros(n);
        let mut fixed = BitVec::zeros(n);
        let mut status = Vec::with_capacity(n);
        for (i, s) in symbols.iter().enumerate() {
            match s.bit() {
                Some(b) => {
                    value.set(i, b);
                    fixed.set(i, true);
                    status.push(BitStatus::Known);
                }
                None => status.push(BitStatus::Tentative),
            }
        }
        self.values.push(value);
        self.fixed.push(fixed);
        self.status.push(status);

        let r = self.resolved_before;
        let mut acc = BitVec::zeros(self.code.parity());
        for s in 0..r {
            acc.xor_assign(&self.code.block(t - s + 1).mul_vec(&self.values[s]));
        }
        self.partial.push_back(acc);

        let (window_rows, window_cols, newly_determined) = self.solve_window()?;
        self.advance();

        let d = self.values.len() - self.resolved_before;
        Ok(DecodeReport {
            t: t + 1,
            d,
            window_rows,
            window_cols,
            newly_determined,
        })
    }

    fn solve_window(&mut self) -> Result<(usize, usize, usize), DecodeError> {
        let r = self.resolved_before;
        let t = self.values.len() - 1;
        let nbar = self.code.parity();

        let columns: Vec<(usize, usize)> = (r..=t)
            .flat_map(|s| {
                self.status[s]
                    .iter()
                    .enumerate()
                    .filter(|(_, st)| **st == BitStatus::Tentative)
                    .map(move |(i, _)| (s, i))
            })
            .collect();
        let rows = nbar * (t + 1 - r);

        let known: Vec<BitVec> = (r..=t)
            .map(|s| {
                let mut v = self.values[s].clone();
                v.and_assign(&self.fixed[s]);
                v
            })
            .collect();

        let mut m = BitMatrix::zeros(rows, columns.len());
        let mut rhs = BitVec::zeros(rows);
        for tau in r..=t {
            let mut syn = self.partial[tau - r].clone();
            for s in r..=tau {
                syn.xor_assign(&self.code.block(tau - s + 1).mul_vec(&known[s - r]));
            }
            let base = (tau - r) * nbar;
            for rho in 0..nbar {
                if syn.get(rho) {
                    rhs.set(base + rho, true);
                }
            }
            for (j, &(s, i)) in columns.iter().enumerate() {
                if s > tau {
                    break;
                }
                let h = self.code.block(tau - s + 1);
                for rho in 0..nbar {
                    if h.get(rho, i) {
                        m.set(base + rho, j, true);
                    }
                }
            }
        }

        if columns.is_empty() {
            return match rhs.first_one() {
                None => Ok((rows, 0, 0)),
                Some(row) => Err(Gf2Error::Inconsistent { row }.into()),
            };
        }
        let sol = gf2::solve_with_determination(&m, &rhs)?;
        let mut newly = 0;
        for (j, &(s, i)) in columns.iter().enumerate() {
            self.values[s].set(i, sol.solution.get(j));
            if sol.determined.get(j) {
                self.status[s][i] = BitStatus::Determined;
                self.fixed[s].set(i, true);
                newly += 1;
            }
        }
        Ok((rows, columns.len(), newly))
    }

    fn advance(&mut self) {
        let t = self.values.len() - 1;
        while self.resolved_before <= t
            && self.status[self.resolved_before]
                .iter()
                .all(|s| *s != BitStatus::Tentative)
        {
            let r = self.resolved_before;
            self.partial.pop_front();
            for (idx, tau) in (r + 1..=t).enumerate() {
                let contrib = self.code.block(tau - r + 1).mul_vec(&self.values[r]);
                self.partial[idx].xor_assign(&contrib);
            }
            self.resolved_before += 1;
        }
    }

    /// Message bits at 0-based time `tau` and the weakest status among them.
    pub fn message_estimate(&self, tau: usize) -> Result<(BitVec, BitStatus), DecodeError> {
        let t = self.values.len();
        if tau >= t {
            return Err(DecodeError::OutOfRange { tau, t });
        }
        let k = self.code.k();
        let bits = self.values[tau].slice(0, k);
        let status = self.status[tau][..k]
            .iter()
            .copied()
            .min()
            .unwrap_or(BitStatus::Known);
        Ok((bits, status))
    }

    /// Message estimates for every received time.
    pub fn message_estimates(&self) -> Vec<BitVec> {
        let k = self.code.k();
        self.values.iter().map(|v| v.slice(0, k)).collect()
    }
}

/// Empirical anytime error profile.
#[derive(Debug, Clone, PartialEq)]
pub struct ReliabilityCurve {
    pub n: usize,
    pub trials: usize,
    /// Pooled `(trial, t)` samples.
    pub samples: u64,
    /// `exact[d]`: samples whose earliest message error sits at delay `d`
    /// (`d = 0` means no error).
    pub exact: Vec<u64>,
    /// Histogram of the decoder's earliest-unresolved delay over pooled steps.
    pub unresolved_delay: Vec<u64>,
    pub fit: Option<DecayFit>,
}

/// Least-squares fit of `log2 P(earliest error at delay >= d) = intercept + slope d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub intercept: f64,
    /// `2^intercept`.
    pub eta: f64,
    /// Smallest delay from which every populated tail lies on or under the fit.
    pub onset: usize,
    /// `-slope / n`: exponent per channel use.
    pub beta_per_use: f64,
    pub points: usize,
}

impl ReliabilityCurve {
    fn from_counts(n: usize, trials: usize, samples: u64, exact: Vec<u64>, unresolved: Vec<u64>) -> Self {
        let mut curve = Self {
            n,
            trials,
            samples,
            exact,
            unresolved_delay: unresolved,
            fit: None,
        };
        curve.fit = curve.fit_decay();
        curve
    }

    pub fn max_delay(&self) -> usize {
        self.exact.len().saturating_sub(1)
    }

    /// Samples whose earliest error is at delay `>= d`, for `d >= 1`.
    pub fn tail_count(&self, d: usize) -> u64 {
        self.exact.iter().skip(d.max(1)).sum()
    }

    pub fn tail_freq(&self, d: usize) -> f64 {
        if self.samples == 0 {
            0.0
        } else {
            self.tail_count(d) as f64 / self.samples as f64
        }
    }

    /// Wilson score interval for the tail frequency at delay `d`.
    pub fn tail_interval(&self, d: usize, z: f64) -> (f64, f64) {
        wilson(self.tail_count(d), self.samples, z)
    }

    fn fit_decay(&self) -> Option<DecayFit> {
        let pts: Vec<(f64, f64)> = (1..=self.max_delay())
            .filter(|&d| self.tail_count(d) > 0)
            .map(|d| (d as f64, self.tail_freq(d).log2()))
            .collect();
        if pts.len() < 2 {
            return None;
        }
        let np = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / np;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / np;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let under = |d: usize| {
            let f = self.tail_freq(d);
            f == 0.0 || f.log2() <= intercept + slope * d as f64 + 1e-12
        };
        let onset = (1..=self.max_delay())
            .find(|&d| (d..=self.max_delay()).all(under))
            .unwrap_or(self.max_delay());
        Some(DecayFit {
            slope,
            intercept,
            eta: intercept.exp2(),
            onset,
            beta_per_use: -slope / self.n as f64,
            points: pts.len(),
        })
    }

    /// `d,count,freq,log2freq` rows, tail statistics for `d = 1..=max`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("d,count,freq,log2freq\n");
        for d in 1..=self.max_delay().max(1) {
            let count = self.tail_count(d);
            let freq = self.tail_freq(d);
            let log2 = if count == 0 {
                "-inf".to_string()
            } else {
                format!("{:.6}", freq.log2())
            };
            out.push_str(&format!("{d},{count},{freq:.9},{log2}\n"));
        }
        out
    }
}

pub fn wilson(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Settings for a Monte Carlo reliability run.
#[derive(Debug, Clone)]
pub struct ReliabilityRun {
    pub code: CodeParams,
    pub epsilon: f64,
    /// Steps per trial.
    pub horizon: usize,
    pub trials: usize,
    pub master_seed: u64,
}

struct TrialCounts {
    samples: u64,
    exact: Vec<u64>,
    unresolved: Vec<u64>,
}

fn bump(hist: &mut Vec<u64>, d: usize) {
    if hist.len() <= d {
        hist.resize(d + 1, 0);
    }
    hist[d] += 1;
}

fn merge(a: &mut Vec<u64>, b: &[u64]) {
    if a.len() < b.len() {
        a.resize(b.len(), 0);
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
}

fn run_trial(code: &ToeplitzCode, run: &ReliabilityRun, trial: usize) -> Result<TrialCounts, DecodeError> {
    let k = code.k();
    let msg_seed = rng::derive_seed(run.master_seed, &format!("trial/{trial}/message"));
    let ch_seed = rng::derive_seed(run.master_seed, &format!("trial/{trial}/channel"));
    let channel = ChannelConfig {
        epsilon: run.epsilon,
        seed: ch_seed,
    };
    let mut enc = Encoder::new(code.clone());
    let mut dec = BecDecoder::new(code.clone());
    let mut sent = Vec::with_capacity(run.horizon);
    let mut counts = TrialCounts {
        samples: 0,
        exact: vec![0],
        unresolved: Vec::new(),
    };
    let pool_from = run.horizon.div_ceil(2).max(1);
    for t in 1..=run.horizon {
        let mut b = BitVec::zeros(k);
        for i in 0..k {
            b.set(i, rng::mix(msg_seed, 0, t as u64, i as u64, 0) & 1 == 1);
        }
        let c = enc.encode_step(&b).expect("message length matches code");
        let report = dec.observe_step(&channel.transmit(&c, t as u64))?;
        sent.push(b);
        if t < pool_from {
            continue;
        }
        counts.samples += 1;
        bump(&mut counts.unresolved, report.d);
        let estimates = dec.message_estimates();
        let earliest = (0..t).find(|&tau| estimates[tau] != sent[tau]);
        bump(&mut counts.exact, earliest.map_or(0, |tau| t - tau));
    }
    Ok(counts)
}

/// Monte Carlo estimate of the earliest-error delay profile, pooled over the
/// second half of the horizon. Trials run in parallel with disjoint seeds.
pub fn estimate_reliability(run: &ReliabilityRun) -> Result<ReliabilityCurve, DecodeError> {
    let mut code = ToeplitzCode::sample(run.code.clone())?;
    code.extend_to(run.horizon.max(1));
    let per_trial: Vec<TrialCounts> = (0..run.trials)
        .into_par_iter()
        .map(|j| run_trial(&code, run, j))
        .collect::<Result<_, _>>()?;
    let mut samples = 0;
    let mut exact = vec![0];
    let mut unresolved = Vec::new();
    for c in &per_trial {
        samples += c.samples;
        merge(&mut exact, &c.exact);
        merge(&mut unresolved, &c.unresolved);
    }
    Ok(ReliabilityCurve::from_counts(
        code.n(),
        run.trials,
        samples,
        exact,
        unresolved,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::apply_pattern;

    fn tiny_code() -> ToeplitzCode {
        ToeplitzCode::from_blocks(
            2,
            1,
            vec![
                BitMatrix::from_rows(&[[1, 1]]),
                BitMatrix::from_rows(&[[1, 0]]),
            ],
        )
        .unwrap()
    }

    #[test]
    fn hand_example_resolves_after_one_step() {
        let code = tiny_code();
        let mut enc = Encoder::new(code.clone());
        let c1 = enc.encode_step(&BitVec::from_u8s(&[1])).unwrap();
        let c2 = enc.encode_step(&BitVec::from_u8s(&[0])).unwrap();
        assert_eq!(c1, BitVec::from_u8s(&[1, 1]));
        assert_eq!(c2, BitVec::from_u8s(&[0, 1]));

        let mut dec = BecDecoder::new(code);
        let r1 = dec.observe_step(&apply_pattern(&c1, &[true, true]).unwrap()).unwrap();
        assert_eq!(r1.d, 1);
        assert_eq!(dec.message_estimate(0).unwrap().1, BitStatus::Tentative);
        let r2 = dec.observe_step(&apply_pattern(&c2, &[false, false]).unwrap()).unwrap();
        assert_eq!(r2.d, 0);
        assert_eq!(r2.newly_determined, 2);
        let (bits, status) = dec.message_estimate(0).unwrap();
        assert_eq!(status, BitStatus::Determined);
        assert_eq!(bits, BitVec::from_u8s(&[1]));
    }

    #[test]
    fn noiseless_reports_zero_delay() {
        let code = ToeplitzCode::sample(CodeParams::new(15, 6, 0.5, 9).unwrap()).unwrap();
        let mut enc = Encoder::new(code.clone());
        let mut dec = BecDecoder::new(code);
        for t in 0..20u64 {
            let mut b = BitVec::zeros(6);
            b.set((t % 6) as usize, true);
            let c = enc.encode_step(&b).unwrap();
            let rep = dec.observe_step(&apply_pattern(&c, &[false; 15]).unwrap()).unwrap();
            assert_eq!(rep.d, 0);
            assert_eq!(rep.window_cols, 0);
            assert_eq!(dec.message_estimate(t as usize).unwrap(), (b, BitStatus::Known));
        }
    }

    #[test]
    fn wrong_symbol_count_and_range() {
        let mut dec = BecDecoder::new(tiny_code());
        assert!(matches!(
            dec.observe_step(&[ChannelSymbol::Zero]),
            Err(DecodeError::SymbolCount { .. })
        ));
        assert!(matches!(dec.message_estimate(0), Err(DecodeError::OutOfRange { .. })));
    }

    #[test]
    fn inconsistent_symbols_are_rejected() {
        // [1,0] violates H_1 = [1 1].
        let mut dec = BecDecoder::new(tiny_code());
        let err = dec
            .observe_step(&[ChannelSymbol::One, ChannelSymbol::Zero])
            .unwrap_err();
        assert!(matches!(err, DecodeError::Inconsistent(_)));
    }

    #[test]
    fn wilson_bounds() {
        let (lo, hi) = wilson(0, 100, 1.96);
        assert_eq!(lo, 0.0);
        assert!(hi > 0.0 && hi < 0.05);
        let (lo, hi) = wilson(50, 100, 1.96);
        assert!(lo < 0.5 && hi > 0.5);
    }
}
