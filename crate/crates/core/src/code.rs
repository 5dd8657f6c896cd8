//! Time-invariant (Toeplitz) causal linear codes and their systematic encoder.
//!
//! A code is described by its parity blocks `H_1, H_2, ...`, each
//! `(n - k) x n`. At time `t` (1-based) the codeword stream must satisfy
//! `sum_{j=1..t} H_j c_{t-j+1} = 0`. `H_1 = [A | I]` with `A` Bernoulli(p),
//! and every later block is Bernoulli(p) throughout. All bits are pure
//! functions of `(seed, block, row, col)`.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::gf2::{BitMatrix, BitVec};
use crate::rng::{self, PRNG_ID};

pub const CODE_FILE_MAGIC: &str = "anytime-code v1";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("invalid code parameters: {0}")]
    Params(String),
    #[error("unsupported code file version: {0:?}")]
    Version(String),
    #[error("unknown prng id {0:?}")]
    UnknownPrng(String),
    #[error("malformed code file: {0}")]
    Malformed(String),
    #[error("message has {got} bits, expected {expected}")]
    MessageLength { expected: usize, got: usize },
}

/// Parameters that fully determine a sampled code.
#[derive(Debug, Clone, PartialEq)]
pub struct CodeParams {
    pub n: usize,
    pub k: usize,
    pub p: f64,
    pub seed: u64,
    pub prng_id: String,
}

impl CodeParams {
    pub fn new(n: usize, k: usize, p: f64, seed: u64) -> Result<Self, CodeError> {
        let params = Self {
            n,
            k,
            p,
            seed,
            prng_id: PRNG_ID.to_string(),
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        if self.k == 0 || self.k >= self.n {
            return Err(CodeError::Params(format!(
                "need 1 <= k < n, got n={} k={}",
                self.n, self.k
            )));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(CodeError::Params(format!("p must lie in (0, 1], got {}", self.p)));
        }
        if self.prng_id != PRNG_ID {
            return Err(CodeError::UnknownPrng(self.prng_id.clone()));
        }
        Ok(())
    }

    /// Parity bits per time step, `n - k`.
    pub fn parity(&self) -> usize {
        self.n - self.k
    }

    pub fn rate(&self) -> f64 {
        self.k as f64 / self.n as f64
    }
}

/// A code from the Toeplitz ensemble with lazily generated parity blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzCode {
    params: CodeParams,
    /// `blocks[j]` holds `H_{j+1}`.
    blocks: Vec<BitMatrix>,
    /// Hand-specified codes: blocks past the given ones are zero.
    explicit: bool,
}

impl ToeplitzCode {
    pub fn sample(params: CodeParams) -> Result<Self, CodeError> {
        params.validate()?;
        let mut code = Self {
            params,
            blocks: Vec::new(),
            explicit: false,
        };
        code.extend_to(1);
        Ok(code)
    }

    /// A code with hand-chosen leading blocks; later blocks are all zero.
    /// Such codes cannot be serialized since their blocks are not derived.
    pub fn from_blocks(n: usize, k: usize, blocks: Vec<BitMatrix>) -> Result<Self, CodeError> {
        let params = CodeParams::new(n, k, 1.0, 0)?;
        if blocks.is_empty() {
            return Err(CodeError::Params("at least H_1 is required".into()));
        }
        for (i, b) in blocks.iter().enumerate() {
            if b.rows() != n - k || b.cols() != n {
                return Err(CodeError::Params(format!(
                    "H_{} is {}x{}, expected {}x{}",
                    i + 1,
                    b.rows(),
                    b.cols(),
                    n - k,
                    n
                )));
            }
        }
        Ok(Self {
            params,
            blocks,
            explicit: true,
        })
    }

    pub fn params(&self) -> &CodeParams {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    pub fn parity(&self) -> usize {
        self.params.parity()
    }

    /// Number of blocks generated so far.
    pub fn generated(&self) -> usize {
        self.blocks.len()
    }

    /// Generates blocks until `H_count` exists.
    pub fn extend_to(&mut self, count: usize) {
        while self.blocks.len() < count {
            let tau = self.blocks.len() + 1;
            let block = self.generate_block(tau);
            self.blocks.push(block);
        }
    }

    /// `H_tau` (1-based). Panics if not yet generated; call [`extend_to`] first.
    ///
    /// [`extend_to`]: ToeplitzCode::extend_to
    pub fn block(&self, tau: usize) -> &BitMatrix {
        assert!(tau >= 1, "blocks are 1-based");
        &self.blocks[tau - 1]
    }

    /// Returns `H_tau`, generating it if needed.
    pub fn block_mut(&mut self, tau: usize) -> &BitMatrix {
        self.extend_to(tau);
        self.block(tau)
    }

    fn generate_block(&self, tau: usize) -> BitMatrix {
        let CodeParams { n, k, p, seed, .. } = self.params;
        let nbar = n - k;
        let mut h = BitMatrix::zeros(nbar, n);
        if self.explicit {
            return h;
        }
        for r in 0..nbar {
            for c in 0..n {
                let bit = if tau == 1 && c >= k {
                    c - k == r
                } else {
                    rng::bernoulli(p, seed, rng::DOMAIN_CODE, tau as u64, r as u64, c as u64)
                };
                if bit {
                    h.set(r, c, true);
                }
            }
        }
        h
    }

    /// The `t`-step stacked parity check matrix, `(n-k)t x nt`.
    pub fn stacked_parity(&mut self, t: usize) -> BitMatrix {
        self.extend_to(t);
        let (n, nbar) = (self.n(), self.parity());
        let mut out = BitMatrix::zeros(nbar * t, n * t);
        for i in 0..t {
            for j in 0..=i {
                let h = &self.blocks[i - j];
                for r in 0..nbar {
                    for c in 0..n {
                        if h.get(r, c) {
                            out.set(i * nbar + r, j * n + c, true);
                        }
                    }
                }
            }
        }
        out
    }

    /// Text form: header line plus one parameter line. Blocks are re-derived.
    pub fn serialize(&self) -> Result<String, CodeError> {
        if self.explicit {
            return Err(CodeError::Params(
                "hand-specified codes have no parameter form".into(),
            ));
        }
        Ok(format!("{CODE_FILE_MAGIC}\n{}\n", ParamLine(&self.params)))
    }

    pub fn parse(text: &str) -> Result<Self, CodeError> {
        text.parse()
    }
}

struct ParamLine<'a>(&'a CodeParams);

impl fmt::Display for ParamLine<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.0;
        write!(
            f,
            "n={} k={} p={} seed={} prng={}",
            p.n, p.k, p.p, p.seed, p.prng_id
        )
    }
}

impl FromStr for ToeplitzCode {
    type Err = CodeError;

    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| CodeError::Malformed("empty file".into()))?;
        if header != CODE_FILE_MAGIC {
            return Err(CodeError::Version(header.to_string()));
        }
        let body = lines
            .next()
            .ok_or_else(|| CodeError::Malformed("missing parameter line".into()))?;
        let (mut n, mut k, mut p, mut seed, mut prng) = (None, None, None, None, None);
        for field in body.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| CodeError::Malformed(format!("field {field:?} has no '='")))?;
            let bad = |_| CodeError::Malformed(format!("bad value for {key}: {value:?}"));
            match key {
                "n" => n = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "k" => k = Some(value.parse::<usize>().map_err(|e| bad(e.to_string()))?),
                "p" => p = Some(value.parse::<f64>().map_err(|e| bad(e.to_string()))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|e| bad(e.to_string()))?),
                "prng" => prng = Some(value.to_string()),
                other => return Err(CodeError::Malformed(format!("unknown field {other:?}"))),
            }
        }
        let missing = |name: &str| CodeError::Malformed(format!("missing field {name}"));
        let prng_id = prng.ok_or_else(|| missing("prng"))?;
        if prng_id != PRNG_ID {
            return Err(CodeError::UnknownPrng(prng_id));
        }
        let params = CodeParams {
            n: n.ok_or_else(|| missing("n"))?,
            k: k.ok_or_else(|| missing("k"))?,
            p: p.ok_or_else(|| missing("p"))?,
            seed: seed.ok_or_else(|| missing("seed"))?,
            prng_id,
        };
        ToeplitzCode::sample(params)
    }
}

/// Systematic causal encoder. Keeps the full codeword history.
#[derive(Debug, Clone)]
pub struct Encoder {
    code: ToeplitzCode,
    history: Vec<BitVec>,
}

impl Encoder {
    pub fn new(code: ToeplitzCode) -> Self {
        Self {
            code,
            history: Vec::new(),
        }
    }

    pub fn code(&self) -> &ToeplitzCode {
        &self.code
    }

    /// Number of codewords emitted so far.
    pub fn time(&self) -> usize {
        self.history.len()
    }

    pub fn history(&self) -> &[BitVec] {
        &self.history
    }

    /// Emits `c_t = [b_t | p_t]` with `p_t = A b_t + sum_{j>=2} H_j c_{t-j+1}`.
    pub fn encode_step(&mut self, message: &BitVec) -> Result<BitVec, CodeError> {
        let (n, k) = (self.code.n(), self.code.k());
        if message.len() != k {
            return Err(CodeError::MessageLength {
                expected: k,
                got: message.len(),
            });
        }
        let t = self.history.len() + 1;
        self.code.extend_to(t);

        let mut c = BitVec::zeros(n);
        for i in 0..k {
            if message.get(i) {
                c.set(i, true);
            }
        }
        // H_1 c with zero parity part gives A b_t.
        let mut parity = self.code.block(1).mul_vec(&c);
        for j in 2..=t {
            let past = &self.history[t - j];
            parity.xor_assign(&self.code.block(j).mul_vec(past));
        }
        for r in 0..parity.len() {
            if parity.get(r) {
                c.set(k + r, true);
            }
        }
        self.history.push(c.clone());
        Ok(c)
    }
}
