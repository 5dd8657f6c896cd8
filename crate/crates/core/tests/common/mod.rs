//! Oracles shared by several integration test targets.

#![allow(dead_code)]

use anytime::channel::apply_pattern;
use anytime::code::{CodeParams, Encoder, ToeplitzCode};
use anytime::decoder::{BecDecoder, BitStatus};
use anytime::gf2::{BitMatrix, BitVec};

/// Dense row-major bit matrix from a `BitMatrix`, for oracle arithmetic that
/// must not go through the library's packed routines.
pub fn dense(m: &BitMatrix) -> Vec<Vec<u8>> {
    (0..m.rows())
        .map(|r| (0..m.cols()).map(|c| m.get(r, c) as u8).collect())
        .collect()
}

fn dense_mul_vec(m: &[Vec<u8>], v: &[u8]) -> Vec<u8> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(0u8, |acc, (a, b)| acc ^ (a & b)))
        .collect()
}

/// Consensus over every sequence `c_1..c_T` that satisfies the parity
/// equations `Σ_j H_j c_{t-j+1} = 0` for all `t` and agrees with the
/// unerased bits. Returns, per time and position, `Some(bit)` when all
/// completions agree and `None` otherwise.
pub fn brute_force_consensus(
    blocks: &[Vec<Vec<u8>>],
    received: &[Vec<Option<u8>>],
) -> Vec<Vec<Option<u8>>> {
    let t_len = received.len();
    let n = received.first().map_or(0, |r| r.len());
    let mut agree: Vec<Vec<Option<Option<u8>>>> = vec![vec![None; n]; t_len];
    let mut prefix: Vec<Vec<u8>> = Vec::new();
    dfs(blocks, received, &mut prefix, &mut agree);
    agree
        .into_iter()
        .map(|row| row.into_iter().map(|c| c.flatten()).collect())
        .collect()
}

fn dfs(
    blocks: &[Vec<Vec<u8>>],
    received: &[Vec<Option<u8>>],
    prefix: &mut Vec<Vec<u8>>,
    agree: &mut [Vec<Option<Option<u8>>>],
) {
    let t = prefix.len();
    if t == received.len() {
        for (tau, c) in prefix.iter().enumerate() {
            for (i, &b) in c.iter().enumerate() {
                let slot = &mut agree[tau][i];
                *slot = match *slot {
                    None => Some(Some(b)),
                    Some(Some(x)) if x == b => Some(Some(x)),
                    _ => Some(None),
                };
            }
        }
        return;
    }
    let rx = &received[t];
    let erased: Vec<usize> = (0..rx.len()).filter(|&i| rx[i].is_none()).collect();
    for fill in 0u32..(1 << erased.len()) {
        let mut c: Vec<u8> = rx.iter().map(|b| b.unwrap_or(0)).collect();
        for (j, &pos) in erased.iter().enumerate() {
            c[pos] = ((fill >> j) & 1) as u8;
        }
        // Block row t: H_1 c_t + H_2 c_{t-1} + ... + H_t c_1 = 0.
        let mut syn = dense_mul_vec(&blocks[0], &c);
        for j in 2..=t + 1 {
            let part = dense_mul_vec(&blocks[j - 1], &prefix[t + 1 - j]);
            for (s, p) in syn.iter_mut().zip(part) {
                *s ^= p;
            }
        }
        if syn.iter().all(|&s| s == 0) {
            prefix.push(c);
            dfs(blocks, received, prefix, agree);
            prefix.pop();
        }
    }
}

/// Outcome of one decoder-vs-oracle episode.
pub struct Episode {
    pub steps: usize,
    pub mismatches: usize,
}

/// Sends random messages through a sampled code with the given erasure masks
/// and, after every step, compares the decoder's determined set and values
/// with the brute-force consensus over the received prefix.
pub fn decoder_episode(params: CodeParams, messages: &[Vec<u8>], masks: &[Vec<bool>]) -> Episode {
    let mut code = ToeplitzCode::sample(params).expect("valid params");
    code.extend_to(masks.len());
    let blocks: Vec<Vec<Vec<u8>>> = (1..=masks.len()).map(|j| dense(code.block(j))).collect();
    let mut enc = Encoder::new(code.clone());
    let mut dec = BecDecoder::new(code);
    let mut received: Vec<Vec<Option<u8>>> = Vec::new();
    let mut mismatches = 0;
    for (msg, mask) in messages.iter().zip(masks) {
        let c = enc.encode_step(&BitVec::from_u8s(msg)).expect("message length");
        dec.observe_step(&apply_pattern(&c, mask).expect("mask length"))
            .expect("decoder accepts channel output");
        received.push(
            c.iter()
                .zip(mask)
                .map(|(b, &e)| if e { None } else { Some(b as u8) })
                .collect(),
        );
        let oracle = brute_force_consensus(&blocks, &received);
        for (tau, row) in oracle.iter().enumerate() {
            let (values, status) = dec.codeword(tau).expect("received");
            for (i, &o) in row.iter().enumerate() {
                let fixed = status[i] != BitStatus::Tentative;
                let ok = match o {
                    Some(b) => fixed && values.get(i) == (b == 1),
                    None => !fixed,
                };
                if !ok {
                    mismatches += 1;
                }
            }
        }
    }
    Episode {
        steps: masks.len(),
        mismatches,
    }
}
