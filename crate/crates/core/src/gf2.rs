//! Dense linear algebra over GF(2).
//!
//! Vectors and matrices are packed into 64-bit words, row-major. Padding bits
//! past the logical length of a row are always zero, so word-level equality and
//! XOR are exact.
//!
//! Pivot selection is deterministic: for each column in order, the first row at
//! or below the current pivot row with a one in that column is chosen.

use std::fmt;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Gf2Error {
    #[error("inconsistent linear system (row {row} reduces to 0 = 1)")]
    Inconsistent { row: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
}

/// A packed vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    words: Vec<u64>,
    len: usize,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            words: vec![0; words_for(len)],
            len,
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Builds a vector from `0`/`1` entries; any nonzero value counts as one.
    pub fn from_u8s(bits: &[u8]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                v.set(i, true);
            }
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range (len={})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "xor_assign: length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "and_assign: length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Inner product over GF(2).
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "dot: length mismatch");
        let ones: u32 = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum();
        ones & 1 == 1
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD + w.trailing_zeros() as usize)
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    /// Copies `len` bits starting at `start` into a new vector.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len, "slice out of range");
        let mut out = BitVec::zeros(len);
        for i in 0..len {
            if self.get(start + i) {
                out.set(i, true);
            }
        }
        out
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec[")?;
        for b in self.iter() {
            write!(f, "{}", b as u8)?;
        }
        write!(f, "]")
    }
}

/// A dense row-major matrix over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        Self {
            rows,
            cols,
            stride,
            bits: vec![0; rows * stride],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from rows of `0`/`1` entries.
    ///
    /// # Panics
    /// Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[u8]>>(rows: &[R]) -> Self {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            assert_eq!(r.len(), cols, "ragged row {i}");
            for (j, &b) in r.iter().enumerate() {
                if b != 0 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_bitvec_rows(rows: &[BitVec], cols: usize) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> bool {
        debug_assert!(r < self.rows && c < self.cols);
        (self.bits[r * self.stride + c / WORD] >> (c % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, value: bool) {
        assert!(r < self.rows && c < self.cols, "entry ({r},{c}) out of range");
        let w = &mut self.bits[r * self.stride + c / WORD];
        let mask = 1u64 << (c % WORD);
        if value {
            *w |= mask;
        } else {
            *w &= !mask;
        }
    }

    #[inline]
    fn row_words(&self, r: usize) -> &[u64] {
        &self.bits[r * self.stride..(r + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, r: usize) -> &mut [u64] {
        &mut self.bits[r * self.stride..(r + 1) * self.stride]
    }

    pub fn row(&self, r: usize) -> BitVec {
        BitVec {
            words: self.row_words(r).to_vec(),
            len: self.cols,
        }
    }

    pub fn column(&self, c: usize) -> BitVec {
        let mut v = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            if self.get(r, c) {
                v.set(r, true);
            }
        }
        v
    }

    /// `row[dst] ^= row[src]`.
    #[inline]
    fn xor_row_into(&mut self, src: usize, dst: usize) {
        debug_assert_ne!(src, dst);
        let s = self.stride;
        let (a, b) = if src < dst {
            let (lo, hi) = self.bits.split_at_mut(dst * s);
            (&lo[src * s..src * s + s], &mut hi[..s])
        } else {
            let (lo, hi) = self.bits.split_at_mut(src * s);
            (&hi[..s] as &[u64], &mut lo[dst * s..dst * s + s])
        };
        for (d, x) in b.iter_mut().zip(a) {
            *d ^= x;
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.stride {
            self.bits.swap(a * self.stride + w, b * self.stride + w);
        }
    }

    /// Matrix-vector product over GF(2).
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.cols, "mul_vec: dimension mismatch");
        let mut out = BitVec::zeros(self.rows);
        for r in 0..self.rows {
            let parity: u32 = self
                .row_words(r)
                .iter()
                .zip(v.words())
                .map(|(a, b)| (a & b).count_ones())
                .sum();
            if parity & 1 == 1 {
                out.set(r, true);
            }
        }
        out
    }

    /// Matrix product `self * rhs` over GF(2).
    pub fn mul(&self, rhs: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, rhs.rows, "mul: dimension mismatch");
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (src, dst) = (rhs.row_words(k).to_vec(), out.row_words_mut(r));
                    for (d, s) in dst.iter_mut().zip(src) {
                        *d ^= s;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    t.set(c, r, true);
                }
            }
        }
        t
    }

    /// Stacks `self` on top of `below`.
    pub fn vstack(&self, below: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, below.cols, "vstack: column mismatch");
        let mut out = self.clone();
        out.rows += below.rows;
        out.bits.extend_from_slice(&below.bits);
        out
    }

    /// Appends `extra` as additional columns on the right.
    pub fn hstack(&self, extra: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, extra.rows, "hstack: row mismatch");
        let mut out = BitMatrix::zeros(self.rows, self.cols + extra.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if self.get(r, c) {
                    out.set(r, c, true);
                }
            }
            for c in 0..extra.cols {
                if extra.get(r, c) {
                    out.set(r, self.cols + c, true);
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn rank(&self) -> usize {
        rref(self).rank
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", self.get(r, c) as u8)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Reduced row echelon form together with its pivot structure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RrefResult {
    pub reduced: BitMatrix,
    /// Strictly increasing; `pivot_columns[i]` is the pivot of row `i`.
    pub pivot_columns: Vec<usize>,
    pub rank: usize,
}

/// In-place Gauss-Jordan elimination restricted to the first `ncols` columns.
/// Returns the pivot columns.
fn eliminate(m: &mut BitMatrix, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut prow = 0;
    for c in 0..ncols {
        if prow == m.rows {
            break;
        }
        let Some(found) = (prow..m.rows).find(|&r| m.get(r, c)) else {
            continue;
        };
        m.swap_rows(prow, found);
        for r in 0..m.rows {
            if r != prow && m.get(r, c) {
                m.xor_row_into(prow, r);
            }
        }
        pivots.push(c);
        prow += 1;
    }
    pivots
}

pub fn rref(m: &BitMatrix) -> RrefResult {
    let mut reduced = m.clone();
    let pivot_columns = eliminate(&mut reduced, m.cols);
    RrefResult {
        rank: pivot_columns.len(),
        reduced,
        pivot_columns,
    }
}

/// Basis of the left null space: returns `N` with `N * m = 0` whose rows are
/// linearly independent and number `rows(m) - rank(m)`.
pub fn left_null_space(m: &BitMatrix) -> BitMatrix {
    // Row-reduce [m | I]; rows whose m-part vanishes carry the combinations.
    let aug = m.hstack(&BitMatrix::identity(m.rows));
    let mut red = aug;
    let pivots = eliminate(&mut red, m.cols);
    let rank = pivots.len();
    let mut out = BitMatrix::zeros(m.rows - rank, m.rows);
    for (i, r) in (rank..m.rows).enumerate() {
        for c in 0..m.rows {
            if red.get(r, m.cols + c) {
                out.set(i, c, true);
            }
        }
    }
    out
}

/// Solution of a consistent system together with which coordinates are forced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Determination {
    /// A particular solution with every free coordinate set to zero.
    pub solution: BitVec,
    /// `determined[j]` iff every solution agrees on coordinate `j`.
    pub determined: BitVec,
    pub rank: usize,
}

/// Solves `m x = s` and reports the coordinates on which all solutions agree.
///
/// Coordinate `j` is forced exactly when `e_j` lies in the row space of `m`,
/// which in reduced form means `j` is a pivot column whose row has no other
/// nonzero entry.
pub fn solve_with_determination(m: &BitMatrix, s: &BitVec) -> Result<Determination, Gf2Error> {
    if s.len() != m.rows {
        return Err(Gf2Error::Dimension {
            expected: m.rows,
            got: s.len(),
        });
    }
    let mut rhs = BitMatrix::zeros(m.rows, 1);
    for r in 0..m.rows {
        if s.get(r) {
            rhs.set(r, 0, true);
        }
    }
    let mut aug = m.hstack(&rhs);
    let pivots = eliminate(&mut aug, m.cols);
    let rank = pivots.len();
    if let Some(row) = (rank..m.rows).find(|&r| aug.get(r, m.cols)) {
        return Err(Gf2Error::Inconsistent { row });
    }
    let mut solution = BitVec::zeros(m.cols);
    let mut determined = BitVec::zeros(m.cols);
    for (r, &p) in pivots.iter().enumerate() {
        if aug.get(r, m.cols) {
            solution.set(p, true);
        }
        // The row minus its pivot bit must be empty across the coefficient part.
        let row = aug.row(r);
        let others = (0..m.cols).filter(|&c| c != p && row.get(c)).count();
        if others == 0 {
            determined.set(p, true);
        }
    }
    Ok(Determination {
        solution,
        determined,
        rank,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_rref() {
        let r = rref(&BitMatrix::identity(3));
        assert_eq!(r.pivot_columns, vec![0, 1, 2]);
        assert_eq!(r.rank, 3);
    }

    #[test]
    fn duplicate_rows() {
        let r = rref(&BitMatrix::from_rows(&[[1, 1], [1, 1]]));
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivot_columns, vec![0]);
    }

    #[test]
    fn null_space_edge_cases() {
        assert_eq!(left_null_space(&BitMatrix::identity(4)).rows(), 0);
        let n = left_null_space(&BitMatrix::zeros(3, 2));
        assert_eq!(n, BitMatrix::identity(3));
    }

    #[test]
    fn unique_solution() {
        let m = BitMatrix::from_rows(&[[1, 1], [0, 1]]);
        let d = solve_with_determination(&m, &BitVec::from_u8s(&[1, 1])).unwrap();
        assert_eq!(d.solution, BitVec::from_u8s(&[0, 1]));
        assert_eq!(d.determined, BitVec::from_u8s(&[1, 1]));
    }

    #[test]
    fn underdetermined() {
        let m = BitMatrix::from_rows(&[[1, 1]]);
        let d = solve_with_determination(&m, &BitVec::from_u8s(&[0])).unwrap();
        assert_eq!(d.solution, BitVec::zeros(2));
        assert!(d.determined.is_zero());
    }

    #[test]
    fn inconsistent_is_reported() {
        let m = BitMatrix::from_rows(&[[1, 0], [1, 0]]);
        let err = solve_with_determination(&m, &BitVec::from_u8s(&[1, 0])).unwrap_err();
        assert!(matches!(err, Gf2Error::Inconsistent { .. }));
    }

    #[test]
    fn wide_rows_cross_word_boundary() {
        let mut m = BitMatrix::zeros(3, 130);
        m.set(0, 0, true);
        m.set(0, 129, true);
        m.set(1, 64, true);
        m.set(2, 129, true);
        let r = rref(&m);
        assert_eq!(r.rank, 3);
        assert_eq!(r.pivot_columns, vec![0, 64, 129]);
        assert!(!r.reduced.get(0, 129));
    }

    #[test]
    fn vstack_and_mul() {
        let a = BitMatrix::from_rows(&[[1, 0, 1]]);
        let b = BitMatrix::from_rows(&[[0, 1, 1]]);
        let s = a.vstack(&b);
        assert_eq!(s.rows(), 2);
        let v = BitVec::from_u8s(&[1, 1, 0]);
        assert_eq!(s.mul_vec(&v), BitVec::from_u8s(&[1, 1]));
        let p = s.mul(&s.transpose());
        assert_eq!(p, BitMatrix::from_rows(&[[0, 1], [1, 0]]));
    }
}
