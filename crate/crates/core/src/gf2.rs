//! Dense linear algebra over GF(2).
//!
//! Vectors and matrices are packed into 64-bit words. The elimination routine
//! [`solve_or_dual`] always returns a certificate: either a solution `e` with
//! `M e = t`, or a functional `y` with `yᵀM = 0` and `yᵀt = 1`. Pivoting is
//! deterministic (lowest available row index), so outputs are reproducible.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

/// Largest row or column count accepted by [`BitMatrix`].
pub const MAX_DIMENSION: usize = 4096;

const WORD: usize = 64;

fn word_count(len: usize) -> usize {
    len.div_ceil(WORD)
}

/// A vector over GF(2).
///
/// Ordering compares vectors of equal length as unsigned integers whose bit `i`
/// is coordinate `i`; shorter vectors sort first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; word_count(len)],
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut v = Self::zeros(len);
        for w in &mut v.words {
            *w = u64::MAX;
        }
        v.trim();
        v
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

    /// Vector of length `len` with ones exactly at `indices`.
    pub fn from_indices(len: usize, indices: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut v = Self::zeros(len);
        for i in indices {
            if i >= len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    found: i + 1,
                });
            }
            v.set(i, true);
        }
        Ok(v)
    }

    /// Low `len` bits of `mask`; `len` must be at most 64.
    pub fn from_u64(len: usize, mask: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 coordinates");
        let mut v = Self::zeros(len);
        if len > 0 {
            v.words[0] = mask;
            v.trim();
        }
        v
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range (len {})", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Number of coordinates set in both vectors.
    pub fn and_count(&self, other: &Self) -> usize {
        assert_eq!(self.len, other.len, "length mismatch");
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn xor_assign(&mut self, other: &Self) {
        assert_eq!(self.len, other.len, "length mismatch");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn and(&self, other: &Self) -> Self {
        assert_eq!(self.len, other.len, "length mismatch");
        Self {
            len: self.len,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(a, b)| a & b)
                .collect(),
        }
    }

    pub fn complement(&self) -> Self {
        let mut v = Self {
            len: self.len,
            words: self.words.iter().map(|w| !w).collect(),
        };
        v.trim();
        v
    }

    /// Indices of the set coordinates, ascending.
    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }

    /// Lowest set coordinate at or after `from`.
    fn first_one_from(&self, from: usize) -> Option<usize> {
        if from >= self.len {
            return None;
        }
        let mut wi = from / WORD;
        let mut w = self.words[wi] & (u64::MAX << (from % WORD));
        loop {
            if w != 0 {
                return Some(wi * WORD + w.trailing_zeros() as usize);
            }
            wi += 1;
            if wi >= self.words.len() {
                return None;
            }
            w = self.words[wi];
        }
    }

    fn trim(&mut self) {
        let tail = self.len % WORD;
        if tail != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
    }
}

impl Ord for BitVector {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.words.iter().rev().cmp(other.words.iter().rev()))
    }
}

impl PartialOrd for BitVector {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector(")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, ")")
    }
}

/// Coordinatewise sum.
pub fn vec_add(x: &BitVector, y: &BitVector) -> Result<BitVector> {
    check_len(x.len(), y.len())?;
    let mut out = x.clone();
    out.xor_assign(y);
    Ok(out)
}

/// Inner product over GF(2).
pub fn dot(x: &BitVector, y: &BitVector) -> Result<bool> {
    check_len(x.len(), y.len())?;
    Ok(x.and_count(y) % 2 == 1)
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// A dense matrix over GF(2), stored as packed rows.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    cols: usize,
    rows: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self {
            cols,
            rows: vec![BitVector::zeros(cols); rows],
        })
    }

    pub fn identity(k: usize) -> Result<Self> {
        let mut m = Self::zeros(k, k)?;
        for i in 0..k {
            m.rows[i].set(i, true);
        }
        Ok(m)
    }

    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self> {
        check_dims(rows.len(), cols)?;
        for r in &rows {
            check_len(cols, r.len())?;
        }
        Ok(Self { cols, rows })
    }

    /// Builds a `rows x columns.len()` matrix from its columns.
    pub fn from_columns(rows: usize, columns: &[BitVector]) -> Result<Self> {
        let mut m = Self::zeros(rows, columns.len())?;
        for (j, c) in columns.iter().enumerate() {
            check_len(rows, c.len())?;
            for i in c.iter_ones() {
                m.rows[i].set(j, true);
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        self.rows[i].set(j, value);
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.rows[i]
    }

    pub fn column(&self, j: usize) -> BitVector {
        assert!(j < self.cols, "column {j} out of range");
        let mut c = BitVector::zeros(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            if r.get(j) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn transpose(&self) -> BitMatrix {
        let cols: Vec<BitVector> = self.rows.clone();
        BitMatrix::from_columns(self.cols, &cols).expect("transpose keeps dimensions within cap")
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{} [", self.rows(), self.cols)?;
        for r in &self.rows {
            writeln!(f, "  {r:?}")?;
        }
        write!(f, "]")
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows > MAX_DIMENSION || cols > MAX_DIMENSION {
        Err(Error::DimensionTooLarge {
            rows,
            cols,
            max: MAX_DIMENSION,
        })
    } else {
        Ok(())
    }
}

pub fn mat_vec(m: &BitMatrix, x: &BitVector) -> Result<BitVector> {
    check_len(m.cols, x.len())?;
    let mut out = BitVector::zeros(m.rows());
    for (i, r) in m.rows.iter().enumerate() {
        if r.and_count(x) % 2 == 1 {
            out.set(i, true);
        }
    }
    Ok(out)
}

/// Outcome of [`solve_or_dual`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SolveOutcome {
    /// `M e = t`; free variables are zero.
    Solution(BitVector),
    /// `yᵀM = 0` and `yᵀt = 1`.
    Dual(BitVector),
}

/// Reduced row echelon form with row-operation tracking.
struct Reduction {
    /// Reduced rows of `M`.
    rows: Vec<BitVector>,
    /// Reduced right-hand side.
    rhs: BitVector,
    /// Row `i` of this matrix records which original rows were summed into `rows[i]`.
    history: Vec<BitVector>,
    /// `pivots[k]` is the pivot column of reduced row `k`.
    pivots: Vec<usize>,
}

fn reduce(m: &BitMatrix, t: &BitVector) -> Reduction {
    let n_rows = m.rows();
    let mut rows = m.rows.clone();
    let mut rhs = t.clone();
    let mut history: Vec<BitVector> = (0..n_rows)
        .map(|i| {
            let mut e = BitVector::zeros(n_rows);
            e.set(i, true);
            e
        })
        .collect();
    let mut pivots = Vec::new();
    let mut rank = 0;
    for col in 0..m.cols {
        if rank == n_rows {
            break;
        }
        let Some(p) = (rank..n_rows).find(|&i| rows[i].get(col)) else {
            continue;
        };
        if p != rank {
            rows.swap(p, rank);
            history.swap(p, rank);
            let (a, b) = (rhs.get(p), rhs.get(rank));
            rhs.set(p, b);
            rhs.set(rank, a);
        }
        let pivot_row = rows[rank].clone();
        let pivot_hist = history[rank].clone();
        let pivot_rhs = rhs.get(rank);
        for i in 0..n_rows {
            if i != rank && rows[i].get(col) {
                rows[i].xor_assign(&pivot_row);
                history[i].xor_assign(&pivot_hist);
                if pivot_rhs {
                    rhs.flip(i);
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    Reduction {
        rows,
        rhs,
        history,
        pivots,
    }
}

/// Decides `M e = t` and returns a solution or an inconsistency functional.
pub fn solve_or_dual(m: &BitMatrix, t: &BitVector) -> Result<SolveOutcome> {
    check_len(m.rows(), t.len())?;
    let red = reduce(m, t);
    let rank = red.pivots.len();
    // Rows past the rank are zero in M; a set right-hand side there is a contradiction.
    if let Some(i) = red.rhs.first_one_from(rank) {
        let y = red.history[i].clone();
        debug_assert!(is_dual(m, t, &y));
        return Ok(SolveOutcome::Dual(y));
    }
    let mut e = BitVector::zeros(m.cols);
    for (k, &col) in red.pivots.iter().enumerate() {
        if red.rhs.get(k) {
            e.set(col, true);
        }
    }
    debug_assert_eq!(mat_vec(m, &e).ok().as_ref(), Some(t));
    Ok(SolveOutcome::Solution(e))
}

fn is_dual(m: &BitMatrix, t: &BitVector, y: &BitVector) -> bool {
    let yt = dot(y, t).unwrap_or(false);
    let ym = mat_vec(&m.transpose(), y)
        .map(|v| v.is_zero())
        .unwrap_or(false);
    yt && ym
}

pub fn rank(m: &BitMatrix) -> usize {
    column_basis(m).len()
}

/// Indices of the pivot columns chosen by elimination, ascending. These
/// columns form a basis of the column space.
pub fn column_basis(m: &BitMatrix) -> Vec<usize> {
    let red = reduce(m, &BitVector::zeros(m.rows()));
    debug_assert!(red.rows[red.pivots.len()..].iter().all(BitVector::is_zero));
    red.pivots
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bv(bits: &[u8]) -> BitVector {
        BitVector::from_bools(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>())
    }

    #[test]
    fn identity_system_solves() {
        let m = BitMatrix::identity(2).unwrap();
        let out = solve_or_dual(&m, &bv(&[1, 0])).unwrap();
        assert_eq!(out, SolveOutcome::Solution(bv(&[1, 0])));
    }

    #[test]
    fn zero_system_gives_dual() {
        let m = BitMatrix::zeros(1, 1).unwrap();
        let out = solve_or_dual(&m, &bv(&[1])).unwrap();
        assert_eq!(out, SolveOutcome::Dual(bv(&[1])));
    }

    #[test]
    fn path_pair_traces_solve_example_defect() {
        // U = {1..5}, u0 = 5, columns are quotient coordinates of {1,2},{2,3},{3,4},{4,5}.
        let cols = [
            bv(&[1, 1, 0, 0]),
            bv(&[0, 1, 1, 0]),
            bv(&[0, 0, 1, 1]),
            bv(&[1, 1, 1, 0]), // {4,5}: x(u)+x(5) = (0,0,0,1)+1
        ];
        let m = BitMatrix::from_columns(4, &cols).unwrap();
        let out = solve_or_dual(&m, &bv(&[1, 0, 1, 0])).unwrap();
        assert_eq!(out, SolveOutcome::Solution(bv(&[1, 1, 0, 0])));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&BitMatrix::zeros(3, 5).unwrap()), 0);
        assert_eq!(rank(&BitMatrix::identity(7).unwrap()), 7);
        // All pairs on |U| = 4 with u0 = first vertex: coordinates over the other three.
        let mut cols = Vec::new();
        for x in 0..4 {
            for y in x + 1..4 {
                let mut full = [false; 4];
                full[x] = true;
                full[y] = true;
                let c: Vec<bool> = (1..4).map(|u| full[u] ^ full[0]).collect();
                cols.push(BitVector::from_bools(&c));
            }
        }
        let m = BitMatrix::from_columns(3, &cols).unwrap();
        assert_eq!(rank(&m), 2);
    }

    #[test]
    fn vector_arithmetic() {
        assert!(!dot(&bv(&[1, 1]), &bv(&[1, 1])).unwrap());
        let x = bv(&[1, 0, 1, 1]);
        assert!(vec_add(&x, &x).unwrap().is_zero());
        assert_eq!(mat_vec(&BitMatrix::identity(4).unwrap(), &x).unwrap(), x);
    }

    #[test]
    fn dimension_errors() {
        let m = BitMatrix::identity(2).unwrap();
        assert!(matches!(
            solve_or_dual(&m, &bv(&[1])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(dot(&bv(&[1]), &bv(&[1, 0])).is_err());
        assert!(matches!(
            BitMatrix::zeros(MAX_DIMENSION + 1, 1),
            Err(Error::DimensionTooLarge { .. })
        ));
    }

    #[test]
    fn ordering_is_numeric() {
        let a = BitVector::from_u64(4, 0b0001);
        let b = BitVector::from_u64(4, 0b1110);
        assert!(a < b);
        let wide_lo = BitVector::from_indices(130, [129]).unwrap();
        let wide_hi = BitVector::from_indices(130, [0, 1, 2]).unwrap();
        assert!(wide_hi < wide_lo);
    }

    #[test]
    fn iter_ones_crosses_words() {
        let v = BitVector::from_indices(200, [0, 63, 64, 199]).unwrap();
        assert_eq!(v.iter_ones().collect::<Vec<_>>(), vec![0, 63, 64, 199]);
        assert_eq!(v.count_ones(), 4);
        assert_eq!(v.complement().count_ones(), 196);
    }
}
