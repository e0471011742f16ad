//! Dense matrices over GF(2), packed 64 bits per word, row-major.
//!
//! This is the common currency for codewords, noise patterns and the binary
//! forms of the network transfer matrices. Arithmetic is plain XOR/AND with
//! Gaussian elimination for rank, inverse and solving.

use crate::error::{Error, Result};
use rand::Rng;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64).max(1);
        BitMatrix {
            rows,
            cols,
            words_per_row,
            words: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                if f(r, c) {
                    m.set(r, c, true);
                }
            }
        }
        m
    }

    /// Rows given as slices of 0/1 values.
    pub fn from_rows(rows: &[&[u8]]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        Self::from_fn(r, c, |i, j| rows[i][j] != 0)
    }

    pub fn random(rows: usize, cols: usize, rng: &mut impl Rng) -> Self {
        Self::from_fn(rows, cols, |_, _| rng.gen::<bool>())
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
        (self.words[r * self.words_per_row + c / 64] >> (c % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: bool) {
        debug_assert!(r < self.rows && c < self.cols);
        let w = &mut self.words[r * self.words_per_row + c / 64];
        if v {
            *w |= 1 << (c % 64);
        } else {
            *w &= !(1 << (c % 64));
        }
    }

    #[inline]
    pub fn flip(&mut self, r: usize, c: usize) {
        self.words[r * self.words_per_row + c / 64] ^= 1 << (c % 64);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::DimensionMismatch(format!(
                "xor {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        Ok(())
    }

    pub fn xor(&self, other: &BitMatrix) -> Result<BitMatrix> {
        let mut out = self.clone();
        out.xor_assign(other)?;
        Ok(out)
    }

    fn row_xor(&mut self, from: usize, to: usize) {
        let (f, t) = (from * self.words_per_row, to * self.words_per_row);
        for w in 0..self.words_per_row {
            let v = self.words[f + w];
            self.words[t + w] ^= v;
        }
    }

    fn row_swap(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for w in 0..self.words_per_row {
            self.words.swap(a * self.words_per_row + w, b * self.words_per_row + w);
        }
    }

    pub fn mul(&self, other: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch(format!(
                "mul {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                if self.get(r, k) {
                    let (src, dst) = (k * other.words_per_row, r * out.words_per_row);
                    for w in 0..other.words_per_row {
                        out.words[dst + w] ^= other.words[src + w];
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix times a bit vector of length `cols`.
    pub fn mul_bits(&self, x: &[bool]) -> Result<Vec<bool>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "mul_bits {}x{} by vector of length {}",
                self.rows,
                self.cols,
                x.len()
            )));
        }
        let mut out = vec![false; self.rows];
        for (r, o) in out.iter_mut().enumerate() {
            let mut acc = false;
            for (c, &xc) in x.iter().enumerate() {
                acc ^= xc & self.get(r, c);
            }
            *o = acc;
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..m.cols {
            if rank == m.rows {
                break;
            }
            let pivot = (rank..m.rows).find(|&r| m.get(r, c));
            let Some(p) = pivot else { continue };
            m.row_swap(rank, p);
            for r in 0..m.rows {
                if r != rank && m.get(r, c) {
                    m.row_xor(rank, r);
                }
            }
            rank += 1;
        }
        rank
    }

    /// Inverse via Gauss-Jordan on [M | I]. Errors if not square or singular.
    pub fn inverse(&self) -> Result<BitMatrix> {
        if self.rows != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "inverse of {}x{}",
                self.rows, self.cols
            )));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut inv = BitMatrix::identity(n);
        for c in 0..n {
            let pivot = (c..n).find(|&r| m.get(r, c)).ok_or(Error::SingularMatrix)?;
            m.row_swap(c, pivot);
            inv.row_swap(c, pivot);
            for r in 0..n {
                if r != c && m.get(r, c) {
                    m.row_xor(c, r);
                    inv.row_xor(c, r);
                }
            }
        }
        Ok(inv)
    }

    /// Any solution x of self * x = y, or None if the system is inconsistent.
    pub fn solve(&self, y: &[bool]) -> Result<Option<Vec<bool>>> {
        if y.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "solve {}x{} with rhs of length {}",
                self.rows,
                self.cols,
                y.len()
            )));
        }
        // Augmented elimination; track pivot column per row.
        let mut m = self.clone();
        let mut rhs: Vec<bool> = y.to_vec();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
        let mut row = 0;
        for c in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(p) = (row..m.rows).find(|&r| m.get(r, c)) else {
                continue;
            };
            m.row_swap(row, p);
            rhs.swap(row, p);
            for r in 0..m.rows {
                if r != row && m.get(r, c) {
                    m.row_xor(row, r);
                    let v = rhs[row];
                    rhs[r] ^= v;
                }
            }
            pivots.push((row, c));
            row += 1;
        }
        // Inconsistent if a zero row has nonzero rhs.
        for r in row..m.rows {
            if rhs[r] {
                return Ok(None);
            }
        }
        let mut x = vec![false; self.cols];
        for &(r, c) in &pivots {
            x[c] = rhs[r];
        }
        Ok(Some(x))
    }

    /// Column `c` packed little-endian into a u64 (row 0 = bit 0). Requires rows <= 64.
    pub fn col_mask(&self, c: usize) -> u64 {
        debug_assert!(self.rows <= 64);
        let mut mask = 0u64;
        for r in 0..self.rows {
            if self.get(r, c) {
                mask |= 1 << r;
            }
        }
        mask
    }

    /// Pack the whole matrix column-major into a u64 (column 0 in the low
    /// rows*1 bits, row 0 = LSB). Requires rows*cols <= 64.
    pub fn pack_cols(&self) -> u64 {
        debug_assert!(self.rows * self.cols <= 64);
        let mut v = 0u64;
        for c in 0..self.cols {
            v |= self.col_mask(c) << (c * self.rows);
        }
        v
    }

    /// Inverse of [`pack_cols`].
    pub fn unpack_cols(rows: usize, cols: usize, packed: u64) -> Self {
        debug_assert!(rows * cols <= 64);
        Self::from_fn(rows, cols, |r, c| (packed >> (c * rows + r)) & 1 == 1)
    }

    /// Submatrix keeping columns `lo..hi`.
    pub fn col_slice(&self, lo: usize, hi: usize) -> BitMatrix {
        debug_assert!(lo <= hi && hi <= self.cols);
        BitMatrix::from_fn(self.rows, hi - lo, |r, c| self.get(r, lo + c))
    }
}

impl std::fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "BitMatrix {}x{}:", self.rows, self.cols)?;
        for r in 0..self.rows {
            for c in 0..self.cols {
                write!(f, "{}", u8::from(self.get(r, c)))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rank_of_identity() {
        for k in 1..10 {
            assert_eq!(BitMatrix::identity(k).rank(), k);
        }
    }

    #[test]
    fn inverse_of_upper_triangular() {
        let m = BitMatrix::from_rows(&[&[1, 1], &[0, 1]]);
        let inv = m.inverse().unwrap();
        assert_eq!(inv, m);
        assert_eq!(m.mul(&inv).unwrap(), BitMatrix::identity(2));
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut found = 0;
        while found < 20 {
            let m = BitMatrix::random(6, 6, &mut rng);
            if m.rank() == 6 {
                found += 1;
                assert_eq!(m.inverse().unwrap().mul(&m).unwrap(), BitMatrix::identity(6));
            }
        }
    }

    #[test]
    fn singular_matrix_rejected() {
        let m = BitMatrix::from_rows(&[&[1, 1], &[1, 1]]);
        assert!(matches!(m.inverse(), Err(Error::SingularMatrix)));
    }

    #[test]
    fn solve_zero_rhs() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = BitMatrix::random(4, 7, &mut rng);
        let x = m.solve(&[false; 4]).unwrap().unwrap();
        assert_eq!(m.mul_bits(&x).unwrap(), vec![false; 4]);
    }

    #[test]
    fn solve_consistent_and_inconsistent() {
        // rows: (1,0,1), (0,1,1) -- consistent for anything
        let m = BitMatrix::from_rows(&[&[1, 0, 1], &[0, 1, 1]]);
        let sol = m.solve(&[true, false]).unwrap().unwrap();
        assert_eq!(m.mul_bits(&sol).unwrap(), vec![true, false]);
        // duplicate rows: inconsistent when rhs differs
        let m = BitMatrix::from_rows(&[&[1, 1, 0], &[1, 1, 0]]);
        assert!(m.solve(&[true, false]).unwrap().is_none());
    }

    #[test]
    fn pack_unpack_roundtrip() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let m = BitMatrix::random(5, 3, &mut rng);
            let packed = m.pack_cols();
            assert_eq!(BitMatrix::unpack_cols(5, 3, packed), m);
        }
    }

    #[test]
    fn mul_dimension_mismatch() {
        let a = BitMatrix::zeros(2, 3);
        let b = BitMatrix::zeros(2, 3);
        assert!(a.mul(&b).is_err());
    }
}
