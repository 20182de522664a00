//! Primitivity of nonnegative matrices, decided on the zero pattern.
//!
//! A nonnegative `n x n` matrix is primitive iff its power
//! `n^2 - 2n + 2` (Wielandt's exponent) is entrywise positive. Only the
//! zero/nonzero pattern matters, so the power is taken in the boolean
//! semiring with rows packed into bit words.

use crate::matrix::IntMatrix;

/// Zero/nonzero pattern with each row stored as `words` packed `u64`s.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoolPattern {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BoolPattern {
    pub fn of(a: &IntMatrix) -> Self {
        let n = a.n();
        let mut p = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                if a.entry(i, j) != 0 {
                    p.set(i, j);
                }
            }
        }
        p
    }

    fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64);
        Self {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    fn identity(n: usize) -> Self {
        let mut p = Self::zeros(n);
        for i in 0..n {
            p.set(i, i);
        }
        p
    }

    #[inline]
    fn set(&mut self, i: usize, j: usize) {
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Boolean product: row `i` of the result is the union of the rows `j`
    /// of `rhs` for which `self[i][j]` is set.
    pub fn mul(&self, rhs: &Self) -> Self {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = Self::zeros(self.n);
        for i in 0..self.n {
            for (w, &word) in self.row(i).iter().enumerate() {
                let mut rest = word;
                while rest != 0 {
                    let j = w * 64 + rest.trailing_zeros() as usize;
                    rest &= rest - 1;
                    let base = i * self.words;
                    for (k, &r) in rhs.row(j).iter().enumerate() {
                        out.bits[base + k] |= r;
                    }
                }
            }
        }
        out
    }

    pub fn pow(&self, mut exp: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.n);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn is_full(&self) -> bool {
        let tail = self.n % 64;
        let last_mask = if tail == 0 {
            u64::MAX
        } else {
            (1u64 << tail) - 1
        };
        (0..self.n).all(|i| {
            let row = self.row(i);
            row[..self.words - 1].iter().all(|&w| w == u64::MAX) && row[self.words - 1] == last_mask
        })
    }

    fn has_empty_row_or_column(&self) -> bool {
        let mut cols = vec![0u64; self.words];
        for i in 0..self.n {
            let row = self.row(i);
            if row.iter().all(|&w| w == 0) {
                return true;
            }
            for (c, &w) in cols.iter_mut().zip(row) {
                *c |= w;
            }
        }
        let tail = self.n % 64;
        let last_mask = if tail == 0 {
            u64::MAX
        } else {
            (1u64 << tail) - 1
        };
        !(cols[..self.words - 1].iter().all(|&w| w == u64::MAX)
            && cols[self.words - 1] == last_mask)
    }
}

/// Wielandt's exponent `n^2 - 2n + 2`.
pub fn wielandt_exponent(n: usize) -> u64 {
    let n = n as u64;
    n * n - 2 * n + 2
}

/// True iff `A^(n^2 - 2n + 2)` is entrywise positive.
pub fn is_primitive(a: &IntMatrix) -> bool {
    if a.n() <= 8 {
        return packed::is_primitive(a);
    }
    let pattern = BoolPattern::of(a);
    // An empty row or column persists in every power.
    if pattern.has_empty_row_or_column() {
        return false;
    }
    pattern.pow(wielandt_exponent(a.n())).is_full()
}

/// Patterns of at most 8x8 packed into one `u64`, row `i` in byte `i`.
mod packed {
    use super::wielandt_exponent;
    use crate::matrix::IntMatrix;

    const LOW_BITS: u64 = 0x0101_0101_0101_0101;

    fn pack(a: &IntMatrix) -> u64 {
        let n = a.n();
        let mut bits = 0u64;
        for i in 0..n {
            for j in 0..n {
                if a.entry(i, j) != 0 {
                    bits |= 1 << (8 * i + j);
                }
            }
        }
        bits
    }

    /// Sum over `k` of (column `k` of `x`) ⊗ (row `k` of `y`).
    #[inline]
    pub(super) fn mul(x: u64, y: u64) -> u64 {
        let mut out = 0;
        for k in 0..8 {
            let col = ((x >> k) & LOW_BITS) * 0xFF;
            let row = ((y >> (8 * k)) & 0xFF) * LOW_BITS;
            out |= col & row;
        }
        out
    }

    fn identity(n: usize) -> u64 {
        (0..n).fold(0, |acc, i| acc | 1 << (9 * i))
    }

    fn full(n: usize) -> u64 {
        let row = (1u64 << n) - 1;
        (0..n).fold(0, |acc, i| acc | row << (8 * i))
    }

    pub(super) fn pow(x: u64, n: usize, mut exp: u64) -> u64 {
        let mut base = x;
        let mut acc = identity(n);
        while exp > 0 {
            if exp & 1 == 1 {
                acc = mul(acc, base);
            }
            exp >>= 1;
            if exp > 0 {
                base = mul(base, base);
            }
        }
        acc
    }

    pub(super) fn is_primitive(a: &IntMatrix) -> bool {
        let n = a.n();
        let x = pack(a);
        let full = full(n);
        // empty rows or columns persist in every power
        let rows_ok = (0..n).all(|i| (x >> (8 * i)) & 0xFF != 0);
        let cols = (0..n).fold(0u64, |acc, i| acc | (x >> (8 * i)) & 0xFF);
        if !rows_ok || cols != full & 0xFF {
            return false;
        }
        pow(x, n, wielandt_exponent(n)) == full
    }
}
