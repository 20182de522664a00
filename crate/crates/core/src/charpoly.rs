//! Exact characteristic polynomials via the Faddeev–LeVerrier recurrence.
//!
//! With `M_1 = I` and `c_n = 1`, each step computes
//! `c_{n-k} = -tr(A M_k) / k` and `M_{k+1} = A M_k + c_{n-k} I`. All
//! divisions are exact over the integers; a nonzero remainder means the
//! arithmetic was corrupted and is reported as an internal error.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::IntMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum CharPolyError {
    #[error("intermediate value exceeded 128-bit signed range")]
    OverflowDetected,
    #[error("inexact division by {step} in Faddeev-LeVerrier step (internal error)")]
    InternalInexactDivision { step: usize },
}

/// Monic characteristic polynomial `λ^n + a_{n-1} λ^{n-1} + ... + a_0`.
///
/// `coeffs[i]` is `a_i`; the leading coefficient is implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CharPoly {
    coeffs: Vec<i128>,
}

impl CharPoly {
    pub fn from_coeffs(coeffs: Vec<i128>) -> Self {
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len()
    }

    /// `[a_0, .., a_{n-1}]`.
    pub fn coeffs(&self) -> &[i128] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> i128 {
        self.coeffs[0]
    }

    /// `a_{n-1}`, equal to minus the trace.
    pub fn subleading(&self) -> i128 {
        self.coeffs[self.coeffs.len() - 1]
    }

    /// Evaluates the polynomial at an integer point, with overflow checks.
    pub fn eval(&self, x: i128) -> Option<i128> {
        self.coeffs
            .iter()
            .rev()
            .try_fold(1i128, |acc, &c| acc.checked_mul(x)?.checked_add(c))
    }
}

/// Signed arithmetic the recurrence runs in. Every operation is checked.
trait Exact: Copy + Eq {
    const ZERO: Self;
    const ONE: Self;
    fn from_u64(v: u64) -> Option<Self>;
    fn from_index(k: usize) -> Self;
    fn add(self, rhs: Self) -> Option<Self>;
    fn mul(self, rhs: Self) -> Option<Self>;
    fn neg(self) -> Option<Self>;
    /// `(quotient, remainder_is_zero)`
    fn div_exact(self, rhs: Self) -> Option<(Self, bool)>;
    fn widen(self) -> i128;
}

macro_rules! impl_exact {
    ($t:ty) => {
        impl Exact for $t {
            const ZERO: Self = 0;
            const ONE: Self = 1;
            #[inline]
            fn from_u64(v: u64) -> Option<Self> {
                <$t>::try_from(v).ok()
            }
            #[inline]
            fn from_index(k: usize) -> Self {
                k as $t
            }
            #[inline]
            fn add(self, rhs: Self) -> Option<Self> {
                self.checked_add(rhs)
            }
            #[inline]
            fn mul(self, rhs: Self) -> Option<Self> {
                self.checked_mul(rhs)
            }
            #[inline]
            fn neg(self) -> Option<Self> {
                self.checked_neg()
            }
            #[inline]
            fn div_exact(self, rhs: Self) -> Option<(Self, bool)> {
                Some((self.checked_div(rhs)?, self.checked_rem(rhs)? == 0))
            }
            #[inline]
            fn widen(self) -> i128 {
                self as i128
            }
        }
    };
}

impl_exact!(i64);
impl_exact!(i128);

enum Failure {
    Overflow,
    Inexact(usize),
}

/// Computes the exact coefficients of `det(λI - A)`.
///
/// The recurrence first runs in checked `i64`; if any intermediate leaves
/// that range it is rerun in checked `i128`. Results are identical either
/// way, and [`CharPolyError::OverflowDetected`] is only returned when the
/// 128-bit run overflows as well.
pub fn char_poly(a: &IntMatrix) -> Result<CharPoly, CharPolyError> {
    if fits_unchecked(a) {
        return bounded(a).map(|coeffs| CharPoly { coeffs });
    }
    match faddeev_leverrier::<i64>(a) {
        Ok(c) => {
            return Ok(CharPoly {
                coeffs: c.into_iter().map(Exact::widen).collect(),
            })
        }
        Err(Failure::Inexact(step)) => return Err(CharPolyError::InternalInexactDivision { step }),
        Err(Failure::Overflow) => {}
    }
    match faddeev_leverrier::<i128>(a) {
        Ok(coeffs) => Ok(CharPoly { coeffs }),
        Err(Failure::Overflow) => Err(CharPolyError::OverflowDetected),
        Err(Failure::Inexact(step)) => Err(CharPolyError::InternalInexactDivision { step }),
    }
}

/// True when every intermediate of the recurrence provably fits in `i64`.
///
/// With `R` the largest row sum, `|c_{n-i}| <= C(n, i) R^i` and the entries
/// of `A^j` are at most `R^j`, so every entry of `M_k` and `A M_k`, and every
/// partial sum forming them, is at most `2^n R^n`. Traces add a factor `n`.
fn fits_unchecked(a: &IntMatrix) -> bool {
    let n = a.n() as u32;
    let max_row = a
        .rows()
        .map(|row| row.iter().map(|&v| u128::from(v)).sum::<u128>())
        .max()
        .unwrap_or(0);
    let bound = (max_row.max(1))
        .checked_pow(n)
        .and_then(|b| b.checked_mul(1u128.checked_shl(n)?))
        .and_then(|b| b.checked_mul(u128::from(n)));
    matches!(bound, Some(b) if b < 1 << 62)
}

/// The recurrence in plain `i64`, valid under [`fits_unchecked`]. Small
/// matrices stay on the stack.
fn bounded(a: &IntMatrix) -> Result<Vec<i128>, CharPolyError> {
    let n = a.n();
    if n <= 8 {
        // Zero padding to 8x8 multiplies the polynomial by λ^(8-n).
        let mut padded = [[0i64; 8]; 8];
        for (i, row) in padded.iter_mut().enumerate().take(n) {
            for (j, cell) in row.iter_mut().enumerate().take(n) {
                *cell = a.entry(i, j) as i64;
            }
        }
        let c = padded8(&padded)?;
        Ok(c[8 - n..].iter().map(|&x| x as i128).collect())
    } else {
        let (mut aa, mut m, mut am) = (vec![0i64; n * n], vec![0i64; n * n], vec![0i64; n * n]);
        bounded_in(a, &mut aa, &mut m, &mut am)
    }
}

fn bounded_in(
    a: &IntMatrix,
    aa: &mut [i64],
    m: &mut [i64],
    am: &mut [i64],
) -> Result<Vec<i128>, CharPolyError> {
    let n = a.n();
    for (d, &v) in aa.iter_mut().zip(a.as_flat()) {
        *d = v as i64;
    }
    let mut coeffs = vec![0i128; n];
    am.copy_from_slice(aa);
    for k in 1..n {
        let tr: i64 = (0..n).map(|i| am[i * n + i]).sum();
        let c = exact_quotient(tr, k)?;
        coeffs[n - k] = c as i128;
        m.copy_from_slice(am);
        for i in 0..n {
            m[i * n + i] += c;
        }
        if k + 1 == n {
            break;
        }
        for i in 0..n {
            let dst = &mut am[i * n..(i + 1) * n];
            dst.fill(0);
            for j in 0..n {
                let v = aa[i * n + j];
                if v != 0 {
                    for (d, &s) in dst.iter_mut().zip(&m[j * n..(j + 1) * n]) {
                        *d += v * s;
                    }
                }
            }
        }
    }
    let mut tr = 0i64;
    for i in 0..n {
        for j in 0..n {
            tr += aa[i * n + j] * m[j * n + i];
        }
    }
    coeffs[0] = exact_quotient(tr, n)? as i128;
    Ok(coeffs)
}

/// Fixed-size branch-free recurrence; the compiler unrolls and vectorizes it.
/// Binary matrices select rows with a mask instead of multiplying.
fn padded8(a: &[[i64; 8]; 8]) -> Result<[i64; 8], CharPolyError> {
    let binary = a.iter().flatten().all(|&v| v <= 1);
    let mut coeffs = [0i64; 8];
    let mut am = *a;
    let mut m = *a;
    for k in 1..8 {
        let tr: i64 = (0..8).map(|i| am[i][i]).sum();
        let c = exact_quotient(tr, k)?;
        coeffs[8 - k] = c;
        m = am;
        for (i, row) in m.iter_mut().enumerate() {
            row[i] += c;
        }
        if k == 7 {
            break;
        }
        if binary {
            mul8::<true>(a, &m, &mut am);
        } else {
            mul8::<false>(a, &m, &mut am);
        }
    }
    // tr(A M_8) needs only the diagonal of the product
    let mut tr = 0i64;
    for i in 0..8 {
        for j in 0..8 {
            tr += a[i][j] * m[j][i];
        }
    }
    coeffs[0] = exact_quotient(tr, 8)?;
    Ok(coeffs)
}

#[inline(always)]
fn mul8<const BINARY: bool>(a: &[[i64; 8]; 8], m: &[[i64; 8]; 8], out: &mut [[i64; 8]; 8]) {
    for (arow, orow) in a.iter().zip(out.iter_mut()) {
        let mut acc = [0i64; 8];
        for (&v, mrow) in arow.iter().zip(m) {
            if BINARY {
                let mask = v.wrapping_neg();
                for l in 0..8 {
                    acc[l] += mrow[l] & mask;
                }
            } else {
                for l in 0..8 {
                    acc[l] += v * mrow[l];
                }
            }
        }
        *orow = acc;
    }
}

#[inline]
fn exact_quotient(trace: i64, k: usize) -> Result<i64, CharPolyError> {
    let k = k as i64;
    if trace % k != 0 {
        return Err(CharPolyError::InternalInexactDivision { step: k as usize });
    }
    Ok(-(trace / k))
}

fn faddeev_leverrier<T: Exact>(a: &IntMatrix) -> Result<Vec<T>, Failure> {
    let n = a.n();
    // Sparse rows of A: (column, value) for nonzero entries.
    let mut nz: Vec<(usize, T)> = Vec::with_capacity(n * n);
    let mut row_start = Vec::with_capacity(n + 1);
    for i in 0..n {
        row_start.push(nz.len());
        for j in 0..n {
            let v = a.entry(i, j);
            if v != 0 {
                nz.push((j, T::from_u64(v).ok_or(Failure::Overflow)?));
            }
        }
    }
    row_start.push(nz.len());

    let mut coeffs = vec![T::ZERO; n];
    // am holds A * M_k; M_1 = I so the first product is A itself.
    let mut am: Vec<T> = Vec::with_capacity(n * n);
    for &v in a.as_flat() {
        am.push(T::from_u64(v).ok_or(Failure::Overflow)?);
    }
    let mut m = vec![T::ZERO; n * n];

    for k in 1..n {
        let mut tr = T::ZERO;
        for i in 0..n {
            tr = tr.add(am[i * n + i]).ok_or(Failure::Overflow)?;
        }
        let c = divide(tr, k)?;
        coeffs[n - k] = c;

        // M_{k+1} = A M_k + c I
        std::mem::swap(&mut m, &mut am);
        for i in 0..n {
            m[i * n + i] = m[i * n + i].add(c).ok_or(Failure::Overflow)?;
        }
        if k + 1 == n {
            break;
        }
        multiply_sparse(&nz, &row_start, &m, &mut am, n)?;
    }

    // Last step only needs tr(A M_n) = sum_{i,j} A_ij M_n[j][i].
    let mut tr = T::ZERO;
    for i in 0..n {
        for &(j, v) in &nz[row_start[i]..row_start[i + 1]] {
            let t = if v == T::ONE {
                m[j * n + i]
            } else {
                v.mul(m[j * n + i]).ok_or(Failure::Overflow)?
            };
            tr = tr.add(t).ok_or(Failure::Overflow)?;
        }
    }
    coeffs[0] = divide(tr, n)?;
    Ok(coeffs)
}

#[inline]
fn divide<T: Exact>(trace: T, k: usize) -> Result<T, Failure> {
    let (q, exact) = trace.div_exact(T::from_index(k)).ok_or(Failure::Overflow)?;
    if !exact {
        return Err(Failure::Inexact(k));
    }
    q.neg().ok_or(Failure::Overflow)
}

/// `out = A * m` using the sparse rows of `A`.
fn multiply_sparse<T: Exact>(
    nz: &[(usize, T)],
    row_start: &[usize],
    m: &[T],
    out: &mut Vec<T>,
    n: usize,
) -> Result<(), Failure> {
    out.clear();
    out.resize(n * n, T::ZERO);
    for i in 0..n {
        let dst = &mut out[i * n..(i + 1) * n];
        for &(j, v) in &nz[row_start[i]..row_start[i + 1]] {
            let src = &m[j * n..(j + 1) * n];
            if v == T::ONE {
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = d.add(s).ok_or(Failure::Overflow)?;
                }
            } else {
                for (d, &s) in dst.iter_mut().zip(src) {
                    *d = d
                        .add(v.mul(s).ok_or(Failure::Overflow)?)
                        .ok_or(Failure::Overflow)?;
                }
            }
        }
    }
    Ok(())
}
