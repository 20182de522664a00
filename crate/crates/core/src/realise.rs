//! Realisations of a matrix: substitutions whose abelianization it is.
//!
//! The image of letter `j` must contain exactly `A(i, j)` copies of each
//! letter `i`, in any order, so the realisations of `A` are the products
//! of the distinct orderings of each column's letter multiset.

use num_bigint::BigUint;
use num_traits::One;
use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

use crate::matrix::IntMatrix;
use crate::subst::{Letter, Substitution};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealiseError {
    /// Column index is 1-based, matching the letter whose image would be empty.
    #[error("column {0} sums to zero; its letter would have an empty image")]
    EmptyColumn(usize),
    #[error("matrix has {count} realisations, more than the limit {limit}")]
    TooMany { count: BigUint, limit: u64 },
}

fn check_columns(a: &IntMatrix) -> Result<(), RealiseError> {
    match (0..a.n()).find(|&j| a.column_sum(j) == 0) {
        Some(j) => Err(RealiseError::EmptyColumn(j + 1)),
        None => Ok(()),
    }
}

/// `Π_j (Σ_i a_ij)! / Π_i a_ij!`, exactly.
pub fn realisation_count(a: &IntMatrix) -> Result<BigUint, RealiseError> {
    check_columns(a)?;
    let mut total = BigUint::one();
    for j in 0..a.n() {
        // The multinomial is a product of binomials C(s_1 + .. + s_i, s_i).
        let mut placed = 0u64;
        for i in 0..a.n() {
            let k = a.entry(i, j);
            placed += k;
            total *= binomial(placed, k);
        }
    }
    Ok(total)
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for t in 0..k {
        acc *= n - t;
        acc /= t + 1;
    }
    acc
}

fn column_multiset(a: &IntMatrix, j: usize) -> Vec<Letter> {
    let mut word = Vec::with_capacity(a.column_sum(j) as usize);
    for i in 0..a.n() {
        word.extend(std::iter::repeat_n(i as Letter + 1, a.entry(i, j) as usize));
    }
    word
}

/// Draws a realisation uniformly: each image is an unbiased shuffle of its
/// column's letter multiset, independently per column.
pub fn sample_realisation<R: Rng + ?Sized>(
    a: &IntMatrix,
    rng: &mut R,
) -> Result<Substitution, RealiseError> {
    check_columns(a)?;
    let images = (0..a.n())
        .map(|j| {
            let mut word = column_multiset(a, j);
            word.shuffle(rng);
            word
        })
        .collect();
    Ok(Substitution::new(images).expect("columns are nonempty"))
}

/// Every realisation, in lexicographic order of the image tuple. Fails if
/// there are more than `limit`.
pub fn enumerate_realisations(
    a: &IntMatrix,
    limit: u64,
) -> Result<Vec<Substitution>, RealiseError> {
    let count = realisation_count(a)?;
    if count > BigUint::from(limit) {
        return Err(RealiseError::TooMany { count, limit });
    }
    let columns: Vec<Vec<Vec<Letter>>> = (0..a.n())
        .map(|j| multiset_permutations(column_multiset(a, j)))
        .collect();

    let mut out = Vec::new();
    let mut choice = vec![0usize; a.n()];
    loop {
        let images = choice
            .iter()
            .zip(&columns)
            .map(|(&c, col)| col[c].clone())
            .collect();
        out.push(Substitution::new(images).expect("columns are nonempty"));
        // odometer, last column fastest
        let mut pos = a.n();
        loop {
            if pos == 0 {
                return Ok(out);
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < columns[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// Distinct orderings of a sorted multiset, by repeated next-permutation.
fn multiset_permutations(mut word: Vec<Letter>) -> Vec<Vec<Letter>> {
    word.sort_unstable();
    let mut out = vec![word.clone()];
    while next_permutation(&mut word) {
        out.push(word.clone());
    }
    out
}

fn next_permutation(w: &mut [Letter]) -> bool {
    let Some(i) = (1..w.len()).rev().find(|&i| w[i - 1] < w[i]) else {
        return false;
    };
    let pivot = i - 1;
    let j = (i..w.len())
        .rev()
        .find(|&j| w[j] > w[pivot])
        .expect("successor exists");
    w.swap(pivot, j);
    w[i..].reverse();
    true
}
