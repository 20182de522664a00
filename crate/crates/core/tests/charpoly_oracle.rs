//! Faddeev–LeVerrier against Cayley–Hamilton and an elimination determinant.

use pisot_search::{char_poly, IntMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(rng: &mut impl Rng, n: usize, max: u64) -> IntMatrix {
    IntMatrix::from_fn(n, |_, _| rng.random_range(0..=max)).unwrap()
}

fn to_i128(a: &IntMatrix) -> Vec<Vec<i128>> {
    a.rows()
        .map(|r| r.iter().map(|&v| v as i128).collect())
        .collect()
}

fn matmul(x: &[Vec<i128>], y: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = x.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| x[i][k] * y[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `A^n + a_{n-1} A^{n-1} + ... + a_0 I` by Horner's rule.
fn eval_at_matrix(coeffs: &[i128], a: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let identity = |c: i128| -> Vec<Vec<i128>> {
        (0..n)
            .map(|i| (0..n).map(|j| if i == j { c } else { 0 }).collect())
            .collect()
    };
    let mut acc = identity(1);
    for &c in coeffs.iter().rev() {
        acc = matmul(&acc, a);
        for (i, row) in acc.iter_mut().enumerate() {
            row[i] += c;
        }
    }
    acc
}

/// Fraction-free (Bareiss) elimination with row pivoting.
fn bareiss_det(a: &[Vec<i128>]) -> i128 {
    let n = a.len();
    let mut m = a.to_vec();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                assert_eq!(num % prev, 0, "Bareiss division must be exact");
                m[i][j] = num / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

#[test]
fn bareiss_oracle_sanity() {
    assert_eq!(bareiss_det(&[vec![1, 1], vec![1, 0]]), -1);
    assert_eq!(
        bareiss_det(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]),
        1
    );
    assert_eq!(bareiss_det(&[vec![2, 4], vec![1, 2]]), 0);
}

#[test]
fn cayley_hamilton_and_trace() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xCA7);
    for draw in 0..10_000 {
        let n = 2 + draw % 7;
        let a = random_matrix(&mut rng, n, 4);
        let p = char_poly(&a).unwrap();
        assert_eq!(p.degree(), n);
        assert_eq!(p.subleading(), -(a.trace() as i128), "{a:?}");
        let residual = eval_at_matrix(p.coeffs(), &to_i128(&a));
        assert!(
            residual.iter().flatten().all(|&x| x == 0),
            "Cayley-Hamilton fails for {a:?}"
        );
    }
}

#[test]
fn constant_term_is_signed_determinant() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE7);
    for draw in 0..2_000 {
        let n = 2 + draw % 5;
        let a = random_matrix(&mut rng, n, 4);
        let det = bareiss_det(&to_i128(&a));
        let sign = if n % 2 == 0 { 1 } else { -1 };
        assert_eq!(char_poly(&a).unwrap().constant_term(), sign * det, "{a:?}");
    }
}

#[test]
fn all_tiers_agree() {
    // Entries large enough to leave the unchecked tier but stay in i64,
    // and large enough to need i128: compare against the determinant.
    let mut rng = ChaCha8Rng::seed_from_u64(0x71E5);
    // (entry bound, largest n) kept small enough for the oracle's i128 minors
    for &(max, top) in &[(1_000u64, 5usize), (4_096, 5), (1 << 30, 3)] {
        for _ in 0..300 {
            let n = rng.random_range(2..=top);
            let a = random_matrix(&mut rng, n, max);
            let Ok(p) = char_poly(&a) else { continue };
            let sign = if n % 2 == 0 { 1 } else { -1 };
            assert_eq!(p.constant_term(), sign * bareiss_det(&to_i128(&a)));
            assert_eq!(p.subleading(), -(a.trace() as i128));
        }
    }
}

proptest! {
    #[test]
    fn charpoly_of_binary_is_root_free_at_eigen_integers(bits in any::<u64>(), n in 2usize..=8) {
        // det(kI - A) evaluated two ways, at a handful of integer points
        let a = IntMatrix::from_fn(n, |i, j| bits >> (8 * i + j) & 1).unwrap();
        let p = char_poly(&a).unwrap();
        for k in -2i128..=3 {
            let shifted: Vec<Vec<i128>> = (0..n)
                .map(|i| (0..n).map(|j| (if i == j { k } else { 0 }) - a.entry(i, j) as i128).collect())
                .collect();
            prop_assert_eq!(p.eval(k).unwrap(), bareiss_det(&shifted));
        }
    }
}
