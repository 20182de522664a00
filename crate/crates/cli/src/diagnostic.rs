//! Floating-point eigenvalue check of the Pisot pattern.
//!
//! Numeric only: moduli come from a real Schur decomposition and cannot
//! certify that no eigenvalue lies exactly on the unit circle.

use nalgebra::DMatrix;
use pisot_search::IntMatrix;

/// Margin by which non-dominant moduli must stay inside the unit circle.
pub const UNIT_CIRCLE_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct EigenDiagnostic {
    /// Eigenvalue moduli, largest first.
    pub moduli: Vec<f64>,
}

impl EigenDiagnostic {
    pub fn of(a: &IntMatrix) -> Self {
        let n = a.n();
        let m = DMatrix::from_fn(n, n, |i, j| a.entry(i, j) as f64);
        let mut moduli: Vec<f64> = m.complex_eigenvalues().iter().map(|z| z.norm()).collect();
        moduli.sort_by(|x, y| y.total_cmp(x));
        Self { moduli }
    }

    /// Exactly one modulus above 1, all others below `1 - UNIT_CIRCLE_SLACK`.
    pub fn pisot_pattern(&self) -> bool {
        self.moduli
            .iter()
            .filter(|&&m| m > 1.0 + UNIT_CIRCLE_SLACK)
            .count()
            == 1
            && self.moduli[1..]
                .iter()
                .all(|&m| m < 1.0 - UNIT_CIRCLE_SLACK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[u64]]) -> IntMatrix {
        IntMatrix::from_rows(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn silver_ratio_pair() {
        let d = EigenDiagnostic::of(&m(&[&[3, 1], &[1, 1]]));
        assert!((d.moduli[0] - 3.414_213_562).abs() < 1e-6);
        assert!((d.moduli[1] - 0.585_786_438).abs() < 1e-6);
        assert!(d.pisot_pattern());
    }

    #[test]
    fn tribonacci_moduli() {
        let d = EigenDiagnostic::of(&m(&[&[1, 1, 1], &[1, 0, 0], &[0, 1, 0]]));
        assert!((d.moduli[0] - 1.839_286_755).abs() < 1e-6);
        // complex pair modulus is 1/sqrt(tribonacci constant)
        let pair = (1.0 / 1.839_286_755_214_161f64).sqrt();
        assert!((d.moduli[1] - pair).abs() < 1e-6 && (d.moduli[2] - pair).abs() < 1e-6);
        assert!(d.pisot_pattern());
    }

    #[test]
    fn permutation_is_on_the_circle() {
        let d = EigenDiagnostic::of(&m(&[&[0, 1], &[1, 0]]));
        assert!(d.moduli.iter().all(|&x| (x - 1.0).abs() < 1e-12));
        assert!(!d.pisot_pattern());
    }
}
