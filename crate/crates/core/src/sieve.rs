//! Sufficient condition for a primitive integer matrix to be irreducible Pisot.
//!
//! With characteristic polynomial `λ^n + a_{n-1} λ^{n-1} + ... + a_0`, the
//! matrix is accepted when `a_0 != 0`, `|a_{n-1}| > 1 + Σ_{i<n-1} |a_i|`, and
//! the matrix is primitive. The coefficient bound forces exactly one root
//! outside the unit disk and makes the polynomial irreducible.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::charpoly::{char_poly, CharPoly, CharPolyError};
use crate::matrix::IntMatrix;
use crate::primitive::is_primitive;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum RejectReason {
    ZeroConstantTerm = 0,
    TraceBoundFailed = 1,
    NotPrimitive = 2,
}

impl RejectReason {
    pub const ALL: [RejectReason; 3] = [
        RejectReason::ZeroConstantTerm,
        RejectReason::TraceBoundFailed,
        RejectReason::NotPrimitive,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            RejectReason::ZeroConstantTerm => "ZeroConstantTerm",
            RejectReason::TraceBoundFailed => "TraceBoundFailed",
            RejectReason::NotPrimitive => "NotPrimitive",
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SieveVerdict {
    pub accepted: bool,
    /// Every failed condition, in the order of [`RejectReason::ALL`].
    pub reasons: Vec<RejectReason>,
    pub charpoly: CharPoly,
}

/// Checks the coefficient conditions first, primitivity last. All three are
/// always evaluated so that the reasons are exhaustive.
pub fn passes_pisot_sieve(a: &IntMatrix) -> Result<SieveVerdict, CharPolyError> {
    let charpoly = char_poly(a)?;
    let mut reasons = Vec::new();
    if charpoly.constant_term() == 0 {
        reasons.push(RejectReason::ZeroConstantTerm);
    }
    if !trace_dominates(&charpoly)? {
        reasons.push(RejectReason::TraceBoundFailed);
    }
    if !is_primitive(a) {
        reasons.push(RejectReason::NotPrimitive);
    }
    Ok(SieveVerdict {
        accepted: reasons.is_empty(),
        reasons,
        charpoly,
    })
}

/// `|a_{n-1}| > 1 + Σ_{i=0}^{n-2} |a_i|`
fn trace_dominates(p: &CharPoly) -> Result<bool, CharPolyError> {
    let (lead, rest) = p.coeffs().split_last().expect("degree >= 2");
    let mut bound: u128 = 1;
    for c in rest {
        bound = bound
            .checked_add(c.unsigned_abs())
            .ok_or(CharPolyError::OverflowDetected)?;
    }
    Ok(lead.unsigned_abs() > bound)
}
