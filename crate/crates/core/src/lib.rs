//! Search machinery for counterexamples to the strong coincidence conjecture.
//!
//! The crate is split along the three stages of the search:
//!
//! * [`charpoly`], [`primitive`] and [`sieve`] decide, in exact integer
//!   arithmetic, whether a nonnegative integer matrix satisfies a sufficient
//!   condition for being irreducible Pisot.
//! * [`subst`], [`realise`] and [`coincidence`] work with substitutions whose
//!   abelianization is such a matrix: counting and sampling them, and checking
//!   them for strong coincidence.
//! * [`pipeline`] ties the stages together in a seeded, resumable batch run
//!   whose output does not depend on the worker count.

pub mod charpoly;
pub mod coincidence;
pub mod matrix;
pub mod pipeline;
pub mod primitive;
pub mod realise;
pub mod rng;
pub mod sieve;
pub mod subst;

pub use charpoly::{char_poly, CharPoly, CharPolyError};
pub use coincidence::{
    strong_coincidence, CoincidenceResult, CoincidenceStatus, LimitReason, Pair,
};
pub use matrix::{IntMatrix, MatrixError};
pub use primitive::is_primitive;
pub use realise::{enumerate_realisations, realisation_count, sample_realisation, RealiseError};
pub use sieve::{passes_pisot_sieve, RejectReason, SieveVerdict};
pub use subst::{AbelianVector, Letter, ParseError, Substitution, SubstitutionError};
