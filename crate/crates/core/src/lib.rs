//! Numerical estimation of geometric constants of finite-dimensional real
//! normed spaces.
//!
//! The crate models a space as a norm on `R^n` (`space::SpaceSpec`), and on
//! top of that provides:
//!
//! * isosceles-orthogonality predicates and pair builders (`ortho`),
//! * a brute-force grid oracle for two-dimensional spaces (`oracle`),
//! * a derivative-free multistart maximizer over pairs of unit vectors
//!   (`optimize`),
//! * estimators for the classical constants: the von Neumann-Jordan
//!   constant and its variants, James-type constants, Zbaganu/Yang-Ju-type
//!   two-parameter constants, Hermite-type constants defined through
//!   isosceles orthogonality, and the modulus of convexity (`constants`),
//! * a verifier that checks the known identities, equivalent forms, and
//!   bounds relating those constants on a corpus of spaces (`verify`).
//!
//! Everything is deterministic: all randomness flows from caller-supplied
//! seeds through a counter-based PRNG, evaluation order is fixed, and
//! reductions are sequential. Running the same query twice produces
//! byte-identical reports.

pub mod constants;
pub mod error;
mod numeric;
pub mod oracle;
pub mod optimize;
pub mod ortho;
pub mod space;
pub mod verify;

pub use constants::{ConstantId, ConstantQuery, EvalMode, ALL_CONSTANTS};
pub use error::{Error, Result};
pub use optimize::{Certification, Estimate, OptConfig};
pub use ortho::PairWitness;
pub use space::{Exponent, SpaceSpec, ToleranceConfig, Vector};
pub use verify::{IdentityReport, Status, Suite, SuiteReport};
