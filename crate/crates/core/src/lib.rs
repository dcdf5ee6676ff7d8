//! Exact computations for KMS states of the Hecke algebra of
//! `(GL_n(Q), GL_n(Z))` acting on `Mat_n` of the finite adeles: Hecke coset
//! enumeration, p-local stratification of rational matrices,
//! Hecke operators on strata, partition functions and the measures that
//! satisfy the scaling condition.

pub mod cosets;
pub mod error;
pub mod exact;
pub mod hecke;
pub mod measure;
pub mod padic;
pub mod zeta;

pub use error::{Error, Result};
pub use exact::{IntMatrix, Matrix, RatFunc, RatMatrix, Rational};
