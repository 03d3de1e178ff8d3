//! Exact computer algebra for Schur Q-polynomials and the Kontsevich-Witten tau-function.

pub mod error;
pub mod identities;
pub mod partition;
pub mod pfaffian;
pub mod poly;
pub mod schur_q;
pub mod special;
pub mod tau;
pub mod virasoro;

pub use error::{Error, Result};
pub use partition::{normalize, StandardForm, StrictPartition};
pub use poly::{HbarSeries, Monomial, OddPoly, Rational};
pub use schur_q::QExpansion;
