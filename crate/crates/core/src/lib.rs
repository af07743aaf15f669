//! Exact symbolic checks for Nijenhuis operators on Lie algebroids, Dirac
//! structures and their Morita equivalences, in a single coordinate chart.
//!
//! Scalars are rational functions with rational coefficients. Every geometric
//! routine is generic over [`Scalar`], so the same code also runs on Taylor
//! jets at random points ([`SampleScalar`]) as an independent cross-check.

pub mod derivations;
pub mod dirac;
pub mod expr;
pub mod jet;
pub mod linalg;
pub mod morita;
pub mod scalar;
pub mod tensor;
pub mod verdict;

pub use expr::coeff::{Coeff, Fp};
pub use expr::poly::Poly;
pub use expr::ratfun::RationalFunction;
pub use expr::{Chart, ExprError, RationalPoint};
pub use jet::Jet;
pub use scalar::Scalar;
pub use verdict::{CheckReport, Clause, Verdict};

pub type Rational = num_rational::BigRational;
/// Exact scalar: a reduced rational function over the rationals.
pub type ScalarExpr = RationalFunction<Rational>;
/// Scalar used by the sampling oracle.
pub type SampleScalar = Jet<Fp>;
