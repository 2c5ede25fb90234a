//! Truncated grid-based log-exp transseries.
//!
//! Series are finite sorted sums of transmonomials `∏ ℓ_k^{a_k} e^P` with an
//! optional cutoff below which nothing is known. On top of the field
//! operations the crate provides logarithms and exponentials, the derivation
//! and its integral, right composition, compositional inversion and the
//! Abel equation with fractional iterates.

pub mod calculus;
pub mod compose;
pub mod conjugacy;
pub mod context;
pub mod error;
pub mod expr;
pub mod format;
pub mod invert;
pub mod monomial;
pub mod operator;
pub mod scalar;
pub mod series;
pub mod translog;

#[cfg(test)]
pub(crate) mod testgen;

pub use context::Context;
pub use error::{Error, Result};
pub use expr::{evaluate, evaluate_series, parse, Expr, Value};
pub use monomial::{Flatness, Monomial};
pub use operator::{apply, neumann_invert, StronglyLinear};
pub use scalar::{Coeff, ScalarMode};
pub use series::{power_series, Series, Term};
pub use translog::{exp_s, flat_cmp, log_s, pow_s, steepness_key};
pub use calculus::{derive, integrate, log_derivative};
pub use compose::{compose, definite_integral, taylor_compose, Composer};
pub use invert::{comp_inverse, invert_block, oracle_inverse, steep_decompose, SteepnessDecomposition};
pub use conjugacy::{
    abel, centralizer_dominate, centralizer_param, commutator_sign, conjugator, iterate, normalize, solve_iterlog,
    solve_translation, AbelResult, CommutatorSign, Normalized,
};
