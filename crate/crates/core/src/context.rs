use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::scalar::{Coeff, ScalarMode, DEFAULT_PRECISION};

/// Precision and shape budgets shared by every series operation.
///
/// Infinite expansions (geometric, logarithmic, exponential, Taylor and
/// Neumann sums) stop once `max_terms` terms are retained; whatever was
/// dropped is recorded as a cutoff on the result.
#[derive(Clone, Debug)]
pub struct Context {
    pub max_terms: usize,
    pub max_log_depth: usize,
    pub max_exp_height: usize,
    pub max_fixpoint_iters: usize,
    pub scalar_mode: ScalarMode,
    /// Relative tolerance under which float coefficients count as zero.
    pub zero_tol: Coeff,
}

impl Default for Context {
    fn default() -> Self {
        Context {
            max_terms: 30,
            max_log_depth: 4,
            max_exp_height: 4,
            max_fixpoint_iters: 200,
            scalar_mode: ScalarMode::Rational,
            zero_tol: Coeff::Rational(BigRational::new(
                BigInt::from(1),
                num_traits::Pow::pow(BigInt::from(10), 30u32),
            )),
        }
    }
}

impl Context {
    pub fn rational() -> Self {
        Context::default()
    }

    pub fn float() -> Self {
        Context::default().with_precision(DEFAULT_PRECISION)
    }

    pub fn with_precision(mut self, bits: usize) -> Self {
        self.scalar_mode = ScalarMode::Float { precision: bits };
        self
    }

    pub fn with_max_terms(mut self, n: usize) -> Self {
        self.max_terms = n;
        self
    }

    pub fn with_log_depth(mut self, d: usize) -> Self {
        self.max_log_depth = d;
        self
    }

    pub fn with_exp_height(mut self, h: usize) -> Self {
        self.max_exp_height = h;
        self
    }

    pub fn with_fixpoint_iters(mut self, n: usize) -> Self {
        self.max_fixpoint_iters = n;
        self
    }

    pub fn with_zero_tol(mut self, tol: Coeff) -> Self {
        self.zero_tol = tol;
        self
    }

    pub fn is_float(&self) -> bool {
        matches!(self.scalar_mode, ScalarMode::Float { .. })
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_terms == 0
            || self.max_log_depth == 0
            || self.max_exp_height == 0
            || self.max_fixpoint_iters == 0
        {
            return Err(Error::InvalidContext("all budgets must be at least 1".into()));
        }
        if self.zero_tol.is_negative() {
            return Err(Error::InvalidContext("zero tolerance must be >= 0".into()));
        }
        if let ScalarMode::Float { precision } = self.scalar_mode {
            if precision < 64 {
                return Err(Error::InvalidContext("float precision below 64 bits".into()));
            }
        }
        Ok(())
    }

    /// Cleans a coefficient obtained by cancellation against `reference`.
    pub(crate) fn clean(&self, c: Coeff, reference: &Coeff) -> Coeff {
        c.clean(&self.zero_tol, reference)
    }

    /// `a + b`, cleaned when floats are involved.
    pub(crate) fn sum(&self, a: &Coeff, b: &Coeff) -> Coeff {
        if a.is_exact() && b.is_exact() {
            return a.add(b);
        }
        let r = if a.abs() >= b.abs() { a } else { b };
        self.clean(a.add(b), r)
    }

    /// Sign of `a - b` after cleaning.
    pub(crate) fn diff_cmp(&self, a: &Coeff, b: &Coeff) -> Ordering {
        if a.is_exact() && b.is_exact() {
            return a.cmp(b);
        }
        self.sum(a, &b.neg()).signum().cmp(&0)
    }
}
