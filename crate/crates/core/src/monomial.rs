//! Canonical log-exp transmonomials `ℓ_0^{a_0} ⋯ ℓ_d^{a_d} · e^P`.
//!
//! `ℓ_0 = x` and `ℓ_{k+1} = log ℓ_k`. The exponent `P` is an exact, purely
//! large series which never contains a bare `ℓ_j` (`j ≥ 1`) term: such a term
//! `r·ℓ_j` is the log-power `ℓ_{j-1}^r` and is stored in the log exponents.

use std::cmp::Ordering;
use std::sync::Arc;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::scalar::Coeff;
use crate::series::{leading_difference, Series, Term};

#[derive(Clone, Debug, Default)]
pub struct Monomial {
    logs: Vec<Coeff>,
    exp: Option<Arc<Series>>,
}

/// Outcome of comparing the steepness of two series (`log|s|` against `log|t|`).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Flatness {
    StrictlyFlatter,
    SameClass,
    StrictlySteeper,
}

fn trim(logs: &mut Vec<Coeff>) {
    while logs.last().is_some_and(|c| c.is_zero()) {
        logs.pop();
    }
}

impl Monomial {
    pub fn one() -> Self {
        Monomial::default()
    }

    pub fn x() -> Self {
        Monomial::ell(0)
    }

    /// The k-fold iterated logarithm `ℓ_k`.
    pub fn ell(k: usize) -> Self {
        Monomial::log_power(k, Coeff::one())
    }

    /// `ℓ_k^a`.
    pub fn log_power(k: usize, a: Coeff) -> Self {
        let mut logs = vec![Coeff::zero(); k + 1];
        logs[k] = a;
        trim(&mut logs);
        Monomial { logs, exp: None }
    }

    /// `∏ ℓ_k^{a_k}` with no exponential part.
    pub fn from_logs(mut logs: Vec<Coeff>) -> Self {
        trim(&mut logs);
        Monomial { logs, exp: None }
    }

    /// Builds `∏ ℓ_k^{a_k} · e^P`, moving `r·ℓ_j` terms of `P` into the log
    /// exponents. `P` must be exact and purely large.
    pub fn new(mut logs: Vec<Coeff>, exponent: &Series, ctx: &Context) -> Result<Self> {
        if exponent.cutoff().is_some() {
            return Err(Error::PrecisionExhausted(format!(
                "exponent {exponent} is not known exactly"
            )));
        }
        let mut rest = Vec::new();
        for t in exponent.terms() {
            match t.mono.as_ell() {
                Some(j) if j >= 1 => {
                    if logs.len() < j {
                        logs.resize(j, Coeff::zero());
                    }
                    let sum = logs[j - 1].add(&t.coeff);
                    logs[j - 1] = ctx.clean(sum, &t.coeff);
                }
                _ => {
                    if t.mono.cmp_one(ctx) != Ordering::Greater {
                        return Err(Error::Precondition(format!(
                            "exponent {exponent} is not purely large"
                        )));
                    }
                    rest.push(t.clone());
                }
            }
        }
        let logs = logs
            .into_iter()
            .map(|c| {
                let r = c.clone();
                ctx.clean(c, &r)
            })
            .collect();
        let exp = if rest.is_empty() {
            None
        } else {
            Some(Arc::new(Series::from_sorted_exact(rest)))
        };
        Monomial::checked(logs, exp, ctx)
    }

    fn checked(mut logs: Vec<Coeff>, exp: Option<Arc<Series>>, ctx: &Context) -> Result<Self> {
        trim(&mut logs);
        let m = Monomial { logs, exp };
        if m.depth() > ctx.max_log_depth {
            return Err(Error::DepthBudgetExceeded(format!(
                "log depth {} > {}",
                m.depth(),
                ctx.max_log_depth
            )));
        }
        if m.height() > ctx.max_exp_height {
            return Err(Error::DepthBudgetExceeded(format!(
                "exponential height {} > {}",
                m.height(),
                ctx.max_exp_height
            )));
        }
        Ok(m)
    }

    /// `e^P` for an exact purely large `P`.
    pub fn exp_of(exponent: &Series, ctx: &Context) -> Result<Self> {
        Monomial::new(Vec::new(), exponent, ctx)
    }

    pub fn log_powers(&self) -> &[Coeff] {
        &self.logs
    }

    pub fn log_exponent(&self, k: usize) -> Coeff {
        self.logs.get(k).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn exp_part(&self) -> Option<&Series> {
        self.exp.as_deref()
    }

    pub fn is_one(&self) -> bool {
        self.logs.is_empty() && self.exp.is_none()
    }

    pub fn is_x(&self) -> bool {
        self.as_ell() == Some(0)
    }

    /// `Some(k)` when the monomial is exactly `ℓ_k`.
    pub fn as_ell(&self) -> Option<usize> {
        if self.exp.is_some() || self.logs.is_empty() {
            return None;
        }
        let k = self.logs.len() - 1;
        if self.logs[k].is_one() && self.logs[..k].iter().all(Coeff::is_zero) {
            Some(k)
        } else {
            None
        }
    }

    /// Index of the deepest iterated logarithm with a nonzero exponent.
    pub fn depth(&self) -> usize {
        self.logs.len().saturating_sub(1)
    }

    /// Number of nested exponentials.
    pub fn height(&self) -> usize {
        match &self.exp {
            None => 0,
            Some(p) => 1 + p.terms().iter().map(|t| t.mono.height()).max().unwrap_or(0),
        }
    }

    pub fn mul(&self, other: &Monomial, ctx: &Context) -> Result<Monomial> {
        if self.is_one() {
            return Ok(other.clone());
        }
        if other.is_one() {
            return Ok(self.clone());
        }
        let n = self.logs.len().max(other.logs.len());
        let mut logs = Vec::with_capacity(n);
        for k in 0..n {
            let a = self.log_exponent(k);
            let b = other.log_exponent(k);
            let s = a.add(&b);
            let r = if a.abs() > b.abs() { a } else { b };
            logs.push(ctx.clean(s, &r));
        }
        let exp = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p.clone()),
            (Some(p), Some(q)) => {
                let s = p.add_exact(q, ctx);
                if s.terms().is_empty() {
                    None
                } else {
                    Some(Arc::new(s))
                }
            }
        };
        Monomial::checked(logs, exp, ctx)
    }

    pub fn inv(&self) -> Monomial {
        Monomial {
            logs: self.logs.iter().map(Coeff::neg).collect(),
            exp: self.exp.as_ref().map(|p| Arc::new(p.neg())),
        }
    }

    pub fn div(&self, other: &Monomial, ctx: &Context) -> Result<Monomial> {
        self.mul(&other.inv(), ctx)
    }

    /// `self^r`.
    pub fn pow(&self, r: &Coeff, ctx: &Context) -> Result<Monomial> {
        if r.is_zero() {
            return Ok(Monomial::one());
        }
        let logs = self
            .logs
            .iter()
            .map(|a| {
                let p = a.mul(r);
                ctx.clean(p.clone(), &p)
            })
            .collect();
        let exp = self.exp.as_ref().map(|p| Arc::new(p.scale(r, ctx)));
        Monomial::checked(logs, exp, ctx)
    }

    /// `log 𝔪 = Σ a_k ℓ_{k+1} + P`, a purely large (or zero) exact series.
    pub fn log(&self, ctx: &Context) -> Result<Series> {
        let mut terms = Vec::new();
        for (k, a) in self.logs.iter().enumerate() {
            if !a.is_zero() {
                if k + 1 > ctx.max_log_depth {
                    return Err(Error::DepthBudgetExceeded(format!(
                        "log of ℓ_{k} needs depth {}",
                        k + 1
                    )));
                }
                terms.push(Term::new(a.clone(), Monomial::ell(k + 1)));
            }
        }
        if let Some(p) = &self.exp {
            terms.extend(p.terms().iter().cloned());
        }
        Ok(Series::from_terms(terms, None, &exact_ctx(ctx)))
    }

    /// The total order of the monomial group: compares `log 𝔪` with `log 𝔫`.
    pub fn cmp(&self, other: &Monomial, ctx: &Context) -> Ordering {
        // First differing log exponent.
        let n = self.logs.len().max(other.logs.len());
        let zero = Coeff::zero();
        let mut log_diff = None;
        for k in 0..n {
            let a = self.logs.get(k).unwrap_or(&zero);
            let b = other.logs.get(k).unwrap_or(&zero);
            let d = ctx.diff_cmp(a, b);
            if d != Ordering::Equal {
                log_diff = Some((k, d as i32));
                break;
            }
        }
        let exp_diff = match (&self.exp, &other.exp) {
            (None, None) => None,
            (Some(p), Some(q)) if Arc::ptr_eq(p, q) => None,
            (p, q) => {
                let empty = Series::zero();
                let p = p.as_deref().unwrap_or(&empty);
                let q = q.as_deref().unwrap_or(&empty);
                leading_difference(p, q, ctx)
            }
        };
        let sign = match (log_diff, exp_diff) {
            (None, None) => 0,
            (Some((_, s)), None) => s,
            (None, Some((s, _))) => s,
            (Some((k, s_log)), Some((s_exp, m))) => {
                // ℓ_{k+1} against the dominant monomial of P - Q.
                match m.cmp(&Monomial::ell(k + 1), ctx) {
                    Ordering::Less => s_log,
                    _ => s_exp,
                }
            }
        };
        sign.cmp(&0)
    }

    pub fn cmp_one(&self, ctx: &Context) -> Ordering {
        self.cmp(&Monomial::one(), ctx)
    }

    pub fn eq_in(&self, other: &Monomial, ctx: &Context) -> bool {
        self.cmp(other, ctx) == Ordering::Equal
    }

    /// Larger of two monomials.
    pub fn max_of(a: Monomial, b: Monomial, ctx: &Context) -> Monomial {
        if a.cmp(&b, ctx) == Ordering::Less {
            b
        } else {
            a
        }
    }

    /// Steepness comparison of monomials: `log 𝔪` against `log 𝔫` in the
    /// dominance order. The class of `1` is the flattest.
    pub fn flat_cmp(&self, other: &Monomial, ctx: &Context) -> Result<Flatness> {
        let a = self.log(ctx)?;
        let b = other.log(ctx)?;
        Ok(match (a.terms().first(), b.terms().first()) {
            (None, None) => Flatness::SameClass,
            (None, Some(_)) => Flatness::StrictlyFlatter,
            (Some(_), None) => Flatness::StrictlySteeper,
            (Some(s), Some(t)) => match s.mono.cmp(&t.mono, ctx) {
                Ordering::Less => Flatness::StrictlyFlatter,
                Ordering::Equal => Flatness::SameClass,
                Ordering::Greater => Flatness::StrictlySteeper,
            },
        })
    }

    /// Steepness class key: the dominant monomial of `log 𝔪`, or `None` for `1`.
    pub fn steepness_key(&self, ctx: &Context) -> Result<Option<Monomial>> {
        Ok(self.log(ctx)?.terms().first().map(|t| t.mono.clone()))
    }
}

/// Exponent arithmetic never truncates.
pub(crate) fn exact_ctx(ctx: &Context) -> Context {
    let mut c = ctx.clone();
    c.max_terms = usize::MAX;
    c
}

impl PartialEq for Monomial {
    fn eq(&self, other: &Self) -> bool {
        let n = self.logs.len().max(other.logs.len());
        (0..n).all(|k| self.log_exponent(k) == other.log_exponent(k))
            && match (&self.exp, &other.exp) {
                (None, None) => true,
                (Some(p), Some(q)) => p == q,
                _ => false,
            }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> Context {
        Context::default()
    }

    fn xp(a: i64) -> Monomial {
        Monomial::log_power(0, Coeff::from_int(a))
    }

    fn ex(p: Series) -> Monomial {
        Monomial::exp_of(&p, &ctx()).unwrap()
    }

    #[test]
    fn products() {
        let c = ctx();
        assert_eq!(xp(2).mul(&xp(3), &c).unwrap(), xp(5));
        let m = Monomial::from_logs(vec![Coeff::one(), Coeff::from_int(2)]);
        assert_eq!(
            m.mul(&xp(-1), &c).unwrap(),
            Monomial::log_power(1, Coeff::from_int(2))
        );
        let ex1 = ex(Series::x());
        let ex2 = ex(Series::monomial(xp(2)));
        let prod = ex1.mul(&ex2, &c).unwrap();
        let sum = Series::x().add(&Series::monomial(xp(2)), &c);
        assert_eq!(prod, ex(sum));
    }

    #[test]
    fn exponent_absorbs_iterated_logs() {
        let c = ctx();
        let m = ex(Series::monomial(Monomial::ell(1)));
        assert_eq!(m, Monomial::x());
        let p = Series::monomial(Monomial::ell(2))
            .scale(&Coeff::from_int(3), &c)
            .add(&Series::x(), &c);
        let m = ex(p);
        assert_eq!(m.log_exponent(1), Coeff::from_int(3));
        assert_eq!(m.height(), 1);
    }

    #[test]
    fn ordering_examples() {
        let c = ctx();
        assert_eq!(Monomial::x().cmp(&ex(Series::x()), &c), Ordering::Less);
        let tenth = Monomial::log_power(0, Coeff::ratio(1, 10));
        assert_eq!(Monomial::ell(1).cmp(&tenth, &c), Ordering::Less);
        let m = ex(Series::x()).mul(&xp(3), &c).unwrap();
        assert_eq!(m.cmp(&m, &c), Ordering::Equal);
        // e^{-x} x^100 is still infinitesimal
        let small = ex(Series::x().neg()).mul(&xp(100), &c).unwrap();
        assert_eq!(small.cmp_one(&c), Ordering::Less);
        // e^{sqrt(log x)} is flatter than any power of x but infinite
        let root_log = Monomial::log_power(1, Coeff::ratio(1, 2));
        let m = ex(Series::monomial(root_log));
        assert_eq!(m.cmp_one(&c), Ordering::Greater);
        assert_eq!(m.cmp(&Monomial::log_power(0, Coeff::ratio(1, 1000)), &c), Ordering::Less);
        assert_eq!(m.cmp(&Monomial::log_power(1, Coeff::from_int(1000)), &c), Ordering::Greater);
    }

    #[test]
    fn logs_of_monomials() {
        let c = ctx();
        let m = xp(2).mul(&ex(Series::x()), &c).unwrap();
        let expect = Series::x().add(
            &Series::term(Coeff::from_int(2), Monomial::ell(1)),
            &c,
        );
        assert_eq!(m.log(&c).unwrap(), expect);
        assert!(Monomial::one().log(&c).unwrap().is_zero());
        let l3 = Monomial::log_power(1, Coeff::from_int(3));
        assert_eq!(
            l3.log(&c).unwrap(),
            Series::term(Coeff::from_int(3), Monomial::ell(2))
        );
    }

    #[test]
    fn flatness_examples() {
        let c = ctx();
        let e = ex(Series::x());
        assert_eq!(Monomial::x().flat_cmp(&e, &c).unwrap(), Flatness::StrictlyFlatter);
        assert_eq!(Monomial::x().flat_cmp(&xp(2), &c).unwrap(), Flatness::SameClass);
        assert_eq!(
            Monomial::x().flat_cmp(&Monomial::ell(1), &c).unwrap(),
            Flatness::StrictlySteeper
        );
    }

    #[test]
    fn depth_and_height_budgets() {
        let c = ctx().with_log_depth(2);
        assert!(Monomial::ell(2).log(&c).is_err());
        let c = ctx().with_exp_height(1);
        let ee = Series::monomial(ex(Series::x()));
        assert!(Monomial::exp_of(&ee, &c).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        pub(super) fn monomial() -> impl Strategy<Value = Monomial> {
            let exps = prop::collection::vec((-3i64..4, 1i64..3), 0..3);
            let e = prop_oneof![
                Just(None),
                (-2i64..3, -1i64..2).prop_map(Some),
            ];
            (exps, e).prop_map(|(logs, e)| {
                let c = Context::default();
                let logs: Vec<Coeff> = logs.into_iter().map(|(n, d)| Coeff::ratio(n, d)).collect();
                let m = Monomial::from_logs(logs);
                match e {
                    None => m,
                    Some((a, b)) => {
                        let p = Series::term(Coeff::from_int(a), Monomial::x())
                            .add(&Series::term(Coeff::from_int(b), Monomial::log_power(0, Coeff::ratio(1, 2))), &c);
                        if p.is_zero() {
                            m
                        } else {
                            m.mul(&Monomial::exp_of(&p, &c).unwrap(), &c).unwrap()
                        }
                    }
                }
            })
        }

        proptest! {
            #[test]
            fn group_axioms(a in monomial(), b in monomial(), d in monomial()) {
                let c = Context::default();
                let ab_d = a.mul(&b, &c).unwrap().mul(&d, &c).unwrap();
                let a_bd = a.mul(&b.mul(&d, &c).unwrap(), &c).unwrap();
                prop_assert_eq!(ab_d, a_bd);
                prop_assert_eq!(a.mul(&Monomial::one(), &c).unwrap(), a.clone());
                prop_assert!(a.mul(&a.inv(), &c).unwrap().is_one());
                prop_assert_eq!(a.mul(&b, &c).unwrap(), b.mul(&a, &c).unwrap());
            }

            #[test]
            fn order_is_total_and_compatible(a in monomial(), b in monomial(), n in monomial()) {
                let c = Context::default();
                prop_assert_eq!(a.cmp(&b, &c), b.cmp(&a, &c).reverse());
                prop_assert_eq!(a.cmp(&b, &c) == Ordering::Equal, a == b);
                if a.cmp(&b, &c) == Ordering::Less {
                    let an = a.mul(&n, &c).unwrap();
                    let bn = b.mul(&n, &c).unwrap();
                    prop_assert_eq!(an.cmp(&bn, &c), Ordering::Less);
                }
                // comparison agrees with the sign of log a - log b
                let d = a.log(&c).unwrap().sub(&b.log(&c).unwrap(), &c);
                let s = d.terms().first().map(|t| t.coeff.signum()).unwrap_or(0);
                prop_assert_eq!(a.cmp(&b, &c), s.cmp(&0));
            }

            #[test]
            fn log_is_a_homomorphism(a in monomial(), b in monomial()) {
                let c = Context::default();
                let lhs = a.mul(&b, &c).unwrap().log(&c).unwrap();
                let rhs = a.log(&c).unwrap().add(&b.log(&c).unwrap(), &c);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn product_of_positive_class_is_not_steeper(a in monomial(), b in monomial()) {
                let c = Context::default();
                if a.is_one() || b.is_one() { return Ok(()); }
                let ab = a.mul(&b, &c).unwrap();
                if ab.is_one() { return Ok(()); }
                let steepest = if a.flat_cmp(&b, &c).unwrap() == Flatness::StrictlyFlatter { &b } else { &a };
                prop_assert_ne!(ab.flat_cmp(steepest, &c).unwrap(), Flatness::StrictlySteeper);
                if a.flat_cmp(&b, &c).unwrap() == Flatness::StrictlyFlatter {
                    prop_assert_eq!(ab.flat_cmp(&b, &c).unwrap(), Flatness::SameClass);
                }
            }

            #[test]
            fn canonicalization_is_idempotent(a in monomial()) {
                let c = Context::default();
                let empty = Series::zero();
                let p = a.exp_part().cloned().unwrap_or(empty);
                let again = Monomial::new(a.log_powers().to_vec(), &p, &c).unwrap();
                prop_assert_eq!(again, a);
            }
        }
    }
}
