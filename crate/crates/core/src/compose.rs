//! Right composition `f ∘ s` with a positive infinite `s`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::cmp::Ordering;

use crate::calculus::{derive, integrate, monomial_log_derivative};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::operator::StronglyLinear;
use crate::scalar::Coeff;
use crate::series::Series;
use crate::translog::{exp_s, log_s, pow_s};

/// Composition with a fixed right argument `s`, caching the iterated
/// logarithms `L_k(s)` and monomial images.
pub struct Composer<'a> {
    s: Series,
    ctx: &'a Context,
    logs: RefCell<Vec<Series>>,
    pows: RefCell<HashMap<(usize, i64), Series>>,
    memo: RefCell<Vec<(Monomial, Series)>>,
}

impl<'a> Composer<'a> {
    pub fn new(s: &Series, ctx: &'a Context) -> Result<Self> {
        if !s.is_positive_infinite(ctx)? {
            return Err(Error::NotPositiveInfinite(s.to_string()));
        }
        Ok(Composer {
            s: s.clone(),
            ctx,
            logs: RefCell::new(vec![s.clone()]),
            pows: RefCell::new(HashMap::new()),
            memo: RefCell::new(Vec::new()),
        })
    }

    pub fn argument(&self) -> &Series {
        &self.s
    }

    /// `L_k(s)`, the k-fold logarithm of `s`.
    fn log_iter(&self, k: usize) -> Result<Series> {
        let mut logs = self.logs.borrow_mut();
        while logs.len() <= k {
            let next = if self.s.is_x() {
                Series::monomial(Monomial::ell(logs.len()))
            } else {
                log_s(logs.last().unwrap(), self.ctx)?
            };
            logs.push(next);
        }
        Ok(logs[k].clone())
    }

    /// `L_k(s)^n`, built from the nearest cached power of the same sign.
    fn log_power(&self, k: usize, n: i64) -> Result<Series> {
        if let Some(p) = self.pows.borrow().get(&(k, n)) {
            return Ok(p.clone());
        }
        let near = self
            .pows
            .borrow()
            .keys()
            .filter(|(j, m)| *j == k && m.signum() == n.signum() && m.abs() < n.abs())
            .map(|(_, m)| *m)
            .max_by_key(|m| m.abs());
        let p = match near {
            Some(m) => {
                let rest = self.log_power(k, n - m)?;
                let base = self.pows.borrow()[&(k, m)].clone();
                base.mul(&rest, self.ctx)?
            }
            None => self.log_iter(k)?.powi(n, self.ctx)?,
        };
        self.pows.borrow_mut().insert((k, n), p.clone());
        Ok(p)
    }

    /// `𝔪 ∘ s = ∏_k L_k(s)^{a_k} · exp(P ∘ s)`.
    pub fn monomial(&self, m: &Monomial) -> Result<Series> {
        if self.s.is_x() {
            return Ok(Series::monomial(m.clone()));
        }
        {
            let memo = self.memo.borrow();
            if let Ok(i) = memo.binary_search_by(|(k, _)| k.cmp(m, self.ctx)) {
                return Ok(memo[i].1.clone());
            }
        }
        let ctx = self.ctx;
        let mut prod = Series::one();
        let mut expo = Series::zero();
        for (k, a) in m.log_powers().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match a.as_i64() {
                Some(n) if n.abs() <= 64 => {
                    prod = prod.mul(&self.log_power(k, n)?, ctx)?;
                }
                _ => prod = prod.mul(&pow_s(&self.log_iter(k)?, a, ctx)?, ctx)?,
            }
        }
        if let Some(p) = m.exp_part() {
            expo = expo.add(&self.series(p)?, ctx);
        }
        if !expo.is_zero() {
            prod = prod.mul(&exp_s(&expo, ctx)?, ctx)?;
        }
        let mut memo = self.memo.borrow_mut();
        if let Err(i) = memo.binary_search_by(|(k, _)| k.cmp(m, ctx)) {
            memo.insert(i, (m.clone(), prod.clone()));
        }
        Ok(prod)
    }

    /// `f ∘ s`; a cutoff `c` of `f` becomes the dominant monomial of `c ∘ s`.
    pub fn series(&self, f: &Series) -> Result<Series> {
        if self.s.is_x() {
            return Ok(f.clone());
        }
        let ctx = self.ctx;
        let mut acc = match f.cutoff() {
            None => Series::zero(),
            Some(c) => {
                let img = self.monomial(c)?;
                let b = img.terms().first().map(|t| t.mono.clone()).or(img.cutoff().cloned());
                Series::big_o(b.expect("image of a monomial is nonzero"))
            }
        };
        for t in f.terms() {
            let img = self.monomial(&t.mono)?;
            acc = acc.add(&img.scale(&t.coeff, ctx), ctx);
        }
        Ok(acc)
    }
}

impl StronglyLinear for Composer<'_> {
    fn apply_monomial(&self, m: &Monomial, _ctx: &Context) -> Result<Series> {
        self.monomial(m)
    }
}

/// `f ∘ s` for positive infinite `s`.
pub fn compose(f: &Series, s: &Series, ctx: &Context) -> Result<Series> {
    if s.is_x() {
        return Ok(f.clone());
    }
    Composer::new(s, ctx)?.series(f)
}

/// `f ∘ (s + δ) = Σ_k (f^{(k)} ∘ s) δ^k / k!`, requiring `δ ≺ s` and
/// `(𝔪† ∘ s) δ ≺ 1` for every monomial of `f`.
pub fn taylor_compose(f: &Series, s: &Series, delta: &Series, ctx: &Context) -> Result<Series> {
    let comp = Composer::new(s, ctx)?;
    if delta.is_zero() {
        return comp.series(f);
    }
    if delta.dominance(s, ctx)? != Ordering::Less {
        return Err(Error::NotTaylorConfigured(format!("{delta} is not ≺ {s}")));
    }
    for t in f.terms() {
        let dagger = monomial_log_derivative(&t.mono, ctx)?;
        if dagger.is_zero() {
            continue;
        }
        let q = comp.series(&dagger)?.mul(delta, ctx)?;
        let top = q.terms().first().map(|t| &t.mono).or(q.cutoff());
        if top.is_some_and(|m| m.cmp_one(ctx) != Ordering::Less) {
            return Err(Error::NotTaylorConfigured(format!(
                "({}†∘s)·δ is not infinitesimal",
                t.mono
            )));
        }
    }
    let mut acc = comp.series(f)?;
    let mut deriv = f.clone();
    let mut dpow = Series::one();
    let mut fact = Coeff::one();
    for k in 1..=ctx.max_fixpoint_iters {
        deriv = derive(&deriv, ctx)?;
        if deriv.is_zero() {
            return Ok(acc);
        }
        dpow = dpow.mul(delta, ctx)?;
        fact = fact.mul(&Coeff::from_int(k as i64));
        let mut term = comp.series(&deriv)?.mul(&dpow, ctx)?.scale(&fact.recip()?, ctx);
        if let Some(c) = acc.cutoff() {
            term = term.with_cutoff(c, ctx);
        }
        if term.is_empty() {
            return Ok(acc.add(&term, ctx));
        }
        acc = acc.add(&term, ctx);
    }
    Err(Error::NonConvergent(format!(
        "Taylor series still has terms after {} steps",
        ctx.max_fixpoint_iters
    )))
}

/// `∫_s^t f = (∫f)∘t - (∫f)∘s`.
pub fn definite_integral(f: &Series, s: &Series, t: &Series, ctx: &Context) -> Result<Series> {
    let i = integrate(f, ctx)?;
    Ok(compose(&i, t, ctx)?.sub(&compose(&i, s, ctx)?, ctx))
}
