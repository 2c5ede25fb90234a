//! Truncated well-based series over [`Monomial`]s.
//!
//! A [`Series`] stores its nonzero terms in strictly decreasing monomial
//! order together with an optional cutoff `c`: every monomial `≻ c` is
//! represented exactly, nothing is known about monomials `⪯ c`.

use std::cmp::Ordering;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::scalar::Coeff;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: Coeff,
    pub mono: Monomial,
}

impl Term {
    pub fn new(coeff: Coeff, mono: Monomial) -> Self {
        Term { coeff, mono }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Series {
    terms: Vec<Term>,
    cutoff: Option<Monomial>,
}

/// Sign and monomial of the dominant term of `p - q`, walking both term lists.
pub(crate) fn leading_difference(p: &Series, q: &Series, ctx: &Context) -> Option<(i32, Monomial)> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (p.terms.get(i), q.terms.get(j)) {
            (None, None) => return None,
            (Some(a), None) => return Some((a.coeff.signum(), a.mono.clone())),
            (None, Some(b)) => return Some((-b.coeff.signum(), b.mono.clone())),
            (Some(a), Some(b)) => match a.mono.cmp(&b.mono, ctx) {
                Ordering::Greater => return Some((a.coeff.signum(), a.mono.clone())),
                Ordering::Less => return Some((-b.coeff.signum(), b.mono.clone())),
                Ordering::Equal => {
                    let d = ctx.diff_cmp(&a.coeff, &b.coeff);
                    if d != Ordering::Equal {
                        return Some((d as i32, a.mono.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

fn max_cutoff(a: Option<&Monomial>, b: Option<&Monomial>, ctx: &Context) -> Option<Monomial> {
    match (a, b) {
        (None, None) => None,
        (Some(m), None) | (None, Some(m)) => Some(m.clone()),
        (Some(m), Some(n)) => Some(Monomial::max_of(m.clone(), n.clone(), ctx)),
    }
}

impl Series {
    pub fn zero() -> Self {
        Series::default()
    }

    pub fn one() -> Self {
        Series::constant(Coeff::one())
    }

    pub fn constant(c: Coeff) -> Self {
        Series::term(c, Monomial::one())
    }

    pub fn x() -> Self {
        Series::monomial(Monomial::x())
    }

    pub fn monomial(m: Monomial) -> Self {
        Series::term(Coeff::one(), m)
    }

    pub fn term(c: Coeff, m: Monomial) -> Self {
        if c.is_zero() {
            return Series::zero();
        }
        Series {
            terms: vec![Term::new(c, m)],
            cutoff: None,
        }
    }

    /// `O(m)`: no known terms, nothing known at or below `m`.
    pub fn big_o(m: Monomial) -> Self {
        Series {
            terms: Vec::new(),
            cutoff: Some(m),
        }
    }

    /// Sorts, merges equal monomials, drops zeros and applies the cutoff and
    /// the term budget.
    pub fn from_terms(mut terms: Vec<Term>, cutoff: Option<Monomial>, ctx: &Context) -> Self {
        terms.sort_by(|a, b| b.mono.cmp(&a.mono, ctx));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            if let Some(last) = merged.last_mut() {
                if last.mono.cmp(&t.mono, ctx) == Ordering::Equal {
                    last.coeff = ctx.sum(&last.coeff, &t.coeff);
                    continue;
                }
            }
            merged.push(t);
        }
        merged.retain(|t| !t.coeff.is_zero());
        Series::finish(merged, cutoff, ctx)
    }

    /// Terms already sorted and merged; applies cutoff and budget.
    fn finish(mut terms: Vec<Term>, mut cutoff: Option<Monomial>, ctx: &Context) -> Self {
        if let Some(c) = &cutoff {
            let keep = terms
                .iter()
                .position(|t| t.mono.cmp(c, ctx) != Ordering::Greater)
                .unwrap_or(terms.len());
            terms.truncate(keep);
        }
        if terms.len() > ctx.max_terms {
            let dropped = terms[ctx.max_terms].mono.clone();
            terms.truncate(ctx.max_terms);
            cutoff = max_cutoff(cutoff.as_ref(), Some(&dropped), ctx);
        }
        Series { terms, cutoff }
    }

    pub(crate) fn from_sorted_exact(terms: Vec<Term>) -> Self {
        Series { terms, cutoff: None }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn cutoff(&self) -> Option<&Monomial> {
        self.cutoff.as_ref()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_exact(&self) -> bool {
        self.cutoff.is_none()
    }

    /// Exactly zero (no terms, no cutoff).
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.cutoff.is_none()
    }

    /// No retained terms (possibly an `O(c)`).
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_x(&self) -> bool {
        self.cutoff.is_none()
            && self.terms.len() == 1
            && self.terms[0].coeff.is_one()
            && self.terms[0].mono.is_x()
    }

    /// Raises the cutoff to at least `m`, dropping terms `⪯ m`.
    pub fn with_cutoff(&self, m: &Monomial, ctx: &Context) -> Series {
        let cutoff = max_cutoff(self.cutoff.as_ref(), Some(m), ctx);
        Series::finish(self.terms.clone(), cutoff, ctx)
    }

    /// Keeps the first `n` terms, recording a cutoff if anything is dropped.
    pub fn truncated(&self, n: usize, ctx: &Context) -> Series {
        let mut c = ctx.clone();
        c.max_terms = n;
        Series::finish(self.terms.clone(), self.cutoff.clone(), &c)
    }

    pub fn neg(&self) -> Series {
        Series {
            terms: self
                .terms
                .iter()
                .map(|t| Term::new(t.coeff.neg(), t.mono.clone()))
                .collect(),
            cutoff: self.cutoff.clone(),
        }
    }

    pub fn scale(&self, r: &Coeff, ctx: &Context) -> Series {
        if r.is_zero() {
            return Series::zero();
        }
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let c = t.coeff.mul(r);
                Term::new(ctx.clean(c.clone(), &c), t.mono.clone())
            })
            .filter(|t| !t.coeff.is_zero())
            .collect();
        Series {
            terms,
            cutoff: self.cutoff.clone(),
        }
    }

    pub fn add(&self, other: &Series, ctx: &Context) -> Series {
        let cutoff = max_cutoff(self.cutoff.as_ref(), other.cutoff.as_ref(), ctx);
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() || j < other.terms.len() {
            let ord = match (self.terms.get(i), other.terms.get(j)) {
                (Some(a), Some(b)) => a.mono.cmp(&b.mono, ctx),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    out.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let (a, b) = (&self.terms[i], &other.terms[j]);
                    let c = ctx.sum(&a.coeff, &b.coeff);
                    if !c.is_zero() {
                        out.push(Term::new(c, a.mono.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Series::finish(out, cutoff, ctx)
    }

    /// Sum without the term budget.
    pub(crate) fn add_exact(&self, other: &Series, ctx: &Context) -> Series {
        self.add(other, &crate::monomial::exact_ctx(ctx))
    }

    pub fn sub(&self, other: &Series, ctx: &Context) -> Series {
        self.add(&other.neg(), ctx)
    }

    pub fn mul_monomial(&self, m: &Monomial, ctx: &Context) -> Result<Series> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            terms.push(Term::new(t.coeff.clone(), t.mono.mul(m, ctx)?));
        }
        let cutoff = match &self.cutoff {
            Some(c) => Some(c.mul(m, ctx)?),
            None => None,
        };
        Ok(Series { terms, cutoff })
    }

    pub fn mul_term(&self, c: &Coeff, m: &Monomial, ctx: &Context) -> Result<Series> {
        Ok(self.mul_monomial(m, ctx)?.scale(c, ctx))
    }

    /// Dominant monomial, or the cutoff when no term is retained.
    fn bound(&self) -> Option<&Monomial> {
        self.terms.first().map(|t| &t.mono).or(self.cutoff.as_ref())
    }

    pub fn mul(&self, other: &Series, ctx: &Context) -> Result<Series> {
        if self.is_zero() || other.is_zero() {
            return Ok(Series::zero());
        }
        let mut cutoff: Option<Monomial> = None;
        if let (Some(c), Some(b)) = (&self.cutoff, other.bound()) {
            cutoff = Some(c.mul(b, ctx)?);
        }
        if let (Some(c), Some(b)) = (&other.cutoff, self.bound()) {
            let m = c.mul(b, ctx)?;
            cutoff = max_cutoff(cutoff.as_ref(), Some(&m), ctx);
        }
        // Monomials first; coefficients only for the groups that survive
        // truncation.
        let mut prods = Vec::with_capacity(self.terms.len() * other.terms.len());
        for (i, a) in self.terms.iter().enumerate() {
            for (j, b) in other.terms.iter().enumerate() {
                let m = a.mono.mul(&b.mono, ctx)?;
                if let Some(c) = &cutoff {
                    if m.cmp(c, ctx) != Ordering::Greater {
                        continue;
                    }
                }
                prods.push((m, i, j));
            }
        }
        prods.sort_by(|a, b| b.0.cmp(&a.0, ctx));
        let mut terms: Vec<Term> = Vec::new();
        let mut k = 0;
        while k < prods.len() {
            let mut end = k + 1;
            while end < prods.len() && prods[end].0.cmp(&prods[k].0, ctx) == Ordering::Equal {
                end += 1;
            }
            let mut c = Coeff::zero();
            for (_, i, j) in &prods[k..end] {
                c = ctx.sum(&c, &self.terms[*i].coeff.mul(&other.terms[*j].coeff));
            }
            if !c.is_zero() {
                terms.push(Term::new(c, prods[k].0.clone()));
                if terms.len() > ctx.max_terms {
                    break;
                }
            }
            k = end;
        }
        Ok(Series::finish(terms, cutoff, ctx))
    }

    /// The dominant term; fails on `0` and on series with no retained term.
    pub fn dominant(&self) -> Result<&Term> {
        match self.terms.first() {
            Some(t) => Ok(t),
            None if self.cutoff.is_some() => Err(Error::PrecisionExhausted(format!(
                "dominant term of {self} is below the cutoff"
            ))),
            None => Err(Error::ZeroDivision),
        }
    }

    /// `s / τ_s - 1`, the infinitesimal relative remainder.
    pub(crate) fn relative_remainder(&self, ctx: &Context) -> Result<Series> {
        let lead = self.dominant()?;
        let inv_m = lead.mono.inv();
        let inv_c = lead.coeff.recip()?;
        let rest = Series {
            terms: self.terms[1..].to_vec(),
            cutoff: self.cutoff.clone(),
        };
        rest.mul_term(&inv_c, &inv_m, ctx)
    }

    pub fn reciprocal(&self, ctx: &Context) -> Result<Series> {
        let lead = self.dominant()?.clone();
        let eps = self.relative_remainder(ctx)?;
        let geo = power_series(&eps, |k| Ok(if k % 2 == 0 { Coeff::one() } else { Coeff::from_int(-1) }), ctx)?;
        geo.mul_term(&lead.coeff.recip()?, &lead.mono.inv(), ctx)
    }

    pub fn div(&self, other: &Series, ctx: &Context) -> Result<Series> {
        if let Some(t) = other.single_term() {
            return self.mul_term(&t.coeff.recip()?, &t.mono.inv(), ctx);
        }
        self.mul(&other.reciprocal(ctx)?, ctx)
    }

    /// The only term of an exact monomial series.
    pub fn single_term(&self) -> Option<&Term> {
        if self.cutoff.is_none() && self.terms.len() == 1 {
            self.terms.first()
        } else {
            None
        }
    }

    pub fn powi(&self, n: i64, ctx: &Context) -> Result<Series> {
        if n < 0 {
            return self.reciprocal(ctx)?.powi(-n, ctx);
        }
        let mut acc = Series::one();
        let mut base = self.clone();
        let mut n = n as u64;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base, ctx)?;
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base, ctx)?;
            }
        }
        Ok(acc)
    }

    /// Coefficient of `m`; `None` if `m` lies at or below the cutoff.
    pub fn coefficient(&self, m: &Monomial, ctx: &Context) -> Option<Coeff> {
        if let Some(c) = &self.cutoff {
            if m.cmp(c, ctx) != Ordering::Greater {
                return None;
            }
        }
        Some(
            self.terms
                .iter()
                .find(|t| t.mono.cmp(m, ctx) == Ordering::Equal)
                .map(|t| t.coeff.clone())
                .unwrap_or_else(Coeff::zero),
        )
    }

    /// Splits into purely large part, constant and infinitesimal part. The
    /// large part and constant must be known exactly.
    pub fn split(&self, ctx: &Context) -> Result<(Series, Coeff, Series)> {
        if let Some(c) = &self.cutoff {
            if c.cmp_one(ctx) != Ordering::Less {
                return Err(Error::PrecisionExhausted(format!(
                    "bounded part of {self} is below the cutoff"
                )));
            }
        }
        let mut large = Vec::new();
        let mut constant = Coeff::zero();
        let mut small = Vec::new();
        for t in &self.terms {
            match t.mono.cmp_one(ctx) {
                Ordering::Greater => large.push(t.clone()),
                Ordering::Equal => constant = t.coeff.clone(),
                Ordering::Less => small.push(t.clone()),
            }
        }
        Ok((
            Series::from_sorted_exact(large),
            constant,
            Series {
                terms: small,
                cutoff: self.cutoff.clone(),
            },
        ))
    }

    /// Terms with monomials `≻ 1`; exact only if the cutoff is `≺ 1`.
    pub fn large_part(&self, ctx: &Context) -> Series {
        let terms = self
            .terms
            .iter()
            .filter(|t| t.mono.cmp_one(ctx) == Ordering::Greater)
            .cloned()
            .collect();
        Series::from_sorted_exact(terms)
    }

    /// Coefficient of the monomial `1` (zero if absent).
    pub fn constant_term(&self, ctx: &Context) -> Coeff {
        self.terms
            .iter()
            .find(|t| t.mono.is_one())
            .or_else(|| self.terms.iter().find(|t| t.mono.cmp_one(ctx) == Ordering::Equal))
            .map(|t| t.coeff.clone())
            .unwrap_or_else(Coeff::zero)
    }

    /// Sign of the series: the sign of its dominant coefficient.
    pub fn sign(&self) -> Result<i32> {
        match self.terms.first() {
            Some(t) => Ok(t.coeff.signum()),
            None if self.cutoff.is_some() => Err(Error::PrecisionExhausted(format!(
                "sign of {self} is below the cutoff"
            ))),
            None => Ok(0),
        }
    }

    /// Order of the ordered field: sign of the dominant term of `s - t`.
    pub fn compare(&self, other: &Series, ctx: &Context) -> Result<Ordering> {
        let d = self.sub(other, ctx);
        d.sign().map(|s| s.cmp(&0))
    }

    /// Dominance `≺ / ≍ / ≻`, comparing dominant monomials. `0` is below
    /// every nonzero series.
    pub fn dominance(&self, other: &Series, ctx: &Context) -> Result<Ordering> {
        match (self.is_zero(), other.is_zero()) {
            (true, true) => return Ok(Ordering::Equal),
            (true, false) => return Ok(Ordering::Less),
            (false, true) => return Ok(Ordering::Greater),
            _ => {}
        }
        let a = self.dominant()?;
        let b = other.dominant()?;
        Ok(a.mono.cmp(&b.mono, ctx))
    }

    /// `s ∼ t`, i.e. `s - t ≺ s`.
    pub fn is_similar(&self, other: &Series, ctx: &Context) -> Result<bool> {
        let d = self.sub(other, ctx);
        if d.is_zero() {
            return Ok(!self.is_zero());
        }
        let lead = self.dominant()?;
        match d.terms.first() {
            Some(t) => Ok(t.mono.cmp(&lead.mono, ctx) == Ordering::Less),
            None => {
                let c = d.cutoff.as_ref().unwrap();
                if c.cmp(&lead.mono, ctx) == Ordering::Less {
                    Ok(true)
                } else {
                    Err(Error::PrecisionExhausted(format!("{self} ∼ {other}")))
                }
            }
        }
    }

    /// `s ≻ 1` and `s > 0`.
    pub fn is_positive_infinite(&self, ctx: &Context) -> Result<bool> {
        let t = match self.dominant() {
            Ok(t) => t,
            Err(Error::ZeroDivision) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(t.coeff.is_positive() && t.mono.cmp_one(ctx) == Ordering::Greater)
    }

    /// True when `s - t` retains no term.
    pub fn agrees_with(&self, other: &Series, ctx: &Context) -> bool {
        self.sub(other, ctx).is_empty()
    }

    /// True when every retained term of `s - t` has a coefficient within
    /// `rel` of the matching coefficient of `s` or `t` (or of 1).
    pub fn agrees_within(&self, other: &Series, rel: f64, ctx: &Context) -> bool {
        let d = self.sub(other, ctx);
        d.terms.iter().all(|t| {
            let mut scale = 1f64;
            for s in [self, other] {
                if let Some(c) = s.coefficient(&t.mono, ctx) {
                    scale = scale.max(c.abs().to_f64());
                }
            }
            t.coeff.abs().to_f64() <= rel * scale
        })
    }

    /// Applies `f` to each coefficient.
    pub fn map_coeffs(&self, f: impl Fn(&Coeff) -> Coeff, ctx: &Context) -> Series {
        let terms = self
            .terms
            .iter()
            .map(|t| Term::new(f(&t.coeff), t.mono.clone()))
            .collect();
        Series::from_terms(terms, self.cutoff.clone(), ctx)
    }
}

/// `Σ_k a_k ε^k` for an infinitesimal `ε`, generated until the powers of
/// `𝔡(ε)` fall below the accumulated cutoff.
pub fn power_series(
    eps: &Series,
    mut coeff: impl FnMut(usize) -> Result<Coeff>,
    ctx: &Context,
) -> Result<Series> {
    let a0 = coeff(0)?;
    let mut acc = Series::constant(a0);
    if eps.is_zero() {
        return Ok(acc);
    }
    let d = match eps.terms.first() {
        Some(t) => t.mono.clone(),
        None => {
            // ε = O(c) with c ≺ 1
            let c = eps.cutoff.clone().unwrap();
            if c.cmp_one(ctx) != Ordering::Less {
                return Err(Error::Precondition(format!("{eps} is not infinitesimal")));
            }
            return Ok(acc.with_cutoff(&c, ctx));
        }
    };
    if d.cmp_one(ctx) != Ordering::Less
        || eps.cutoff.as_ref().is_some_and(|c| c.cmp_one(ctx) != Ordering::Less)
    {
        return Err(Error::Precondition(format!("{eps} is not infinitesimal")));
    }
    let mut pow = Series::one();
    let mut bound = Monomial::one();
    let cap = ctx.max_fixpoint_iters.max(ctx.max_terms + 1);
    for k in 1..=cap {
        bound = bound.mul(&d, ctx)?;
        if let Some(c) = &acc.cutoff {
            if bound.cmp(c, ctx) != Ordering::Greater {
                return Ok(acc);
            }
        }
        pow = pow.mul(eps, ctx)?;
        let a = coeff(k)?;
        if !a.is_zero() {
            acc = acc.add(&pow.scale(&a, ctx), ctx);
        } else if let Some(c) = &pow.cutoff {
            acc = acc.with_cutoff(c, ctx);
        }
        // later powers only matter above the accumulated cutoff
        if let Some(c) = &acc.cutoff {
            pow = pow.with_cutoff(c, ctx);
        }
    }
    let next = bound.mul(&d, ctx)?;
    Ok(acc.with_cutoff(&next, ctx))
}
