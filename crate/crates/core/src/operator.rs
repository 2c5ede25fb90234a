//! Strongly linear operators given monomial-wise, and the inverse of
//! `Id + φ` for contracting `φ` as the alternating sum `Σ (-1)^k φ^k`.

use std::cmp::Ordering;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::Monomial;
use crate::series::Series;

/// A linear map determined by its values on monomials.
pub trait StronglyLinear {
    fn apply_monomial(&self, m: &Monomial, ctx: &Context) -> Result<Series>;
}

impl<F> StronglyLinear for F
where
    F: Fn(&Monomial, &Context) -> Result<Series>,
{
    fn apply_monomial(&self, m: &Monomial, ctx: &Context) -> Result<Series> {
        self(m, ctx)
    }
}

/// Memoized monomial images, kept sorted by monomial.
struct Memo {
    entries: Vec<(Monomial, Series)>,
}

impl Memo {
    fn new() -> Self {
        Memo { entries: Vec::new() }
    }

    fn get_or_apply<O: StronglyLinear + ?Sized>(
        &mut self,
        op: &O,
        m: &Monomial,
        check: bool,
        ctx: &Context,
    ) -> Result<Series> {
        match self.entries.binary_search_by(|(k, _)| k.cmp(m, ctx)) {
            Ok(i) => Ok(self.entries[i].1.clone()),
            Err(i) => {
                let img = op.apply_monomial(m, ctx)?;
                if check {
                    check_contracting(m, &img, ctx)?;
                }
                self.entries.insert(i, (m.clone(), img.clone()));
                Ok(img)
            }
        }
    }
}

fn check_contracting(m: &Monomial, img: &Series, ctx: &Context) -> Result<()> {
    let top = img.terms().first().map(|t| &t.mono).or(img.cutoff());
    match top {
        Some(d) if d.cmp(m, ctx) != Ordering::Less => {
            if img.terms().is_empty() {
                Err(Error::PrecisionExhausted(format!("image of {m} is unknown")))
            } else {
                Err(Error::NotContracting(format!("{m} ↦ {img}")))
            }
        }
        _ => Ok(()),
    }
}

fn apply_with(
    op: &(impl StronglyLinear + ?Sized),
    s: &Series,
    memo: &mut Memo,
    check: bool,
    ctx: &Context,
) -> Result<Series> {
    let mut acc = match s.cutoff() {
        Some(c) => Series::big_o(c.clone()),
        None => Series::zero(),
    };
    for t in s.terms() {
        let img = memo.get_or_apply(op, &t.mono, check, ctx)?;
        acc = acc.add(&img.scale(&t.coeff, ctx), ctx);
    }
    Ok(acc)
}

/// `φ(s)` by linearity. A cutoff on `s` is kept: monomial images never rise
/// above it for the contracting maps this is used with.
pub fn apply(op: &(impl StronglyLinear + ?Sized), s: &Series, ctx: &Context) -> Result<Series> {
    apply_with(op, s, &mut Memo::new(), false, ctx)
}

/// `(Id + φ)^{-1}(s) = Σ_k (-1)^k φ^k(s)`, summed until a new term has no
/// part above the working cutoff.
///
/// When the partial sums stay exact (for instance when they telescope), the
/// tail after `max_terms` steps is bounded by the dominant monomial of the
/// last term, which then becomes the cutoff.
pub fn neumann_invert(op: &(impl StronglyLinear + ?Sized), s: &Series, ctx: &Context) -> Result<Series> {
    let mut memo = Memo::new();
    let mut acc = s.clone();
    let mut cur = s.clone();
    for step in 0..ctx.max_fixpoint_iters {
        if let Some(c) = acc.cutoff() {
            cur = cur.with_cutoff(c, ctx);
        }
        if cur.is_empty() {
            return Ok(acc);
        }
        if step >= ctx.max_terms {
            let d = cur.dominant()?.mono.clone();
            return Ok(acc.with_cutoff(&d, ctx));
        }
        cur = apply_with(op, &cur, &mut memo, true, ctx)?.neg();
        acc = acc.add(&cur, ctx);
    }
    Err(Error::NonConvergent(format!(
        "Neumann series still has terms after {} steps",
        ctx.max_fixpoint_iters
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Coeff;

    fn xp(a: i64) -> Monomial {
        Monomial::log_power(0, Coeff::from_int(a))
    }

    #[test]
    fn zero_operator_is_identity() {
        let c = Context::default();
        let zero = |_: &Monomial, _: &Context| Ok(Series::zero());
        assert_eq!(neumann_invert(&zero, &Series::x(), &c).unwrap(), Series::x());
    }

    #[test]
    fn geometric_series() {
        let c = Context::default().with_max_terms(8);
        let shift = |m: &Monomial, c: &Context| Ok(Series::monomial(m.mul(&xp(-1), c)?));
        let r = neumann_invert(&shift, &Series::one(), &c).unwrap();
        assert_eq!(r.len(), 8);
        for (k, t) in r.terms().iter().enumerate() {
            assert_eq!(t.coeff, Coeff::from_int(if k % 2 == 0 { 1 } else { -1 }));
            assert_eq!(t.mono, xp(-(k as i64)));
        }
        // (Id + φ)(r) = 1 up to the cutoff
        let back = r.add(&apply(&shift, &r, &c).unwrap(), &c);
        assert!(back.sub(&Series::one(), &c).is_empty());
    }

    #[test]
    fn expanding_operator_is_rejected() {
        let c = Context::default();
        let grow = |m: &Monomial, c: &Context| Ok(Series::monomial(m.mul(&xp(1), c)?));
        let e = neumann_invert(&grow, &Series::one(), &c).unwrap_err();
        assert_eq!(e.code(), "NotContracting");
    }

    #[test]
    fn slow_contraction_hits_iteration_cap() {
        let c = Context::default().with_fixpoint_iters(5).with_max_terms(100);
        let slow = |m: &Monomial, c: &Context| {
            Ok(Series::monomial(m.mul(&Monomial::log_power(0, Coeff::ratio(-1, 1000)), c)?))
        };
        let e = neumann_invert(&slow, &Series::one(), &c).unwrap_err();
        assert_eq!(e.code(), "NonConvergent");
    }
}
