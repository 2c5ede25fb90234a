//! Abel functions, fractional iterates, centralizers and conjugators.
//!
//! Everything runs in the normalized frame `h = L^n ∘ f ∘ E^n` where
//! `h = x + c + δ` with `c ≥ 0` and `δ` steep or zero.

use std::cmp::Ordering;

use crate::calculus::{derive, integrate, log_derivative};
use crate::compose::{compose, Composer};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::invert::comp_inverse;
use crate::monomial::{Flatness, Monomial};
use crate::operator::neumann_invert;
use crate::scalar::Coeff;
use crate::series::Series;
use crate::translog::{exp_s, flat_cmp, log_s};

#[derive(Clone, Debug, PartialEq)]
pub struct AbelResult {
    /// `V` with `V ∘ f = V + 1`.
    pub v: Series,
    /// Number of log/exp conjugations used.
    pub depth: usize,
    /// `V ∘ f - V - 1`.
    pub residual: Series,
    /// Additive constant of `V`, always 0.
    pub norm_constant: Coeff,
}

/// `h = L^n ∘ f ∘ E^n = x + c + δ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub depth: usize,
    pub h: Series,
    pub c: Coeff,
    pub delta: Series,
}

/// Sign of `f ∘ g - g ∘ f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CommutatorSign {
    Positive,
    Zero,
    Negative,
}

fn is_steep(d: &Series, ctx: &Context) -> Result<bool> {
    let dagger = log_derivative(d, ctx)?;
    Ok(dagger.dominance(&Series::one(), ctx)? == Ordering::Greater)
}

/// `L ∘ h ∘ E`.
fn conj_step(h: &Series, ctx: &Context) -> Result<Series> {
    let e = exp_s(&Series::x(), ctx)?;
    log_s(&compose(h, &e, ctx)?, ctx)
}

fn conj_n(f: &Series, n: usize, ctx: &Context) -> Result<Series> {
    let mut h = f.clone();
    for _ in 0..n {
        h = conj_step(&h, ctx)?;
    }
    Ok(h)
}

/// `E^n ∘ s ∘ L^n`.
fn unconj_n(s: &Series, n: usize, ctx: &Context) -> Result<Series> {
    if n == 0 {
        return Ok(s.clone());
    }
    let mut out = compose(s, &Series::monomial(Monomial::ell(n)), ctx)?;
    for _ in 0..n {
        out = exp_s(&out, ctx)?;
    }
    Ok(out)
}

fn require_above_x(f: &Series, ctx: &Context) -> Result<()> {
    if !f.is_positive_infinite(ctx)? {
        return Err(Error::NotPositiveInfinite(f.to_string()));
    }
    if f.compare(&Series::x(), ctx)? != Ordering::Greater {
        return Err(Error::Precondition(format!("{f} is not > x")));
    }
    Ok(())
}

pub fn normalize(f: &Series, ctx: &Context) -> Result<Normalized> {
    require_above_x(f, ctx)?;
    let x = Series::x();
    let e = exp_s(&x, ctx)?;
    let mut h = f.clone();
    for n in 0..=ctx.max_exp_height {
        if n > 0 {
            h = conj_step(&h, ctx)?;
        }
        let d = h.sub(&x, ctx);
        if d.dominance(&Series::one(), ctx)? != Ordering::Greater {
            let c = d.constant_term(ctx);
            let delta = d.sub(&Series::constant(c.clone()), ctx);
            if c.is_negative() || (c.is_zero() && delta.sign()? <= 0) {
                return Err(Error::Precondition(format!("{f} is not > x")));
            }
            if delta.is_zero() || is_steep(&delta, ctx)? {
                return Ok(Normalized { depth: n, h, c, delta });
            }
        } else if flat_cmp(&h, &e, ctx)? != Flatness::StrictlyFlatter {
            return Err(Error::ExponentialityNonzero(format!(
                "{f} is conjugate to {h}, which is not flatter than exp(x)"
            )));
        }
    }
    Err(Error::ExponentialityNonzero(format!(
        "{f} does not reach x + c + δ within {} conjugations",
        ctx.max_exp_height
    )))
}

/// `V = x + Σ_k δ ∘ f^{[k]}` for `f = x + 1 + δ`, `δ` steep.
pub fn solve_translation(f: &Series, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    let delta = f.sub(&x, ctx).sub(&Series::one(), ctx);
    if delta.is_zero() {
        return Ok(x);
    }
    if delta.dominance(&Series::one(), ctx)? != Ordering::Less {
        return Err(Error::Precondition(format!("{f} is not x + 1 + o(1)")));
    }
    if !is_steep(&delta, ctx)? {
        return Err(Error::NotSteepResidual(delta.to_string()));
    }
    let comp = Composer::new(f, ctx)?;
    let mut g = delta.clone();
    let mut term = delta;
    let mut last = term.dominant()?.mono.clone();
    for step in 0..ctx.max_fixpoint_iters {
        term = comp.series(&term)?;
        if let Some(c) = g.cutoff() {
            term = term.with_cutoff(c, ctx);
        }
        if term.is_empty() {
            return Ok(x.add(&g.add(&term, ctx), ctx));
        }
        let d = term.dominant()?.mono.clone();
        if step >= ctx.max_terms {
            return Ok(x.add(&g.with_cutoff(&d, ctx), ctx));
        }
        if d.cmp(&last, ctx) != Ordering::Less {
            return Err(Error::NonConvergent(format!("δ ∘ f^[k] stopped decreasing at {d}")));
        }
        last = d;
        g = g.add(&term, ctx);
    }
    Err(Error::NonConvergent(format!("translation sum for {f} did not settle")))
}

/// `Σ_{k≥1} ∂^{k-1}(D) η^k / k!`, the Taylor expansion of `∫D ∘ (x+η) - ∫D`.
fn taylor_difference(d: &Series, eta: &Series, ctx: &Context) -> Result<Series> {
    let mut acc = d.mul(eta, ctx)?;
    let mut deriv = d.clone();
    let mut pow = eta.clone();
    let mut fact = Coeff::one();
    for k in 2..=ctx.max_fixpoint_iters {
        deriv = derive(&deriv, ctx)?;
        if deriv.is_zero() {
            return Ok(acc);
        }
        pow = pow.mul(eta, ctx)?;
        fact = fact.mul(&Coeff::from_int(k as i64));
        let mut term = deriv.mul(&pow, ctx)?.scale(&fact.recip()?, ctx);
        if let Some(c) = acc.cutoff() {
            term = term.with_cutoff(c, ctx);
        }
        if term.is_empty() {
            return Ok(acc.add(&term, ctx));
        }
        if k > ctx.max_terms {
            let b = term.dominant()?.mono.clone();
            return Ok(acc.with_cutoff(&b, ctx));
        }
        acc = acc.add(&term, ctx);
    }
    Err(Error::NonConvergent("Taylor difference did not settle".into()))
}

/// `V'` for `f = x + ε`, `0 < ε ≺ 1`: the solution of
/// `D + Σ_{k≥2} ∂^{k-1}(D) ε^{k-1}/k! = 1/ε`.
fn abel_derivative(f: &Series, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    let eps = f.sub(&x, ctx);
    if eps.is_zero()
        || eps.dominance(&Series::one(), ctx)? != Ordering::Less
        || eps.sign()? <= 0
    {
        return Err(Error::Precondition(format!("{f} is not x + ε with 0 < ε ≺ 1")));
    }
    let t = |m: &Monomial, c: &Context| -> Result<Series> {
        let mut deriv = Series::monomial(m.clone());
        let mut pow = Series::one();
        let mut fact = Coeff::one();
        let mut acc = Series::zero();
        for j in 1..=c.max_fixpoint_iters {
            deriv = derive(&deriv, c)?;
            if deriv.is_zero() {
                return Ok(acc);
            }
            pow = pow.mul(&eps, c)?;
            fact = fact.mul(&Coeff::from_int(j as i64 + 1));
            let mut term = deriv.mul(&pow, c)?.scale(&fact.recip()?, c);
            if let Some(cut) = acc.cutoff() {
                term = term.with_cutoff(cut, c);
            }
            if term.is_empty() {
                return Ok(acc.add(&term, c));
            }
            if j > c.max_terms {
                let b = term.dominant()?.mono.clone();
                return Ok(acc.with_cutoff(&b, c));
            }
            acc = acc.add(&term, c);
        }
        Err(Error::NonConvergent("Taylor operator did not settle".into()))
    };
    neumann_invert(&t, &eps.reciprocal(ctx)?, ctx).map_err(|e| match e {
        Error::NotContracting(m) => Error::NonConvergent(format!("not contracting: {m}")),
        e => e,
    })
}

/// `u` with `u ∘ f = f' · u` and `u ∼ f - x`, for `f = x + ε`, `0 < ε ≺ 1`.
pub fn solve_iterlog(f: &Series, ctx: &Context) -> Result<Series> {
    abel_derivative(f, ctx)?.reciprocal(ctx)
}

/// Abel function of `h = x + c + δ` in its own frame.
fn frame_abel(nf: &Normalized, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    if nf.c.is_positive() {
        // (x/c) ∘ h ∘ (cx) = x + 1 + δ(cx)/c
        let r = nf.c.recip()?;
        let hp = if nf.delta.is_zero() {
            x.add(&Series::one(), ctx)
        } else {
            compose(&nf.h, &x.scale(&nf.c, ctx), ctx)?.scale(&r, ctx)
        };
        let w = solve_translation(&hp, ctx)?;
        return compose(&w, &x.scale(&r, ctx), ctx);
    }
    let d = abel_derivative(&nf.h, ctx)?;
    let mut v = integrate(&d, ctx)?;
    // V∘h - V should be exactly 1; rescale if it resolves to another constant.
    let step = compose(&v, &nf.h, ctx)?.sub(&v, ctx);
    if let Some(r0) = step.coefficient(&Monomial::one(), ctx) {
        if !r0.is_zero() && !r0.is_one() && step.dominance(&Series::one(), ctx)? != Ordering::Greater {
            v = v.scale(&r0.recip()?, ctx);
        }
    }
    Ok(v)
}

pub fn abel(f: &Series, ctx: &Context) -> Result<AbelResult> {
    let x = Series::x();
    if f.is_x() {
        return Err(Error::Precondition("x has no Abel function".into()));
    }
    if !f.is_positive_infinite(ctx)? {
        return Err(Error::NotPositiveInfinite(f.to_string()));
    }
    let v = if f.compare(&x, ctx)? == Ordering::Less {
        // V_f = -V_{f^{inv}}
        let g = comp_inverse(f, ctx)?;
        abel(&g, ctx)?.v.neg()
    } else {
        let nf = normalize(f, ctx)?;
        let vh = frame_abel(&nf, ctx)?;
        if nf.depth == 0 {
            vh
        } else {
            compose(&vh, &Series::monomial(Monomial::ell(nf.depth)), ctx)?
        }
    };
    let depth = if f.compare(&x, ctx)? == Ordering::Less {
        normalize(&comp_inverse(f, ctx)?, ctx)?.depth
    } else {
        normalize(f, ctx)?.depth
    };
    let residual = compose(&v, f, ctx)?.sub(&v, ctx).sub(&Series::one(), ctx);
    Ok(AbelResult {
        v,
        depth,
        residual,
        norm_constant: Coeff::zero(),
    })
}

/// `Σ_k r^k/k! (u∂)^k x`, the time-`r` flow of `u∂`.
fn lie_flow(u: &Series, r: &Coeff, ctx: &Context) -> Result<Series> {
    let mut acc = Series::x().add(&u.scale(r, ctx), ctx);
    let mut term = u.clone();
    let mut coef = r.clone();
    for k in 2..=ctx.max_fixpoint_iters {
        term = u.mul(&derive(&term, ctx)?, ctx)?;
        coef = coef.mul(r).div(&Coeff::from_int(k as i64))?;
        let mut t = term.scale(&coef, ctx);
        if let Some(c) = acc.cutoff() {
            t = t.with_cutoff(c, ctx);
        }
        if t.is_empty() {
            return Ok(acc.add(&t, ctx));
        }
        if k > ctx.max_terms {
            let b = t.dominant()?.mono.clone();
            return Ok(acc.with_cutoff(&b, ctx));
        }
        acc = acc.add(&t, ctx);
    }
    Err(Error::NonConvergent("flow series did not settle".into()))
}

/// `h^{[r]}` in the normalized frame.
fn frame_iterate(nf: &Normalized, r: &Coeff, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    if nf.c.is_positive() {
        if nf.delta.is_zero() {
            return Ok(x.add(&Series::constant(nf.c.mul(r)), ctx));
        }
        let v = frame_abel(nf, ctx)?;
        let vi = comp_inverse(&v, ctx)?;
        return compose(&vi, &v.add(&Series::constant(r.clone()), ctx), ctx);
    }
    let u = solve_iterlog(&nf.h, ctx)?;
    lie_flow(&u, r, ctx)
}

/// `f^{[r]} = V^{inv} ∘ (V + r)`.
pub fn iterate(f: &Series, r: &Coeff, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    if !f.is_positive_infinite(ctx)? {
        return Err(Error::NotPositiveInfinite(f.to_string()));
    }
    if r.is_zero() || f.is_x() {
        return Ok(x);
    }
    if f.compare(&x, ctx)? == Ordering::Less {
        return iterate(&comp_inverse(f, ctx)?, &r.neg(), ctx);
    }
    let nf = normalize(f, ctx)?;
    unconj_n(&frame_iterate(&nf, r, ctx)?, nf.depth, ctx)
}

fn agrees(a: &Series, b: &Series, ctx: &Context) -> bool {
    if ctx.is_float() {
        a.agrees_within(b, 1e-20, ctx)
    } else {
        a.agrees_with(b, ctx)
    }
}

/// The `r` with `h = f^{[r]}`, if `h` lies in the centralizer of `f`.
pub fn centralizer_param(f: &Series, h: &Series, ctx: &Context) -> Result<Option<Coeff>> {
    let x = Series::x();
    if f.is_x() {
        return Err(Error::Precondition("the centralizer of x is not parametrized".into()));
    }
    if !f.is_positive_infinite(ctx)? || !h.is_positive_infinite(ctx)? {
        return Err(Error::NotPositiveInfinite(format!("{f}, {h}")));
    }
    if h.is_x() {
        return Ok(Some(Coeff::zero()));
    }
    if f.compare(&x, ctx)? == Ordering::Less {
        let r = centralizer_param(&comp_inverse(f, ctx)?, h, ctx)?;
        return Ok(r.map(|r| r.neg()));
    }
    let nf = normalize(f, ctx)?;
    let g = conj_n(h, nf.depth, ctx)?;
    let ratio = g.sub(&x, ctx).div(&nf.h.sub(&x, ctx), ctx)?;
    let lead = match ratio.dominant() {
        Ok(t) if t.mono.is_one() => t.coeff.clone(),
        Ok(_) => return Ok(None),
        Err(e) => return Err(e),
    };
    let candidate = frame_iterate(&nf, &lead, ctx)?;
    Ok(agrees(&candidate, &g, ctx).then_some(lead))
}

/// `Δ = V_g ∘ F - V_g` in the frame of `g`, or just its sign when `F` is
/// too far from `x` for a Taylor expansion.
enum Displacement {
    Series(Series),
    Large(i32),
}

fn displacement(ng: &Normalized, big_f: &Series, ctx: &Context) -> Result<Displacement> {
    let x = Series::x();
    if ng.c.is_positive() {
        let v = frame_abel(ng, ctx)?;
        return Ok(Displacement::Series(compose(&v, big_f, ctx)?.sub(&v, ctx)));
    }
    let eta = big_f.sub(&x, ctx);
    if eta.is_zero() {
        return Ok(Displacement::Series(Series::zero()));
    }
    let d = abel_derivative(&ng.h, ctx)?;
    let gauge = log_derivative(&d, ctx)?.mul(&eta, ctx)?;
    if gauge.dominance(&Series::one(), ctx)? != Ordering::Less {
        return Ok(Displacement::Large(eta.sign()?));
    }
    Ok(Displacement::Series(taylor_difference(&d, &eta, ctx)?))
}

/// Sign of `f ∘ g - g ∘ f` for `f, g > x`, from the position of `f`
/// relative to the centralizer of `g`.
pub fn commutator_sign(f: &Series, g: &Series, ctx: &Context) -> Result<CommutatorSign> {
    require_above_x(f, ctx)?;
    require_above_x(g, ctx)?;
    let ng = normalize(g, ctx)?;
    let big_f = conj_n(f, ng.depth, ctx)?;
    let sign = match displacement(&ng, &big_f, ctx)? {
        Displacement::Large(s) => s,
        Displacement::Series(delta) => {
            if delta.dominance(&Series::one(), ctx)? == Ordering::Greater {
                delta.sign()?
            } else {
                // Δ = r + ρ: F is conjugate to x + r + ρ̃ with ρ̃ ≺ 1, and
                // ρ̃(x+1) - ρ̃ has the sign of ρ̃' = -sign ρ.
                let c = delta.constant_term(ctx);
                let rho = delta.sub(&Series::constant(c), ctx);
                if rho.is_zero() {
                    0
                } else {
                    -rho.sign()?
                }
            }
        }
    };
    Ok(match sign.cmp(&0) {
        Ordering::Greater => CommutatorSign::Positive,
        Ordering::Equal => CommutatorSign::Zero,
        Ordering::Less => CommutatorSign::Negative,
    })
}

/// An element `f₀` of the centralizer of `f` with `f₀ ≥ g₀`, where `g₀`
/// commutes with `g` and `f ≥ g > x`.
pub fn centralizer_dominate(f: &Series, g: &Series, g0: &Series, ctx: &Context) -> Result<Series> {
    require_above_x(g, ctx)?;
    if f.compare(g, ctx)? == Ordering::Less {
        return Err(Error::Precondition(format!("{f} < {g}")));
    }
    let mut r = centralizer_param(g, g0, ctx)?
        .ok_or_else(|| Error::Precondition(format!("{g0} does not commute with {g}")))?;
    for _ in 0..64 {
        let f0 = iterate(f, &r, ctx)?;
        if f0.compare(g0, ctx)? != Ordering::Less {
            return Ok(f0);
        }
        r = if r.is_negative() {
            Coeff::zero()
        } else if r < Coeff::one() {
            Coeff::one()
        } else {
            r.mul(&Coeff::from_int(2))
        };
    }
    Err(Error::NonConvergent(format!("no iterate of {f} reaches {g0}")))
}

/// `h = V_g^{inv} ∘ V_f`, so that `h ∘ f = g ∘ h`.
pub fn conjugator(f: &Series, g: &Series, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    let sf = f.compare(&x, ctx)?;
    let sg = g.compare(&x, ctx)?;
    if sf != sg {
        return Err(Error::NotConjugate(format!("{f} and {g} lie on different sides of x")));
    }
    if sf == Ordering::Equal {
        return Ok(x);
    }
    let vf = abel(f, ctx)?.v;
    let vg = abel(g, ctx)?.v;
    compose(&comp_inverse(&vg, ctx)?, &vf, ctx)
}
