//! Compositional inversion of `x + ε` by peeling steepness classes,
//! flattest first, plus a naive contraction oracle.

use std::cmp::Ordering;

use crate::compose::{compose, Composer};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::{Flatness, Monomial};
use crate::operator::neumann_invert;
use crate::series::{Series, Term};
use crate::translog::{exp_s, flat_cmp, log_s};

/// The terms of `ε` grouped by steepness class of their monomials.
///
/// The first block (witness `x`) gathers every monomial no steeper than `x`,
/// constants included. Steeper blocks follow in increasing steepness, keyed
/// by the dominant monomial of `log 𝔪`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteepnessDecomposition {
    pub blocks: Vec<(Monomial, Series)>,
    pub cutoff: Option<Monomial>,
}

impl SteepnessDecomposition {
    /// Sum of the blocks, with the cutoff.
    pub fn total(&self, ctx: &Context) -> Series {
        let mut acc = match &self.cutoff {
            Some(c) => Series::big_o(c.clone()),
            None => Series::zero(),
        };
        for (_, b) in &self.blocks {
            acc = acc.add(b, ctx);
        }
        acc
    }
}

fn key_ctx(ctx: &Context) -> Context {
    let mut c = ctx.clone();
    c.max_log_depth += 2;
    c
}

/// Steepness key of a monomial's class: `ℓ₁` for the x-class, else `𝔡(log 𝔪)`.
fn class_key(m: &Monomial, ctx: &Context) -> Result<Monomial> {
    let kc = key_ctx(ctx);
    match m.steepness_key(&kc)? {
        Some(k) if k.cmp(&Monomial::ell(1), &kc) == Ordering::Greater => Ok(k),
        _ => Ok(Monomial::ell(1)),
    }
}

/// A monomial of the class with key `k`: `x` for `ℓ₁`, else `e^k`.
fn witness(k: &Monomial, ctx: &Context) -> Result<Monomial> {
    if k.as_ell() == Some(1) {
        Ok(Monomial::x())
    } else {
        Monomial::exp_of(&Series::monomial(k.clone()), &key_ctx(ctx))
    }
}

pub fn steep_decompose(eps: &Series, ctx: &Context) -> Result<SteepnessDecomposition> {
    if !eps.is_empty() && eps.dominance(&Series::x(), ctx)? != Ordering::Less {
        return Err(Error::Precondition(format!("{eps} is not ≺ x")));
    }
    let kc = key_ctx(ctx);
    let mut groups: Vec<(Monomial, Vec<Term>)> = Vec::new();
    for t in eps.terms() {
        let k = class_key(&t.mono, ctx)?;
        match groups.iter_mut().find(|(g, _)| g.eq_in(&k, &kc)) {
            Some((_, ts)) => ts.push(t.clone()),
            None => groups.push((k, vec![t.clone()])),
        }
    }
    groups.sort_by(|a, b| a.0.cmp(&b.0, &kc));
    let mut blocks = Vec::with_capacity(groups.len());
    for (k, ts) in groups {
        blocks.push((witness(&k, ctx)?, Series::from_terms(ts, None, ctx)));
    }
    Ok(SteepnessDecomposition {
        blocks,
        cutoff: eps.cutoff().cloned(),
    })
}

/// `(x + ε)^{inv} = Σ_i (-1)^i φ^i (x)` with `φ = (· ∘ (x+ε)) - Id`.
pub fn invert_block(f: &Series, ctx: &Context) -> Result<Series> {
    let eps = f.sub(&Series::x(), ctx);
    if eps.is_zero() {
        return Ok(Series::x());
    }
    if eps.dominance(&Series::x(), ctx)? != Ordering::Less {
        return Err(Error::NotTaylorConfigured(format!("{eps} is not ≺ x")));
    }
    let comp = Composer::new(f, ctx)?;
    let phi = |m: &Monomial, c: &Context| -> Result<Series> {
        Ok(comp.monomial(m)?.sub(&Series::monomial(m.clone()), c))
    };
    neumann_invert(&phi, &Series::x(), ctx).map_err(|e| match e {
        Error::NotContracting(m) => Error::NotTaylorConfigured(m),
        e => e,
    })
}

/// `f^{inv}` for `f = x + ε` with `ε ≺ x`, by peeling the flattest class of
/// `h - x` until nothing is retained.
fn invert_near_identity(f: &Series, ctx: &Context) -> Result<Series> {
    let mut g = Series::x();
    let mut h = f.clone();
    let kc = key_ctx(ctx);
    let mut last: Option<Monomial> = None;
    for _ in 0..ctx.max_fixpoint_iters {
        let r = h.sub(&Series::x(), ctx);
        if r.is_empty() {
            return Ok(match r.cutoff() {
                None => g,
                Some(c) => {
                    // g∘f = x + O(c) gives f^{inv} = g + O(c∘g)
                    let img = Composer::new(&g, ctx)?.monomial(c)?;
                    let b = img.terms().first().map(|t| t.mono.clone()).or(img.cutoff().cloned());
                    g.with_cutoff(&b.unwrap_or_else(|| c.clone()), ctx)
                }
            });
        }
        let dec = steep_decompose(&r, ctx)?;
        let (w, iota) = dec.blocks.into_iter().next().expect("nonempty residual");
        let key = class_key(&iota.terms()[0].mono, ctx)?;
        if let Some(prev) = &last {
            if key.cmp(prev, &kc) != Ordering::Greater {
                return Err(Error::NonConvergent(format!(
                    "class {w} reappeared while inverting {f}"
                )));
            }
        }
        let k = invert_block(&Series::x().add(&iota, ctx), ctx)?;
        let kc_ = Composer::new(&g, ctx)?;
        g = kc_.series(&k)?;
        h = compose(&k, &h, ctx)?;
        last = Some(key);
    }
    Err(Error::NonConvergent(format!("too many blocks while inverting {f}")))
}

/// Compositional inverse of a positive infinite `f`.
///
/// Inputs not of the form `x + o(x)` are reduced by scaling or by conjugating
/// with `log` and `exp`.
pub fn comp_inverse(f: &Series, ctx: &Context) -> Result<Series> {
    inverse_rec(f, ctx, 2 * (ctx.max_log_depth + ctx.max_exp_height) + 2)
}

fn inverse_rec(f: &Series, ctx: &Context, fuel: usize) -> Result<Series> {
    if !f.is_positive_infinite(ctx)? {
        return Err(Error::NotPositiveInfinite(f.to_string()));
    }
    if fuel == 0 {
        return Err(Error::DepthBudgetExceeded(format!("no reduction of {f} to x + o(x)")));
    }
    let lead = f.dominant()?.clone();
    if lead.mono.is_x() {
        if lead.coeff.is_one() {
            return invert_near_identity(f, ctx);
        }
        // f = c·(f/c), so f^{inv} = (f/c)^{inv} ∘ (x/c)
        let r = lead.coeff.recip()?;
        let g = inverse_rec(&f.scale(&r, ctx), ctx, fuel - 1)?;
        return compose(&g, &Series::x().scale(&r, ctx), ctx);
    }
    let x = Series::x();
    match flat_cmp(f, &x, ctx)? {
        Flatness::StrictlyFlatter => {
            // f = (f∘E)∘L
            let fe = compose(f, &exp_s(&x, ctx)?, ctx)?;
            exp_s(&inverse_rec(&fe, ctx, fuel - 1)?, ctx)
        }
        Flatness::SameClass => conj_log_exp(f, ctx, fuel),
        Flatness::StrictlySteeper => {
            let e = exp_s(&x, ctx)?;
            if flat_cmp(f, &e, ctx)? == Flatness::StrictlyFlatter {
                conj_log_exp(f, ctx, fuel)
            } else {
                // f = E∘(L∘f)
                let lf = log_s(f, ctx)?;
                compose(&inverse_rec(&lf, ctx, fuel - 1)?, &log_s(&x, ctx)?, ctx)
            }
        }
    }
}

/// `f^{inv} = E ∘ (L∘f∘E)^{inv} ∘ L`.
fn conj_log_exp(f: &Series, ctx: &Context, fuel: usize) -> Result<Series> {
    let x = Series::x();
    let fe = compose(f, &exp_s(&x, ctx)?, ctx)?;
    let h = log_s(&fe, ctx)?;
    let hi = inverse_rec(&h, ctx, fuel - 1)?;
    compose(&exp_s(&hi, ctx)?, &log_s(&x, ctx)?, ctx)
}

/// Fixed point of `g ↦ x - ε∘g` from `g = x`, for `f = x + ε`, `ε ≺ x`.
pub fn oracle_inverse(f: &Series, ctx: &Context) -> Result<Series> {
    let x = Series::x();
    let eps = f.sub(&x, ctx);
    if !eps.is_zero() && eps.dominance(&x, ctx)? != Ordering::Less {
        return Err(Error::Precondition(format!("{eps} is not ≺ x")));
    }
    let mut g = x.clone();
    for _ in 0..ctx.max_fixpoint_iters {
        let next = x.sub(&compose(&eps, &g, ctx)?, ctx);
        if next == g {
            return Ok(g);
        }
        g = next;
    }
    Err(Error::NonConvergent(format!(
        "contraction for the inverse of {f} did not stabilize"
    )))
}
