//! Logarithm, exponential and real powers of series.

use std::cmp::Ordering;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::{Flatness, Monomial};
use crate::scalar::Coeff;
use crate::series::{power_series, Series};

fn positive_dominant(s: &Series, what: &str) -> Result<(Coeff, Monomial)> {
    let t = match s.dominant() {
        Ok(t) => t,
        Err(Error::ZeroDivision) => return Err(Error::NonPositiveArgument(format!("{what}(0)"))),
        Err(e) => return Err(e),
    };
    if !t.coeff.is_positive() {
        return Err(Error::NonPositiveArgument(format!("{what}({s})")));
    }
    Ok((t.coeff.clone(), t.mono.clone()))
}

/// `log s = log 𝔡 + log c + Σ (-1)^{k+1} ε^k / k` for `s = c𝔡(1 + ε)`.
pub fn log_s(s: &Series, ctx: &Context) -> Result<Series> {
    let (c, d) = positive_dominant(s, "log")?;
    let large = d.log(ctx)?;
    let k = c.ln(ctx.scalar_mode)?;
    let eps = s.relative_remainder(ctx)?;
    let tail = power_series(
        &eps,
        |k| {
            Ok(match k {
                0 => Coeff::zero(),
                _ if k % 2 == 1 => Coeff::ratio(1, k as i64),
                _ => Coeff::ratio(-1, k as i64),
            })
        },
        ctx,
    )?;
    Ok(large.add(&Series::constant(k), ctx).add(&tail, ctx))
}

/// `exp s = e^L · e^c · Σ ε^k / k!` for `s = L + c + ε`.
pub fn exp_s(s: &Series, ctx: &Context) -> Result<Series> {
    if s.is_zero() {
        return Ok(Series::one());
    }
    let (large, c, eps) = s.split(ctx)?;
    let m = Monomial::exp_of(&large, ctx)?;
    let k = c.exp(ctx.scalar_mode)?;
    let mut fact = Coeff::one();
    let tail = power_series(
        &eps,
        |k| {
            if k > 0 {
                fact = fact.div(&Coeff::from_int(k as i64))?;
            }
            Ok(fact.clone())
        },
        ctx,
    )?;
    tail.mul_term(&k, &m, ctx)
}

/// `s^r` for `s > 0`; integer powers also for negative `s`.
pub fn pow_s(s: &Series, r: &Coeff, ctx: &Context) -> Result<Series> {
    if r.is_zero() {
        return Ok(Series::one());
    }
    if let Some(n) = r.as_i64() {
        if n.abs() <= 64 {
            return s.powi(n, ctx);
        }
    }
    let (c, d) = positive_dominant(s, "pow")?;
    // τ^r (1 + ε)^r with the binomial series
    let lead_c = c.pow(r, ctx.scalar_mode)?;
    let lead_m = d.pow(r, ctx)?;
    let eps = s.relative_remainder(ctx)?;
    let mut binom = Coeff::one();
    let tail = power_series(
        &eps,
        |k| {
            if k > 0 {
                let num = r.sub(&Coeff::from_int(k as i64 - 1));
                binom = binom.mul(&num).div(&Coeff::from_int(k as i64))?;
            }
            Ok(binom.clone())
        },
        ctx,
    )?;
    tail.mul_term(&lead_c, &lead_m, ctx)
}

/// Context allowing one extra log level, for steepness keys.
fn key_ctx(ctx: &Context) -> Context {
    let mut c = ctx.clone();
    c.max_log_depth += 2;
    c
}

/// Dominant monomial of `log|s|`, or `None` when `log|s| = 0`.
pub fn steepness_key(s: &Series, ctx: &Context) -> Result<Option<Monomial>> {
    let t = s.dominant().map_err(|e| match e {
        Error::ZeroDivision => Error::Precondition("steepness of 0".into()),
        e => e,
    })?;
    if !t.mono.is_one() {
        return t.mono.steepness_key(&key_ctx(ctx));
    }
    if t.coeff.abs() != Coeff::one() {
        return Ok(Some(Monomial::one()));
    }
    let eps = s.relative_remainder(ctx)?;
    if eps.is_zero() {
        return Ok(None);
    }
    Ok(Some(eps.dominant()?.mono.clone()))
}

/// Steepness comparison of `log|s|` against `log|t|` under dominance.
pub fn flat_cmp(s: &Series, t: &Series, ctx: &Context) -> Result<Flatness> {
    let a = steepness_key(s, ctx)?;
    let b = steepness_key(t, ctx)?;
    Ok(match (a, b) {
        (None, None) => Flatness::SameClass,
        (None, Some(_)) => Flatness::StrictlyFlatter,
        (Some(_), None) => Flatness::StrictlySteeper,
        (Some(a), Some(b)) => match a.cmp(&b, ctx) {
            Ordering::Less => Flatness::StrictlyFlatter,
            Ordering::Equal => Flatness::SameClass,
            Ordering::Greater => Flatness::StrictlySteeper,
        },
    })
}
