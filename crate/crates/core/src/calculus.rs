//! The derivation `∂` with `∂x = 1` and its strongly linear integral.

use std::cmp::Ordering;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::monomial::{exact_ctx, Monomial};
use crate::operator::{apply, neumann_invert};
use crate::scalar::Coeff;
use crate::series::{Series, Term};

/// `1 / (ℓ_0 ⋯ ℓ_k)`.
fn log_chain_inv(k: usize) -> Monomial {
    Monomial::from_logs(vec![Coeff::from_int(-1); k + 1])
}

/// `𝔪† = Σ a_k / (ℓ_0 ⋯ ℓ_k) + P'`, exact.
pub fn monomial_log_derivative(m: &Monomial, ctx: &Context) -> Result<Series> {
    let ex = exact_ctx(ctx);
    let mut terms = Vec::new();
    for (k, a) in m.log_powers().iter().enumerate() {
        if !a.is_zero() {
            terms.push(Term::new(a.clone(), log_chain_inv(k)));
        }
    }
    let mut s = Series::from_terms(terms, None, &ex);
    if let Some(p) = m.exp_part() {
        s = s.add(&derive(p, &ex)?, &ex);
    }
    Ok(s)
}

/// `∂𝔪 = 𝔪 · 𝔪†`, exact.
pub fn derive_monomial(m: &Monomial, ctx: &Context) -> Result<Series> {
    monomial_log_derivative(m, ctx)?.mul_monomial(m, ctx)
}

/// Term-wise derivative. A cutoff `c` becomes `𝔡(∂c)`, or `1/(ℓ_0⋯ℓ_D)`
/// when `c = 1`.
pub fn derive(s: &Series, ctx: &Context) -> Result<Series> {
    let mut acc = match s.cutoff() {
        None => Series::zero(),
        Some(c) if c.is_one() => Series::big_o(log_chain_inv(ctx.max_log_depth)),
        Some(c) => {
            let d = derive_monomial(c, ctx)?;
            Series::big_o(d.dominant()?.mono.clone())
        }
    };
    for t in s.terms() {
        if t.mono.is_one() {
            continue;
        }
        acc = acc.add(&derive_monomial(&t.mono, ctx)?.scale(&t.coeff, ctx), ctx);
    }
    Ok(acc)
}

/// `t† = ∂t / t`.
pub fn log_derivative(t: &Series, ctx: &Context) -> Result<Series> {
    if let Some(term) = t.single_term() {
        return monomial_log_derivative(&term.mono, ctx);
    }
    derive(t, ctx)?.div(t, ctx)
}

/// The leading antiderivative of `𝔪`: a term `r𝔫` with `∂(r𝔫) = 𝔪 + o(𝔪)`.
///
/// Seeds `𝔪·ℓ_0⋯ℓ_j` (`j = -1..=D`) are refined by `𝔫 ← 𝔪 / 𝔡(𝔫†)`; the first
/// candidate whose derivative has dominant monomial `𝔪` is taken.
pub fn antiderivative_monomial(m: &Monomial, ctx: &Context) -> Result<Term> {
    for j in 0..=ctx.max_log_depth + 1 {
        let mut n = if j == 0 {
            m.clone()
        } else {
            match m.div(&log_chain_inv(j - 1), ctx) {
                Ok(n) => n,
                Err(_) => continue,
            }
        };
        for _ in 0..4 {
            if n.is_one() {
                break;
            }
            let step = (|| {
                let d = derive_monomial(&n, ctx)?;
                let lead = d.dominant()?.clone();
                if lead.mono.cmp(m, ctx) == Ordering::Equal {
                    return Ok((Some(Term::new(lead.coeff.recip()?, n.clone())), None));
                }
                let dagger = monomial_log_derivative(&n, ctx)?;
                let next = m.div(&dagger.dominant()?.mono, ctx)?;
                Ok::<_, Error>((None, Some(next)))
            })();
            match step {
                Ok((Some(t), _)) => return Ok(t),
                Ok((None, Some(next))) => {
                    if next == n {
                        break;
                    }
                    n = next;
                }
                Ok((None, None)) | Err(_) => break,
            }
        }
    }
    Err(Error::DepthBudgetExceeded(format!(
        "no antiderivative of {m} within log depth {}",
        ctx.max_log_depth
    )))
}

/// `∫ = 𝓘 ∘ (∂∘𝓘)^{-1}`, the integral without constant term.
pub fn integrate(s: &Series, ctx: &Context) -> Result<Series> {
    // ψ = ∂∘𝓘 - Id is contracting.
    let psi = |m: &Monomial, c: &Context| -> Result<Series> {
        let t = antiderivative_monomial(m, c)?;
        let d = derive_monomial(&t.mono, c)?.scale(&t.coeff, c);
        Ok(d.sub(&Series::monomial(m.clone()), &exact_ctx(c)))
    };
    let pre = neumann_invert(&psi, s, ctx)?;
    let lift = |m: &Monomial, c: &Context| -> Result<Series> {
        let t = antiderivative_monomial(m, c)?;
        Ok(Series::term(t.coeff, t.mono))
    };
    let body = Series::from_terms(pre.terms().to_vec(), None, ctx);
    let mut out = apply(&lift, &body, ctx)?;
    if let Some(c) = pre.cutoff() {
        let b = antiderivative_monomial(c, ctx)?;
        out = out.with_cutoff(&b.mono, ctx);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translog::{exp_s, log_s};

    fn ctx() -> Context {
        Context::default()
    }

    fn xp(a: i64) -> Monomial {
        Monomial::log_power(0, Coeff::from_int(a))
    }

    fn ex(p: &Series) -> Monomial {
        Monomial::exp_of(p, &ctx()).unwrap()
    }

    #[test]
    fn derivatives() {
        let c = ctx();
        assert_eq!(derive(&Series::x(), &c).unwrap(), Series::one());
        let l1 = Series::monomial(Monomial::ell(1));
        assert_eq!(derive(&l1, &c).unwrap(), Series::monomial(xp(-1)));
        let x2 = Series::monomial(xp(2));
        let e = ex(&x2);
        let expect = Series::term(Coeff::from_int(2), e.mul(&xp(1), &c).unwrap());
        assert_eq!(derive(&Series::monomial(e), &c).unwrap(), expect);
        assert!(derive(&Series::constant(Coeff::from_int(7)), &c).unwrap().is_zero());
    }

    #[test]
    fn log_derivatives() {
        let c = ctx();
        assert_eq!(log_derivative(&Series::x(), &c).unwrap(), Series::monomial(xp(-1)));
        let e = Series::monomial(ex(&Series::x()));
        assert_eq!(log_derivative(&e, &c).unwrap(), Series::one());
        let xe = e.mul(&Series::x(), &c).unwrap();
        let expect = Series::one().add(&Series::monomial(xp(-1)), &c);
        assert_eq!(log_derivative(&xe, &c).unwrap(), expect);
    }

    #[test]
    fn integrals() {
        let c = ctx();
        assert_eq!(integrate(&Series::one(), &c).unwrap(), Series::x());
        let l1 = Series::monomial(Monomial::ell(1));
        assert_eq!(integrate(&Series::monomial(xp(-1)), &c).unwrap(), l1);
        let xl = Series::monomial(Monomial::from_logs(vec![Coeff::one(), Coeff::one()]));
        assert_eq!(integrate(&l1, &c).unwrap(), xl.sub(&Series::x(), &c));
        // ∫ e^{√ℓ₁} / x = 2 ℓ₁^{1/2} e^{√ℓ₁} - 2 e^{√ℓ₁}
        let root = Series::monomial(Monomial::log_power(1, Coeff::ratio(1, 2)));
        let e = ex(&root);
        let m = e.mul(&xp(-1), &c).unwrap();
        let i = integrate(&Series::monomial(m.clone()), &c).unwrap();
        assert_eq!(derive(&i, &c).unwrap(), Series::monomial(m));
        // ∫ e^{x²} is an infinite asymptotic series
        let g = Series::monomial(ex(&Series::monomial(xp(2))));
        let i = integrate(&g, &c).unwrap();
        assert!(i.cutoff().is_some());
        assert!(derive(&i, &c).unwrap().sub(&g, &c).is_empty());
    }

    #[test]
    fn integral_needs_log_depth() {
        let c = ctx().with_log_depth(2);
        let m = log_chain_inv(2);
        let e = integrate(&Series::monomial(m), &c).unwrap_err();
        assert_eq!(e.code(), "DepthBudgetExceeded");
    }

    mod props {
        use crate::testgen::*;
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(100))]

            #[test]
            fn leibniz(a in series(), b in series()) {
                let c = Context::default().with_max_terms(100);
                let lhs = derive(&a.mul(&b, &c).unwrap(), &c).unwrap();
                let rhs = derive(&a, &c).unwrap().mul(&b, &c).unwrap()
                    .add(&a.mul(&derive(&b, &c).unwrap(), &c).unwrap(), &c);
                prop_assert_eq!(lhs, rhs);
            }

            #[test]
            fn derivative_of_log(a in positive_infinite()) {
                let c = Context::float();
                let lhs = derive(&log_s(&a, &c).unwrap(), &c).unwrap();
                let rhs = derive(&a, &c).unwrap().div(&a, &c).unwrap();
                prop_assert!(lhs.sub(&rhs, &c).is_empty());
                prop_assert!(log_derivative(&a, &c).unwrap().sub(&rhs, &c).is_empty());
            }

            #[test]
            fn h_field_positivity(a in positive_infinite()) {
                let c = Context::default();
                prop_assert_eq!(derive(&a, &c).unwrap().sign().unwrap(), 1);
            }

            #[test]
            fn derivative_preserves_dominance(a in mono(), b in mono()) {
                let c = Context::default();
                prop_assume!(!a.is_one() && !b.is_one());
                if a.cmp(&b, &c) == Ordering::Less {
                    let da = derive_monomial(&a, &c).unwrap();
                    let db = derive_monomial(&b, &c).unwrap();
                    prop_assert_eq!(da.dominance(&db, &c).unwrap(), Ordering::Less);
                }
            }

            #[test]
            fn derivative_of_steep_monomial_is_flat(a in mono(), k in 1i64..3) {
                let c = Context::default();
                let steep = Monomial::exp_of(&Series::term(Coeff::from_int(k), Monomial::x()), &c).unwrap();
                let m = a.mul(&steep, &c).unwrap();
                prop_assume!(m.exp_part().is_some());
                let d = derive_monomial(&m, &c).unwrap();
                let key = m.steepness_key(&c).unwrap();
                for t in d.terms() {
                    prop_assert_eq!(t.mono.steepness_key(&c).unwrap(), key.clone());
                }
            }

            #[test]
            fn integral_inverts_derivative(a in series()) {
                let c = Context::default();
                let i = integrate(&a, &c).unwrap();
                prop_assert!(derive(&i, &c).unwrap().sub(&a, &c).is_empty());
                prop_assert_eq!(i.constant_term(&c), Coeff::zero());
                let d = derive(&a, &c).unwrap();
                let back = integrate(&d, &c).unwrap();
                let expect = a.sub(&Series::constant(a.constant_term(&c)), &c);
                prop_assert!(back.sub(&expect, &c).is_empty());
            }

            #[test]
            fn exp_derivative(a in series()) {
                let c = Context::default();
                let a = a.large_part(&c);
                prop_assume!(!a.is_zero());
                let e = exp_s(&a, &c).unwrap();
                let lhs = derive(&e, &c).unwrap();
                let rhs = derive(&a, &c).unwrap().mul(&e, &c).unwrap();
                prop_assert!(lhs.sub(&rhs, &c).is_empty());
            }
        }
    }
}
