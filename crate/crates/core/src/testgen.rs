//! Proptest strategies shared by the unit tests.

use std::cmp::Ordering;

use proptest::prelude::*;

use crate::context::Context;
use crate::monomial::Monomial;
use crate::scalar::Coeff;
use crate::series::{Series, Term};

pub fn xp(a: i64) -> Monomial {
    Monomial::log_power(0, Coeff::from_int(a))
}

pub fn e_x(k: i64) -> Monomial {
    Monomial::exp_of(&Series::term(Coeff::from_int(k), Monomial::x()), &Context::default()).unwrap()
}

pub fn mono() -> impl Strategy<Value = Monomial> {
    prop_oneof![
        (-3i64..4, 1i64..3).prop_map(|(n, d)| Monomial::log_power(0, Coeff::ratio(n, d))),
        (-2i64..3, -2i64..3).prop_map(|(a, b)| Monomial::from_logs(vec![Coeff::from_int(a), Coeff::from_int(b)])),
        (-1i64..2, -1i64..2).prop_map(|(s, a)| {
            let c = Context::default();
            e_x(if s == 0 { 1 } else { s }).mul(&xp(a), &c).unwrap()
        }),
    ]
}

pub fn series() -> impl Strategy<Value = Series> {
    prop::collection::vec(((-4i64..5).prop_filter("nonzero", |c| *c != 0), mono()), 0..4).prop_map(|ts| {
        let c = Context::default();
        Series::from_terms(ts.into_iter().map(|(n, m)| Term::new(Coeff::from_int(n), m)).collect(), None, &c)
    })
}

fn lead() -> impl Strategy<Value = Monomial> {
    prop_oneof![
        (1i64..4, 1i64..3).prop_map(|(n, d)| Monomial::log_power(0, Coeff::ratio(n, d))),
        Just(Monomial::ell(1)),
        Just(Monomial::from_logs(vec![Coeff::one(), Coeff::one()])),
        Just(e_x(1)),
    ]
}

fn below(tail: &Series, lead: &Monomial) -> Series {
    let c = Context::default();
    Series::from_terms(
        tail.terms().iter().filter(|t| t.mono.cmp(lead, &c) == Ordering::Less).cloned().collect(),
        None,
        &c,
    )
}

/// Positive infinite series `k·𝔪 + smaller`.
pub fn positive_infinite() -> impl Strategy<Value = Series> {
    (series(), lead(), 1i64..4).prop_map(|(tail, lead, k)| {
        let c = Context::default();
        Series::term(Coeff::from_int(k), lead.clone()).add(&below(&tail, &lead), &c)
    })
}

/// Positive infinite series with leading coefficient 1, so that iterated
/// logarithms stay rational.
pub fn monic_infinite() -> impl Strategy<Value = Series> {
    (series(), lead()).prop_map(|(tail, lead)| {
        let c = Context::default();
        Series::monomial(lead.clone()).add(&below(&tail, &lead), &c)
    })
}

/// `x + ε` with `ε ≺ x` built from flat, constant and steep pieces.
pub fn near_identity() -> impl Strategy<Value = Series> {
    let piece = prop_oneof![
        (1i64..3).prop_map(|d| Monomial::log_power(0, Coeff::ratio(1, d + 1))),
        Just(Monomial::ell(1)),
        Just(Monomial::one()),
        (1i64..3).prop_map(xp_neg),
        Just(e_x(-1)),
    ];
    prop::collection::vec(((-3i64..4).prop_filter("nonzero", |c| *c != 0), 1i64..3, piece), 1..3).prop_map(|ts| {
        let c = Context::default();
        let eps = Series::from_terms(ts.into_iter().map(|(n, d, m)| Term::new(Coeff::ratio(n, d), m)).collect(), None, &c);
        Series::x().add(&eps, &c)
    })
}

fn xp_neg(k: i64) -> Monomial {
    xp(-k)
}

/// Unwraps inside a proptest body. Inputs whose exact evaluation would need
/// a transcendental constant, or which run out of precision or depth
/// budget, are rejected; other errors fail the case.
pub trait Exact<T> {
    fn ex(self) -> Result<T, TestCaseError>;
}

impl<T> Exact<T> for crate::error::Result<T> {
    fn ex(self) -> Result<T, TestCaseError> {
        match self {
            Ok(v) => Ok(v),
            Err(
                e @ (crate::error::Error::ExactnessUnavailable(_)
                | crate::error::Error::PrecisionExhausted(_)
                | crate::error::Error::DepthBudgetExceeded(_)),
            ) => Err(TestCaseError::reject(e.to_string())),
            Err(e) => Err(TestCaseError::fail(format!("{e}"))),
        }
    }
}

/// Increasing maps `> x` of exponentiality 0: translations, dilations,
/// powers and `x` plus a flat or steep infinitesimal or flat infinite term.
pub fn above_x() -> impl Strategy<Value = Series> {
    let c = Context::default();
    let x = Series::x();
    let q = (1i64..6, 1i64..4).prop_map(|(n, d)| Coeff::ratio(n, d));
    prop_oneof![
        q.clone().prop_map({
            let x = x.clone();
            move |a| x.add(&Series::constant(a), &Context::default())
        }),
        (2i64..4, 0i64..3).prop_map({
            let x = x.clone();
            move |(a, b)| x.scale(&Coeff::from_int(a), &c).add(&Series::constant(Coeff::from_int(b)), &c)
        }),
        (3i64..7).prop_map(|n| Series::monomial(Monomial::log_power(0, Coeff::ratio(n, 2)))),
        (q, prop_oneof![Just(xp(-1)), Just(Monomial::ell(1)), Just(Monomial::log_power(0, Coeff::ratio(1, 2))), Just(e_x(-1))])
            .prop_map(move |(a, m)| x.add(&Series::term(a, m), &Context::default())),
    ]
}
