//! The ordered coefficient field.
//!
//! Coefficients are either exact rationals or arbitrary precision binary
//! floats. Arithmetic between the two promotes to float; comparisons are
//! always exact because every float converts losslessly to a rational.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float_num::{BigFloat, Consts, Radix, RoundingMode, Sign};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

const RM: RoundingMode = RoundingMode::ToEven;

/// Default float precision in bits.
pub const DEFAULT_PRECISION: usize = 128;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("astro-float constant cache"));
}

fn with_consts<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|cc| f(&mut cc.borrow_mut()))
}

/// Which backend transcendental constants are evaluated in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScalarMode {
    /// Exact rationals; `log`/`exp` only succeed when the result is exact.
    Rational,
    /// Binary floats with the given mantissa precision in bits.
    Float { precision: usize },
}

impl ScalarMode {
    pub fn float() -> Self {
        ScalarMode::Float {
            precision: DEFAULT_PRECISION,
        }
    }
}

/// A scalar coefficient.
#[derive(Clone, Debug)]
pub enum Coeff {
    Rational(BigRational),
    Float(BigFloat),
}

fn int_to_float(n: &BigInt, p: usize) -> BigFloat {
    let words = n.magnitude().to_u64_digits();
    if words.is_empty() {
        return BigFloat::from_u64(0, p);
    }
    let sign = if n.sign() == IntSign::Minus {
        Sign::Neg
    } else {
        Sign::Pos
    };
    BigFloat::from_words(&words, sign, (64 * words.len()) as i32)
}

fn rational_to_float(r: &BigRational, p: usize) -> BigFloat {
    let n = int_to_float(r.numer(), p);
    if r.denom().is_one() {
        let mut n = n;
        if n.mantissa_max_bit_len().unwrap_or(0) < p {
            n.set_precision(p, RM).expect("precision");
        }
        return n;
    }
    let d = int_to_float(r.denom(), p);
    n.div(&d, p, RM)
}

fn float_to_rational(f: &BigFloat) -> BigRational {
    let Some((words, bits, sign, e, _)) = f.as_raw_parts() else {
        panic!("non-finite float coefficient");
    };
    if bits == 0 || words.iter().all(|w| *w == 0) {
        return BigRational::zero();
    }
    let mut digits = Vec::with_capacity(words.len() * 2);
    for w in words {
        digits.push(*w as u32);
        digits.push((*w >> 32) as u32);
    }
    let mag = BigInt::from_biguint(IntSign::Plus, BigUint::new(digits));
    let shift = e as i64 - 64 * words.len() as i64;
    let mut r = if shift >= 0 {
        BigRational::from_integer(mag << (shift as usize))
    } else {
        BigRational::new(mag, BigInt::one() << ((-shift) as usize))
    };
    if sign == Sign::Neg {
        r = -r;
    }
    r
}

fn float_prec(f: &BigFloat) -> usize {
    f.mantissa_max_bit_len().unwrap_or(DEFAULT_PRECISION)
}

impl Coeff {
    pub fn zero() -> Self {
        Coeff::Rational(BigRational::zero())
    }

    pub fn one() -> Self {
        Coeff::Rational(BigRational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Coeff::Rational(BigRational::from_integer(n.into()))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Coeff::Rational(BigRational::new(n.into(), d.into()))
    }

    pub fn from_f64(v: f64, precision: usize) -> Self {
        Coeff::Float(BigFloat::from_f64(v, precision))
    }

    /// Parses a decimal float at the given precision.
    pub fn parse_float(text: &str, precision: usize) -> Option<Self> {
        let f = with_consts(|cc| BigFloat::parse(text, Radix::Dec, precision, RM, cc));
        if f.is_nan() || f.is_inf() {
            None
        } else {
            Some(Coeff::Float(f))
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Coeff::Rational(r) => r.is_zero(),
            Coeff::Float(f) => f.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Coeff::Rational(r) => r.is_one(),
            Coeff::Float(_) => false,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Coeff::Rational(_))
    }

    /// -1, 0 or 1.
    pub fn signum(&self) -> i32 {
        match self {
            Coeff::Rational(r) => {
                if r.is_zero() {
                    0
                } else if r.is_positive() {
                    1
                } else {
                    -1
                }
            }
            Coeff::Float(f) => {
                if f.is_zero() {
                    0
                } else if f.is_positive() {
                    1
                } else {
                    -1
                }
            }
        }
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.signum() < 0
    }

    pub fn abs(&self) -> Coeff {
        if self.is_negative() {
            self.neg()
        } else {
            self.clone()
        }
    }

    /// Exact rational value (floats convert losslessly).
    pub fn to_rational(&self) -> BigRational {
        match self {
            Coeff::Rational(r) => r.clone(),
            Coeff::Float(f) => float_to_rational(f),
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Coeff::Rational(r) => Some(r),
            Coeff::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_rational().to_f64().unwrap_or(f64::NAN)
    }

    /// Integer value when the coefficient is an exact integer.
    pub fn as_integer(&self) -> Option<BigInt> {
        match self {
            Coeff::Rational(r) if r.is_integer() => Some(r.to_integer()),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        self.as_integer().and_then(|n| n.to_i64())
    }

    pub fn precision(&self) -> Option<usize> {
        match self {
            Coeff::Rational(_) => None,
            Coeff::Float(f) => Some(float_prec(f)),
        }
    }

    fn to_float(&self, p: usize) -> BigFloat {
        match self {
            Coeff::Rational(r) => rational_to_float(r, p),
            Coeff::Float(f) => f.clone(),
        }
    }

    fn joint_precision(&self, other: &Coeff) -> Option<usize> {
        match (self.precision(), other.precision()) {
            (None, None) => None,
            (Some(p), None) | (None, Some(p)) => Some(p),
            (Some(p), Some(q)) => Some(p.max(q)),
        }
    }

    pub fn add(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => Coeff::Rational(a + b),
            _ => {
                let p = self.joint_precision(other).unwrap();
                Coeff::Float(self.to_float(p).add(&other.to_float(p), p, RM))
            }
        }
    }

    pub fn sub(&self, other: &Coeff) -> Coeff {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Coeff) -> Coeff {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => Coeff::Rational(a * b),
            _ => {
                if self.is_zero() || other.is_zero() {
                    return Coeff::zero();
                }
                let p = self.joint_precision(other).unwrap();
                Coeff::Float(self.to_float(p).mul(&other.to_float(p), p, RM))
            }
        }
    }

    pub fn div(&self, other: &Coeff) -> Result<Coeff> {
        if other.is_zero() {
            return Err(Error::ZeroDivision);
        }
        Ok(match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => Coeff::Rational(a / b),
            _ => {
                let p = self.joint_precision(other).unwrap();
                Coeff::Float(self.to_float(p).div(&other.to_float(p), p, RM))
            }
        })
    }

    pub fn recip(&self) -> Result<Coeff> {
        Coeff::one().div(self)
    }

    pub fn neg(&self) -> Coeff {
        match self {
            Coeff::Rational(r) => Coeff::Rational(-r),
            Coeff::Float(f) => Coeff::Float(f.neg()),
        }
    }

    /// Integer power; negative exponents require a nonzero base.
    pub fn powi(&self, n: i64) -> Result<Coeff> {
        if n < 0 {
            return self.powi(-n)?.recip();
        }
        match self {
            Coeff::Rational(r) => {
                let e = i32::try_from(n)
                    .map_err(|_| Error::Precondition(format!("exponent {n} too large")))?;
                Ok(Coeff::Rational(num_traits::Pow::pow(r, e)))
            }
            Coeff::Float(f) => {
                let p = float_prec(f);
                Ok(Coeff::Float(f.powi(n as usize, p, RM)))
            }
        }
    }

    /// Natural logarithm.
    pub fn ln(&self, mode: ScalarMode) -> Result<Coeff> {
        if !self.is_positive() {
            return Err(Error::NonPositiveArgument(format!("log({self})")));
        }
        match self {
            Coeff::Rational(r) if r.is_one() => Ok(Coeff::zero()),
            Coeff::Rational(r) => match mode {
                ScalarMode::Rational => Err(Error::ExactnessUnavailable(format!("log({r})"))),
                ScalarMode::Float { precision } => {
                    let f = rational_to_float(r, precision);
                    Ok(Coeff::Float(with_consts(|cc| f.ln(precision, RM, cc))))
                }
            },
            Coeff::Float(f) => {
                let p = match mode {
                    ScalarMode::Float { precision } => precision.max(float_prec(f)),
                    ScalarMode::Rational => float_prec(f),
                };
                Ok(Coeff::Float(with_consts(|cc| f.ln(p, RM, cc))))
            }
        }
    }

    /// Exponential.
    pub fn exp(&self, mode: ScalarMode) -> Result<Coeff> {
        match self {
            Coeff::Rational(r) if r.is_zero() => Ok(Coeff::one()),
            Coeff::Rational(r) => match mode {
                ScalarMode::Rational => Err(Error::ExactnessUnavailable(format!("exp({r})"))),
                ScalarMode::Float { precision } => {
                    let f = rational_to_float(r, precision);
                    Ok(Coeff::Float(with_consts(|cc| f.exp(precision, RM, cc))))
                }
            },
            Coeff::Float(f) => {
                let p = match mode {
                    ScalarMode::Float { precision } => precision.max(float_prec(f)),
                    ScalarMode::Rational => float_prec(f),
                };
                Ok(Coeff::Float(with_consts(|cc| f.exp(p, RM, cc))))
            }
        }
    }

    /// Real power `self^r` for `self > 0` (any nonzero base when `r` is an
    /// integer). Exact whenever the result is rational.
    pub fn pow(&self, r: &Coeff, mode: ScalarMode) -> Result<Coeff> {
        if let Some(n) = r.as_i64() {
            if n.abs() <= 4096 {
                if n < 0 && self.is_zero() {
                    return Err(Error::ZeroDivision);
                }
                return self.powi(n);
            }
        }
        if !self.is_positive() {
            return Err(Error::NonPositiveArgument(format!("({self})^({r})")));
        }
        if self.is_one() {
            return Ok(Coeff::one());
        }
        if let (Coeff::Rational(base), Coeff::Rational(e)) = (self, r) {
            if let (Some(q), Some(p)) = (e.denom().to_u32(), e.numer().to_i64()) {
                if let (Some(a), Some(b)) = (exact_root(base.numer(), q), exact_root(base.denom(), q)) {
                    return Coeff::Rational(BigRational::new(a, b)).powi(p);
                }
            }
        }
        let l = self.ln(mode)?;
        r.mul(&l).exp(mode)
    }

    /// Replaces a float that is negligible relative to `reference` by an exact
    /// zero, and a float within tolerance of an integer by that integer.
    pub fn clean(self, tol: &Coeff, reference: &Coeff) -> Coeff {
        let Coeff::Float(_) = &self else {
            return self;
        };
        let v = self.to_rational();
        let tol = tol.to_rational();
        let mut scale = reference.to_rational().abs();
        let av = v.abs();
        if av > scale {
            scale = av.clone();
        }
        if scale < BigRational::one() {
            scale = BigRational::one();
        }
        if av <= &tol * &scale {
            return Coeff::zero();
        }
        let nearest = v.round();
        if (&v - &nearest).abs() <= tol * scale {
            return Coeff::Rational(nearest);
        }
        self
    }
}

fn exact_root(n: &BigInt, q: u32) -> Option<BigInt> {
    if q == 1 {
        return Some(n.clone());
    }
    if n.is_negative() {
        return None;
    }
    let r = n.nth_root(q);
    if num_traits::Pow::pow(&r, q) == *n {
        Some(r)
    } else {
        None
    }
}

impl PartialEq for Coeff {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Coeff {}

impl PartialOrd for Coeff {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Coeff {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Coeff::Rational(a), Coeff::Rational(b)) => a.cmp(b),
            (Coeff::Float(a), Coeff::Float(b)) => a.partial_cmp(b).expect("finite floats"),
            _ => self.to_rational().cmp(&other.to_rational()),
        }
    }
}

impl From<i64> for Coeff {
    fn from(n: i64) -> Self {
        Coeff::from_int(n)
    }
}

impl From<BigRational> for Coeff {
    fn from(r: BigRational) -> Self {
        Coeff::Rational(r)
    }
}

impl fmt::Display for Coeff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coeff::Rational(r) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Coeff::Float(v) => write!(f, "{}~{}", v, float_prec(v)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn float() -> ScalarMode {
        ScalarMode::float()
    }

    fn close(a: &Coeff, b: &Coeff, rel: f64) -> bool {
        let d = a.sub(b).abs().to_f64();
        d <= rel * b.abs().to_f64().max(1e-300)
    }

    #[test]
    fn log_of_one_is_exact_zero() {
        assert_eq!(Coeff::one().ln(ScalarMode::Rational).unwrap(), Coeff::zero());
    }

    #[test]
    fn rational_log_needs_float_mode() {
        let e = Coeff::from_int(2).ln(ScalarMode::Rational).unwrap_err();
        assert_eq!(e.code(), "ExactnessUnavailable");
        let e = Coeff::from_int(0).ln(float()).unwrap_err();
        assert_eq!(e.code(), "NonPositiveArgument");
        let e = Coeff::from_int(1).exp(ScalarMode::Rational).unwrap_err();
        assert_eq!(e.code(), "ExactnessUnavailable");
    }

    #[test]
    fn log_two_and_e() {
        let l = Coeff::from_int(2).ln(float()).unwrap();
        assert!((l.to_f64() - std::f64::consts::LN_2).abs() < 1e-15);
        let back = l.exp(float()).unwrap();
        assert!(close(&back, &Coeff::from_int(2), 1e-35));
        let e = Coeff::one().exp(float()).unwrap();
        assert!((e.to_f64() - std::f64::consts::E).abs() < 1e-15);
        assert!(close(&e.ln(float()).unwrap(), &Coeff::one(), 1e-35));
    }

    #[test]
    fn log_is_a_homomorphism() {
        let l4 = Coeff::from_int(4).ln(float()).unwrap();
        let l2 = Coeff::from_int(2).ln(float()).unwrap();
        assert!(close(&l4, &l2.add(&l2), 1e-35));
        let a = Coeff::ratio(3, 7);
        let b = Coeff::ratio(5, 2);
        let ea = a.exp(float()).unwrap();
        let eb = b.exp(float()).unwrap();
        assert!(close(&a.add(&b).exp(float()).unwrap(), &ea.mul(&eb), 1e-35));
    }

    #[test]
    fn exact_rational_powers() {
        let r = Coeff::ratio(4, 9).pow(&Coeff::ratio(1, 2), ScalarMode::Rational).unwrap();
        assert_eq!(r, Coeff::ratio(2, 3));
        let r = Coeff::ratio(8, 1).pow(&Coeff::ratio(-2, 3), ScalarMode::Rational).unwrap();
        assert_eq!(r, Coeff::ratio(1, 4));
        assert!(Coeff::from_int(2).pow(&Coeff::ratio(1, 2), ScalarMode::Rational).is_err());
        let s = Coeff::from_int(2).pow(&Coeff::ratio(1, 2), float()).unwrap();
        assert!(close(&s.mul(&s), &Coeff::from_int(2), 1e-35));
    }

    #[test]
    fn mixed_comparison_is_exact() {
        let third = Coeff::from_int(1).div(&Coeff::from_f64(3.0, 128)).unwrap();
        assert_ne!(third, Coeff::ratio(1, 3));
        assert!(third.to_rational() > BigRational::new(33.into(), 100.into()));
        assert_eq!(Coeff::from_f64(0.5, 128), Coeff::ratio(1, 2));
    }

    #[test]
    fn clean_snaps_cancellation_and_integers() {
        let tol = Coeff::Rational(BigRational::new(1.into(), BigInt::from(10).pow(30u32)));
        let s = Coeff::from_int(2).pow(&Coeff::ratio(1, 2), float()).unwrap();
        let two = s.mul(&s).clean(&tol, &Coeff::one());
        assert!(two.is_exact());
        assert_eq!(two, Coeff::from_int(2));
        let tiny = s.mul(&s).sub(&Coeff::from_int(2)).clean(&tol, &Coeff::from_int(2));
        assert!(tiny.is_zero());
        let third = Coeff::from_f64(0.25, 128).clean(&tol, &Coeff::one());
        assert!(!third.is_exact());
    }

    #[test]
    fn display_tags_backend() {
        assert_eq!(Coeff::ratio(2, 3).to_string(), "2/3");
        assert_eq!(Coeff::ratio(-4, 2).to_string(), "-2");
        assert!(Coeff::from_f64(0.5, 128).to_string().ends_with("~128"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn coeff() -> impl Strategy<Value = Coeff> {
            (-50i64..50, 1i64..20).prop_map(|(n, d)| Coeff::ratio(n, d))
        }

        fn positive() -> impl Strategy<Value = Coeff> {
            (1i64..200, 1i64..50).prop_map(|(n, d)| Coeff::ratio(n, d))
        }

        proptest! {
            #[test]
            fn order_is_compatible_with_field_operations(a in coeff(), b in coeff(), c in coeff()) {
                if a < b {
                    prop_assert!(a.add(&c) < b.add(&c));
                    if c.is_positive() {
                        prop_assert!(a.mul(&c) < b.mul(&c));
                    }
                }
                let p = a.mul(&a);
                prop_assert!(!p.is_negative());
            }

            #[test]
            fn log_of_product_is_sum_of_logs(a in positive(), b in positive()) {
                let m = float();
                let lhs = a.mul(&b).ln(m).unwrap();
                let rhs = a.ln(m).unwrap().add(&b.ln(m).unwrap());
                let scale = lhs.abs().to_f64().max(1.0);
                prop_assert!(lhs.sub(&rhs).abs().to_f64() <= 1e-12 * scale);
            }

            #[test]
            fn log_is_bounded_by_x_minus_one(c in positive()) {
                let l = c.ln(float()).unwrap();
                prop_assert!(l <= c.sub(&Coeff::one()));
            }

            #[test]
            fn log_is_strictly_increasing(a in positive(), b in positive()) {
                if a < b {
                    prop_assert!(a.ln(float()).unwrap() < b.ln(float()).unwrap());
                }
            }
        }
    }
}
