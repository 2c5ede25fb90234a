//! Canonical text form.
//!
//! Monomials print as `x^a*log(x)^b*log^2(x)^c*exp(P)`, series as their terms
//! in decreasing order joined by ` + ` / ` - `, followed by `+ O(m)` when a
//! cutoff is present. Integer exponents print bare (`x^-1`), other
//! exponents in parentheses (`x^(1/2)`).

use std::fmt;

use crate::monomial::Monomial;
use crate::scalar::Coeff;
use crate::series::Series;

fn write_power(f: &mut fmt::Formatter<'_>, base: &str, a: &Coeff) -> fmt::Result {
    if a.is_one() {
        return f.write_str(base);
    }
    match a.as_integer() {
        Some(n) => write!(f, "{base}^{n}"),
        None => write!(f, "{base}^({a})"),
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        let mut first = true;
        for (k, a) in self.log_powers().iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            let base = match k {
                0 => "x".to_string(),
                1 => "log(x)".to_string(),
                _ => format!("log^{k}(x)"),
            };
            write_power(f, &base, a)?;
        }
        if let Some(p) = self.exp_part() {
            if !first {
                f.write_str("*")?;
            }
            write!(f, "exp({p})")?;
        }
        Ok(())
    }
}

fn write_term(f: &mut fmt::Formatter<'_>, c: &Coeff, m: &Monomial) -> fmt::Result {
    if m.is_one() {
        return write!(f, "{c}");
    }
    if c.is_one() {
        write!(f, "{m}")
    } else {
        write!(f, "{c}*{m}")
    }
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return match self.cutoff() {
                Some(c) => write!(f, "O({c})"),
                None => f.write_str("0"),
            };
        }
        for (i, t) in terms.iter().enumerate() {
            let neg = t.coeff.is_negative();
            let c = t.coeff.abs();
            match (i, neg) {
                (0, false) => {}
                (0, true) => f.write_str("-")?,
                (_, false) => f.write_str(" + ")?,
                (_, true) => f.write_str(" - ")?,
            }
            write_term(f, &c, &t.mono)?;
        }
        if let Some(c) = self.cutoff() {
            write!(f, " + O({c})")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::Context;

    fn xp(a: i64) -> Monomial {
        Monomial::log_power(0, Coeff::from_int(a))
    }

    #[test]
    fn renders_terms() {
        let c = Context::default();
        assert_eq!(Series::term(Coeff::from_int(2), xp(1)).to_string(), "2*x");
        let s = Series::x().sub(&Series::monomial(xp(-1)), &c);
        assert_eq!(s.to_string(), "x - x^-1");
        let e = Monomial::exp_of(&Series::x(), &c).unwrap().inv();
        let s = Series::x().with_cutoff(&e, &c);
        assert_eq!(s.to_string(), "x + O(exp(-x))");
        assert_eq!(Series::zero().to_string(), "0");
        assert_eq!(Series::constant(Coeff::ratio(-1, 2)).to_string(), "-1/2");
    }

    #[test]
    fn renders_monomials() {
        let c = Context::default();
        let m = Monomial::from_logs(vec![Coeff::ratio(1, 2), Coeff::from_int(-1), Coeff::from_int(3)]);
        assert_eq!(m.to_string(), "x^(1/2)*log(x)^-1*log^2(x)^3");
        let p = Series::monomial(xp(2)).add(&Series::x(), &c);
        let m = Monomial::exp_of(&p, &c).unwrap().mul(&xp(1), &c).unwrap();
        assert_eq!(m.to_string(), "x*exp(x^2 + x)");
    }
}
