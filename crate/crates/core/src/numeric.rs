//! Numeric spot evaluation of coefficient expressions.
//!
//! Exact rationals are returned whenever every exponential argument vanishes
//! at the chosen point. Otherwise the value is computed in fixed point with
//! guard digits and rounded to the requested number of fractional digits.
//! Nothing here feeds back into symbolic zero tests.

use alloc::collections::BTreeMap;
use alloc::string::String;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::expr::{CoeffExpr, Rational};

pub const DEFAULT_DIGITS: u32 = 50;

const GUARD_DIGITS: u32 = 12;

/// A decimal number `mantissa / 10^digits`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    mantissa: BigInt,
    digits: u32,
}

impl Decimal {
    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let scale = pow10(self.digits);
        let (q, r) = self.mantissa.abs().div_rem(&scale);
        if self.mantissa.is_negative() {
            f.write_str("-")?;
        }
        write!(f, "{q}")?;
        if self.digits > 0 {
            let frac = alloc::format!("{r}");
            f.write_str(".")?;
            for _ in frac.len()..self.digits as usize {
                f.write_str("0")?;
            }
            f.write_str(&frac)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Numeric {
    Exact(Rational),
    Approx(Decimal),
}

impl fmt::Display for Numeric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Numeric::Exact(r) => write!(f, "{r}"),
            Numeric::Approx(d) => write!(f, "{d}"),
        }
    }
}

fn pow10(n: u32) -> BigInt {
    num_traits::pow(BigInt::from(10), n as usize)
}

/// `round(num / den)` for `den > 0`, halves rounded up.
fn div_round(num: &BigInt, den: &BigInt) -> BigInt {
    let (q, r) = num.div_mod_floor(den);
    if r * 2 >= *den {
        q + 1
    } else {
        q
    }
}

/// `round(r * 10^digits)`.
fn to_fixed(r: &Rational, digits: u32) -> BigInt {
    div_round(&(r.numer() * pow10(digits)), r.denom())
}

/// `exp(a)` in fixed point with `digits` fractional digits (not rounded
/// correctly in the last place; callers carry guard digits).
fn exp_fixed(a: &Rational, digits: u32) -> BigInt {
    // Halve the argument until |a| <= 1/2, then square back.
    let mut halvings = 0u32;
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut x = a.clone();
    while x.abs() > half {
        x /= Rational::from_integer(BigInt::from(2));
        halvings += 1;
    }
    let work = digits + halvings / 3 + GUARD_DIGITS;
    let scale = pow10(work);
    let xf = to_fixed(&x, work);
    let mut sum = scale.clone();
    let mut term = scale.clone();
    let mut k = 1u64;
    loop {
        term = div_round(&(&term * &xf), &(&scale * BigInt::from(k)));
        if term.is_zero() {
            break;
        }
        sum += &term;
        k += 1;
    }
    for _ in 0..halvings {
        sum = div_round(&(&sum * &sum), &scale);
    }
    div_round(&sum, &pow10(work - digits))
}

/// Evaluates `a` at `point`, with `digits` fractional digits when the
/// result is not exactly rational.
pub fn evaluate(
    a: &CoeffExpr,
    point: &BTreeMap<String, Rational>,
    digits: u32,
) -> Result<Numeric, Error> {
    let lookup = |s: &String| {
        point
            .get(s)
            .ok_or_else(|| Error::MissingCoordinate(s.clone()))
    };
    let mut exact = Rational::zero();
    let mut approx_terms = alloc::vec::Vec::new();
    for (m, c) in a.term_refs() {
        let mut value = c.clone();
        for (s, p) in m.powers() {
            value *= num_traits::pow(lookup(s)?.clone(), *p as usize);
        }
        let mut arg = Rational::zero();
        for (s, q) in m.exp_weights() {
            arg += q * lookup(s)?;
        }
        if arg.is_zero() {
            exact += value;
        } else {
            approx_terms.push((value, arg));
        }
    }
    if approx_terms.is_empty() {
        return Ok(Numeric::Exact(exact));
    }
    let work = digits + GUARD_DIGITS;
    let mut total = to_fixed(&exact, work);
    for (value, arg) in approx_terms {
        let e = exp_fixed(&arg, work);
        total += div_round(&(value.numer() * e), value.denom());
    }
    Ok(Numeric::Approx(Decimal {
        mantissa: div_round(&total, &pow10(GUARD_DIGITS)),
        digits,
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, ratio};
    use alloc::string::ToString;

    fn point(vals: &[(&str, Rational)]) -> BTreeMap<String, Rational> {
        vals.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
    }

    #[test]
    fn exact_when_exponents_vanish() {
        let a = CoeffExpr::parse("x*exp(v)").unwrap();
        let v = evaluate(&a, &point(&[("x", int(2)), ("v", int(0))]), 50).unwrap();
        assert_eq!(v, Numeric::Exact(int(2)));
        let z = evaluate(&CoeffExpr::zero(), &point(&[]), 50).unwrap();
        assert_eq!(z, Numeric::Exact(int(0)));
    }

    #[test]
    fn inverse_e_to_fifty_digits() {
        let a = CoeffExpr::parse("exp(-v)").unwrap();
        let v = evaluate(&a, &point(&[("v", int(1))]), 50).unwrap();
        assert_eq!(
            v.to_string(),
            "0.36787944117144232159552377016146086744581113103177"
        );
    }

    #[test]
    fn mixed_terms_and_larger_arguments() {
        // 3/2 + e^(5/2) - 2e^(-10)
        let a = CoeffExpr::parse("3/2 + exp(5/2*v) - 2*exp(-10*v)").unwrap();
        let v = evaluate(&a, &point(&[("v", int(1))]), 30).unwrap();
        assert_eq!(v.to_string(), "13.682403160843948468367104768137");
        let e20 = CoeffExpr::parse("exp(x)").unwrap();
        let v = evaluate(&e20, &point(&[("x", int(20))]), 20).unwrap();
        assert_eq!(v.to_string(), "485165195.40979027796910683054");
    }

    #[test]
    fn missing_coordinate() {
        let a = CoeffExpr::parse("x + y").unwrap();
        let err = evaluate(&a, &point(&[("x", ratio(1, 2))]), 10).unwrap_err();
        assert_eq!(err, Error::MissingCoordinate("y".into()));
    }
}
