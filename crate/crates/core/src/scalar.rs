//! Exact scalar arithmetic: Laurent polynomials in `q` over the rationals.
//!
//! A [`LaurentScalar`] is a finite map from integer exponents to nonzero
//! rational coefficients. The empty map is zero, and no operation ever
//! stores a zero coefficient, so equality is plain map equality.
//!
//! General division is deliberately absent. The only inverses provided are
//! those of the ring units, i.e. monomials `c*q^e`, via
//! [`LaurentScalar::invert_monomial`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScalarError {
    #[error("cannot evaluate at q = 0")]
    ZeroBase,
    #[error("scalar is not an invertible monomial: {0}")]
    NotMonomial(String),
    #[error("cannot parse laurent scalar from {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A Laurent polynomial in `q` with big-rational coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct LaurentScalar {
    terms: BTreeMap<i64, BigRational>,
}

impl LaurentScalar {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    /// The generator `q` itself.
    pub fn q() -> Self {
        Self::q_power(1)
    }

    /// `q^e` for any integer exponent.
    pub fn q_power(e: i64) -> Self {
        Self::monomial(BigRational::one(), e)
    }

    /// A single term `c * q^e`; the zero coefficient gives the ring zero.
    pub fn monomial(coeff: BigRational, e: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() {
            terms.insert(e, coeff);
        }
        Self { terms }
    }

    pub fn from_int(v: i64) -> Self {
        Self::monomial(BigRational::from_integer(BigInt::from(v)), 0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1
            && self
                .terms
                .get(&0)
                .map(|c| c.is_one())
                .unwrap_or(false)
    }

    /// Exponent-to-coefficient map; every stored coefficient is nonzero.
    pub fn terms(&self) -> &BTreeMap<i64, BigRational> {
        &self.terms
    }

    /// If the scalar is a single term `c*q^e`, returns `(c, e)`.
    pub fn as_monomial(&self) -> Option<(&BigRational, i64)> {
        if self.terms.len() == 1 {
            self.terms.iter().next().map(|(e, c)| (c, *e))
        } else {
            None
        }
    }

    /// Inverse of a unit `c*q^e`, i.e. `c^-1 * q^-e`.
    pub fn invert_monomial(&self) -> Result<Self, ScalarError> {
        match self.as_monomial() {
            Some((c, e)) => Ok(Self::monomial(c.recip(), -e)),
            None => Err(ScalarError::NotMonomial(self.to_string())),
        }
    }

    /// The `q`-deformation of a non-negative integer:
    /// `q^(m-1) + q^(m-3) + ... + q^(1-m)`.
    pub fn q_int(m: u32) -> Self {
        let mut terms = BTreeMap::new();
        for k in 0..m {
            let e = (m as i64 - 1) - 2 * k as i64;
            terms.insert(e, BigRational::one());
        }
        Self { terms }
    }

    /// Numeric evaluation at a nonzero real base.
    pub fn eval(&self, q0: f64) -> Result<f64, ScalarError> {
        if q0 == 0.0 {
            return Err(ScalarError::ZeroBase);
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let coeff = c.to_f64().unwrap_or(f64::NAN);
            acc += coeff * powi(q0, *e);
        }
        Ok(acc)
    }

    /// Applies the exponent map `e -> -e` (the bar involution).
    pub fn bar(&self) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (-e, c.clone()))
            .collect();
        Self { terms }
    }

    /// Largest absolute exponent appearing, or 0 for the zero scalar.
    pub fn max_abs_degree(&self) -> i64 {
        self.terms.keys().map(|e| e.abs()).max().unwrap_or(0)
    }

    fn add_term(&mut self, e: i64, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }
}

fn powi(base: f64, e: i64) -> f64 {
    let mut acc = 1.0;
    let b = if e < 0 { 1.0 / base } else { base };
    for _ in 0..e.unsigned_abs() {
        acc *= b;
    }
    acc
}

impl Add for &LaurentScalar {
    type Output = LaurentScalar;
    fn add(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, c);
        }
        out
    }
}

impl Sub for &LaurentScalar {
    type Output = LaurentScalar;
    fn sub(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, &-c.clone());
        }
        out
    }
}

impl Neg for &LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, -c.clone()))
            .collect();
        LaurentScalar { terms }
    }
}

impl Mul for &LaurentScalar {
    type Output = LaurentScalar;
    fn mul(self, rhs: &LaurentScalar) -> LaurentScalar {
        let mut out = LaurentScalar::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term(ea + eb, &(ca * cb));
            }
        }
        out
    }
}

macro_rules! forward_owned_ops {
    ($($trait:ident :: $method:ident),*) => {$(
        impl $trait for LaurentScalar {
            type Output = LaurentScalar;
            fn $method(self, rhs: LaurentScalar) -> LaurentScalar {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&LaurentScalar> for LaurentScalar {
            type Output = LaurentScalar;
            fn $method(self, rhs: &LaurentScalar) -> LaurentScalar {
                $trait::$method(&self, rhs)
            }
        }
    )*};
}
forward_owned_ops!(Add::add, Sub::sub, Mul::mul);

impl Neg for LaurentScalar {
    type Output = LaurentScalar;
    fn neg(self) -> LaurentScalar {
        -&self
    }
}

fn fmt_coeff_magnitude(c: &BigRational) -> String {
    let mag = c.abs();
    if mag.denom().is_one() {
        mag.numer().to_string()
    } else {
        format!("{}/{}", mag.numer(), mag.denom())
    }
}

fn fmt_q_power(e: i64) -> String {
    match e {
        1 => "q".to_string(),
        _ => format!("q^{e}"),
    }
}

impl fmt::Display for LaurentScalar {
    /// Terms in decreasing exponent order, e.g. `q^2 - 2 + q^-2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mag = fmt_coeff_magnitude(c);
            if *e == 0 {
                write!(f, "{mag}")?;
            } else if mag == "1" {
                write!(f, "{}", fmt_q_power(*e))?;
            } else {
                write!(f, "{}*{}", mag, fmt_q_power(*e))?;
            }
        }
        Ok(())
    }
}

impl FromStr for LaurentScalar {
    type Err = ScalarError;

    /// Parses the textual form produced by `Display`, e.g. `q^2 - 2 + 1/2*q^-1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: &str| ScalarError::Parse {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let mut out = LaurentScalar::zero();
        let mut rest = s.trim();
        if rest.is_empty() {
            return Err(err("empty input"));
        }
        let mut sign = 1i64;
        // leading sign
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r.trim_start();
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r.trim_start();
        }
        loop {
            let (term, tail) = split_term(rest);
            let (coeff, e) = parse_term(term).map_err(|r| err(r))?;
            let signed = if sign < 0 { -coeff } else { coeff };
            out.add_term(e, &signed);
            match tail {
                None => break,
                Some((next_sign, tail)) => {
                    sign = next_sign;
                    rest = tail.trim_start();
                    if rest.is_empty() {
                        return Err(err("dangling sign"));
                    }
                }
            }
        }
        Ok(out)
    }
}

/// Splits off one term at the next top-level `+`/`-` (a sign directly after
/// `^` or at the start of an exponent belongs to the exponent).
fn split_term(s: &str) -> (&str, Option<(i64, &str)>) {
    let bytes = s.as_bytes();
    let mut prev_non_space = None::<u8>;
    for (i, &b) in bytes.iter().enumerate() {
        if b == b'+' || b == b'-' {
            let exp_sign = matches!(prev_non_space, Some(b'^'));
            if !exp_sign && i > 0 {
                let sign = if b == b'-' { -1 } else { 1 };
                return (s[..i].trim(), Some((sign, &s[i + 1..])));
            }
        }
        if !b.is_ascii_whitespace() {
            prev_non_space = Some(b);
        }
    }
    (s.trim(), None)
}

fn parse_term(term: &str) -> Result<(BigRational, i64), &'static str> {
    let term = term.trim();
    if term.is_empty() {
        return Err("empty term");
    }
    let (coeff_str, q_str) = match term.find('q') {
        Some(pos) => (term[..pos].trim().trim_end_matches('*').trim(), Some(&term[pos..])),
        None => (term, None),
    };
    let coeff = if coeff_str.is_empty() {
        if q_str.is_none() {
            return Err("empty coefficient");
        }
        BigRational::one()
    } else {
        parse_rational(coeff_str)?
    };
    let e = match q_str {
        None => 0,
        Some("q") => 1,
        Some(qs) => {
            let exp = qs
                .strip_prefix("q^")
                .ok_or("malformed q power")?
                .trim();
            exp.parse::<i64>().map_err(|_| "malformed exponent")?
        }
    };
    Ok((coeff, e))
}

fn parse_rational(s: &str) -> Result<BigRational, &'static str> {
    let mk_int = |t: &str| t.trim().parse::<BigInt>().map_err(|_| "malformed integer");
    match s.split_once('/') {
        Some((num, den)) => {
            let d = mk_int(den)?;
            if d.is_zero() {
                return Err("zero denominator");
            }
            Ok(BigRational::new(mk_int(num)?, d))
        }
        None => Ok(BigRational::from_integer(mk_int(s)?)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn ls(s: &str) -> LaurentScalar {
        s.parse().unwrap()
    }

    #[test]
    fn add_cancels_inverse() {
        let q = LaurentScalar::q();
        assert!((&q + &-&q).is_zero());
    }

    #[test]
    fn add_disjoint_exponents() {
        assert_eq!(&ls("q + 1") + &ls("q^-1"), ls("q + 1 + q^-1"));
    }

    #[test]
    fn add_q_int_two_minus_q() {
        // [2]_q = q + q^-1, so [2]_q - q = q^-1.
        let two = LaurentScalar::q_int(2);
        assert_eq!(two, ls("q + q^-1"));
        assert_eq!(&two + &-&LaurentScalar::q(), ls("q^-1"));
    }

    #[test]
    fn mul_difference_of_squares() {
        assert_eq!(&ls("q - q^-1") * &ls("q + q^-1"), ls("q^2 - q^-2"));
    }

    #[test]
    fn mul_absorbing_zero() {
        assert!((&ls("3*q^5 - 7") * &LaurentScalar::zero()).is_zero());
    }

    #[test]
    fn mul_q_int_two_squared() {
        // (q + q^-1)^2 = q^2 + 2 + q^-2 by hand convolution.
        let two = LaurentScalar::q_int(2);
        assert_eq!(&two * &two, ls("q^2 + 2 + q^-2"));
    }

    #[test]
    fn eval_at_one_and_two() {
        assert_eq!(ls("q^2").eval(1.0).unwrap(), 1.0);
        assert_eq!(LaurentScalar::q_int(3).eval(1.0).unwrap(), 3.0);
        assert_eq!(ls("q + q^-1").eval(2.0).unwrap(), 2.5);
        assert_eq!(ls("q").eval(0.0), Err(ScalarError::ZeroBase));
    }

    #[test]
    fn q_int_small_values() {
        assert!(LaurentScalar::q_int(0).is_zero());
        assert!(LaurentScalar::q_int(1).is_one());
        assert_eq!(LaurentScalar::q_int(3), ls("q^2 + 1 + q^-2"));
    }

    #[test]
    fn q_int_defining_property_and_bar_symmetry() {
        // [m]_q * (q - q^-1) = q^m - q^-m, and [m]_q is bar-invariant.
        let denom = ls("q - q^-1");
        for m in 0..=50u32 {
            let qm = LaurentScalar::q_int(m);
            assert_eq!(qm.bar(), qm, "bar symmetry at m={m}");
            let lhs = &qm * &denom;
            let rhs = &LaurentScalar::q_power(m as i64) - &LaurentScalar::q_power(-(m as i64));
            assert_eq!(lhs, rhs, "defining property at m={m}");
        }
    }

    #[test]
    fn monomial_inverse() {
        let m = ls("3/2*q^-4");
        let inv = m.invert_monomial().unwrap();
        assert!((&m * &inv).is_one());
        assert!(ls("q + 1").invert_monomial().is_err());
        assert!(LaurentScalar::zero().invert_monomial().is_err());
    }

    #[test]
    fn display_decreasing_exponents() {
        let v = &(&ls("q^2") + &ls("-2")) + &ls("q^-2");
        assert_eq!(format!("{v}"), "q^2 - 2 + q^-2");
        assert_eq!(format!("{}", LaurentScalar::zero()), "0");
        assert_eq!(format!("{}", ls("-1/2*q")), "-1/2*q");
    }

    #[test]
    fn display_roundtrip() {
        for s in ["q^2 - 2 + q^-2", "-q + 3", "5", "1/3*q^-7 + 2*q", "0"] {
            let v = ls(s);
            assert_eq!(ls(&format!("{v}")), v, "roundtrip {s}");
        }
    }
}
