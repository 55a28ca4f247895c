use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use super::{Rational, YPoly};
use crate::error::{Error, Result};

/// Rational function in y, kept reduced.
///
/// Canonical form: gcd(numerator, denominator) = 1 and the denominator is a
/// primitive integer polynomial with positive leading coefficient. Two equal
/// functions therefore compare equal structurally. Polynomials have
/// denominator exactly 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct YRat {
    num: YPoly,
    den: YPoly,
}

impl YRat {
    pub fn new(num: YPoly, den: YPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero(format!("({num}) / 0")));
        }
        Ok(Self::normalized(num, den))
    }

    fn normalized(num: YPoly, den: YPoly) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let (num, den) = if den.is_constant() {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_constant() {
                (num, den)
            } else {
                (
                    num.div_rem(&g).expect("gcd is nonzero").0,
                    den.div_rem(&g).expect("gcd is nonzero").0,
                )
            }
        };
        let c = den.content();
        let inv = c.recip().expect("content of nonzero polynomial");
        Self {
            num: num.scale(&inv),
            den: den.scale(&inv),
        }
    }

    pub fn zero() -> Self {
        Self {
            num: YPoly::zero(),
            den: YPoly::one(),
        }
    }

    pub fn one() -> Self {
        Self::from(YPoly::one())
    }

    pub fn y() -> Self {
        Self::from(YPoly::y())
    }

    pub fn numer(&self) -> &YPoly {
        &self.num
    }

    pub fn denom(&self) -> &YPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    /// The polynomial value, if the denominator is 1.
    pub fn as_poly(&self) -> Option<&YPoly> {
        self.is_polynomial().then_some(&self.num)
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero("reciprocal of zero rational function".into()));
        }
        Ok(Self::normalized(self.den.clone(), self.num.clone()))
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        Ok(self * &other.recip()?)
    }

    pub fn eval(&self, y: &Rational) -> Result<Rational> {
        let d = self.den.eval(y);
        if d.is_zero() {
            return Err(Error::DivisionByZero(format!(
                "denominator {} vanishes at y = {y}",
                self.den
            )));
        }
        self.num.eval(y).checked_div(&d)
    }
}

impl From<YPoly> for YRat {
    fn from(num: YPoly) -> Self {
        Self { num, den: YPoly::one() }
    }
}

impl From<Rational> for YRat {
    fn from(c: Rational) -> Self {
        Self::from(YPoly::constant(c))
    }
}

impl Add<&YRat> for &YRat {
    type Output = YRat;
    fn add(self, rhs: &YRat) -> YRat {
        if self.den == rhs.den {
            return YRat::normalized(&self.num + &rhs.num, self.den.clone());
        }
        YRat::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub<&YRat> for &YRat {
    type Output = YRat;
    fn sub(self, rhs: &YRat) -> YRat {
        self + &(-rhs)
    }
}

impl Mul<&YRat> for &YRat {
    type Output = YRat;
    fn mul(self, rhs: &YRat) -> YRat {
        if self.is_polynomial() && rhs.is_polynomial() {
            return YRat::from(&self.num * &rhs.num);
        }
        YRat::normalized(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &YRat {
    type Output = YRat;
    fn neg(self) -> YRat {
        YRat {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

super::owned_ops!(YRat);

/// `num` for polynomials, `(num)/(den)` otherwise, using the [`YPoly`] grammar.
impl fmt::Display for YRat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl FromStr for YRat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix('(') {
            let (num, den) = rest
                .split_once(")/(")
                .and_then(|(n, d)| d.strip_suffix(')').map(|d| (n, d)))
                .ok_or_else(|| Error::Parse(format!("bad rational function {s:?}")))?;
            return YRat::new(num.parse()?, den.parse()?);
        }
        Ok(YRat::from(s.parse::<YPoly>()?))
    }
}
