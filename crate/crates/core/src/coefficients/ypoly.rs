use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::Rational;
use crate::error::{Error, Result};

/// Polynomial in y with rational coefficients; `coeffs[i]` multiplies y^i.
///
/// Canonical: no trailing zero coefficient, so the zero polynomial is empty.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct YPoly {
    coeffs: Vec<Rational>,
}

impl YPoly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Rational::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::new(vec![c])
    }

    /// The generator y.
    pub fn y() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, degree: usize) -> Rational {
        self.coeffs.get(degree).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| &(&acc * y) + c)
    }

    /// Euclidean division; errors on a zero divisor.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor
            .leading()
            .ok_or_else(|| Error::DivisionByZero("polynomial division by 0".into()))?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Self::zero(), self.clone()));
        }
        let mut quot = vec![Rational::zero(); rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let c = rem[shift + dd].checked_div(lead)?;
            if !c.is_zero() {
                for (i, d) in divisor.coeffs.iter().enumerate() {
                    rem[shift + i] = &rem[shift + i] - &(&c * d);
                }
            }
            quot[shift] = c;
        }
        rem.truncate(dd);
        Ok((Self::new(quot), Self::new(rem)))
    }

    /// Monic gcd; gcd(0, 0) = 0.
    pub fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn monic(&self) -> Self {
        match self.leading() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip().expect("nonzero leading coefficient")),
        }
    }

    /// The positive rational c such that `self / c` is a primitive integer
    /// polynomial with positive leading coefficient (sign folded into c).
    pub(crate) fn content(&self) -> Rational {
        if self.is_zero() {
            return Rational::one();
        }
        let lcm_den = self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let gcd_num = self.coeffs.iter().fold(BigInt::zero(), |acc, c| {
            let scaled = c.numer() * (&lcm_den / c.denom());
            acc.gcd(&scaled)
        });
        let content = Rational::new(gcd_num, lcm_den).expect("positive lcm");
        if self.leading().is_some_and(Rational::is_negative) {
            -content
        } else {
            content
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = &out * self;
        }
        out
    }
}

impl From<Rational> for YPoly {
    fn from(c: Rational) -> Self {
        Self::constant(c)
    }
}

impl Add<&YPoly> for &YPoly {
    type Output = YPoly;
    fn add(self, rhs: &YPoly) -> YPoly {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        YPoly::new(
            (0..len)
                .map(|i| match (self.coeffs.get(i), rhs.coeffs.get(i)) {
                    (Some(a), Some(b)) => a + b,
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.clone(),
                    (None, None) => unreachable!(),
                })
                .collect(),
        )
    }
}

impl Sub<&YPoly> for &YPoly {
    type Output = YPoly;
    fn sub(self, rhs: &YPoly) -> YPoly {
        self + &(-rhs)
    }
}

impl Mul<&YPoly> for &YPoly {
    type Output = YPoly;
    fn mul(self, rhs: &YPoly) -> YPoly {
        if self.is_zero() || rhs.is_zero() {
            return YPoly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if !b.is_zero() {
                    out[i + j] = &out[i + j] + &(a * b);
                }
            }
        }
        YPoly::new(out)
    }
}

impl Neg for &YPoly {
    type Output = YPoly;
    fn neg(self) -> YPoly {
        YPoly {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

super::owned_ops!(YPoly);

/// Grammar: terms joined by `" + "`, ascending in degree, zero terms omitted.
/// A term is `c` (degree 0), `y`/`y^d` (coefficient 1) or `c*y`/`c*y^d`,
/// where `c` is a rational `p` or `p/q`. The zero polynomial is `0`.
impl fmt::Display for YPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (deg, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let var = match deg {
                0 => String::new(),
                1 => "y".to_string(),
                d => format!("y^{d}"),
            };
            match (deg, c.is_one()) {
                (0, _) => write!(f, "{c}")?,
                (_, true) => write!(f, "{var}")?,
                _ => write!(f, "{c}*{var}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for YPoly {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut acc = Self::zero();
        for term in s.split(" + ") {
            let term = term.trim();
            let (coeff, var) = match term.split_once('*') {
                Some((c, v)) => (c.parse::<Rational>()?, Some(v)),
                None if term.starts_with('y') => (Rational::one(), Some(term)),
                None => (term.parse::<Rational>()?, None),
            };
            let degree = match var {
                None => 0,
                Some("y") => 1,
                Some(v) => v
                    .strip_prefix("y^")
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::Parse(format!("bad monomial {v:?}")))?,
            };
            acc = &acc + &YPoly::monomial(coeff, degree);
        }
        Ok(acc)
    }
}

impl YPoly {
    /// True when every coefficient is a nonnegative integer.
    pub fn has_nonnegative_integer_coeffs(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer() && !c.numer().is_negative())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> YPoly {
        s.parse().unwrap()
    }

    #[test]
    fn display_grammar() {
        let p = YPoly::new(vec![Rational::from(1), Rational::from(1)]);
        assert_eq!(p.to_string(), "1 + y");
        let p = YPoly::new(vec![
            Rational::new(3, 1).unwrap(),
            Rational::new(-5, 2).unwrap(),
            Rational::zero(),
            Rational::from(1),
        ]);
        assert_eq!(p.to_string(), "3 + -5/2*y + y^3");
        assert_eq!(YPoly::zero().to_string(), "0");
        assert_eq!(poly("3 + -5/2*y + y^3"), p);
    }

    #[test]
    fn product_evaluates_at_one() {
        // (2−y)(3−y)/2 at y=1
        let a = poly("2 + -1*y");
        let b = poly("3 + -1*y");
        let prod = (&a * &b).scale(&Rational::new(1, 2).unwrap());
        assert_eq!(prod.eval(&Rational::one()), Rational::one());
    }

    #[test]
    fn division_and_gcd() {
        let a = poly("-1 + y^2"); // (y−1)(y+1)
        let b = poly("-2 + y + y^2"); // (y−1)(y+2)
        assert_eq!(a.gcd(&b), poly("-1 + y"));
        let (q, r) = a.div_rem(&poly("-1 + y")).unwrap();
        assert_eq!(q, poly("1 + y"));
        assert!(r.is_zero());
        assert!(a.div_rem(&YPoly::zero()).is_err());
    }

    #[test]
    fn content_normalizes() {
        let p = poly("-1/2 + -3/4*y");
        let c = p.content();
        assert_eq!(c, Rational::new(-1, 4).unwrap());
        // p / c = 2 + 3y
        assert_eq!(p.scale(&c.recip().unwrap()), poly("2 + 3*y"));
    }
}
