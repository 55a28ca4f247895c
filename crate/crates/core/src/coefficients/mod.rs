//! Exact coefficient fields: rationals, polynomials and rational functions in
//! y, and seeded rational specializations of the equivariant parameters.
//!
//! Series code is generic over [`Coefficient`]. A run is either symbolic in y
//! (coefficients in [`YRat`]) or numeric with y fixed to a rational
//! (coefficients in [`Rational`]); [`YPoly`] is used for the closed-form
//! blow-up factor, whose coefficients are polynomials.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

mod rational;
mod specialization;
mod ypoly;
mod yrat;

pub use rational::Rational;
pub use specialization::{sample_specialization, Specialization, YMode, PRNG_NAME};
pub use ypoly::YPoly;
pub use yrat::YRat;

use crate::error::{Error, Result};

/// An exact commutative ring element usable as a q-series coefficient.
pub trait Coefficient:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn from_rational(c: &Rational) -> Self;

    /// Multiplicative inverse, or `None` when the element is not a unit.
    fn inverse(&self) -> Option<Self>;

    /// The element standing for y in the given mode.
    fn y_value(mode: &YMode) -> Result<Self>;

    /// Value at y = `y0`, for cross-mode comparisons.
    fn evaluate_at(&self, y0: &Rational) -> Result<Rational>;

    fn pow(&self, exp: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out * self;
        }
        out
    }

    /// Substitutes `y` into the polynomial `p` (Horner).
    fn from_ypoly(p: &YPoly, y: &Self) -> Self {
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc * y + &Self::from_rational(c))
    }
}

impl Coefficient for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn from_rational(c: &Rational) -> Self {
        c.clone()
    }
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn y_value(mode: &YMode) -> Result<Self> {
        match mode {
            YMode::Numeric(y0) => Ok(y0.clone()),
            YMode::Symbolic => Err(Error::ModeMismatch(
                "symbolic y needs rational-function coefficients".into(),
            )),
        }
    }
    fn evaluate_at(&self, _y0: &Rational) -> Result<Rational> {
        Ok(self.clone())
    }
}

impl Coefficient for YPoly {
    fn zero() -> Self {
        YPoly::zero()
    }
    fn one() -> Self {
        YPoly::one()
    }
    fn is_zero(&self) -> bool {
        YPoly::is_zero(self)
    }
    fn from_rational(c: &Rational) -> Self {
        YPoly::constant(c.clone())
    }
    fn inverse(&self) -> Option<Self> {
        match self.coeffs() {
            [c] => c.recip().ok().map(YPoly::constant),
            _ => None,
        }
    }
    fn y_value(mode: &YMode) -> Result<Self> {
        Ok(match mode {
            YMode::Symbolic => YPoly::y(),
            YMode::Numeric(y0) => YPoly::constant(y0.clone()),
        })
    }
    fn evaluate_at(&self, y0: &Rational) -> Result<Rational> {
        Ok(self.eval(y0))
    }
    fn pow(&self, exp: u32) -> Self {
        YPoly::pow(self, exp)
    }
}

impl Coefficient for YRat {
    fn zero() -> Self {
        YRat::zero()
    }
    fn one() -> Self {
        YRat::one()
    }
    fn is_zero(&self) -> bool {
        YRat::is_zero(self)
    }
    fn from_rational(c: &Rational) -> Self {
        YRat::from(c.clone())
    }
    fn inverse(&self) -> Option<Self> {
        self.recip().ok()
    }
    fn y_value(mode: &YMode) -> Result<Self> {
        Ok(match mode {
            YMode::Symbolic => YRat::y(),
            YMode::Numeric(y0) => YRat::from(y0.clone()),
        })
    }
    fn evaluate_at(&self, y0: &Rational) -> Result<Rational> {
        self.eval(y0)
    }
    fn from_ypoly(p: &YPoly, y: &Self) -> Self {
        if y.is_polynomial() && y.numer() == &YPoly::y() {
            return YRat::from(p.clone());
        }
        p.coeffs()
            .iter()
            .rev()
            .fold(Self::zero(), |acc, c| acc * y + &Self::from_rational(c))
    }
}

/// Derives the owned-operand operator impls from the `&T op &T` ones.
macro_rules! owned_ops {
    ($t:ty) => {
        impl std::ops::Add<&$t> for $t {
            type Output = $t;
            fn add(self, rhs: &$t) -> $t {
                &self + rhs
            }
        }
        impl std::ops::Add<$t> for $t {
            type Output = $t;
            fn add(self, rhs: $t) -> $t {
                &self + &rhs
            }
        }
        impl std::ops::Sub<&$t> for $t {
            type Output = $t;
            fn sub(self, rhs: &$t) -> $t {
                &self - rhs
            }
        }
        impl std::ops::Sub<$t> for $t {
            type Output = $t;
            fn sub(self, rhs: $t) -> $t {
                &self - &rhs
            }
        }
        impl std::ops::Mul<&$t> for $t {
            type Output = $t;
            fn mul(self, rhs: &$t) -> $t {
                &self * rhs
            }
        }
        impl std::ops::Mul<$t> for $t {
            type Output = $t;
            fn mul(self, rhs: $t) -> $t {
                &self * &rhs
            }
        }
        impl std::ops::Neg for $t {
            type Output = $t;
            fn neg(self) -> $t {
                -&self
            }
        }
    };
}
pub(crate) use owned_ops;

/// Serializes through the textual grammar (`Display` / `FromStr`).
macro_rules! string_serde {
    ($t:ty) => {
        impl serde::Serialize for $t {
            fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                s.collect_str(self)
            }
        }
        impl<'de> serde::Deserialize<'de> for $t {
            fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
                let s = <String as serde::Deserialize>::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

string_serde!(Rational);
string_serde!(YPoly);
string_serde!(YRat);

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_rational() -> impl Strategy<Value = Rational> {
        (-30i64..30, 1i64..12).prop_map(|(n, d)| Rational::new(n, d).unwrap())
    }

    fn small_yrat() -> impl Strategy<Value = YRat> {
        (
            proptest::collection::vec(small_rational(), 0..4),
            proptest::collection::vec(small_rational(), 1..3),
        )
            .prop_filter_map("nonzero denominator", |(n, d)| {
                YRat::new(YPoly::new(n), YPoly::new(d)).ok()
            })
    }

    proptest! {
        #[test]
        fn rational_field_laws(a in small_rational(), b in small_rational()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a);
            }
        }

        #[test]
        fn yrat_field_laws(a in small_yrat(), b in small_yrat()) {
            prop_assert_eq!(&(&a + &b) - &b, a.clone());
            if !b.is_zero() {
                prop_assert_eq!((&a * &b).checked_div(&b).unwrap(), a.clone());
            }
            let text = a.to_string();
            prop_assert_eq!(text.parse::<YRat>().unwrap(), a);
        }

        #[test]
        fn yrat_evaluation_is_a_homomorphism(a in small_yrat(), b in small_yrat(), y0 in small_rational()) {
            if let (Ok(va), Ok(vb)) = (a.eval(&y0), b.eval(&y0)) {
                prop_assert_eq!((&a * &b).eval(&y0).unwrap(), &va * &vb);
                prop_assert_eq!((&a + &b).eval(&y0).unwrap(), &va + &vb);
            }
        }
    }

    #[test]
    fn from_ypoly_substitutes() {
        let p: YPoly = "1 + 2*y + y^2".parse().unwrap();
        let v = Rational::from_ypoly(&p, &Rational::from(3));
        assert_eq!(v, Rational::from(16));
        let s = YRat::from_ypoly(&p, &YRat::y());
        assert_eq!(s.as_poly(), Some(&p));
    }

    #[test]
    fn ypoly_inverse_only_for_constants() {
        assert!(YPoly::y().inverse().is_none());
        assert_eq!(
            YPoly::constant(Rational::from(2)).inverse(),
            Some(YPoly::constant(Rational::new(1, 2).unwrap()))
        );
    }
}
