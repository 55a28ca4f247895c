//! Truncated Laurent series in q.
//!
//! A [`QSeries`] stores every coefficient from `offset` up to (excluding)
//! `order` densely. Coefficients at or beyond `order` are unknown and asking
//! for them is an error.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::coefficients::{Coefficient, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct QSeries<C> {
    offset: i64,
    coeffs: Vec<C>,
    order: i64,
}

impl<C: Coefficient> QSeries<C> {
    /// Series with `coeffs[i]` at q^{offset+i}, known below `order`.
    /// Missing coefficients up to `order` are zero; extra ones are dropped.
    pub fn new(offset: i64, mut coeffs: Vec<C>, order: i64) -> Result<Self> {
        if order < offset {
            return Err(Error::InvalidArgument(format!(
                "truncation order {order} below offset {offset}"
            )));
        }
        let len = (order - offset) as usize;
        coeffs.resize(len, C::zero());
        Ok(Self { offset, coeffs, order })
    }

    pub fn zero(order: i64) -> Self {
        Self::monomial(C::zero(), 0, order.max(0))
    }

    pub fn one(order: i64) -> Self {
        Self::monomial(C::one(), 0, order)
    }

    /// c·q^exponent + O(q^order); `order` must be ≥ exponent.
    pub fn monomial(c: C, exponent: i64, order: i64) -> Self {
        let order = order.max(exponent);
        let mut coeffs = vec![C::zero(); (order - exponent) as usize];
        if let Some(first) = coeffs.first_mut() {
            *first = c;
        }
        Self {
            offset: exponent,
            coeffs,
            order,
        }
    }

    /// Builds a series from sparse `(exponent, coefficient)` terms, summing
    /// repeated exponents. Terms at or beyond `order` are ignored.
    pub fn from_terms(offset: i64, order: i64, terms: impl IntoIterator<Item = (i64, C)>) -> Result<Self> {
        let mut s = Self::new(offset, Vec::new(), order)?;
        for (e, c) in terms {
            if e >= order {
                continue;
            }
            if e < offset {
                return Err(Error::InvalidArgument(format!("term q^{e} below offset {offset}")));
            }
            let slot = &mut s.coeffs[(e - offset) as usize];
            *slot = slot.clone() + &c;
        }
        Ok(s)
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn order(&self) -> i64 {
        self.order
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    /// Coefficient of q^exponent; zero below the offset.
    pub fn coeff(&self, exponent: i64) -> Result<C> {
        if exponent >= self.order {
            return Err(Error::BeyondOrder {
                exponent,
                order: self.order,
            });
        }
        if exponent < self.offset {
            return Ok(C::zero());
        }
        Ok(self.coeffs[(exponent - self.offset) as usize].clone())
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &C)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.offset + i as i64, c))
    }

    /// Exponent of the first nonzero coefficient; `order` if none is known.
    pub fn valuation(&self) -> i64 {
        self.terms().next().map_or(self.order, |(e, _)| e)
    }

    pub fn lowest_term(&self) -> Option<(i64, &C)> {
        self.terms().next()
    }

    /// Drops information at and beyond `order` (no-op if already lower).
    pub fn truncate(&self, order: i64) -> Self {
        let order = order.min(self.order);
        if order <= self.offset {
            return Self {
                offset: order,
                coeffs: Vec::new(),
                order,
            };
        }
        Self {
            offset: self.offset,
            coeffs: self.coeffs[..(order - self.offset) as usize].to_vec(),
            order,
        }
    }

    pub fn map<D: Coefficient>(&self, f: impl Fn(&C) -> D) -> QSeries<D> {
        QSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(f).collect(),
            order: self.order,
        }
    }

    pub fn try_map<D: Coefficient>(&self, f: impl Fn(&C) -> Result<D>) -> Result<QSeries<D>> {
        Ok(QSeries {
            offset: self.offset,
            coeffs: self.coeffs.iter().map(f).collect::<Result<_>>()?,
            order: self.order,
        })
    }

    /// Replaces the coefficient at q^e by `f(e, c)` (for weighted
    /// substitutions such as q ↦ y^m q).
    pub fn map_indexed(&self, f: impl Fn(i64, &C) -> C) -> Self {
        Self {
            offset: self.offset,
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| f(self.offset + i as i64, c))
                .collect(),
            order: self.order,
        }
    }

    /// q ↦ q^m for m ≥ 1.
    pub fn inflate(&self, m: i64) -> Self {
        assert!(m >= 1, "inflation factor must be positive");
        let offset = self.offset * m;
        let order = self.order * m;
        let mut coeffs = vec![C::zero(); (order - offset) as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs[i * m as usize] = c.clone();
        }
        Self { offset, coeffs, order }
    }

    pub fn add(&self, other: &Self) -> Self {
        let offset = self.offset.min(other.offset);
        let order = self.order.min(other.order);
        let terms = self.terms().chain(other.terms()).map(|(e, c)| (e, c.clone()));
        Self::from_terms(offset.min(order), order, terms).expect("offset below order")
    }

    pub fn neg(&self) -> Self {
        self.map(|c| -c.clone())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.map(|a| a.clone() * c)
    }

    /// Product; the result order is min(order_a + val_b, order_b + val_a).
    pub fn mul(&self, other: &Self) -> Self {
        let order = (self.order + other.valuation()).min(other.order + self.valuation());
        let offset = (self.offset + other.offset).min(order);
        let mut coeffs = vec![C::zero(); (order - offset) as usize];
        for (ea, a) in self.terms() {
            for (eb, b) in other.terms() {
                let e = ea + eb;
                if e >= order {
                    break;
                }
                let slot = &mut coeffs[(e - offset) as usize];
                *slot = slot.clone() + &(a.clone() * b);
            }
        }
        Self { offset, coeffs, order }
    }

    pub fn pow(&self, exp: u32) -> Self {
        if exp == 0 {
            return Self::one(self.order - self.valuation());
        }
        let mut out = self.clone();
        for _ in 1..exp {
            out = out.mul(self);
        }
        out
    }

    /// Multiplicative inverse. The lowest known nonzero coefficient must be
    /// a unit; relative precision is preserved.
    pub fn invert(&self) -> Result<Self> {
        let v = self.valuation();
        if v >= self.order {
            return Err(Error::InvertNonUnit { order: self.order });
        }
        let lead = self.coeff(v)?;
        let lead_inv = lead.inverse().ok_or(Error::InvertNonUnit { order: self.order })?;
        let precision = (self.order - v) as usize;
        let a: Vec<C> = (0..precision)
            .map(|i| self.coeff(v + i as i64))
            .collect::<Result<_>>()?;
        let mut b: Vec<C> = Vec::with_capacity(precision);
        b.push(lead_inv.clone());
        for m in 1..precision {
            let mut acc = C::zero();
            for i in 1..=m {
                if a[i].is_zero() || b[m - i].is_zero() {
                    continue;
                }
                acc = acc + &(a[i].clone() * &b[m - i]);
            }
            b.push(-(acc * &lead_inv));
        }
        Ok(Self {
            offset: -v,
            coeffs: b,
            order: -v + precision as i64,
        })
    }

    /// Equality of all coefficients below `order`; errors if either series
    /// is not known that far.
    pub fn eq_to_order(&self, other: &Self, order: i64) -> Result<bool> {
        Ok(self.first_difference(other, order)?.is_none())
    }

    /// First exponent below `order` where the series differ.
    pub fn first_difference(&self, other: &Self, order: i64) -> Result<Option<i64>> {
        Ok(self.differences(other, order)?.into_iter().next())
    }

    /// All exponents below `order` where the series differ.
    pub fn differences(&self, other: &Self, order: i64) -> Result<Vec<i64>> {
        for s in [self, other] {
            if order > s.order {
                return Err(Error::BeyondOrder {
                    exponent: order - 1,
                    order: s.order,
                });
            }
        }
        let start = self.offset.min(other.offset);
        let mut out = Vec::new();
        for e in start..order {
            if self.coeff(e)? != other.coeff(e)? {
                out.push(e);
            }
        }
        Ok(out)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            offset: self.offset,
            order: self.order,
            coeffs: self.coeffs.iter().map(ToString::to_string).collect(),
        }
    }

    /// `"q^e: c"` for the lowest nonzero term.
    pub fn lowest_term_text(&self) -> Option<String> {
        self.lowest_term().map(|(e, c)| format!("q^{e}: {c}"))
    }
}

impl<C: Coefficient + std::str::FromStr<Err = Error>> QSeries<C> {
    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        let coeffs = json.coeffs.iter().map(|s| s.parse()).collect::<Result<Vec<C>>>()?;
        if coeffs.len() as i64 != json.order - json.offset {
            return Err(Error::Parse(format!(
                "series has {} coefficients for range [{}, {})",
                coeffs.len(),
                json.offset,
                json.order
            )));
        }
        Self::new(json.offset, coeffs, json.order)
    }
}

/// `{"offset": int, "order": int, "coeffs": [coefficient strings]}`;
/// `coeffs[i]` is the coefficient of q^{offset+i} and `order` is exclusive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesJson {
    pub offset: i64,
    pub order: i64,
    pub coeffs: Vec<String>,
}

/// Integer coefficients of ∏_{n≥1} (1 − X^n)^power through X^max_degree.
pub fn euler_product_integers(power: i64, max_degree: usize) -> Vec<BigInt> {
    let mut c = vec![BigInt::zero(); max_degree + 1];
    c[0] = BigInt::one();
    for n in 1..=max_degree {
        for _ in 0..power.unsigned_abs() {
            if power < 0 {
                // multiply by 1/(1 − X^n)
                for i in n..=max_degree {
                    let prev = c[i - n].clone();
                    c[i] += prev;
                }
            } else {
                // multiply by (1 − X^n)
                for i in (n..=max_degree).rev() {
                    let prev = c[i - n].clone();
                    c[i] -= prev;
                }
            }
        }
    }
    c
}

/// ∏_{n>0} (1 − q^{q_step·n} y^{y_step·n})^power + O(q^order).
pub fn euler_product<C: Coefficient>(q_step: i64, y_step: u32, power: i64, order: i64, y: &C) -> Result<QSeries<C>> {
    if q_step < 1 {
        return Err(Error::InvalidArgument(format!("q-step {q_step} must be positive")));
    }
    if order <= 0 {
        return Ok(QSeries::zero(order));
    }
    let max_degree = ((order - 1) / q_step) as usize;
    let ints = euler_product_integers(power, max_degree);
    let y_step_power = y.pow(y_step);
    let mut y_power = C::one();
    let mut terms = Vec::with_capacity(ints.len());
    for (m, c) in ints.into_iter().enumerate() {
        if !c.is_zero() {
            terms.push((
                m as i64 * q_step,
                C::from_rational(&Rational::from_integer(c)) * &y_power,
            ));
        }
        y_power = y_power * &y_step_power;
    }
    QSeries::from_terms(0, order, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{YPoly, YRat};
    use proptest::prelude::*;

    fn series(offset: i64, coeffs: &[i64], order: i64) -> QSeries<Rational> {
        QSeries::new(offset, coeffs.iter().map(|&c| Rational::from(c)).collect(), order).unwrap()
    }

    #[test]
    fn product_of_conjugates() {
        let a = series(0, &[1, 1], 6);
        let b = series(0, &[1, -1], 6);
        assert_eq!(a.mul(&b), series(0, &[1, 0, -1], 6));
    }

    #[test]
    fn geometric_inverse() {
        let inv = series(0, &[1, -1], 6).invert().unwrap();
        assert_eq!(inv, series(0, &[1, 1, 1, 1, 1, 1], 6));
    }

    #[test]
    fn laurent_shift_on_inverse() {
        let a = series(1, &[1, 1], 6);
        let inv = a.invert().unwrap();
        assert_eq!(inv.offset(), -1);
        assert_eq!(inv.order(), 4);
        assert_eq!(inv.coeff(-1).unwrap(), Rational::one());
        assert_eq!(inv.coeff(0).unwrap(), Rational::from(-1));
    }

    #[test]
    fn invert_zero_fails() {
        assert!(matches!(
            QSeries::<Rational>::zero(5).invert(),
            Err(Error::InvertNonUnit { .. })
        ));
        let nonunit = QSeries::<YPoly>::monomial(YPoly::y(), 0, 4);
        assert!(nonunit.invert().is_err());
    }

    #[test]
    fn beyond_order_is_error() {
        let a = series(0, &[1], 3);
        assert!(a.coeff(2).is_ok());
        assert!(matches!(a.coeff(3), Err(Error::BeyondOrder { .. })));
        assert!(a.eq_to_order(&a, 4).is_err());
    }

    #[test]
    fn euler_product_examples() {
        let y = YRat::y();
        let s = euler_product(2, 1, -1, 5, &y).unwrap();
        assert_eq!(s.coeff(0).unwrap(), YRat::one());
        assert_eq!(s.coeff(1).unwrap(), YRat::zero());
        assert_eq!(s.coeff(2).unwrap(), y);
        // 1 + X + 2X² with X = q²y
        assert_eq!(s.coeff(4).unwrap().to_string(), "2*y^2");

        let p = euler_product(1, 0, -1, 5, &Rational::one()).unwrap();
        let got: Vec<String> = p.coeffs().iter().map(ToString::to_string).collect();
        assert_eq!(got, ["1", "1", "2", "3", "5"]);

        let trivial = euler_product(1, 1, 0, 5, &y).unwrap();
        assert_eq!(trivial, QSeries::one(5));
    }

    #[test]
    fn euler_power_is_power_of_base() {
        let y = YRat::y();
        let base = euler_product(1, 1, -1, 10, &y).unwrap();
        for r in 1..=3u32 {
            let direct = euler_product(1, 1, -(r as i64), 10, &y).unwrap();
            assert_eq!(direct, base.pow(r));
        }
    }

    #[test]
    fn inflate_keeps_gaps_known() {
        let a = series(0, &[1, 2, 3], 3);
        let b = a.inflate(2);
        assert_eq!(b.order(), 6);
        assert_eq!(b.coeff(5).unwrap(), Rational::zero());
        assert_eq!(b.coeff(4).unwrap(), Rational::from(3));
        assert_eq!(b.coeff(3).unwrap(), Rational::zero());
    }

    #[test]
    fn json_roundtrip() {
        let s = series(-1, &[0, 3, 0, -2], 3);
        let json = s.to_json();
        assert_eq!(json.coeffs, ["0", "3", "0", "-2"]);
        assert_eq!(QSeries::<Rational>::from_json(&json).unwrap(), s);
    }

    fn arb_series() -> impl Strategy<Value = QSeries<Rational>> {
        (-2i64..2, proptest::collection::vec(-5i64..5, 1..7)).prop_map(|(off, cs)| {
            let order = off + cs.len() as i64;
            series(off, &cs, order)
        })
    }

    proptest! {
        #[test]
        fn ring_axioms(a in arb_series(), b in arb_series(), c in arb_series()) {
            let lhs = a.mul(&b).mul(&c);
            let rhs = a.mul(&b.mul(&c));
            let ord = lhs.order().min(rhs.order());
            prop_assert!(lhs.eq_to_order(&rhs, ord).unwrap());

            let lhs = a.mul(&b.add(&c));
            let rhs = a.mul(&b).add(&a.mul(&c));
            let ord = lhs.order().min(rhs.order());
            prop_assert!(lhs.eq_to_order(&rhs, ord).unwrap());
        }

        #[test]
        fn inverse_times_self_is_one(a in arb_series()) {
            if let Ok(inv) = a.invert() {
                let prod = a.mul(&inv);
                prop_assert!(prod.eq_to_order(&QSeries::one(prod.order()), prod.order()).unwrap());
            }
        }
    }
}
