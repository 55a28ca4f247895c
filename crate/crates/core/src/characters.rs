//! Characters of torus representations (equivariant K-theory classes of
//! tangent spaces at fixed points) and their evaluation under the
//! multiplicative class θ(x) = (1 − y·x⁻¹)/(1 − x⁻¹).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::coefficients::{Coefficient, Rational, Specialization, YPoly};
use crate::error::{Error, Result};
use crate::partitions::{arm_leg, BlowupFixedPoint, LatticeVector, Partition, PartitionTuple};

/// The monomial t₁^{t1} t₂^{t2} · e_b/e_a.
///
/// `frame` is `Some((b, a))` with 1-based indices and `b != a`; a ratio
/// e_a/e_a is stored as `None`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Weight {
    pub frame: Option<(usize, usize)>,
    pub t1: i64,
    pub t2: i64,
}

impl Weight {
    pub fn new(t1: i64, t2: i64, b: usize, a: usize) -> Self {
        Self {
            frame: (a != b).then_some((b, a)),
            t1,
            t2,
        }
    }

    pub fn torus(t1: i64, t2: i64) -> Self {
        Self { frame: None, t1, t2 }
    }

    pub fn is_trivial(&self) -> bool {
        self.frame.is_none() && self.t1 == 0 && self.t2 == 0
    }

    pub fn value(&self, spec: &Specialization) -> Result<Rational> {
        spec.monomial(self.t1, self.t2, self.frame)
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frame {
            Some((b, a)) => write!(f, "e{b}/e{a} * t1^{} * t2^{}", self.t1, self.t2),
            None => write!(f, "t1^{} * t2^{}", self.t1, self.t2),
        }
    }
}

/// Integer-linear changes of variables on (t₁, t₂).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Substitution {
    Identity,
    /// (t₁, t₂) ↦ (t₁, t₂/t₁)
    T2OverT1,
    /// (t₁, t₂) ↦ (t₁/t₂, t₂)
    T1OverT2,
    /// multiply by t₁^m
    TwistT1(i64),
    /// multiply by t₂^m
    TwistT2(i64),
}

impl Substitution {
    pub fn apply(self, w: Weight) -> Weight {
        let (t1, t2) = match self {
            Substitution::Identity => (w.t1, w.t2),
            Substitution::T2OverT1 => (w.t1 - w.t2, w.t2),
            Substitution::T1OverT2 => (w.t1, w.t2 - w.t1),
            Substitution::TwistT1(m) => (w.t1 + m, w.t2),
            Substitution::TwistT2(m) => (w.t1, w.t2 + m),
        };
        Weight { t1, t2, ..w }
    }
}

/// Formal integer combination of weights. Zero multiplicities are never
/// stored; iteration order is the `Weight` order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Character {
    terms: BTreeMap<Weight, i64>,
}

impl Character {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_weight(&mut self, w: Weight, mult: i64) {
        if mult == 0 {
            return;
        }
        let entry = self.terms.entry(w).or_insert(0);
        *entry += mult;
        if *entry == 0 {
            self.terms.remove(&w);
        }
    }

    pub fn add(&mut self, other: &Character) {
        for (&w, &m) in &other.terms {
            self.add_weight(w, m);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Σ multiplicities.
    pub fn rank(&self) -> i64 {
        self.terms.values().sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Weight, i64)> + '_ {
        self.terms.iter().map(|(&w, &m)| (w, m))
    }

    pub fn multiplicity(&self, w: &Weight) -> i64 {
        self.terms.get(w).copied().unwrap_or(0)
    }

    pub fn contains_trivial(&self) -> bool {
        self.terms.keys().any(Weight::is_trivial)
    }

    pub fn substitute(&self, sub: Substitution) -> Character {
        let mut out = Character::new();
        for (&w, &m) in &self.terms {
            out.add_weight(sub.apply(w), m);
        }
        out
    }

    /// Replaces one occurrence of `from` by `to` (mutation testing).
    pub fn replace_one(&mut self, from: Weight, to: Weight) -> bool {
        if self.multiplicity(&from) <= 0 {
            return false;
        }
        self.add_weight(from, -1);
        self.add_weight(to, 1);
        true
    }
}

impl FromIterator<(Weight, i64)> for Character {
    fn from_iter<I: IntoIterator<Item = (Weight, i64)>>(iter: I) -> Self {
        let mut c = Character::new();
        for (w, m) in iter {
            c.add_weight(w, m);
        }
        c
    }
}

/// Debug dump: one `mult * [e_b/e_a *] t1^i * t2^j` per weight, sorted,
/// joined by `" + "`; the empty character prints as `0`.
impl fmt::Display for Character {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            return write!(f, "0");
        }
        for (idx, (w, m)) in self.iter().enumerate() {
            if idx > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{m} * {w}")?;
        }
        Ok(())
    }
}

/// N_{a,b} for diagrams `ya = Y_a`, `yb = Y_b`:
/// e_b e_a⁻¹ (Σ_{s∈Y_a} t₁^{−l_{Y_b}(s)} t₂^{a_{Y_a}(s)+1} + Σ_{s∈Y_b} t₁^{l_{Y_a}(s)+1} t₂^{−a_{Y_b}(s)}).
pub fn n_block(ya: &Partition, yb: &Partition, a: usize, b: usize) -> Character {
    let mut c = Character::new();
    for s in ya.cells() {
        let (arm, _) = arm_leg(ya, s);
        let (_, leg) = arm_leg(yb, s);
        c.add_weight(Weight::new(-leg, arm + 1, b, a), 1);
    }
    for s in yb.cells() {
        let (_, leg) = arm_leg(ya, s);
        let (arm, _) = arm_leg(yb, s);
        c.add_weight(Weight::new(leg + 1, -arm, b, a), 1);
    }
    c
}

/// L_{a,b} for the lattice vector `kvec` (1-based `a`, `b`).
pub fn l_block(kvec: &LatticeVector, a: usize, b: usize) -> Character {
    let ka = kvec.entries()[a - 1];
    let kb = kvec.entries()[b - 1];
    let mut c = Character::new();
    if ka > kb {
        let top = ka - kb - 1;
        for i in 0..=top {
            for j in 0..=(top - i) {
                c.add_weight(Weight::new(-i, -j, b, a), 1);
            }
        }
    } else if ka + 1 < kb {
        let top = kb - ka - 2;
        for i in 0..=top {
            for j in 0..=(top - i) {
                c.add_weight(Weight::new(i + 1, j + 1, b, a), 1);
            }
        }
    }
    c
}

fn check_rank(c: &Character, expected: i64, context: impl FnOnce() -> String) -> Result<()> {
    let actual = c.rank();
    if actual != expected {
        return Err(Error::DimensionMismatch {
            context: context(),
            expected,
            actual,
        });
    }
    Ok(())
}

/// Tangent character at the P2 fixed point `fp`: Σ_{a,b} N_{a,b}.
pub fn tangent_p2(fp: &PartitionTuple) -> Result<Character> {
    let ys = fp.entries();
    let mut c = Character::new();
    for (a, ya) in ys.iter().enumerate() {
        for (b, yb) in ys.iter().enumerate() {
            c.add(&n_block(ya, yb, a + 1, b + 1));
        }
    }
    let expected = 2 * fp.rank() as i64 * fp.size() as i64;
    check_rank(&c, expected, || format!("P2 fixed point {fp}"))?;
    if c.contains_trivial() {
        return Err(Error::TrivialWeight(format!("P2 fixed point {fp}")));
    }
    Ok(c)
}

/// Tangent character at a blow-up fixed point:
/// Σ_{a,b} L_{a,b} + t₁^{k_b−k_a} N^Y_{a,b}(t₁, t₂/t₁) + t₂^{k_b−k_a} N^Z_{a,b}(t₁/t₂, t₂).
pub fn tangent_blowup(fp: &BlowupFixedPoint) -> Result<Character> {
    let r = fp.rank();
    let ks = fp.kvec.entries();
    let ys = fp.y_tuple.entries();
    let zs = fp.z_tuple.entries();
    if ys.len() != r || zs.len() != r {
        return Err(Error::InvalidArgument(format!(
            "fixed point {fp} has tuples of unequal rank"
        )));
    }
    let mut c = Character::new();
    for a in 1..=r {
        for b in 1..=r {
            let shift = ks[b - 1] - ks[a - 1];
            c.add(&l_block(&fp.kvec, a, b));
            c.add(
                &n_block(&ys[a - 1], &ys[b - 1], a, b)
                    .substitute(Substitution::T2OverT1)
                    .substitute(Substitution::TwistT1(shift)),
            );
            c.add(
                &n_block(&zs[a - 1], &zs[b - 1], a, b)
                    .substitute(Substitution::T1OverT2)
                    .substitute(Substitution::TwistT2(shift)),
            );
        }
    }
    let expected = 2 * r as i64 * fp.diagram_weight() as i64 + fp.kvec.pair_form();
    check_rank(&c, expected, || format!("blow-up fixed point {fp}"))?;
    if c.contains_trivial() {
        return Err(Error::TrivialWeight(format!("blow-up fixed point {fp}")));
    }
    Ok(c)
}

/// θ(x) = (x − y)/(x − 1) for a rational x ≠ 1.
pub fn theta<C: Coefficient>(x: &Rational, y: &C) -> Option<C> {
    let denom = (x - &Rational::one()).recip().ok()?;
    Some(C::from_rational(&(x * &denom)) - &(y.clone() * &C::from_rational(&denom)))
}

fn theta_power<C: Coefficient>(w: Weight, x: &Rational, mult: i64, y: &C, spec: &Specialization) -> Result<C> {
    let degenerate = || Error::DegenerateSpecialization {
        seed: spec.seed,
        weight: w.to_string(),
        value: x.to_string(),
    };
    let f = theta(x, y).ok_or_else(degenerate)?;
    let f = if mult < 0 {
        f.inverse().ok_or_else(degenerate)?
    } else {
        f
    };
    Ok(f.pow(mult.unsigned_abs() as u32))
}

/// Product of θ(p/q)^m for m > 0, kept as ∏(p − q·y)^m over ∏(p − q)^m with
/// integer coefficients until the end.
struct LinearProduct {
    num: Vec<BigInt>,
    den: BigInt,
}

impl LinearProduct {
    fn new() -> Self {
        Self {
            num: vec![BigInt::one()],
            den: BigInt::one(),
        }
    }

    fn push(&mut self, w: Weight, x: &Rational, mult: i64, spec: &Specialization) -> Result<()> {
        let (p, q) = (x.numer(), x.denom());
        if p == q {
            return Err(Error::DegenerateSpecialization {
                seed: spec.seed,
                weight: w.to_string(),
                value: x.to_string(),
            });
        }
        let shift = p - q;
        for _ in 0..mult {
            self.den *= &shift;
            let mut next = vec![BigInt::zero(); self.num.len() + 1];
            for (i, c) in self.num.iter().enumerate() {
                next[i] += c * p;
                next[i + 1] -= c * q;
            }
            self.num = next;
        }
        Ok(())
    }

    fn shift_y(&mut self, mult: i64) {
        let mut next = vec![BigInt::zero(); mult as usize];
        next.append(&mut self.num);
        self.num = next;
    }

    fn finish<C: Coefficient>(self, y: &C) -> C {
        let den = self.den;
        let poly = YPoly::new(
            self.num
                .into_iter()
                .map(|c| Rational::new(c, den.clone()).expect("nonzero denominator"))
                .collect(),
        );
        C::from_ypoly(&poly, y)
    }
}

/// ∏_w θ(w)^{mult(w)} at the specialization, y taken from `spec.y_mode`.
pub fn theta_eval<C: Coefficient>(c: &Character, spec: &Specialization) -> Result<C> {
    let y = C::y_value(&spec.y_mode)?;
    let mut linear = LinearProduct::new();
    let mut rest = C::one();
    for (w, m) in c.iter() {
        if w.is_trivial() {
            return Err(Error::TrivialWeight(w.to_string()));
        }
        let x = w.value(spec)?;
        if m > 0 {
            linear.push(w, &x, m, spec)?;
        } else {
            rest = rest * &theta_power(w, &x, m, &y, spec)?;
        }
    }
    Ok(linear.finish(&y) * &rest)
}

/// Like [`theta_eval`] after the ordered limit e₁ → 0, then e₂ → 0, …:
/// a weight e_b/e_a·T contributes 1 if a < b, y if a > b, and θ(T) when
/// the frame part is trivial.
pub fn theta_limit_factor<C: Coefficient>(c: &Character, spec: &Specialization) -> Result<C> {
    let y = C::y_value(&spec.y_mode)?;
    let mut linear = LinearProduct::new();
    let mut rest = C::one();
    for (w, m) in c.iter() {
        match w.frame {
            Some((b, a)) if a < b => {}
            Some(_) if m >= 0 => linear.shift_y(m),
            Some(_) => {
                rest = rest
                    * &y.inverse()
                        .ok_or_else(|| Error::DivisionByZero("y^-1 in limit factor".into()))?
                        .pow(m.unsigned_abs() as u32);
            }
            None => {
                if w.is_trivial() {
                    return Err(Error::TrivialWeight(w.to_string()));
                }
                let x = spec.monomial(w.t1, w.t2, None)?;
                if m > 0 {
                    linear.push(w, &x, m, spec)?;
                } else {
                    rest = rest * &theta_power(w, &x, m, &y, spec)?;
                }
            }
        }
    }
    Ok(linear.finish(&y) * &rest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{sample_specialization, YMode, YPoly, YRat};
    use crate::partitions::{enumerate_blowup_fixed_points, enumerate_tuples};

    fn p(parts: &[usize]) -> Partition {
        Partition::new(parts.to_vec()).unwrap()
    }

    fn chars(terms: &[(i64, i64)]) -> Character {
        terms.iter().map(|&(i, j)| (Weight::torus(i, j), 1)).collect()
    }

    fn spec23() -> Specialization {
        Specialization::new(
            Rational::from(2),
            Rational::from(3),
            vec![Rational::from(5), Rational::from(7)],
            YMode::Symbolic,
            0,
        )
        .unwrap()
    }

    #[test]
    fn n_block_examples() {
        assert_eq!(n_block(&p(&[1]), &p(&[1]), 1, 1), chars(&[(1, 0), (0, 1)]));
        assert!(n_block(&Partition::empty(), &Partition::empty(), 1, 1).is_empty());
        assert_eq!(
            n_block(&p(&[2]), &p(&[2]), 1, 1),
            chars(&[(0, 2), (0, 1), (1, -1), (1, 0)])
        );
    }

    #[test]
    fn l_block_examples() {
        let lv = |v: &[i64]| LatticeVector(v.to_vec());
        assert!(l_block(&lv(&[0, 0]), 1, 2).is_empty());
        let one = l_block(&lv(&[1, 0]), 1, 2);
        assert_eq!(one.iter().collect::<Vec<_>>(), vec![(Weight::new(0, 0, 2, 1), 1)]);
        let two = l_block(&lv(&[0, 2]), 1, 2);
        assert_eq!(two.iter().collect::<Vec<_>>(), vec![(Weight::new(1, 1, 2, 1), 1)]);
        // k_b − k_a = 1 falls in the "otherwise" branch
        assert!(l_block(&lv(&[0, 1]), 1, 2).is_empty());
    }

    #[test]
    fn l_block_rank_is_triangular() {
        for d in -6i64..=6 {
            let c = l_block(&LatticeVector(vec![d, 0]), 1, 2);
            assert_eq!(c.rank(), d * (d + 1) / 2, "d = {d}");
        }
    }

    #[test]
    fn substitution_examples() {
        let c = chars(&[(1, 0), (0, 1)]);
        assert_eq!(c.substitute(Substitution::T2OverT1), chars(&[(1, 0), (-1, 1)]));
        assert!(Character::new().substitute(Substitution::T1OverT2).is_empty());
        assert_eq!(chars(&[(1, -1)]).substitute(Substitution::TwistT2(2)), chars(&[(1, 1)]));
    }

    #[test]
    fn tangent_examples() {
        let single = PartitionTuple(vec![p(&[1])]);
        assert_eq!(tangent_p2(&single).unwrap(), chars(&[(1, 0), (0, 1)]));
        assert!(tangent_p2(&PartitionTuple::empty(1)).unwrap().is_empty());
        assert_eq!(tangent_p2(&PartitionTuple(vec![p(&[2])])).unwrap().rank(), 4);

        let fps = enumerate_blowup_fixed_points(1, 0, 1).unwrap();
        assert_eq!(tangent_blowup(&fps[0]).unwrap(), chars(&[(1, 0), (-1, 1)]));
        let empty = &enumerate_blowup_fixed_points(1, 0, 0).unwrap()[0];
        assert!(tangent_blowup(empty).unwrap().is_empty());

        for fp in enumerate_blowup_fixed_points(2, 1, 0).unwrap() {
            let t = tangent_blowup(&fp).unwrap();
            assert_eq!(t.rank(), 1);
            assert!(t.iter().all(|(w, _)| w.frame.is_some()));
        }
    }

    #[test]
    fn dimension_and_isolation_small_ranks() {
        for r in 1..=3 {
            for n in 0..=3 {
                for fp in enumerate_tuples(r, n) {
                    tangent_p2(&fp).unwrap();
                }
                for k in 0..r as i64 {
                    for fp in enumerate_blowup_fixed_points(r, k, n as i64).unwrap() {
                        tangent_blowup(&fp).unwrap();
                    }
                }
            }
        }
    }

    #[test]
    fn theta_eval_examples() {
        let spec = spec23();
        let v: YRat = theta_eval(&chars(&[(1, 0), (0, 1)]), &spec).unwrap();
        // (2−y)(3−y)/2 = 3 − 5/2 y + 1/2 y²
        assert_eq!(v.as_poly().unwrap(), &"3 + -5/2*y + 1/2*y^2".parse::<YPoly>().unwrap());
        let one: YRat = theta_eval(&Character::new(), &spec).unwrap();
        assert_eq!(one, YRat::one());
        let trivial = chars(&[(0, 0)]);
        assert!(matches!(
            theta_eval::<YRat>(&trivial, &spec),
            Err(Error::TrivialWeight(_))
        ));
    }

    #[test]
    fn theta_eval_flags_degenerate_weight() {
        // t1·t2 = 1
        let spec = Specialization::new(
            Rational::new(2, 3).unwrap(),
            Rational::new(3, 2).unwrap(),
            vec![],
            YMode::Symbolic,
            9,
        )
        .unwrap();
        let err = theta_eval::<YRat>(&chars(&[(1, 1)]), &spec).unwrap_err();
        assert!(matches!(err, Error::DegenerateSpecialization { seed: 9, .. }));
    }

    #[test]
    fn limit_factor_case_table() {
        let spec = spec23();
        let up: Character = [(Weight::new(1, 0, 2, 1), 1)].into_iter().collect();
        assert_eq!(theta_limit_factor::<YRat>(&up, &spec).unwrap(), YRat::one());
        let down: Character = [(Weight::new(1, 0, 1, 2), 1)].into_iter().collect();
        assert_eq!(theta_limit_factor::<YRat>(&down, &spec).unwrap(), YRat::y());
        let diag = chars(&[(1, -1)]);
        assert_eq!(
            theta_limit_factor::<YRat>(&diag, &spec).unwrap().as_poly().unwrap(),
            &"-2 + 3*y".parse::<YPoly>().unwrap()
        );
    }

    #[test]
    fn multiplicative_over_sums() {
        let spec = sample_specialization(2, 5, YMode::Symbolic);
        let tuples = enumerate_tuples(2, 2);
        let c1 = tangent_p2(&tuples[0]).unwrap();
        let c2 = tangent_p2(&tuples[3]).unwrap();
        let mut sum = c1.clone();
        sum.add(&c2);
        let lhs: YRat = theta_eval(&sum, &spec).unwrap();
        let rhs = theta_eval::<YRat>(&c1, &spec).unwrap() * theta_eval::<YRat>(&c2, &spec).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn theta_at_y_one_is_one() {
        let spec = sample_specialization(3, 11, YMode::Numeric(Rational::one()));
        for fp in enumerate_tuples(3, 2) {
            let v: Rational = theta_eval(&tangent_p2(&fp).unwrap(), &spec).unwrap();
            assert_eq!(v, Rational::one());
        }
    }

    #[test]
    fn limit_factor_matches_rank_one_factorization() {
        // lim Θ(T|_Y) = Π_a y^{(r−1)|Y_a|} · W-factor(Y_a)
        let spec = sample_specialization(3, 3, YMode::Symbolic);
        for fp in enumerate_tuples(3, 3) {
            let lim: YRat = theta_limit_factor(&tangent_p2(&fp).unwrap(), &spec).unwrap();
            let mut expected = YRat::one();
            for ya in fp.entries() {
                let rank_one = tangent_p2(&PartitionTuple(vec![ya.clone()])).unwrap();
                expected =
                    expected * theta_eval::<YRat>(&rank_one, &spec).unwrap() * YRat::y().pow(2 * ya.size() as u32);
            }
            assert_eq!(lim, expected, "{fp}");
        }
    }

    #[test]
    fn display_dump() {
        let c: Character = [(Weight::new(1, -2, 2, 1), 2), (Weight::torus(0, 1), 1)]
            .into_iter()
            .collect();
        assert_eq!(c.to_string(), "1 * t1^0 * t2^1 + 2 * e2/e1 * t1^1 * t2^-2");
    }
}
