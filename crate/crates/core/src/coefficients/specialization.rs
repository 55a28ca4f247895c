use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Rational;
use crate::error::{Error, Result};

/// Generator used by [`sample_specialization`]; fixed permanently.
pub const PRNG_NAME: &str = "chacha8/rand0.8/seed_from_u64";

/// Inclusive range for sampled numerators and denominators.
const DRAW_MIN: i64 = 2;
const DRAW_MAX: i64 = 97;

/// How y is treated in a run.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub enum YMode {
    #[default]
    Symbolic,
    Numeric(Rational),
}

impl fmt::Display for YMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            YMode::Symbolic => write!(f, "symbolic"),
            YMode::Numeric(y0) => write!(f, "{y0}"),
        }
    }
}

impl FromStr for YMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "symbolic" | "y" => Ok(YMode::Symbolic),
            other => Ok(YMode::Numeric(other.parse()?)),
        }
    }
}

impl Serialize for YMode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for YMode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Rational values for the torus characters t₁, t₂, e₁…e_r.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Specialization {
    pub t1: Rational,
    pub t2: Rational,
    pub e: Vec<Rational>,
    pub y_mode: YMode,
    pub seed: u64,
}

impl Specialization {
    /// Builds a specialization from explicit values, checking the invariants
    /// (all values nonzero, distinct from 1 and pairwise distinct).
    pub fn new(t1: Rational, t2: Rational, e: Vec<Rational>, y_mode: YMode, seed: u64) -> Result<Self> {
        let spec = Self {
            t1,
            t2,
            e,
            y_mode,
            seed,
        };
        let values: Vec<&Rational> = spec.values().collect();
        for (idx, v) in values.iter().enumerate() {
            if v.is_zero() || v.is_one() {
                return Err(Error::InvalidArgument(format!(
                    "specialized value {v} must differ from 0 and 1"
                )));
            }
            if values[..idx].contains(v) {
                return Err(Error::InvalidArgument(format!("specialized value {v} repeated")));
            }
        }
        Ok(spec)
    }

    pub fn rank(&self) -> usize {
        self.e.len()
    }

    fn values(&self) -> impl Iterator<Item = &Rational> {
        [&self.t1, &self.t2].into_iter().chain(self.e.iter())
    }

    pub fn with_y_mode(mut self, y_mode: YMode) -> Self {
        self.y_mode = y_mode;
        self
    }

    /// Value of t₁^{i₁} t₂^{i₂} · e_b / e_a, with `frame = Some((b, a))`
    /// using 1-based indices.
    pub fn monomial(&self, i1: i64, i2: i64, frame: Option<(usize, usize)>) -> Result<Rational> {
        let mut v = &self.t1.pow(i1)? * &self.t2.pow(i2)?;
        if let Some((b, a)) = frame {
            let get = |idx: usize| {
                self.e
                    .get(idx.wrapping_sub(1))
                    .ok_or_else(|| Error::InvalidArgument(format!("frame index {idx} outside 1..={}", self.e.len())))
            };
            v = &(&v * get(b)?) / get(a)?;
        }
        Ok(v)
    }
}

/// Deterministic specialization for `(rank, seed)`.
///
/// Every value is p/q with p, q drawn uniformly from [2, 97] by ChaCha8
/// seeded with `seed`; a draw equal to 1 or to an earlier value is redrawn.
pub fn sample_specialization(rank: usize, seed: u64, y_mode: YMode) -> Specialization {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut drawn: Vec<Rational> = Vec::with_capacity(rank + 2);
    while drawn.len() < rank + 2 {
        let p = rng.gen_range(DRAW_MIN..=DRAW_MAX);
        let q = rng.gen_range(DRAW_MIN..=DRAW_MAX);
        let v = Rational::new(p, q).expect("positive denominator");
        if v.is_one() || drawn.contains(&v) {
            continue;
        }
        drawn.push(v);
    }
    let e = drawn.split_off(2);
    let t2 = drawn.pop().expect("two drawn");
    let t1 = drawn.pop().expect("two drawn");
    Specialization {
        t1,
        t2,
        e,
        y_mode,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic() {
        let a = sample_specialization(3, 42, YMode::Symbolic);
        let b = sample_specialization(3, 42, YMode::Symbolic);
        assert_eq!(a, b);
        assert_eq!(a.seed, 42);
        assert_ne!(a, sample_specialization(3, 43, YMode::Symbolic));
    }

    #[test]
    fn invariants_hold_over_many_seeds() {
        for seed in 0..200 {
            let s = sample_specialization(2, seed, YMode::Symbolic);
            assert_ne!(s.t1, s.t2);
            assert!(!s.t1.is_one() && !s.t2.is_one());
            // re-validate through the checked constructor
            Specialization::new(s.t1, s.t2, s.e, s.y_mode, s.seed).unwrap();
        }
    }

    #[test]
    fn monomial_values() {
        let s = Specialization::new(
            Rational::from(2),
            Rational::from(3),
            vec![Rational::from(5), Rational::from(7)],
            YMode::Symbolic,
            0,
        )
        .unwrap();
        assert_eq!(s.monomial(1, -1, None).unwrap(), Rational::new(2, 3).unwrap());
        assert_eq!(s.monomial(0, 1, Some((2, 1))).unwrap(), Rational::new(21, 5).unwrap());
        assert!(s.monomial(0, 0, Some((3, 1))).is_err());
    }

    #[test]
    fn checked_constructor_rejects_collisions() {
        let two = Rational::from(2);
        assert!(Specialization::new(two.clone(), two, vec![], YMode::Symbolic, 0).is_err());
        assert!(Specialization::new(Rational::one(), Rational::from(3), vec![], YMode::Symbolic, 0).is_err());
    }

    #[test]
    fn y_mode_text() {
        assert_eq!("symbolic".parse::<YMode>().unwrap(), YMode::Symbolic);
        assert_eq!(
            "1/2".parse::<YMode>().unwrap(),
            YMode::Numeric(Rational::new(1, 2).unwrap())
        );
    }
}
