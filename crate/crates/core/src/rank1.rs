//! The rank-one series W(t₁, t₂, y, q) and the blow-up identity
//! W(t₁, t₂/t₁)·W(t₁/t₂, t₂) / W(t₁, t₂) = ∏_{n≥1} (1 − (yq)^n)^{−1}.

use serde::{Deserialize, Serialize};

use crate::characters::{tangent_p2, theta_eval, Substitution};
use crate::coefficients::{Coefficient, Specialization};
use crate::error::{Error, Result};
use crate::partitions::{enumerate_partitions, PartitionTuple};
use crate::qseries::{euler_product, QSeries};

/// Argument substitution applied to (t₁, t₂) before evaluating W.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WSubstitution {
    Identity,
    /// W(t₁, t₂/t₁)
    T2OverT1,
    /// W(t₁/t₂, t₂)
    T1OverT2,
}

impl WSubstitution {
    fn as_character_map(self) -> Substitution {
        match self {
            WSubstitution::Identity => Substitution::Identity,
            WSubstitution::T2OverT1 => Substitution::T2OverT1,
            WSubstitution::T1OverT2 => Substitution::T1OverT2,
        }
    }
}

#[derive(Clone, Debug)]
pub struct WRequest {
    pub spec: Specialization,
    pub substitution: WSubstitution,
    /// Largest |Y| included; the series is known through q^order.
    pub order: i64,
}

/// W = Σ_Y ∏_{s∈Y} θ(t₁^{−l(s)} t₂^{a(s)+1}) θ(t₁^{l(s)+1} t₂^{−a(s)}) q^{|Y|}.
pub fn w_series<C: Coefficient>(req: &WRequest) -> Result<QSeries<C>> {
    if req.order < 0 {
        return Err(Error::InvalidArgument(format!("order {} < 0", req.order)));
    }
    let sub = req.substitution.as_character_map();
    let mut terms = Vec::new();
    for n in 0..=req.order {
        let mut total = C::zero();
        for y in enumerate_partitions(n as usize) {
            let diagram = y.to_string();
            let tangent = tangent_p2(&PartitionTuple(vec![y]))?.substitute(sub);
            let value: C = theta_eval(&tangent, &req.spec).map_err(|e| match e {
                Error::DegenerateSpecialization { seed, weight, value } => Error::DegenerateSpecialization {
                    seed,
                    weight: format!("{weight} (hook of diagram {diagram})"),
                    value,
                },
                other => other,
            })?;
            total = total + &value;
        }
        terms.push((n, total));
    }
    QSeries::from_terms(0, req.order + 1, terms)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientCheck {
    pub exponent: i64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NekrasovOkounkovCheck {
    pub seed: u64,
    pub order: i64,
    pub pass: bool,
    pub first_failure: Option<i64>,
    pub coefficients: Vec<CoefficientCheck>,
}

/// Left side W(t₁,t₂/t₁)·W(t₁/t₂,t₂)·W(t₁,t₂)⁻¹ through q^order.
pub fn nekrasov_okounkov_quotient<C: Coefficient>(spec: &Specialization, order: i64) -> Result<QSeries<C>> {
    let w = |substitution| {
        w_series::<C>(&WRequest {
            spec: spec.clone(),
            substitution,
            order,
        })
    };
    let up = w(WSubstitution::T2OverT1)?;
    let right = w(WSubstitution::T1OverT2)?;
    let base = w(WSubstitution::Identity)?;
    Ok(up.mul(&right).mul(&base.invert()?))
}

/// Compares the quotient with ∏(1 − (yq)^n)^{−1} coefficient by coefficient.
/// `perturb` adds q¹ to the left side (negative control).
pub fn verify_nekrasov_okounkov<C: Coefficient>(
    spec: &Specialization,
    order: i64,
    perturb: bool,
) -> Result<NekrasovOkounkovCheck> {
    let y = C::y_value(&spec.y_mode)?;
    let mut lhs = nekrasov_okounkov_quotient::<C>(spec, order)?;
    if perturb {
        lhs = lhs.add(&QSeries::monomial(C::one(), 1, lhs.order()));
    }
    let rhs = euler_product(1, 1, -1, order + 1, &y)?;
    let coefficients = (0..=order)
        .map(|e| {
            Ok(CoefficientCheck {
                exponent: e,
                pass: lhs.coeff(e)? == rhs.coeff(e)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first_failure = coefficients.iter().find(|c| !c.pass).map(|c| c.exponent);
    Ok(NekrasovOkounkovCheck {
        seed: spec.seed,
        order,
        pass: first_failure.is_none(),
        first_failure,
        coefficients,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coefficients::{sample_specialization, Rational, YMode, YRat};

    fn spec_23() -> Specialization {
        Specialization::new(
            Rational::from(2),
            Rational::from(3),
            vec![Rational::from(5)],
            YMode::Symbolic,
            0,
        )
        .unwrap()
    }

    #[test]
    fn w_low_coefficients() {
        let w: QSeries<YRat> = w_series(&WRequest {
            spec: spec_23(),
            substitution: WSubstitution::Identity,
            order: 2,
        })
        .unwrap();
        assert_eq!(w.coeff(0).unwrap(), YRat::one());
        assert_eq!(w.coeff(1).unwrap().to_string(), "3 + -5/2*y + 1/2*y^2");
    }

    #[test]
    fn w_at_y_one_counts_partitions() {
        let spec = spec_23().with_y_mode(YMode::Numeric(Rational::one()));
        let w: QSeries<Rational> = w_series(&WRequest {
            spec,
            substitution: WSubstitution::T1OverT2,
            order: 8,
        })
        .unwrap();
        let got: Vec<String> = w.coeffs().iter().map(ToString::to_string).collect();
        assert_eq!(got, ["1", "1", "2", "3", "5", "7", "11", "15", "22"]);
    }

    #[test]
    fn w_at_y_zero_is_finite() {
        let spec = sample_specialization(1, 8, YMode::Numeric(Rational::zero()));
        for substitution in [
            WSubstitution::Identity,
            WSubstitution::T2OverT1,
            WSubstitution::T1OverT2,
        ] {
            let w: QSeries<Rational> = w_series(&WRequest {
                spec: spec.clone(),
                substitution,
                order: 5,
            })
            .unwrap();
            assert!(w.coeffs().iter().all(|c| !c.is_zero()));
        }
    }

    #[test]
    fn identity_holds_small_order() {
        let spec = sample_specialization(1, 1, YMode::Symbolic);
        assert!(verify_nekrasov_okounkov::<YRat>(&spec, 0, false).unwrap().pass);
        let check = verify_nekrasov_okounkov::<YRat>(&spec, 5, false).unwrap();
        assert!(check.pass, "{check:?}");
    }

    #[test]
    fn perturbed_left_side_fails_at_q1() {
        let spec = sample_specialization(1, 1, YMode::Symbolic);
        let check = verify_nekrasov_okounkov::<YRat>(&spec, 4, true).unwrap();
        assert!(!check.pass);
        assert_eq!(check.first_failure, Some(1));
    }

    #[test]
    fn quotient_is_independent_of_torus() {
        let a: QSeries<YRat> = nekrasov_okounkov_quotient(&sample_specialization(1, 30, YMode::Symbolic), 4).unwrap();
        let b: QSeries<YRat> = nekrasov_okounkov_quotient(&sample_specialization(1, 31, YMode::Symbolic), 4).unwrap();
        assert_eq!(a, b);
    }
}
