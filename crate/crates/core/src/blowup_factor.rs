//! Closed forms of the universal blow-up factor 𝖸_k(q, y).
//!
//! Three presentations are built independently: the lattice sum over
//! k₁+…+k_r = k, the shifted-lattice (eta quotient) form with the
//! upper-triangular matrix A, and the y = 1 (Euler characteristic) form.
//! Half-integer exponents never appear: every monomial's exponents are
//! assembled in combined integer form and checked before use.

use serde::{Deserialize, Serialize};

use crate::coefficients::{Coefficient, Rational, YPoly};
use crate::error::{Error, Result};
use crate::partitions::{check_k_range, enumerate_lattice_vectors};
use crate::qseries::{euler_product, QSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct YkRequest {
    pub rank: usize,
    pub k: i64,
    /// Series known through q^order.
    pub order: i64,
}

impl YkRequest {
    pub fn new(rank: usize, k: i64, order: i64) -> Self {
        Self { rank, k, order }
    }

    fn validate(&self) -> Result<()> {
        check_k_range(self.rank, self.k)?;
        if self.order < 0 {
            return Err(Error::InvalidArgument(format!("order {} < 0", self.order)));
        }
        Ok(())
    }
}

/// Sign of the linear y-exponent in the lattice sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum YSign {
    /// y^{Σ_{i<j}(k_i−k_j)/2}
    Forward,
    /// y^{Σ_{i<j}(k_j−k_i)/2}
    Reversed,
}

impl YSign {
    pub fn describe(self) -> &'static str {
        match self {
            YSign::Forward => "y^(sum_{i<j}(k_i-k_j)/2)",
            YSign::Reversed => "y^(sum_{i<j}(k_j-k_i)/2)",
        }
    }
}

fn check_lattice_congruence(rank: usize, k: i64, pair_form: i64) -> Result<()> {
    let r = rank as i64;
    if (pair_form - k * (r - k)).rem_euclid(2 * r) != 0 {
        return Err(Error::IntegralityViolation(format!(
            "pair form {pair_form} not ≡ k(r−k) = {} mod {}",
            k * (r - k),
            2 * r
        )));
    }
    Ok(())
}

/// 𝖸_k = ∏_{n>0}(1−(q²y)^{rn})^{−r} · Σ_{Σk_i=k} (q²y)^{Σ(k_i−k_j)²/2} y^{Σ(k_i−k_j)/2}.
pub fn yk_main(req: YkRequest) -> Result<QSeries<YPoly>> {
    yk_main_with_sign(req, YSign::Forward)
}

pub fn yk_main_with_sign(req: YkRequest, sign: YSign) -> Result<QSeries<YPoly>> {
    req.validate()?;
    let r = req.rank as i64;
    let mut terms = Vec::new();
    for kvec in enumerate_lattice_vectors(req.rank, req.k, req.order) {
        let q_exp = kvec.pair_form();
        check_lattice_congruence(req.rank, req.k, q_exp)?;
        let linear = match sign {
            YSign::Forward => kvec.pair_sum(),
            YSign::Reversed => -kvec.pair_sum(),
        };
        // (q²y)^{Q/2} y^{L/2} = q^Q y^{(Q+L)/2}
        let twice_y = q_exp + linear;
        if twice_y.rem_euclid(2) != 0 || twice_y < 0 {
            return Err(Error::IntegralityViolation(format!(
                "lattice vector ({kvec}) gives y-exponent {twice_y}/2"
            )));
        }
        terms.push((q_exp, YPoly::monomial(Rational::one(), (twice_y / 2) as usize)));
    }
    let lattice = QSeries::from_terms(0, req.order + 1, terms)?;
    let product = euler_product(2 * r, req.rank as u32, -r, req.order + 1, &YPoly::y())?;
    Ok(product.mul(&lattice))
}

/// Exact value of vᵗAv and vᵗAI for A upper triangular with unit entries.
fn quadratic_and_linear(v: &[Rational]) -> (Rational, Rational) {
    let mut quad = Rational::zero();
    let mut lin = Rational::zero();
    for i in 0..v.len() {
        for j in i..v.len() {
            quad = &quad + &(&v[i] * &v[j]);
            lin = &lin + &v[i];
        }
    }
    (quad, lin)
}

fn as_exponent(value: Rational, what: impl FnOnce() -> String) -> Result<i64> {
    value
        .to_i64()
        .ok_or_else(|| Error::IntegralityViolation(format!("{} = {value}", what())))
}

/// 𝖸_k as x^{r/24}η(x)^{−r} Σ_{v∈ℤ^{r−1}+(k/r)I} x^{vᵗAv} y^{vᵗAI} with
/// x = q^{2r}y^r, i.e. ∏(1−x^n)^{−r} times the shifted lattice sum.
pub fn yk_gottsche(req: YkRequest) -> Result<QSeries<YPoly>> {
    req.validate()?;
    let r = req.rank as i64;
    let dim = req.rank - 1;
    let shift = Rational::new(req.k, r)?;
    // vᵗAv = ½(|v|² + (Σv)²) ≥ ½|v|², so 2r·vᵗAv ≤ order bounds |v_i|² by order/r.
    let radius = {
        let mut s = 0i64;
        while (s + 1) * (s + 1) * r <= req.order {
            s += 1;
        }
        s + 1
    };

    let mut terms = Vec::new();
    let mut u = vec![-radius; dim];
    loop {
        let v: Vec<Rational> = u.iter().map(|&ui| &Rational::from(ui) + &shift).collect();
        let (quad, lin) = quadratic_and_linear(&v);
        let q_exp = as_exponent(&Rational::from(2 * r) * &quad, || {
            format!("q-exponent 2r·vᵗAv at v = {u:?} + k/r")
        })?;
        if q_exp <= req.order {
            let y_exp = as_exponent(&(&Rational::from(r) * &quad) + &lin, || {
                format!("y-exponent r·vᵗAv + vᵗAI at v = {u:?} + k/r")
            })?;
            if y_exp < 0 {
                return Err(Error::IntegralityViolation(format!(
                    "negative y-exponent {y_exp} at v = {u:?} + k/r"
                )));
            }
            terms.push((q_exp, YPoly::monomial(Rational::one(), y_exp as usize)));
        }
        // odometer over [−radius, radius]^{r−1}
        let Some(pos) = u.iter().rposition(|&ui| ui < radius) else {
            break;
        };
        u[pos] += 1;
        for ui in &mut u[pos + 1..] {
            *ui = -radius;
        }
    }
    let lattice = QSeries::from_terms(0, req.order + 1, terms)?;
    let product = euler_product(2 * r, req.rank as u32, -r, req.order + 1, &YPoly::y())?;
    Ok(product.mul(&lattice))
}

/// ∏(1−q^{2rn})^{−r} · Σ_{Σk_i=k} q^{Σ_{i<j}(k_i−k_j)²}.
pub fn yk_euler(req: YkRequest) -> Result<QSeries<Rational>> {
    req.validate()?;
    let r = req.rank as i64;
    let terms = enumerate_lattice_vectors(req.rank, req.k, req.order)
        .into_iter()
        .map(|kvec| (kvec.pair_form(), Rational::one()));
    let lattice = QSeries::from_terms(0, req.order + 1, terms)?;
    let product = euler_product(2 * r, 0, -r, req.order + 1, &Rational::one())?;
    Ok(product.mul(&lattice))
}

/// The holomorphic Euler characteristic branch: the closed value stated for
/// it (1 for k = 0, 0 otherwise) next to 𝖸_k evaluated at y = 0.
#[derive(Clone, Debug, PartialEq)]
pub struct HolValue {
    pub stated: Rational,
    pub computed: QSeries<Rational>,
}

impl HolValue {
    /// True when the computed series is the constant `stated`.
    pub fn agrees(&self) -> bool {
        let constant = QSeries::monomial(self.stated.clone(), 0, self.computed.order());
        self.computed == constant
    }
}

pub fn yk_hol(req: YkRequest) -> Result<HolValue> {
    let main = yk_main(req)?;
    let stated = if req.k == 0 { Rational::one() } else { Rational::zero() };
    Ok(HolValue {
        stated,
        computed: main.map(|p| p.eval(&Rational::zero())),
    })
}

/// 𝖸_k as a series over `C`, substituting the given y.
pub fn yk_in<C: Coefficient>(series: &QSeries<YPoly>, y: &C) -> QSeries<C> {
    series.map(|p| C::from_ypoly(p, y))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(s: &str) -> YPoly {
        s.parse().unwrap()
    }

    #[test]
    fn rank_one_is_partition_product() {
        let y1 = yk_main(YkRequest::new(1, 0, 4)).unwrap();
        assert_eq!(y1.coeff(0).unwrap(), YPoly::one());
        assert_eq!(y1.coeff(2).unwrap(), YPoly::y());
        assert_eq!(y1.coeff(4).unwrap(), poly("2*y^2"));
        assert_eq!(y1.coeff(3).unwrap(), YPoly::zero());
    }

    #[test]
    fn rank_two_low_terms() {
        assert_eq!(
            yk_main(YkRequest::new(2, 0, 3)).unwrap().coeff(0).unwrap(),
            YPoly::one()
        );
        let y21 = yk_main(YkRequest::new(2, 1, 9)).unwrap();
        assert_eq!(y21.lowest_term_text().unwrap(), "q^1: 1 + y");
    }

    #[test]
    fn gottsche_matches_main() {
        for rank in 1..=3usize {
            for k in 0..rank as i64 {
                let order = 8 * rank as i64;
                let a = yk_main(YkRequest::new(rank, k, order)).unwrap();
                let b = yk_gottsche(YkRequest::new(rank, k, order)).unwrap();
                assert_eq!(a, b, "r={rank} k={k}");
            }
        }
    }

    #[test]
    fn signs_agree() {
        for rank in 1..=4usize {
            for k in 0..rank as i64 {
                let req = YkRequest::new(rank, k, 12);
                assert_eq!(
                    yk_main_with_sign(req, YSign::Forward).unwrap(),
                    yk_main_with_sign(req, YSign::Reversed).unwrap()
                );
            }
        }
    }

    #[test]
    fn euler_examples() {
        let e10 = yk_euler(YkRequest::new(1, 0, 8)).unwrap();
        let got: Vec<String> = (0..=8).step_by(2).map(|e| e10.coeff(e).unwrap().to_string()).collect();
        assert_eq!(got, ["1", "1", "2", "3", "5"]);
        let e21 = yk_euler(YkRequest::new(2, 1, 5)).unwrap();
        assert_eq!(e21.lowest_term_text().unwrap(), "q^1: 2");
        assert_eq!(
            yk_euler(YkRequest::new(2, 0, 5)).unwrap().coeff(0).unwrap(),
            Rational::one()
        );
    }

    #[test]
    fn euler_is_main_at_y_one() {
        for rank in 1..=3usize {
            for k in 0..rank as i64 {
                let req = YkRequest::new(rank, k, 16);
                let main = yk_main(req).unwrap().map(|p| p.eval(&Rational::one()));
                assert_eq!(main, yk_euler(req).unwrap());
            }
        }
    }

    #[test]
    fn holomorphic_branch() {
        let h0 = yk_hol(YkRequest::new(2, 0, 8)).unwrap();
        assert_eq!(h0.stated, Rational::one());
        assert!(h0.agrees());
        let h1 = yk_hol(YkRequest::new(2, 1, 8)).unwrap();
        assert_eq!(h1.stated, Rational::zero());
        assert!(!h1.agrees());
        assert_eq!(h1.computed.lowest_term_text().unwrap(), "q^1: 1");
        assert_eq!(h1.computed.terms().count(), 1);
    }

    #[test]
    fn lowest_exponent_is_balanced_vector() {
        for rank in 1..=4usize {
            for k in 0..rank as i64 {
                let r = rank as i64;
                let y = yk_main(YkRequest::new(rank, k, 2 * r + k * (r - k))).unwrap();
                assert_eq!(y.valuation(), k * (r - k));
                for (e, _) in y.terms() {
                    assert_eq!((e - k * (r - k)).rem_euclid(2 * r), 0);
                }
            }
        }
    }

    #[test]
    fn rejects_k_out_of_range() {
        assert!(yk_main(YkRequest::new(2, 2, 4)).is_err());
        assert!(yk_gottsche(YkRequest::new(3, -1, 4)).is_err());
    }
}
