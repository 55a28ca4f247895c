//! Localization sums: the generating series Z (framed sheaves on P2) and Ẑ
//! (framed sheaves on the blow-up), in fully equivariant mode or after the
//! ordered limit e₁ → 0, …, e_r → 0.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cache::Enumerator;
use crate::characters::{tangent_blowup, tangent_p2, theta_eval, theta_limit_factor, Character, Weight};
use crate::coefficients::{Coefficient, Specialization};
use crate::error::{Error, Result};
use crate::partitions::check_k_range;
use crate::qseries::{QSeries, SeriesJson};
use crate::rank1::{w_series, WRequest, WSubstitution};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Equivariant,
    Limit,
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Equivariant => "equivariant",
            Mode::Limit => "limit",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "equivariant" => Ok(Mode::Equivariant),
            "limit" => Ok(Mode::Limit),
            other => Err(Error::Parse(format!("unknown mode {other:?}"))),
        }
    }
}

/// Shifts one weight of one blow-up tangent character by t₁. Test hook for
/// checking that the verification drivers detect a corrupted character.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TangentMutation {
    /// Instanton number of the fixed point to corrupt.
    pub n: i64,
    /// Index within the enumeration of that instanton number.
    pub index: usize,
}

#[derive(Clone, Debug)]
pub struct SeriesRequest {
    pub rank: usize,
    /// Only used for Ẑ.
    pub k: i64,
    /// Largest instanton number included.
    pub max_n: i64,
    pub spec: Specialization,
    pub mode: Mode,
    pub mutation: Option<TangentMutation>,
}

impl SeriesRequest {
    pub fn new(rank: usize, k: i64, max_n: i64, spec: Specialization, mode: Mode) -> Self {
        Self {
            rank,
            k,
            max_n,
            spec,
            mode,
            mutation: None,
        }
    }

    fn validate(&self, needs_k: bool) -> Result<()> {
        if needs_k {
            check_k_range(self.rank, self.k)?;
        } else if self.rank == 0 {
            return Err(Error::InvalidArgument("rank must be at least 1".into()));
        }
        if self.max_n < 0 {
            return Err(Error::InvalidArgument(format!("max_n = {} < 0", self.max_n)));
        }
        if self.mode == Mode::Equivariant && self.spec.rank() != self.rank {
            return Err(Error::InvalidArgument(format!(
                "specialization has {} framing parameters, rank is {}",
                self.spec.rank(),
                self.rank
            )));
        }
        Ok(())
    }
}

/// Smallest `max_n` for which Z and Ẑ are both known through q^order.
pub fn max_n_for_order(rank: usize, order: i64) -> i64 {
    order.max(0) / (2 * rank as i64)
}

fn localize<C: Coefficient>(c: &Character, spec: &Specialization, mode: Mode) -> Result<C> {
    match mode {
        Mode::Equivariant => theta_eval(c, spec),
        Mode::Limit => theta_limit_factor(c, spec),
    }
}

/// Sums fixed-point contributions in parallel; the first error in
/// enumeration order wins.
fn sum_contributions<C: Coefficient, T: Sync>(
    items: &[T],
    contribution: impl Fn(usize, &T) -> Result<C> + Sync,
) -> Result<C> {
    let parts: Vec<Result<C>> = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| contribution(i, item))
        .collect();
    parts.into_iter().try_fold(C::zero(), |acc, part| Ok(acc + &part?))
}

/// Z = Σ_n (Σ_{|Y|=n} Θ(T_Y)) q^{2rn} + O(q^{2r(max_n+1)}).
pub fn z_series<C: Coefficient>(req: &SeriesRequest, en: &Enumerator) -> Result<QSeries<C>> {
    req.validate(false)?;
    let step = 2 * req.rank as i64;
    let mut terms = Vec::new();
    for n in 0..=req.max_n {
        let fps = en.p2(req.rank, n)?;
        let total = sum_contributions(&fps, |_, fp| localize::<C>(&tangent_p2(fp)?, &req.spec, req.mode))?;
        terms.push((step * n, total));
    }
    QSeries::from_terms(0, step * (req.max_n + 1), terms)
}

fn mutate(c: &mut Character) {
    let first = c.iter().next().map(|(w, _)| w);
    if let Some(w) = first {
        let mut to = Weight { t1: w.t1 + 1, ..w };
        if to.is_trivial() {
            to = Weight { t2: w.t2 + 1, ..w };
        }
        c.replace_one(w, to);
    }
}

/// Ẑ = Σ_{(Y,Z,k)} Θ(T) q^{2rΣ(|Y_i|+|Z_i|) + Σ_{i<j}(k_i−k_j)²}, over fixed
/// points of instanton number ≤ max_n; known below 2r(max_n+1) + k(r−k).
pub fn zhat_series<C: Coefficient>(req: &SeriesRequest, en: &Enumerator) -> Result<QSeries<C>> {
    req.validate(true)?;
    let r = req.rank as i64;
    let base = req.k * (r - req.k);
    let mut terms = Vec::new();
    for n in 0..=req.max_n {
        let fps = en.blowup(req.rank, req.k, n)?;
        let total = sum_contributions(&fps, |i, fp| {
            let mut tangent = tangent_blowup(fp)?;
            if req.mutation == Some(TangentMutation { n, index: i }) {
                mutate(&mut tangent);
            }
            localize::<C>(&tangent, &req.spec, req.mode)
        })?;
        terms.push((2 * r * n + base, total));
    }
    QSeries::from_terms(base, 2 * r * (req.max_n + 1) + base, terms)
}

/// Limit-mode Z from the closed form W(t₁, t₂, y, y^{r−1} q^{2r})^r.
pub fn z_series_limit_closed<C: Coefficient>(req: &SeriesRequest) -> Result<QSeries<C>> {
    if req.mode != Mode::Limit {
        return Err(Error::InvalidArgument(
            "closed-form Z is only defined in limit mode".into(),
        ));
    }
    req.validate(false)?;
    let y = C::y_value(&req.spec.y_mode)?;
    let w = w_series::<C>(&WRequest {
        spec: req.spec.clone(),
        substitution: WSubstitution::Identity,
        order: req.max_n,
    })?;
    let y_step = y.pow(req.rank as u32 - 1);
    let weighted = w.map_indexed(|n, c| c.clone() * &y_step.pow(n as u32));
    Ok(weighted.inflate(2 * req.rank as i64).pow(req.rank as u32))
}

/// Number of fixed points per q-exponent for Z and Ẑ, up to `max_n`.
pub fn fixed_point_counts(rank: usize, k: Option<i64>, max_n: i64, en: &Enumerator) -> Result<BTreeMap<i64, usize>> {
    let r = rank as i64;
    let mut out = BTreeMap::new();
    for n in 0..=max_n {
        match k {
            None => {
                out.insert(2 * r * n, en.p2(rank, n)?.len());
            }
            Some(k) => {
                out.insert(2 * r * n + k * (r - k), en.blowup(rank, k, n)?.len());
            }
        }
    }
    Ok(out)
}

/// JSON output of the compute commands.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesReport {
    pub schema_version: u32,
    /// "z", "zhat", "yk" or "w".
    pub series: String,
    pub params: SeriesParams,
    pub result: SeriesJson,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lowest_term: Option<String>,
    /// Number of fixed points per q-exponent, keyed by exponent.
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub fixed_point_counts: BTreeMap<i64, usize>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesParams {
    pub rank: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<i64>,
    /// Series reported through q^order.
    pub order: i64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_n: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub specialization: Option<Specialization>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mode: Option<Mode>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub substitution: Option<String>,
}

impl SeriesReport {
    pub fn new<C: Coefficient>(series: &str, params: SeriesParams, result: &QSeries<C>) -> Self {
        Self {
            schema_version: crate::verify::SCHEMA_VERSION,
            series: series.into(),
            params,
            result: result.to_json(),
            lowest_term: result.lowest_term_text(),
            fixed_point_counts: BTreeMap::new(),
            notes: Vec::new(),
            elapsed_ms: None,
        }
    }
}
