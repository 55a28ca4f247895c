//! Closed values checked against independent brute-force computations.

use std::collections::BTreeMap;

use blowup_core::blowup_factor::{yk_euler, yk_main, YkRequest};
use blowup_core::cache::{EnumerationCache, Enumerator};
use blowup_core::coefficients::{sample_specialization, Rational, YMode, YRat};
use blowup_core::genera::{fixed_point_counts, z_series, Mode, SeriesRequest};
use blowup_core::rank1::{w_series, WRequest, WSubstitution};
use blowup_core::verify::{verify_main_theorem, MainTheoremParams, VerifyOptions};

/// Coefficients of ∏(1−q^n)^{-power} by counting multisets of parts.
fn colored_partitions(power: usize, max: usize) -> Vec<i64> {
    let mut c = vec![0i64; max + 1];
    c[0] = 1;
    for _ in 0..power {
        for part in 1..=max {
            for n in part..=max {
                c[n] += c[n - part];
            }
        }
    }
    c
}

/// Σ_{k₁+…+k_r=k} q^{Σ_{i<j}(k_i−k_j)²} by scanning a box.
fn lattice_counts(rank: usize, k: i64, max: i64) -> BTreeMap<i64, i64> {
    let mut out = BTreeMap::new();
    let radius = 6i64;
    let mut v = vec![-radius; rank - 1];
    loop {
        let mut full = v.clone();
        full.push(k - v.iter().sum::<i64>());
        let mut e = 0;
        for i in 0..rank {
            for j in i + 1..rank {
                e += (full[i] - full[j]).pow(2);
            }
        }
        if e <= max {
            *out.entry(e).or_insert(0) += 1;
        }
        let Some(pos) = v.iter().rposition(|&x| x < radius) else {
            break;
        };
        v[pos] += 1;
        for x in &mut v[pos + 1..] {
            *x = -radius;
        }
    }
    out
}

#[test]
fn euler_form_matches_brute_force() {
    for rank in 1..=3usize {
        for k in 0..rank as i64 {
            let max = 20i64;
            let step = 2 * rank;
            let euler = colored_partitions(rank, max as usize / step);
            let lattice = lattice_counts(rank, k, max);
            let mut expected = vec![0i64; max as usize + 1];
            for (&e, &c) in &lattice {
                for (n, &p) in euler.iter().enumerate() {
                    let total = e as usize + step * n;
                    if total <= max as usize {
                        expected[total] += c * p;
                    }
                }
            }
            let got = yk_euler(YkRequest::new(rank, k, max)).unwrap();
            for (e, &want) in expected.iter().enumerate() {
                assert_eq!(
                    got.coeff(e as i64).unwrap(),
                    Rational::from(want),
                    "r={rank} k={k} q^{e}"
                );
            }
        }
    }
}

#[test]
fn rank_one_factor_is_partition_generating_function() {
    let p = colored_partitions(1, 8);
    let y1 = yk_main(YkRequest::new(1, 0, 16)).unwrap();
    for (n, &count) in p.iter().enumerate() {
        let c = y1.coeff(2 * n as i64).unwrap();
        assert_eq!(c.eval(&Rational::one()), Rational::from(count));
        assert_eq!(c.degree(), Some(n), "(q^2 y)^n carries y^n");
    }
}

#[test]
fn fixed_point_counts_match_brute_force() {
    // r-colored partitions of n count ℙ² fixed points
    for rank in 1..=3usize {
        let counts = fixed_point_counts(rank, None, 4, &Enumerator::new()).unwrap();
        let oracle = colored_partitions(rank, 4);
        for n in 0..=4 {
            assert_eq!(counts[&(2 * rank as i64 * n as i64)] as i64, oracle[n]);
        }
    }
}

#[test]
fn single_box_w_coefficient() {
    for seed in 0..5u64 {
        let spec = sample_specialization(1, seed, YMode::Symbolic);
        let w: blowup_core::qseries::QSeries<YRat> = w_series(&WRequest {
            spec: spec.clone(),
            substitution: WSubstitution::Identity,
            order: 1,
        })
        .unwrap();
        let y0 = Rational::new(-2, 5).unwrap();
        let one = Rational::one();
        let theta = |x: &Rational| &(x - &y0) * &(x - &one).recip().unwrap();
        let expected = &theta(&spec.t1) * &theta(&spec.t2);
        assert_eq!(w.coeff(1).unwrap().eval(&y0).unwrap(), expected);
    }
}

#[test]
fn z_rank_one_at_y_one_counts_partitions() {
    let p = colored_partitions(1, 8);
    let spec = sample_specialization(1, 17, YMode::Numeric(Rational::one()));
    let z = z_series::<Rational>(
        &SeriesRequest::new(1, 0, 8, spec, Mode::Equivariant),
        &Enumerator::new(),
    )
    .unwrap();
    for (n, &count) in p.iter().enumerate() {
        assert_eq!(z.coeff(2 * n as i64).unwrap(), Rational::from(count));
    }
}

#[test]
fn cached_reports_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cached = VerifyOptions {
        enumerator: Enumerator::with_cache(EnumerationCache::new(dir.path()).unwrap()),
        timing: false,
    };
    let p = MainTheoremParams::new(2, 1, 9, vec![1, 2]);
    let plain = serde_json::to_vec(&verify_main_theorem(&p, &VerifyOptions::default()).unwrap()).unwrap();
    let cold = serde_json::to_vec(&verify_main_theorem(&p, &cached).unwrap()).unwrap();
    let warm = serde_json::to_vec(&verify_main_theorem(&p, &cached).unwrap()).unwrap();
    assert_eq!(plain, cold);
    assert_eq!(cold, warm);
}
