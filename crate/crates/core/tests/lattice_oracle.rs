//! Lattice codebook, separation and nearest-point decoding against plain
//! floating-point enumeration.

use gifc_core::lattice::nearest_point;
use gifc_core::quadratic::Surd;
use gifc_core::{build_codebook, liouville_delta, min_separation, QuadraticIrrational};
use proptest::prelude::*;

fn alphas() -> Vec<QuadraticIrrational> {
    vec![
        QuadraticIrrational::sqrt(2).unwrap(),
        QuadraticIrrational::sqrt(3).unwrap(),
        QuadraticIrrational::new(1, 1, 5, 2).unwrap(),
        QuadraticIrrational::new(-1, 2, 7, 3).unwrap(),
        QuadraticIrrational::new(5, -1, 11, 4).unwrap(),
    ]
}

fn brute_gap(alpha: f64, spacing: f64, dx_max: i64, ds_max: i64) -> f64 {
    let mut best = f64::INFINITY;
    for dx in -dx_max..=dx_max {
        for ds in -ds_max..=ds_max {
            if (dx, ds) != (0, 0) {
                best = best.min((alpha * dx as f64 + ds as f64).abs());
            }
        }
    }
    best * spacing
}

#[test]
fn codebook_matches_interval_count() {
    for (power, eps) in [(1e4, 0.05), (1e6, 0.2), (1e9, 0.1), (1e12, 0.2), (16.0, 0.24)] {
        let lat = build_codebook(power, eps).unwrap();
        let root = power.sqrt();
        let spacing = power.powf(0.25 + eps);
        let count = (-100_000i64..=100_000).filter(|&k| (k as f64 * spacing).abs() <= root).count();
        assert_eq!(lat.cardinality() as usize, count, "P={power} eps={eps}");
        assert!(lat.cardinality() as f64 <= lat.cardinality_bound() + 1e-9);
        assert_eq!(lat.codewords().count(), count);
    }
}

#[test]
fn codebook_rejects_bad_parameters() {
    assert!(build_codebook(1e6, 0.25).is_err());
    assert!(build_codebook(1e6, 0.0).is_err());
    assert!(build_codebook(-1.0, 0.1).is_err());
    assert!(build_codebook(f64::NAN, 0.1).is_err());
}

#[test]
fn witness_value_is_exact() {
    let alpha = QuadraticIrrational::sqrt(2).unwrap();
    let lat = build_codebook(1e4, 0.05).unwrap();
    let sep = min_separation(&alpha, &lat, 24);
    let (dx, ds) = sep.witness.unwrap();
    let exact = sep.witness_value.unwrap();
    assert_eq!(exact, Surd::new(ds as i128, dx as i128, 2));
    assert!((lat.spacing * exact.to_f64().abs() - sep.min_gap).abs() < 1e-12 * sep.min_gap.max(1.0));
}

#[test]
fn liouville_certificate_holds_for_every_small_denominator() {
    for alpha in alphas() {
        let cert = liouville_delta(&alpha);
        let delta = 1.0 / cert.denominator as f64;
        let x = alpha.to_f64();
        for q in 1..=2000i64 {
            let p = (x * q as f64).round();
            let scaled = (x - p / q as f64).abs() * (q * q) as f64;
            assert!(scaled > delta * (1.0 - 1e-9), "{alpha:?} q={q}: {scaled} vs {delta}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn separation_matches_enumeration(
        which in 0usize..5,
        log_p in 3.0f64..7.0,
        eps in 0.01f64..0.24,
        s_range in 0u64..40,
    ) {
        let alpha = &alphas()[which];
        let lat = build_codebook(10f64.powf(log_p), eps).unwrap();
        prop_assume!(lat.max_index <= 200);
        let sep = min_separation(alpha, &lat, s_range);
        let oracle = brute_gap(alpha.to_f64(), lat.spacing, 2 * lat.max_index, s_range as i64);
        if oracle.is_infinite() {
            prop_assert!(sep.min_gap.is_infinite() && sep.satisfied);
        } else {
            prop_assert!((sep.min_gap - oracle).abs() <= 1e-9 * oracle.max(1e-9), "{} vs {}", sep.min_gap, oracle);
            prop_assert_eq!(sep.satisfied, sep.min_gap > lat.threshold());
        }
    }

    #[test]
    fn nearest_point_matches_enumeration(
        which in 0usize..5,
        log_p in 3.0f64..6.0,
        eps in 0.05f64..0.24,
        s_range in 0u64..30,
        y_unit in -1.5f64..1.5,
    ) {
        let alpha = &alphas()[which];
        let lat = build_codebook(10f64.powf(log_p), eps).unwrap();
        let a = alpha.to_f64();
        let y = y_unit * (lat.max_index.max(1) as f64 + s_range as f64) * lat.spacing;
        let got = nearest_point(y, alpha, &lat, s_range);
        let got_dist = (got.value(alpha, &lat) - y).abs();
        let mut best = f64::INFINITY;
        for zx in -lat.max_index..=lat.max_index {
            for zs in -(s_range as i64)..=s_range as i64 {
                best = best.min((lat.spacing * (a * zx as f64 + zs as f64) - y).abs());
            }
        }
        prop_assert!(got.x_index.abs() <= lat.max_index && got.s_index.unsigned_abs() <= s_range);
        prop_assert!(got_dist <= best + 1e-9 * lat.spacing, "{got_dist} vs {best}");
    }

    #[test]
    fn surd_sign_matches_float(u in -10_000i128..10_000, v in -10_000i128..10_000, which in 0usize..4) {
        let d = [2i128, 3, 5, 7][which];
        let s = Surd::new(u, v, d);
        let f = u as f64 + v as f64 * (d as f64).sqrt();
        if f.abs() > 1e-6 {
            prop_assert_eq!(s.signum() as f64, f.signum());
        }
        prop_assert_eq!(s.is_zero(), u == 0 && v == 0);
    }

    #[test]
    fn floor_mul_matches_float(which in 0usize..5, k in -100_000i64..100_000) {
        let alpha = &alphas()[which];
        let f = alpha.to_f64() * k as f64;
        let fl = alpha.floor_mul(k);
        // away from integers the float floor is reliable
        if (f - f.round()).abs() > 1e-6 {
            prop_assert_eq!(fl, f.floor() as i128);
        }
    }
}

#[test]
fn convergents_alternate_in_sign_exactly() {
    // p − q√2 alternates sign along the convergents of √2, down to tiny magnitudes
    let alpha = QuadraticIrrational::sqrt(2).unwrap();
    let signs: Vec<i32> = alpha
        .convergents()
        .take(40)
        .map(|(p, q)| {
            let p: i128 = p.to_string().parse().unwrap();
            let q: i128 = q.to_string().parse().unwrap();
            Surd::new(p, -q, 2).signum()
        })
        .collect();
    assert!(signs.windows(2).all(|w| w[0] == -w[1]), "{signs:?}");
}
