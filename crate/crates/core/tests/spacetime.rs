mod common;

use proptest::prelude::*;
use relqm::spacetime::{
    boost, compose_collinear, contraction_check, dot3, gamma, interval, ordering_delay, BoostParameters, FourVector,
    SpacetimeError,
};

use common::{apply_matrix, boost_matrix, minkowski_interval};

fn event() -> impl Strategy<Value = FourVector> {
    (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64).prop_map(|(t, x, y, z)| FourVector::new(t, x, y, z))
}

fn unit() -> impl Strategy<Value = [f64; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("non-degenerate", |(x, y, z)| (x * x + y * y + z * z).sqrt() > 0.1)
        .prop_map(|(x, y, z)| {
            let n = (x * x + y * y + z * z).sqrt();
            [x / n, y / n, z / n]
        })
}

fn arr(v: &FourVector) -> [f64; 4] {
    [v.t, v.x, v.y, v.z]
}

proptest! {
    #[test]
    fn interval_is_invariant(a in event(), c in event(), beta in -0.99..0.99f64, n in unit()) {
        let b = BoostParameters::new(beta, n).unwrap();
        let scale: f64 = arr(&a).iter().zip(arr(&c)).map(|(p, q)| (p - q).powi(2)).sum::<f64>().max(1.0);
        let s = interval(&boost(&a, &b), &boost(&c, &b));
        prop_assert!((s - minkowski_interval(arr(&a), arr(&c))).abs() / scale < 1e-12);
    }

    #[test]
    fn boost_matches_matrix_oracle(v in event(), beta in -0.99..0.99f64, n in unit()) {
        let b = BoostParameters::new(beta, n).unwrap();
        let got = arr(&boost(&v, &b));
        let want = apply_matrix(&boost_matrix(beta, n), arr(&v));
        for i in 0..4 {
            prop_assert!((got[i] - want[i]).abs() < 1e-11);
        }
    }

    #[test]
    fn inverse_round_trips(v in event(), beta in -0.99..0.99f64, n in unit()) {
        let b = BoostParameters::new(beta, n).unwrap();
        let back = boost(&boost(&v, &b), &b.inverse());
        for (p, q) in arr(&back).iter().zip(arr(&v)) {
            prop_assert!((p - q).abs() < 1e-11);
        }
    }

    #[test]
    fn perpendicular_part_unchanged(v in event(), beta in -0.99..0.99f64, n in unit()) {
        let b = BoostParameters::new(beta, n).unwrap();
        let w = boost(&v, &b);
        let perp = |e: &FourVector| {
            let s = e.space();
            let p = dot3(s, n);
            [s[0] - p * n[0], s[1] - p * n[1], s[2] - p * n[2]]
        };
        let (a, c) = (perp(&v), perp(&w));
        for i in 0..3 {
            prop_assert!((a[i] - c[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn collinear_boosts_compose(b1 in -0.9..0.9f64, b2 in -0.9..0.9f64, v in event()) {
        let twice = boost(&boost(&v, &BoostParameters::along_x(b1).unwrap()), &BoostParameters::along_x(b2).unwrap());
        let once = boost(&v, &BoostParameters::along_x(compose_collinear(b1, b2)).unwrap());
        for (p, q) in arr(&twice).iter().zip(arr(&once)) {
            prop_assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn ordering_delay_matches_explicit_boost(dx in -20.0..20.0f64, beta in -0.99..0.99f64, n in unit(), t in -5.0..5.0f64) {
        let b = BoostParameters::new(beta, n).unwrap();
        let a = FourVector::new(t, 0.0, 0.0, 0.0);
        let c = FourVector::new(t, dx * n[0], dx * n[1], dx * n[2]);
        let oracle = boost(&a, &b).t - boost(&c, &b).t;
        prop_assert!((ordering_delay(dx, &b) - oracle).abs() < 1e-11);
        prop_assert!((ordering_delay(dx, &b) + ordering_delay(dx, &b.inverse())).abs() < 1e-11);
    }
}

#[test]
fn spec_examples() {
    let b = BoostParameters::along_x(0.6).unwrap();
    assert!((gamma(0.6) - 1.25).abs() < 1e-15);
    let e = boost(&FourVector::new(0.0, 1.0, 0.0, 0.0), &b);
    assert!((e.x - 1.25).abs() < 1e-12 && (e.t + 0.75).abs() < 1e-12);
    assert!((ordering_delay(2.0, &BoostParameters::along_x(0.5).unwrap()) - 2.0 / 3f64.sqrt()).abs() < 1e-12);
    let c = contraction_check(1.0, &b);
    assert!((c.length_moving - 0.8).abs() < 1e-12 && (c.desync_time - 0.6).abs() < 1e-12);
}

#[test]
fn guards() {
    assert!(matches!(BoostParameters::along_x(1.0), Err(SpacetimeError::Superluminal(_))));
    assert!(matches!(BoostParameters::along_x(-1.5), Err(SpacetimeError::Superluminal(_))));
    assert!(BoostParameters::new(0.5, [1.0, 1.0, 0.0]).is_err());
    assert!(BoostParameters::along(0.5, [0.0, 0.0, 0.0]).is_err());
    let bad: Result<BoostParameters, _> = serde_json::from_str(r#"{"beta": 1.2, "axis": [1.0, 0.0, 0.0]}"#);
    assert!(bad.is_err());
}
