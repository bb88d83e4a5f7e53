mod common;

use proptest::prelude::*;
use relqm::lorentz_action::{
    momentum_boost, pullback_transform, quasi_2d_residual, time_slice_spread, LorentzActionError,
};
use relqm::spacetime::{boost, compose_collinear, BoostParameters, FourVector};
use relqm::wavepacket::{gaussian_packet, norm, synthesize, synthesize_many, MomentumGrid, SpatialGrid};

use common::{apply_matrix, boost_matrix, rel_l2};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn pullback_equals_momentum_boost(center in -0.3..0.3f64, sigma in 0.05..0.15f64, beta in -0.8..0.8f64, m in 0.5..1.5f64) {
        let g = MomentumGrid::symmetric_1d(2048, 4.5).unwrap();
        let amp = gaussian_packet([center, 0.0, 0.0], sigma, m, &g).unwrap();
        let b = BoostParameters::along_x(beta).unwrap();
        let targets: Vec<FourVector> = (0..120).map(|i| FourVector::new((i % 11) as f64 - 5.0, (i % 41) as f64 - 20.0, 0.0, 0.0)).collect();
        let pulled = pullback_transform(&amp, &b, &targets);
        let boosted = momentum_boost(&amp, &b).unwrap();
        prop_assert!(rel_l2(&synthesize_many(&boosted, &targets), pulled.values()) < 1e-6);
        prop_assert!((norm(&boosted) - norm(&amp)).abs() < 1e-8);
    }

    #[test]
    fn pullback_uses_inverse_map(beta in -0.9..0.9f64, t in -3.0..3.0f64, x in -10.0..10.0f64) {
        let g = MomentumGrid::symmetric_1d(256, 4.0).unwrap();
        let amp = gaussian_packet([0.2, 0.0, 0.0], 0.3, 1.0, &g).unwrap();
        let b = BoostParameters::along_x(beta).unwrap();
        let inv = apply_matrix(&boost_matrix(-beta, [1.0, 0.0, 0.0]), [t, x, 0.0, 0.0]);
        let oracle = synthesize(&amp, &FourVector::new(inv[0], inv[1], inv[2], inv[3]));
        let got = pullback_transform(&amp, &b, &[FourVector::new(t, x, 0.0, 0.0)]);
        prop_assert!((got.values()[0] - oracle).norm() < 1e-12);
    }
}

#[test]
fn successive_boosts_compose() {
    let g = MomentumGrid::symmetric_1d(2048, 4.5).unwrap();
    let amp = gaussian_packet([0.1, 0.0, 0.0], 0.1, 1.0, &g).unwrap();
    let (b1, b2) = (0.4, -0.6);
    let twice = momentum_boost(
        &momentum_boost(&amp, &BoostParameters::along_x(b1).unwrap()).unwrap(),
        &BoostParameters::along_x(b2).unwrap(),
    )
    .unwrap();
    let once = momentum_boost(&amp, &BoostParameters::along_x(compose_collinear(b1, b2)).unwrap()).unwrap();
    assert!(rel_l2(twice.values(), once.values()) < 1e-8);
}

#[test]
fn three_dimensional_boost_off_axis() {
    let g = MomentumGrid::symmetric_3d(40, 3.2).unwrap();
    let amp = gaussian_packet([0.1, -0.1, 0.0], 0.35, 1.0, &g).unwrap();
    let b = BoostParameters::along(0.3, [1.0, 1.0, 0.0]).unwrap();
    let targets: Vec<FourVector> =
        (0..60).map(|i| FourVector::new((i % 5) as f64 - 2.0, (i % 7) as f64 - 3.0, (i % 3) as f64 - 1.0, (i % 4) as f64 * 0.5)).collect();
    let pulled = pullback_transform(&amp, &b, &targets);
    let boosted = momentum_boost(&amp, &b).unwrap();
    let err = rel_l2(&synthesize_many(&boosted, &targets), pulled.values());
    assert!(err < 1e-4, "3D relative L2 {err}");
}

#[test]
fn momentum_boost_rejects_overflow_and_off_axis_1d() {
    let g = MomentumGrid::symmetric_1d(256, 2.0).unwrap();
    let amp = gaussian_packet([0.5, 0.0, 0.0], 0.15, 1.0, &g).unwrap();
    assert!(matches!(
        momentum_boost(&amp, &BoostParameters::along_x(-0.9).unwrap()),
        Err(LorentzActionError::SupportOverflow { .. })
    ));
    assert!(matches!(
        momentum_boost(&amp, &BoostParameters::along(0.3, [0.0, 1.0, 0.0]).unwrap()),
        Err(LorentzActionError::AxisNotAlongGrid(_))
    ));
}

#[test]
fn slice_spread_examples() {
    let b = BoostParameters::along_x(0.5).unwrap();
    assert!((time_slice_spread(2.0, &b).unwrap() - 1.1547005383792515).abs() < 1e-12);
    assert_eq!(time_slice_spread(0.0, &b).unwrap(), 0.0);
    assert_eq!(time_slice_spread(3.0, &BoostParameters::identity()).unwrap(), 0.0);
    assert!(time_slice_spread(-1.0, &b).is_err());
}

#[test]
fn quasi_2d_residual_grows_with_extent() {
    let g = MomentumGrid::symmetric_1d(512, 4.0).unwrap();
    let amp = gaussian_packet([0.0; 3], 0.4, 1.0, &g).unwrap();
    let b = BoostParameters::along_x(0.6).unwrap();
    let point = SpatialGrid::line(vec![0.0]).unwrap();
    assert!(quasi_2d_residual(&amp, &b, &point, 0.0).unwrap() < 1e-15);
    let mut last = 0.0;
    for half in [0.1, 0.5, 2.0] {
        let slice = SpatialGrid::uniform_line(41, -half, half).unwrap();
        let r = quasi_2d_residual(&amp, &b, &slice, 0.0).unwrap();
        assert!(r > last, "residual {r} at half-width {half}");
        last = r;
    }
    let slice = SpatialGrid::uniform_line(41, -2.0, 2.0).unwrap();
    assert!(quasi_2d_residual(&amp, &BoostParameters::identity(), &slice, 0.0).unwrap() < 1e-15);
}

#[test]
fn boosted_field_frame_is_recorded() {
    let g = MomentumGrid::symmetric_1d(128, 4.0).unwrap();
    let amp = gaussian_packet([0.0; 3], 0.4, 1.0, &g).unwrap();
    let b = BoostParameters::along_x(0.2).unwrap();
    let s = pullback_transform(&amp, &b, &[boost(&FourVector::ORIGIN, &b)]);
    assert_eq!(s.frame(), &b);
    assert_eq!(s.len(), 1);
}
