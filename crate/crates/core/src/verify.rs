//! Quick property checks run by `relqm verify`.
//!
//! Each check draws random cases from a fixed seed and compares library
//! results against closed forms. Sample sizes are smaller than in the test
//! suite so the whole run takes a few seconds.

use rand::Rng;
use serde::Serialize;

use crate::config::{RunConfig, ScenarioId};
use crate::epr::{self, AnalyzerSetting, Detector, FrameOrdering};
use crate::lorentz_action;
use crate::reduction::{self, DetectorArray, InstantaneousBorn};
use crate::scenarios;
use crate::seeding::rng_from_seed;
use crate::spacetime::{self, boost, interval, BoostParameters, FourVector};
use crate::twoparticle::{self, DecayGeometry, SWaveState};
use crate::wavepacket::{self, MomentumGrid};

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, passed: bool, detail: String) -> Check {
    Check { name, passed, detail }
}

fn interval_invariance() -> Check {
    let mut rng = rng_from_seed(11);
    let mut worst: f64 = 0.0;
    for _ in 0..2000 {
        let mut ev = || FourVector::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (a, c) = (ev(), ev());
        let b = BoostParameters::along(rng.gen_range(-0.99..0.99), [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), 0.3]).unwrap();
        let d = a.sub(&c);
        let scale = d.t * d.t + d.x * d.x + d.y * d.y + d.z * d.z;
        let err = (interval(&boost(&a, &b), &boost(&c, &b)) - interval(&a, &c)).abs() / scale;
        worst = worst.max(err);
    }
    check("interval invariance", worst < 1e-12, format!("max relative error {worst:.3e}"))
}

fn ordering_flip() -> Check {
    let b = BoostParameters::along_x(0.6).unwrap();
    let e = boost(&FourVector::new(0.0, 1.0, 0.0, 0.0), &b);
    let triple = (e.x - 1.25).abs() < 1e-12 && (e.t + 0.75).abs() < 1e-12;
    let d = spacetime::ordering_delay(2.0, &b);
    let flipped = spacetime::ordering_delay(2.0, &b.inverse());
    check("boost triple and ordering flip", triple && d > 0.0 && flipped < 0.0, format!("x'={} t'={} delay={d}", e.x, e.t))
}

fn packet_round_trip() -> Check {
    let grid = MomentumGrid::symmetric_1d(512, 3.0).unwrap();
    let amp = wavepacket::gaussian_packet([0.4, 0.0, 0.0], 0.2, 1.0, &grid).unwrap();
    let field = wavepacket::momentum_to_position(&amp, 1.5);
    let back = wavepacket::position_to_momentum(&field, 1.0).unwrap().amplitude;
    let err = lorentz_action::relative_l2(back.values(), amp.values());
    check("packet round trip", err < 1e-8, format!("relative L2 {err:.3e}"))
}

fn lorentz_equivalence() -> Check {
    let grid = MomentumGrid::symmetric_1d(1024, 4.5).unwrap();
    let amp = wavepacket::gaussian_packet([0.2, 0.0, 0.0], 0.1, 1.0, &grid).unwrap();
    let b = BoostParameters::along_x(0.7).unwrap();
    let targets: Vec<FourVector> = (0..200).map(|i| FourVector::new((i / 20) as f64 - 5.0, (i % 20) as f64 - 10.0, 0.0, 0.0)).collect();
    let pulled = lorentz_action::pullback_transform(&amp, &b, &targets);
    let boosted = lorentz_action::momentum_boost(&amp, &b).unwrap();
    let err = lorentz_action::relative_l2(pulled.values(), &wavepacket::synthesize_many(&boosted, &targets));
    check("pullback equals momentum boost", err < 1e-6, format!("relative L2 {err:.3e}"))
}

fn born_statistics() -> Check {
    let p = [0.1, 0.2, 0.3, 0.4];
    let n = 20_000;
    let draws = reduction::run_trials(&p, &InstantaneousBorn, 5, 1, n, true).unwrap();
    let mut counts = [0usize; 4];
    for d in draws {
        counts[d] += 1;
    }
    let worst = counts
        .iter()
        .zip(p)
        .map(|(k, pi)| (*k as f64 / n as f64 - pi).abs() / (pi * (1.0 - pi) / n as f64).sqrt())
        .fold(0.0, f64::max);
    let det = DetectorArray::partition_line(&[-1.0, 0.0, 1.0]).unwrap();
    let grid = crate::wavepacket::SpatialGrid::uniform_line(100, -0.99, 0.99).unwrap();
    let field = crate::wavepacket::PositionField::new(grid, vec![num_complex::Complex64::new(1.0, 0.0); 100], 0.0).unwrap();
    let half = reduction::born_probabilities(&field, &det).unwrap();
    check("Born sampling", worst < 4.0 && (half[0] - 0.5).abs() < 1e-12, format!("max z-score {worst:.2}"))
}

fn decay_flip() -> Check {
    let geom = DecayGeometry::right_angle([1.0, 1.0], 0.3).unwrap();
    let state = SWaveState::gaussian(1.0, 0.05, 1.0, 101).unwrap();
    let fwd = twoparticle::run_90deg_scenario(&geom, &state, &BoostParameters::along_x(0.5).unwrap(), 1000, 3, true).unwrap();
    let back = twoparticle::run_90deg_scenario(&geom, &state, &BoostParameters::along_x(-0.5).unwrap(), 1000, 3, true).unwrap();
    let one_fires = fwd.trials.iter().all(|t| t.fired != t.silent);
    let flips = fwd.trials.iter().zip(&back.trials).all(|(a, b)| match (a.first, b.first) {
        (Some(x), Some(y)) => x != y,
        _ => true,
    });
    let sums_zero = fwd.trials.iter().all(|t| spacetime::add3(t.detected_momentum, t.partner_momentum) == [0.0; 3]);
    check("decay: one fires, winner flips", one_fires && flips && sums_zero, format!("fired counts {:?}", fwd.fired_counts))
}

fn singlet() -> Check {
    let [a, a2, b, b2] = epr::optimal_chsh_settings();
    let s = epr::chsh(&a, &a2, &b, &b2, 20_000, 9).unwrap();
    let ok = (s.estimate.abs() - 2.0 * std::f64::consts::SQRT_2).abs() < 4.0 * s.std_error;
    let z = AnalyzerSetting::in_plane(0.0);
    let boundary = epr::analytic_chsh(&z, &z, &z, &z) == -2.0;
    check("singlet CHSH", ok && boundary, format!("S = {:.4} +- {:.4}", s.estimate, s.std_error))
}

fn order_invariance() -> Check {
    let a = AnalyzerSetting::in_plane(0.3);
    let b = AnalyzerSetting::in_plane(1.4);
    let n = 20_000;
    let t1 = epr::tally(&epr::sample_many(&a, &b, &FrameOrdering::first(Detector::D1), n, 1, 1, true));
    let t2 = epr::tally(&epr::sample_many(&a, &b, &FrameOrdering::first(Detector::D2), n, 2, 1, true));
    let worst = t1
        .iter()
        .zip(t2)
        .map(|(x, y)| {
            let (p, q) = (*x as f64 / n as f64, y as f64 / n as f64);
            let pooled = 0.5 * (p + q);
            (p - q).abs() / (2.0 * pooled * (1.0 - pooled) / n as f64).sqrt().max(1e-12)
        })
        .fold(0.0, f64::max);
    check("measurement order invariance", worst < 4.0, format!("max z-score {worst:.2}"))
}

fn reduction_width() -> Check {
    let grid = MomentumGrid::symmetric_1d(256, 4.0).unwrap();
    let amp = wavepacket::gaussian_packet([0.0; 3], 0.3, 1.0, &grid).unwrap();
    let b = BoostParameters::along_x(0.5).unwrap();
    let r = reduction::reduction_in_boosted_frame(&amp, &amp, &FourVector::ORIGIN, (-1.0, 1.0), &b, &[]).unwrap();
    let err = (r.width() - 2.0 / 3f64.sqrt()).abs();
    check("boosted reduction width", err < 1e-10, format!("width {:.12}", r.width()))
}

fn determinism() -> Check {
    let mut ok = true;
    for scenario in [ScenarioId::EinsteinScreen, ScenarioId::Decay90, ScenarioId::EprBoosted] {
        let mut c = RunConfig { scenario, n_trials: 2000, ..RunConfig::default() };
        c.parallel = false;
        let serial = scenarios::report_json(&scenarios::execute(&c).unwrap().0).unwrap();
        c.parallel = true;
        let parallel = scenarios::report_json(&scenarios::execute(&c).unwrap().0).unwrap();
        ok &= serial == parallel;
    }
    check("serial and parallel reports identical", ok, String::new())
}

/// Runs every check.
pub fn run_all() -> Vec<Check> {
    vec![
        interval_invariance(),
        ordering_flip(),
        packet_round_trip(),
        lorentz_equivalence(),
        born_statistics(),
        decay_flip(),
        singlet(),
        order_invariance(),
        reduction_width(),
        determinism(),
    ]
}
