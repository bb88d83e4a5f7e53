//! Spin-singlet pairs measured by two analyzers.
//!
//! Joint probabilities come from the two-spin state vector by projector
//! algebra. Sampling measures one detector first and reduces the state before
//! the second measurement. Which detector is first depends on the frame
//! ([`frame_roles`]) but the joint law does not.

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seeding::{derive_seed, rng_from_seed, stream_id};
use crate::spacetime::{boost, norm3, scale3, BoostParameters, FourVector, Vec3, AXIS_TOLERANCE};

#[derive(Debug, Error)]
pub enum EprError {
    #[error("analyzer axis must be a unit vector, got norm {0}")]
    NotUnit(f64),
    #[error("spin outcome must be +1 or -1, got {0}")]
    BadSpin(i8),
    #[error("need at least {MIN_TRIALS} trials, got {0}")]
    TooFewTrials(usize),
}

/// Minimum sample size accepted by [`correlation`].
pub const MIN_TRIALS: usize = 1000;

type Spinor2 = [[Complex64; 4]; 4];

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Spin-measurement axis of one analyzer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec3", into = "Vec3")]
pub struct AnalyzerSetting(Vec3);

impl AnalyzerSetting {
    pub fn new(axis: Vec3) -> Result<Self, EprError> {
        let n = norm3(axis);
        if !((n - 1.0).abs() <= AXIS_TOLERANCE) {
            return Err(EprError::NotUnit(n));
        }
        Ok(AnalyzerSetting(axis))
    }

    /// Axis in the x-z plane at `angle` radians from z.
    pub fn in_plane(angle: f64) -> Self {
        AnalyzerSetting([angle.sin(), 0.0, angle.cos()])
    }

    pub fn axis(&self) -> Vec3 {
        self.0
    }

    /// `(I + s a.sigma) / 2` as a 2x2 matrix.
    fn projector(&self, s: i8) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.0;
        let s = s as f64;
        [
            [Complex64::new(0.5 * (1.0 + s * z), 0.0), Complex64::new(0.5 * s * x, -0.5 * s * y)],
            [Complex64::new(0.5 * s * x, 0.5 * s * y), Complex64::new(0.5 * (1.0 - s * z), 0.0)],
        ]
    }
}

impl TryFrom<Vec3> for AnalyzerSetting {
    type Error = EprError;

    fn try_from(v: Vec3) -> Result<Self, EprError> {
        Self::new(v)
    }
}

impl From<AnalyzerSetting> for Vec3 {
    fn from(a: AnalyzerSetting) -> Vec3 {
        a.0
    }
}

fn check_spin(s: i8) -> Result<(), EprError> {
    if s == 1 || s == -1 {
        Ok(())
    } else {
        Err(EprError::BadSpin(s))
    }
}

fn kron(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> Spinor2 {
    let mut m = [[ZERO; 4]; 4];
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    m[2 * i + k][2 * j + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    m
}

const IDENTITY2: [[Complex64; 2]; 2] = [[Complex64 { re: 1.0, im: 0.0 }, ZERO], [ZERO, Complex64 { re: 1.0, im: 0.0 }]];

fn apply(m: &Spinor2, v: &[Complex64; 4]) -> [Complex64; 4] {
    let mut out = [ZERO; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

fn inner(a: &[Complex64; 4], b: &[Complex64; 4]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Two spin-1/2 particles in the singlet, flying apart along `direction`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SingletState {
    pub direction: Vec3,
    pub speed: f64,
}

impl SingletState {
    /// Unnormalized spin vector `|up down> - |down up>` in the basis
    /// `(uu, ud, du, dd)`. Its squared norm is 2.
    pub fn spin_vector() -> [Complex64; 4] {
        [ZERO, Complex64::new(1.0, 0.0), Complex64::new(-1.0, 0.0), ZERO]
    }

    /// Classical positions of particles 1 and 2 at time `t`.
    pub fn tracks(&self, t: f64) -> [Vec3; 2] {
        let r = scale3(self.direction, self.speed * t);
        [scale3(r, -1.0), r]
    }
}

fn expectation(m: &Spinor2, v: &[Complex64; 4]) -> f64 {
    (inner(v, &apply(m, v)) / inner(v, v)).re
}

/// `P(s1, s2 | a, b)` in the singlet.
pub fn joint_probability(a: &AnalyzerSetting, b: &AnalyzerSetting, s1: i8, s2: i8) -> Result<f64, EprError> {
    check_spin(s1)?;
    check_spin(s2)?;
    Ok(expectation(&kron(&a.projector(s1), &b.projector(s2)), &SingletState::spin_vector()))
}

/// `[P(+,+), P(+,-), P(-,+), P(-,-)]`.
pub fn joint_table(a: &AnalyzerSetting, b: &AnalyzerSetting) -> [f64; 4] {
    let mut t = [0.0; 4];
    for (i, (s1, s2)) in OUTCOMES.iter().enumerate() {
        t[i] = joint_probability(a, b, *s1, *s2).expect("valid spins");
    }
    t
}

pub const OUTCOMES: [(i8, i8); 4] = [(1, 1), (1, -1), (-1, 1), (-1, -1)];

pub fn outcome_index(s1: i8, s2: i8) -> usize {
    OUTCOMES.iter().position(|o| *o == (s1, s2)).expect("valid spins")
}

/// `E(a, b) = sum s1 s2 P(s1, s2)`.
pub fn analytic_correlation(a: &AnalyzerSetting, b: &AnalyzerSetting) -> f64 {
    joint_table(a, b).iter().zip(OUTCOMES).map(|(p, (s1, s2))| p * (s1 * s2) as f64).sum()
}

/// `S = E(a,b) - E(a,b') + E(a',b) + E(a',b')` from the state.
pub fn analytic_chsh(a: &AnalyzerSetting, a2: &AnalyzerSetting, b: &AnalyzerSetting, b2: &AnalyzerSetting) -> f64 {
    analytic_correlation(a, b) - analytic_correlation(a, b2) + analytic_correlation(a2, b) + analytic_correlation(a2, b2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Detector {
    D1,
    D2,
}

/// Which detector measures first in a given frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameOrdering {
    /// `None` when both measurements are simultaneous.
    pub first_detector: Option<Detector>,
    pub delay: f64,
    pub boost: BoostParameters,
}

impl FrameOrdering {
    pub fn tie() -> Self {
        FrameOrdering { first_detector: None, delay: 0.0, boost: BoostParameters::identity() }
    }

    pub fn first(d: Detector) -> Self {
        FrameOrdering { first_detector: Some(d), delay: 0.0, boost: BoostParameters::identity() }
    }
}

/// Ordering of the two detections, which are simultaneous at `arrival_time`
/// in the rest frame, as seen in the frame reached by `b`.
pub fn frame_roles(detector_positions: [Vec3; 2], arrival_time: f64, b: &BoostParameters) -> FrameOrdering {
    let e1 = boost(&FourVector::from_parts(arrival_time, detector_positions[0]), b);
    let e2 = boost(&FourVector::from_parts(arrival_time, detector_positions[1]), b);
    let d = e2.t - e1.t;
    let scale = e1.t.abs().max(e2.t.abs()).max(1.0);
    let first_detector = if d.abs() <= 1e-12 * scale {
        None
    } else if d < 0.0 {
        Some(Detector::D2)
    } else {
        Some(Detector::D1)
    };
    FrameOrdering { first_detector, delay: d.abs(), boost: *b }
}

/// Spin outcomes of one pair, and which detector was first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointOutcome {
    pub s1: i8,
    pub s2: i8,
    pub first: Option<Detector>,
}

fn spin_from(u: f64, p_up: f64) -> i8 {
    if u < p_up {
        1
    } else {
        -1
    }
}

/// Projector of detector `d` on the two-spin space.
fn lifted(d: Detector, a: &AnalyzerSetting, b: &AnalyzerSetting, s: i8) -> Spinor2 {
    match d {
        Detector::D1 => kron(&a.projector(s), &IDENTITY2),
        Detector::D2 => kron(&IDENTITY2, &b.projector(s)),
    }
}

/// Samples one pair with `rng`. The first detector draws from its marginal
/// and reduces the state, the second draws from what is left. A tie draws
/// from the joint table at once.
pub fn sample_joint_with(a: &AnalyzerSetting, b: &AnalyzerSetting, order: &FrameOrdering, rng: &mut ChaCha8Rng) -> JointOutcome {
    let psi = SingletState::spin_vector();
    let first = order.first_detector;
    let (s1, s2) = match first {
        None => {
            let table = joint_table(a, b);
            OUTCOMES[crate::reduction::sample_with(&table, rng)]
        }
        Some(d) => {
            let other = match d {
                Detector::D1 => Detector::D2,
                Detector::D2 => Detector::D1,
            };
            let op_first = |s| lifted(d, a, b, s);
            let op_second = |s| lifted(other, a, b, s);
            let p_up = expectation(&op_first(1), &psi);
            let s_first = spin_from(rng.gen::<f64>(), p_up);
            let reduced = apply(&op_first(s_first), &psi);
            let q_up = expectation(&op_second(1), &reduced);
            let s_second = spin_from(rng.gen::<f64>(), q_up);
            match d {
                Detector::D1 => (s_first, s_second),
                Detector::D2 => (s_second, s_first),
            }
        }
    };
    JointOutcome { s1, s2, first }
}

pub fn sample_joint(a: &AnalyzerSetting, b: &AnalyzerSetting, order: &FrameOrdering, seed: u64) -> JointOutcome {
    sample_joint_with(a, b, order, &mut rng_from_seed(seed))
}

/// Outcomes of `n` pairs with per-trial seeds from `(seed, stream)`.
pub fn sample_many(
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
    order: &FrameOrdering,
    n: usize,
    seed: u64,
    stream: u64,
    parallel: bool,
) -> Vec<JointOutcome> {
    let one = |i: usize| sample_joint(a, b, order, derive_seed(seed, stream, i as u64));
    if parallel {
        (0..n).into_par_iter().map(one).collect()
    } else {
        (0..n).map(one).collect()
    }
}

/// Counts in [`OUTCOMES`] order.
pub fn tally(outcomes: &[JointOutcome]) -> [usize; 4] {
    let mut c = [0; 4];
    for o in outcomes {
        c[outcome_index(o.s1, o.s2)] += 1;
    }
    c
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationEstimate {
    pub a: AnalyzerSetting,
    pub b: AnalyzerSetting,
    pub n_trials: usize,
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
}

fn correlation_in_stream(
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
    order: &FrameOrdering,
    n: usize,
    seed: u64,
    stream: u64,
    parallel: bool,
) -> Result<CorrelationEstimate, EprError> {
    if n < MIN_TRIALS {
        return Err(EprError::TooFewTrials(n));
    }
    let outcomes = sample_many(a, b, order, n, seed, stream, parallel);
    let sum: i64 = outcomes.iter().map(|o| (o.s1 * o.s2) as i64).sum();
    let estimate = sum as f64 / n as f64;
    let std_error = ((1.0 - estimate * estimate).max(0.0) / (n - 1) as f64).sqrt();
    Ok(CorrelationEstimate { a: *a, b: *b, n_trials: n, estimate, std_error, analytic: analytic_correlation(a, b) })
}

/// Monte Carlo `E(a, b)` with D1 measuring first.
pub fn correlation(a: &AnalyzerSetting, b: &AnalyzerSetting, n_trials: usize, seed: u64) -> Result<CorrelationEstimate, EprError> {
    correlation_ordered(a, b, &FrameOrdering::first(Detector::D1), n_trials, seed, true)
}

pub fn correlation_ordered(
    a: &AnalyzerSetting,
    b: &AnalyzerSetting,
    order: &FrameOrdering,
    n_trials: usize,
    seed: u64,
    parallel: bool,
) -> Result<CorrelationEstimate, EprError> {
    correlation_in_stream(a, b, order, n_trials, seed, stream_id("epr/correlation"), parallel)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub settings: [AnalyzerSetting; 4],
    pub n_trials: usize,
    pub terms: [f64; 4],
    pub estimate: f64,
    pub std_error: f64,
    pub analytic: f64,
}

/// Monte Carlo CHSH value; each of the four correlations uses its own stream.
#[allow(clippy::too_many_arguments)]
pub fn chsh_ordered(
    a: &AnalyzerSetting,
    a2: &AnalyzerSetting,
    b: &AnalyzerSetting,
    b2: &AnalyzerSetting,
    order: &FrameOrdering,
    n_trials: usize,
    seed: u64,
    parallel: bool,
) -> Result<ChshEstimate, EprError> {
    let pairs = [(a, b), (a, b2), (a2, b), (a2, b2)];
    let mut terms = [0.0; 4];
    let mut var = 0.0;
    for (i, (x, y)) in pairs.iter().enumerate() {
        let e = correlation_in_stream(x, y, order, n_trials, seed, stream_id(&format!("epr/chsh/{i}")), parallel)?;
        terms[i] = e.estimate;
        var += e.std_error * e.std_error;
    }
    Ok(ChshEstimate {
        settings: [*a, *a2, *b, *b2],
        n_trials,
        terms,
        estimate: terms[0] - terms[1] + terms[2] + terms[3],
        std_error: var.sqrt(),
        analytic: analytic_chsh(a, a2, b, b2),
    })
}

pub fn chsh(
    a: &AnalyzerSetting,
    a2: &AnalyzerSetting,
    b: &AnalyzerSetting,
    b2: &AnalyzerSetting,
    n_trials: usize,
    seed: u64,
) -> Result<ChshEstimate, EprError> {
    chsh_ordered(a, a2, b, b2, &FrameOrdering::first(Detector::D1), n_trials, seed, true)
}

/// Settings at 0, 90, 45 and 135 degrees in one plane.
pub fn optimal_chsh_settings() -> [AnalyzerSetting; 4] {
    use std::f64::consts::FRAC_PI_4;
    [0.0, 2.0 * FRAC_PI_4, FRAC_PI_4, 3.0 * FRAC_PI_4].map(AnalyzerSetting::in_plane)
}
