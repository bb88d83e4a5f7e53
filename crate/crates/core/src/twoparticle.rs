//! Two-particle decay scenarios.
//!
//! The decay products share a center-of-mass factor that is taken constant,
//! so the state is carried by the relative s-wave `phi(r, t)`. Detecting one
//! product with momentum `k` leaves the other in the plane wave `-k`.
//!
//! Two thought experiments are simulated here: two detectors looking at the
//! source from different directions ([`run_90deg_scenario`]), and a
//! hemispherical screen around a point source ([`run_einstein_screen`]).

use num_complex::Complex64;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::io::Write;
use thiserror::Error;

use crate::reduction::sample_with;
use crate::seeding::{derive_seed, rng_from_seed};
use crate::spacetime::{add3, boost, dot3, norm3, scale3, BoostParameters, FourVector, Vec3, AXIS_TOLERANCE};
use crate::wavepacket::dispersion;

#[derive(Debug, Error)]
pub enum TwoParticleError {
    #[error("invalid radial state: {0}")]
    InvalidState(String),
    #[error("momentum magnitude {0} is outside the support of g")]
    OutsideSupport(f64),
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    #[error("invalid angular profile: {0}")]
    InvalidProfile(String),
    #[error("particle speed must be positive and finite, got {0}")]
    InvalidSpeed(f64),
    #[error(transparent)]
    Wavepacket(#[from] crate::wavepacket::WavepacketError),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// Spherical Bessel function `j0(x) = sin(x) / x`.
pub fn j0(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// Isotropic relative state sampled on a radial momentum grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SWaveState {
    k: Vec<f64>,
    weights: Vec<f64>,
    g: Vec<Complex64>,
    mass: f64,
    energies: Vec<f64>,
}

impl SWaveState {
    /// `k` must be strictly increasing and non-negative; `weights` are the
    /// quadrature weights in `dk` (the `k^2` factor is applied separately).
    pub fn new(k: Vec<f64>, weights: Vec<f64>, g: Vec<Complex64>, mass: f64) -> Result<Self, TwoParticleError> {
        if k.is_empty() || k.len() != weights.len() || k.len() != g.len() {
            return Err(TwoParticleError::InvalidState("k, weights and g must have equal nonzero length".into()));
        }
        if k.iter().any(|v| !v.is_finite() || *v < 0.0) || k.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TwoParticleError::InvalidState("k must be finite, non-negative and increasing".into()));
        }
        if weights.iter().any(|w| !w.is_finite() || *w < 0.0) || g.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(TwoParticleError::InvalidState("weights and g must be finite, weights >= 0".into()));
        }
        let energies = k.iter().map(|&kk| dispersion([kk, 0.0, 0.0], mass)).collect::<Result<Vec<_>, _>>()?;
        Ok(SWaveState { k, weights, g, mass, energies })
    }

    /// Gaussian `g(k) = exp(-(k - k0)^2 / (2 width^2))` on `n` trapezoid
    /// points spanning `k0 +- 8 width`, clipped at zero.
    pub fn gaussian(k0: f64, width: f64, mass: f64, n: usize) -> Result<Self, TwoParticleError> {
        if !(k0 >= 0.0 && k0.is_finite()) || !(width > 0.0 && width.is_finite()) || n < 2 {
            return Err(TwoParticleError::InvalidState("need k0 >= 0, width > 0 and n >= 2".into()));
        }
        let lo = (k0 - 8.0 * width).max(0.0);
        let hi = k0 + 8.0 * width;
        let dk = (hi - lo) / (n - 1) as f64;
        let k: Vec<f64> = (0..n).map(|i| lo + dk * i as f64).collect();
        let weights = (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * dk } else { dk }).collect();
        let g = k.iter().map(|&kk| Complex64::new((-(kk - k0).powi(2) / (2.0 * width * width)).exp(), 0.0)).collect();
        Self::new(k, weights, g, mass)
    }

    pub fn k(&self) -> &[f64] {
        &self.k
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// `g` at `|k|`, linear between samples. `None` outside the grid.
    pub fn g_at(&self, k: f64) -> Option<Complex64> {
        let (first, last) = (self.k[0], *self.k.last().unwrap());
        if !(k >= first && k <= last) {
            return None;
        }
        let j = self.k.partition_point(|&v| v <= k);
        if j == 0 {
            return Some(self.g[0]);
        }
        if j >= self.k.len() {
            return Some(*self.g.last().unwrap());
        }
        let (k0, k1) = (self.k[j - 1], self.k[j]);
        let s = (k - k0) / (k1 - k0);
        Some(self.g[j - 1] * (1.0 - s) + self.g[j] * s)
    }

    /// Radial detection weights `|g|^2 k^2 dk`, normalized.
    pub fn radial_probabilities(&self) -> Result<Vec<f64>, TwoParticleError> {
        let raw: Vec<f64> =
            (0..self.k.len()).map(|i| self.g[i].norm_sqr() * self.k[i] * self.k[i] * self.weights[i]).collect();
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(TwoParticleError::InvalidState("g vanishes on every k > 0".into()));
        }
        Ok(raw.into_iter().map(|r| r / total).collect())
    }

    pub fn speed(&self, i: usize) -> f64 {
        if self.energies[i] == 0.0 {
            1.0
        } else {
            self.k[i] / self.energies[i]
        }
    }
}

/// `phi(r, t) = sum_k w k^2 j0(k r) g(k) exp(2 i E_k t)`.
pub fn swave_amplitude(state: &SWaveState, r: f64, t: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..state.k.len() {
        let k = state.k[i];
        let phase = Complex64::from_polar(1.0, 2.0 * state.energies[i] * t);
        acc += state.g[i] * phase * (state.weights[i] * k * k * j0(k * r));
    }
    acc
}

/// Plane wave left for the undetected particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneWave {
    pub momentum: Vec3,
    pub energy: f64,
    pub amplitude: Complex64,
}

/// Particle 2 after particle 1 is found with momentum `selected_k` at time `t`.
pub fn conditional_state(selected_k: Vec3, state: &SWaveState, t: f64) -> Result<PlaneWave, TwoParticleError> {
    let k = norm3(selected_k);
    let g = state.g_at(k).ok_or(TwoParticleError::OutsideSupport(k))?;
    if g == Complex64::new(0.0, 0.0) {
        return Err(TwoParticleError::OutsideSupport(k));
    }
    let energy = dispersion(selected_k, state.mass)?;
    Ok(PlaneWave { momentum: scale3(selected_k, -1.0), energy, amplitude: g * Complex64::from_polar(1.0, energy * t) })
}

/// Source, detector directions, distances and acceptance half-angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayGeometry {
    pub source: Vec3,
    pub directions: Vec<Vec3>,
    pub distances: Vec<f64>,
    pub half_angles: Vec<f64>,
}

impl DecayGeometry {
    pub fn new(source: Vec3, directions: Vec<Vec3>, distances: Vec<f64>, half_angles: Vec<f64>) -> Result<Self, TwoParticleError> {
        let bad = |m: &str| Err(TwoParticleError::DegenerateGeometry(m.into()));
        if directions.is_empty() || directions.len() != distances.len() || directions.len() != half_angles.len() {
            return bad("directions, distances and half-angles must have equal nonzero length");
        }
        if !source.iter().all(|c| c.is_finite()) {
            return bad("source must be finite");
        }
        if directions.iter().any(|d| (norm3(*d) - 1.0).abs() > AXIS_TOLERANCE) {
            return bad("directions must be unit vectors");
        }
        if distances.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
            return bad("distances must be positive");
        }
        if half_angles.iter().any(|a| !(*a > 0.0 && *a <= PI / 2.0)) {
            return bad("half-angles must lie in (0, pi/2]");
        }
        Ok(DecayGeometry { source, directions, distances, half_angles })
    }

    /// Two detectors along +x and +y.
    pub fn right_angle(distances: [f64; 2], half_angle: f64) -> Result<Self, TwoParticleError> {
        Self::new([0.0; 3], vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], distances.to_vec(), vec![half_angle; 2])
    }

    /// Two detectors along -x and +x.
    pub fn back_to_back(distance: f64, half_angle: f64) -> Result<Self, TwoParticleError> {
        Self::new([0.0; 3], vec![[-1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], vec![distance; 2], vec![half_angle; 2])
    }

    pub fn detector_position(&self, i: usize) -> Vec3 {
        add3(self.source, scale3(self.directions[i], self.distances[i]))
    }

    pub fn solid_angle(&self, i: usize) -> f64 {
        2.0 * PI * (1.0 - self.half_angles[i].cos())
    }

    /// Born weights of the acceptance cones, normalized over their union.
    pub fn born_weights(&self) -> Vec<f64> {
        let omegas: Vec<f64> = (0..self.directions.len()).map(|i| self.solid_angle(i)).collect();
        let total: f64 = omegas.iter().sum();
        omegas.into_iter().map(|o| o / total).collect()
    }

    /// Rejects pairs of cones that overlap directly or through the partner
    /// particle's antipodal direction. Either would let both detectors fire.
    pub fn check_exclusive(&self) -> Result<(), TwoParticleError> {
        for i in 0..self.directions.len() {
            for j in i + 1..self.directions.len() {
                let reach = self.half_angles[i] + self.half_angles[j];
                let c = dot3(self.directions[i], self.directions[j]).clamp(-1.0, 1.0);
                if c.acos() < reach {
                    return Err(TwoParticleError::DegenerateGeometry(format!("cones {i} and {j} overlap")));
                }
                if (-c).acos() < reach {
                    return Err(TwoParticleError::DegenerateGeometry(format!(
                        "cone {i} overlaps the antipode of cone {j}, so both could fire"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Ray arrivals at two detectors, in the rest frame and in a boosted frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrivalSchedule {
    pub rest: [FourVector; 2],
    pub boosted: [FourVector; 2],
    /// Detector whose arrival is earlier in the boosted frame; `None` for a tie.
    pub first: Option<usize>,
    /// Boosted-frame time between the two arrivals, `>= 0`.
    pub delay: f64,
}

fn order_events(a: &FourVector, b: &FourVector) -> (Option<usize>, f64) {
    let d = b.t - a.t;
    let scale = a.t.abs().max(b.t.abs()).max(1.0);
    if d.abs() <= 1e-12 * scale {
        (None, d.abs())
    } else if d > 0.0 {
        (Some(0), d)
    } else {
        (Some(1), -d)
    }
}

/// Arrival events of particles leaving the source at `t = 0` with `speed`
/// towards detectors 0 and 1.
pub fn arrival_schedule(geom: &DecayGeometry, speed: f64, b: &BoostParameters) -> Result<ArrivalSchedule, TwoParticleError> {
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(TwoParticleError::InvalidSpeed(speed));
    }
    if geom.directions.len() != 2 {
        return Err(TwoParticleError::DegenerateGeometry("need exactly two detectors".into()));
    }
    let rest = [0, 1].map(|i| FourVector::from_parts(geom.distances[i] / speed, geom.detector_position(i)));
    let boosted = [boost(&rest[0], b), boost(&rest[1], b)];
    let (first, delay) = order_events(&boosted[0], &boosted[1]);
    Ok(ArrivalSchedule { rest, boosted, first, delay })
}

/// Orthonormal `(u, w)` completing the unit vector `d` to a right-handed basis.
fn complete_basis(d: Vec3) -> (Vec3, Vec3) {
    let helper = if d[0].abs() < 0.9 { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = dot3(helper, d);
    let u = crate::spacetime::sub3(helper, scale3(d, c));
    let u = scale3(u, 1.0 / norm3(u));
    let w = [d[1] * u[2] - d[2] * u[1], d[2] * u[0] - d[0] * u[2], d[0] * u[1] - d[1] * u[0]];
    (u, w)
}

/// Uniform direction inside the cone of half-angle `alpha` around `d`.
fn sample_in_cone(d: Vec3, alpha: f64, rng: &mut ChaCha8Rng) -> Vec3 {
    let cos_t = 1.0 - rng.gen::<f64>() * (1.0 - alpha.cos());
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let phi = 2.0 * PI * rng.gen::<f64>();
    let (u, w) = complete_basis(d);
    add3(scale3(d, cos_t), add3(scale3(u, sin_t * phi.cos()), scale3(w, sin_t * phi.sin())))
}

/// One decay seen by two detectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTrial {
    pub trial: usize,
    pub seed: u64,
    pub fired: usize,
    pub silent: usize,
    /// First detector in the boosted-frame ordering; `None` for a tie.
    pub first: Option<usize>,
    pub delay: f64,
    pub arrivals_rest: [FourVector; 2],
    pub arrivals_boosted: [FourVector; 2],
    pub detected_momentum: Vec3,
    pub partner_momentum: Vec3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub geometry: DecayGeometry,
    pub boost: BoostParameters,
    pub seed: u64,
    pub born_weights: Vec<f64>,
    pub fired_counts: [usize; 2],
    pub first_counts: [usize; 2],
    pub ties: usize,
    pub trials: Vec<DecayTrial>,
}

/// Decays watched by two detectors with exclusive acceptance cones.
///
/// Each trial samples `|k|` from the radial Born weights. The detectors then
/// measure in the boosted-frame arrival order: the first one fires with its
/// Born weight, and otherwise the reduced state makes the second one fire.
/// A tie is measured jointly. The partner always leaves with `-k`.
///
/// With equal distances the rest-frame arrivals are simultaneous, so
/// reversing the boost reverses the order. With unequal distances the two
/// arrivals may be timelike separated, and then every frame agrees on the
/// order.
pub fn run_90deg_scenario(
    geom: &DecayGeometry,
    state: &SWaveState,
    b: &BoostParameters,
    n_trials: usize,
    seed: u64,
    parallel: bool,
) -> Result<DecayReport, TwoParticleError> {
    if geom.directions.len() != 2 {
        return Err(TwoParticleError::DegenerateGeometry("need exactly two detectors".into()));
    }
    geom.check_exclusive()?;
    let radial = state.radial_probabilities()?;
    let born = geom.born_weights();
    let stream = crate::seeding::stream_id("decay_90");
    let one = |i: usize| -> Result<DecayTrial, TwoParticleError> {
        let trial_seed = derive_seed(seed, stream, i as u64);
        let mut rng = rng_from_seed(trial_seed);
        let ki = sample_with(&radial, &mut rng);
        let sched = arrival_schedule(geom, state.speed(ki), b)?;
        let fired = match sched.first {
            Some(f) => {
                if rng.gen::<f64>() < born[f] {
                    f
                } else {
                    1 - f
                }
            }
            None => sample_with(&born, &mut rng),
        };
        let n = sample_in_cone(geom.directions[fired], geom.half_angles[fired], &mut rng);
        let detected = scale3(n, state.k[ki]);
        Ok(DecayTrial {
            trial: i,
            seed: trial_seed,
            fired,
            silent: 1 - fired,
            first: sched.first,
            delay: sched.delay,
            arrivals_rest: sched.rest,
            arrivals_boosted: sched.boosted,
            detected_momentum: detected,
            partner_momentum: scale3(detected, -1.0),
        })
    };
    let trials: Vec<DecayTrial> = if parallel {
        (0..n_trials).into_par_iter().map(one).collect::<Result<_, _>>()?
    } else {
        (0..n_trials).map(one).collect::<Result<_, _>>()?
    };
    let mut fired_counts = [0; 2];
    let mut first_counts = [0; 2];
    let mut ties = 0;
    for t in &trials {
        fired_counts[t.fired] += 1;
        match t.first {
            Some(f) => first_counts[f] += 1,
            None => ties += 1,
        }
    }
    Ok(DecayReport {
        geometry: geom.clone(),
        boost: *b,
        seed,
        born_weights: born,
        fired_counts,
        first_counts,
        ties,
        trials,
    })
}

/// Equal-solid-angle partition of the outgoing hemisphere `theta in [0, pi/2]`:
/// `rings` bands of equal `cos(theta)` width, each cut into `sectors`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HemisphereBins {
    pub rings: usize,
    pub sectors: usize,
}

impl HemisphereBins {
    pub fn new(rings: usize, sectors: usize) -> Result<Self, TwoParticleError> {
        if rings == 0 || sectors == 0 {
            return Err(TwoParticleError::InvalidProfile("need at least one ring and one sector".into()));
        }
        Ok(HemisphereBins { rings, sectors })
    }

    pub fn len(&self) -> usize {
        self.rings * self.sectors
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `cos(theta)` range `(lo, hi)` of ring `r`; ring 0 touches the pole.
    pub fn ring_cos(&self, r: usize) -> (f64, f64) {
        let step = 1.0 / self.rings as f64;
        (1.0 - (r + 1) as f64 * step, 1.0 - r as f64 * step)
    }

    pub fn bin_of(&self, theta: f64, phi: f64) -> usize {
        let r = (((1.0 - theta.cos()) * self.rings as f64) as usize).min(self.rings - 1);
        let s = ((phi.rem_euclid(2.0 * PI) / (2.0 * PI) * self.sectors as f64) as usize).min(self.sectors - 1);
        r * self.sectors + s
    }
}

/// Angular Born density on the hemisphere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AngularProfile {
    Isotropic,
    /// Density proportional to `cos(theta)^n`.
    Cosine { n: u32 },
    /// Per-bin weights, uniform inside each bin.
    Table { weights: Vec<f64> },
}

impl AngularProfile {
    /// Exact probability of each bin.
    pub fn bin_probabilities(&self, bins: &HemisphereBins) -> Result<Vec<f64>, TwoParticleError> {
        let raw: Vec<f64> = match self {
            AngularProfile::Isotropic => vec![1.0; bins.len()],
            AngularProfile::Cosine { n } => (0..bins.len())
                .map(|i| {
                    let (lo, hi) = bins.ring_cos(i / bins.sectors);
                    let p = *n as i32 + 1;
                    hi.powi(p) - lo.max(0.0).powi(p)
                })
                .collect(),
            AngularProfile::Table { weights } => {
                if weights.len() != bins.len() {
                    return Err(TwoParticleError::InvalidProfile(format!(
                        "table has {} weights for {} bins",
                        weights.len(),
                        bins.len()
                    )));
                }
                if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
                    return Err(TwoParticleError::InvalidProfile("weights must be finite and >= 0".into()));
                }
                weights.clone()
            }
        };
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return Err(TwoParticleError::InvalidProfile("profile has zero total weight".into()));
        }
        Ok(raw.into_iter().map(|r| r / total).collect())
    }
}

/// Single screen hit; every other bin of the trial stays dark.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hit {
    pub trial: usize,
    pub theta: f64,
    pub phi: f64,
    pub bin: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreenRun {
    pub bins: HemisphereBins,
    pub profile: AngularProfile,
    pub seed: u64,
    pub probabilities: Vec<f64>,
    pub counts: Vec<usize>,
    pub hits: Vec<Hit>,
}

impl ScreenRun {
    /// CSV with columns `theta,phi,trial,bin`.
    pub fn write_hits_csv<W: Write>(&self, out: W) -> Result<(), TwoParticleError> {
        write_hits_csv(&self.hits, out)
    }
}

pub fn write_hits_csv<W: Write>(hits: &[Hit], out: W) -> Result<(), TwoParticleError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["theta", "phi", "trial", "bin"])?;
    for h in hits {
        w.write_record([h.theta.to_string(), h.phi.to_string(), h.trial.to_string(), h.bin.to_string()])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

fn sample_hit(profile: &AngularProfile, bins: &HemisphereBins, probs: &[f64], rng: &mut ChaCha8Rng) -> (f64, f64) {
    let (cos_t, phi) = match profile {
        AngularProfile::Isotropic => (1.0 - rng.gen::<f64>(), 2.0 * PI * rng.gen::<f64>()),
        AngularProfile::Cosine { n } => {
            let u: f64 = 1.0 - rng.gen::<f64>();
            (u.powf(1.0 / (*n as f64 + 1.0)), 2.0 * PI * rng.gen::<f64>())
        }
        AngularProfile::Table { .. } => {
            let bin = sample_with(probs, rng);
            let (lo, hi) = bins.ring_cos(bin / bins.sectors);
            let s = (bin % bins.sectors) as f64;
            let width = 2.0 * PI / bins.sectors as f64;
            (hi - rng.gen::<f64>() * (hi - lo), width * (s + rng.gen::<f64>()))
        }
    };
    (cos_t.clamp(0.0, 1.0).acos(), phi)
}

/// Electrons emitted through a hole onto a hemispherical screen, one hit per trial.
pub fn run_einstein_screen(
    n_trials: usize,
    profile: &AngularProfile,
    bins: HemisphereBins,
    seed: u64,
    parallel: bool,
) -> Result<ScreenRun, TwoParticleError> {
    let probabilities = profile.bin_probabilities(&bins)?;
    let stream = crate::seeding::stream_id("einstein_screen");
    let one = |i: usize| {
        let mut rng = rng_from_seed(derive_seed(seed, stream, i as u64));
        let (theta, phi) = sample_hit(profile, &bins, &probabilities, &mut rng);
        Hit { trial: i, theta, phi, bin: bins.bin_of(theta, phi) }
    };
    let hits: Vec<Hit> =
        if parallel { (0..n_trials).into_par_iter().map(one).collect() } else { (0..n_trials).map(one).collect() };
    let mut counts = vec![0; bins.len()];
    for h in &hits {
        counts[h.bin] += 1;
    }
    Ok(ScreenRun { bins, profile: profile.clone(), seed, probabilities, counts, hits })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn j0_values() {
        assert_eq!(j0(0.0), 1.0);
        assert!((j0(PI) - 0.0).abs() < 1e-15);
        assert!((j0(1e-5) - (1e-5f64).sin() / 1e-5).abs() < 1e-15);
    }

    #[test]
    fn amplitude_at_origin_is_weighted_sum() {
        let s = SWaveState::gaussian(1.0, 0.1, 1.0, 101).unwrap();
        let expected: Complex64 = (0..101).map(|i| s.g[i] * s.k[i] * s.k[i] * s.weights[i]).sum();
        assert!((swave_amplitude(&s, 0.0, 0.0) - expected).norm() < 1e-15);
    }

    #[test]
    fn conditional_state_examples() {
        let s = SWaveState::gaussian(1.0, 0.1, 1.0, 201).unwrap();
        let pw = conditional_state([1.0, 0.0, 0.0], &s, 0.0).unwrap();
        assert_eq!(pw.momentum, [-1.0, 0.0, 0.0]);
        assert!((pw.amplitude - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let total = add3([1.0, 0.0, 0.0], pw.momentum);
        assert_eq!(total, [0.0, 0.0, 0.0]);
        assert!(matches!(conditional_state([5.0, 0.0, 0.0], &s, 0.0), Err(TwoParticleError::OutsideSupport(_))));
    }

    #[test]
    fn back_to_back_schedule() {
        let g = DecayGeometry::back_to_back(1.0, 0.1).unwrap();
        let at_rest = arrival_schedule(&g, 0.7, &BoostParameters::identity()).unwrap();
        assert_eq!(at_rest.first, None);
        assert_eq!(at_rest.delay, 0.0);
        let fwd = arrival_schedule(&g, 0.7, &BoostParameters::along_x(0.5).unwrap()).unwrap();
        assert_eq!(fwd.first, Some(1));
        assert!((fwd.delay - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        let back = arrival_schedule(&g, 0.7, &BoostParameters::along_x(-0.5).unwrap()).unwrap();
        assert_eq!(back.first, Some(0));
    }

    #[test]
    fn overlapping_cones_rejected() {
        let g = DecayGeometry::new([0.0; 3], vec![[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]], vec![1.0, 2.0], vec![0.1, 0.1]).unwrap();
        assert!(g.check_exclusive().is_err());
        assert!(DecayGeometry::back_to_back(1.0, 0.1).unwrap().check_exclusive().is_err());
        assert!(DecayGeometry::right_angle([1.0, 1.0], 0.3).unwrap().check_exclusive().is_ok());
        assert!(DecayGeometry::right_angle([1.0, 1.0], 0.8).unwrap().check_exclusive().is_err());
    }

    #[test]
    fn concentrated_profile_hits_one_bin() {
        let bins = HemisphereBins::new(3, 4).unwrap();
        let mut w = vec![0.0; 12];
        w[7] = 1.0;
        let run = run_einstein_screen(500, &AngularProfile::Table { weights: w }, bins, 1, false).unwrap();
        assert_eq!(run.counts[7], 500);
        assert_eq!(run.hits.len(), 500);
    }

    #[test]
    fn cone_samples_stay_in_cone() {
        let mut rng = rng_from_seed(4);
        let d = [0.0, 0.6, 0.8];
        for _ in 0..1000 {
            let n = sample_in_cone(d, 0.2, &mut rng);
            assert!((norm3(n) - 1.0).abs() < 1e-12);
            assert!(dot3(n, d) >= 0.2f64.cos() - 1e-12);
        }
    }
}
