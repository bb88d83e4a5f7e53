//! Free scalar wave packets.
//!
//! A packet is a momentum amplitude `w(k)` sampled on a [`MomentumGrid`]. The
//! position-space field is the plane-wave superposition
//!
//! ```text
//! phi(t, x) = sum_k  weight_k / k0 * w(k) * exp(-i (k0 t - k.x)),   k0 = sqrt(k^2 + m^2)
//! ```
//!
//! i.e. the `d^3k / k0` measure with the positive-frequency phase
//! `exp(-i k.x)` in Minkowski notation. The norm uses the other measure,
//! `d^3k / (2 k0)`. The two are kept as separate code paths on purpose:
//! `synthesis_coefficients` applies `1/k0`, `norm` applies `1/(2 k0)`.

pub mod grid;
pub mod transform;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;
use std::io::Write;
use thiserror::Error;

use crate::spacetime::{dot3, norm3, BoostParameters, FourVector, Vec3};
pub use grid::{Axis, Dimensionality, MomentumGrid, SpatialGrid, DEFAULT_1D_SAMPLES, MAX_3D_AXIS};
use transform::Sign;

#[derive(Debug, Error)]
pub enum WavepacketError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("mass must be finite and >= 0, got {0}")]
    NegativeMass(f64),
    #[error("mode with zero energy on the grid (massless field sampled at k = 0)")]
    ZeroEnergyMode,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("non-finite amplitude or coordinate")]
    NonFinite,
    #[error("momentum width must be positive, got {0}")]
    InvalidWidth(f64),
    #[error("grid truncates {fraction:.3e} of the Gaussian mass (limit 1e-6)")]
    Truncated { fraction: f64 },
    #[error("field grid has no conjugate momentum grid: {0}")]
    NotConjugable(String),
    #[error("amplitudes live on different grids or masses")]
    GridMismatch,
    #[error("3-vector {0:?} has components outside a 1D grid's axis")]
    DimensionMismatch(Vec3),
    #[error("zero amplitude has no normalized form")]
    ZeroNorm,
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Largest Gaussian mass fraction a packet grid may cut off.
pub const MAX_TRUNCATION: f64 = 1e-6;

/// `sqrt(|k|^2 + m^2)`.
pub fn dispersion(k: Vec3, m: f64) -> Result<f64, WavepacketError> {
    if !(m.is_finite() && m >= 0.0) {
        return Err(WavepacketError::NegativeMass(m));
    }
    Ok((dot3(k, k) + m * m).sqrt())
}

/// Group velocity `k / k0`.
pub fn group_velocity(k: Vec3, m: f64) -> Result<Vec3, WavepacketError> {
    let e = dispersion(k, m)?;
    if e == 0.0 {
        return Err(WavepacketError::ZeroEnergyMode);
    }
    Ok([k[0] / e, k[1] / e, k[2] / e])
}

/// Momentum-space amplitude `w(k)` of a scalar packet with mass `m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MomentumAmplitude {
    grid: MomentumGrid,
    values: Vec<Complex64>,
    mass: f64,
    #[serde(skip)]
    energies: Vec<f64>,
}

impl MomentumAmplitude {
    pub fn new(grid: MomentumGrid, values: Vec<Complex64>, mass: f64) -> Result<Self, WavepacketError> {
        if values.len() != grid.len() {
            return Err(WavepacketError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(WavepacketError::NonFinite);
        }
        let energies = (0..grid.len()).map(|i| dispersion(grid.k(i), mass)).collect::<Result<Vec<_>, _>>()?;
        if energies.contains(&0.0) {
            return Err(WavepacketError::ZeroEnergyMode);
        }
        Ok(MomentumAmplitude { grid, values, mass, energies })
    }

    pub fn zeros(grid: MomentumGrid, mass: f64) -> Result<Self, WavepacketError> {
        let n = grid.len();
        Self::new(grid, vec![Complex64::new(0.0, 0.0); n], mass)
    }

    /// Amplitude with a single nonzero mode at flat index `index`.
    pub fn single_mode(grid: MomentumGrid, mass: f64, index: usize, value: Complex64) -> Result<Self, WavepacketError> {
        let mut amp = Self::zeros(grid, mass)?;
        amp.values[index] = value;
        Ok(amp)
    }

    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// On-shell energies `k0` per sample.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= c);
        out
    }

    /// `a * self + b * other` on a shared grid.
    pub fn combine(&self, a: Complex64, other: &MomentumAmplitude, b: Complex64) -> Result<Self, WavepacketError> {
        if self.grid != other.grid || self.mass != other.mass {
            return Err(WavepacketError::GridMismatch);
        }
        let mut out = self.clone();
        for (v, w) in out.values.iter_mut().zip(&other.values) {
            *v = a * *v + b * w;
        }
        Ok(out)
    }

    /// Coefficients `weight / k0 * w * exp(-i k0 t)` multiplying `exp(i k.x)`.
    fn synthesis_coefficients(&self, t: f64) -> Vec<Complex64> {
        self.values
            .iter()
            .zip(&self.energies)
            .zip(self.grid.weights())
            .map(|((w, &e), &wt)| w * (wt / e) * Complex64::from_polar(1.0, -e * t))
            .collect()
    }

    pub(crate) fn with_values(&self, values: Vec<Complex64>) -> Self {
        MomentumAmplitude { grid: self.grid.clone(), values, mass: self.mass, energies: self.energies.clone() }
    }

    /// Writes `index,kx[,ky,kz],re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), WavepacketError> {
        let three = self.grid.dim() == Dimensionality::Three;
        let mut w = csv::Writer::from_writer(out);
        if three {
            w.write_record(["index", "kx", "ky", "kz", "re", "im"])?;
        } else {
            w.write_record(["index", "kx", "re", "im"])?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let k = self.grid.k(i);
            let mut row = vec![i.to_string(), k[0].to_string()];
            if three {
                row.push(k[1].to_string());
                row.push(k[2].to_string());
            }
            row.push(v.re.to_string());
            row.push(v.im.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// `phi(t, x)` at one event, by direct quadrature over all modes.
pub fn synthesize(amp: &MomentumAmplitude, event: &FourVector) -> Complex64 {
    let x = event.space();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..amp.len() {
        let k = amp.grid.k(i);
        let e = amp.energies[i];
        let phase = dot3(k, x) - e * event.t;
        acc += amp.values[i] * (amp.grid.weight(i) / e) * Complex64::from_polar(1.0, phase);
    }
    acc
}

/// [`synthesize`] at many events, in parallel, order preserved.
pub fn synthesize_many(amp: &MomentumAmplitude, events: &[FourVector]) -> Vec<Complex64> {
    events.par_iter().map(|e| synthesize(amp, e)).collect()
}

/// Relativistic norm `sum |w|^2 weight / (2 k0)`.
pub fn norm(amp: &MomentumAmplitude) -> f64 {
    amp.values
        .iter()
        .zip(&amp.energies)
        .zip(amp.grid.weights())
        .map(|((w, &e), &wt)| w.norm_sqr() * wt / (2.0 * e))
        .sum()
}

/// Mean momentum under the `1/(2 k0)` measure.
pub fn mean_momentum(amp: &MomentumAmplitude) -> Result<Vec3, WavepacketError> {
    let total = norm(amp);
    if total == 0.0 {
        return Err(WavepacketError::ZeroNorm);
    }
    let mut m = [0.0; 3];
    for i in 0..amp.len() {
        let rho = amp.values[i].norm_sqr() * amp.grid.weight(i) / (2.0 * amp.energies[i]);
        let k = amp.grid.k(i);
        for a in 0..3 {
            m[a] += rho * k[a];
        }
    }
    Ok([m[0] / total, m[1] / total, m[2] / total])
}

/// Complex field samples on a spatial grid at a single coordinate time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionField {
    grid: SpatialGrid,
    values: Vec<Complex64>,
    time: f64,
    /// Frame the samples are expressed in, as a boost from the lab.
    frame: BoostParameters,
}

impl PositionField {
    /// A lab-frame field.
    pub fn new(grid: SpatialGrid, values: Vec<Complex64>, time: f64) -> Result<Self, WavepacketError> {
        Self::in_frame(grid, values, time, BoostParameters::identity())
    }

    pub fn in_frame(
        grid: SpatialGrid,
        values: Vec<Complex64>,
        time: f64,
        frame: BoostParameters,
    ) -> Result<Self, WavepacketError> {
        if values.len() != grid.len() {
            return Err(WavepacketError::LengthMismatch { expected: grid.len(), got: values.len() });
        }
        if !time.is_finite() || values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(WavepacketError::NonFinite);
        }
        Ok(PositionField { grid, values, time, frame })
    }

    pub fn grid(&self) -> &SpatialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn frame(&self) -> &BoostParameters {
        &self.frame
    }

    pub fn with_values(&self, values: Vec<Complex64>) -> Result<Self, WavepacketError> {
        Self::in_frame(self.grid.clone(), values, self.time, self.frame)
    }

    /// `sum |phi|^2 dV`.
    pub fn l2_norm_sqr(&self) -> f64 {
        self.values.iter().zip(self.grid.volume_weights()).map(|(v, w)| v.norm_sqr() * w).sum()
    }

    /// Mean and variance of `|phi|^2` along grid axis `axis`.
    pub fn moments_along(&self, axis: usize) -> Result<(f64, f64), WavepacketError> {
        let vol = self.grid.volume_weights();
        let mut total = 0.0;
        let mut first = 0.0;
        let mut second = 0.0;
        for (i, (v, w)) in self.values.iter().zip(&vol).enumerate() {
            let rho = v.norm_sqr() * w;
            let x = self.grid.point(i)[axis];
            total += rho;
            first += rho * x;
            second += rho * x * x;
        }
        if total == 0.0 {
            return Err(WavepacketError::ZeroNorm);
        }
        let mean = first / total;
        Ok((mean, second / total - mean * mean))
    }

    /// Range of `x . direction` over samples with `|phi|^2 >= fraction * max |phi|^2`.
    pub fn extent_along(&self, direction: Vec3, fraction: f64) -> Option<(f64, f64)> {
        let peak = self.values.iter().map(|v| v.norm_sqr()).fold(0.0, f64::max);
        if peak == 0.0 {
            return None;
        }
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for (i, v) in self.values.iter().enumerate() {
            if v.norm_sqr() >= fraction * peak {
                let s = dot3(self.grid.point(i), direction);
                lo = lo.min(s);
                hi = hi.max(s);
            }
        }
        Some((lo, hi))
    }

    /// Writes `index,x[,y,z],re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), WavepacketError> {
        let three = self.grid.dim() == Dimensionality::Three;
        let mut w = csv::Writer::from_writer(out);
        if three {
            w.write_record(["index", "x", "y", "z", "re", "im"])?;
        } else {
            w.write_record(["index", "x", "re", "im"])?;
        }
        for (i, v) in self.values.iter().enumerate() {
            let p = self.grid.point(i);
            let mut row = vec![i.to_string(), p[0].to_string()];
            if three {
                row.push(p[1].to_string());
                row.push(p[2].to_string());
            }
            row.push(v.re.to_string());
            row.push(v.im.to_string());
            w.write_record(&row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Lab-frame field at time `t` on `grid`. Uses the FFT route when `grid` is
/// conjugate to the amplitude's momentum grid, the direct sum otherwise.
pub fn evolve(amp: &MomentumAmplitude, t: f64, grid: &SpatialGrid) -> Result<PositionField, WavepacketError> {
    if grid.axes().len() != amp.grid.axes().len() {
        return Err(WavepacketError::InvalidGrid("spatial and momentum grids differ in dimension".into()));
    }
    let coeffs = amp.synthesis_coefficients(t);
    let values = transform::auto(&coeffs, amp.grid.tensor(), grid.tensor(), Sign::Plus);
    PositionField::new(grid.clone(), values, t)
}

/// [`evolve`] onto the conjugate spatial grid, where inversion is exact.
pub fn momentum_to_position(amp: &MomentumAmplitude, t: f64) -> PositionField {
    evolve(amp, t, &amp.grid.conjugate_spatial_grid()).expect("conjugate grid matches dimension")
}

/// Fraction of the norm found in the outermost 10% of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AliasingWarning {
    pub outer_fraction: f64,
}

/// Share of norm above which the outer band triggers [`AliasingWarning`].
pub const ALIASING_THRESHOLD: f64 = 0.01;

#[derive(Debug, Clone)]
pub struct Inversion {
    pub amplitude: MomentumAmplitude,
    pub aliasing: Option<AliasingWarning>,
}

/// Inverts [`evolve`]: Fourier-analyzes the field on its conjugate momentum
/// grid and undoes the `weight / k0 * exp(-i k0 t)` factor per mode.
pub fn position_to_momentum(field: &PositionField, m: f64) -> Result<Inversion, WavepacketError> {
    let kgrid = field
        .grid()
        .conjugate_momentum_grid()
        .ok_or_else(|| WavepacketError::NotConjugable("every axis must be symmetric with at least 2 points".into()))?;
    let n = kgrid.len() as f64;
    let analyzed = transform::auto(field.values(), field.grid().tensor(), kgrid.tensor(), Sign::Minus);
    let zero = MomentumAmplitude::zeros(kgrid, m)?;
    let values: Vec<Complex64> = analyzed
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let e = zero.energies[i];
            c / n * (e / zero.grid.weight(i)) * Complex64::from_polar(1.0, e * field.time())
        })
        .collect();
    let amplitude = zero.with_values(values);
    let aliasing = outer_band_fraction(&amplitude)
        .filter(|f| *f > ALIASING_THRESHOLD)
        .map(|outer_fraction| AliasingWarning { outer_fraction });
    Ok(Inversion { amplitude, aliasing })
}

fn outer_band_fraction(amp: &MomentumAmplitude) -> Option<f64> {
    let total = norm(amp);
    if total == 0.0 {
        return None;
    }
    let shape = amp.grid.tensor().shape();
    let mut outer = 0.0;
    for i in 0..amp.len() {
        let idx = amp.grid.tensor().unflatten(i);
        let is_outer = shape.iter().enumerate().any(|(a, &n)| {
            let band = (0.05 * n as f64).ceil() as usize;
            idx[a] < band || idx[a] >= n - band
        });
        if is_outer {
            outer += amp.values[i].norm_sqr() * amp.grid.weight(i) / (2.0 * amp.energies[i]);
        }
    }
    Some(outer / total)
}

/// Gaussian amplitude `w(k) ~ exp(-|k - center|^2 / (4 sigma^2))`, scaled to unit norm.
pub fn gaussian_packet(
    center_k: Vec3,
    sigma_k: f64,
    m: f64,
    grid: &MomentumGrid,
) -> Result<MomentumAmplitude, WavepacketError> {
    if !(sigma_k.is_finite() && sigma_k > 0.0) {
        return Err(WavepacketError::InvalidWidth(sigma_k));
    }
    let dims = grid.axes().len();
    if center_k[dims..].iter().any(|c| *c != 0.0) {
        return Err(WavepacketError::DimensionMismatch(center_k));
    }
    let kept: f64 = grid
        .axes()
        .iter()
        .enumerate()
        .map(|(a, axis)| {
            let z = std::f64::consts::SQRT_2 * sigma_k;
            let cut = 0.5 * erfc((axis.last() - center_k[a]) / z) + 0.5 * erfc((center_k[a] - axis.first()) / z);
            1.0 - cut
        })
        .product();
    let fraction = 1.0 - kept;
    if fraction > MAX_TRUNCATION {
        return Err(WavepacketError::Truncated { fraction });
    }
    let values = (0..grid.len())
        .map(|i| {
            let k = grid.k(i);
            let d = [k[0] - center_k[0], k[1] - center_k[1], k[2] - center_k[2]];
            Complex64::new((-dot3(d, d) / (4.0 * sigma_k * sigma_k)).exp(), 0.0)
        })
        .collect();
    let amp = MomentumAmplitude::new(grid.clone(), values, m)?;
    let n = norm(&amp);
    if n == 0.0 {
        return Err(WavepacketError::ZeroNorm);
    }
    Ok(amp.scaled(Complex64::new(1.0 / n.sqrt(), 0.0)))
}

/// Time for a packet starting at `start` with momentum `k` to reach `target`
/// moving along the straight line at its group velocity.
pub fn crossing_time(start: Vec3, target: Vec3, k: Vec3, m: f64) -> Result<f64, WavepacketError> {
    let v = norm3(group_velocity(k, m)?);
    if v == 0.0 {
        return Err(WavepacketError::ZeroEnergyMode);
    }
    let d = [target[0] - start[0], target[1] - start[1], target[2] - start[2]];
    Ok(norm3(d) / v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(n: usize, k_max: f64, center: f64, sigma: f64, m: f64) -> MomentumAmplitude {
        gaussian_packet([center, 0.0, 0.0], sigma, m, &MomentumGrid::symmetric_1d(n, k_max).unwrap()).unwrap()
    }

    #[test]
    fn dispersion_examples() {
        assert_eq!(dispersion([0.0; 3], 2.5).unwrap(), 2.5);
        assert_eq!(dispersion([3.0, 0.0, 0.0], 0.0).unwrap(), 3.0);
        assert_eq!(dispersion([3.0, 0.0, 0.0], 4.0).unwrap(), 5.0);
        assert!(matches!(dispersion([1.0, 0.0, 0.0], -1.0), Err(WavepacketError::NegativeMass(_))));
    }

    #[test]
    fn single_mode_is_weighted_plane_wave() {
        let grid = MomentumGrid::symmetric_1d(16, 2.0).unwrap();
        let amp = MomentumAmplitude::single_mode(grid.clone(), 1.0, 11, Complex64::new(1.0, 0.0)).unwrap();
        let k = grid.k(11);
        let e = dispersion(k, 1.0).unwrap();
        let ev = FourVector::new(0.7, -1.3, 0.0, 0.0);
        let v = synthesize(&amp, &ev);
        assert!((v.norm() - grid.weight(11) / e).abs() < 1e-15);
        let expected = Complex64::from_polar(grid.weight(11) / e, k[0] * ev.x - e * ev.t);
        assert!((v - expected).norm() < 1e-15);
    }

    #[test]
    fn norm_scaling() {
        let amp = packet(256, 3.0, 0.0, 0.3, 1.0);
        assert!((norm(&amp) - 1.0).abs() < 1e-10);
        let doubled = amp.scaled(Complex64::new(2.0, 0.0));
        assert!((norm(&doubled) - 4.0).abs() < 1e-12);
        let zero = MomentumAmplitude::zeros(amp.grid().clone(), 1.0).unwrap();
        assert_eq!(norm(&zero), 0.0);
    }

    #[test]
    fn massless_zero_mode_rejected() {
        let grid = MomentumGrid::symmetric_1d(5, 1.0).unwrap();
        assert!(matches!(MomentumAmplitude::zeros(grid, 0.0), Err(WavepacketError::ZeroEnergyMode)));
        let even = MomentumGrid::symmetric_1d(6, 1.0).unwrap();
        assert!(MomentumAmplitude::zeros(even, 0.0).is_ok());
    }

    #[test]
    fn evolve_at_zero_matches_pointwise_synthesis() {
        let amp = packet(128, 3.0, 0.4, 0.3, 1.0);
        let xg = SpatialGrid::uniform_line(41, -10.0, 10.0).unwrap();
        let field = evolve(&amp, 0.0, &xg).unwrap();
        for (i, v) in field.values().iter().enumerate() {
            let s = synthesize(&amp, &FourVector::from_parts(0.0, xg.point(i)));
            assert!((v - s).norm() < 1e-12);
        }
    }

    #[test]
    fn conjugate_route_matches_direct_synthesis() {
        let amp = packet(200, 3.0, 0.2, 0.3, 1.0);
        let field = momentum_to_position(&amp, 2.5);
        for i in (0..200).step_by(7) {
            let s = synthesize(&amp, &FourVector::from_parts(2.5, field.grid().point(i)));
            assert!((field.values()[i] - s).norm() < 1e-12, "i={i}");
        }
    }

    #[test]
    fn zero_field_inverts_to_zero() {
        let grid = MomentumGrid::symmetric_1d(64, 2.0).unwrap().conjugate_spatial_grid();
        let field = PositionField::new(grid, vec![Complex64::new(0.0, 0.0); 64], 1.0).unwrap();
        let inv = position_to_momentum(&field, 1.0).unwrap();
        assert!(inv.amplitude.values().iter().all(|v| v.norm() == 0.0));
        assert!(inv.aliasing.is_none());
    }

    #[test]
    fn explicit_grid_cannot_be_inverted() {
        let field = PositionField::new(SpatialGrid::line(vec![0.0, 1.0, 3.0]).unwrap(), vec![Complex64::new(1.0, 0.0); 3], 0.0)
            .unwrap();
        assert!(matches!(position_to_momentum(&field, 1.0), Err(WavepacketError::NotConjugable(_))));
    }

    #[test]
    fn aliasing_flagged_for_edge_heavy_amplitude() {
        let grid = MomentumGrid::symmetric_1d(64, 2.0).unwrap();
        let amp = MomentumAmplitude::single_mode(grid, 1.0, 1, Complex64::new(1.0, 0.0)).unwrap();
        let field = momentum_to_position(&amp, 0.0);
        let inv = position_to_momentum(&field, 1.0).unwrap();
        assert!(inv.aliasing.unwrap().outer_fraction > 0.99);
    }

    #[test]
    fn truncating_grid_rejected() {
        let grid = MomentumGrid::symmetric_1d(64, 1.0).unwrap();
        assert!(matches!(gaussian_packet([0.5, 0.0, 0.0], 0.2, 1.0, &grid), Err(WavepacketError::Truncated { .. })));
        assert!(gaussian_packet([0.0, 0.0, 0.0], 1.0 / 6.0, 1.0, &grid).is_ok());
        assert!(matches!(gaussian_packet([0.0, 0.0, 0.0], 0.0, 1.0, &grid), Err(WavepacketError::InvalidWidth(_))));
        assert!(matches!(
            gaussian_packet([0.0, 0.1, 0.0], 0.1, 1.0, &grid),
            Err(WavepacketError::DimensionMismatch(_))
        ));
    }

    #[test]
    fn centered_packet_has_zero_mean_momentum() {
        let amp = packet(257, 2.0, 0.0, 0.2, 1.0);
        assert!(mean_momentum(&amp).unwrap()[0].abs() < 1e-15);
    }

    #[test]
    fn csv_layout() {
        let grid = MomentumGrid::symmetric_1d(4, 1.0).unwrap();
        let amp = MomentumAmplitude::single_mode(grid, 1.0, 2, Complex64::new(0.5, -0.25)).unwrap();
        let mut buf = Vec::new();
        amp.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,kx,re,im");
        assert_eq!(lines.len(), 5);
        assert!(lines[3].starts_with("2,") && lines[3].ends_with(",0.5,-0.25"));
    }
}
