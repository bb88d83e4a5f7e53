//! Scalar Lorentz action on wave functions, `phi'(x') = phi(Lambda^-1 x')`.
//!
//! Two independent routes:
//! - [`pullback_transform`] maps each target event back to the original frame
//!   and evaluates the original packet there;
//! - [`momentum_boost`] resamples the momentum amplitude at
//!   `Lambda^-1 k'`, relying on the invariance of `d^3k / k0`.
//!
//! A boosted packet is returned as a [`SpacetimeSampleSet`], never as a
//! [`PositionField`](crate::wavepacket::PositionField): one time slice in the
//! new frame spans many times in the old one. Getting a single-time state in
//! the new frame goes through `momentum_boost` + `evolve` (whole history) or
//! through [`quasi_2d_residual`], which reports the error of pretending the
//! slice has one time.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::io::Write;
use thiserror::Error;

use crate::spacetime::{boost, dot3, BoostParameters, FourVector, Vec3};
use crate::wavepacket::{
    self, synthesize, synthesize_many, Axis, MomentumAmplitude, SpatialGrid, WavepacketError,
};

#[derive(Debug, Error)]
pub enum LorentzActionError {
    #[error(transparent)]
    Wavepacket(#[from] WavepacketError),
    #[error("boosted support leaves the momentum grid ({lost_fraction:.3e} of the norm would be lost)")]
    SupportOverflow { lost_fraction: f64 },
    #[error("1D packets can only be boosted along the grid axis, got axis {0:?}")]
    AxisNotAlongGrid(Vec3),
    #[error("spatial extent must be >= 0, got {0}")]
    NegativeExtent(f64),
    #[error("exact slice has zero norm")]
    ZeroNorm,
    #[error("expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

/// Norm fraction allowed to fall off the grid in [`momentum_boost`].
pub const OVERFLOW_TOLERANCE: f64 = 1e-10;

/// Field values at events that need not share a time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeSampleSet {
    events: Vec<FourVector>,
    values: Vec<Complex64>,
    /// Frame of the event coordinates, as a boost from the lab.
    frame: BoostParameters,
}

impl SpacetimeSampleSet {
    pub fn new(events: Vec<FourVector>, values: Vec<Complex64>, frame: BoostParameters) -> Result<Self, LorentzActionError> {
        if events.len() != values.len() {
            return Err(LorentzActionError::LengthMismatch { expected: events.len(), got: values.len() });
        }
        Ok(SpacetimeSampleSet { events, values, frame })
    }

    pub fn events(&self) -> &[FourVector] {
        &self.events
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn frame(&self) -> &BoostParameters {
        &self.frame
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Writes `t,x,y,z,re,im` rows.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), LorentzActionError> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "x", "y", "z", "re", "im"])?;
        for (e, v) in self.events.iter().zip(&self.values) {
            w.write_record([e.t, e.x, e.y, e.z, v.re, v.im].iter().map(f64::to_string))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Relative L2 distance `|a - b| / |a|`.
pub fn relative_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(p, q)| (p - q).norm_sqr()).sum();
    let den: f64 = a.iter().map(|p| p.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Values of the boosted packet at `targets` (new-frame coordinates).
pub fn pullback_transform(amp: &MomentumAmplitude, b: &BoostParameters, targets: &[FourVector]) -> SpacetimeSampleSet {
    let back = b.inverse();
    let mapped: Vec<FourVector> = targets.iter().map(|x| boost(x, &back)).collect();
    SpacetimeSampleSet { events: targets.to_vec(), values: synthesize_many(amp, &mapped), frame: *b }
}

fn check_axis(amp: &MomentumAmplitude, b: &BoostParameters) -> Result<(), LorentzActionError> {
    let axis = b.axis();
    if amp.grid().axes().len() == 1 && !b.is_identity() && (axis[1] != 0.0 || axis[2] != 0.0) {
        return Err(LorentzActionError::AxisNotAlongGrid(axis));
    }
    Ok(())
}

/// Number of nodes in the interpolation stencil per axis.
pub const STENCIL: usize = 8;

/// Lagrange stencil for `x` on a symmetric axis: start index and weights.
fn lagrange_stencil(axis: &Axis, x: f64) -> Option<(usize, [f64; STENCIL])> {
    let n = axis.len();
    let (first, last) = (axis.first(), axis.last());
    if x < first || x > last {
        return None;
    }
    let step = axis.symmetric_step().expect("momentum axes are symmetric");
    let pos = (x - first) / step;
    let half = STENCIL as isize / 2;
    let base = (pos.floor() as isize - (half - 1)).clamp(0, (n - STENCIL) as isize) as usize;
    let u = pos - base as f64;
    let mut w = [1.0; STENCIL];
    for (j, wj) in w.iter_mut().enumerate() {
        for m in 0..STENCIL {
            if m != j {
                *wj *= (u - m as f64) / (j as f64 - m as f64);
            }
        }
    }
    Some((base, w))
}

/// Piecewise-polynomial (degree `STENCIL - 1`) interpolation of the amplitude
/// at an off-grid momentum; zero outside the sampled box.
pub fn interpolate_amplitude(amp: &MomentumAmplitude, k: Vec3) -> Complex64 {
    let axes = amp.grid().axes();
    if axes.iter().any(|a| a.len() < STENCIL) {
        // Too few nodes for the stencil; only toy grids get here.
        return nearest_amplitude(amp, k);
    }
    let dims = axes.len();
    if k[dims..].iter().any(|c| *c != 0.0) {
        return Complex64::new(0.0, 0.0);
    }
    let mut stencils = Vec::with_capacity(dims);
    for (a, axis) in axes.iter().enumerate() {
        match lagrange_stencil(axis, k[a]) {
            Some(s) => stencils.push(s),
            None => return Complex64::new(0.0, 0.0),
        }
    }
    let shape = amp.grid().tensor().shape();
    let values = amp.values();
    let mut acc = Complex64::new(0.0, 0.0);
    match dims {
        1 => {
            let (b0, w0) = stencils[0];
            for (i, w) in w0.iter().enumerate() {
                acc += values[b0 + i] * w;
            }
        }
        _ => {
            let (b0, w0) = stencils[0];
            let (b1, w1) = stencils[1];
            let (b2, w2) = stencils[2];
            for (i, wi) in w0.iter().enumerate() {
                for (j, wj) in w1.iter().enumerate() {
                    let row = ((b0 + i) * shape[1] + (b1 + j)) * shape[2];
                    let wij = wi * wj;
                    for (l, wl) in w2.iter().enumerate() {
                        acc += values[row + b2 + l] * (wij * wl);
                    }
                }
            }
        }
    }
    acc
}

fn nearest_amplitude(amp: &MomentumAmplitude, k: Vec3) -> Complex64 {
    let axes = amp.grid().axes();
    let shape = amp.grid().tensor().shape();
    let mut flat = 0;
    for (a, axis) in axes.iter().enumerate() {
        if k[a] < axis.first() || k[a] > axis.last() {
            return Complex64::new(0.0, 0.0);
        }
        let step = axis.symmetric_step().expect("momentum axes are symmetric");
        let i = (((k[a] - axis.first()) / step).round() as usize).min(axis.len() - 1);
        flat = flat * shape[a] + i;
    }
    amp.values()[flat]
}

/// The same packet described in the frame reached by `b`, as a momentum
/// amplitude on the original grid: `w'(k') = w(Lambda^-1 k')`.
pub fn momentum_boost(amp: &MomentumAmplitude, b: &BoostParameters) -> Result<MomentumAmplitude, LorentzActionError> {
    check_axis(amp, b)?;
    if b.is_identity() {
        return Ok(amp.clone());
    }
    let grid = amp.grid();
    let m = amp.mass();
    // Forward images of the occupied modes must stay on the grid.
    let total = wavepacket::norm(amp);
    if total > 0.0 {
        let mut lost = 0.0;
        for i in 0..amp.len() {
            let e = amp.energies()[i];
            let image = boost(&FourVector::from_parts(e, grid.k(i)), b).space();
            if !grid.contains(image) {
                lost += amp.values()[i].norm_sqr() * grid.weight(i) / (2.0 * e);
            }
        }
        let lost_fraction = lost / total;
        if lost_fraction > OVERFLOW_TOLERANCE {
            return Err(LorentzActionError::SupportOverflow { lost_fraction });
        }
    }
    let back = b.inverse();
    let values: Vec<Complex64> = (0..amp.len())
        .map(|i| {
            let k_new = FourVector::from_parts(amp.energies()[i], grid.k(i));
            let k_old = boost(&k_new, &back).space();
            interpolate_amplitude(amp, k_old)
        })
        .collect();
    Ok(MomentumAmplitude::new(grid.clone(), values, m)?)
}

/// Spread of new-frame times across a single-time slice of length
/// `spatial_extent` along the boost axis: `gamma |beta| extent`.
pub fn time_slice_spread(spatial_extent: f64, b: &BoostParameters) -> Result<f64, LorentzActionError> {
    if !(spatial_extent >= 0.0) {
        return Err(LorentzActionError::NegativeExtent(spatial_extent));
    }
    Ok(b.gamma() * b.beta().abs() * spatial_extent)
}

/// Relative L2 error of the one-time approximation on a new-frame slice.
///
/// The exact new-frame field at `(t_slice, x')` is `phi(Lambda^-1 (t_slice, x'))`;
/// each `x'` maps to its own original time. The approximation keeps the
/// mapped positions but evaluates every point at the single original time of
/// the slice midpoint. The residual vanishes when the slice has no extent
/// along the boost axis.
pub fn quasi_2d_residual(
    amp: &MomentumAmplitude,
    b: &BoostParameters,
    slice: &SpatialGrid,
    t_slice: f64,
) -> Result<f64, LorentzActionError> {
    check_axis(amp, b)?;
    let back = b.inverse();
    let mid: Vec3 = {
        let mut c = [0.0; 3];
        for (a, axis) in slice.axes().iter().enumerate() {
            c[a] = 0.5 * (axis.first() + axis.last());
        }
        c
    };
    let t_ref = boost(&FourVector::from_parts(t_slice, mid), &back).t;
    let weights = slice.volume_weights();
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, w) in weights.iter().enumerate() {
        let mapped = boost(&FourVector::from_parts(t_slice, slice.point(i)), &back);
        let exact = synthesize(amp, &mapped);
        let approx = synthesize(amp, &FourVector { t: t_ref, ..mapped });
        num += (exact - approx).norm_sqr() * w;
        den += exact.norm_sqr() * w;
    }
    if den == 0.0 {
        return Err(LorentzActionError::ZeroNorm);
    }
    Ok((num / den).sqrt())
}

/// Extent of a slice along the boost axis, the input to [`time_slice_spread`].
pub fn extent_along(slice: &SpatialGrid, axis: Vec3) -> f64 {
    let proj: Vec<f64> = slice.points().iter().map(|p| dot3(*p, axis)).collect();
    let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    hi - lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::{gaussian_packet, MomentumGrid};

    fn packet() -> MomentumAmplitude {
        gaussian_packet([0.2, 0.0, 0.0], 0.15, 1.0, &MomentumGrid::symmetric_1d(512, 3.0).unwrap()).unwrap()
    }

    fn targets() -> Vec<FourVector> {
        (0..21).map(|i| FourVector::new(0.3 * i as f64 - 3.0, 1.5 * i as f64 - 15.0, 0.0, 0.0)).collect()
    }

    #[test]
    fn identity_pullback_is_direct_synthesis() {
        let amp = packet();
        let set = pullback_transform(&amp, &BoostParameters::identity(), &targets());
        for (e, v) in set.events().iter().zip(set.values()) {
            assert_eq!(*v, synthesize(&amp, e));
        }
    }

    #[test]
    fn identity_momentum_boost_is_identity() {
        let amp = packet();
        assert_eq!(momentum_boost(&amp, &BoostParameters::identity()).unwrap(), amp);
    }

    #[test]
    fn interpolation_reproduces_polynomials() {
        let grid = MomentumGrid::symmetric_1d(32, 2.0).unwrap();
        let vals = (0..32)
            .map(|i| {
                let k = grid.k(i)[0];
                Complex64::new(k * k * k - 2.0 * k + 0.5, k * k)
            })
            .collect();
        let amp = MomentumAmplitude::new(grid, vals, 1.0).unwrap();
        for k in [-1.97, -0.31, 0.0, 0.77, 1.99] {
            let v = interpolate_amplitude(&amp, [k, 0.0, 0.0]);
            assert!((v.re - (k * k * k - 2.0 * k + 0.5)).abs() < 1e-12);
            assert!((v.im - k * k).abs() < 1e-12);
        }
        assert_eq!(interpolate_amplitude(&amp, [2.5, 0.0, 0.0]), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn overflow_detected() {
        let amp = gaussian_packet([0.0; 3], 0.1, 1.0, &MomentumGrid::symmetric_1d(256, 1.0).unwrap()).unwrap();
        let b = BoostParameters::along_x(0.9).unwrap();
        assert!(matches!(momentum_boost(&amp, &b), Err(LorentzActionError::SupportOverflow { .. })));
    }

    #[test]
    fn off_axis_boost_rejected_in_1d() {
        let b = BoostParameters::new(0.3, [0.0, 1.0, 0.0]).unwrap();
        assert!(matches!(momentum_boost(&packet(), &b), Err(LorentzActionError::AxisNotAlongGrid(_))));
    }

    #[test]
    fn time_slice_spread_examples() {
        let b = BoostParameters::along_x(0.5).unwrap();
        assert_eq!(time_slice_spread(0.0, &b).unwrap(), 0.0);
        assert_eq!(time_slice_spread(3.0, &BoostParameters::identity()).unwrap(), 0.0);
        assert!((time_slice_spread(2.0, &b).unwrap() - 1.1547005383792517).abs() < 1e-15);
        assert!((time_slice_spread(2.0, &b.inverse()).unwrap() - 1.1547005383792517).abs() < 1e-15);
        assert!(time_slice_spread(-1.0, &b).is_err());
    }

    #[test]
    fn quasi_2d_trivial_cases() {
        let amp = packet();
        let b = BoostParameters::along_x(0.6).unwrap();
        let point = SpatialGrid::line(vec![0.4]).unwrap();
        assert!(quasi_2d_residual(&amp, &b, &point, 0.0).unwrap() < 1e-10);
        let wide = SpatialGrid::uniform_line(101, -10.0, 10.0).unwrap();
        assert_eq!(quasi_2d_residual(&amp, &BoostParameters::identity(), &wide, 0.0).unwrap(), 0.0);
        assert!(quasi_2d_residual(&amp, &b, &wide, 0.0).unwrap() > 1e-3);
    }

    #[test]
    fn sample_set_csv_header() {
        let set = pullback_transform(&packet(), &BoostParameters::along_x(0.1).unwrap(), &targets()[..2]);
        let mut buf = Vec::new();
        set.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), "t,x,y,z,re,im");
        assert_eq!(text.lines().count(), 3);
    }
}
