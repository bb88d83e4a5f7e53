//! Tensor-product sampling grids for momentum and position space.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::WavepacketError;
use crate::spacetime::Vec3;

/// Coordinates along one axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Axis {
    /// `n` points `(i - (n-1)/2) * step`, symmetric about zero.
    Symmetric { n: usize, step: f64 },
    /// Arbitrary strictly increasing coordinates.
    Explicit(Vec<f64>),
}

impl Axis {
    pub fn symmetric(n: usize, half_span: f64) -> Result<Self, WavepacketError> {
        if n < 2 {
            return Err(WavepacketError::InvalidGrid(format!("need at least 2 points, got {n}")));
        }
        if !(half_span.is_finite() && half_span > 0.0) {
            return Err(WavepacketError::InvalidGrid(format!("half span must be positive, got {half_span}")));
        }
        Ok(Axis::Symmetric { n, step: 2.0 * half_span / (n - 1) as f64 })
    }

    pub fn explicit(values: Vec<f64>) -> Result<Self, WavepacketError> {
        if values.is_empty() {
            return Err(WavepacketError::InvalidGrid("empty axis".into()));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(WavepacketError::InvalidGrid("non-finite coordinate".into()));
        }
        if values.windows(2).any(|w| w[1] <= w[0]) {
            return Err(WavepacketError::InvalidGrid("coordinates must be strictly increasing".into()));
        }
        Ok(Axis::Explicit(values))
    }

    pub fn len(&self) -> usize {
        match self {
            Axis::Symmetric { n, .. } => *n,
            Axis::Explicit(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn value(&self, i: usize) -> f64 {
        match self {
            Axis::Symmetric { n, step } => (i as f64 - (*n as f64 - 1.0) / 2.0) * step,
            Axis::Explicit(v) => v[i],
        }
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.len()).map(|i| self.value(i)).collect()
    }

    pub fn first(&self) -> f64 {
        self.value(0)
    }

    pub fn last(&self) -> f64 {
        self.value(self.len() - 1)
    }

    pub fn symmetric_step(&self) -> Option<f64> {
        match self {
            Axis::Symmetric { step, .. } => Some(*step),
            Axis::Explicit(_) => None,
        }
    }

    /// Trapezoidal quadrature weights (endpoints halved). A single point gets weight 1.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        (0..n)
            .map(|i| {
                let left = if i > 0 { self.value(i) - self.value(i - 1) } else { 0.0 };
                let right = if i + 1 < n { self.value(i + 1) - self.value(i) } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }

    /// Cell widths for Riemann sums: the step on symmetric axes, the mean
    /// neighbour gap on explicit ones (one-sided at the ends).
    pub fn cell_widths(&self) -> Vec<f64> {
        match self {
            Axis::Symmetric { n, step } => vec![*step; *n],
            Axis::Explicit(_) => {
                let n = self.len();
                if n == 1 {
                    return vec![1.0];
                }
                (0..n)
                    .map(|i| {
                        let lo = if i > 0 { self.value(i - 1) } else { self.value(i) };
                        let hi = if i + 1 < n { self.value(i + 1) } else { self.value(i) };
                        let span = hi - lo;
                        if i == 0 || i + 1 == n { span } else { 0.5 * span }
                    })
                    .collect()
            }
        }
    }

    /// The axis whose symmetric DFT pairs exactly with this one: same length,
    /// step `2 pi / (n * step)`.
    pub fn conjugate(&self) -> Option<Axis> {
        match self {
            Axis::Symmetric { n, step } => Some(Axis::Symmetric { n: *n, step: 2.0 * PI / (*n as f64 * step) }),
            Axis::Explicit(_) => None,
        }
    }

    pub fn is_conjugate_to(&self, other: &Axis) -> bool {
        match (self, other) {
            (Axis::Symmetric { n: a, step: s }, Axis::Symmetric { n: b, step: t }) => {
                a == b && ((*a as f64) * s * t / (2.0 * PI) - 1.0).abs() < 1e-12
            }
            _ => false,
        }
    }
}

/// Whether a grid samples a line (`k = (k, 0, 0)`) or a 3D lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Dimensionality {
    One,
    Three,
}

/// Row-major tensor product of 1 or 3 axes. Shared by both grid types.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorGrid {
    axes: Vec<Axis>,
}

impl TensorGrid {
    fn new(axes: Vec<Axis>) -> Result<Self, WavepacketError> {
        if axes.len() != 1 && axes.len() != 3 {
            return Err(WavepacketError::InvalidGrid(format!("need 1 or 3 axes, got {}", axes.len())));
        }
        Ok(TensorGrid { axes })
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dim(&self) -> Dimensionality {
        if self.axes.len() == 1 { Dimensionality::One } else { Dimensionality::Three }
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(Axis::len).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::len).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Per-axis indices of flat index `flat`.
    pub fn unflatten(&self, mut flat: usize) -> [usize; 3] {
        let mut idx = [0usize; 3];
        for a in (0..self.axes.len()).rev() {
            let n = self.axes[a].len();
            idx[a] = flat % n;
            flat /= n;
        }
        idx
    }

    /// Coordinates of sample `flat`, padded with zeros in 1D.
    pub fn point(&self, flat: usize) -> Vec3 {
        let idx = self.unflatten(flat);
        let mut p = [0.0; 3];
        for (a, axis) in self.axes.iter().enumerate() {
            p[a] = axis.value(idx[a]);
        }
        p
    }

    pub fn points(&self) -> Vec<Vec3> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }

    fn product_weights(&self, per_axis: impl Fn(&Axis) -> Vec<f64>) -> Vec<f64> {
        let w: Vec<Vec<f64>> = self.axes.iter().map(per_axis).collect();
        (0..self.len())
            .map(|flat| {
                let idx = self.unflatten(flat);
                w.iter().enumerate().map(|(a, wa)| wa[idx[a]]).product()
            })
            .collect()
    }
}

/// Momentum samples with trapezoidal weights. Axes are always symmetric about
/// zero, so a real even profile has zero mean momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentumGrid {
    grid: TensorGrid,
    weights: Vec<f64>,
}

/// Largest per-axis size admitted for 3D lattices.
pub const MAX_3D_AXIS: usize = 64;

/// Default number of 1D samples.
pub const DEFAULT_1D_SAMPLES: usize = 1 << 12;

impl MomentumGrid {
    pub fn symmetric_1d(n: usize, k_max: f64) -> Result<Self, WavepacketError> {
        Self::from_axes(vec![Axis::symmetric(n, k_max)?])
    }

    pub fn symmetric_3d(n: usize, k_max: f64) -> Result<Self, WavepacketError> {
        let a = Axis::symmetric(n, k_max)?;
        Self::from_axes(vec![a.clone(), a.clone(), a])
    }

    /// Default 1D grid for a packet: 2^12 samples spanning +-8 sigma past the center.
    pub fn for_packet_1d(center_k: f64, sigma_k: f64) -> Result<Self, WavepacketError> {
        Self::symmetric_1d(DEFAULT_1D_SAMPLES, center_k.abs() + 8.0 * sigma_k)
    }

    pub fn from_axes(axes: Vec<Axis>) -> Result<Self, WavepacketError> {
        if axes.iter().any(|a| a.symmetric_step().is_none()) {
            return Err(WavepacketError::InvalidGrid("momentum axes must be symmetric about zero".into()));
        }
        if axes.len() == 3 && axes.iter().any(|a| a.len() > MAX_3D_AXIS) {
            return Err(WavepacketError::InvalidGrid(format!("3D lattices are limited to {MAX_3D_AXIS} points per axis")));
        }
        let grid = TensorGrid::new(axes)?;
        let weights = grid.product_weights(Axis::trapezoid_weights);
        Ok(MomentumGrid { grid, weights })
    }

    pub fn tensor(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn axes(&self) -> &[Axis] {
        self.grid.axes()
    }

    pub fn dim(&self) -> Dimensionality {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn k(&self, i: usize) -> Vec3 {
        self.grid.point(i)
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Largest |k| component reachable on any axis.
    pub fn k_max(&self) -> f64 {
        self.axes().iter().map(|a| a.last()).fold(0.0, f64::max)
    }

    /// Whether `k` lies inside the sampled box (closed).
    pub fn contains(&self, k: Vec3) -> bool {
        let dims = self.axes().len();
        for (a, axis) in self.axes().iter().enumerate() {
            if k[a] < axis.first() || k[a] > axis.last() {
                return false;
            }
        }
        k[dims..].iter().all(|c| *c == 0.0)
    }

    /// Spatial grid on which synthesis and inversion are exact discrete transforms.
    pub fn conjugate_spatial_grid(&self) -> SpatialGrid {
        let axes = self.axes().iter().map(|a| a.conjugate().expect("momentum axes are symmetric")).collect();
        SpatialGrid { grid: TensorGrid { axes } }
    }
}

/// Spatial sample points at which a field is known.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    grid: TensorGrid,
}

impl SpatialGrid {
    pub fn from_axes(axes: Vec<Axis>) -> Result<Self, WavepacketError> {
        Ok(SpatialGrid { grid: TensorGrid::new(axes)? })
    }

    pub fn line(values: Vec<f64>) -> Result<Self, WavepacketError> {
        Self::from_axes(vec![Axis::explicit(values)?])
    }

    pub fn uniform_line(n: usize, lo: f64, hi: f64) -> Result<Self, WavepacketError> {
        if n == 1 {
            return Self::line(vec![0.5 * (lo + hi)]);
        }
        let step = (hi - lo) / (n - 1) as f64;
        Self::line((0..n).map(|i| lo + step * i as f64).collect())
    }

    pub fn tensor(&self) -> &TensorGrid {
        &self.grid
    }

    pub fn axes(&self) -> &[Axis] {
        self.grid.axes()
    }

    pub fn dim(&self) -> Dimensionality {
        self.grid.dim()
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.grid.point(i)
    }

    pub fn points(&self) -> Vec<Vec3> {
        self.grid.points()
    }

    /// Volume element attached to each sample.
    pub fn volume_weights(&self) -> Vec<f64> {
        self.grid.product_weights(Axis::cell_widths)
    }

    pub fn is_conjugate_to(&self, momenta: &MomentumGrid) -> bool {
        self.axes().len() == momenta.axes().len()
            && self.axes().iter().zip(momenta.axes()).all(|(x, k)| x.is_conjugate_to(k))
    }

    /// Momentum grid paired with this grid by the discrete transform, if every axis is symmetric.
    pub fn conjugate_momentum_grid(&self) -> Option<MomentumGrid> {
        let axes: Option<Vec<Axis>> = self.axes().iter().map(Axis::conjugate).collect();
        // The per-axis size cap only applies to 3D, and conjugate axes keep sizes.
        MomentumGrid::from_axes(axes?).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_axis_is_symmetric() {
        let a = Axis::symmetric(8, 2.0).unwrap();
        for i in 0..8 {
            assert!((a.value(i) + a.value(7 - i)).abs() < 1e-15);
        }
        assert!((a.first() + 2.0).abs() < 1e-15 && (a.last() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn trapezoid_weights_integrate_constants() {
        let a = Axis::symmetric(101, 3.0).unwrap();
        let s: f64 = a.trapezoid_weights().iter().sum();
        assert!((s - 6.0).abs() < 1e-12);
    }

    #[test]
    fn conjugate_axes_pair_both_ways() {
        let k = MomentumGrid::symmetric_1d(64, 4.0).unwrap();
        let x = k.conjugate_spatial_grid();
        assert!(x.is_conjugate_to(&k));
        let back = x.conjugate_momentum_grid().unwrap();
        assert!((back.axes()[0].symmetric_step().unwrap() - k.axes()[0].symmetric_step().unwrap()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Axis::symmetric(1, 1.0).is_err());
        assert!(Axis::explicit(vec![0.0, 0.0]).is_err());
        assert!(MomentumGrid::symmetric_3d(65, 1.0).is_err());
        assert!(MomentumGrid::from_axes(vec![Axis::Explicit(vec![0.0, 1.0])]).is_err());
    }

    #[test]
    fn flat_index_round_trip_3d() {
        let g = MomentumGrid::symmetric_3d(4, 1.0).unwrap();
        let idx = g.tensor().unflatten(4 * 4 + 2 * 4 + 3);
        assert_eq!(idx, [1, 2, 3]);
        let p = g.k(4 * 4 + 2 * 4 + 3);
        assert_eq!(p[2], g.axes()[2].value(3));
    }
}
