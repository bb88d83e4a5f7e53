//! Separable plane-wave sums `out_j = sum_l c_l exp(sign * i * k_l . x_j)`.
//!
//! Two routes: a direct sum valid for any tensor grids, and an FFT route for
//! conjugate symmetric grid pairs (`n * dk * dx = 2 pi`). Both evaluate each
//! output in a fixed order, so results do not depend on the thread count.

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{FftDirection, FftPlanner};
use std::f64::consts::PI;

use super::grid::{Axis, TensorGrid};

/// Sign of the exponent: `Plus` synthesizes fields, `Minus` analyzes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Products above this size compute phases on the fly instead of caching a matrix.
const MATRIX_CACHE_LIMIT: usize = 1 << 18;

fn contract_axis_direct(
    data: &[Complex64],
    shape: &[usize],
    axis: usize,
    input: &[f64],
    output: &[f64],
    sign: Sign,
) -> (Vec<Complex64>, Vec<usize>) {
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let n_in = shape[axis];
    let n_out = output.len();
    let s = sign.value();
    let matrix: Option<Vec<Complex64>> = (n_in * n_out <= MATRIX_CACHE_LIMIT).then(|| {
        output
            .iter()
            .flat_map(|&x| input.iter().map(move |&k| Complex64::from_polar(1.0, s * k * x)))
            .collect()
    });
    let total = outer * n_out * inner;
    let result: Vec<Complex64> = (0..total)
        .into_par_iter()
        .map(|flat| {
            let o_inner = flat % inner;
            let o = (flat / inner) % n_out;
            let o_outer = flat / (inner * n_out);
            let base = o_outer * n_in * inner + o_inner;
            let mut acc = Complex64::new(0.0, 0.0);
            match &matrix {
                Some(m) => {
                    let row = &m[o * n_in..(o + 1) * n_in];
                    for (i, ph) in row.iter().enumerate() {
                        acc += data[base + i * inner] * ph;
                    }
                }
                None => {
                    let x = output[o];
                    for (i, &k) in input.iter().enumerate() {
                        acc += data[base + i * inner] * Complex64::from_polar(1.0, s * k * x);
                    }
                }
            }
            acc
        })
        .collect();
    let mut new_shape = shape.to_vec();
    new_shape[axis] = n_out;
    (result, new_shape)
}

/// Direct separable sum from `from` grid samples to `to` grid samples.
pub fn direct(values: &[Complex64], from: &TensorGrid, to: &TensorGrid, sign: Sign) -> Vec<Complex64> {
    assert_eq!(from.axes().len(), to.axes().len(), "grid dimensionality mismatch");
    assert_eq!(values.len(), from.len(), "value count does not match grid");
    let mut data = values.to_vec();
    let mut shape = from.shape();
    for (a, (fa, ta)) in from.axes().iter().zip(to.axes()).enumerate() {
        let (d, s) = contract_axis_direct(&data, &shape, a, &fa.values(), &ta.values(), sign);
        data = d;
        shape = s;
    }
    data
}

fn half_integer_phase(num: u128, den: u128) -> f64 {
    // exp(i * pi * num / den) with the argument reduced modulo 2 pi exactly.
    PI * ((num % (2 * den)) as f64) / den as f64
}

/// FFT route. Both grids must be symmetric and pairwise conjugate.
pub fn conjugate_fft(values: &[Complex64], from: &TensorGrid, to: &TensorGrid, sign: Sign) -> Vec<Complex64> {
    assert!(
        from.axes().iter().zip(to.axes()).all(|(f, t)| f.is_conjugate_to(t)),
        "FFT route needs conjugate symmetric grids"
    );
    let shape = from.shape();
    let mut data = values.to_vec();
    let mut planner = FftPlanner::<f64>::new();
    for (a, axis) in from.axes().iter().enumerate() {
        let n = match axis {
            Axis::Symmetric { n, .. } => *n,
            Axis::Explicit(_) => unreachable!(),
        };
        let direction = match sign {
            Sign::Plus => FftDirection::Inverse,
            Sign::Minus => FftDirection::Forward,
        };
        let fft = planner.plan_fft(n, direction);
        let s = sign.value();
        let nn = n as u128;
        // Index phases of (i - c)(j - c) with c = (n - 1) / 2.
        let twiddle: Vec<Complex64> =
            (0..n).map(|i| Complex64::from_polar(1.0, -s * half_integer_phase((nn - 1) * i as u128, nn))).collect();
        let constant = Complex64::from_polar(1.0, s * half_integer_phase((nn - 1) * (nn - 1), 2 * nn));
        let outer: usize = shape[..a].iter().product();
        let inner: usize = shape[a + 1..].iter().product();
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for o in 0..outer {
            for q in 0..inner {
                let base = o * n * inner + q;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * inner] * twiddle[i];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    data[base + j * inner] = v * twiddle[j] * constant;
                }
            }
        }
    }
    data
}

/// Picks the FFT route when the grids allow it.
pub fn auto(values: &[Complex64], from: &TensorGrid, to: &TensorGrid, sign: Sign) -> Vec<Complex64> {
    let conjugate = from.axes().len() == to.axes().len()
        && from.axes().iter().zip(to.axes()).all(|(f, t)| f.is_conjugate_to(t));
    if conjugate {
        conjugate_fft(values, from, to, sign)
    } else {
        direct(values, from, to, sign)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavepacket::grid::MomentumGrid;

    fn sample_values(n: usize) -> Vec<Complex64> {
        (0..n).map(|i| Complex64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos() - 0.3)).collect()
    }

    #[test]
    fn fft_matches_direct_1d_even_and_odd() {
        for n in [16usize, 17, 64, 255] {
            let k = MomentumGrid::symmetric_1d(n, 3.0).unwrap();
            let x = k.conjugate_spatial_grid();
            let v = sample_values(n);
            for sign in [Sign::Plus, Sign::Minus] {
                let (from, to) = match sign {
                    Sign::Plus => (k.tensor(), x.tensor()),
                    Sign::Minus => (x.tensor(), k.tensor()),
                };
                let a = direct(&v, from, to, sign);
                let b = conjugate_fft(&v, from, to, sign);
                let err: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
                assert!(err < 1e-10, "n={n} {sign:?} err={err}");
            }
        }
    }

    #[test]
    fn fft_matches_direct_3d() {
        let k = MomentumGrid::symmetric_3d(6, 2.0).unwrap();
        let x = k.conjugate_spatial_grid();
        let v = sample_values(k.len());
        let a = direct(&v, k.tensor(), x.tensor(), Sign::Plus);
        let b = conjugate_fft(&v, k.tensor(), x.tensor(), Sign::Plus);
        let err: f64 = a.iter().zip(&b).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        assert!(err < 1e-11, "err={err}");
    }

    #[test]
    fn analysis_inverts_synthesis() {
        let k = MomentumGrid::symmetric_1d(33, 1.5).unwrap();
        let x = k.conjugate_spatial_grid();
        let v = sample_values(33);
        let field = auto(&v, k.tensor(), x.tensor(), Sign::Plus);
        let back: Vec<Complex64> =
            auto(&field, x.tensor(), k.tensor(), Sign::Minus).into_iter().map(|c| c / 33.0).collect();
        for (p, q) in v.iter().zip(&back) {
            assert!((p - q).norm() < 1e-13);
        }
    }
}
