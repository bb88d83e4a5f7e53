//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use num_complex::Complex64;

/// Explicit 4x4 boost matrix for velocity `beta * n`, built entry by entry.
pub fn boost_matrix(beta: f64, n: [f64; 3]) -> [[f64; 4]; 4] {
    let g = 1.0 / (1.0 - beta * beta).sqrt();
    let mut m = [[0.0; 4]; 4];
    m[0][0] = g;
    for i in 0..3 {
        m[0][i + 1] = -g * beta * n[i];
        m[i + 1][0] = -g * beta * n[i];
        for j in 0..3 {
            let delta = if i == j { 1.0 } else { 0.0 };
            m[i + 1][j + 1] = delta + (g - 1.0) * n[i] * n[j];
        }
    }
    m
}

pub fn apply_matrix(m: &[[f64; 4]; 4], v: [f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for i in 0..4 {
        for j in 0..4 {
            out[i] += m[i][j] * v[j];
        }
    }
    out
}

pub fn minkowski_interval(a: [f64; 4], b: [f64; 4]) -> f64 {
    let d: Vec<f64> = (0..4).map(|i| a[i] - b[i]).collect();
    -d[0] * d[0] + d[1] * d[1] + d[2] * d[2] + d[3] * d[3]
}

/// Pearson statistic over cells with nonzero expectation, and its degrees of freedom.
pub fn chi_square(counts: &[usize], probs: &[f64]) -> (f64, usize) {
    let n: usize = counts.iter().sum();
    let mut stat = 0.0;
    let mut cells: usize = 0;
    for (k, p) in counts.iter().zip(probs) {
        if *p > 0.0 {
            let e = n as f64 * p;
            stat += (*k as f64 - e).powi(2) / e;
            cells += 1;
        } else {
            assert_eq!(*k, 0, "count in a zero-probability cell");
        }
    }
    (stat, cells.saturating_sub(1))
}

/// Mean plus four standard deviations of a chi-square variable.
pub fn chi_square_bound(dof: usize) -> f64 {
    dof as f64 + 4.0 * (2.0 * dof as f64).sqrt()
}

/// Four-sigma binomial half-width for frequency estimates.
pub fn binomial_4sigma(p: f64, n: usize) -> f64 {
    4.0 * (p * (1.0 - p) / n as f64).sqrt()
}

/// Direct Klein-Gordon field sum on a 1D grid:
/// `sum_i w_i dk_i / k0_i exp(-i (k0_i t - k_i x))`.
pub fn kg_field_1d(k: &[f64], dk: &[f64], w: &[Complex64], m: f64, t: f64, x: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..k.len() {
        let e = (k[i] * k[i] + m * m).sqrt();
        acc += w[i] * (dk[i] / e) * Complex64::from_polar(1.0, -(e * t - k[i] * x));
    }
    acc
}

pub fn rel_l2(a: &[Complex64], b: &[Complex64]) -> f64 {
    let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
    let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
    (num / den).sqrt()
}

/// Trapezoid weights for a uniform grid.
pub fn trapezoid(n: usize, step: f64) -> Vec<f64> {
    (0..n).map(|i| if i == 0 || i == n - 1 { 0.5 * step } else { step }).collect()
}
