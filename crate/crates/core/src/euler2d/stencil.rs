//! Finite-difference operators on row-major square fields with zero data
//! outside the grid.
//!
//! First and second derivatives are fourth-order central; mixed derivatives
//! compose two first derivatives. Rows are processed in parallel and every
//! output cell is written by exactly one task.

use rayon::prelude::*;

use super::grid::Grid2D;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X1,
    X2,
}

/// Applies the 1-D stencil `weights` (centred, offsets `-r..=r`) along `axis`
/// and scales by `scale`. Taps are accumulated in offset order on every
/// path, so the interior fast paths agree bitwise with the padded one.
fn apply(f: &[f64], grid: &Grid2D, axis: Axis, weights: &[f64], scale: f64, out: &mut [f64]) {
    let n = grid.n;
    let r = weights.len() / 2;
    out.par_chunks_mut(n).enumerate().for_each(|(j, row)| match axis {
        Axis::X1 => {
            let src = &f[j * n..(j + 1) * n];
            row.fill(0.0);
            for (k, &w) in weights.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                // out[i] += w·f[i + k - r] for the i whose source lies inside the row.
                let (lo, hi) = (r.saturating_sub(k), (n + r).saturating_sub(k).min(n));
                let shift = k as isize - r as isize;
                let s_lo = (lo as isize + shift) as usize;
                for (o, &v) in row[lo..hi].iter_mut().zip(&src[s_lo..]) {
                    *o += w * v;
                }
            }
            for o in row.iter_mut() {
                *o *= scale;
            }
        }
        Axis::X2 => {
            row.fill(0.0);
            for (k, &w) in weights.iter().enumerate() {
                let jj = (j + k) as isize - r as isize;
                if w == 0.0 || jj < 0 || jj >= n as isize {
                    continue;
                }
                let src = &f[jj as usize * n..(jj as usize + 1) * n];
                for (o, &v) in row.iter_mut().zip(src) {
                    *o += w * v;
                }
            }
            for o in row.iter_mut() {
                *o *= scale;
            }
        }
    });
}

const D1: [f64; 5] = [1.0, -8.0, 0.0, 8.0, -1.0];
const D2: [f64; 5] = [-1.0, 16.0, -30.0, 16.0, -1.0];
const DELTA6: [f64; 7] = [1.0, -6.0, 15.0, -20.0, 15.0, -6.0, 1.0];

pub fn d1_into(f: &[f64], grid: &Grid2D, axis: Axis, out: &mut [f64]) {
    apply(f, grid, axis, &D1, 1.0 / (12.0 * grid.h), out);
}

pub fn d1(f: &[f64], grid: &Grid2D, axis: Axis) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    d1_into(f, grid, axis, &mut out);
    out
}

pub fn d2(f: &[f64], grid: &Grid2D, axis: Axis) -> Vec<f64> {
    let mut out = vec![0.0; f.len()];
    apply(f, grid, axis, &D2, 1.0 / (12.0 * grid.h * grid.h), &mut out);
    out
}

pub fn d12(f: &[f64], grid: &Grid2D) -> Vec<f64> {
    d1(&d1(f, grid, Axis::X1), grid, Axis::X2)
}

pub fn laplacian(f: &[f64], grid: &Grid2D) -> Vec<f64> {
    let mut a = d2(f, grid, Axis::X1);
    let b = d2(f, grid, Axis::X2);
    a.iter_mut().zip(&b).for_each(|(a, b)| *a += b);
    a
}

/// `(σ/h)(δ₁⁶ + δ₂⁶)f`, a dissipative approximation of `-σh⁵∇⁶f`.
pub fn hyperviscosity_into(f: &[f64], grid: &Grid2D, sigma: f64, out: &mut [f64], scratch: &mut [f64]) {
    let scale = sigma / grid.h;
    apply(f, grid, Axis::X1, &DELTA6, scale, out);
    apply(f, grid, Axis::X2, &DELTA6, scale, scratch);
    out.par_iter_mut().zip(scratch.par_iter()).for_each(|(o, s)| *o += s);
}

/// `h²·Σ f²`, square root taken.
pub fn l2_norm(f: &[f64], grid: &Grid2D) -> f64 {
    (grid.cell_area() * row_sums(f, grid.n, |v| v * v)).sqrt()
}

pub fn sup_norm(f: &[f64]) -> f64 {
    f.iter().fold(0.0f64, |m, v| if v.is_nan() || m.is_nan() { f64::NAN } else { m.max(v.abs()) })
}

/// Deterministic parallel sum of `g(f[k])`: per-row partial sums, combined
/// in row order.
pub fn row_sums<G: Fn(f64) -> f64 + Sync>(f: &[f64], n: usize, g: G) -> f64 {
    let partial: Vec<f64> = f.par_chunks(n).map(|row| row.iter().map(|&v| g(v)).sum()).collect();
    partial.iter().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(x: f64, y: f64) -> f64 {
        (-(x * x + 2.0 * y * y)).exp() * (1.0 + 0.3 * x)
    }

    #[test]
    fn fourth_order_first_derivative() {
        let err = |n: usize| {
            let g = Grid2D::new(6.0, n).unwrap();
            let f = g.sample(bump);
            let d = d1(&f, &g, Axis::X1);
            let exact = g.sample(|x, y| (-(x * x + 2.0 * y * y)).exp() * (0.3 - 2.0 * x * (1.0 + 0.3 * x)));
            d.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
        };
        let ratio = err(64) / err(128);
        assert!(ratio > 14.0 && ratio < 18.0, "{ratio}");
    }

    #[test]
    fn second_and_mixed_derivatives() {
        let g = Grid2D::new(6.0, 256).unwrap();
        let f = g.sample(|x, y| (-(x * x + y * y)).exp());
        let lap = laplacian(&f, &g);
        let exact = g.sample(|x, y| (4.0 * (x * x + y * y) - 4.0) * (-(x * x + y * y)).exp());
        let e = lap.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(e < 1e-4, "{e}");
        let m = d12(&f, &g);
        let exact = g.sample(|x, y| 4.0 * x * y * (-(x * x + y * y)).exp());
        let e = m.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(e < 1e-4, "{e}");
    }

    #[test]
    fn hyperviscosity_dissipates_and_conserves() {
        let g = Grid2D::new(7.0, 112).unwrap();
        let f = g.sample(|x, y| (-(x * x + y * y)).exp() * (3.0 * x).cos());
        let mut out = vec![0.0; g.len()];
        let mut scratch = vec![0.0; g.len()];
        hyperviscosity_into(&f, &g, 0.01, &mut out, &mut scratch);
        let dot: f64 = f.iter().zip(&out).map(|(a, b)| a * b).sum();
        assert!(dot < 0.0);
        assert!(out.iter().sum::<f64>().abs() < 1e-12);
    }

    #[test]
    fn row_sums_match_serial() {
        let f: Vec<f64> = (0..1024).map(|k| (k as f64 * 0.37).sin()).collect();
        let a = row_sums(&f, 32, |v| v);
        let b = row_sums(&f, 32, |v| v);
        assert_eq!(a.to_bits(), b.to_bits());
        assert!((a - f.iter().sum::<f64>()).abs() < 1e-12);
    }
}
