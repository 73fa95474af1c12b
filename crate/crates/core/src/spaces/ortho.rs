use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::Serialize;

use super::quad::{mapped_nodes, singular_angles, slice_fourier, slice_l2};
use super::rational::RationalFunction;
use crate::error::{Error, Point2, Result};
use crate::polyalg::{Axis, FloatPoly};
use crate::rif::RationalInnerFunction;

/// Samples within this max-coordinate distance of a torus zero of `p` are
/// dropped.
pub const PUNCTURE_RADIUS: f64 = 1e-3;
pub const DEFAULT_K: usize = 16;
pub const DEFAULT_FOURIER_GRID: usize = 256;

/// Largest `|⟨f, φ z^k⟩|` over `0 ≤ k1, k2 ≤ K`, plus the norm channel
/// `⟨f, f⟩`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Orthogonality {
    pub residual: f64,
    pub norm2: f64,
    pub k: usize,
    pub grid_n: usize,
    pub punctured: bool,
    pub punctures: usize,
}

/// `grid_n` must be a power of two and `K ≤ grid_n/4`.
pub fn validate_fourier_params(k: usize, grid_n: usize) -> Result<()> {
    if !grid_n.is_power_of_two() {
        return Err(Error::InvalidArgument(format!("grid_n = {} is not a power of two", grid_n)));
    }
    if k > grid_n / 4 {
        return Err(Error::InvalidArgument(format!("K = {} exceeds grid_n/4 = {}", k, grid_n / 4)));
    }
    Ok(())
}

/// Pairings by one 2D FFT of `f·conj(φ)` on the half-step-offset grid
/// `θ_j = 2π(j + ½)/N`.
pub fn model_space_orthogonality<F: Fn(Point2) -> Complex64 + Sync>(
    f: F,
    phi: &RationalInnerFunction,
    k: usize,
    grid_n: usize,
) -> Result<Orthogonality> {
    validate_fourier_params(k, grid_n)?;
    let n = grid_n;
    let zeros = phi.torus_singularities(1024);
    let angle = |j: usize| TAU * (j as f64 + 0.5) / n as f64;
    let near_zero = |z: Point2| {
        zeros
            .iter()
            .any(|s| (s.0 - z.0).norm().max((s.1 - z.1).norm()) <= PUNCTURE_RADIUS)
    };
    let rows: Vec<(Vec<Complex64>, f64, usize)> = (0..n)
        .into_par_iter()
        .map(|j| {
            let z1 = Complex64::from_polar(1.0, angle(j));
            let mut row = vec![Complex64::new(0.0, 0.0); n];
            let mut norm = 0.0;
            let mut punct = 0;
            for (l, slot) in row.iter_mut().enumerate() {
                let z = (z1, Complex64::from_polar(1.0, angle(l)));
                if near_zero(z) {
                    punct += 1;
                    continue;
                }
                let v = f(z);
                let b = phi.boundary_eval(z);
                match b {
                    Ok(b) if v.is_finite() && b.is_finite() => {
                        *slot = v * b.conj();
                        norm += v.norm_sqr();
                    }
                    _ => punct += 1,
                }
            }
            (row, norm, punct)
        })
        .collect();
    let punctures: usize = rows.iter().map(|r| r.2).sum();
    let norm2 = rows.iter().map(|r| r.1).sum::<f64>() / (n * n) as f64;
    let mut grid: Vec<Vec<Complex64>> = rows.into_iter().map(|r| r.0).collect();

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(n);
    for row in grid.iter_mut() {
        fft.process(row);
    }
    let mut residual: f64 = 0.0;
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for k2 in 0..=k {
        for (j, c) in col.iter_mut().enumerate() {
            *c = grid[j][k2];
        }
        fft.process(&mut col);
        for (k1, c) in col.iter().enumerate().take(k + 1) {
            let shift = Complex64::from_polar(1.0, -PI * (k1 + k2) as f64 / n as f64);
            residual = residual.max((c * shift).norm() / (n * n) as f64);
        }
    }
    Ok(Orthogonality { residual, norm2, k, grid_n, punctured: punctures > 0, punctures })
}

fn same_poly(a: &FloatPoly, b: &FloatPoly) -> bool {
    let scale = a.max_abs().max(b.max_abs());
    (a - b).max_abs() <= 1e-14 * scale
}

/// Semi-analytic pairings for a rational `g`. On the torus
/// `conj(φ) = p/p̃`, so `⟨g, φ z^k⟩` is the `k`-th Fourier coefficient of
/// `R = g p/p̃`. Inner coefficients along `z2` come from residues at the
/// roots outside the disc; the outer integral uses `grid_n` nodes
/// concentrated at singular angles of `R`'s denominator.
pub fn rational_orthogonality(
    g: &RationalFunction,
    phi: &RationalInnerFunction,
    k: usize,
    grid_n: usize,
) -> Result<Orthogonality> {
    validate_fourier_params(k, grid_n)?;
    let p = phi.p_float();
    let pt = phi.ptilde_float();
    let mut factors: Vec<FloatPoly> = g.factors().to_vec();
    let mut num = g.num().clone();
    match factors.iter().position(|f| same_poly(f, p)) {
        Some(i) => factors[i] = pt.clone(),
        None => {
            num = &num * p;
            factors.push(pt.clone());
        }
    }
    let den = factors.iter().skip(1).fold(factors[0].clone(), |acc, f| &acc * f);
    let mut singular = singular_angles(g.den());
    for s in singular_angles(&den) {
        if !singular.iter().any(|&t| (t - s).abs().min(TAU - (t - s).abs()) < 1e-6) {
            singular.push(s);
        }
    }
    singular.sort_by(|a, b| a.total_cmp(b));
    let nodes = mapped_nodes(&singular, grid_n, 1.0);
    let per_node: Vec<Option<(Vec<Complex64>, f64)>> = nodes
        .par_iter()
        .map(|&(theta, w)| {
            let z1 = Complex64::from_polar(1.0, theta);
            let coeffs = slice_fourier(&num.slice_c64(Axis::First, z1), &den.slice_c64(Axis::First, z1), k)?;
            let l2 = slice_l2(&g.num().slice_c64(Axis::First, z1), &g.den().slice_c64(Axis::First, z1))?;
            Some((coeffs, w * l2))
        })
        .collect();
    let mut pair = vec![vec![Complex64::new(0.0, 0.0); k + 1]; k + 1];
    let mut norm2 = 0.0;
    let mut punctures = 0;
    for (&(theta, w), v) in nodes.iter().zip(per_node) {
        let Some((coeffs, l2)) = v else {
            punctures += 1;
            continue;
        };
        norm2 += l2;
        let step = Complex64::from_polar(1.0, -theta);
        let mut e = Complex64::new(w, 0.0);
        for row in pair.iter_mut() {
            for (k2, c) in coeffs.iter().enumerate() {
                row[k2] += e * c;
            }
            e *= step;
        }
    }
    let residual = pair.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max);
    Ok(Orthogonality { residual, norm2, k, grid_n, punctured: punctures > 0, punctures })
}
