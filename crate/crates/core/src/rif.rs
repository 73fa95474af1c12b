//! Rational inner functions `φ = p̃/p` on the bidisc.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Point2, Result};
use crate::polyalg::{poly1_roots, Axis, Coeff, Exp, ExactPoly, FloatPoly};

/// Threshold below which a slice root counts as inside the disc.
pub const STABILITY_TOL: f64 = 1e-8;
/// Tolerance for `|root| = 1` when scanning for torus zeros.
pub const UNIMODULAR_TOL: f64 = 1e-8;
/// Two torus zeros closer than this (max-coordinate distance) are merged.
pub const CLUSTER_RADIUS: f64 = 1e-6;
pub const DEFAULT_GRID_N: usize = 64;

/// Outcome of the grid stability heuristic.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub grid_n: usize,
    /// Smallest modulus of any slice root found; `None` when no slice had roots.
    pub min_root_modulus: Option<f64>,
    pub slices_checked: usize,
}

/// A validated pair `(p, p̃)` with its bidegree.
#[derive(Clone, Debug)]
pub struct RationalInnerFunction {
    p: ExactPoly,
    ptilde: ExactPoly,
    d: Exp,
    pf: FloatPoly,
    ptf: FloatPoly,
    report: StabilityReport,
}

/// Minimal slice root over the closed disc grid, together with the point
/// where it occurs.
fn scan_slices(p: &FloatPoly, grid_n: usize) -> (Option<(f64, Point2)>, usize) {
    let scale = p.max_abs();
    let rows: Vec<Option<(f64, Point2)>> = (0..=grid_n)
        .into_par_iter()
        .map(|k| {
            let r = k as f64 / grid_n as f64;
            let mut best: Option<(f64, Point2)> = None;
            let mut consider = |m: f64, w: Point2| {
                if best.is_none_or(|(b, _)| m < b) {
                    best = Some((m, w));
                }
            };
            let n_ang = if k == 0 { 1 } else { grid_n };
            for j in 0..n_ang {
                let a = Complex64::from_polar(r, TAU * j as f64 / grid_n as f64);
                for axis in [Axis::First, Axis::Second] {
                    let s = p.slice_c64(axis, a);
                    let point = |root: Complex64| match axis {
                        Axis::First => (a, root),
                        Axis::Second => (root, a),
                    };
                    if s.max_abs() <= 1e-12 * scale {
                        if r < 1.0 {
                            consider(0.0, point(Complex64::new(0.0, 0.0)));
                        }
                        continue;
                    }
                    if let Ok(roots) = poly1_roots(&s) {
                        for root in roots {
                            consider(root.norm(), point(root));
                        }
                    }
                }
            }
            best
        })
        .collect();
    let checked = 2 * (1 + grid_n * grid_n);
    let best = rows
        .into_iter()
        .flatten()
        .fold(None, |acc: Option<(f64, Point2)>, x| match acc {
            Some(a) if a.0 <= x.0 => Some(a),
            _ => Some(x),
        });
    (best, checked)
}

/// Runs the grid stability heuristic on `p`, failing with the witness of
/// the smallest slice root inside the disc.
pub fn check_stable(p: &FloatPoly, grid_n: usize) -> Result<StabilityReport> {
    if grid_n == 0 {
        return Err(Error::InvalidArgument("grid_n must be positive".into()));
    }
    let (best, slices_checked) = scan_slices(p, grid_n);
    if let Some((m, w)) = best {
        if m < 1.0 - STABILITY_TOL {
            return Err(Error::RejectedUnstable { witness: w, modulus: m });
        }
    }
    Ok(StabilityReport { grid_n, min_root_modulus: best.map(|b| b.0), slices_checked })
}

impl RationalInnerFunction {
    /// Validates `p` with the grid stability heuristic and caches `p̃`.
    ///
    /// Slices are taken in both coordinate directions over radii `k/grid_n`
    /// and `grid_n` uniform angles; a slice vanishing identically inside the
    /// disc is rejected as well.
    pub fn build(p: ExactPoly, d: Exp, grid_n: usize) -> Result<Self> {
        if p.is_zero() {
            return Err(Error::InvalidArgument("p must be nonzero".into()));
        }
        if p.coeff(0, 0).is_zero() {
            return Err(Error::InvalidArgument("p(0,0) must be nonzero".into()));
        }
        let ptilde = p.reflect(d)?;
        let p = p.with_bidegree(d)?;
        let pf = p.to_float();
        let ptf = ptilde.to_float();
        let report = check_stable(&pf, grid_n)?;
        Ok(RationalInnerFunction { p, ptilde, d, pf, ptf, report })
    }

    pub fn p(&self) -> &ExactPoly {
        &self.p
    }

    pub fn ptilde(&self) -> &ExactPoly {
        &self.ptilde
    }

    pub fn p_float(&self) -> &FloatPoly {
        &self.pf
    }

    pub fn ptilde_float(&self) -> &FloatPoly {
        &self.ptf
    }

    pub fn bidegree(&self) -> Exp {
        self.d
    }

    pub fn stability_report(&self) -> &StabilityReport {
        &self.report
    }

    /// `φ(0,0) = p̃(0,0)/p(0,0)`.
    pub fn value_at_origin(&self) -> Complex64 {
        self.ptilde.coeff(0, 0).to_c64() / self.p.coeff(0, 0).to_c64()
    }

    fn singular(&self, z: Point2) -> bool {
        self.pf.eval_c64(z.0, z.1).norm() <= 1e-13 * self.pf.max_abs()
    }

    /// `p̃(z)/p(z)`; errors where `p` vanishes.
    pub fn eval(&self, z: Point2) -> Result<Complex64> {
        let den = self.pf.eval_c64(z.0, z.1);
        if self.singular(z) {
            return Err(Error::SingularPoint { point: z });
        }
        Ok(self.ptf.eval_c64(z.0, z.1) / den)
    }

    /// Boundary value on the torus.
    pub fn boundary_eval(&self, z: Point2) -> Result<Complex64> {
        self.eval(z)
    }

    /// Torus zeros of `p`, found by scanning `grid_n` slices in each
    /// coordinate direction and merging nearby hits.
    pub fn torus_singularities(&self, grid_n: usize) -> Vec<Point2> {
        let hits: Vec<Point2> = (0..grid_n)
            .into_par_iter()
            .flat_map_iter(|k| {
                let a = Complex64::from_polar(1.0, TAU * k as f64 / grid_n as f64);
                let mut out = Vec::new();
                for axis in [Axis::First, Axis::Second] {
                    let s = self.pf.slice_c64(axis, a);
                    if s.max_abs() <= 1e-12 * self.pf.max_abs() {
                        continue;
                    }
                    for r in poly1_roots(&s).unwrap_or_default() {
                        if (r.norm() - 1.0).abs() <= UNIMODULAR_TOL {
                            let r = r / r.norm();
                            out.push(match axis {
                                Axis::First => (a, r),
                                Axis::Second => (r, a),
                            });
                        }
                    }
                }
                out
            })
            .collect();
        cluster_points(hits, CLUSTER_RADIUS)
    }

    /// Largest deviation `||φ(ζ)| − 1|` over a `grid_n²` torus grid, skipping
    /// zeros of `p`.
    pub fn verify_inner(&self, grid_n: usize) -> f64 {
        (0..grid_n)
            .into_par_iter()
            .map(|j| {
                let z1 = Complex64::from_polar(1.0, TAU * j as f64 / grid_n as f64);
                let mut worst: f64 = 0.0;
                for k in 0..grid_n {
                    let z2 = Complex64::from_polar(1.0, TAU * k as f64 / grid_n as f64);
                    if let Ok(v) = self.boundary_eval((z1, z2)) {
                        worst = worst.max((v.norm() - 1.0).abs());
                    }
                }
                worst
            })
            .reduce(|| 0.0, f64::max)
    }
}

/// Greedy clustering in the max-coordinate metric; representatives are
/// renormalized cluster means.
pub fn cluster_points(points: Vec<Point2>, radius: f64) -> Vec<Point2> {
    let mut clusters: Vec<(Point2, usize)> = Vec::new();
    for z in points {
        let dist = |c: &Point2| (c.0 - z.0).norm().max((c.1 - z.1).norm());
        match clusters.iter_mut().find(|(c, n)| dist(&(c.0 / *n as f64, c.1 / *n as f64)) <= radius) {
            Some((c, n)) => {
                c.0 += z.0;
                c.1 += z.1;
                *n += 1;
            }
            None => clusters.push((z, 1)),
        }
    }
    clusters
        .into_iter()
        .map(|((a, b), _)| (a / a.norm(), b / b.norm()))
        .collect()
}
