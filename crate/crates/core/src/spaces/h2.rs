use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::quad::{outer_nodes, singular_angles, slice_l2};
use super::rational::RationalFunction;
use crate::error::Point2;
use crate::polyalg::Axis;

/// Relative agreement of successive levels required for `Finite`.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Level-to-level growth factor counted as a divergence witness.
pub const GROWTH_FACTOR: f64 = 1.5;
/// Consecutive growing transitions required for `Divergent`.
pub const GROWTH_RUN: usize = 3;
const MIN_FINITE_LEVEL: usize = 3;
const BASE_NODES: usize = 16;

pub const DEFAULT_MAX_LEVEL: usize = 12;
pub const DEFAULT_SAMPLED_MAX_LEVEL: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "class", rename_all = "lowercase")]
pub enum MembershipClass {
    Finite { norm2: f64 },
    Divergent,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceEntry {
    pub level: usize,
    pub nodes: usize,
    pub partial_sum: f64,
    /// Nodes dropped because the slice had a pole on the circle.
    pub skipped: usize,
}

/// Outcome of an `L²(𝕋²)` integrability test with its refinement trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MembershipVerdict {
    #[serde(flatten)]
    pub class: MembershipClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residual: Option<f64>,
    pub method: &'static str,
    pub trace: Vec<TraceEntry>,
}

impl MembershipVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self.class, MembershipClass::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self.class, MembershipClass::Divergent)
    }

    pub fn norm2(&self) -> Option<f64> {
        match self.class {
            MembershipClass::Finite { norm2 } => Some(norm2),
            _ => None,
        }
    }
}

/// Decides the class from the partial sums so far; `None` means refine.
fn judge(trace: &[TraceEntry]) -> Option<MembershipClass> {
    let s: Vec<f64> = trace.iter().map(|t| t.partial_sum).collect();
    let n = s.len();
    if n == 0 {
        return None;
    }
    if !s[n - 1].is_finite() {
        return Some(MembershipClass::Inconclusive);
    }
    if n > GROWTH_RUN {
        let grows = (n - GROWTH_RUN..n).all(|i| s[i - 1] > 0.0 && s[i] >= GROWTH_FACTOR * s[i - 1]);
        if grows {
            return Some(MembershipClass::Divergent);
        }
    }
    let level = trace[n - 1].level;
    if n >= 2 && level >= MIN_FINITE_LEVEL {
        let (a, b) = (s[n - 2], s[n - 1]);
        if (b - a).abs() <= CONVERGENCE_TOL * b.abs().max(f64::MIN_POSITIVE) {
            return Some(MembershipClass::Finite { norm2: b });
        }
    }
    None
}

fn run_levels<F: Fn(usize) -> (f64, usize, usize)>(max_level: usize, level_sum: F, method: &'static str) -> MembershipVerdict {
    let mut trace = Vec::new();
    for level in 0..=max_level {
        let (partial_sum, nodes, skipped) = level_sum(level);
        trace.push(TraceEntry { level, nodes, partial_sum, skipped });
        if let Some(class) = judge(&trace) {
            return MembershipVerdict { class, residual: None, method, trace };
        }
    }
    MembershipVerdict { class: MembershipClass::Inconclusive, residual: None, method, trace }
}

/// Classifies `∫_𝕋² |f|² dm` by per-slice closed-form integrals in `z2` and a
/// refined outer rule in `arg z1` with nodes concentrated at the angles where
/// the denominator has torus zeros. Level `ℓ` uses `16·2^ℓ` outer nodes.
pub fn h2_classify(f: &RationalFunction, max_level: usize) -> MembershipVerdict {
    let singular = singular_angles(f.den());
    run_levels(
        max_level,
        |level| {
            let n = BASE_NODES << level;
            let nodes = outer_nodes(&singular, n);
            let vals: Vec<Option<f64>> = nodes
                .par_iter()
                .map(|&(theta, w)| {
                    let z1 = Complex64::from_polar(1.0, theta);
                    let num = f.num().slice_c64(Axis::First, z1);
                    let den = f.den().slice_c64(Axis::First, z1);
                    slice_l2(&num, &den).map(|v| w * v)
                })
                .collect();
            let skipped = vals.iter().filter(|v| v.is_none()).count();
            (vals.into_iter().flatten().sum(), nodes.len(), skipped)
        },
        "slice-residue",
    )
}

/// Same classification for a boundary-sampled function, using a
/// half-step-offset `N×N` torus grid with `N = 16·2^ℓ`. Non-finite samples
/// are skipped and counted.
pub fn h2_classify_sampled<F: Fn(Point2) -> Complex64 + Sync>(f: F, max_level: usize) -> MembershipVerdict {
    run_levels(
        max_level,
        |level| {
            let n = BASE_NODES << level;
            let rows: Vec<(f64, usize)> = (0..n)
                .into_par_iter()
                .map(|j| {
                    let z1 = Complex64::from_polar(1.0, TAU * (j as f64 + 0.5) / n as f64);
                    let mut acc = 0.0;
                    let mut skipped = 0;
                    for k in 0..n {
                        let z2 = Complex64::from_polar(1.0, TAU * (k as f64 + 0.5) / n as f64);
                        let v = f((z1, z2)).norm_sqr();
                        if v.is_finite() {
                            acc += v;
                        } else {
                            skipped += 1;
                        }
                    }
                    (acc, skipped)
                })
                .collect();
            let total: f64 = rows.iter().map(|r| r.0).sum::<f64>() / (n * n) as f64;
            (total, n * n, rows.iter().map(|r| r.1).sum())
        },
        "sampled-grid",
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(level: usize, s: f64) -> TraceEntry {
        TraceEntry { level, nodes: 0, partial_sum: s, skipped: 0 }
    }

    #[test]
    fn judge_rules() {
        let t: Vec<_> = [1.0, 2.0, 4.0, 8.0].iter().enumerate().map(|(i, &s)| entry(i, s)).collect();
        assert_eq!(judge(&t), Some(MembershipClass::Divergent));
        let t: Vec<_> = [1.0, 1.1, 1.1000001, 1.1000001].iter().enumerate().map(|(i, &s)| entry(i, s)).collect();
        assert_eq!(judge(&t), Some(MembershipClass::Finite { norm2: 1.1000001 }));
        // convergence before level 3 is not trusted
        let t = vec![entry(0, 1.0), entry(1, 1.0)];
        assert_eq!(judge(&t), None);
    }
}
