use num_complex::Complex64;
use serde::Serialize;

use super::h2::{h2_classify, h2_classify_sampled, MembershipVerdict, DEFAULT_MAX_LEVEL, DEFAULT_SAMPLED_MAX_LEVEL};
use super::ortho::{model_space_orthogonality, rational_orthogonality, Orthogonality, DEFAULT_FOURIER_GRID, DEFAULT_K};
use super::rational::RationalFunction;
use crate::clark::Alpha;
use crate::error::{Point2, Result};
use crate::polyalg::{FloatPoly, Poly2};
use crate::rif::RationalInnerFunction;

pub const DEFAULT_ORTHO_TOL: f64 = 1e-8;
/// Relative remainder accepted as exact division for float `α`.
const FLOAT_QUOTIENT_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct HbOptions {
    pub k: usize,
    pub grid_n: usize,
    pub max_level: usize,
    pub sampled_max_level: usize,
    /// Orthogonality residual accepted as membership in the model space.
    pub ortho_tol: f64,
}

impl Default for HbOptions {
    fn default() -> Self {
        HbOptions {
            k: DEFAULT_K,
            grid_n: DEFAULT_FOURIER_GRID,
            max_level: DEFAULT_MAX_LEVEL,
            sampled_max_level: DEFAULT_SAMPLED_MAX_LEVEL,
            ortho_tol: DEFAULT_ORTHO_TOL,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HbCertificate {
    pub w: [[f64; 2]; 2],
    /// `g` was formed as a rational function after exact cancellation.
    pub symbolic: bool,
    pub verdict: MembershipVerdict,
    pub orthogonality: Option<Orthogonality>,
    /// Finite norm and orthogonality residual within tolerance.
    pub passed: bool,
}

fn linear_factor(w: Complex64, axis_first: bool) -> Option<FloatPoly> {
    if w.norm() == 0.0 {
        return None;
    }
    let e = if axis_first { (1, 0) } else { (0, 1) };
    Some(Poly2::from_terms(vec![((0, 0), Complex64::new(1.0, 0.0)), (e, -w.conj())]))
}

/// `g = ((α − b2)/(α − b1))·k_{b1}(·, w)` as a rational function when
/// `αp1 − p̃1` divides `αp2 − p̃2` (exactly for exact `α`, up to a relative
/// remainder of `1e-10` otherwise).
pub fn symbolic_certificate_function(
    b1: &RationalInnerFunction,
    b2: &RationalInnerFunction,
    alpha: &Alpha,
    w: Point2,
) -> Result<Option<RationalFunction>> {
    let h = match alpha.as_exact() {
        Some(a) => {
            let l1 = &b1.p().scale(a) - b1.ptilde();
            let l2 = &b2.p().scale(a) - b2.ptilde();
            l2.div_exact(&l1, 0.0).map(|h| h.to_float())
        }
        None => {
            let a = alpha.value();
            let l1 = &b1.p_float().scale(&a) - b1.ptilde_float();
            let l2 = &b2.p_float().scale(&a) - b2.ptilde_float();
            l2.div_exact(&l1, FLOAT_QUOTIENT_TOL)
        }
    };
    let Some(h) = h else {
        return Ok(None);
    };
    let beta = b1.eval(w)?.conj();
    let kernel_num = b1.p_float() - &b1.ptilde_float().scale(&beta);
    let num = &h * &kernel_num;
    let mut factors = vec![b2.p_float().clone()];
    factors.extend(linear_factor(w.0, true));
    factors.extend(linear_factor(w.1, false));
    Ok(Some(RationalFunction::new(num, factors)?))
}

/// Tests `((α − b2)/(α − b1))·k_{b1}(·, w) ∈ H(b2)`: integrability first,
/// then orthogonality to `b2 H²`.
pub fn hb_membership_certificate(
    b1: &RationalInnerFunction,
    b2: &RationalInnerFunction,
    alpha: &Alpha,
    w: Point2,
    opts: &HbOptions,
) -> Result<HbCertificate> {
    let wj = [[w.0.re, w.0.im], [w.1.re, w.1.im]];
    if let Some(g) = symbolic_certificate_function(b1, b2, alpha, w)? {
        let mut verdict = h2_classify(&g, opts.max_level);
        let orthogonality = if verdict.is_finite() {
            Some(rational_orthogonality(&g, b2, opts.k, opts.grid_n)?)
        } else {
            None
        };
        verdict.residual = orthogonality.as_ref().map(|o| o.residual);
        let passed = verdict.is_finite() && orthogonality.as_ref().is_some_and(|o| o.residual <= opts.ortho_tol);
        return Ok(HbCertificate { w: wj, symbolic: true, verdict, orthogonality, passed });
    }

    let al = alpha.value();
    let beta = b1.eval(w)?.conj();
    let (p1, t1, p2, t2) = (b1.p_float(), b1.ptilde_float(), b2.p_float(), b2.ptilde_float());
    let g = move |z: Point2| -> Complex64 {
        let v1 = t1.eval_c64(z.0, z.1) / p1.eval_c64(z.0, z.1);
        let v2 = t2.eval_c64(z.0, z.1) / p2.eval_c64(z.0, z.1);
        let c = 1.0 / ((1.0 - z.0 * w.0.conj()) * (1.0 - z.1 * w.1.conj()));
        (al - v2) / (al - v1) * (1.0 - v1 * beta) * c
    };
    let mut verdict = h2_classify_sampled(g, opts.sampled_max_level);
    let orthogonality = if verdict.is_finite() {
        Some(model_space_orthogonality(g, b2, opts.k, opts.grid_n)?)
    } else {
        None
    };
    verdict.residual = orthogonality.as_ref().map(|o| o.residual);
    let passed = verdict.is_finite() && orthogonality.as_ref().is_some_and(|o| o.residual <= opts.ortho_tol);
    Ok(HbCertificate { w: wj, symbolic: false, verdict, orthogonality, passed })
}
