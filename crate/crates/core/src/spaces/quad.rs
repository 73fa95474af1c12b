//! Slice-wise integration on the torus.
//!
//! Inner integrals along `z2` are done in closed form from the partial
//! fraction expansion of the slice; the outer integral along `θ = arg z1`
//! uses midpoint nodes pulled towards angles where the denominator has a
//! torus zero.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::polyalg::{poly1_roots, Axis, FloatPoly, Poly1F};

/// Strength of the node map near singular angles; the local node spacing
/// shrinks by the factor `1 − MAP_STRENGTH`. Milder than the full map so
/// that divergent integrals show geometric growth under refinement.
pub const MAP_STRENGTH: f64 = 0.9;
/// An affine slice root closer than this to the circle is treated as a pole.
const POLE_TOL: f64 = 1e-14;
/// Slice roots closer than this to the circle are resolved by the mapped
/// fallback rule instead of partial fractions.
const NEAR_POLE: f64 = 1e-6;
/// Roots closer than this (relative) trigger the fallback rule.
const CLUSTER_TOL: f64 = 1e-6;
const FALLBACK_NODES: usize = 4096;

/// Distance of the slice roots in `z2` from the unit circle at `z1 = e^{iθ}`.
fn circle_gap(den: &FloatPoly, theta: f64) -> f64 {
    let s = den.slice_c64(Axis::First, Complex64::from_polar(1.0, theta));
    if s.max_abs() <= 1e-13 * den.max_abs() {
        return 0.0;
    }
    poly1_roots(&s)
        .unwrap_or_default()
        .iter()
        .map(|r| (r.norm() - 1.0).abs())
        .fold(f64::INFINITY, f64::min)
}

fn golden_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if (b - a).abs() < 1e-15 {
            break;
        }
        if f1 < f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 < f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Angles `θ ∈ [0, 2π)` at which the `z1 = e^{iθ}` slice of `den` has a
/// root on the unit circle.
pub fn singular_angles(den: &FloatPoly) -> Vec<f64> {
    const SCAN: usize = 1024;
    let step = TAU / SCAN as f64;
    let gaps: Vec<f64> = (0..SCAN).map(|k| circle_gap(den, k as f64 * step)).collect();
    let mut out: Vec<f64> = Vec::new();
    for k in 0..SCAN {
        let prev = gaps[(k + SCAN - 1) % SCAN];
        let next = gaps[(k + 1) % SCAN];
        if gaps[k] > 0.05 || gaps[k] > prev || gaps[k] > next {
            continue;
        }
        let c = k as f64 * step;
        let (t, v) = if gaps[k] == 0.0 { (c, 0.0) } else { golden_min(|t| circle_gap(den, t), c - step, c + step) };
        if v <= 1e-6 {
            let t = t.rem_euclid(TAU);
            let dup = out.iter().any(|&s| {
                let d = (s - t).abs();
                d.min(TAU - d) < 1e-6
            });
            if !dup {
                out.push(t);
            }
        }
    }
    out.sort_by(|a, b| a.total_cmp(b));
    out
}

/// Outer nodes `(θ, weight)` with weights summing to 1.
///
/// Without singular angles this is the half-step-offset periodic trapezoid.
/// Otherwise each arc between consecutive singular angles gets its own
/// midpoint rule in `t` under `θ = θ_s + L(t − a sin(2πt)/2π)`.
pub fn outer_nodes(singular: &[f64], n: usize) -> Vec<(f64, f64)> {
    mapped_nodes(singular, n, MAP_STRENGTH)
}

/// [`outer_nodes`] with an explicit map strength `a ∈ [0, 1]`; `a = 1`
/// makes the node density vanish quadratically at singular angles.
pub fn mapped_nodes(singular: &[f64], n: usize, a: f64) -> Vec<(f64, f64)> {
    if singular.is_empty() {
        return (0..n).map(|m| (TAU * (m as f64 + 0.5) / n as f64, 1.0 / n as f64)).collect();
    }
    let s = singular.len();
    let mut out = Vec::with_capacity(n + s);
    for i in 0..s {
        let start = singular[i];
        let end = if i + 1 < s { singular[i + 1] } else { singular[0] + TAU };
        let len = end - start;
        let m_i = ((n as f64 * len / TAU).round() as usize).max(2);
        for m in 0..m_i {
            let t = (m as f64 + 0.5) / m_i as f64;
            let theta = start + len * (t - a * (TAU * t).sin() / TAU);
            let w = len / TAU * (1.0 - a * (TAU * t).cos()) / m_i as f64;
            out.push((theta.rem_euclid(TAU), w));
        }
    }
    out
}

fn roots_separated(roots: &[Complex64]) -> bool {
    for i in 0..roots.len() {
        for j in 0..i {
            let scale = 1.0f64.max(roots[i].norm());
            if (roots[i] - roots[j]).norm() < CLUSTER_TOL * scale {
                return false;
            }
        }
    }
    true
}

fn near_circle(r: &Complex64) -> bool {
    (r.norm() - 1.0).abs() <= NEAR_POLE
}

/// `N = S·D + remainder` and the residues `c_i` of `remainder/D` at the
/// simple roots `r_i` of `D`.
struct PartialFractions {
    poly: Vec<Complex64>,
    roots: Vec<Complex64>,
    residues: Vec<Complex64>,
}

/// Partial fractions when they are well conditioned, otherwise the roots
/// that the fallback rule should resolve.
fn partial_fractions(num: &Poly1F, den: &Poly1F) -> std::result::Result<PartialFractions, Vec<Complex64>> {
    let roots = poly1_roots(den).map_err(|_| Vec::new())?;
    if !roots_separated(&roots) || roots.iter().any(near_circle) {
        return Err(roots);
    }
    let (q, r) = num.div_rem(den).map_err(|_| roots.clone())?;
    let dd = den.derivative();
    let residues = roots.iter().map(|&x| r.eval_c64(x) / dd.eval_c64(x)).collect();
    Ok(PartialFractions { poly: q.coeffs().to_vec(), roots, residues })
}

/// Circle samples of `num/den`, concentrated at the angles of roots close to
/// the circle; `None` if a sample is not finite.
fn fallback_samples(num: &Poly1F, den: &Poly1F, roots: &[Complex64], m: usize) -> Option<Vec<(f64, f64, Complex64)>> {
    let mut angles: Vec<f64> = Vec::new();
    for r in roots.iter().filter(|r| near_circle(r)) {
        let t = r.arg().rem_euclid(TAU);
        if !angles.iter().any(|&s| (s - t).abs().min(TAU - (s - t).abs()) < 1e-12) {
            angles.push(t);
        }
    }
    angles.sort_by(|a, b| a.total_cmp(b));
    mapped_nodes(&angles, m, 1.0)
        .into_iter()
        .map(|(t, w)| {
            let z = Complex64::from_polar(1.0, t);
            let v = num.eval_c64(z) / den.eval_c64(z);
            v.is_finite().then_some((t, w, v))
        })
        .collect()
}

fn fallback_l2(num: &Poly1F, den: &Poly1F, roots: &[Complex64]) -> Option<f64> {
    let s = fallback_samples(num, den, roots, FALLBACK_NODES)?;
    Some(s.iter().map(|(_, w, v)| w * v.norm_sqr()).sum())
}

#[cfg(test)]
fn trapezoid_l2(num: &Poly1F, den: &Poly1F) -> f64 {
    fallback_l2(num, den, &[]).unwrap()
}

/// `∫_𝕋 |num/den|² dm`; `None` when `den` has a root on the circle.
pub fn slice_l2(num: &Poly1F, den: &Poly1F) -> Option<f64> {
    if num.is_zero() {
        return Some(0.0);
    }
    let dd = den.degree()?;
    if dd == 0 {
        let d = den.coeffs()[0].norm_sqr();
        return Some(num.coeffs().iter().map(|c| c.norm_sqr()).sum::<f64>() / d);
    }
    if dd == 1 && num.degree() == Some(0) {
        let a = den.coeffs()[0];
        let b = -den.coeffs()[1];
        if (a.norm() - b.norm()).abs() <= POLE_TOL * a.norm().max(b.norm()) {
            return None;
        }
        return super::kernels::slice_integral_affine(a, b)
            .ok()
            .map(|v| num.coeffs()[0].norm_sqr() * v);
    }
    let pf = match partial_fractions(num, den) {
        Ok(pf) if pf.roots.iter().all(|r| r.norm() > 1.0) => pf,
        Ok(pf) => return fallback_l2(num, den, &pf.roots),
        Err(roots) => return fallback_l2(num, den, &roots),
    };
    let mut total: f64 = pf.poly.iter().map(|c| c.norm_sqr()).sum();
    let mut ff = Complex64::new(0.0, 0.0);
    for (ri, ci) in pf.roots.iter().zip(&pf.residues) {
        for (rj, cj) in pf.roots.iter().zip(&pf.residues) {
            ff += ci * cj.conj() / (ri * rj.conj() - 1.0);
        }
    }
    total += ff.re;
    let mut cross = Complex64::new(0.0, 0.0);
    for (ri, ci) in pf.roots.iter().zip(&pf.residues) {
        let inv = 1.0 / ri.conj();
        let mut pw = inv;
        for s in &pf.poly {
            cross -= s * ci.conj() * pw;
            pw *= inv;
        }
    }
    total += 2.0 * cross.re;
    Some(total.max(0.0))
}

/// Fourier coefficients `k = 0..=kmax` on the circle of `num/den`;
/// `None` when `den` has a root on the circle.
pub fn slice_fourier(num: &Poly1F, den: &Poly1F, kmax: usize) -> Option<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); kmax + 1];
    if num.is_zero() {
        return Some(out);
    }
    let dd = den.degree()?;
    if dd == 0 {
        let d = den.coeffs()[0];
        for (k, c) in num.coeffs().iter().enumerate().take(kmax + 1) {
            out[k] = c / d;
        }
        return Some(out);
    }
    match partial_fractions(num, den) {
        Ok(pf) => {
            for (k, c) in pf.poly.iter().enumerate().take(kmax + 1) {
                out[k] += c;
            }
            for (r, c) in pf.roots.iter().zip(&pf.residues) {
                if r.norm() > 1.0 {
                    let inv = 1.0 / r;
                    let mut pw = inv;
                    for o in out.iter_mut() {
                        *o -= c * pw;
                        pw *= inv;
                    }
                }
            }
            Some(out)
        }
        Err(roots) => {
            for (t, w, v) in fallback_samples(num, den, &roots, FALLBACK_NODES.max(4 * kmax))? {
                let step = Complex64::from_polar(1.0, -t);
                let mut e = v * w;
                for o in out.iter_mut() {
                    *o += e;
                    e *= step;
                }
            }
            Some(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p1(c: &[(f64, f64)]) -> Poly1F {
        Poly1F::new(c.iter().map(|&(a, b)| Complex64::new(a, b)).collect())
    }

    #[test]
    fn slice_l2_matches_trapezoid() {
        let num = p1(&[(1.0, 0.5), (-0.3, 0.0), (0.2, 0.1)]);
        let den = p1(&[(3.0, 0.0), (0.5, -1.0), (0.4, 0.0)]);
        let a = slice_l2(&num, &den).unwrap();
        let b = trapezoid_l2(&num, &den);
        assert!((a - b).abs() < 1e-12 * b, "{a} {b}");
    }

    #[test]
    fn slice_fourier_matches_trapezoid() {
        let num = p1(&[(1.0, 0.5), (-0.3, 0.0), (0.2, 0.1), (0.0, 1.0)]);
        // one root inside, one outside
        let den = &p1(&[(-0.5, 0.0), (1.0, 0.0)]) * &p1(&[(2.0, 1.0), (-1.0, 0.0)]);
        let a = slice_fourier(&num, &den, 6).unwrap();
        let m = 1 << 14;
        for (k, ak) in a.iter().enumerate() {
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..m {
                let t = TAU * (j as f64 + 0.5) / m as f64;
                let z = Complex64::from_polar(1.0, t);
                s += num.eval_c64(z) / den.eval_c64(z) * Complex64::from_polar(1.0, -(k as f64) * t);
            }
            s /= m as f64;
            assert!((s - ak).norm() < 1e-12, "k={k} {s} {ak}");
        }
    }

    #[test]
    fn finds_singular_angle_of_favourite_denominator() {
        let den = crate::polyalg::parse_poly("2 - z1 - z2").unwrap().to_float();
        let s = singular_angles(&den);
        assert_eq!(s.len(), 1);
        assert!(s[0].min(TAU - s[0]) < 1e-6);
        assert!(singular_angles(&crate::polyalg::parse_poly("3 - z1 - z2").unwrap().to_float()).is_empty());
    }

    #[test]
    fn outer_weights_sum_to_one() {
        for s in [vec![], vec![0.0], vec![0.5, 2.0, 4.0]] {
            let w: f64 = outer_nodes(&s, 256).iter().map(|x| x.1).sum();
            assert!((w - 1.0).abs() < 1e-12);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]
        #[test]
        fn affine_closed_form_matches_brute_force(ar in 0.2f64..3.0, at in 0.0f64..TAU, br in 0.0f64..2.0, bt in 0.0f64..TAU) {
            let a = Complex64::from_polar(ar + 0.1 + br, at);
            let b = Complex64::from_polar(br, bt);
            let exact = super::super::kernels::slice_integral_affine(a, b).unwrap();
            let m = 1_000_000;
            let brute: f64 = (0..m).map(|k| {
                let z = Complex64::from_polar(1.0, TAU * k as f64 / m as f64);
                1.0 / (a - b * z).norm_sqr()
            }).sum::<f64>() / m as f64;
            prop_assert!((exact - brute).abs() <= 1e-8 * exact);
        }
    }
}
