//! Univariate root finding by Aberth–Ehrlich iteration with a Newton polish.

use num_complex::Complex64;

use super::coeff::Coeff;
use super::poly1::Poly1;
use crate::error::{Error, Result};

const MAX_ITER: usize = 500;

fn horner_with_derivative(c: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &a in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + a;
    }
    (p, dp)
}

/// All complex roots of `q`, repeated according to multiplicity.
///
/// Leading coefficients below `1e-14` of the largest coefficient are dropped
/// before iterating; exact-zero low coefficients are split off as roots at
/// the origin.
pub fn poly1_roots<C: Coeff>(q: &Poly1<C>) -> Result<Vec<Complex64>> {
    if q.is_zero() {
        return Err(Error::InvalidArgument("roots of the zero polynomial".into()));
    }
    let f = q.to_float().trim_negligible(1e-14);
    let coeffs = f.coeffs();
    let zeros_at_origin = coeffs.iter().take_while(|c| Coeff::is_zero(*c)).count();
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    let c: Vec<Complex64> = coeffs[zeros_at_origin..].to_vec();
    let n = c.len() - 1;
    match n {
        0 => return Ok(roots),
        1 => {
            roots.push(-c[0] / c[1]);
            return Ok(roots);
        }
        _ => {}
    }

    // Initial guesses on a circle of radius (|c0/cn|)^(1/n), off the real axis.
    let lead = c[n];
    let radius = (c[0].norm() / lead.norm()).powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let ang = std::f64::consts::TAU * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(radius, ang)
        })
        .collect();

    for _ in 0..MAX_ITER {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner_with_derivative(&c, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += Complex64::new(1.0, 0.0) / d;
                    }
                }
            }
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if max_step < 1e-16 {
            break;
        }
    }

    // One Newton step, kept only if it does not increase the residual.
    for zi in z.iter_mut() {
        let (p, dp) = horner_with_derivative(&c, *zi);
        if dp.norm() > 0.0 {
            let cand = *zi - p / dp;
            let (pc, _) = horner_with_derivative(&c, cand);
            if cand.is_finite() && pc.norm() <= p.norm() {
                *zi = cand;
            }
        }
    }
    roots.extend(z);
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::GaussRat;
    use proptest::prelude::*;

    fn residual_ok(q: &Poly1<Complex64>, roots: &[Complex64]) -> bool {
        let bound = 1e-10 * (1.0 + q.max_abs());
        roots.iter().all(|r| q.eval_c64(*r).norm() <= bound)
    }

    #[test]
    fn linear_and_quadratic() {
        let q = Poly1::new(vec![GaussRat::from_i64(2), GaussRat::from_i64(-2)]);
        let r = poly1_roots(&q).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r[0] - 1.0).norm() < 1e-15);

        let q = Poly1::new(vec![GaussRat::one(), GaussRat::zero(), GaussRat::one()]);
        let mut r = poly1_roots(&q).unwrap();
        r.sort_by(|a, b| b.im.partial_cmp(&a.im).unwrap());
        assert!((r[0] - Complex64::new(0.0, 1.0)).norm() < 1e-14);
        assert!((r[1] - Complex64::new(0.0, -1.0)).norm() < 1e-14);
    }

    #[test]
    fn constant_has_no_roots_and_zero_is_rejected() {
        assert!(poly1_roots(&Poly1::constant(GaussRat::from_i64(3))).unwrap().is_empty());
        assert!(poly1_roots(&Poly1::<GaussRat>::zero()).is_err());
    }

    #[test]
    fn slice_of_level_polynomial_on_circle() {
        // 2 z1 z2 - 2 at z1 = e^{i theta}: root z2 = e^{-i theta}
        let t = 0.7_f64;
        let z1 = Complex64::from_polar(1.0, t);
        let q = Poly1::new(vec![Complex64::new(-2.0, 0.0), 2.0 * z1]);
        let r = poly1_roots(&q).unwrap();
        assert!((r[0] - Complex64::from_polar(1.0, -t)).norm() < 1e-15);
    }

    #[test]
    fn double_root_residual() {
        // (z - 1)^2 (z + 2)
        let q = Poly1::new(vec![2.0, -3.0, 0.0, 1.0].into_iter().map(|x| Complex64::new(x, 0.0)).collect());
        let r = poly1_roots(&q).unwrap();
        assert_eq!(r.len(), 3);
        assert!(residual_ok(&q, &r));
    }

    proptest! {
        #[test]
        fn residual_bound_random(coeffs in proptest::collection::vec((-5.0f64..5.0, -5.0f64..5.0), 2..7)) {
            let mut c: Vec<Complex64> = coeffs.into_iter().map(|(a, b)| Complex64::new(a, b)).collect();
            let n = c.len();
            if c[n - 1].norm() < 0.1 { c[n - 1] = Complex64::new(1.0, 0.0); }
            let q = Poly1::new(c);
            let r = poly1_roots(&q).unwrap();
            prop_assert_eq!(r.len(), q.degree().unwrap());
            prop_assert!(residual_ok(&q, &r));
        }
    }
}
