use num_complex::Complex64;

use crate::error::{Error, Point2, Result};
use crate::rif::RationalInnerFunction;

/// `C(z, w) = 1/((1 − z1 w̄1)(1 − z2 w̄2))`.
pub fn cauchy_kernel(z: Point2, w: Point2) -> Result<Complex64> {
    let a = 1.0 - z.0 * w.0.conj();
    let b = 1.0 - z.1 * w.1.conj();
    if a.norm() <= 1e-15 || b.norm() <= 1e-15 {
        return Err(Error::InvalidArgument("Cauchy kernel pole".into()));
    }
    Ok(1.0 / (a * b))
}

/// `k_b(z, w) = (1 − b(z) conj(b(w))) C(z, w)`.
pub fn dbr_kernel(b: &RationalInnerFunction, z: Point2, w: Point2) -> Result<Complex64> {
    Ok((1.0 - b.eval(z)? * b.eval(w)?.conj()) * cauchy_kernel(z, w)?)
}

/// `∫_𝕋 dm(ζ)/|a − bζ|² = 1/(|a|² − |b|²)` for `|a| > |b|`.
pub fn slice_integral_affine(a: Complex64, b: Complex64) -> Result<f64> {
    let gap = a.norm_sqr() - b.norm_sqr();
    if a.norm() <= b.norm() || !gap.is_finite() {
        return Err(Error::DivergentOrSingular(format!("|a| = {} does not exceed |b| = {}", a.norm(), b.norm())));
    }
    Ok(1.0 / gap)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn cauchy_values() {
        let z0 = (c(0.0), c(0.0));
        assert_eq!(cauchy_kernel(z0, z0).unwrap(), c(1.0));
        let h = (c(0.5), c(0.0));
        assert!((cauchy_kernel(h, h).unwrap() - 4.0 / 3.0).norm() < 1e-15);
        let hh = (c(0.5), c(0.5));
        assert!((cauchy_kernel(hh, hh).unwrap() - 16.0 / 9.0).norm() < 1e-15);
        assert!(cauchy_kernel((c(1.0), c(0.0)), (c(1.0), c(0.0))).is_err());
    }

    #[test]
    fn affine_slice_values() {
        assert_eq!(slice_integral_affine(c(1.0), c(0.0)).unwrap(), 1.0);
        assert_eq!(slice_integral_affine(c(2.0), c(0.0)).unwrap(), 0.25);
        let i = Complex64::i();
        assert!((slice_integral_affine(c(2.0), i + i * i).unwrap() - 0.5).abs() < 1e-15);
        assert!(slice_integral_affine(c(1.0), c(1.0)).is_err());
    }
}
