use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::coeff::Coeff;
use crate::error::{Error, Result};

/// Dense univariate polynomial, coefficients in ascending degree.
///
/// The coefficient vector never ends in an exact zero; the zero polynomial
/// has an empty vector.
#[derive(Clone, Debug, PartialEq)]
pub struct Poly1<C: Coeff> {
    coeffs: Vec<C>,
}

pub type Poly1F = Poly1<Complex64>;

impl<C: Coeff> Poly1<C> {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(c: C) -> Self {
        Poly1::new(vec![c])
    }

    /// `z - a`
    pub fn linear_root(a: C) -> Self {
        Poly1::new(vec![-a, C::one()])
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&C> {
        self.coeffs.last()
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: &C) -> C {
        let mut acc = C::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * z.clone() + c.clone();
        }
        acc
    }

    pub fn eval_c64(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_c64();
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Poly1::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c.clone() * C::from_i64(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, s: &C) -> Self {
        Poly1::new(self.coeffs.iter().map(|c| c.clone() * s.clone()).collect())
    }

    pub fn to_float(&self) -> Poly1F {
        Poly1::new(self.coeffs.iter().map(|c| c.to_c64()).collect())
    }

    /// Drops leading coefficients that are negligible relative to the largest
    /// one. Exact polynomials are returned unchanged.
    pub fn trim_negligible(&self, tol: f64) -> Self {
        let scale = self.max_abs();
        let mut coeffs = self.coeffs.clone();
        while coeffs.last().is_some_and(|c| c.negligible(scale, tol)) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    /// Division with remainder. The divisor must be nonzero.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        let lead = divisor
            .leading()
            .ok_or_else(|| Error::InvalidArgument("division by zero polynomial".into()))?;
        let lead_inv = lead
            .inv()
            .ok_or_else(|| Error::InvalidArgument("division by zero polynomial".into()))?;
        let dd = divisor.coeffs.len() - 1;
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return Ok((Poly1::zero(), self.clone()));
        }
        let mut quot = vec![C::zero(); rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let f = rem[k + dd].clone() * lead_inv.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - f.clone() * dc.clone();
            }
            // the leading slot is zero by construction; clear float residue
            rem[k + dd] = C::zero();
            quot[k] = f;
        }
        rem.truncate(dd);
        Ok((Poly1::new(quot), Poly1::new(rem)))
    }

    pub fn monic(&self) -> Self {
        match self.leading().and_then(|c| c.inv()) {
            Some(inv) => self.scale(&inv),
            None => self.clone(),
        }
    }

    /// Monic gcd by the Euclidean algorithm. For float coefficients the
    /// remainders are cleaned with relative tolerance `tol`.
    pub fn gcd(&self, other: &Self, tol: f64) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        let clean = |p: &Poly1<C>, scale: f64| -> Poly1<C> {
            Poly1::new(
                p.coeffs
                    .iter()
                    .map(|c| if c.negligible(scale, tol) { C::zero() } else { c.clone() })
                    .collect(),
            )
        };
        loop {
            let scale = a.max_abs().max(b.max_abs());
            b = clean(&b, scale);
            if b.is_zero() {
                return a.monic();
            }
            b = b.monic();
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
    }
}

impl<C: Coeff> Add for &Poly1<C> {
    type Output = Poly1<C>;
    fn add(self, o: &Poly1<C>) -> Poly1<C> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly1::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(C::zero);
                    let b = o.coeffs.get(k).cloned().unwrap_or_else(C::zero);
                    a + b
                })
                .collect(),
        )
    }
}

impl<C: Coeff> Sub for &Poly1<C> {
    type Output = Poly1<C>;
    fn sub(self, o: &Poly1<C>) -> Poly1<C> {
        let n = self.coeffs.len().max(o.coeffs.len());
        Poly1::new(
            (0..n)
                .map(|k| {
                    let a = self.coeffs.get(k).cloned().unwrap_or_else(C::zero);
                    let b = o.coeffs.get(k).cloned().unwrap_or_else(C::zero);
                    a - b
                })
                .collect(),
        )
    }
}

impl<C: Coeff> Mul for &Poly1<C> {
    type Output = Poly1<C>;
    fn mul(self, o: &Poly1<C>) -> Poly1<C> {
        if self.is_zero() || o.is_zero() {
            return Poly1::zero();
        }
        let mut out = vec![C::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly1::new(out)
    }
}
