use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::coeff::{Coeff, GaussRat};
use super::poly1::Poly1;
use crate::error::{Error, Result};

/// Which coordinate of the bidisc an operation fixes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    First,
    Second,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::First => Axis::Second,
            Axis::Second => Axis::First,
        }
    }
}

/// Exponent pair `(j, k)` of the monomial `z1^j z2^k`.
pub type Exp = (u32, u32);

/// Bivariate polynomial with a declared bidegree.
///
/// Zero coefficients are never stored, and every stored exponent is bounded
/// by the declared bidegree componentwise.
#[derive(Clone, Debug)]
pub struct Poly2<C: Coeff> {
    terms: BTreeMap<Exp, C>,
    bidegree: Exp,
}

pub type ExactPoly = Poly2<GaussRat>;
pub type FloatPoly = Poly2<Complex64>;

/// Equality is equality of the polynomial functions; declared bidegrees are
/// not compared.
impl<C: Coeff> PartialEq for Poly2<C> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

fn max_exp(a: Exp, b: Exp) -> Exp {
    (a.0.max(b.0), a.1.max(b.1))
}

impl<C: Coeff> Poly2<C> {
    pub fn zero() -> Self {
        Poly2 { terms: BTreeMap::new(), bidegree: (0, 0) }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(c, 0, 0)
    }

    pub fn monomial(c: C, j: u32, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert((j, k), c);
        }
        Poly2 { terms, bidegree: (j, k) }
    }

    /// `z1` or `z2`.
    pub fn var(axis: Axis) -> Self {
        match axis {
            Axis::First => Self::monomial(C::one(), 1, 0),
            Axis::Second => Self::monomial(C::one(), 0, 1),
        }
    }

    /// Builds from terms, summing repeated exponents. The declared bidegree
    /// is the actual one.
    pub fn from_terms<I: IntoIterator<Item = (Exp, C)>>(terms: I) -> Self {
        let mut map: BTreeMap<Exp, C> = BTreeMap::new();
        for (e, c) in terms {
            let entry = map.entry(e).or_insert_with(C::zero);
            *entry = entry.clone() + c;
        }
        map.retain(|_, c| !c.is_zero());
        let mut p = Poly2 { terms: map, bidegree: (0, 0) };
        p.bidegree = p.actual_bidegree();
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &C)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, j: u32, k: u32) -> C {
        self.terms.get(&(j, k)).cloned().unwrap_or_else(C::zero)
    }

    pub fn bidegree(&self) -> Exp {
        self.bidegree
    }

    /// Componentwise maximal exponents actually present.
    pub fn actual_bidegree(&self) -> Exp {
        self.terms.keys().fold((0, 0), |acc, &e| max_exp(acc, e))
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|&(j, k)| j + k).max().unwrap_or(0)
    }

    /// Re-declares the bidegree; it must dominate the actual one.
    pub fn with_bidegree(mut self, d: Exp) -> Result<Self> {
        let a = self.actual_bidegree();
        if a.0 > d.0 || a.1 > d.1 {
            return Err(Error::InvalidArgument(format!(
                "declared bidegree ({}, {}) is smaller than actual bidegree ({}, {})",
                d.0, d.1, a.0, a.1
            )));
        }
        self.bidegree = d;
        Ok(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.terms.values().map(|c| c.abs_f64()).fold(0.0, f64::max)
    }

    pub fn scale(&self, s: &C) -> Self {
        let mut out = Poly2 { terms: BTreeMap::new(), bidegree: self.bidegree };
        for (e, c) in &self.terms {
            let v = c.clone() * s.clone();
            if !v.is_zero() {
                out.terms.insert(*e, v);
            }
        }
        out
    }

    /// Multiplies by `c · z1^j z2^k`.
    pub fn mul_term(&self, c: &C, e: Exp) -> Self {
        let mut out = Poly2 {
            terms: BTreeMap::new(),
            bidegree: (self.bidegree.0 + e.0, self.bidegree.1 + e.1),
        };
        for (&(a, b), v) in &self.terms {
            let v = v.clone() * c.clone();
            if !v.is_zero() {
                out.terms.insert((a + e.0, b + e.1), v);
            }
        }
        out
    }

    pub fn to_float(&self) -> FloatPoly {
        Poly2 {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (*e, c.to_c64()))
                .filter(|(_, c)| !Coeff::is_zero(c))
                .collect(),
            bidegree: self.bidegree,
        }
    }

    /// Coefficients of `p` as polynomials in the `axis` variable, indexed by
    /// the power of the other variable.
    pub fn coefficient_polys(&self, axis: Axis) -> Vec<Poly1<C>> {
        let (own, other) = match axis {
            Axis::First => (self.bidegree.0, self.bidegree.1),
            Axis::Second => (self.bidegree.1, self.bidegree.0),
        };
        let mut rows = vec![vec![C::zero(); own as usize + 1]; other as usize + 1];
        for (&(j, k), c) in &self.terms {
            let (o, i) = match axis {
                Axis::First => (j, k),
                Axis::Second => (k, j),
            };
            rows[i as usize][o as usize] = c.clone();
        }
        rows.into_iter().map(Poly1::new).collect()
    }

    /// Horner evaluation: inner in `z1`, outer in `z2`.
    pub fn eval(&self, z1: &C, z2: &C) -> C {
        let rows = self.coefficient_polys(Axis::First);
        let mut acc = C::zero();
        for row in rows.iter().rev() {
            acc = acc * z2.clone() + row.eval(z1);
        }
        acc
    }

    pub fn eval_c64(&self, z1: Complex64, z2: Complex64) -> Complex64 {
        let (d1, d2) = self.actual_bidegree();
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); d1 as usize + 1]; d2 as usize + 1];
        for (&(j, k), c) in &self.terms {
            rows[k as usize][j as usize] = c.to_c64();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for row in rows.iter().rev() {
            let mut r = Complex64::new(0.0, 0.0);
            for c in row.iter().rev() {
                r = r * z1 + c;
            }
            acc = acc * z2 + r;
        }
        acc
    }

    /// Fixes the `axis` variable to `a`, returning a polynomial in the other.
    pub fn slice(&self, axis: Axis, a: &C) -> Poly1<C> {
        let rows = self.coefficient_polys(axis);
        Poly1::new(rows.iter().map(|r| r.eval(a)).collect())
    }

    /// Same as [`slice`](Self::slice) with float evaluation.
    pub fn slice_c64(&self, axis: Axis, a: Complex64) -> Poly1<Complex64> {
        let n = match axis {
            Axis::First => self.bidegree.1,
            Axis::Second => self.bidegree.0,
        } as usize;
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (&(j, k), c) in &self.terms {
            let (fixed, free) = match axis {
                Axis::First => (j, k),
                Axis::Second => (k, j),
            };
            out[free as usize] += c.to_c64() * a.powu(fixed);
        }
        Poly1::new(out)
    }

    /// Partial derivative with respect to the `axis` variable.
    pub fn derivative(&self, axis: Axis) -> Self {
        let mut terms = BTreeMap::new();
        for (&(j, k), c) in &self.terms {
            let (n, e) = match axis {
                Axis::First if j > 0 => (j, (j - 1, k)),
                Axis::Second if k > 0 => (k, (j, k - 1)),
                _ => continue,
            };
            let v = c.clone() * C::from_i64(n as i64);
            if !v.is_zero() {
                terms.insert(e, v);
            }
        }
        let bidegree = match axis {
            Axis::First => (self.bidegree.0.saturating_sub(1), self.bidegree.1),
            Axis::Second => (self.bidegree.0, self.bidegree.1.saturating_sub(1)),
        };
        Poly2 { terms, bidegree }
    }

    /// The reflection `z1^d1 z2^d2 · conj(p(1/conj z1, 1/conj z2))`.
    pub fn reflect(&self, d: Exp) -> Result<Self> {
        let a = self.actual_bidegree();
        if a.0 > d.0 || a.1 > d.1 {
            return Err(Error::InvalidArgument(format!(
                "reflection bidegree ({}, {}) is smaller than actual bidegree ({}, {})",
                d.0, d.1, a.0, a.1
            )));
        }
        let terms = self
            .terms
            .iter()
            .map(|(&(j, k), c)| ((d.0 - j, d.1 - k), c.conj()))
            .collect();
        Ok(Poly2 { terms, bidegree: d })
    }

    /// Monic gcd of the coefficients of `p` viewed as a polynomial in the
    /// other variable with coefficients in the `axis` variable. Its roots are
    /// the `a` for which `(z_axis - a)` divides `p`.
    pub fn coordinate_content(&self, axis: Axis, tol: f64) -> Result<Poly1<C>> {
        if self.is_zero() {
            return Err(Error::InvalidArgument("content of the zero polynomial".into()));
        }
        let mut g = Poly1::zero();
        for row in self.coefficient_polys(axis) {
            if row.is_zero() {
                continue;
            }
            g = if g.is_zero() { row.monic() } else { g.gcd(&row, tol) };
            if g.degree() == Some(0) {
                break;
            }
        }
        Ok(g.monic())
    }

    /// Exact quotient by a univariate polynomial `c(z_axis)`; fails unless
    /// the division leaves no remainder (up to `tol` for floats).
    pub fn divide_by_univariate(&self, axis: Axis, c: &Poly1<C>, tol: f64) -> Result<Self> {
        let scale = self.max_abs();
        let mut terms = Vec::new();
        for (i, row) in self.coefficient_polys(axis).into_iter().enumerate() {
            let (q, r) = row.div_rem(c)?;
            if r.coeffs().iter().any(|x| !x.negligible(scale, tol)) {
                return Err(Error::InvalidArgument("nonzero remainder in exact division".into()));
            }
            for (o, v) in q.coeffs().iter().enumerate() {
                let e = match axis {
                    Axis::First => (o as u32, i as u32),
                    Axis::Second => (i as u32, o as u32),
                };
                if !v.negligible(scale, tol) {
                    terms.push((e, v.clone()));
                }
            }
        }
        Ok(Poly2::from_terms(terms))
    }

    /// Quotient `self / divisor` when the division is exact, by repeated
    /// cancellation of lex-leading terms; `None` otherwise. Float remainders
    /// below `tol` relative to the dividend are treated as zero.
    pub fn div_exact(&self, divisor: &Self, tol: f64) -> Option<Self> {
        let (&ld, lc) = divisor.terms.iter().next_back()?;
        let lc_inv = lc.inv()?;
        let scale = self.max_abs();
        let mut r = self.clone();
        let mut q: Vec<(Exp, C)> = Vec::new();
        loop {
            r.terms.retain(|_, c| !c.negligible(scale, tol));
            let Some((&lr, c)) = r.terms.iter().next_back() else {
                return Some(Poly2::from_terms(q));
            };
            if lr.0 < ld.0 || lr.1 < ld.1 {
                return None;
            }
            let e = (lr.0 - ld.0, lr.1 - ld.1);
            let t = c.clone() * lc_inv.clone();
            r = &r - &divisor.mul_term(&t, e);
            r.terms.remove(&lr);
            q.push((e, t));
        }
    }

    /// Divides out the linear factor `(z_axis - a)`.
    pub fn divide_out_linear(&self, axis: Axis, a: &C, tol: f64) -> Result<Self> {
        self.divide_by_univariate(axis, &Poly1::linear_root(a.clone()), tol)
    }
}

impl<C: Coeff> Add for &Poly2<C> {
    type Output = Poly2<C>;
    fn add(self, o: &Poly2<C>) -> Poly2<C> {
        let mut terms = self.terms.clone();
        for (e, c) in &o.terms {
            let entry = terms.entry(*e).or_insert_with(C::zero);
            *entry = entry.clone() + c.clone();
            if entry.is_zero() {
                terms.remove(e);
            }
        }
        Poly2 { terms, bidegree: max_exp(self.bidegree, o.bidegree) }
    }
}

impl<C: Coeff> Neg for &Poly2<C> {
    type Output = Poly2<C>;
    fn neg(self) -> Poly2<C> {
        Poly2 {
            terms: self.terms.iter().map(|(e, c)| (*e, -c.clone())).collect(),
            bidegree: self.bidegree,
        }
    }
}

impl<C: Coeff> Sub for &Poly2<C> {
    type Output = Poly2<C>;
    fn sub(self, o: &Poly2<C>) -> Poly2<C> {
        self + &(-o)
    }
}

impl<C: Coeff> Mul for &Poly2<C> {
    type Output = Poly2<C>;
    fn mul(self, o: &Poly2<C>) -> Poly2<C> {
        let mut out = Poly2 {
            terms: BTreeMap::new(),
            bidegree: (self.bidegree.0 + o.bidegree.0, self.bidegree.1 + o.bidegree.1),
        };
        for (&(a, b), c) in &self.terms {
            for (&(x, y), d) in &o.terms {
                let e = (a + x, b + y);
                let entry = out.terms.entry(e).or_insert_with(C::zero);
                *entry = entry.clone() + c.clone() * d.clone();
            }
        }
        out.terms.retain(|_, c| !c.is_zero());
        out
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<C: Coeff> $tr for Poly2<C> {
            type Output = Poly2<C>;
            fn $m(self, o: Poly2<C>) -> Poly2<C> {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<C: Coeff> Neg for Poly2<C> {
    type Output = Poly2<C>;
    fn neg(self) -> Poly2<C> {
        -&self
    }
}
