//! Clark measures of rational inner functions: level curve samples with
//! density weights, degenerate coordinate lines with masses, and the Poisson
//! and Cauchy transforms of the resulting measure.
//!
//! Lebesgue measure on the circle is normalized to total mass 1.

use std::f64::consts::TAU;
use std::io::{self, Write};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::error::{Error, Point2, Result};
use crate::polyalg::{poly1_roots, Axis, Coeff, FloatPoly, GaussRat, Poly1, Poly2};
use crate::rif::RationalInnerFunction;

/// Tolerance for accepting a slice root as unimodular before polishing.
const CURVE_ROOT_TOL: f64 = 1e-6;
/// Band around the unit circle for content roots that become lines.
const LINE_TOL: f64 = 1e-10;
/// Float content gcd tolerance for non-exact `α`.
const FLOAT_GCD_TOL: f64 = 1e-8;
/// Offset used to average the weight across a singular sample.
const SINGULAR_OFFSET: f64 = 1e-5;

pub const DEFAULT_GRID_N: usize = 2048;

/// Unimodular parameter of the Clark family.
#[derive(Clone, Debug, PartialEq)]
pub enum Alpha {
    Exact(GaussRat),
    Float(Complex64),
}

impl Alpha {
    pub fn exact(a: GaussRat) -> Result<Self> {
        if !a.is_unimodular() {
            return Err(Error::InvalidArgument(format!("alpha = {} is not unimodular", a)));
        }
        Ok(Alpha::Exact(a))
    }

    pub fn one() -> Self {
        Alpha::Exact(GaussRat::one())
    }

    pub fn minus_one() -> Self {
        Alpha::Exact(GaussRat::from_i64(-1))
    }

    pub fn from_complex(a: Complex64) -> Result<Self> {
        if (a.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("|alpha| = {} is not 1", a.norm())));
        }
        Ok(Alpha::Float(a / a.norm()))
    }

    pub fn from_angle(theta: f64) -> Self {
        Alpha::Float(Complex64::from_polar(1.0, theta))
    }

    pub fn value(&self) -> Complex64 {
        match self {
            Alpha::Exact(a) => a.to_c64(),
            Alpha::Float(a) => *a,
        }
    }

    pub fn as_exact(&self) -> Option<&GaussRat> {
        match self {
            Alpha::Exact(a) => Some(a),
            Alpha::Float(_) => None,
        }
    }
}

impl std::fmt::Display for Alpha {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Alpha::Exact(a) => write!(f, "{}", a),
            Alpha::Float(a) => write!(f, "{}", crate::error::fmt_c(a)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CurveSample {
    pub theta: f64,
    pub zeta2: Complex64,
    pub weight: f64,
    /// Weight obtained by averaging across a point where `p` vanishes.
    pub averaged: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CurveBranch {
    pub samples: Vec<CurveSample>,
}

/// `{a} × 𝕋` (axis first) or `𝕋 × {a}` (axis second) carrying `mass · m`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DegenerateLine {
    pub axis: Axis,
    pub anchor: Complex64,
    pub mass: f64,
}

/// The level polynomial `p̃ − αp` split into coordinate contents and the
/// remaining curve factor.
#[derive(Clone, Debug)]
pub struct LevelSplit {
    pub q: FloatPoly,
    pub content_first: Poly1<Complex64>,
    pub content_second: Poly1<Complex64>,
    pub reduced: FloatPoly,
}

fn split_generic<C: Coeff>(q: &Poly2<C>, tol: f64) -> Result<(Poly1<C>, Poly1<C>, Poly2<C>)> {
    if q.is_zero() {
        return Err(Error::InvalidRif("p̃ − αp vanishes identically".into()));
    }
    let c1 = q.coordinate_content(Axis::First, tol)?;
    let q1 = q.divide_by_univariate(Axis::First, &c1, tol)?;
    let c2 = q1.coordinate_content(Axis::Second, tol)?;
    let red = q1.divide_by_univariate(Axis::Second, &c2, tol)?;
    Ok((c1, c2, red))
}

/// Computes `q = p̃ − αp`, exactly when `α` is exact.
pub fn level_split(rif: &RationalInnerFunction, alpha: &Alpha) -> Result<LevelSplit> {
    match alpha {
        Alpha::Exact(a) => {
            let q = rif.ptilde() - &rif.p().scale(a);
            let (c1, c2, red) = split_generic(&q, 0.0)?;
            Ok(LevelSplit {
                q: q.to_float(),
                content_first: c1.to_float(),
                content_second: c2.to_float(),
                reduced: red.to_float(),
            })
        }
        Alpha::Float(a) => {
            let q = rif.ptilde_float() - &rif.p_float().scale(a);
            let (c1, c2, red) = split_generic(&q, FLOAT_GCD_TOL)?;
            Ok(LevelSplit { q, content_first: c1, content_second: c2, reduced: red })
        }
    }
}

/// Richardson extrapolation of `f(1 − h)` to `h = 0` over `h = 2^-k`,
/// `k = 4..=12`, assuming an expansion in integer powers of `h`.
pub fn richardson_limit<F: FnMut(f64) -> f64>(mut f: F) -> f64 {
    let ks: Vec<i32> = (4..=12).collect();
    let mut table: Vec<Vec<f64>> = Vec::with_capacity(ks.len());
    for (i, &k) in ks.iter().enumerate() {
        let mut row = vec![f(1.0 - 2f64.powi(-k))];
        for m in 1..=i {
            let s = 2f64.powi(m as i32);
            let v = (s * row[m - 1] - table[i - 1][m - 1]) / (s - 1.0);
            row.push(v);
        }
        table.push(row);
    }
    *table.last().and_then(|r| r.last()).expect("nonempty table")
}

fn clark_quotient(alpha: Complex64, b: Complex64) -> f64 {
    ((alpha + b) / (alpha - b)).re
}

/// Atom of the projected measure at `a`, from the radial limit of the
/// Poisson integral along the coordinate axis.
pub fn line_mass(rif: &RationalInnerFunction, alpha: &Alpha, axis: Axis, a: Complex64) -> Result<f64> {
    let al = alpha.value();
    let zero = Complex64::new(0.0, 0.0);
    let mut err = None;
    let m = richardson_limit(|r| {
        let z = match axis {
            Axis::First => (a * r, zero),
            Axis::Second => (zero, a * r),
        };
        match rif.eval(z) {
            Ok(b) => (1.0 - r) / (1.0 + r) * clark_quotient(al, b),
            Err(e) => {
                err = Some(e);
                0.0
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => Ok(m.max(0.0)),
    }
}

/// Degenerate lines: unimodular roots of the coordinate contents of
/// `p̃ − αp`, each with its extrapolated mass.
pub fn degenerate_components(rif: &RationalInnerFunction, alpha: &Alpha) -> Result<Vec<DegenerateLine>> {
    let split = level_split(rif, alpha)?;
    lines_from_split(rif, alpha, &split)
}

fn lines_from_split(rif: &RationalInnerFunction, alpha: &Alpha, split: &LevelSplit) -> Result<Vec<DegenerateLine>> {
    let mut lines: Vec<DegenerateLine> = Vec::new();
    for (axis, content) in [(Axis::First, &split.content_first), (Axis::Second, &split.content_second)] {
        for r in poly1_roots(content)? {
            let m = r.norm();
            if m < 1.0 - LINE_TOL {
                return Err(Error::InvalidRif(format!(
                    "p̃ − αp has the factor (z{} − a) with |a| = {:.6} < 1",
                    if axis == Axis::First { 1 } else { 2 },
                    m
                )));
            }
            if m > 1.0 + LINE_TOL {
                continue;
            }
            let anchor = r / m;
            if lines.iter().any(|l| l.axis == axis && (l.anchor - anchor).norm() < 1e-8) {
                continue;
            }
            let mass = line_mass(rif, alpha, axis, anchor)?;
            lines.push(DegenerateLine { axis, anchor, mass });
        }
    }
    Ok(lines)
}

#[derive(Debug)]
enum WeightEval {
    Value(f64),
    Singular,
}

struct WeightContext<'a> {
    p: &'a FloatPoly,
    q2: FloatPoly,
    p_scale: f64,
    q_scale: f64,
}

impl WeightContext<'_> {
    /// `1/|∂φ/∂z2| = |p| / |∂(p̃ − αp)/∂z2|` on the level set.
    fn eval(&self, z: Point2) -> Result<WeightEval> {
        let pv = self.p.eval_c64(z.0, z.1).norm();
        let dv = self.q2.eval_c64(z.0, z.1).norm();
        let p_tiny = pv <= 1e-9 * self.p_scale;
        let d_tiny = dv <= 1e-9 * self.q_scale;
        if p_tiny && d_tiny {
            return Ok(WeightEval::Singular);
        }
        if dv <= 1e-12 * self.q_scale {
            return Err(Error::BranchDegeneracy { point: z });
        }
        Ok(WeightEval::Value(pv / dv))
    }
}

/// Unimodular roots of the curve factor on the slice `z1 = e^{iθ}`,
/// Newton-polished and projected to the circle.
fn curve_roots(reduced: &FloatPoly, theta: f64) -> Result<Vec<Complex64>> {
    let z1 = Complex64::from_polar(1.0, theta);
    let s = reduced.slice_c64(Axis::First, z1);
    if s.degree().unwrap_or(0) == 0 {
        return Ok(Vec::new());
    }
    let ds = s.derivative();
    let mut out = Vec::new();
    for mut r in poly1_roots(&s)? {
        if (r.norm() - 1.0).abs() > CURVE_ROOT_TOL {
            continue;
        }
        for _ in 0..3 {
            let d = ds.eval_c64(r);
            if d.norm() == 0.0 {
                break;
            }
            let step = s.eval_c64(r) / d;
            if !step.is_finite() || step.norm() > 1e-3 {
                break;
            }
            r -= step;
        }
        out.push(r / r.norm());
    }
    Ok(out)
}

fn nearest(roots: &[Complex64], target: Complex64) -> Option<Complex64> {
    roots
        .iter()
        .copied()
        .min_by(|a, b| (a - target).norm().total_cmp(&(b - target).norm()))
}

/// Level curve samples at `θ_k = 2πk/grid_n`, threaded into branches.
pub fn clark_support(rif: &RationalInnerFunction, alpha: &Alpha, grid_n: usize) -> Result<Vec<CurveBranch>> {
    let split = level_split(rif, alpha)?;
    support_from_split(rif, &split, grid_n)
}

fn support_from_split(rif: &RationalInnerFunction, split: &LevelSplit, grid_n: usize) -> Result<Vec<CurveBranch>> {
    if grid_n == 0 {
        return Err(Error::InvalidArgument("grid_n must be positive".into()));
    }
    let ctx = WeightContext {
        p: rif.p_float(),
        q2: split.q.derivative(Axis::Second),
        p_scale: rif.p_float().max_abs(),
        q_scale: split.q.max_abs(),
    };
    let slices: Vec<Vec<CurveSample>> = (0..grid_n)
        .into_par_iter()
        .map(|k| {
            let theta = TAU * k as f64 / grid_n as f64;
            let z1 = Complex64::from_polar(1.0, theta);
            let mut out = Vec::new();
            for r in curve_roots(&split.reduced, theta)? {
                let (weight, averaged) = match ctx.eval((z1, r))? {
                    WeightEval::Value(w) => (w, false),
                    WeightEval::Singular => {
                        let mut acc = 0.0;
                        for t in [theta - SINGULAR_OFFSET, theta + SINGULAR_OFFSET] {
                            let near = nearest(&curve_roots(&split.reduced, t)?, r)
                                .ok_or(Error::BranchDegeneracy { point: (z1, r) })?;
                            match ctx.eval((Complex64::from_polar(1.0, t), near))? {
                                WeightEval::Value(w) => acc += 0.5 * w,
                                WeightEval::Singular => return Err(Error::BranchDegeneracy { point: (z1, r) }),
                            }
                        }
                        (acc, true)
                    }
                };
                out.push(CurveSample { theta, zeta2: r, weight, averaged });
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    Ok(thread_branches(slices))
}

/// Greedy nearest-neighbour continuation between consecutive slices.
fn thread_branches(slices: Vec<Vec<CurveSample>>) -> Vec<CurveBranch> {
    let mut branches: Vec<CurveBranch> = Vec::new();
    let mut active: Vec<usize> = Vec::new();
    for slice in slices {
        let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
        for (ai, &b) in active.iter().enumerate() {
            let last = branches[b].samples.last().expect("active branch has samples").zeta2;
            for (si, s) in slice.iter().enumerate() {
                pairs.push(((s.zeta2 - last).norm(), ai, si));
            }
        }
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut used_branch = vec![false; active.len()];
        let mut used_sample = vec![false; slice.len()];
        let mut next_active = Vec::new();
        for (_, ai, si) in pairs {
            if used_branch[ai] || used_sample[si] {
                continue;
            }
            used_branch[ai] = true;
            used_sample[si] = true;
            branches[active[ai]].samples.push(slice[si]);
            next_active.push(active[ai]);
        }
        for (si, s) in slice.iter().enumerate() {
            if !used_sample[si] {
                branches.push(CurveBranch { samples: vec![*s] });
                next_active.push(branches.len() - 1);
            }
        }
        next_active.sort_unstable();
        active = next_active;
    }
    branches
}

/// `P(z; ζ) = (1 − |z|²)/|ζ − z|²`.
pub fn poisson_kernel(z: Complex64, zeta: Complex64) -> f64 {
    (1.0 - z.norm_sqr()) / (zeta - z).norm_sqr()
}

fn cauchy_factor(z: Complex64, w: Complex64) -> Complex64 {
    1.0 / (1.0 - z * w.conj())
}

/// `Re((α + φ(z))/(α − φ(z)))`.
pub fn clark_poisson_target(rif: &RationalInnerFunction, alpha: &Alpha, z: Point2) -> Result<f64> {
    Ok(clark_quotient(alpha.value(), rif.eval(z)?))
}

#[derive(Clone, Debug)]
pub struct ClarkMeasureModel {
    rif: RationalInnerFunction,
    alpha: Alpha,
    grid_n: usize,
    pub branches: Vec<CurveBranch>,
    pub lines: Vec<DegenerateLine>,
}

impl ClarkMeasureModel {
    pub fn build(rif: &RationalInnerFunction, alpha: Alpha, grid_n: usize) -> Result<Self> {
        let split = level_split(rif, &alpha)?;
        let lines = lines_from_split(rif, &alpha, &split)?;
        let branches = support_from_split(rif, &split, grid_n)?;
        Ok(ClarkMeasureModel { rif: rif.clone(), alpha, grid_n, branches, lines })
    }

    pub fn rif(&self) -> &RationalInnerFunction {
        &self.rif
    }

    pub fn alpha(&self) -> &Alpha {
        &self.alpha
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    pub fn samples(&self) -> impl Iterator<Item = &CurveSample> {
        self.branches.iter().flat_map(|b| b.samples.iter())
    }

    pub fn curve_mass(&self) -> f64 {
        self.samples().fold(0.0, |acc, s| acc + s.weight) / self.grid_n as f64
    }

    pub fn line_mass_total(&self) -> f64 {
        self.lines.iter().fold(0.0, |acc, l| acc + l.mass)
    }

    pub fn total_mass(&self) -> f64 {
        self.curve_mass() + self.line_mass_total()
    }

    /// Mass forced by the Poisson identity at the origin.
    pub fn expected_mass(&self) -> f64 {
        clark_quotient(self.alpha.value(), self.rif.value_at_origin())
    }

    /// Poisson integral of the model at an interior point.
    pub fn poisson(&self, z: Point2) -> f64 {
        let curve: f64 = self
            .samples()
            .map(|s| s.weight * poisson_kernel(z.0, Complex64::from_polar(1.0, s.theta)) * poisson_kernel(z.1, s.zeta2))
            .sum::<f64>()
            / self.grid_n as f64;
        let lines: f64 = self
            .lines
            .iter()
            .map(|l| match l.axis {
                Axis::First => l.mass * poisson_kernel(z.0, l.anchor),
                Axis::Second => l.mass * poisson_kernel(z.1, l.anchor),
            })
            .sum();
        curve + lines
    }

    /// `∫ C(z, ζ) g(ζ) dσ(ζ)`; line parts use a `grid_n`-node trapezoid in
    /// the free variable.
    pub fn cauchy_transform<G: Fn(Point2) -> Complex64>(&self, g: G, z: Point2) -> Complex64 {
        let n = self.grid_n as f64;
        let mut acc = Complex64::new(0.0, 0.0);
        for s in self.samples() {
            let zeta = (Complex64::from_polar(1.0, s.theta), s.zeta2);
            acc += s.weight * g(zeta) * cauchy_factor(z.0, zeta.0) * cauchy_factor(z.1, zeta.1);
        }
        acc /= n;
        for l in &self.lines {
            let mut line = Complex64::new(0.0, 0.0);
            for k in 0..self.grid_n {
                let t = Complex64::from_polar(1.0, TAU * k as f64 / n);
                let zeta = match l.axis {
                    Axis::First => (l.anchor, t),
                    Axis::Second => (t, l.anchor),
                };
                line += g(zeta) * cauchy_factor(z.0, zeta.0) * cauchy_factor(z.1, zeta.1);
            }
            acc += l.mass * line / n;
        }
        acc
    }

    /// `(1 − ᾱ φ(z)) · (g σ)₊(z)`.
    pub fn v_operator<G: Fn(Point2) -> Complex64>(&self, g: G, z: Point2) -> Result<Complex64> {
        let b = self.rif.eval(z)?;
        Ok((1.0 - self.alpha.value().conj() * b) * self.cauchy_transform(g, z))
    }

    pub fn header_json(&self) -> serde_json::Value {
        let a = self.alpha.value();
        json!({
            "alpha": [a.re, a.im],
            "grid_n": self.grid_n,
            "curve_mass": self.curve_mass(),
            "line_mass": self.line_mass_total(),
            "total_mass": self.total_mass(),
            "expected_mass": self.expected_mass(),
            "branches": self.branches.len(),
            "lines": self.lines.iter().map(|l| json!({
                "axis": l.axis,
                "anchor": [l.anchor.re, l.anchor.im],
                "mass": l.mass,
            })).collect::<Vec<_>>(),
        })
    }

    /// `# {json header}` line, column header, then one row per sample.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "# {}", self.header_json())?;
        writeln!(w, "theta,re_zeta2,im_zeta2,weight,branch_id")?;
        for (id, b) in self.branches.iter().enumerate() {
            for s in &b.samples {
                writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{}", s.theta, s.zeta2.re, s.zeta2.im, s.weight, id)?;
            }
        }
        Ok(())
    }
}

/// Largest `|P[σ](z) − Re((α+φ(z))/(α−φ(z)))|` over the test points.
pub fn verify_clark_identity(
    rif: &RationalInnerFunction,
    alpha: &Alpha,
    model: &ClarkMeasureModel,
    points: &[Point2],
) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &z in points {
        let target = clark_poisson_target(rif, alpha, z)?;
        worst = worst.max((model.poisson(z) - target).abs());
    }
    Ok(worst)
}

/// `dσ¹/dσ²` at common curve samples of two models on the same level curve.
/// Models must share `grid_n`; samples are matched by `θ` and `ζ2`.
pub fn radon_nikodym_on_curve(num: &ClarkMeasureModel, den: &ClarkMeasureModel) -> Result<Vec<(CurveSample, f64)>> {
    if num.grid_n != den.grid_n {
        return Err(Error::InvalidArgument("models use different grids".into()));
    }
    let mut by_theta: Vec<Vec<&CurveSample>> = vec![Vec::new(); den.grid_n];
    let step = TAU / den.grid_n as f64;
    for s in den.samples() {
        by_theta[(s.theta / step).round() as usize % den.grid_n].push(s);
    }
    let mut out = Vec::new();
    for s in num.samples() {
        let k = (s.theta / step).round() as usize % num.grid_n;
        let m = by_theta[k]
            .iter()
            .find(|d| (d.zeta2 - s.zeta2).norm() <= 1e-8)
            .ok_or_else(|| Error::InvalidArgument("curve supports differ".into()))?;
        if m.weight == 0.0 {
            return Err(Error::DivergentOrSingular("reference density vanishes on the curve".into()));
        }
        out.push((*s, s.weight / m.weight));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;

    #[test]
    fn richardson_recovers_polynomial_limit() {
        let l = richardson_limit(|r| (3.0 + r) / (1.0 + r));
        assert!((l - 2.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_validation() {
        assert!(Alpha::exact(GaussRat::from_ints(1, 1)).is_err());
        assert!(Alpha::exact(GaussRat::i()).is_ok());
        assert!(Alpha::from_complex(Complex64::new(0.5, 0.0)).is_err());
    }

    #[test]
    fn anti_diagonal_support() {
        let m = ClarkMeasureModel::build(&catalog::z1z2(), Alpha::one(), 64).unwrap();
        assert_eq!(m.branches.len(), 1);
        assert!(m.lines.is_empty());
        for s in m.samples() {
            assert!((s.zeta2 - Complex64::from_polar(1.0, -s.theta)).norm() < 1e-14);
            assert!((s.weight - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn vertical_line_for_phi2() {
        let lines = degenerate_components(&catalog::phi2(), &Alpha::minus_one()).unwrap();
        assert_eq!(lines.len(), 1);
        assert_eq!(lines[0].axis, Axis::First);
        assert!((lines[0].anchor - 1.0).norm() < 1e-12);
        assert!((lines[0].mass - 2.0).abs() < 1e-6);
        assert!(degenerate_components(&catalog::z1z2(), &Alpha::one()).unwrap().is_empty());
    }

    #[test]
    fn singular_sample_is_averaged() {
        let m = ClarkMeasureModel::build(&catalog::phi2(), Alpha::minus_one(), 256).unwrap();
        let s = m.samples().find(|s| s.theta == 0.0).unwrap();
        assert!(s.averaged);
        assert!((s.weight - 1.0).abs() < 1e-6);
        assert!((m.total_mass() - 3.0).abs() < 1e-6);
    }

    #[test]
    fn csv_layout() {
        let m = ClarkMeasureModel::build(&catalog::z1z2(), Alpha::one(), 8).unwrap();
        let mut buf = Vec::new();
        m.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "theta,re_zeta2,im_zeta2,weight,branch_id");
        assert_eq!(lines.len(), 10);
    }

    #[test]
    fn vanishing_derivative_is_a_degeneracy() {
        let p = crate::polyalg::parse_poly("3 - z1").unwrap().to_float();
        let q2 = crate::polyalg::parse_poly("z1 - 1").unwrap().to_float();
        let ctx = WeightContext { p: &p, q2, p_scale: 3.0, q_scale: 1.0 };
        let one = Complex64::new(1.0, 0.0);
        assert_eq!(ctx.eval((one, one)).unwrap_err().kind(), "branch-degeneracy");
        assert!(matches!(ctx.eval((-one, one)), Ok(WeightEval::Value(w)) if (w - 2.0).abs() < 1e-15));
    }
}
