use num_complex::Complex64;

use crate::error::{Error, Point2, Result};
use crate::polyalg::{ExactPoly, FloatPoly};
use crate::rif::{check_stable, StabilityReport, DEFAULT_GRID_N};

/// `q / (f_1 ⋯ f_m)` with a denominator that passes the stability heuristic.
///
/// The denominator is kept as a list of factors so that a factor equal to
/// the `p` of an inner function can be traded for its reflection.
#[derive(Clone, Debug)]
pub struct RationalFunction {
    num: FloatPoly,
    factors: Vec<FloatPoly>,
    den: FloatPoly,
    report: StabilityReport,
}

impl RationalFunction {
    pub fn new(num: FloatPoly, factors: Vec<FloatPoly>) -> Result<Self> {
        if factors.is_empty() || factors.iter().any(|f| f.is_zero()) {
            return Err(Error::InvalidArgument("denominator must be a nonempty product of nonzero factors".into()));
        }
        let den = factors
            .iter()
            .skip(1)
            .fold(factors[0].clone(), |acc, f| &acc * f);
        let report = check_stable(&den, DEFAULT_GRID_N)?;
        Ok(RationalFunction { num, factors, den, report })
    }

    pub fn from_exact(num: &ExactPoly, den: &ExactPoly) -> Result<Self> {
        Self::new(num.to_float(), vec![den.to_float()])
    }

    pub fn num(&self) -> &FloatPoly {
        &self.num
    }

    pub fn den(&self) -> &FloatPoly {
        &self.den
    }

    pub fn factors(&self) -> &[FloatPoly] {
        &self.factors
    }

    pub fn stability_report(&self) -> &StabilityReport {
        &self.report
    }

    /// Value at `z`; infinite or NaN at zeros of the denominator.
    pub fn eval(&self, z: Point2) -> Complex64 {
        self.num.eval_c64(z.0, z.1) / self.den.eval_c64(z.0, z.1)
    }
}
