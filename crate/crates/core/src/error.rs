use num_complex::Complex64;
use thiserror::Error;

use crate::polyalg::ParseError;

/// A point of the bidisc or the bitorus.
pub type Point2 = (Complex64, Complex64);

#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("polynomial is not stable: root of modulus {modulus:.6e} at ({}, {})", fmt_c(&.witness.0), fmt_c(&.witness.1))]
    RejectedUnstable { witness: Point2, modulus: f64 },

    #[error("denominator vanishes at ({}, {})", fmt_c(&.point.0), fmt_c(&.point.1))]
    SingularPoint { point: Point2 },

    #[error("level curve is tangent to a vertical line at ({}, {})", fmt_c(&.point.0), fmt_c(&.point.1))]
    BranchDegeneracy { point: Point2 },

    #[error("not a rational inner function: {0}")]
    InvalidRif(String),

    #[error("divergent or singular integral: {0}")]
    DivergentOrSingular(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub fn fmt_c(z: &Complex64) -> String {
    // adding 0.0 turns -0.0 into 0.0
    let (re, im) = (z.re + 0.0, z.im + 0.0);
    if im.is_sign_negative() {
        format!("{re}{im}i")
    } else {
        format!("{re}+{im}i")
    }
}

impl Error {
    /// Short stable name used in JSON output and CLI diagnostics.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::RejectedUnstable { .. } => "rejected-unstable",
            Error::SingularPoint { .. } => "singular-point",
            Error::BranchDegeneracy { .. } => "branch-degeneracy",
            Error::InvalidRif(_) => "invalid-rif",
            Error::DivergentOrSingular(_) => "divergent-or-singular",
            Error::Parse(_) => "parse-error",
        }
    }
}
