//! Bivariate polynomial arithmetic over exact Gaussian rationals or complex
//! doubles, reflection, slicing, and univariate root finding.

mod coeff;
mod parse;
mod poly1;
mod poly2;
mod roots;

pub use coeff::{Coeff, GaussRat};
pub use parse::{parse_coeff, parse_poly, ParseError, TermFormat};
pub use poly1::{Poly1, Poly1F};
pub use poly2::{Axis, Exp, ExactPoly, FloatPoly, Poly2};
pub use roots::poly1_roots;
