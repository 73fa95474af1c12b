//! Named example functions used by tests, the CLI and documentation.

use crate::polyalg::{parse_poly, ExactPoly};
use crate::rif::{RationalInnerFunction, DEFAULT_GRID_N};

/// `P1 = 4 - z2 - 3 z1 - z1 z2 + z1^2`, bidegree (2, 1).
pub const P1: &str = "4 - z2 - 3*z1 - z1*z2 + z1^2";
/// `P2 = 2 - z1 z2 - z1^2 z2`, bidegree (2, 1).
pub const P2: &str = "2 - z1*z2 - z1^2*z2";

fn build(src: &str, d: (u32, u32)) -> RationalInnerFunction {
    RationalInnerFunction::build(parse_poly(src).expect("fixture parses"), d, DEFAULT_GRID_N)
        .expect("fixture is stable")
}

/// Denominator `d - z1 - z2` of the anti-diagonal family.
pub fn fav_poly(d: i64) -> ExactPoly {
    parse_poly(&format!("{} - z1 - z2", d)).expect("fixture parses")
}

/// `(d z1 z2 - z1 - z2)/(d - z1 - z2)`, defined for `d >= 2`.
pub fn fav_rif(d: i64) -> RationalInnerFunction {
    RationalInnerFunction::build(fav_poly(d), (1, 1), DEFAULT_GRID_N).expect("fixture is stable")
}

/// `φ = z1 z2`, as `p = 1` with bidegree (1, 1).
pub fn z1z2() -> RationalInnerFunction {
    build("1", (1, 1))
}

pub fn phi1() -> RationalInnerFunction {
    build(P1, (2, 1))
}

pub fn phi2() -> RationalInnerFunction {
    build(P2, (2, 1))
}
