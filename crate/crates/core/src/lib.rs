pub mod catalog;
pub mod clark;
pub mod compare;
pub mod error;
pub mod groebner;
pub mod polyalg;
pub mod rif;
pub mod spaces;

pub use error::{Error, Result};
pub use rif::RationalInnerFunction;
