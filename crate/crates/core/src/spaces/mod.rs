//! Reproducing kernels, `H²(𝔻²)` membership of rational functions and
//! model-space orthogonality tests.

mod h2;
mod hb;
mod kernels;
mod ortho;
pub mod quad;
mod rational;

pub use h2::{
    h2_classify, h2_classify_sampled, MembershipClass, MembershipVerdict, TraceEntry, CONVERGENCE_TOL,
    DEFAULT_MAX_LEVEL, DEFAULT_SAMPLED_MAX_LEVEL, GROWTH_FACTOR, GROWTH_RUN,
};
pub use hb::{hb_membership_certificate, symbolic_certificate_function, HbCertificate, HbOptions, DEFAULT_ORTHO_TOL};
pub use kernels::{cauchy_kernel, dbr_kernel, slice_integral_affine};
pub use ortho::{
    model_space_orthogonality, rational_orthogonality, validate_fourier_params, Orthogonality, DEFAULT_FOURIER_GRID,
    DEFAULT_K, PUNCTURE_RADIUS,
};
pub use rational::RationalFunction;
