//! Numerics for the Strichartz functional on the torus.
//!
//! A function on `𝕋 = ℝ/2πℤ` is held as a finitely supported sequence of
//! Fourier coefficients, `u(x) = Σ û(n) e^{inx}`, and `T_t` is the
//! Schrödinger multiplier `e^{-in²t}`. The crate evaluates
//! `W_B(u) = ∫₀^B ∫_𝕋 |T_t u|⁴ dx dt`, maximizes it on the unit `L²` sphere,
//! locates the parameter thresholds where the criterion `A_B` changes sign
//! on small test families, and integrates the periodic dispersion-managed
//! NLS flow whose ground states are those maximizers.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ascent;
pub mod dmnls;
pub mod error;
pub mod family;
pub mod functional;
pub mod gradient;
pub mod quadrature;
pub mod spectral;

pub use ascent::{maximize_w, AscentConfig, OptResult};
pub use dmnls::{
    evolve_dmnls, evolve_linear_l, grad_h, grad_h_spectral, ground_state_from_maximizer, hamiltonian_h,
    hamiltonian_h_quadrature, mass_p, omega_residual, orbit_distance, rk4_step, stability_experiment, OmegaReport,
    PeriodicField, StabilityReport, Trajectory,
};
pub use error::{Error, Result};
pub use family::{
    a_closed_w1, a_closed_w2, family_vector, maximize_a_family, solve_b0, threshold_b, FamilyPoint, SweepRow,
    ThresholdScan,
};
pub use functional::{
    a_functional, a_functional_real, d_functional, decomposition, g_functional, kernel_b, quartic_a, strichartz_w,
    strichartz_w_oracle, DecompositionReport,
};
pub use gradient::{grad_w_quadrature, grad_w_spectral, project_sphere};
pub use num_complex::Complex64;
pub use quadrature::{AutoTag, QuadratureSpec, XPoints};
pub use spectral::{dilation_params, CoeffNorm, FourierVector, GridSamples};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/functionals.md")]
    mod functionals {}
    #[doc = include_str!("../../../book/src/maximizers.md")]
    mod maximizers {}
    #[doc = include_str!("../../../book/src/dmnls.md")]
    mod dmnls {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
