//! Numerical laboratory for square roots of mollified Dirac data evolved by
//! the free Schrödinger group on the line.
//!
//! The initial datum `√(μ ∗ ρ_ε)` is propagated with `U_t = exp(itΔ)` and the
//! resulting probability densities `|u_ε(·, t)|²` are paired against test
//! functions whose ε → 0 behaviour is known: decaying functions, functions
//! with limits at ±∞, trigonometric polynomials, and the logarithmic
//! oscillation `e^{i log(1+|x|)}`.

// `!(x >= 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod limits;
pub mod mollifier;
pub mod pairing;
pub mod propagator;
pub mod quadrature;
pub mod report;
pub mod special;
pub mod testfn;

pub use error::{Error, Result};
pub use mollifier::{ConditionFlags, ConditionReport, CustomDensity, MollifierKind, MollifierSpec, Symmetry};
pub use pairing::{PairingMethod, PairingResult};
pub use propagator::{Backend, BackendChoice, EvolvedDensity, GridOptions, WaveField};
pub use testfn::{Mean, TestFunction, TrigPolynomial};
