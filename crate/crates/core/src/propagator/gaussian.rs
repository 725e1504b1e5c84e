use std::f64::consts::PI;

use num_complex::Complex64;

use super::{Backend, DensityRepr, EvolvedDensity};
use crate::error::{ensure_positive, Result};

/// `c_ε(t) = ε / √(t² + ε⁴)`.
pub fn gaussian_scale(eps: f64, t: f64) -> f64 {
    eps / t.hypot(eps * eps)
}

/// Exact `|u_ε(x, t)|² = c ρ(c x)` for the Gaussian mollifier, centred at 0.
/// Use [`EvolvedDensity::translated`] for `δ_a`.
pub fn evolve_gaussian_exact(eps: f64, t: f64) -> Result<EvolvedDensity> {
    ensure_positive("epsilon", eps)?;
    Ok(EvolvedDensity {
        repr: DensityRepr::Gaussian {
            scale: gaussian_scale(eps, t),
        },
        eps,
        t,
        a: 0.0,
        backend: Backend::GaussianExact,
        captured_mass: 1.0,
        tail_mass: 0.0,
        tail_estimate: 0.0,
    })
}

/// Exact wave `u_ε(x, t)` for the Gaussian mollifier with `μ = δ_a`:
/// `√ε (2π)^{-1/4} (ε²+it)^{-1/2} e^{-(x-a)²/(4(ε²+it))}`.
pub fn gaussian_wave(eps: f64, t: f64, a: f64, x: f64) -> Complex64 {
    let w = Complex64::new(eps * eps, t);
    let d = x - a;
    let amp = eps.sqrt() * (2.0 * PI).powf(-0.25);
    amp * (1.0 / w).sqrt() * (-(d * d) / (4.0 * w)).exp()
}
