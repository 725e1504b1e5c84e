//! Pairings `⟨μ_ε^t, f⟩ = ∫ |u_ε(x, t)|² f(x) dx` and the Fourier transform
//! `ℱμ_ε^t(ξ) = ∫ e^{-ixξ} dμ_ε^t(x)`.
//!
//! For `μ = δ_a` the transform reduces to one integral in the scaled
//! variable of the mollifier,
//!
//! `ℱμ_ε^t(ξ) = e^{-itξ²} e^{-iξa} ∫ e^{-iεξz} √ρ(z) √ρ(z + 2tξ/ε) dz`,
//!
//! which needs no grid at all. It is cross-checked against grid quadrature
//! of the evolved density.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_nonzero_time, ensure_positive, Error, Result};
use crate::mollifier::{MollifierKind, MollifierSpec};
use crate::propagator::{evolve_density, BackendChoice, DensityRepr, EvolvedDensity, GridOptions};
use crate::quadrature::{integrate_domain, integrate_upper, uniform_points, Domain, Estimate, Tolerance};
use crate::testfn::{TestFunction, TrigPolynomial};

/// Half-width of the standard normal integration range in the closed-form
/// pairing; `ρ(40) < 1e-340`.
const GAUSSIAN_EXTENT: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PairingMethod {
    Quadrature,
    CharacterExact,
    GaussianClosedForm,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairingResult {
    pub value: Complex64,
    pub quad_error: f64,
    /// `sup|f| · (mass the grid may miscount)`.
    pub tail_error: f64,
    pub method: PairingMethod,
}

impl PairingResult {
    pub fn error_budget(&self) -> f64 {
        self.quad_error + self.tail_error
    }
}

/// `∫ density · f` by the trapezoid rule on the density grid, or by
/// adaptive quadrature for the Gaussian closed form.
///
/// On grids the quadrature error is estimated as `|T_Δx − T_2Δx|`.
pub fn pair_quadrature(density: &EvolvedDensity, f: &TestFunction) -> Result<PairingResult> {
    match &density.repr {
        DensityRepr::Gaussian { scale } => pair_gaussian(*scale, density.a, f),
        DensityRepr::Grid { grid, values } => {
            let dx = grid.spacing();
            let mut fine = Complex64::new(0.0, 0.0);
            let mut coarse = Complex64::new(0.0, 0.0);
            for (k, (x, d)) in grid.nodes().zip(values).enumerate() {
                if *d == 0.0 {
                    continue;
                }
                let term = *d * f.eval(x);
                fine += term;
                if k % 2 == 0 {
                    coarse += term;
                }
            }
            let fine = fine * dx;
            let coarse = coarse * (2.0 * dx);
            Ok(PairingResult {
                value: fine,
                quad_error: (fine - coarse).norm(),
                tail_error: f.sup_bound() * density.tail_weight(),
                method: PairingMethod::Quadrature,
            })
        }
    }
}

/// `∫ c ρ(c(x − a)) f(x) dx = ∫ ρ(y) f(a + y/c) dy`.
fn pair_gaussian(scale: f64, a: f64, f: &TestFunction) -> Result<PairingResult> {
    let len = f.variation_length() * scale;
    let width = if len.is_finite() {
        len.clamp(2.0 * GAUSSIAN_EXTENT / 20_000.0, 2.0)
    } else {
        2.0
    };
    let mut pts = uniform_points(-GAUSSIAN_EXTENT, GAUSSIAN_EXTENT, width);
    // features of f near the origin, e.g. the kink of |x| or the step of tanh
    let y0 = -a * scale;
    if y0.abs() < GAUSSIAN_EXTENT {
        pts.push(y0);
    }
    let d = Domain::Finite(crate::quadrature::sorted_unique(pts));
    let norm = 1.0 / (2.0 * PI).sqrt();
    let e = integrate_domain(
        |y| norm * (-0.5 * y * y).exp() * f.eval(a + y / scale),
        &d,
        Tolerance::new(1e-15, 1e-13).with_max_intervals(400_000),
    )?;
    Ok(PairingResult {
        value: e.value,
        quad_error: e.error,
        tail_error: 0.0,
        method: PairingMethod::GaussianClosedForm,
    })
}

/// The reduced integral `∫ e^{-iεξz} √ρ(z) √ρ(z + b) dz`, `b = 2tξ/ε`.
fn character_integral(spec: &MollifierSpec, eps: f64, t: f64, xi: f64) -> Result<Estimate<Complex64>> {
    ensure_positive("epsilon", eps)?;
    spec.ensure_condition_m()?;
    let b = 2.0 * t * xi / eps;
    let d = spec.domain();
    let Some(region) = d.intersect(&d.shifted(-b)) else {
        return Ok(Estimate::zero());
    };
    let k = eps * xi;
    let region = match (&region, k.abs() > 0.0) {
        (Domain::Finite(p), true) => {
            let (lo, hi) = (p[0], p[p.len() - 1]);
            region.with_points(&uniform_points(lo, hi, (4.0 * PI / k.abs()).max((hi - lo) / 20_000.0)))
        }
        _ => region,
    };
    integrate_domain(
        |z| Complex64::from_polar(spec.sqrt_rho(z) * spec.sqrt_rho(z + b), -k * z),
        &region,
        Tolerance::new(1e-300, 1e-13).with_max_intervals(200_000),
    )
}

/// `ℱμ_ε^t(ξ)` for `μ = δ_a` via the exact reduction. Satisfies
/// `|ℱμ_ε^t(ξ)| ≤ (√ρ ∗ R√ρ)(2tξ/ε)`.
pub fn ft_measure(spec: &MollifierSpec, eps: f64, t: f64, a: f64, xi: f64) -> Result<Complex64> {
    Ok(ft_measure_estimate(spec, eps, t, a, xi)?.0)
}

/// [`ft_measure`] with its quadrature error estimate.
pub fn ft_measure_estimate(spec: &MollifierSpec, eps: f64, t: f64, a: f64, xi: f64) -> Result<(Complex64, f64)> {
    let e = character_integral(spec, eps, t, xi)?;
    let phase = Complex64::from_polar(1.0, -t * xi * xi - xi * a);
    Ok((phase * e.value, e.error))
}

/// `ℱμ_ε^t(ξ)` in several dimensions for a tensor-product mollifier
/// `ρ(x) = Π ρ(x_j)` and `μ = δ_a`: the product of the 1-D transforms.
pub fn ft_measure_tensor(spec: &MollifierSpec, eps: f64, t: f64, a: &[f64], xi: &[f64]) -> Result<Complex64> {
    if a.len() != xi.len() || a.is_empty() {
        return Err(Error::Config(format!(
            "shift has dimension {} but frequency has dimension {}",
            a.len(),
            xi.len()
        )));
    }
    a.iter().zip(xi).try_fold(Complex64::new(1.0, 0.0), |acc, (a, xi)| {
        Ok(acc * ft_measure(spec, eps, t, *a, *xi)?)
    })
}

/// `⟨μ_ε^t, e^{ixξ}⟩ = ℱμ_ε^t(−ξ)`.
pub fn pair_character_exact(spec: &MollifierSpec, eps: f64, t: f64, a: f64, xi: f64) -> Result<Complex64> {
    ft_measure(spec, eps, t, a, -xi)
}

/// `Σ a_j ⟨μ_ε^t, e^{ixξ_j}⟩` through the exact reduction.
pub fn pair_trigpoly(spec: &MollifierSpec, eps: f64, t: f64, a: f64, f: &TrigPolynomial) -> Result<PairingResult> {
    let mut value = Complex64::new(0.0, 0.0);
    let mut quad_error = 0.0;
    for (xi, coef) in f.terms() {
        let (v, err) = ft_measure_estimate(spec, eps, t, a, -xi)?;
        value += coef * v;
        quad_error += coef.norm() * err;
    }
    Ok(PairingResult {
        value,
        quad_error,
        tail_error: 0.0,
        method: PairingMethod::CharacterExact,
    })
}

/// Picks the most accurate route: the exact reduction for trig
/// polynomials, the closed form for the Gaussian mollifier, grid
/// quadrature of an evolved density otherwise.
pub fn pair(
    spec: &MollifierSpec,
    eps: f64,
    t: f64,
    a: f64,
    f: &TestFunction,
    opts: &GridOptions,
) -> Result<PairingResult> {
    if let TestFunction::TrigPolynomial(p) = f {
        return pair_trigpoly(spec, eps, t, a, p);
    }
    let density = evolve_density(spec, eps, t, a, BackendChoice::Auto, opts)?;
    pair_quadrature(&density, f)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ParsevalReport {
    pub t: f64,
    /// `∫_0^∞ |h(r)|² dr` with `h(r) = 2|t| ℱ(√ρ(2t ·))(r) = ℱ√ρ(r/2t)`.
    pub lhs: f64,
    /// `2π|t|`.
    pub rhs: f64,
    pub relative_deviation: f64,
    pub quad_error: f64,
}

/// Evaluates both sides of `∫_0^∞ |h(r)|² dr = 2π|t|`.
pub fn parseval_check(spec: &MollifierSpec, t: f64) -> Result<ParsevalReport> {
    ensure_nonzero_time(t)?;
    spec.ensure_condition_m()?;
    let s = 2.0 * t;
    let h2 = |r: f64| spec.fourier_sqrt(r / s).map(|v| v.norm_sqr()).unwrap_or(f64::NAN);
    // Compact support makes ℱ√ρ oscillate with period ~π and decay
    // algebraically; integrate a long finite stretch with breakpoints, then
    // the mapped tail.
    let (reach, width) = match spec.kind {
        MollifierKind::RaisedCosine | MollifierKind::Custom(_) => (2000.0, PI),
        _ => (50.0, 1.0),
    };
    let tol = Tolerance::new(1e-15, 1e-12).with_max_intervals(100_000);
    let finite = integrate_domain(
        h2,
        &Domain::Finite(uniform_points(0.0, reach * s.abs(), width * s.abs())),
        tol,
    )?;
    let tail = integrate_upper(h2, reach * s.abs(), reach * s.abs(), tol)?;
    let lhs = finite.value + tail.value;
    let rhs = 2.0 * PI * t.abs();
    Ok(ParsevalReport {
        t,
        lhs,
        rhs,
        relative_deviation: (lhs - rhs).abs() / rhs,
        quad_error: finite.error + tail.error,
    })
}
