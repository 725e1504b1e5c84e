use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::grid::{tail_estimate, Grid1D};
use super::{Backend, WaveField};
use crate::error::{ensure_nonzero_time, ensure_positive, Error, Result};
use crate::mollifier::{MollifierKind, MollifierSpec};
use crate::quadrature::{integrate_domain, uniform_points, Tolerance};

/// `(4πit)^{1/2}` on the principal branch, `arg(it) ∈ (-π/2, π/2]`.
pub fn kernel_root(t: f64) -> Complex64 {
    Complex64::new(0.0, 4.0 * PI * t).sqrt()
}

/// `u_ε(x, t)` at a single point by quadrature of the kernel convolution.
///
/// With `y = a + εz`,
/// `u = √ε (4πit)^{-1/2} e^{i(x-a)²/4t} ∫ e^{-iκz} e^{iβz²} √ρ(z) dz`
/// where `κ = (x-a)ε/2t` and `β = ε²/4t`, so the oscillation of the kernel
/// is moved into a bounded-frequency factor on the support of √ρ.
pub fn kernel_value(spec: &MollifierSpec, eps: f64, t: f64, a: f64, x: f64) -> Result<Complex64> {
    ensure_positive("epsilon", eps)?;
    ensure_nonzero_time(t)?;
    ensure_kernel_feasible(spec)?;
    let d = x - a;
    let kappa = d * eps / (2.0 * t);
    let beta = eps * eps / (4.0 * t);
    let domain = spec.domain();
    let pts = domain.points();
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    let zmax = lo.abs().max(hi.abs());
    let freq = kappa.abs() + 2.0 * beta.abs() * zmax;
    let domain = if freq > 0.0 {
        let width = (4.0 * PI / freq).max((hi - lo) / 4096.0);
        domain.with_points(&uniform_points(lo, hi, width))
    } else {
        domain
    };
    let e = integrate_domain(
        |z| Complex64::from_polar(spec.sqrt_rho(z), (beta * z - kappa) * z),
        &domain,
        Tolerance::new(1e-14, 1e-12).with_max_intervals(100_000),
    )?;
    let phase = Complex64::from_polar(1.0, d * d / (4.0 * t));
    Ok(eps.sqrt() / kernel_root(t) * phase * e.value)
}

fn ensure_kernel_feasible(spec: &MollifierSpec) -> Result<()> {
    spec.ensure_condition_m()?;
    match spec.kind {
        MollifierKind::RationalDecay { .. } => Err(Error::Domain(format!(
            "kernel backend needs √ρ with compact support or Gaussian decay; {} decays algebraically",
            spec.label()
        ))),
        _ => Ok(()),
    }
}

/// `u_ε(·, t)` at every node of `grid` by direct quadrature. Nodes are
/// independent and evaluated in parallel.
pub fn evolve_kernel(spec: &MollifierSpec, eps: f64, t: f64, a: f64, grid: &Grid1D) -> Result<WaveField> {
    ensure_positive("epsilon", eps)?;
    ensure_nonzero_time(t)?;
    ensure_kernel_feasible(spec)?;
    let samples = (0..grid.points())
        .into_par_iter()
        .map(|k| kernel_value(spec, eps, t, a, grid.node(k)))
        .collect::<Result<Vec<_>>>()?;
    Ok(WaveField {
        grid: *grid,
        samples,
        t,
        eps,
        a,
        backend: Backend::Kernel,
        tail_estimate: tail_estimate(spec, eps, t, a, grid.half_extent())?,
    })
}
