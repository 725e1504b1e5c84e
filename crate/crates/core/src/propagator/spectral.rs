use num_complex::Complex64;
use rustfft::FftPlanner;

use super::grid::{check_spectral, tail_estimate, Grid1D};
use super::{Backend, WaveField};
use crate::error::{ensure_positive, Result};
use crate::mollifier::MollifierSpec;

/// Samples the initial datum `√ρ_ε(x - a)` on `grid`.
pub fn initial_datum(spec: &MollifierSpec, eps: f64, a: f64, grid: &Grid1D) -> Result<WaveField> {
    ensure_positive("epsilon", eps)?;
    spec.ensure_condition_m()?;
    let samples = grid
        .nodes()
        .map(|x| Complex64::from(spec.sqrt_scaled(eps, x - a)))
        .collect();
    Ok(WaveField {
        grid: *grid,
        samples,
        t: 0.0,
        eps,
        a,
        backend: Backend::Initial,
        tail_estimate: tail_estimate(spec, eps, 0.0, a, grid.half_extent())?,
    })
}

/// `u_ε(·, t)` by FFT: transform the sampled datum, multiply by the exact
/// multiplier `e^{-itξ²}`, transform back.
///
/// The discrete evolution is periodic on `[-L, L)`; the grid plan keeps the
/// mass that would wrap around below the tail estimate.
pub fn evolve_spectral(spec: &MollifierSpec, eps: f64, t: f64, a: f64, grid: &Grid1D) -> Result<WaveField> {
    ensure_positive("epsilon", eps)?;
    check_spectral(grid, eps, t)?;
    let mut field = initial_datum(spec, eps, a, grid)?;
    if t == 0.0 {
        return Ok(field);
    }
    let n = grid.points();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(n);
    let inverse = planner.plan_fft_inverse(n);
    forward.process(&mut field.samples);
    let norm = 1.0 / n as f64;
    for (k, v) in field.samples.iter_mut().enumerate() {
        let xi = grid.frequency(k);
        *v *= Complex64::from_polar(norm, -t * xi * xi);
    }
    inverse.process(&mut field.samples);
    field.t = t;
    field.backend = Backend::Spectral;
    field.tail_estimate = tail_estimate(spec, eps, t, a, grid.half_extent())?;
    Ok(field)
}
