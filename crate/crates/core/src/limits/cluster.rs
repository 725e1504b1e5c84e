use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_nonzero_time, Error, Result};
use crate::quadrature::{integrate_domain, uniform_points, Domain, Tolerance};
use crate::special::gamma;

/// Parameters of the null sequence `ε_n` along which
/// `⟨μ_{ε_n}^t, e^{i log(1+|x|)}⟩ → 2γe^{iα}` for the Gaussian mollifier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClusterConfig {
    pub alpha: f64,
    pub t: f64,
    pub n_max: u32,
}

impl ClusterConfig {
    pub fn new(alpha: f64, t: f64, n_max: u32) -> Result<Self> {
        if !(0.0..2.0 * PI).contains(&alpha) {
            return Err(Error::Config(format!("α must lie in [0, 2π), got {alpha}")));
        }
        ensure_nonzero_time(t)?;
        Ok(Self { alpha, t, n_max })
    }
}

/// `c_n = e^{−α−2πn}`.
pub fn cluster_target(alpha: f64, n: u32) -> f64 {
    (-alpha - 2.0 * PI * n as f64).exp()
}

/// The smaller root `ε ∈ (0, 1]` of `c²ε⁴ − ε² + c²t² = 0`, i.e. of
/// `c_ε(t) = ε/√(t² + ε⁴) = c`, written in the cancellation-free form
/// `ε² = 2c²t² / (1 + √(1 − 4c⁴t²))`.
pub fn cluster_epsilon(alpha: f64, t: f64, n: u32) -> Result<f64> {
    ensure_nonzero_time(t)?;
    let c = cluster_target(alpha, n);
    let disc = 1.0 - 4.0 * c.powi(4) * t * t;
    if disc < 0.0 {
        return Err(Error::NoRoot(format!(
            "c = e^(-α-2πn) = {c:.6e} (α = {alpha}, n = {n}) exceeds the maximum 1/√(2|t|) of c_ε({t})"
        )));
    }
    let eps = (2.0 * c * c * t * t / (1.0 + disc.sqrt())).sqrt();
    if eps > 1.0 {
        return Err(Error::NoRoot(format!("root ε = {eps} for n = {n} lies outside (0, 1]")));
    }
    Ok(eps)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusterTerm {
    pub n: u32,
    pub target: f64,
    pub epsilon: Result<f64>,
}

/// `ε_n` for `n = 0..=n_max`. Terms without an admissible root are kept
/// with their error; if none has a root the whole call fails.
pub fn cluster_sequence(cfg: &ClusterConfig) -> Result<Vec<ClusterTerm>> {
    let terms: Vec<ClusterTerm> = (0..=cfg.n_max)
        .map(|n| ClusterTerm {
            n,
            target: cluster_target(cfg.alpha, n),
            epsilon: cluster_epsilon(cfg.alpha, cfg.t, n),
        })
        .collect();
    if terms.iter().all(|term| term.epsilon.is_err()) {
        return Err(Error::NoRoot(format!(
            "no n ≤ {} gives an admissible ε for α = {}, t = {}",
            cfg.n_max, cfg.alpha, cfg.t
        )));
    }
    Ok(terms)
}

fn log_substitution_domain() -> Domain {
    // y = e^s; ρ(e^4) ~ e^{-1490}, and ∫_0^{e^{-60}} ρ < 1e-26
    Domain::Finite(uniform_points(-60.0, 4.0, 1.0))
}

/// `⟨μ_ε^t, e^{i log(1+|x|)}⟩` for the Gaussian mollifier with `c = c_ε(t)`,
/// evaluated as `2 e^{−i log c} ∫_0^∞ e^{i log(c + y)} ρ(y) dy` after
/// substituting `y = e^s`. Returns the value and its error estimate.
pub fn log_oscillation_pairing(c: f64) -> Result<(Complex64, f64)> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let e = integrate_domain(
        |s: f64| {
            let y = s.exp();
            Complex64::from_polar(norm * (-0.5 * y * y).exp() * y, (c + y).ln())
        },
        &log_substitution_domain(),
        Tolerance::new(1e-15, 1e-13),
    )?;
    let phase = Complex64::from_polar(2.0, -c.ln());
    Ok((phase * e.value, 2.0 * e.error))
}

/// `γ = ∫_0^∞ e^{i log y} ρ(y) dy` by quadrature, against closed forms.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GammaReport {
    pub quadrature: Complex64,
    pub quad_error: f64,
    /// `2^{(i−1)/2} Γ((1+i)/2) / √(2π)`, the Mellin transform of the
    /// half-normal density at `s = 1 + i`.
    pub closed_form: Complex64,
    pub difference: f64,
    /// `Γ((1+i)/2) / (2√(2π))`, the expression printed with the example.
    /// It differs from the integral by the factor `2^{−(1+i)/2}`.
    pub printed_formula: Complex64,
    pub printed_difference: f64,
}

/// Cross-check tolerance between quadrature and the Gamma-function value.
pub const GAMMA_TOLERANCE: f64 = 1e-8;

/// Evaluates γ by quadrature and by the complex Gamma function.
///
/// Fails with `CrossCheckFailure` if quadrature and the Mellin closed form
/// disagree by more than [`GAMMA_TOLERANCE`]. The printed expression is
/// reported alongside, not enforced.
pub fn gamma_constant() -> Result<GammaReport> {
    let norm = 1.0 / (2.0 * PI).sqrt();
    let e = integrate_domain(
        |s: f64| {
            let y = s.exp();
            Complex64::from_polar(norm * (-0.5 * y * y).exp() * y, s)
        },
        &log_substitution_domain(),
        Tolerance::new(1e-15, 1e-13),
    )?;
    let half = Complex64::new(0.5, 0.5);
    let g = gamma(half);
    let closed_form = Complex64::from(2.0).powc(Complex64::new(-0.5, 0.5)) * g / (2.0 * PI).sqrt();
    let printed_formula = g / (2.0 * (2.0 * PI).sqrt());
    let difference = (e.value - closed_form).norm();
    if difference > GAMMA_TOLERANCE {
        return Err(Error::CrossCheckFailure {
            what: "γ quadrature and Mellin closed form",
            difference,
            tolerance: GAMMA_TOLERANCE,
        });
    }
    Ok(GammaReport {
        quadrature: e.value,
        quad_error: e.error,
        closed_form,
        difference,
        printed_formula,
        printed_difference: (e.value - printed_formula).norm(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ClusterRecord {
    pub n: u32,
    pub eps: f64,
    /// `c_{ε_n}(t)` recomputed from ε_n.
    pub c: f64,
    pub value: Complex64,
    pub quad_error: f64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClusterOutcome {
    pub config: ClusterConfig,
    pub gamma: GammaReport,
    /// `2γe^{iα}`.
    pub predicted: Complex64,
    pub records: Vec<ClusterRecord>,
    /// `(n, reason)` for terms without an admissible ε.
    pub skipped: Vec<(u32, String)>,
    pub deviations_decreasing: bool,
}

/// Evaluates the log-oscillation pairing along `ε_n` and compares it with
/// the cluster point `2γe^{iα}`.
pub fn cluster_experiment(cfg: &ClusterConfig) -> Result<ClusterOutcome> {
    let gamma = gamma_constant()?;
    let predicted = 2.0 * gamma.quadrature * Complex64::from_polar(1.0, cfg.alpha);
    let terms = cluster_sequence(cfg)?;
    let mut skipped = Vec::new();
    let mut admissible = Vec::new();
    for term in terms {
        match term.epsilon {
            Ok(eps) => admissible.push((term.n, eps)),
            Err(e) => skipped.push((term.n, e.to_string())),
        }
    }
    let records = admissible
        .par_iter()
        .map(|&(n, eps)| {
            let c = crate::propagator::gaussian_scale(eps, cfg.t);
            let (value, quad_error) = log_oscillation_pairing(c)?;
            Ok(ClusterRecord {
                n,
                eps,
                c,
                value,
                quad_error,
                deviation: (value - predicted).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let deviations_decreasing = records.windows(2).all(|w| w[1].deviation < w[0].deviation);
    Ok(ClusterOutcome {
        config: *cfg,
        gamma,
        predicted,
        records,
        skipped,
        deviations_decreasing,
    })
}
