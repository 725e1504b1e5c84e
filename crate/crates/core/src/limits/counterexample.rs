use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_nonzero_time, ensure_positive, Error, Result};
use crate::mollifier::MollifierSpec;
use crate::pairing::ft_measure_estimate;
use crate::quadrature::{integrate_domain, uniform_points, Domain, Tolerance};

fn support(spec: &MollifierSpec, role: &str) -> Result<(f64, f64)> {
    spec.ensure_callable()?;
    match spec.domain() {
        Domain::Finite(p) => Ok((p[0], p[p.len() - 1])),
        Domain::Line { .. } => Err(Error::Domain(format!(
            "{role} {} must have compact support",
            spec.label()
        ))),
    }
}

/// `lim_ε ℱμ_ε^t(ξ)` for `μ = h·dx`:
/// `L(ξ) = e^{−itξ²} ∫ e^{−iξy} √h(y) √h(y + 2tξ) dy`.
///
/// This is the Dirac reduction with ε = 1, a = 0 and ρ replaced by h, so it
/// shares that integrator. `L(0) = ∫h = 1`.
pub fn counterexample_limit(h: &MollifierSpec, t: f64, xi: f64) -> Result<Complex64> {
    ensure_nonzero_time(t)?;
    support(h, "density")?;
    Ok(ft_measure_estimate(h, 1.0, t, 0.0, xi)?.0)
}

/// `(h ∗ ρ_ε)(y) = ∫ h(y − εz) ρ(z) dz`.
pub fn smoothed_density(h: &MollifierSpec, rho: &MollifierSpec, eps: f64, y: f64) -> Result<f64> {
    ensure_positive("epsilon", eps)?;
    let (lo, hi) = support(h, "density")?;
    let window = Domain::Finite(vec![(y - hi) / eps, (y - lo) / eps]);
    let Some(region) = rho.domain().intersect(&window) else {
        return Ok(0.0);
    };
    let e = integrate_domain(
        |z| h.rho(y - eps * z) * rho.rho(z),
        &region,
        Tolerance::new(1e-15, 1e-13),
    )?;
    Ok(e.value.max(0.0))
}

/// `ℱμ_ε^t(ξ)` for `μ = h·dx` at finite ε: the initial datum is
/// `g = √(h ∗ ρ_ε)` and `ℱ|u|²(ξ) = e^{−itξ²} ∫ e^{−iξy} g(y) g(y + 2tξ) dy`.
pub fn ft_regularized_density(h: &MollifierSpec, rho: &MollifierSpec, eps: f64, t: f64, xi: f64) -> Result<Complex64> {
    ensure_nonzero_time(t)?;
    ensure_positive("epsilon", eps)?;
    let (hlo, hhi) = support(h, "density")?;
    let (rlo, rhi) = support(rho, "mollifier")?;
    // supp(h ∗ ρ_ε) = supp h + ε supp ρ
    let (lo, hi) = (hlo + eps * rlo, hhi + eps * rhi);
    let b = 2.0 * t * xi;
    let (lo2, hi2) = (lo.max(lo - b), hi.min(hi - b));
    if lo2 >= hi2 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let width = ((hi2 - lo2) / 16.0).min(eps.max(1e-3)).max((hi2 - lo2) / 4096.0);
    let g = |y: f64| smoothed_density(h, rho, eps, y).map(f64::sqrt);
    let failure = std::cell::RefCell::new(None);
    let e = integrate_domain(
        |y| match (g(y), g(y + b)) {
            (Ok(p), Ok(q)) => Complex64::from_polar(p * q, -xi * y),
            (Err(err), _) | (_, Err(err)) => {
                failure.borrow_mut().get_or_insert(err.to_string());
                Complex64::new(0.0, 0.0)
            }
        },
        &Domain::Finite(uniform_points(lo2, hi2, width)),
        Tolerance::new(1e-13, 1e-11),
    )?;
    if let Some(msg) = failure.into_inner() {
        return Err(Error::Domain(msg));
    }
    Ok(Complex64::from_polar(1.0, -t * xi * xi) * e.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RegularizedValue {
    pub eps: f64,
    pub value: Complex64,
    pub deviation: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub t: f64,
    pub xi: f64,
    pub limit: Complex64,
    pub finite: Vec<RegularizedValue>,
}

/// `L(ξ)` together with finite-ε transforms along `eps_list`.
pub fn counterexample_report(
    h: &MollifierSpec,
    rho: &MollifierSpec,
    t: f64,
    xi: f64,
    eps_list: &[f64],
) -> Result<CounterexampleReport> {
    super::sweep::check_decreasing(eps_list)?;
    let limit = counterexample_limit(h, t, xi)?;
    let finite = eps_list
        .par_iter()
        .map(|&eps| {
            let value = ft_regularized_density(h, rho, eps, t, xi)?;
            Ok(RegularizedValue {
                eps,
                value,
                deviation: (value - limit).norm(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CounterexampleReport { t, xi, limit, finite })
}
