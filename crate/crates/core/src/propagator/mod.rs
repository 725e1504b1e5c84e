//! Free Schrödinger evolution `∂_t u = iΔu` of the datum `√ρ_ε(· - a)`.
//!
//! Two independent backends: the Fourier multiplier `e^{-itξ²}` applied by
//! FFT ([`evolve_spectral`]) and direct quadrature of the kernel
//! `K(x, t) = e^{ix²/4t}/(4πit)^{1/2}` ([`evolve_kernel`]). The Gaussian
//! mollifier also has an exact density ([`evolve_gaussian_exact`]).

mod gaussian;
pub mod grid;
mod kernel;
mod spectral;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

pub use gaussian::{evolve_gaussian_exact, gaussian_scale, gaussian_wave};
pub use grid::{check_spectral, plan_kernel, plan_spectral, tail_estimate, Grid1D, GridOptions, GridPlan};
pub use kernel::{evolve_kernel, kernel_root, kernel_value};
pub use spectral::{evolve_spectral, initial_datum};

use crate::error::{ensure_nonzero_time, ensure_positive, Error, Result};
use crate::mollifier::{MollifierKind, MollifierSpec};
use crate::report::CsvTable;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Backend {
    Initial,
    Spectral,
    Kernel,
    GaussianExact,
}

/// Which backend [`evolve`] should use.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub enum BackendChoice {
    /// Kernel quadrature for compactly supported mollifiers (their √ρ has
    /// kinks, which the FFT resolves only algebraically), FFT otherwise.
    #[default]
    Auto,
    Spectral,
    Kernel,
}

/// Samples of `u_ε(x_k, t)`.
///
/// The kernel backend samples the density scale, not the carrier phase
/// `e^{i(x-a)²/4t}`, so its samples are not a resolved wave.
#[derive(Clone, Debug)]
pub struct WaveField {
    pub grid: Grid1D,
    pub samples: Vec<Complex64>,
    pub t: f64,
    pub eps: f64,
    pub a: f64,
    pub backend: Backend,
    /// A-priori estimate of the mass outside the grid (see [`tail_estimate`]).
    pub tail_estimate: f64,
}

impl WaveField {
    /// `Δx Σ |u_k|²`.
    pub fn discrete_mass(&self) -> f64 {
        self.grid.spacing() * self.samples.iter().map(|u| u.norm_sqr()).sum::<f64>()
    }

    /// Node index and value of `max_k |u_k|`.
    pub fn max_modulus(&self) -> (usize, f64) {
        self.samples
            .iter()
            .enumerate()
            .map(|(k, u)| (k, u.norm()))
            .fold((0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }

    pub fn density(&self) -> EvolvedDensity {
        let values: Vec<f64> = self.samples.iter().map(|u| u.norm_sqr()).collect();
        let captured = self.grid.spacing() * values.iter().sum::<f64>();
        EvolvedDensity {
            repr: DensityRepr::Grid {
                grid: self.grid,
                values,
            },
            eps: self.eps,
            t: self.t,
            a: self.a,
            backend: self.backend,
            captured_mass: captured,
            tail_mass: 1.0 - captured,
            tail_estimate: self.tail_estimate,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DensityRepr {
    Grid {
        grid: Grid1D,
        values: Vec<f64>,
    },
    /// `c ρ(c(x - a))` with the standard normal ρ.
    Gaussian {
        scale: f64,
    },
}

/// The probability density `|u_ε(·, t)|²` of μ_ε^t.
#[derive(Clone, Debug, PartialEq)]
pub struct EvolvedDensity {
    pub repr: DensityRepr,
    pub eps: f64,
    pub t: f64,
    pub a: f64,
    pub backend: Backend,
    /// Trapezoid mass of the grid values (1 for closed forms).
    pub captured_mass: f64,
    /// `1 - captured_mass`.
    pub tail_mass: f64,
    pub tail_estimate: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MassReport {
    pub captured_mass: f64,
    pub tail_mass: f64,
    pub tail_estimate: f64,
    /// `|captured + tail_estimate - 1|`: how far the independently
    /// estimated tail is from closing the unit mass.
    pub defect: f64,
}

impl EvolvedDensity {
    /// `c ρ(c(x - a))` shifted to be centred at `a`. Grid densities are
    /// returned unchanged, since their shift is built into the samples.
    pub fn translated(mut self, a: f64) -> Self {
        if let DensityRepr::Gaussian { .. } = self.repr {
            self.a = a;
        }
        self
    }

    /// Density at `x`: exact for closed forms, linear interpolation on grids
    /// (zero outside `[-L, L)`).
    pub fn eval(&self, x: f64) -> f64 {
        match &self.repr {
            DensityRepr::Gaussian { scale } => {
                let y = scale * (x - self.a);
                scale * (-0.5 * y * y).exp() / (2.0 * PI).sqrt()
            }
            DensityRepr::Grid { grid, values } => {
                let s = (x + grid.half_extent()) / grid.spacing();
                if !(s >= 0.0) || s > (values.len() - 1) as f64 {
                    return 0.0;
                }
                let k = s.floor() as usize;
                if k + 1 >= values.len() {
                    return values[values.len() - 1];
                }
                let w = s - k as f64;
                (1.0 - w) * values[k] + w * values[k + 1]
            }
        }
    }

    pub fn grid(&self) -> Option<&Grid1D> {
        match &self.repr {
            DensityRepr::Grid { grid, .. } => Some(grid),
            DensityRepr::Gaussian { .. } => None,
        }
    }

    pub fn mass_report(&self) -> MassReport {
        MassReport {
            captured_mass: self.captured_mass,
            tail_mass: self.tail_mass,
            tail_estimate: self.tail_estimate,
            defect: (self.captured_mass + self.tail_estimate - 1.0).abs(),
        }
    }

    /// Mass that a pairing over the grid may miscount.
    ///
    /// A periodic (spectral) density has the wrapped-around tail folded
    /// back into the box, which can be miscounted twice.
    pub fn tail_weight(&self) -> f64 {
        match self.backend {
            Backend::GaussianExact => 0.0,
            Backend::Spectral => self.tail_mass.abs() + 2.0 * self.tail_estimate,
            Backend::Initial | Backend::Kernel => self.tail_mass.abs().max(self.tail_estimate),
        }
    }

    /// `x, density` rows. Closed forms are sampled on `sample_grid`;
    /// `stride > 1` keeps every `stride`-th node.
    pub fn to_csv(&self, sample_grid: Option<&Grid1D>, stride: usize) -> Result<CsvTable> {
        let stride = stride.max(1);
        let grid = match (&self.repr, sample_grid) {
            (DensityRepr::Grid { grid, .. }, None) => *grid,
            (_, Some(g)) => *g,
            (DensityRepr::Gaussian { .. }, None) => {
                return Err(Error::Config(
                    "closed-form density needs a sampling grid for export".into(),
                ))
            }
        };
        let mut table = CsvTable::new(&["x", "density"]);
        for k in (0..grid.points()).step_by(stride) {
            let x = grid.node(k);
            let v = match &self.repr {
                DensityRepr::Grid { grid: own, values } if own == &grid => values[k],
                _ => self.eval(x),
            };
            table.push_numbers(&[x, v]);
        }
        Ok(table)
    }
}

/// Evolves `√ρ_ε(· - a)` to time `t` on an automatically planned grid.
/// `t = 0` returns the sampled initial datum.
pub fn evolve(
    spec: &MollifierSpec,
    eps: f64,
    t: f64,
    a: f64,
    choice: BackendChoice,
    opts: &GridOptions,
) -> Result<WaveField> {
    ensure_positive("epsilon", eps)?;
    spec.ensure_condition_m()?;
    if t == 0.0 {
        let plan = plan_spectral(spec, eps, 0.0, a, opts)?;
        return initial_datum(spec, eps, a, &plan.grid);
    }
    let kernel = match choice {
        BackendChoice::Auto => spec.is_compactly_supported(),
        BackendChoice::Kernel => true,
        BackendChoice::Spectral => false,
    };
    if kernel {
        let plan = plan_kernel(spec, eps, t, a, opts)?;
        evolve_kernel(spec, eps, t, a, &plan.grid)
    } else {
        let plan = plan_spectral(spec, eps, t, a, opts)?;
        evolve_spectral(spec, eps, t, a, &plan.grid)
    }
}

/// Like [`evolve`] but returns the density, using the closed form for the
/// Gaussian mollifier.
pub fn evolve_density(
    spec: &MollifierSpec,
    eps: f64,
    t: f64,
    a: f64,
    choice: BackendChoice,
    opts: &GridOptions,
) -> Result<EvolvedDensity> {
    if matches!(spec.kind, MollifierKind::Gaussian) && choice == BackendChoice::Auto {
        return Ok(evolve_gaussian_exact(eps, t)?.translated(a));
    }
    Ok(evolve(spec, eps, t, a, choice, opts)?.density())
}

/// Outcome of the dispersive estimate `|u_ε(x, t)| ≤ ‖√ρ‖₁ ε^{1/2} / (4π|t|)^{1/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub max_modulus: f64,
    pub bound: f64,
    pub ratio: f64,
    pub node: usize,
    pub x: f64,
}

pub fn linf_bound(spec: &MollifierSpec, eps: f64, t: f64) -> Result<f64> {
    ensure_positive("epsilon", eps)?;
    ensure_nonzero_time(t)?;
    Ok(spec.sqrt_rho_l1_norm()? * eps.sqrt() / (4.0 * PI * t.abs()).sqrt())
}

/// Checks the dispersive bound at every node, with relative slack 1e-6.
pub fn linf_bound_check(spec: &MollifierSpec, field: &WaveField) -> Result<BoundReport> {
    let bound = linf_bound(spec, field.eps, field.t)?;
    let (node, max_modulus) = field.max_modulus();
    let x = field.grid.node(node);
    if max_modulus > bound * (1.0 + 1e-6) {
        return Err(Error::BoundViolation {
            node,
            x,
            value: max_modulus,
            bound,
        });
    }
    Ok(BoundReport {
        max_modulus,
        bound,
        ratio: max_modulus / bound,
        node,
        x,
    })
}
