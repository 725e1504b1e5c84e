use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::counterexample::ft_regularized_density;
use super::sweep::check_decreasing;
use crate::error::{ensure_nonzero_time, Error, Result};
use crate::mollifier::MollifierSpec;
use crate::pairing::ft_measure;

/// Initial measure of a Fourier scan.
#[derive(Clone, Debug)]
pub enum InitialMeasure {
    Dirac {
        a: f64,
    },
    /// `μ = h·dx` for a compactly supported probability density `h`.
    Density(MollifierSpec),
}

impl InitialMeasure {
    pub fn label(&self) -> String {
        match self {
            InitialMeasure::Dirac { a } => format!("dirac(a={a})"),
            InitialMeasure::Density(h) => format!("density({})", h.label()),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ScanVerdict {
    HaarConvergent,
    NotHaarConvergent,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ScanRow {
    pub eps: f64,
    pub xi: f64,
    pub value: Complex64,
    pub modulus: f64,
    /// `(√ρ ∗ R√ρ)(2tξ/ε)`, the a-independent bound for Dirac data.
    pub bound: Option<f64>,
    /// The transform is below the smallest normal double.
    pub underflow: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanTable {
    pub t: f64,
    pub measure: String,
    pub threshold: f64,
    /// Sorted by ε (descending, the sweep order) then ξ.
    pub rows: Vec<ScanRow>,
    /// `(ξ, |ℱμ_ε^t(ξ)|)` at the smallest ε.
    pub final_column: Vec<(f64, f64)>,
    pub verdict: ScanVerdict,
}

pub const SCAN_THRESHOLD: f64 = 1e-3;

/// Tabulates `|ℱμ_ε^t(ξ)|` over a frequency grid and a decreasing ε list.
/// The sequence is judged Haar convergent when every nonzero frequency has
/// fallen below `threshold` at the smallest ε.
pub fn blum_eisenberg_scan(
    spec: &MollifierSpec,
    t: f64,
    measure: &InitialMeasure,
    xi_grid: &[f64],
    eps_list: &[f64],
    threshold: f64,
) -> Result<ScanTable> {
    ensure_nonzero_time(t)?;
    check_decreasing(eps_list)?;
    if xi_grid.is_empty() || xi_grid.iter().any(|x| *x == 0.0 || !x.is_finite()) {
        return Err(Error::Config(format!(
            "frequency grid must be nonempty and exclude 0: {xi_grid:?}"
        )));
    }
    let mut xis = xi_grid.to_vec();
    xis.sort_by(f64::total_cmp);
    let cells: Vec<(usize, f64, f64)> = eps_list
        .iter()
        .enumerate()
        .flat_map(|(i, &e)| xis.iter().map(move |&x| (i, e, x)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(_, eps, xi)| {
            let (value, bound) = match measure {
                InitialMeasure::Dirac { a } => (
                    ft_measure(spec, eps, t, *a, xi)?,
                    Some(spec.autocorrelation(2.0 * t * xi / eps)?),
                ),
                InitialMeasure::Density(h) => (ft_regularized_density(h, spec, eps, t, xi)?, None),
            };
            let modulus = value.norm();
            Ok(ScanRow {
                eps,
                xi,
                value,
                modulus,
                bound,
                underflow: modulus < f64::MIN_POSITIVE,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let last = eps_list[eps_list.len() - 1];
    let final_column: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.eps == last)
        .map(|r| (r.xi, r.modulus))
        .collect();
    let verdict = if final_column.iter().all(|(_, m)| *m < threshold) {
        ScanVerdict::HaarConvergent
    } else {
        ScanVerdict::NotHaarConvergent
    };
    Ok(ScanTable {
        t,
        measure: measure.label(),
        threshold,
        rows,
        final_column,
        verdict,
    })
}
