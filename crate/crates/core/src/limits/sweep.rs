use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{ensure_nonzero_time, Error, Result};
use crate::mollifier::MollifierSpec;
use crate::pairing::{pair, PairingMethod};
use crate::propagator::GridOptions;
use crate::testfn::TestFunction;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepRecord {
    pub eps: f64,
    pub value: Complex64,
    pub predicted: Option<Complex64>,
    /// `|value − predicted|` when a prediction exists.
    pub deviation: Option<f64>,
    pub error_budget: f64,
    pub method: PairingMethod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SweepOptions {
    /// Largest accepted deviation at the smallest ε.
    pub threshold: f64,
    /// Deviations at or below this are treated as converged, so that
    /// sequences that reach rounding level early are not penalised for
    /// failing to decrease further.
    pub floor: f64,
    pub grid: GridOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            threshold: 0.02,
            floor: 1e-12,
            grid: GridOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepOutcome {
    pub records: Vec<SweepRecord>,
    pub verdict: Verdict,
}

/// The limit of `⟨μ_ε^t, f⟩` as ε → 0 for `μ = δ_a`, by the class of `f`:
/// `(L₋ + L₊)/2` for functions with limits at ±∞ (0 for decaying ones),
/// the invariant mean for trig polynomials, none otherwise.
pub fn predicted_limit(f: &TestFunction) -> Option<Complex64> {
    match f {
        TestFunction::TrigPolynomial(p) => Some(p.constant_term()),
        TestFunction::LimitsAtInfinity { minus, plus, .. } => Some((minus + plus) / 2.0),
        TestFunction::LogOscillation | TestFunction::Custom { .. } => None,
    }
}

/// Converged: every deviation is below its predecessor (or at the floor)
/// and the last one is within the threshold. Diverged: the last deviation
/// exceeds the threshold and the sequence is not decreasing. Anything
/// else, including a missing prediction, is inconclusive.
pub fn sweep_verdict(records: &[SweepRecord], opts: &SweepOptions) -> Verdict {
    let Some(devs) = records.iter().map(|r| r.deviation).collect::<Option<Vec<f64>>>() else {
        return Verdict::Inconclusive;
    };
    let Some(last) = devs.last().copied() else {
        return Verdict::Inconclusive;
    };
    let decreasing = devs.windows(2).all(|w| w[1] <= opts.floor || w[1] < w[0]);
    if decreasing && last <= opts.threshold {
        Verdict::Converged
    } else if !decreasing && last > opts.threshold {
        Verdict::Diverged
    } else {
        Verdict::Inconclusive
    }
}

/// Pairs `μ_ε^t` (for `μ = δ_a`) against `f` along a strictly decreasing
/// list of ε. Cells run in parallel; records keep the order of `eps_list`.
pub fn epsilon_sweep(
    spec: &MollifierSpec,
    f: &TestFunction,
    t: f64,
    eps_list: &[f64],
    a: f64,
    opts: &SweepOptions,
) -> Result<SweepOutcome> {
    ensure_nonzero_time(t)?;
    check_decreasing(eps_list)?;
    let predicted = predicted_limit(f);
    let records = eps_list
        .par_iter()
        .map(|&eps| {
            let p = pair(spec, eps, t, a, f, &opts.grid)?;
            Ok(SweepRecord {
                eps,
                value: p.value,
                predicted,
                deviation: predicted.map(|l| (p.value - l).norm()),
                error_budget: p.error_budget(),
                method: p.method,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let verdict = sweep_verdict(&records, opts);
    Ok(SweepOutcome { records, verdict })
}

pub(crate) fn check_decreasing(eps_list: &[f64]) -> Result<()> {
    if eps_list.is_empty() {
        return Err(Error::Config("ε list is empty".into()));
    }
    if eps_list.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::Config(format!("ε values must be positive: {eps_list:?}")));
    }
    if eps_list.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Config(format!(
            "ε list must be strictly decreasing: {eps_list:?}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(dev: Option<f64>) -> SweepRecord {
        SweepRecord {
            eps: 1.0,
            value: Complex64::new(0.0, 0.0),
            predicted: dev.map(|_| Complex64::new(0.0, 0.0)),
            deviation: dev,
            error_budget: 0.0,
            method: PairingMethod::Quadrature,
        }
    }

    #[test]
    fn verdict_rules() {
        let o = SweepOptions::default();
        let v = |d: &[f64]| sweep_verdict(&d.iter().map(|x| rec(Some(*x))).collect::<Vec<_>>(), &o);
        assert_eq!(v(&[0.3, 0.1, 0.01]), Verdict::Converged);
        assert_eq!(v(&[0.3, 0.1, 0.05]), Verdict::Inconclusive);
        assert_eq!(v(&[0.1, 0.3, 0.5]), Verdict::Diverged);
        assert_eq!(v(&[1e-17, 3e-17, 0.0]), Verdict::Converged);
        assert_eq!(sweep_verdict(&[rec(None), rec(None)], &o), Verdict::Inconclusive);
    }

    #[test]
    fn eps_list_validation() {
        assert!(check_decreasing(&[0.3, 0.1]).is_ok());
        assert!(check_decreasing(&[0.1, 0.3]).is_err());
        assert!(check_decreasing(&[0.1, 0.1]).is_err());
        assert!(check_decreasing(&[]).is_err());
        assert!(check_decreasing(&[0.1, -0.2]).is_err());
    }

    #[test]
    fn half_tanh_sweep_converges() {
        let g = MollifierSpec::gaussian();
        let f = TestFunction::half_tanh();
        for a in [0.0, 1.0] {
            let out = epsilon_sweep(&g, &f, 1.0, &[0.3, 0.1, 0.03, 0.01], a, &SweepOptions::default()).unwrap();
            assert_eq!(out.verdict, Verdict::Converged, "a={a}: {:?}", out.records);
        }
    }

    #[test]
    fn character_sweep_obeys_gaussian_bound() {
        let g = MollifierSpec::gaussian();
        let f = TestFunction::character(3.0);
        let eps = [0.5, 0.3, 0.2];
        let out = epsilon_sweep(&g, &f, 1.0, &eps, 0.0, &SweepOptions::default()).unwrap();
        for r in &out.records {
            assert!(r.value.norm() <= (-9.0 / (2.0 * r.eps * r.eps)).exp() * (1.0 + 1e-10));
        }
        assert_eq!(out.verdict, Verdict::Converged);
    }

    #[test]
    fn log_oscillation_sweep_is_inconclusive() {
        let g = MollifierSpec::gaussian();
        let out = epsilon_sweep(
            &g,
            &TestFunction::LogOscillation,
            1.0,
            &[0.3, 0.1, 0.03],
            0.0,
            &SweepOptions::default(),
        )
        .unwrap();
        assert_eq!(out.verdict, Verdict::Inconclusive);
        assert!(out.records.iter().all(|r| r.value.norm() <= 1.0 + 1e-12));
    }

    #[test]
    fn decaying_function_sweep_vanishes() {
        // vague convergence to zero
        let rc = MollifierSpec::raised_cosine();
        let f = TestFunction::bump(0.5, 2.0).unwrap();
        let out = epsilon_sweep(&rc, &f, 1.0, &[0.5, 0.2, 0.1, 0.05], 0.0, &SweepOptions::default()).unwrap();
        assert_eq!(out.verdict, Verdict::Converged, "{:?}", out.records);
    }
}
