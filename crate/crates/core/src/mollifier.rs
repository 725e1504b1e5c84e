//! Mollifiers ρ ≥ 0 with ∫ρ = 1 and √ρ ∈ L¹, their ε-scalings
//! `ρ_ε(x) = ρ(x/ε)/ε`, square roots, Fourier transforms and
//! autocorrelations `(√ρ ∗ R√ρ)(y) = ∫ √ρ(x) √ρ(x − y) dx`.
//!
//! Fourier transforms use `ℱg(k) = ∫ e^{-ikx} g(x) dx`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::quadrature::{self, integrate, integrate_domain, uniform_points, Domain, Tolerance};
use crate::special::{bessel_k, gamma_real, sinc};

/// Half-width beyond which the standard Gaussian is treated as zero in
/// quadrature. `√ρ(40) ≈ e^{-400}`.
const GAUSSIAN_EXTENT: f64 = 40.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Symmetry {
    Even,
    Asymmetric,
}

/// A user-supplied density. It is treated as zero outside `support`.
#[derive(Clone)]
pub struct CustomDensity {
    pub name: String,
    pub density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub symmetry: Symmetry,
    pub support: (f64, f64),
}

impl fmt::Debug for CustomDensity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CustomDensity")
            .field("name", &self.name)
            .field("symmetry", &self.symmetry)
            .field("support", &self.support)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug)]
pub enum MollifierKind {
    /// Standard normal density.
    Gaussian,
    /// `c_m (1 + x²)^{-m}`.
    RationalDecay { m: u32 },
    /// `(1 + cos πx)/2` on `[-1, 1]`.
    RaisedCosine,
    /// `None` when a configuration names a custom mollifier without
    /// providing the density.
    Custom(Option<CustomDensity>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionFlags {
    pub satisfies_m: bool,
    pub satisfies_mm: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ClosedForms {
    pub sqrt_rho: bool,
    pub fourier_sqrt: bool,
    pub autocorrelation: bool,
    pub sqrt_l1: bool,
}

#[derive(Clone, Debug)]
pub struct MollifierSpec {
    pub kind: MollifierKind,
    pub flags: ConditionFlags,
    pub closed_forms: ClosedForms,
}

impl MollifierSpec {
    pub fn gaussian() -> Self {
        Self {
            kind: MollifierKind::Gaussian,
            flags: ConditionFlags {
                satisfies_m: true,
                satisfies_mm: true,
            },
            closed_forms: ClosedForms {
                sqrt_rho: true,
                fourier_sqrt: true,
                autocorrelation: true,
                sqrt_l1: true,
            },
        }
    }

    pub fn raised_cosine() -> Self {
        Self {
            kind: MollifierKind::RaisedCosine,
            flags: ConditionFlags {
                satisfies_m: true,
                satisfies_mm: true,
            },
            closed_forms: ClosedForms {
                sqrt_rho: true,
                fourier_sqrt: true,
                autocorrelation: true,
                sqrt_l1: true,
            },
        }
    }

    /// `m = 1` is accepted so that the failure of the square-root
    /// integrability condition can be demonstrated; it is flagged as such.
    pub fn rational_decay(m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("rational decay exponent must be at least 1".into()));
        }
        Ok(Self {
            kind: MollifierKind::RationalDecay { m },
            flags: ConditionFlags {
                satisfies_m: m >= 2,
                // (1+|x|)√ρ ~ |x|^{1-m} is integrable only for m > 2.
                satisfies_mm: m >= 3,
            },
            closed_forms: ClosedForms {
                sqrt_rho: true,
                fourier_sqrt: m >= 2,
                autocorrelation: false,
                sqrt_l1: m >= 2,
            },
        })
    }

    pub fn custom(density: CustomDensity, flags: ConditionFlags) -> Self {
        Self {
            kind: MollifierKind::Custom(Some(density)),
            flags,
            closed_forms: ClosedForms {
                sqrt_rho: false,
                fourier_sqrt: false,
                autocorrelation: false,
                sqrt_l1: false,
            },
        }
    }

    /// Mollifiers shipped with the crate that satisfy the basic condition.
    pub fn catalog() -> Vec<MollifierSpec> {
        vec![
            Self::gaussian(),
            Self::raised_cosine(),
            Self::rational_decay(2).expect("m = 2 is valid"),
            Self::rational_decay(3).expect("m = 3 is valid"),
        ]
    }

    pub fn label(&self) -> String {
        match &self.kind {
            MollifierKind::Gaussian => "gaussian".into(),
            MollifierKind::RaisedCosine => "raised_cosine".into(),
            MollifierKind::RationalDecay { m } => format!("rational_decay(m={m})"),
            MollifierKind::Custom(Some(c)) => format!("custom:{}", c.name),
            MollifierKind::Custom(None) => "custom:<missing>".into(),
        }
    }

    pub fn symmetry(&self) -> Symmetry {
        match &self.kind {
            MollifierKind::Custom(Some(c)) => c.symmetry,
            _ => Symmetry::Even,
        }
    }

    pub fn is_compactly_supported(&self) -> bool {
        matches!(self.kind, MollifierKind::RaisedCosine | MollifierKind::Custom(_))
    }

    /// Whether √ρ has a kink or jump somewhere (spectral methods then only
    /// converge algebraically).
    pub fn has_rough_sqrt(&self) -> bool {
        self.is_compactly_supported()
    }

    pub(crate) fn ensure_callable(&self) -> Result<()> {
        match self.kind {
            MollifierKind::Custom(None) => Err(Error::Config(
                "custom mollifier has no density function attached".into(),
            )),
            _ => Ok(()),
        }
    }

    pub(crate) fn ensure_condition_m(&self) -> Result<()> {
        self.ensure_callable()?;
        if self.flags.satisfies_m {
            Ok(())
        } else {
            Err(Error::PropertyViolation(format!(
                "{} does not satisfy the square-root integrability condition",
                self.label()
            )))
        }
    }

    /// ρ(x).
    pub fn eval_rho(&self, x: f64) -> Result<f64> {
        self.ensure_callable()?;
        Ok(self.rho(x))
    }

    /// ρ_ε(x) = ρ(x/ε)/ε.
    pub fn eval_scaled(&self, eps: f64, x: f64) -> Result<f64> {
        ensure_positive("epsilon", eps)?;
        self.ensure_callable()?;
        Ok(self.rho(x / eps) / eps)
    }

    pub(crate) fn rho(&self, x: f64) -> f64 {
        match &self.kind {
            MollifierKind::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
            MollifierKind::RaisedCosine => {
                if x.abs() <= 1.0 {
                    0.5 * (1.0 + (PI * x).cos())
                } else {
                    0.0
                }
            }
            MollifierKind::RationalDecay { m } => rational_constant(*m) * (1.0 + x * x).powi(-(*m as i32)),
            MollifierKind::Custom(Some(c)) => {
                if x >= c.support.0 && x <= c.support.1 {
                    (c.density)(x)
                } else {
                    0.0
                }
            }
            MollifierKind::Custom(None) => f64::NAN,
        }
    }

    /// √ρ(x).
    pub fn sqrt_rho(&self, x: f64) -> f64 {
        match &self.kind {
            MollifierKind::Gaussian => (2.0 * PI).powf(-0.25) * (-0.25 * x * x).exp(),
            MollifierKind::RaisedCosine => {
                if x.abs() <= 1.0 {
                    (0.5 * PI * x).cos()
                } else {
                    0.0
                }
            }
            MollifierKind::RationalDecay { m } => rational_constant(*m).sqrt() * (1.0 + x * x).powf(-(*m as f64) / 2.0),
            _ => self.rho(x).max(0.0).sqrt(),
        }
    }

    /// `√ρ_ε(x) = ε^{-1/2} √ρ(x/ε)`.
    pub fn sqrt_scaled(&self, eps: f64, x: f64) -> f64 {
        self.sqrt_rho(x / eps) / eps.sqrt()
    }

    /// Integration region for √ρ in its natural variable.
    pub fn domain(&self) -> Domain {
        match &self.kind {
            MollifierKind::Gaussian => Domain::Finite(uniform_points(-GAUSSIAN_EXTENT, GAUSSIAN_EXTENT, 2.0)),
            MollifierKind::RaisedCosine => Domain::Finite(vec![-1.0, 0.0, 1.0]),
            MollifierKind::RationalDecay { .. } => Domain::Line {
                points: vec![-1e3, -1e2, -10.0, -3.0, -1.0, 0.0, 1.0, 3.0, 10.0, 1e2, 1e3],
                scale: 1e3,
            },
            MollifierKind::Custom(Some(c)) => {
                let (lo, hi) = c.support;
                Domain::Finite(uniform_points(lo, hi, ((hi - lo) / 32.0).max(1e-3)))
            }
            MollifierKind::Custom(None) => Domain::finite(0.0, 0.0),
        }
    }

    /// A finite region outside which `∫|√ρ| ≤ tail_tol`, for integrands that
    /// oscillate and therefore cannot use the half-line maps.
    pub fn finite_domain(&self, tail_tol: f64) -> Domain {
        match &self.kind {
            MollifierKind::RationalDecay { m } if *m >= 2 => {
                // 2 √c_m Z^{1-m}/(m-1) ≤ tail_tol
                let c = rational_constant(*m).sqrt();
                let m = *m as f64;
                let z = (2.0 * c / ((m - 1.0) * tail_tol)).powf(1.0 / (m - 1.0));
                let mut pts = vec![-z, z, 0.0];
                let mut r = 1.0;
                while r < z {
                    pts.push(r);
                    pts.push(-r);
                    r *= 4.0;
                }
                Domain::Finite(quadrature::sorted_unique(pts))
            }
            MollifierKind::RationalDecay { .. } => Domain::finite(-1e12, 1e12),
            _ => self.domain(),
        }
    }

    /// ‖√ρ‖₁, closed form when available, otherwise adaptive quadrature with
    /// an explicit divergence check.
    pub fn sqrt_rho_l1_norm(&self) -> Result<f64> {
        self.ensure_callable()?;
        match &self.kind {
            MollifierKind::Gaussian => Ok((2.0 * PI).powf(-0.25) * 2.0 * PI.sqrt()),
            MollifierKind::RaisedCosine => Ok(4.0 / PI),
            MollifierKind::RationalDecay { m } if *m >= 2 => Ok(rational_sqrt_l1(*m)),
            _ => improper_integral(self, |x| self.sqrt_rho(x)).ok_or_else(|| {
                Error::PropertyViolation(format!(
                    "∫√ρ diverges for {}: the square root is not integrable",
                    self.label()
                ))
            }),
        }
    }

    /// `(√ρ ∗ R√ρ)(y) = ∫ √ρ(x) √ρ(x − y) dx`; closed form when available.
    pub fn autocorrelation(&self, y: f64) -> Result<f64> {
        self.ensure_callable()?;
        match &self.kind {
            MollifierKind::Gaussian => Ok((-y * y / 8.0).exp()),
            MollifierKind::RaisedCosine => {
                let a = y.abs();
                if a >= 2.0 {
                    Ok(0.0)
                } else {
                    Ok(0.5 * (2.0 - a) * (0.5 * PI * a).cos() + (0.5 * PI * a).sin() / PI)
                }
            }
            _ => self.autocorrelation_numeric(y),
        }
    }

    /// Autocorrelation by direct quadrature, ignoring closed forms.
    pub fn autocorrelation_numeric(&self, y: f64) -> Result<f64> {
        self.ensure_callable()?;
        let d = self.domain();
        let Some(region) = d.intersect(&d.shifted(y)) else {
            return Ok(0.0);
        };
        let e = integrate_domain(
            |x| self.sqrt_rho(x) * self.sqrt_rho(x - y),
            &region,
            Tolerance::new(1e-300, 1e-13),
        )?;
        Ok(e.value)
    }

    /// `ℱ(√ρ)(k) = ∫ e^{-ikx} √ρ(x) dx`.
    pub fn fourier_sqrt(&self, k: f64) -> Result<Complex64> {
        self.ensure_callable()?;
        match &self.kind {
            MollifierKind::Gaussian => Ok(Complex64::from(
                (2.0 * PI).powf(-0.25) * 2.0 * PI.sqrt() * (-k * k).exp(),
            )),
            MollifierKind::RaisedCosine => {
                let a = 0.5 * PI;
                Ok(Complex64::from(sinc(a - k) + sinc(a + k)))
            }
            MollifierKind::RationalDecay { m } if *m >= 2 => {
                let c = rational_constant(*m).sqrt();
                let ka = k.abs();
                if ka < 1e-12 {
                    return Ok(Complex64::from(rational_sqrt_l1(*m)));
                }
                let nu = (*m as f64 - 1.0) / 2.0;
                let v = 2.0 * PI.sqrt() / gamma_real(*m as f64 / 2.0) * (ka / 2.0).powf(nu) * bessel_k(nu, ka)?;
                Ok(Complex64::from(c * v))
            }
            _ => self.fourier_sqrt_numeric(k),
        }
    }

    /// `ℱ(√ρ)(k)` by direct quadrature.
    pub fn fourier_sqrt_numeric(&self, k: f64) -> Result<Complex64> {
        self.ensure_callable()?;
        let d = self.finite_domain(1e-7);
        let e = integrate_domain(
            |x| Complex64::from_polar(self.sqrt_rho(x), -k * x),
            &d,
            Tolerance::new(1e-13, 1e-13).with_max_intervals(200_000),
        )?;
        Ok(e.value)
    }

    /// `∫_{|k| > cutoff} |ℱ√ρ(k)|² dk / 2π`: the share of ‖√ρ‖₂² = 1 carried
    /// by frequencies above `cutoff`.
    pub fn momentum_tail(&self, cutoff: f64) -> Result<f64> {
        self.ensure_callable()?;
        let cutoff = cutoff.abs();
        if let MollifierKind::Gaussian = self.kind {
            // |ℱ√ρ|² = 2√(2π) e^{-2k²}; integrate directly to avoid the
            // cancellation in 1 - erf.
            let e = quadrature::integrate_upper(
                |k: f64| 2.0 * (2.0 * PI).sqrt() * (-2.0 * k * k).exp(),
                cutoff,
                1.0,
                Tolerance::new(1e-300, 1e-10),
            )?;
            return Ok(2.0 * e.value / (2.0 * PI));
        }
        let scale = match self.kind {
            MollifierKind::RaisedCosine => 10.0 + cutoff,
            _ => 1.0 + cutoff,
        };
        let plus = quadrature::integrate_upper(
            |k: f64| self.fourier_sqrt(k).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
            cutoff,
            scale,
            Tolerance::new(1e-14, 1e-8),
        )?;
        let minus = if self.symmetry() == Symmetry::Even {
            plus.value
        } else {
            quadrature::integrate_upper(
                |k: f64| self.fourier_sqrt(-k).map(|v| v.norm_sqr()).unwrap_or(f64::NAN),
                cutoff,
                scale,
                Tolerance::new(1e-14, 1e-8),
            )?
            .value
        };
        Ok((plus.value + minus) / (2.0 * PI))
    }

    /// `∫_{|x| > cutoff} ρ(x) dx`.
    pub fn position_tail(&self, lower: f64, upper: f64) -> Result<f64> {
        self.ensure_callable()?;
        let tol = Tolerance::new(1e-300, 1e-10);
        let d = self.domain();
        let pts = d.points();
        let (lo, hi) = (pts[0], pts[pts.len() - 1]);
        let infinite = matches!(d, Domain::Line { .. });
        let mut total = 0.0;
        if upper < hi || infinite {
            let e = quadrature::integrate_upper(|x| self.rho(x), upper, 1.0 + upper.abs(), tol)?;
            total += e.value;
        }
        if lower > lo || infinite {
            let e = quadrature::integrate_lower(|x| self.rho(x), lower, 1.0 + lower.abs(), tol)?;
            total += e.value;
        }
        Ok(total)
    }

    /// Numerically checks the declared condition flags.
    pub fn verify_conditions(&self) -> Result<ConditionReport> {
        self.ensure_callable()?;
        let report = measure_conditions(self)?;
        if report.m != self.flags.satisfies_m {
            return Err(Error::FlagMismatch {
                flag: "M",
                declared: self.flags.satisfies_m,
                measured: report.m,
            });
        }
        if report.mm != self.flags.satisfies_mm {
            return Err(Error::FlagMismatch {
                flag: "MM",
                declared: self.flags.satisfies_mm,
                measured: report.mm,
            });
        }
        if self.symmetry() == Symmetry::Even && !report.even {
            return Err(Error::FlagMismatch {
                flag: "even",
                declared: true,
                measured: false,
            });
        }
        Ok(report)
    }
}

/// Measured integrability data behind the condition flags. `None` norms
/// diverge.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionReport {
    pub label: String,
    pub m: bool,
    pub mm: bool,
    pub nonnegative: bool,
    pub even: bool,
    pub mass: f64,
    pub sqrt_l1: Option<f64>,
    pub weighted_sqrt_l1: Option<f64>,
    pub weighted_sqrt_l2: Option<f64>,
    pub derivative_l1: Option<f64>,
    pub derivative_l2: Option<f64>,
}

fn measure_conditions(spec: &MollifierSpec) -> Result<ConditionReport> {
    let d = spec.domain();
    let pts = d.points();
    let (lo, hi) = (pts[0], pts[pts.len() - 1]);
    let samples = 4001;
    let mut nonnegative = true;
    let mut even = true;
    for i in 0..samples {
        let x = lo + (hi - lo) * i as f64 / (samples - 1) as f64;
        let v = spec.rho(x);
        if !(v >= 0.0) || !v.is_finite() {
            nonnegative = false;
        }
        let mirrored = spec.rho(-x);
        if (v - mirrored).abs() > 1e-12 * (1.0 + v.abs()) {
            even = false;
        }
    }

    let mass = integrate_domain(|x| spec.rho(x), &d, Tolerance::new(1e-13, 1e-13))?.value;
    let sqrt_l1 = improper_integral(spec, |x| spec.sqrt_rho(x));
    let weighted_sqrt_l1 = improper_integral(spec, |x| (1.0 + x.abs()) * spec.sqrt_rho(x));
    let weighted_sqrt_l2 = improper_integral(spec, |x| (1.0 + x.abs()).powi(2) * spec.rho(x));
    let derivative = |x: f64| {
        let h = 1e-6 * (1.0 + x.abs());
        (spec.sqrt_rho(x + h) - spec.sqrt_rho(x - h)) / (2.0 * h)
    };
    let derivative_l1 = improper_integral(spec, |x| derivative(x).abs());
    let derivative_l2 = improper_integral(spec, |x| derivative(x).powi(2));

    let m = nonnegative && (mass - 1.0).abs() <= 1e-8 && sqrt_l1.is_some();
    let mm = m
        && weighted_sqrt_l1.is_some()
        && weighted_sqrt_l2.is_some()
        && derivative_l1.is_some()
        && derivative_l2.is_some();

    Ok(ConditionReport {
        label: spec.label(),
        m,
        mm,
        nonnegative,
        even,
        mass,
        sqrt_l1,
        weighted_sqrt_l1,
        weighted_sqrt_l2,
        derivative_l1,
        derivative_l2,
    })
}

/// `∫_ℝ g` for `g ≥ 0`, or `None` if the partial integrals over
/// `[-R, R]`, `R = 10, 10², …, 10⁸`, keep growing: the increments must
/// shrink by at least a factor 2 from one decade to the next.
fn improper_integral(spec: &MollifierSpec, g: impl Fn(f64) -> f64) -> Option<f64> {
    let tol = Tolerance::new(1e-14, 1e-12).with_max_intervals(50_000);
    let core_pts = spec.domain().points().to_vec();
    let core = Domain::Finite(quadrature::sorted_unique(
        core_pts
            .into_iter()
            .filter(|x| x.abs() < 10.0)
            .chain([-10.0, 10.0])
            .collect(),
    ));
    let mut total = integrate_domain(&g, &core, tol).ok()?.value;
    let mut increments = Vec::new();
    let mut r = 10.0f64;
    for _ in 0..7 {
        let next = r * 10.0;
        let right = integrate(&g, r, next, tol).ok()?.value;
        let left = integrate(&g, -next, -r, tol).ok()?.value;
        let inc = right + left;
        increments.push(inc);
        total += inc;
        r = next;
    }
    let floor = 1e-14 * total.abs().max(1e-300);
    let shrinking = increments.windows(2).all(|w| w[1] <= floor || w[1] <= 0.5 * w[0]);
    let last = *increments.last().unwrap_or(&0.0);
    if shrinking && last <= 1e-6 * total.abs().max(1.0) {
        Some(total)
    } else {
        None
    }
}

fn rational_constant(m: u32) -> f64 {
    let m = m as f64;
    gamma_real(m) / (PI.sqrt() * gamma_real(m - 0.5))
}

fn rational_sqrt_l1(m: u32) -> f64 {
    let mf = m as f64;
    rational_constant(m).sqrt() * PI.sqrt() * gamma_real((mf - 1.0) / 2.0) / gamma_real(mf / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mixture() -> MollifierSpec {
        MollifierSpec::custom(
            CustomDensity {
                name: "mixture".into(),
                density: Arc::new(|x: f64| {
                    let n = |x: f64, m: f64, s: f64| (-0.5 * ((x - m) / s).powi(2)).exp() / (s * (2.0 * PI).sqrt());
                    0.7 * n(x, -0.5, 0.6) + 0.3 * n(x, 1.0, 0.4)
                }),
                symmetry: Symmetry::Asymmetric,
                support: (-12.0, 12.0),
            },
            ConditionFlags {
                satisfies_m: true,
                satisfies_mm: true,
            },
        )
    }

    #[test]
    fn eval_rho_examples() {
        let g = MollifierSpec::gaussian();
        assert_abs_diff_eq!(g.eval_rho(0.0).unwrap(), 1.0 / (2.0 * PI).sqrt(), epsilon = 1e-16);
        let rc = MollifierSpec::raised_cosine();
        assert_eq!(rc.eval_rho(0.0).unwrap(), 1.0);
        assert_eq!(rc.eval_rho(1.5).unwrap(), 0.0);
        let missing = MollifierSpec {
            kind: MollifierKind::Custom(None),
            ..MollifierSpec::gaussian()
        };
        assert!(matches!(missing.eval_rho(0.0), Err(Error::Config(_))));
    }

    #[test]
    fn eval_scaled_examples() {
        let g = MollifierSpec::gaussian();
        assert_abs_diff_eq!(
            g.eval_scaled(0.5, 0.0).unwrap(),
            2.0 / (2.0 * PI).sqrt(),
            epsilon = 1e-15
        );
        for x in [-2.0, -0.3, 0.0, 1.7] {
            assert_eq!(g.eval_scaled(1.0, x).unwrap(), g.eval_rho(x).unwrap());
        }
        let rc = MollifierSpec::raised_cosine();
        assert_eq!(rc.eval_scaled(0.1, 0.2).unwrap(), 0.0);
        assert!(matches!(g.eval_scaled(0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(g.eval_scaled(-0.5, 1.0), Err(Error::Domain(_))));
    }

    #[test]
    fn scaled_mass_is_one() {
        for spec in MollifierSpec::catalog() {
            for eps in [1.0, 0.3, 0.05] {
                let d = spec.domain().scaled(eps);
                let e =
                    integrate_domain(|x| spec.eval_scaled(eps, x).unwrap(), &d, Tolerance::new(1e-13, 1e-13)).unwrap();
                assert!((e.value - 1.0).abs() < 1e-8, "{} eps={eps}: {}", spec.label(), e.value);
            }
        }
    }

    #[test]
    fn sqrt_l1_norms() {
        let g = MollifierSpec::gaussian().sqrt_rho_l1_norm().unwrap();
        assert_abs_diff_eq!(g, 2.239_030_269_840_495, epsilon = 1e-14);
        let rc = MollifierSpec::raised_cosine().sqrt_rho_l1_norm().unwrap();
        assert_abs_diff_eq!(rc, 4.0 / PI, epsilon = 1e-15);
        let cauchy = MollifierSpec::rational_decay(1).unwrap();
        assert!(matches!(cauchy.sqrt_rho_l1_norm(), Err(Error::PropertyViolation(_))));
    }

    #[test]
    fn sqrt_l1_closed_forms_match_quadrature() {
        for spec in MollifierSpec::catalog() {
            let closed = spec.sqrt_rho_l1_norm().unwrap();
            let numeric = improper_integral(&spec, |x| spec.sqrt_rho(x)).unwrap();
            // the decade scan stops at 10⁸, which leaves ~2√c/10⁸ for m = 2
            assert!(
                (closed - numeric).abs() < 5e-8,
                "{}: {closed} vs {numeric}",
                spec.label()
            );
        }
    }

    #[test]
    fn rational_constants_reference() {
        // c_2 = 2/π, c_3 = 8/(3π), ‖√ρ‖₁ values from independent quadrature
        assert_abs_diff_eq!(rational_constant(2), 2.0 / PI, epsilon = 1e-14);
        assert_abs_diff_eq!(rational_constant(3), 8.0 / (3.0 * PI), epsilon = 1e-14);
        assert_abs_diff_eq!(rational_sqrt_l1(2), 2.506_628_274_631_000_2, epsilon = 1e-12);
        assert_abs_diff_eq!(rational_sqrt_l1(3), 1.842_635_463_847_122_7, epsilon = 1e-12);
    }

    #[test]
    fn autocorrelation_examples() {
        let g = MollifierSpec::gaussian();
        assert_abs_diff_eq!(g.autocorrelation(4.0).unwrap(), (-2.0f64).exp(), epsilon = 1e-15);
        for spec in MollifierSpec::catalog() {
            assert!((spec.autocorrelation(0.0).unwrap() - 1.0).abs() <= 1e-8);
            assert!(
                (spec.autocorrelation_numeric(0.0).unwrap() - 1.0).abs() <= 1e-8,
                "{}",
                spec.label()
            );
        }
    }

    #[test]
    fn gaussian_autocorrelation_matches_quadrature() {
        let g = MollifierSpec::gaussian();
        for i in 0..=40 {
            let y = -10.0 + 0.5 * i as f64;
            let q = g.autocorrelation_numeric(y).unwrap();
            assert!((q - (-y * y / 8.0).exp()).abs() < 1e-10, "y={y}");
        }
    }

    #[test]
    fn raised_cosine_autocorrelation_matches_quadrature() {
        let rc = MollifierSpec::raised_cosine();
        // independent value at y = 0.7 from scipy.integrate.quad
        assert_abs_diff_eq!(
            rc.autocorrelation(0.7).unwrap(),
            0.578_710_010_134_119_8,
            epsilon = 1e-14
        );
        for y in [-2.5, -1.3, -0.2, 0.0, 0.9, 1.99, 2.0, 3.0] {
            let c = rc.autocorrelation(y).unwrap();
            let q = rc.autocorrelation_numeric(y).unwrap();
            assert!((c - q).abs() < 1e-12, "y={y}: {c} vs {q}");
        }
    }

    #[test]
    fn autocorrelation_vanishes_at_infinity() {
        for spec in [MollifierSpec::gaussian(), MollifierSpec::raised_cosine()] {
            assert!(spec.autocorrelation(50.0).unwrap() < 1e-6);
            assert!(spec.autocorrelation(-50.0).unwrap() < 1e-6);
        }
        // Algebraic kernels decay like 2‖√ρ‖₁ √ρ(y) rather than fast.
        for m in [2, 3] {
            let spec = MollifierSpec::rational_decay(m).unwrap();
            let mut prev = f64::INFINITY;
            for y in [10.0, 50.0, 250.0, 1250.0] {
                let a = spec.autocorrelation(y).unwrap();
                assert!(a < prev);
                prev = a;
                let asymptotic = 2.0 * spec.sqrt_rho_l1_norm().unwrap() * spec.sqrt_rho(y);
                if y >= 250.0 {
                    assert!((a / asymptotic - 1.0).abs() < 0.05, "m={m} y={y}: {a} vs {asymptotic}");
                }
            }
        }
    }

    #[test]
    fn fourier_closed_forms_match_quadrature() {
        let rc = MollifierSpec::raised_cosine();
        assert_abs_diff_eq!(
            rc.fourier_sqrt(1.0).unwrap().re,
            1.156_745_592_270_542_5,
            epsilon = 1e-14
        );
        let ks = [0.0, 0.3, PI / 2.0, 1.0, 2.5, 7.0];
        for spec in [MollifierSpec::gaussian(), rc] {
            for k in ks {
                let c = spec.fourier_sqrt(k).unwrap();
                let q = spec.fourier_sqrt_numeric(k).unwrap();
                assert!((c - q).norm() < 1e-12, "{} k={k}: {c} vs {q}", spec.label());
            }
        }
        // m = 3 goes through K_1; the truncated quadrature is good to ~1e-7.
        let r3 = MollifierSpec::rational_decay(3).unwrap();
        for k in ks {
            let c = r3.fourier_sqrt(k).unwrap();
            let q = r3.fourier_sqrt_numeric(k).unwrap();
            assert!((c - q).norm() < 2e-7, "m=3 k={k}: {c} vs {q}");
        }
        // m = 2 has the elementary form π √c₂ e^{-|k|}.
        let r2 = MollifierSpec::rational_decay(2).unwrap();
        for k in ks {
            let want = PI * (2.0 / PI).sqrt() * (-k).exp();
            assert!((r2.fourier_sqrt(k).unwrap().re - want).abs() < 1e-12);
        }
    }

    #[test]
    fn verify_catalog() {
        let g = MollifierSpec::gaussian().verify_conditions().unwrap();
        assert!(g.m && g.mm);
        let rc = MollifierSpec::raised_cosine().verify_conditions().unwrap();
        assert!(rc.m && rc.mm);
        let r2 = MollifierSpec::rational_decay(2).unwrap().verify_conditions().unwrap();
        assert!(r2.m && !r2.mm);
        let r3 = MollifierSpec::rational_decay(3).unwrap().verify_conditions().unwrap();
        assert!(r3.m && r3.mm);
        let cauchy = MollifierSpec::rational_decay(1).unwrap().verify_conditions().unwrap();
        assert!(!cauchy.m && !cauchy.mm);
        assert!(cauchy.sqrt_l1.is_none());
        let mix = mixture().verify_conditions().unwrap();
        assert!(mix.m && !mix.even);
    }

    #[test]
    fn verify_detects_flag_mismatch() {
        let mut liar = MollifierSpec::rational_decay(2).unwrap();
        liar.flags.satisfies_mm = true;
        assert!(matches!(
            liar.verify_conditions(),
            Err(Error::FlagMismatch {
                flag: "MM",
                declared: true,
                measured: false
            })
        ));
        let mut liar = MollifierSpec::rational_decay(1).unwrap();
        liar.flags.satisfies_m = true;
        assert!(matches!(
            liar.verify_conditions(),
            Err(Error::FlagMismatch { flag: "M", .. })
        ));
    }

    #[test]
    fn asymmetric_autocorrelation_is_even() {
        let mix = mixture();
        for y in [0.3, 1.1, 2.4] {
            let a = mix.autocorrelation(y).unwrap();
            let b = mix.autocorrelation(-y).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn momentum_tail_gaussian_closed_form() {
        // |ℱ√ρ|²/2π integrates to erfc(√2 K); at K = 0 it is the whole mass.
        let g = MollifierSpec::gaussian();
        assert!((g.momentum_tail(0.0).unwrap() - 1.0).abs() < 1e-10);
        let rc = MollifierSpec::raised_cosine();
        assert!((rc.momentum_tail(0.0).unwrap() - 1.0).abs() < 1e-7);
        assert!(rc.momentum_tail(100.0).unwrap() < 1e-5);
    }

    #[test]
    fn position_tail_values() {
        let g = MollifierSpec::gaussian();
        // P(|X| > 2) for a standard normal
        assert!((g.position_tail(-2.0, 2.0).unwrap() - 0.045_500_263_896_358_41).abs() < 1e-10);
        assert_eq!(MollifierSpec::raised_cosine().position_tail(-1.0, 1.0).unwrap(), 0.0);
    }
}
