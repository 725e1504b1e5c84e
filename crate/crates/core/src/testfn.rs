//! Bounded test functions and their invariant means
//! `m(f) = lim_{R→∞} (1/2R) ∫_{-R}^{R} f`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::mollifier::MollifierSpec;
use crate::quadrature::{geometric_points, integrate_domain, sorted_unique, uniform_points, Domain, Tolerance};

pub type ComplexFn = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// `Σ a_j e^{ixξ_j}` with pairwise distinct frequencies.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrigPolynomial {
    terms: Vec<(f64, Complex64)>,
}

impl TrigPolynomial {
    pub fn new(terms: Vec<(f64, Complex64)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("trigonometric polynomial needs at least one term".into()));
        }
        for (i, (xi, a)) in terms.iter().enumerate() {
            if !xi.is_finite() || !a.re.is_finite() || !a.im.is_finite() {
                return Err(Error::Config(format!("non-finite term ({xi}, {a})")));
            }
            if terms[..i].iter().any(|(other, _)| other == xi) {
                return Err(Error::Config(format!("frequency {xi} appears twice")));
            }
        }
        Ok(Self { terms })
    }

    pub fn terms(&self) -> &[(f64, Complex64)] {
        &self.terms
    }

    /// Coefficient of the zero frequency, 0 if absent.
    pub fn constant_term(&self) -> Complex64 {
        self.terms
            .iter()
            .find(|(xi, _)| *xi == 0.0)
            .map_or(Complex64::new(0.0, 0.0), |(_, a)| *a)
    }

    pub fn max_frequency(&self) -> f64 {
        self.terms.iter().map(|(xi, _)| xi.abs()).fold(0.0, f64::max)
    }

    /// Smallest nonzero `|ξ_j|`, if any.
    pub fn min_nonzero_frequency(&self) -> Option<f64> {
        self.terms
            .iter()
            .map(|(xi, _)| xi.abs())
            .filter(|x| *x > 0.0)
            .min_by(f64::total_cmp)
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(xi, a)| a * Complex64::from_polar(1.0, xi * x))
            .sum()
    }
}

#[derive(Clone)]
pub enum TestFunction {
    TrigPolynomial(TrigPolynomial),
    /// Continuous with limits `minus` at −∞ and `plus` at +∞. `scale` is the
    /// length on which the function varies, used to place breakpoints.
    LimitsAtInfinity {
        name: String,
        f: ComplexFn,
        minus: Complex64,
        plus: Complex64,
        sup_bound: f64,
        scale: f64,
    },
    /// `e^{i log(1 + |x|)}`.
    LogOscillation,
    Custom {
        name: String,
        f: ComplexFn,
        sup_bound: f64,
        scale: f64,
    },
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::TrigPolynomial(p) => f.debug_tuple("TrigPolynomial").field(p).finish(),
            TestFunction::LimitsAtInfinity { name, minus, plus, .. } => f
                .debug_struct("LimitsAtInfinity")
                .field("name", name)
                .field("minus", minus)
                .field("plus", plus)
                .finish_non_exhaustive(),
            TestFunction::LogOscillation => f.write_str("LogOscillation"),
            TestFunction::Custom { name, sup_bound, .. } => f
                .debug_struct("Custom")
                .field("name", name)
                .field("sup_bound", sup_bound)
                .finish_non_exhaustive(),
        }
    }
}

/// The invariant mean, or the verdict that it does not exist.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Mean {
    Value(Complex64),
    NoMean,
}

impl Mean {
    pub fn value(self) -> Option<Complex64> {
        match self {
            Mean::Value(v) => Some(v),
            Mean::NoMean => None,
        }
    }
}

/// Numerically sampled limits at ±∞; `None` where the samples fail the
/// Cauchy test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LimitProbe {
    pub minus: Option<Complex64>,
    pub plus: Option<Complex64>,
}

/// Radii for the numerical mean of a custom function.
pub const MEAN_RADII: [f64; 4] = [1e2, 1e3, 1e4, 1e5];

const MAX_PIECES: f64 = 200_000.0;

impl TestFunction {
    pub fn trig(terms: Vec<(f64, Complex64)>) -> Result<Self> {
        Ok(TestFunction::TrigPolynomial(TrigPolynomial::new(terms)?))
    }

    /// The character `e^{ixξ}`.
    pub fn character(xi: f64) -> Self {
        Self::trig(vec![(xi, Complex64::new(1.0, 0.0))]).expect("a single finite term is valid")
    }

    pub fn constant(c: Complex64) -> Self {
        Self::trig(vec![(0.0, c)]).expect("a single finite term is valid")
    }

    /// Checks `|f(±10⁶) − L_±| ≤ tol` before accepting the declared limits.
    pub fn limits_at_infinity(
        name: impl Into<String>,
        f: ComplexFn,
        minus: Complex64,
        plus: Complex64,
        sup_bound: f64,
        tol: f64,
    ) -> Result<Self> {
        let name = name.into();
        for (x, want) in [(-1e6, minus), (1e6, plus)] {
            let got = f(x);
            if !((got - want).norm() <= tol) {
                return Err(Error::PropertyViolation(format!(
                    "{name}: f({x:e}) = {got} is not within {tol:e} of the declared limit {want}"
                )));
            }
        }
        ensure_positive("sup bound", sup_bound)?;
        Ok(TestFunction::LimitsAtInfinity {
            name,
            f,
            minus,
            plus,
            sup_bound,
            scale: 1.0,
        })
    }

    /// `(1 + tanh x)/2`, with limits 0 and 1.
    pub fn half_tanh() -> Self {
        Self::limits_at_infinity(
            "half_tanh",
            Arc::new(|x: f64| Complex64::from(0.5 * (1.0 + x.tanh()))),
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            1.0,
            1e-12,
        )
        .expect("tanh saturates")
    }

    pub fn tanh() -> Self {
        Self::limits_at_infinity(
            "tanh",
            Arc::new(|x: f64| Complex64::from(x.tanh())),
            Complex64::new(-1.0, 0.0),
            Complex64::new(1.0, 0.0),
            1.0,
            1e-12,
        )
        .expect("tanh saturates")
    }

    /// Smooth bump `exp(1 − 1/(1 − ((x−c)/r)²))` supported in `[c − r, c + r]`,
    /// peak value 1.
    pub fn bump(center: f64, radius: f64) -> Result<Self> {
        ensure_positive("bump radius", radius)?;
        let f = Arc::new(move |x: f64| {
            let s = (x - center) / radius;
            if s.abs() < 1.0 {
                Complex64::from((1.0 - 1.0 / (1.0 - s * s)).exp())
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        let mut b = Self::limits_at_infinity(
            format!("bump({center},{radius})"),
            f,
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            1.0,
            0.0,
        )?;
        if let TestFunction::LimitsAtInfinity { scale, .. } = &mut b {
            *scale = radius / 4.0;
        }
        Ok(b)
    }

    pub fn custom(name: impl Into<String>, f: ComplexFn, sup_bound: f64) -> Result<Self> {
        ensure_positive("sup bound", sup_bound)?;
        Ok(TestFunction::Custom {
            name: name.into(),
            f,
            sup_bound,
            scale: 1.0,
        })
    }

    /// Sets the variation length used for breakpoints (no effect on trig
    /// polynomials and the log oscillation).
    pub fn with_scale(mut self, length: f64) -> Result<Self> {
        ensure_positive("scale", length)?;
        match &mut self {
            TestFunction::LimitsAtInfinity { scale, .. } | TestFunction::Custom { scale, .. } => *scale = length,
            _ => {}
        }
        Ok(self)
    }

    pub fn label(&self) -> String {
        match self {
            TestFunction::TrigPolynomial(p) => {
                let parts: Vec<String> = p.terms.iter().map(|(xi, a)| format!("{a}@{xi}")).collect();
                format!("trig[{}]", parts.join(";"))
            }
            TestFunction::LimitsAtInfinity { name, .. } | TestFunction::Custom { name, .. } => name.clone(),
            TestFunction::LogOscillation => "log_oscillation".into(),
        }
    }

    pub fn eval(&self, x: f64) -> Complex64 {
        match self {
            TestFunction::TrigPolynomial(p) => p.eval(x),
            TestFunction::LimitsAtInfinity { f, .. } | TestFunction::Custom { f, .. } => f(x),
            TestFunction::LogOscillation => Complex64::from_polar(1.0, x.abs().ln_1p()),
        }
    }

    pub fn sup_bound(&self) -> f64 {
        match self {
            TestFunction::TrigPolynomial(p) => p.terms.iter().map(|(_, a)| a.norm()).sum(),
            TestFunction::LimitsAtInfinity { sup_bound, .. } | TestFunction::Custom { sup_bound, .. } => *sup_bound,
            TestFunction::LogOscillation => 1.0,
        }
    }

    /// Length over which `f` changes appreciably near the origin.
    pub fn variation_length(&self) -> f64 {
        match self {
            TestFunction::TrigPolynomial(p) => {
                let m = p.max_frequency();
                if m > 0.0 {
                    2.0 * PI / m
                } else {
                    f64::INFINITY
                }
            }
            TestFunction::LimitsAtInfinity { scale, .. } | TestFunction::Custom { scale, .. } => *scale,
            TestFunction::LogOscillation => 1.0,
        }
    }

    /// Breakpoints for integrating `f` over `[lo, hi]`.
    pub(crate) fn domain(&self, lo: f64, hi: f64) -> Domain {
        let span = hi - lo;
        let mut pts = vec![lo, hi];
        if lo < 0.0 && hi > 0.0 {
            pts.push(0.0);
        }
        match self {
            TestFunction::LogOscillation => {
                let reach = lo.abs().max(hi.abs());
                if reach > 1.0 {
                    for p in geometric_points(1.0, reach, 1.5) {
                        pts.push(p);
                        pts.push(-p);
                    }
                }
            }
            _ => {
                let len = self.variation_length();
                if len.is_finite() {
                    pts.extend(uniform_points(lo, hi, len.max(span / MAX_PIECES)));
                }
            }
        }
        Domain::Finite(sorted_unique(
            pts.into_iter().filter(|x| *x >= lo && *x <= hi).collect(),
        ))
    }

    fn integral(&self, lo: f64, hi: f64) -> Result<Complex64> {
        let d = self.domain(lo, hi);
        let pieces = d.points().len();
        let e = integrate_domain(
            |x| self.eval(x),
            &d,
            Tolerance::new(1e-14 * (hi - lo), 1e-13).with_max_intervals((8 * pieces).max(20_000)),
        )?;
        Ok(e.value)
    }

    /// `(1/2R) ∫_{-R}^{R} f`.
    pub fn windowed_mean(&self, r: f64) -> Result<Complex64> {
        ensure_positive("window radius", r)?;
        Ok(self.integral(-r, r)? / (2.0 * r))
    }

    /// `(1/R) ∫_0^R f`.
    pub fn one_sided_mean(&self, r: f64) -> Result<Complex64> {
        ensure_positive("window radius", r)?;
        Ok(self.integral(0.0, r)? / r)
    }

    /// `(F_η ∗ f)(0) = ∫ F(y) f(−y/η) dy` with `F_η(x) = ηF(ηx)`.
    pub fn smoothed_mean(&self, kernel: &MollifierSpec, eta: f64) -> Result<Complex64> {
        ensure_positive("eta", eta)?;
        kernel.ensure_callable()?;
        let d = kernel.domain();
        let core = {
            let p = d.points();
            (p[0], p[p.len() - 1])
        };
        let len = self.variation_length() * eta;
        let d = if len.is_finite() {
            d.with_points(&uniform_points(core.0, core.1, len.max((core.1 - core.0) / MAX_PIECES)))
        } else {
            d
        };
        let e = integrate_domain(
            |y| kernel.eval_rho(y).unwrap_or(f64::NAN) * self.eval(-y / eta),
            &d,
            Tolerance::new(1e-14, 1e-12).with_max_intervals(200_000),
        )?;
        Ok(e.value)
    }

    /// The invariant mean: exact for trig polynomials and functions with
    /// limits at ±∞, `NoMean` for the log oscillation, numerical for
    /// custom functions.
    ///
    /// A custom function is declared `NoMean` unless the successive
    /// differences of its windowed means over [`MEAN_RADII`] shrink by at
    /// least a factor 2 (differences below 1e-12 count as converged).
    pub fn invariant_mean(&self) -> Result<Mean> {
        Ok(match self {
            TestFunction::TrigPolynomial(p) => Mean::Value(p.constant_term()),
            TestFunction::LimitsAtInfinity { minus, plus, .. } => Mean::Value((minus + plus) / 2.0),
            TestFunction::LogOscillation => Mean::NoMean,
            TestFunction::Custom { .. } => {
                let means = MEAN_RADII
                    .iter()
                    .map(|r| self.windowed_mean(*r))
                    .collect::<Result<Vec<_>>>()?;
                let diffs: Vec<f64> = means.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
                if shrinking(&diffs, 1e-12) {
                    Mean::Value(means[means.len() - 1])
                } else {
                    Mean::NoMean
                }
            }
        })
    }

    /// Samples `f` near `±10^k`, `k = 3..=7`, and accepts a limit on a side
    /// when the samples at the two largest scales agree within `tol`.
    pub fn probe_limits(&self, tol: f64) -> LimitProbe {
        let side = |sign: f64| {
            let windows: Vec<Vec<Complex64>> = (3..=7)
                .map(|k| {
                    let base = 10f64.powi(k);
                    (0..16).map(|j| self.eval(sign * (base + 0.731 * j as f64))).collect()
                })
                .collect();
            let last = &windows[windows.len() - 1];
            let prev = &windows[windows.len() - 2];
            let anchor = last[0];
            let settled = last.iter().chain(prev).all(|v| (v - anchor).norm() <= tol);
            settled.then_some(anchor)
        };
        LimitProbe {
            minus: side(-1.0),
            plus: side(1.0),
        }
    }
}

/// Each difference at most half the previous one, or below `floor`.
pub(crate) fn shrinking(diffs: &[f64], floor: f64) -> bool {
    diffs.windows(2).all(|w| w[1] <= floor || w[1] <= 0.5 * w[0])
}

/// A few non-constant trig polynomials used by property checks.
pub fn trig_catalog() -> Vec<TrigPolynomial> {
    let c = |re, im| Complex64::new(re, im);
    vec![
        TrigPolynomial::new(vec![(0.0, c(2.0, 0.0)), (3.0, c(0.0, 1.0))]).unwrap(),
        TrigPolynomial::new(vec![(1.0, c(1.0, 0.0))]).unwrap(),
        TrigPolynomial::new(vec![(-0.5, c(0.5, 0.5)), (2.0_f64.sqrt(), c(-1.0, 0.0))]).unwrap(),
        TrigPolynomial::new(vec![(0.0, c(-1.0, 0.0)), (1.0, c(0.5, 0.0)), (-1.0, c(0.5, 0.0))]).unwrap(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn example() -> TestFunction {
        TestFunction::trig(vec![(0.0, Complex64::new(2.0, 0.0)), (3.0, Complex64::new(0.0, 1.0))]).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(TestFunction::LogOscillation.eval(0.0), Complex64::new(1.0, 0.0));
        assert!((example().eval(0.0) - Complex64::new(2.0, 1.0)).norm() < 1e-15);
        assert!((TestFunction::tanh().eval(20.0) - 1.0).norm() < 1e-8);
    }

    #[test]
    fn eval_respects_sup_bound() {
        let fs = [
            example(),
            TestFunction::half_tanh(),
            TestFunction::LogOscillation,
            TestFunction::bump(1.0, 2.0).unwrap(),
        ];
        for f in &fs {
            for i in 0..2000 {
                let x = -500.0 + 0.5 * i as f64 + 0.123;
                assert!(f.eval(x).norm() <= f.sup_bound() + 1e-15, "{} at {x}", f.label());
            }
        }
    }

    #[test]
    fn trig_rejects_repeated_frequencies() {
        let one = Complex64::new(1.0, 0.0);
        assert!(matches!(
            TestFunction::trig(vec![(1.0, one), (1.0, one)]),
            Err(Error::Config(_))
        ));
        assert!(TestFunction::trig(vec![]).is_err());
    }

    #[test]
    fn declared_limits_are_verified() {
        let f: ComplexFn = Arc::new(|x: f64| Complex64::from(x.tanh()));
        let bad = TestFunction::limits_at_infinity("t", f, Complex64::from(1.0), Complex64::from(1.0), 1.0, 1e-8);
        assert!(matches!(bad, Err(Error::PropertyViolation(_))));
    }

    #[test]
    fn invariant_mean_examples() {
        assert_eq!(
            example().invariant_mean().unwrap(),
            Mean::Value(Complex64::new(2.0, 0.0))
        );
        assert_eq!(
            TestFunction::half_tanh().invariant_mean().unwrap(),
            Mean::Value(Complex64::new(0.5, 0.0))
        );
        assert_eq!(TestFunction::LogOscillation.invariant_mean().unwrap(), Mean::NoMean);
        let no_zero = TestFunction::character(2.0);
        assert_eq!(no_zero.invariant_mean().unwrap(), Mean::Value(Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn custom_mean_detection() {
        let periodic = TestFunction::custom("1+cos", Arc::new(|x: f64| Complex64::from(1.0 + x.cos())), 2.0).unwrap();
        match periodic.invariant_mean().unwrap() {
            Mean::Value(v) => assert!((v - 1.0).norm() < 1e-4, "{v}"),
            Mean::NoMean => panic!("1 + cos x has mean 1"),
        }
        let log = TestFunction::custom(
            "log",
            Arc::new(|x: f64| Complex64::from_polar(1.0, x.abs().ln_1p())),
            1.0,
        )
        .unwrap()
        .with_scale(10.0)
        .unwrap();
        assert_eq!(log.invariant_mean().unwrap(), Mean::NoMean);
    }

    fn log_closed_form(r: f64) -> Complex64 {
        let e = Complex64::from_polar(1.0, r.ln_1p());
        (e + (e - 1.0) / r) / Complex64::new(1.0, 1.0)
    }

    #[test]
    fn log_oscillation_window_closed_form() {
        for r in [10.0, 100.0, 1000.0, 1e4] {
            let m = TestFunction::LogOscillation.windowed_mean(r).unwrap();
            assert!((m - log_closed_form(r)).norm() < 1e-8, "R={r}");
        }
    }

    #[test]
    fn log_oscillation_has_two_subsequential_arguments() {
        // modulus → 1/√2, argument alternates between −π/4 and 3π/4
        for k in 1..=3 {
            let a = log_closed_form((2.0 * PI * k as f64).exp() - 1.0);
            let b = log_closed_form((PI + 2.0 * PI * k as f64).exp() - 1.0);
            assert!((a.norm() - 0.5f64.sqrt()).abs() < 3e-3);
            assert!((a.arg() + PI / 4.0).abs() < 3e-3, "{}", a.arg());
            assert!((b.arg() - 3.0 * PI / 4.0).abs() < 3e-3, "{}", b.arg());
        }
        let a = TestFunction::LogOscillation
            .windowed_mean((4.0 * PI).exp() - 1.0)
            .unwrap();
        assert!((a.arg() + PI / 4.0).abs() < 1e-5);
    }

    #[test]
    fn windowed_mean_examples() {
        let one = TestFunction::constant(Complex64::new(1.0, 0.0));
        for r in [0.5, 7.0, 300.0] {
            assert!((one.windowed_mean(r).unwrap() - 1.0).norm() < 1e-13);
        }
        for xi in [0.7, 3.0] {
            let f = TestFunction::character(xi);
            for r in [10.0, 100.0, 1000.0] {
                let v = f.windowed_mean(r).unwrap();
                assert!(v.norm() <= 1.0 / (xi * r) + 1e-12);
                assert!((v.re - (xi * r).sin() / (xi * r)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn one_and_two_sided_means_agree_on_trig_polynomials() {
        for p in trig_catalog() {
            let a0 = p.constant_term();
            let r = 1e4 / p.min_nonzero_frequency().unwrap();
            let f = TestFunction::TrigPolynomial(p);
            let one = f.one_sided_mean(r).unwrap();
            let two = f.windowed_mean(r).unwrap();
            assert!((one - a0).norm() < 1e-3 && (two - a0).norm() < 1e-3);
            assert!((one - two).norm() < 1e-3);
        }
    }

    #[test]
    fn smoothed_mean_examples() {
        let g = MollifierSpec::gaussian();
        let one = TestFunction::constant(Complex64::new(1.0, 0.0));
        for eta in [1.0, 0.3, 0.1] {
            assert!((one.smoothed_mean(&g, eta).unwrap() - 1.0).norm() < 1e-12);
        }
        let e1 = TestFunction::character(1.0);
        for eta in [1.0, 0.5, 0.3] {
            let want = (-0.5f64 / (eta * eta)).exp();
            assert_abs_diff_eq!(e1.smoothed_mean(&g, eta).unwrap().re, want, epsilon = 1e-12);
        }
        let f = example();
        let devs: Vec<f64> = [1.0, 0.3, 0.1]
            .iter()
            .map(|eta| (f.smoothed_mean(&g, *eta).unwrap() - 2.0).norm())
            .collect();
        assert!(devs[0] > 1e-3 && shrinking(&devs, 1e-12) && devs[2] < 1e-12, "{devs:?}");
    }

    #[test]
    fn nonconstant_trig_polynomials_have_no_limits() {
        for p in trig_catalog() {
            let probe = TestFunction::TrigPolynomial(p).probe_limits(1e-6);
            assert!(probe.minus.is_none() && probe.plus.is_none());
        }
        let probe = TestFunction::constant(Complex64::new(3.0, 0.0)).probe_limits(1e-6);
        assert_eq!(probe.plus, Some(Complex64::new(3.0, 0.0)));
        let probe = TestFunction::half_tanh().probe_limits(1e-6);
        assert_eq!(probe.minus, Some(Complex64::new(0.0, 0.0)));
        assert_eq!(probe.plus, Some(Complex64::new(1.0, 0.0)));
    }
}
