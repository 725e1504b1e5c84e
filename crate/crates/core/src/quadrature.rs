//! Globally adaptive Gauss–Kronrod (10/21) quadrature for real and complex
//! integrands on finite intervals, half-lines and the whole line.
//!
//! Infinite ranges are mapped onto `[0, 1)` with `x = origin ± scale·s/(1 − s)`;
//! the 21-point rule never samples the endpoints, so the singular end of the
//! map is never evaluated.
//!
//! All pieces of a [`Domain`] share one priority queue, so the refinement
//! effort goes wherever the error is largest regardless of which piece it
//! lives in.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_734_401_931,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values that can be integrated: `f64` and `Complex64`.
pub trait Scalar:
    Copy + Default + Debug + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + AddAssign
{
    fn modulus(self) -> f64;
}

impl Scalar for f64 {
    fn modulus(self) -> f64 {
        self.abs()
    }
}

impl Scalar for Complex64 {
    fn modulus(self) -> f64 {
        self.norm()
    }
}

/// Stopping rule: the summed error estimate must fall below
/// `max(abs, rel · ∫|f|)`.
///
/// The relative part is taken against `∫|f|` rather than `|∫f|` so that
/// strongly cancelling oscillatory integrals still terminate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-10,
            rel: 1e-12,
            max_intervals: 20_000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }

    /// Purely relative tolerance, for integrals whose magnitude is unknown in
    /// advance (e.g. exponentially small Fourier coefficients).
    pub fn relative(rel: f64) -> Self {
        Self::new(0.0, rel)
    }

    pub fn with_max_intervals(mut self, n: usize) -> Self {
        self.max_intervals = n;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate<T> {
    pub value: T,
    pub error: f64,
    /// Estimate of `∫|f|`.
    pub abs_integral: f64,
    pub evaluations: usize,
}

impl<T: Scalar> Estimate<T> {
    pub fn zero() -> Self {
        Self {
            value: T::default(),
            error: 0.0,
            abs_integral: 0.0,
            evaluations: 0,
        }
    }
}

/// Integration region described by sorted breakpoints.
///
/// `Finite` integrates from the first to the last point; `Line` adds the two
/// half-lines beyond the outermost points, mapped with length `scale`.
#[derive(Clone, Debug, PartialEq)]
pub enum Domain {
    Finite(Vec<f64>),
    Line { points: Vec<f64>, scale: f64 },
}

impl Domain {
    pub fn finite(lo: f64, hi: f64) -> Self {
        Domain::Finite(vec![lo, hi])
    }

    pub fn points(&self) -> &[f64] {
        match self {
            Domain::Finite(p) => p,
            Domain::Line { points, .. } => points,
        }
    }

    pub fn shifted(&self, by: f64) -> Self {
        let shift = |p: &[f64]| p.iter().map(|x| x + by).collect::<Vec<_>>();
        match self {
            Domain::Finite(p) => Domain::Finite(shift(p)),
            Domain::Line { points, scale } => Domain::Line {
                points: shift(points),
                scale: *scale,
            },
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0);
        let scale_pts = |p: &[f64]| p.iter().map(|x| x * factor).collect::<Vec<_>>();
        match self {
            Domain::Finite(p) => Domain::Finite(scale_pts(p)),
            Domain::Line { points, scale } => Domain::Line {
                points: scale_pts(points),
                scale: scale * factor,
            },
        }
    }

    /// Adds extra breakpoints, keeping only those inside a finite range.
    pub fn with_points(&self, extra: &[f64]) -> Self {
        match self {
            Domain::Finite(p) => {
                let (lo, hi) = (p[0], p[p.len() - 1]);
                let mut all = p.clone();
                all.extend(extra.iter().copied().filter(|x| *x > lo && *x < hi));
                Domain::Finite(sorted_unique(all))
            }
            Domain::Line { points, scale } => {
                let mut all = points.clone();
                all.extend_from_slice(extra);
                Domain::Line {
                    points: sorted_unique(all),
                    scale: *scale,
                }
            }
        }
    }

    /// Region where both integrands can be nonzero. `None` if it is empty.
    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        match (self, other) {
            (Domain::Line { points: a, scale: sa }, Domain::Line { points: b, scale: sb }) => {
                let mut all = a.clone();
                all.extend_from_slice(b);
                Some(Domain::Line {
                    points: sorted_unique(all),
                    scale: sa.min(*sb),
                })
            }
            (Domain::Finite(f), line @ Domain::Line { .. }) | (line @ Domain::Line { .. }, Domain::Finite(f)) => {
                let mut all = f.clone();
                all.extend_from_slice(line.points());
                clip(all, f[0], f[f.len() - 1])
            }
            (Domain::Finite(a), Domain::Finite(b)) => {
                let lo = a[0].max(b[0]);
                let hi = a[a.len() - 1].min(b[b.len() - 1]);
                let mut all = a.clone();
                all.extend_from_slice(b);
                clip(all, lo, hi)
            }
        }
    }
}

fn clip(points: Vec<f64>, lo: f64, hi: f64) -> Option<Domain> {
    if !(hi > lo) {
        return None;
    }
    let mut inner: Vec<f64> = points.into_iter().filter(|x| *x > lo && *x < hi).collect();
    inner.push(lo);
    inner.push(hi);
    Some(Domain::Finite(sorted_unique(inner)))
}

pub(crate) fn sorted_unique(mut v: Vec<f64>) -> Vec<f64> {
    v.retain(|x| x.is_finite());
    v.sort_by(f64::total_cmp);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-15 * (1.0 + b.abs()));
    v
}

/// Breakpoints `lo, lo·ratio, lo·ratio², …, hi` for integrands with
/// features on a logarithmic scale. Requires `0 < lo < hi`.
pub fn geometric_points(lo: f64, hi: f64, ratio: f64) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && ratio > 1.0);
    let mut pts = vec![lo];
    let mut x = lo * ratio;
    while x < hi {
        pts.push(x);
        x *= ratio;
    }
    pts.push(hi);
    pts
}

/// Evenly spaced breakpoints with at most `width` between neighbours.
pub fn uniform_points(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    assert!(hi > lo && width > 0.0);
    let n = ((hi - lo) / width).ceil().max(1.0) as usize;
    (0..=n).map(|k| lo + (hi - lo) * k as f64 / n as f64).collect()
}

#[derive(Clone, Copy, Debug)]
enum Map {
    Identity,
    Upper { origin: f64, scale: f64 },
    Lower { origin: f64, scale: f64 },
}

impl Map {
    #[inline]
    fn apply(self, s: f64) -> (f64, f64) {
        match self {
            Map::Identity => (s, 1.0),
            Map::Upper { origin, scale } => {
                let d = 1.0 - s;
                (origin + scale * s / d, scale / (d * d))
            }
            Map::Lower { origin, scale } => {
                let d = 1.0 - s;
                (origin - scale * s / d, scale / (d * d))
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct Segment<T> {
    lo: f64,
    hi: f64,
    map: Map,
    value: T,
    error: f64,
    abs: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let floor = 50.0 * f64::EPSILON * res_abs;
        if floor > scaled {
            scaled = floor;
        }
    }
    scaled
}

fn gauss_kronrod<T: Scalar, F: Fn(f64) -> T>(f: &F, lo: f64, hi: f64, map: Map) -> Segment<T> {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let eval = |s: f64| {
        let (x, jac) = map.apply(s);
        let v = f(x) * jac;
        debug_assert!(
            v.modulus().is_finite() || v.modulus().is_nan(),
            "integrand overflow at {x}"
        );
        v
    };

    let f_center = eval(center);
    let mut res_k = f_center * WGK[10];
    let mut res_g = T::default();
    let mut res_abs = f_center.modulus() * WGK[10];
    let mut fv1 = [T::default(); 10];
    let mut fv2 = [T::default(); 10];

    for j in 0..10 {
        let dx = half * XGK[j];
        let a = eval(center - dx);
        let b = eval(center + dx);
        fv1[j] = a;
        fv2[j] = b;
        res_k += (a + b) * WGK[j];
        res_abs += (a.modulus() + b.modulus()) * WGK[j];
        if j % 2 == 1 {
            res_g += (a + b) * WG[j / 2];
        }
    }

    let mean = res_k * 0.5;
    let mut res_asc = WGK[10] * (f_center - mean).modulus();
    for j in 0..10 {
        res_asc += WGK[j] * ((fv1[j] - mean).modulus() + (fv2[j] - mean).modulus());
    }

    let err = (res_k - res_g).modulus() * half.abs();
    let res_abs = res_abs * half.abs();
    let res_asc = res_asc * half.abs();
    let mut error = rescale_error(err, res_abs, res_asc);
    if !error.is_finite() {
        error = f64::INFINITY;
    }

    Segment {
        lo,
        hi,
        map,
        value: res_k * half,
        error,
        abs: res_abs,
    }
}

fn adapt<T: Scalar, F: Fn(f64) -> T>(f: &F, initial: Vec<(f64, f64, Map)>, tol: Tolerance) -> Result<Estimate<T>> {
    if initial.is_empty() {
        return Ok(Estimate::zero());
    }
    let mut heap = BinaryHeap::with_capacity(initial.len() * 4);
    let mut frozen: Vec<Segment<T>> = Vec::new();
    let mut evaluations = 0usize;
    for (lo, hi, map) in initial {
        heap.push(gauss_kronrod(f, lo, hi, map));
        evaluations += 21;
    }

    loop {
        let (value, error, abs) = totals(heap.iter().chain(frozen.iter()));
        let target = tol.abs.max(tol.rel * abs);
        if error <= target {
            return Ok(Estimate {
                value,
                error,
                abs_integral: abs,
                evaluations,
            });
        }
        let intervals = heap.len() + frozen.len();
        let fail = || Error::Quadrature {
            estimate: value.modulus(),
            error,
            intervals,
        };
        if intervals >= tol.max_intervals {
            return Err(fail());
        }
        let Some(worst) = heap.pop() else {
            return Err(fail());
        };
        let mid = 0.5 * (worst.lo + worst.hi);
        let too_narrow = (worst.hi - worst.lo) <= 1e-14 * (worst.lo.abs() + worst.hi.abs()) + 1e-300
            || mid <= worst.lo
            || mid >= worst.hi;
        if too_narrow {
            frozen.push(worst);
            continue;
        }
        heap.push(gauss_kronrod(f, worst.lo, mid, worst.map));
        heap.push(gauss_kronrod(f, mid, worst.hi, worst.map));
        evaluations += 42;
    }
}

fn totals<'a, T: Scalar + 'a>(segs: impl Iterator<Item = &'a Segment<T>>) -> (T, f64, f64) {
    let mut value = T::default();
    let mut error = 0.0;
    let mut abs = 0.0;
    for s in segs {
        value += s.value;
        error += s.error;
        abs += s.abs;
    }
    (value, error, abs)
}

fn finite_pieces(points: &[f64]) -> Vec<(f64, f64, Map)> {
    points
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| (w[0], w[1], Map::Identity))
        .collect()
}

/// `∫_a^b f`. Reversed limits flip the sign.
pub fn integrate<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate<T>> {
    if a == b {
        return Ok(Estimate::zero());
    }
    if b < a {
        let mut e = adapt(&f, vec![(b, a, Map::Identity)], tol)?;
        e.value = e.value * -1.0;
        return Ok(e);
    }
    adapt(&f, vec![(a, b, Map::Identity)], tol)
}

/// `∫_a^∞ f`, with `scale` the length over which `f` decays.
pub fn integrate_upper<T: Scalar, F: Fn(f64) -> T>(f: F, a: f64, scale: f64, tol: Tolerance) -> Result<Estimate<T>> {
    adapt(&f, vec![(0.0, 1.0, Map::Upper { origin: a, scale })], tol)
}

/// `∫_{-∞}^b f`.
pub fn integrate_lower<T: Scalar, F: Fn(f64) -> T>(f: F, b: f64, scale: f64, tol: Tolerance) -> Result<Estimate<T>> {
    adapt(&f, vec![(0.0, 1.0, Map::Lower { origin: b, scale })], tol)
}

/// Integral over a [`Domain`].
pub fn integrate_domain<T: Scalar, F: Fn(f64) -> T>(f: F, domain: &Domain, tol: Tolerance) -> Result<Estimate<T>> {
    match domain {
        Domain::Finite(points) => adapt(&f, finite_pieces(points), tol),
        Domain::Line { points, scale } => {
            assert!(!points.is_empty(), "line domain needs at least one breakpoint");
            let mut pieces = finite_pieces(points);
            pieces.push((
                0.0,
                1.0,
                Map::Lower {
                    origin: points[0],
                    scale: *scale,
                },
            ));
            pieces.push((
                0.0,
                1.0,
                Map::Upper {
                    origin: points[points.len() - 1],
                    scale: *scale,
                },
            ));
            adapt(&f, pieces, tol)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x: f64| x.powi(5) - 3.0 * x * x, -1.0, 2.0, Tolerance::default()).unwrap();
        let exact = (64.0 - 1.0) / 6.0 - (8.0 + 1.0);
        assert!((e.value - exact).abs() < 1e-13);
        assert_eq!(e.evaluations, 21);
    }

    #[test]
    fn reversed_limits() {
        let e = integrate(|x: f64| x.cos(), PI, 0.0, Tolerance::default()).unwrap();
        assert!(e.value.abs() < 1e-14);
        let e = integrate(|x: f64| x.sin(), PI, 0.0, Tolerance::default()).unwrap();
        assert!((e.value + 2.0).abs() < 1e-13);
    }

    #[test]
    fn gaussian_line() {
        let d = Domain::Line {
            points: vec![-1.0, 0.0, 1.0],
            scale: 1.0,
        };
        let e = integrate_domain(|x: f64| (-x * x / 2.0).exp(), &d, Tolerance::default()).unwrap();
        assert!((e.value - (2.0 * PI).sqrt()).abs() < 1e-11);
    }

    #[test]
    fn algebraic_tail() {
        let e = integrate_upper(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10);
        let e = integrate_lower(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, Tolerance::default()).unwrap();
        assert!((e.value - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn complex_oscillatory() {
        // ∫_0^{10} e^{i 7 x} dx = (e^{70 i} - 1)/(7 i)
        let e = integrate(
            |x: f64| Complex64::new(0.0, 7.0 * x).exp(),
            0.0,
            10.0,
            Tolerance::default(),
        )
        .unwrap();
        let exact = (Complex64::new(0.0, 70.0).exp() - 1.0) / Complex64::new(0.0, 7.0);
        assert!((e.value - exact).norm() < 1e-11);
    }

    #[test]
    fn sqrt_endpoint_singularity() {
        let e = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, Tolerance::new(1e-10, 0.0)).unwrap();
        assert!((e.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn divergent_reports_error() {
        let tol = Tolerance::new(1e-10, 0.0).with_max_intervals(200);
        let r = integrate(|x: f64| 1.0 / x, 0.0, 1.0, tol);
        assert!(matches!(r, Err(Error::Quadrature { .. })));
    }

    #[test]
    fn relative_tolerance_tiny_integral() {
        // ∫ e^{-(x-30)^2} over R is √π, scaled by 1e-200
        let d = Domain::Finite(uniform_points(0.0, 60.0, 1.0));
        let e = integrate_domain(
            |x: f64| 1e-200 * (-(x - 30.0).powi(2)).exp(),
            &d,
            Tolerance::relative(1e-13),
        )
        .unwrap();
        assert!((e.value / (1e-200 * PI.sqrt()) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_intersections() {
        let a = Domain::finite(-1.0, 1.0);
        let b = a.shifted(1.5);
        assert_eq!(a.intersect(&b), Some(Domain::finite(0.5, 1.0)));
        assert_eq!(a.intersect(&a.shifted(2.5)), None);
        let line = Domain::Line {
            points: vec![-2.0, 0.0, 2.0],
            scale: 1.0,
        };
        assert_eq!(line.intersect(&a), Some(Domain::Finite(vec![-1.0, 0.0, 1.0])));
    }

    #[test]
    fn geometric_breakpoints() {
        let p = geometric_points(1.0, 1000.0, 10.0);
        assert_eq!(p.len(), 4);
        assert_eq!(p[3], 1000.0);
    }
}
