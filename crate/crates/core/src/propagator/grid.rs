//! Uniform grids and the sizing rules used by both backends.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{ensure_positive, Error, Result};
use crate::mollifier::MollifierSpec;

pub const MIN_POINTS: usize = 16;
pub const MAX_POINTS: usize = 1 << 24;

/// Nodes `x_k = -L + kΔx`, `k = 0..N`, with `Δx = 2L/N` and `N` a power of two.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Grid1D {
    half_extent: f64,
    points: usize,
}

impl Grid1D {
    pub fn new(half_extent: f64, points: usize) -> Result<Self> {
        ensure_positive("grid half extent", half_extent)?;
        if points < MIN_POINTS || !points.is_power_of_two() {
            return Err(Error::Grid(format!(
                "grid needs a power of two ≥ {MIN_POINTS} points, got {points}"
            )));
        }
        Ok(Self { half_extent, points })
    }

    pub fn from_spacing(spacing: f64, points: usize) -> Result<Self> {
        ensure_positive("grid spacing", spacing)?;
        Self::new(0.5 * spacing * points as f64, points)
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_extent / self.points as f64
    }

    #[inline]
    pub fn node(&self, k: usize) -> f64 {
        -self.half_extent + k as f64 * self.spacing()
    }

    pub fn nodes(&self) -> impl ExactSizeIterator<Item = f64> + '_ {
        let dx = self.spacing();
        (0..self.points).map(move |k| -self.half_extent + k as f64 * dx)
    }

    /// Angular frequency of DFT bin `k` in FFT order.
    #[inline]
    pub fn frequency(&self, k: usize) -> f64 {
        let n = self.points as isize;
        let j = if (k as isize) < n / 2 {
            k as isize
        } else {
            k as isize - n
        };
        j as f64 * self.frequency_spacing()
    }

    pub fn frequency_spacing(&self) -> f64 {
        PI / self.half_extent
    }

    pub fn max_frequency(&self) -> f64 {
        PI / self.spacing()
    }

    /// Same extent, every `factor`-th node. Node `k` of the result is node
    /// `k·factor` of `self`.
    pub fn decimated(&self, factor: usize) -> Result<Self> {
        if factor == 0 || !factor.is_power_of_two() {
            return Err(Error::Grid(format!(
                "decimation factor must be a power of two, got {factor}"
            )));
        }
        Self::new(self.half_extent, self.points / factor)
    }
}

/// Knobs for the automatic grid choice.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridOptions {
    /// Spectral nodes per unit of ε; `Δx = ε / points_per_eps`.
    pub points_per_eps: usize,
    /// Kernel nodes per density length scale `max(ε, |t|/ε)`.
    pub kernel_points_per_scale: usize,
    /// Largest accepted a-priori estimate of the mass outside `[-L, L]`.
    pub tail_budget: f64,
    pub max_points: usize,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            points_per_eps: 8,
            kernel_points_per_scale: 16,
            tail_budget: 5e-7,
            max_points: MAX_POINTS,
        }
    }
}

/// A grid together with the tail estimate that justified it.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridPlan {
    pub grid: Grid1D,
    pub tail_estimate: f64,
}

/// Checks the spectral resolution requirements `Δx ≤ ε/8` and
/// `|t| ξ_max Δξ ≤ π/4`.
pub fn check_spectral(grid: &Grid1D, eps: f64, t: f64) -> Result<()> {
    let dx = grid.spacing();
    if dx > eps / 8.0 * (1.0 + 1e-12) {
        return Err(Error::Grid(format!(
            "Δx ≤ ε/8 violated: Δx = {dx:e}, ε/8 = {:e}",
            eps / 8.0
        )));
    }
    let phase = t.abs() * grid.max_frequency() * grid.frequency_spacing();
    if phase > PI / 4.0 * (1.0 + 1e-12) {
        return Err(Error::Grid(format!(
            "|t|·ξ_max·Δξ ≤ π/4 violated: {phase:e} > {:e}",
            PI / 4.0
        )));
    }
    Ok(())
}

/// A-priori estimate of the mass that `|u_ε(·, t)|²` puts outside
/// `[-L, L]`.
///
/// Mass reaching distance `R` from `a` either started at distance `> s` or
/// travelled `R - s` with group velocity `2ξ`, so it is estimated by the
/// position tail of ρ beyond `s/ε` plus the momentum tail of `ℱ√ρ` beyond
/// `ε(R - s)/(2|t|)`, minimised over a few splits `s`.
pub fn tail_estimate(spec: &MollifierSpec, eps: f64, t: f64, a: f64, half_extent: f64) -> Result<f64> {
    let r = half_extent - a.abs();
    if r <= 0.0 {
        return Ok(1.0);
    }
    if t == 0.0 {
        return Ok(spec.position_tail(-r / eps, r / eps)?.min(1.0));
    }
    let mut best = f64::INFINITY;
    for frac in [0.01, 0.03, 0.1, 0.2, 0.35, 0.5, 0.7, 0.9] {
        let s = frac * r;
        let pos = spec.position_tail(-s / eps, s / eps)?;
        if pos >= best {
            continue;
        }
        let mom = spec.momentum_tail(eps * (r - s) / (2.0 * t.abs()))?;
        best = best.min(pos + mom);
    }
    Ok(best.clamp(0.0, 1.0))
}

fn pow2_at_least(n: f64) -> usize {
    let n = n.ceil().max(MIN_POINTS as f64);
    if n >= (1u64 << 62) as f64 {
        return 1 << 62;
    }
    (n as usize).next_power_of_two()
}

fn grow_until_tail_fits(
    spec: &MollifierSpec,
    eps: f64,
    t: f64,
    a: f64,
    dx: f64,
    mut points: usize,
    opts: &GridOptions,
) -> Result<GridPlan> {
    loop {
        if points > opts.max_points {
            return Err(Error::Grid(format!(
                "more than {} points needed to keep the tail below {:e} (ε = {eps}, t = {t}, a = {a})",
                opts.max_points, opts.tail_budget
            )));
        }
        let grid = Grid1D::from_spacing(dx, points)?;
        let tail = tail_estimate(spec, eps, t, a, grid.half_extent())?;
        if tail <= opts.tail_budget {
            return Ok(GridPlan {
                grid,
                tail_estimate: tail,
            });
        }
        points *= 2;
    }
}

/// Grid for [`evolve_spectral`](super::evolve_spectral): `Δx = ε/8`, an
/// extent that covers the Gaussian-type rule `|a| + 10 max(ε, 10√|t|/ε)`
/// and the phase-resolution rule, doubled until the tail estimate fits.
pub fn plan_spectral(spec: &MollifierSpec, eps: f64, t: f64, a: f64, opts: &GridOptions) -> Result<GridPlan> {
    ensure_positive("epsilon", eps)?;
    if opts.points_per_eps < 8 {
        return Err(Error::Grid(format!(
            "points_per_eps = {} cannot satisfy Δx ≤ ε/8",
            opts.points_per_eps
        )));
    }
    let dx = eps / opts.points_per_eps as f64;
    let decay = a.abs() + 10.0 * eps.max(10.0 * t.abs().sqrt() / eps);
    let phase = 4.0 * PI * t.abs() / dx;
    let extent = decay.max(phase);
    grow_until_tail_fits(spec, eps, t, a, dx, pow2_at_least(2.0 * extent / dx), opts)
}

/// Grid for [`evolve_kernel`](super::evolve_kernel). The density varies on
/// the scale `max(ε, |t|/ε)`, which is much coarser than `ε` once the
/// packet has spread.
pub fn plan_kernel(spec: &MollifierSpec, eps: f64, t: f64, a: f64, opts: &GridOptions) -> Result<GridPlan> {
    ensure_positive("epsilon", eps)?;
    let scale = eps.max(t.abs() / eps);
    let target = scale / opts.kernel_points_per_scale as f64;
    let extent = a.abs() + 8.0 * scale;
    let points = pow2_at_least(2.0 * extent / target);
    let dx = 2.0 * extent / points as f64;
    grow_until_tail_fits(spec, eps, t, a, dx, points, opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_basics() {
        let g = Grid1D::new(8.0, 16).unwrap();
        assert_eq!(g.spacing(), 1.0);
        assert_eq!(g.node(0), -8.0);
        assert_eq!(g.nodes().last(), Some(7.0));
        assert_eq!(g.frequency(1), PI / 8.0);
        assert_eq!(g.frequency(15), -PI / 8.0);
        assert_eq!(g.frequency(8), -PI);
        assert!(Grid1D::new(8.0, 12).is_err());
        assert!(Grid1D::new(8.0, 8).is_err());
        assert!(Grid1D::new(0.0, 16).is_err());
        let d = g.decimated(4);
        assert!(d.is_err(), "4 points is below the minimum");
        let big = Grid1D::new(8.0, 64).unwrap().decimated(4).unwrap();
        assert_eq!(big.node(3), Grid1D::new(8.0, 64).unwrap().node(12));
    }

    #[test]
    fn spectral_check_names_the_violation() {
        let g = Grid1D::from_spacing(0.1, 1024).unwrap();
        match check_spectral(&g, 0.5, 0.0) {
            Err(Error::Grid(msg)) => assert!(msg.contains("ε/8")),
            other => panic!("unexpected {other:?}"),
        }
        match check_spectral(&g, 1.0, 1.0) {
            Err(Error::Grid(msg)) => assert!(msg.contains("π/4")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(check_spectral(&g, 1.0, 0.0).is_ok());
    }

    #[test]
    fn plans_satisfy_their_own_rules() {
        let opts = GridOptions::default();
        for spec in MollifierSpec::catalog() {
            for (eps, t) in [(0.5, 1.0), (0.1, 0.5)] {
                let p = plan_spectral(&spec, eps, t, 0.0, &opts).unwrap();
                check_spectral(&p.grid, eps, t).unwrap();
                assert!(p.tail_estimate <= opts.tail_budget, "{}", spec.label());
            }
        }
        let rc = MollifierSpec::raised_cosine();
        let p = plan_kernel(&rc, 0.2, 0.5, 0.0, &opts).unwrap();
        assert!(p.grid.spacing() <= 2.5 / 16.0);
        assert!(p.tail_estimate <= opts.tail_budget);
    }

    #[test]
    fn tail_estimate_shrinks_with_extent() {
        let rc = MollifierSpec::raised_cosine();
        let small = tail_estimate(&rc, 0.1, 1.0, 0.0, 50.0).unwrap();
        let large = tail_estimate(&rc, 0.1, 1.0, 0.0, 5000.0).unwrap();
        assert!(large < small && large < 1e-6);
        assert_eq!(tail_estimate(&rc, 0.1, 1.0, 60.0, 50.0).unwrap(), 1.0);
    }

    #[test]
    fn oversized_request_is_a_grid_error() {
        let opts = GridOptions {
            max_points: 1 << 12,
            ..GridOptions::default()
        };
        let rc = MollifierSpec::raised_cosine();
        assert!(matches!(plan_spectral(&rc, 0.05, 2.0, 0.0, &opts), Err(Error::Grid(_))));
    }
}
