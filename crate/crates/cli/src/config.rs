//! TOML experiment configuration. Every field is optional; missing values
//! are filled with per-experiment defaults and the resolved form is echoed
//! into the manifest.

use std::f64::consts::PI;
use std::path::PathBuf;

use bohrlab_core::limits::ClusterConfig;
use bohrlab_core::{BackendChoice, GridOptions, MollifierSpec, TestFunction};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Evolve,
    Pair,
    Sweep,
    Cluster,
    Ftscan,
    Counterexample,
    Verify,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Evolve => "evolve",
            Experiment::Pair => "pair",
            Experiment::Sweep => "sweep",
            Experiment::Cluster => "cluster",
            Experiment::Ftscan => "ftscan",
            Experiment::Counterexample => "counterexample",
            Experiment::Verify => "verify",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MollifierName {
    Gaussian,
    RaisedCosine,
    RationalDecay,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct MollifierConfig {
    pub kind: MollifierName,
    /// Decay exponent, rational kind only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
}

impl MollifierConfig {
    fn named(kind: MollifierName) -> Self {
        Self { kind, m: None }
    }

    pub fn build(&self) -> Result<MollifierSpec, String> {
        match (self.kind, self.m) {
            (MollifierName::Gaussian, None) => Ok(MollifierSpec::gaussian()),
            (MollifierName::RaisedCosine, None) => Ok(MollifierSpec::raised_cosine()),
            (MollifierName::RationalDecay, Some(m)) => MollifierSpec::rational_decay(m).map_err(|e| e.to_string()),
            (MollifierName::RationalDecay, None) => Err("rational_decay needs an exponent `m`".into()),
            (_, Some(_)) => Err("`m` only applies to rational_decay".into()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TestFnConfig {
    HalfTanh,
    Tanh,
    Bump {
        center: f64,
        radius: f64,
    },
    Character {
        xi: f64,
    },
    Constant {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// `terms = [[ξ, re, im], ...]`.
    Trig {
        terms: Vec<[f64; 3]>,
    },
    LogOscillation,
}

impl TestFnConfig {
    pub fn build(&self) -> Result<TestFunction, String> {
        let f = match self {
            TestFnConfig::HalfTanh => TestFunction::half_tanh(),
            TestFnConfig::Tanh => TestFunction::tanh(),
            TestFnConfig::Bump { center, radius } => TestFunction::bump(*center, *radius).map_err(|e| e.to_string())?,
            TestFnConfig::Character { xi } => TestFunction::character(*xi),
            TestFnConfig::Constant { re, im } => TestFunction::constant(Complex64::new(*re, *im)),
            TestFnConfig::Trig { terms } => TestFunction::trig(
                terms
                    .iter()
                    .map(|[xi, re, im]| (*xi, Complex64::new(*re, *im)))
                    .collect(),
            )
            .map_err(|e| e.to_string())?,
            TestFnConfig::LogOscillation => TestFunction::LogOscillation,
        };
        Ok(f)
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureConfig {
    /// `δ_a`; the shift defaults to the top-level `a`.
    Dirac {
        #[serde(default)]
        a: Option<f64>,
    },
    /// `h·dx`.
    Density { h: MollifierConfig },
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct ClusterSection {
    pub alpha: f64,
    pub n_max: u32,
}

impl Default for ClusterSection {
    fn default() -> Self {
        Self { alpha: 0.0, n_max: 2 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendName {
    #[default]
    Auto,
    Spectral,
    Kernel,
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSection {
    pub backend: BackendName,
    pub points_per_eps: usize,
    pub kernel_points_per_scale: usize,
    pub tail_budget: f64,
    pub max_points: usize,
}

impl Default for GridSection {
    fn default() -> Self {
        let g = GridOptions::default();
        Self {
            backend: BackendName::Auto,
            points_per_eps: g.points_per_eps,
            kernel_points_per_scale: g.kernel_points_per_scale,
            tail_budget: g.tail_budget,
            max_points: g.max_points,
        }
    }
}

impl GridSection {
    pub fn options(&self) -> GridOptions {
        GridOptions {
            points_per_eps: self.points_per_eps,
            kernel_points_per_scale: self.kernel_points_per_scale,
            tail_budget: self.tail_budget,
            max_points: self.max_points,
        }
    }

    pub fn backend(&self) -> BackendChoice {
        match self.backend {
            BackendName::Auto => BackendChoice::Auto,
            BackendName::Spectral => BackendChoice::Spectral,
            BackendName::Kernel => BackendChoice::Kernel,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Final sweep deviation accepted as converged.
    pub sweep_threshold: f64,
    /// Deviations below this count as converged in the monotonicity test.
    pub floor: f64,
    /// `|ℱμ|` below this at the smallest ε counts as decayed.
    pub scan_threshold: f64,
    /// Cluster deviation at the last admissible n.
    pub cluster_threshold: f64,
    /// Finite-ε vs limit functional at the smallest ε.
    pub counterexample_tolerance: f64,
    /// `|captured + tail estimate − 1|` in evolve runs.
    pub mass_tolerance: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            sweep_threshold: 0.02,
            floor: 1e-12,
            scan_threshold: 1e-3,
            cluster_threshold: 1e-2,
            counterexample_tolerance: 1e-3,
            mass_tolerance: 1e-6,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Converged,
    Diverged,
    Inconclusive,
    HaarConvergent,
    NotHaarConvergent,
}

#[derive(Clone, Debug, Default, PartialEq, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
    /// File name stem; defaults to the experiment name.
    pub prefix: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    experiment: Experiment,
    t: Option<f64>,
    a: Option<f64>,
    eps: Option<Vec<f64>>,
    xi: Option<Vec<f64>>,
    expect: Option<Expect>,
    mollifier: Option<MollifierConfig>,
    test_function: Option<TestFnConfig>,
    cluster: Option<ClusterSection>,
    measure: Option<MeasureConfig>,
    #[serde(default)]
    grid: GridSection,
    #[serde(default)]
    tolerances: Tolerances,
    #[serde(default)]
    output: OutputSection,
}

/// A configuration with every default resolved.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Config {
    pub experiment: Experiment,
    pub t: f64,
    pub a: f64,
    pub eps: Vec<f64>,
    pub xi: Vec<f64>,
    pub expect: Option<Expect>,
    pub mollifier: MollifierConfig,
    pub test_function: TestFnConfig,
    pub cluster: ClusterSection,
    pub measure: MeasureConfig,
    pub grid: GridSection,
    pub tolerances: Tolerances,
    pub output_dir: PathBuf,
    pub prefix: String,
}

pub fn parse(text: &str) -> Result<Config, String> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| e.to_string())?;
    resolve(raw)
}

fn resolve(raw: RawConfig) -> Result<Config, String> {
    use Experiment::*;
    let e = raw.experiment;
    let default_eps: &[f64] = match e {
        Evolve => &[0.5, 0.1],
        Pair | Sweep => &[0.3, 0.1, 0.03, 0.01],
        Ftscan => &[0.5, 0.2, 0.1, 0.05],
        Counterexample => &[0.1, 0.03, 0.01],
        Cluster | Verify => &[],
    };
    let default_xi: &[f64] = match e {
        Ftscan => &[-2.0, -1.0, -0.5, 0.5, 1.0, 2.0],
        Counterexample => &[0.5],
        _ => &[],
    };
    let default_mollifier = match e {
        Counterexample => MollifierName::RaisedCosine,
        _ => MollifierName::Gaussian,
    };
    let a = raw.a.unwrap_or(0.0);
    let measure = match raw.measure.unwrap_or(MeasureConfig::Dirac { a: None }) {
        MeasureConfig::Dirac { a: shift } => MeasureConfig::Dirac {
            a: Some(shift.unwrap_or(a)),
        },
        m => m,
    };
    let config = Config {
        experiment: e,
        t: raw.t.unwrap_or(1.0),
        a,
        eps: raw.eps.unwrap_or_else(|| default_eps.to_vec()),
        xi: raw.xi.unwrap_or_else(|| default_xi.to_vec()),
        expect: raw.expect,
        mollifier: raw.mollifier.unwrap_or(MollifierConfig::named(default_mollifier)),
        test_function: raw.test_function.unwrap_or(TestFnConfig::HalfTanh),
        cluster: raw.cluster.unwrap_or_default(),
        measure,
        grid: raw.grid,
        tolerances: raw.tolerances,
        output_dir: raw.output.dir.unwrap_or_else(|| PathBuf::from("out")),
        prefix: raw.output.prefix.unwrap_or_else(|| e.name().to_string()),
    };
    config.validate()?;
    Ok(config)
}

impl Config {
    fn validate(&self) -> Result<(), String> {
        use Experiment::*;
        let e = self.experiment;
        if !self.t.is_finite() || (self.t == 0.0 && e != Evolve && e != Verify) {
            return Err(format!("t must be finite and nonzero, got {}", self.t));
        }
        if !self.a.is_finite() {
            return Err(format!("a must be finite, got {}", self.a));
        }
        if matches!(e, Evolve | Pair | Sweep | Ftscan | Counterexample) {
            if self.eps.is_empty() || self.eps.iter().any(|x| !(x.is_finite() && *x > 0.0)) {
                return Err(format!(
                    "eps must be a nonempty list of positive numbers: {:?}",
                    self.eps
                ));
            }
            if e != Evolve && self.eps.windows(2).any(|w| w[1] >= w[0]) {
                return Err(format!("eps must be strictly decreasing: {:?}", self.eps));
            }
        }
        if matches!(e, Ftscan | Counterexample) {
            if self.xi.is_empty() || self.xi.iter().any(|x| !x.is_finite()) {
                return Err(format!("xi must be a nonempty list of finite numbers: {:?}", self.xi));
            }
            if e == Ftscan && self.xi.contains(&0.0) {
                return Err("xi must exclude 0 for ftscan".into());
            }
        }
        if e == Cluster {
            if self.mollifier.kind != MollifierName::Gaussian {
                return Err("the cluster experiment is defined for the gaussian mollifier".into());
            }
            ClusterConfig::new(self.cluster.alpha, self.t, self.cluster.n_max).map_err(|e| e.to_string())?;
        }
        if !(0.0..2.0 * PI).contains(&self.cluster.alpha) {
            return Err(format!("cluster.alpha must lie in [0, 2π), got {}", self.cluster.alpha));
        }
        let expect_ok = match (e, self.expect) {
            (_, None) => true,
            (Sweep, Some(x)) => matches!(x, Expect::Converged | Expect::Diverged | Expect::Inconclusive),
            (Ftscan, Some(x)) => matches!(x, Expect::HaarConvergent | Expect::NotHaarConvergent),
            _ => false,
        };
        if !expect_ok {
            return Err(format!(
                "expect = {:?} does not apply to {}",
                self.expect.unwrap(),
                e.name()
            ));
        }
        let g = &self.grid;
        if g.points_per_eps < 8
            || g.kernel_points_per_scale == 0
            || g.tail_budget.is_nan()
            || g.tail_budget <= 0.0
            || g.max_points < 16
        {
            return Err(
                "grid: points_per_eps ≥ 8, kernel_points_per_scale ≥ 1, tail_budget > 0, max_points ≥ 16".into(),
            );
        }
        let tol = &self.tolerances;
        for (name, v) in [
            ("sweep_threshold", tol.sweep_threshold),
            ("scan_threshold", tol.scan_threshold),
            ("cluster_threshold", tol.cluster_threshold),
            ("counterexample_tolerance", tol.counterexample_tolerance),
            ("mass_tolerance", tol.mass_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("tolerances.{name} must be positive, got {v}"));
            }
        }
        if tol.floor.is_nan() || tol.floor < 0.0 {
            return Err(format!("tolerances.floor must be nonnegative, got {}", tol.floor));
        }
        self.mollifier.build()?;
        if matches!(e, Pair | Sweep) {
            self.test_function.build()?;
        }
        if let MeasureConfig::Density { h } = &self.measure {
            h.build()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_defaults() {
        let c = parse("experiment = \"sweep\"").unwrap();
        assert_eq!(c.eps, vec![0.3, 0.1, 0.03, 0.01]);
        assert_eq!(c.t, 1.0);
        assert_eq!(c.test_function, TestFnConfig::HalfTanh);
        assert_eq!(c.mollifier.kind, MollifierName::Gaussian);
        assert_eq!(c.prefix, "sweep");
    }

    #[test]
    fn sections_parse() {
        let c = parse(
            r#"
            experiment = "ftscan"
            t = 0.5
            eps = [0.4, 0.2]
            xi = [1.0, -1.0]
            expect = "not_haar_convergent"
            [mollifier]
            kind = "raised_cosine"
            [measure]
            kind = "density"
            h = { kind = "raised_cosine" }
            [grid]
            backend = "kernel"
            [output]
            prefix = "dens"
            "#,
        )
        .unwrap();
        assert_eq!(c.grid.backend, BackendName::Kernel);
        assert_eq!(c.expect, Some(Expect::NotHaarConvergent));
        assert!(matches!(c.measure, MeasureConfig::Density { .. }));
        assert_eq!(c.prefix, "dens");
    }

    #[test]
    fn trig_terms() {
        let c = parse(
            r#"
            experiment = "sweep"
            [test_function]
            kind = "trig"
            terms = [[0.0, 2.0, 0.0], [3.0, 0.0, 1.0]]
            "#,
        )
        .unwrap();
        let f = c.test_function.build().unwrap();
        assert_eq!(
            bohrlab_core::limits::predicted_limit(&f),
            Some(Complex64::new(2.0, 0.0))
        );
    }

    #[test]
    fn dirac_shift_inherits_top_level_a() {
        let c = parse("experiment = \"ftscan\"\na = 5.0").unwrap();
        assert_eq!(c.measure, MeasureConfig::Dirac { a: Some(5.0) });
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "experiment = \"sweep\"\neps = [0.1, 0.3]",
            "experiment = \"sweep\"\nt = 0.0",
            "experiment = \"sweep\"\nunknown = 1",
            "experiment = \"ftscan\"\nxi = [0.0, 1.0]",
            "experiment = \"cluster\"\n[cluster]\nalpha = 7.0",
            "experiment = \"sweep\"\n[mollifier]\nkind = \"rational_decay\"",
            "experiment = \"sweep\"\nexpect = \"haar_convergent\"",
            "experiment = \"nonsense\"",
            "experiment = \"sweep\"\n[grid]\npoints_per_eps = 4",
        ] {
            assert!(parse(text).is_err(), "accepted: {text}");
        }
    }
}
