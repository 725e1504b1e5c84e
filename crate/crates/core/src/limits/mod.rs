//! Experiment drivers for the small-ε limits of the evolved densities.

mod cluster;
mod counterexample;
mod scan;
mod sweep;

pub use cluster::{
    cluster_epsilon, cluster_experiment, cluster_sequence, cluster_target, gamma_constant, log_oscillation_pairing,
    ClusterConfig, ClusterOutcome, ClusterRecord, ClusterTerm, GammaReport, GAMMA_TOLERANCE,
};
pub use counterexample::{
    counterexample_limit, counterexample_report, ft_regularized_density, smoothed_density, CounterexampleReport,
    RegularizedValue,
};
pub use scan::{blum_eisenberg_scan, InitialMeasure, ScanRow, ScanTable, ScanVerdict, SCAN_THRESHOLD};
pub use sweep::{epsilon_sweep, predicted_limit, sweep_verdict, SweepOptions, SweepOutcome, SweepRecord, Verdict};
