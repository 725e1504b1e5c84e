mod config;
mod run;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use bohrlab_core::Error;
use clap::Parser;
use serde_json::json;

use crate::config::{Config, Experiment};

/// Runs one experiment described by a TOML file and writes CSV tables plus a
/// JSON manifest. Exit status: 0 verdict pass, 1 verdict fail, 2 bad
/// configuration or I/O failure.
#[derive(Debug, Parser)]
#[command(name = "bohrlab", version)]
struct Args {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output.dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for independent cells (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// Reserved. Every computation is deterministic; the value is only
    /// recorded in the manifest.
    #[arg(long)]
    seed: Option<u64>,
    /// Also write downsampled tables sized for plotting.
    #[arg(long)]
    emit_plot_data: bool,
}

enum Failure {
    Config(String),
    Io(String),
    Run(Error),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Config(_) | Failure::Io(_) => 2,
            Failure::Run(Error::Config(_) | Error::Domain(_) | Error::NoRoot(_) | Error::PropertyViolation(_)) => 2,
            Failure::Run(_) => 1,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Run(e) => write!(f, "run failed: {e}"),
        }
    }
}

fn io_err(path: &Path) -> impl Fn(std::io::Error) -> Failure + '_ {
    move |e| Failure::Io(format!("{}: {e}", path.display()))
}

fn main() -> ExitCode {
    let args = Args::parse();
    match execute(&args) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(f) => {
            eprintln!("bohrlab: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}

fn execute(args: &Args) -> Result<bool, Failure> {
    let text = fs::read_to_string(&args.config).map_err(io_err(&args.config))?;
    let mut cfg: Config = config::parse(&text).map_err(Failure::Config)?;
    if let Some(dir) = &args.out {
        cfg.output_dir = dir.clone();
    }
    if let Some(jobs) = args.jobs {
        if jobs == 0 {
            return Err(Failure::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Failure::Config(e.to_string()))?;
    }
    fs::create_dir_all(&cfg.output_dir).map_err(io_err(&cfg.output_dir))?;

    let start = Instant::now();
    let out = run::run(&cfg).map_err(Failure::Run)?;
    let wall = start.elapsed().as_secs_f64();

    let mut written = Vec::new();
    let mut tables: Vec<_> = out.tables.iter().collect();
    if args.emit_plot_data {
        tables.extend(out.plot_tables.iter());
    }
    for (suffix, table) in tables {
        let name = format!("{}{suffix}.csv", cfg.prefix);
        let path = cfg.output_dir.join(&name);
        fs::write(&path, table.render()).map_err(io_err(&path))?;
        written.push(name);
    }
    if cfg.experiment == Experiment::Verify {
        print!("{}", out.tables[0].1.render());
    }

    let manifest = json!({
        "tool": "bohrlab",
        "version": env!("CARGO_PKG_VERSION"),
        "experiment": cfg.experiment,
        "config": &cfg,
        "tolerances": &cfg.tolerances,
        "seed": args.seed,
        "jobs": args.jobs.unwrap_or_else(rayon::current_num_threads),
        "verdict": out.verdict,
        "pass": out.pass,
        "summary": out.summary,
        "outputs": written,
        "wall_time_s": wall,
    });
    let path = cfg.output_dir.join(format!("{}_manifest.json", cfg.prefix));
    let body = serde_json::to_string_pretty(&manifest).expect("manifest is plain data");
    fs::write(&path, body + "\n").map_err(io_err(&path))?;

    println!(
        "{}: verdict {} ({}) in {wall:.2} s, outputs in {}",
        cfg.experiment.name(),
        out.verdict,
        if out.pass { "pass" } else { "fail" },
        cfg.output_dir.display()
    );
    Ok(out.pass)
}
