//! Command-line front end: flags and TOML configs resolve to a [`RunConfig`],
//! each subcommand runs one estimator or exact computation and renders a
//! deterministic JSON or CSV report.

mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

pub use commands::Outcome;
pub use config::{Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "heightlab", version, about = "Height-based positivity experiments on model varieties")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Exact cone tests next to the empirical fraction-limit label.
    Classify,
    /// Windowed fraction limit of h_E over h_D.
    Flim,
    /// Empirical numerical equivalence of --divisor and --versus.
    Equiv,
    /// Whether h_D is bounded above and/or below.
    Probe,
    /// Height expansion coefficient of a map and its exact upper bound.
    Mu,
    /// Certified canonical height of a curve point.
    Canonical,
    /// Region points up to the coordinate bound.
    Enumerate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Flim => "flim",
            Command::Equiv => "equiv",
            Command::Probe => "probe",
            Command::Mu => "mu",
            Command::Canonical => "canonical",
            Command::Enumerate => "enumerate",
        }
    }
}

/// Flags override values from `--config`.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML run config; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub model: Option<String>,
    /// Class vector, e.g. `1,-1`; on the elliptic model `d`, `d,O` or `d,x,y`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub divisor: Option<String>,
    /// Point component of --divisor (elliptic), or the point for `canonical`.
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub point: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub ample: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub versus: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub versus_point: Option<String>,
    /// Named curves removed from the region; repeat or separate by commas.
    #[arg(long, global = true, value_delimiter = ',')]
    pub exclude: Vec<String>,
    /// Coordinate bound, or box radius on the elliptic model.
    #[arg(long, global = true)]
    pub bound: Option<u64>,
    #[arg(long, global = true)]
    pub windows: Option<usize>,
    #[arg(long, global = true)]
    pub min_threshold: Option<f64>,
    /// Last threshold; defaults to the height horizon of the sample.
    #[arg(long, global = true)]
    pub height_bound: Option<f64>,
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Curve config file; implies `--model elliptic`.
    #[arg(long, global = true)]
    pub curve: Option<PathBuf>,
    #[arg(long, global = true)]
    pub map: Option<String>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub target_ample: Option<String>,
    /// Amplitude of the bounded perturbation of every height, at most 1.
    #[arg(long, global = true)]
    pub noise: Option<f64>,
    #[arg(long, global = true)]
    pub count_only: bool,
    /// Forbid randomized code paths. No command has one; recorded in reports.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    pub seedless: Option<bool>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write (height, ratio) pairs as CSV to this path.
    #[arg(long, global = true)]
    pub emit_plot_data: Option<PathBuf>,
}

impl Flags {
    pub fn apply(&self, cfg: &mut RunConfig) {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                slot.clone_from(v);
            }
        }
        set(&mut cfg.model, &self.model);
        set(&mut cfg.divisor, &self.divisor);
        set(&mut cfg.point, &self.point);
        set(&mut cfg.ample, &self.ample);
        set(&mut cfg.versus, &self.versus);
        set(&mut cfg.versus_point, &self.versus_point);
        if !self.exclude.is_empty() {
            cfg.exclude.clone_from(&self.exclude);
        }
        set(&mut cfg.bound, &self.bound);
        if let Some(w) = self.windows {
            cfg.windows = w;
        }
        if let Some(t) = self.min_threshold {
            cfg.min_threshold = t;
        }
        set(&mut cfg.height_bound, &self.height_bound);
        set(&mut cfg.tol, &self.tol);
        set(&mut cfg.curve, &self.curve);
        set(&mut cfg.map, &self.map);
        set(&mut cfg.target_ample, &self.target_ample);
        if let Some(n) = self.noise {
            cfg.noise = n;
        }
        if self.count_only {
            cfg.count_only = true;
        }
        if let Some(s) = self.seedless {
            cfg.seedless = s;
        }
        if let Some(f) = self.format {
            cfg.format = f;
        }
        set(&mut cfg.out, &self.out);
        set(&mut cfg.emit_plot_data, &self.emit_plot_data);
    }

    /// The config file, if any, with these flags applied on top.
    pub fn to_config(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        self.apply(&mut cfg);
        Ok(cfg)
    }
}

/// Runs a resolved command. Exit codes other than 0 that are not errors
/// come back in the outcome: classify disagreement (3), indeterminate
/// classify or inconclusive probe (2).
pub fn execute(command: Command, cfg: RunConfig) -> Result<(RunConfig, Outcome)> {
    let cfg = cfg.resolve(command.name())?;
    let outcome = match command {
        Command::Classify => commands::classify(&cfg)?,
        Command::Flim => commands::flim(&cfg)?,
        Command::Equiv => commands::equiv(&cfg)?,
        Command::Probe => commands::probe(&cfg)?,
        Command::Mu => commands::mu(&cfg)?,
        Command::Canonical => commands::canonical(&cfg)?,
        Command::Enumerate => commands::enumerate(&cfg)?,
    };
    Ok((cfg, outcome))
}

/// 4 for convergence failures, 2 for unsupported or inconclusive runs, 1
/// for everything else (bad input or configuration).
pub fn exit_code(err: &anyhow::Error) -> i32 {
    use heightlab::Error;
    match err.downcast_ref::<Error>() {
        Some(Error::ConvergenceFailure(_)) => 4,
        Some(Error::Unsupported(_) | Error::Inconclusive(_)) => 2,
        _ => 1,
    }
}

pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("HEIGHTLAB_THREADS") {
        let n: usize = v
            .trim()
            .parse()
            .map_err(|e| anyhow::anyhow!("HEIGHTLAB_THREADS={v}: {e}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

/// Parses arguments, runs, writes the report, and returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let run = || -> Result<i32> {
        configure_threads()?;
        let (cfg, outcome) = execute(cli.command, cli.flags.to_config()?)?;
        output::write_text(&outcome.report, cfg.out.as_deref())?;
        Ok(outcome.code)
    };
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("heightlab").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_after_subcommand() {
        let cli = parse(&["classify", "--model", "p1xp1", "--divisor", "1,-1", "--ample", "1,1"]);
        assert_eq!(cli.command, Command::Classify);
        let cfg = cli.flags.to_config().unwrap();
        assert_eq!(cfg.divisor.as_deref(), Some("1,-1"));
        assert!(cfg.seedless);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, "model = \"p1xp1\"\nbound = 40\nexclude = [\"F1\"]\n").unwrap();
        let cli = parse(&["flim", "--config", path.to_str().unwrap(), "--bound", "60", "--divisor", "1,0"]);
        let cfg = cli.flags.to_config().unwrap();
        assert_eq!(cfg.model.as_deref(), Some("p1xp1"));
        assert_eq!(cfg.bound, Some(60));
        assert_eq!(cfg.exclude, vec!["F1".to_string()]);
    }

    #[test]
    fn negative_vectors_parse() {
        let cli = parse(&["flim", "--divisor", "-1,2", "--exclude", "E,L"]);
        assert_eq!(cli.flags.divisor.as_deref(), Some("-1,2"));
        assert_eq!(cli.flags.exclude, vec!["E".to_string(), "L".to_string()]);
    }

    #[test]
    fn error_codes() {
        let conv = anyhow::Error::from(heightlab::Error::ConvergenceFailure("x".into()));
        assert_eq!(exit_code(&conv), 4);
        let un = anyhow::Error::from(heightlab::Error::Unsupported("x".into())).context("while running");
        assert_eq!(exit_code(&un), 2);
        assert_eq!(exit_code(&anyhow::anyhow!("bad flag")), 1);
    }
}
