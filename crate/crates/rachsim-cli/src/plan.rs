//! Experiment planning: CLI flags + optional config file → a validated plan.

use anyhow::{bail, Context, Result};
use clap::{Parser, ValueEnum};
use rachsim_core::analytic::{ReceiverModel, SchemeKind};
use rachsim_core::params::SystemParams;
use rachsim_core::sim::PdpMode;
use std::path::PathBuf;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Closed-form model only.
    Analytic,
    /// Monte Carlo simulation only.
    Simulate,
    /// Both engines plus per-cell tolerance checks (exit 2 on failure).
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Figure {
    /// Success probability vs slot at fixed device intensity.
    SuccessVsSlot,
    /// Success probability at the final slot vs device intensity.
    SuccessVsIntensity,
    /// Energy per delivered packet vs slot.
    EnergyVsSlot,
    /// Energy per delivered packet at the final slot vs device intensity.
    EnergyVsIntensity,
    /// Throughput vs slot.
    ThroughputVsSlot,
    /// Throughput at the final slot vs device intensity.
    ThroughputVsIntensity,
    /// No preset: emit every slot of the configured grid.
    None,
}

impl Figure {
    fn is_intensity_sweep(self) -> bool {
        matches!(
            self,
            Figure::SuccessVsIntensity | Figure::EnergyVsIntensity | Figure::ThroughputVsIntensity
        )
    }
}

/// Evaluates the four access schemes with a closed-form model and an
/// independent Monte Carlo simulator, and cross-validates the two.
///
/// Results are a CSV table with one row per
/// (scheme, receiver, lambda_dp, slot, engine) cell; see the README for the
/// column contract. Exit codes: 0 success, 1 usage error, 2 comparison
/// failure, 3 I/O error.
#[derive(Debug, Parser)]
#[command(name = "rachsim", version, max_term_width = 100)]
pub struct Cli {
    /// Which engine(s) to run.
    #[arg(long, value_enum, default_value = "analytic")]
    pub mode: Mode,

    /// Scheme to evaluate (repeatable): 4step, 4stepSDT, 2step, 2stepSDT.
    /// Defaults to all four.
    #[arg(long = "scheme")]
    pub schemes: Vec<SchemeKind>,

    /// Receiver model (repeatable): advanced, basic. Defaults to advanced.
    #[arg(long = "receiver")]
    pub receivers: Vec<ReceiverModel>,

    /// Device intensity per preamble: a single value ("5") or an inclusive
    /// range "start:stop:step" ("1:10:1").
    #[arg(long = "lambda-dp")]
    pub lambda_dp: Option<String>,

    /// Number of RACH slots to evolve.
    #[arg(long)]
    pub slots: Option<u32>,

    /// Monte Carlo replications per cell (simulate/compare).
    #[arg(long = "reps", default_value_t = 1_000)]
    pub replications: u32,

    /// Root seed for the simulation streams.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// TOML config file with system parameters (flat keys, e.g. rho_dbm).
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory for results.csv (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Figure preset fixing the sweep axes.
    #[arg(long, value_enum, default_value = "none")]
    pub figure: Figure,

    /// PDP peak generation mode for the simulator.
    #[arg(long = "pdp-mode", default_value = "distributional", value_parser = parse_pdp)]
    pub pdp_mode: PdpMode,

    /// Absolute tolerance on success probability in compare mode.
    #[arg(long = "tol-success", default_value_t = 0.02)]
    pub tol_success: f64,

    /// Relative tolerance on energy per packet in compare mode.
    #[arg(long = "tol-energy", default_value_t = 0.05)]
    pub tol_energy: f64,

    /// Relative tolerance on throughput in compare mode.
    #[arg(long = "tol-throughput", default_value_t = 0.05)]
    pub tol_throughput: f64,

    /// Write raw per-replication slot tallies as JSON lines.
    #[arg(long = "dump-tallies")]
    pub dump_tallies: Option<PathBuf>,
}

fn parse_pdp(s: &str) -> Result<PdpMode, String> {
    s.parse()
}

/// Which slots of the evolved horizon are reported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportSlots {
    All,
    LastOnly,
}

/// Fully resolved experiment description.
#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub mode: Mode,
    pub schemes: Vec<SchemeKind>,
    pub receivers: Vec<ReceiverModel>,
    pub lambda_grid: Vec<f64>,
    pub slots: u32,
    pub replications: u32,
    pub seed: u64,
    pub params: SystemParams,
    pub pdp_mode: PdpMode,
    pub report: ReportSlots,
    pub out: Option<PathBuf>,
    pub dump_tallies: Option<PathBuf>,
    pub tol_success: f64,
    pub tol_energy: f64,
    pub tol_throughput: f64,
}

impl ExperimentPlan {
    /// Resolves flags, config file, and figure preset into a plan.
    /// `config_text` is the raw config contents when --config was given.
    pub fn resolve(cli: &Cli, config_text: Option<&str>) -> Result<ExperimentPlan> {
        let params = match config_text {
            Some(text) => SystemParams::from_toml_str(text).context("invalid config file")?,
            None => SystemParams::defaults(),
        };

        let schemes =
            if cli.schemes.is_empty() { SchemeKind::ALL.to_vec() } else { cli.schemes.clone() };
        let receivers = if cli.receivers.is_empty() {
            vec![ReceiverModel::Advanced]
        } else {
            cli.receivers.clone()
        };

        let lambda_grid = match (&cli.lambda_dp, cli.figure.is_intensity_sweep()) {
            (Some(spec), _) => parse_lambda_grid(spec)?,
            (None, true) => (1..=10).map(f64::from).collect(),
            (None, false) => vec![params.lambda_dp],
        };
        if lambda_grid.is_empty() {
            bail!("empty device-intensity grid");
        }

        let slots = cli.slots.unwrap_or(10);
        if slots == 0 {
            bail!("--slots must be at least 1");
        }
        if cli.replications == 0 && cli.mode != Mode::Analytic {
            bail!("--reps must be at least 1 in simulate/compare mode");
        }
        if cli.dump_tallies.is_some() && cli.mode == Mode::Analytic {
            bail!("--dump-tallies requires simulate or compare mode");
        }
        for tol in [cli.tol_success, cli.tol_energy, cli.tol_throughput] {
            if tol <= 0.0 || tol.is_nan() {
                bail!("tolerances must be positive");
            }
        }

        let report = if cli.figure.is_intensity_sweep() {
            ReportSlots::LastOnly
        } else {
            ReportSlots::All
        };

        Ok(ExperimentPlan {
            mode: cli.mode,
            schemes,
            receivers,
            lambda_grid,
            slots,
            replications: cli.replications,
            seed: cli.seed,
            params,
            pdp_mode: cli.pdp_mode,
            report,
            out: cli.out.clone(),
            dump_tallies: cli.dump_tallies.clone(),
            tol_success: cli.tol_success,
            tol_energy: cli.tol_energy,
            tol_throughput: cli.tol_throughput,
        })
    }
}

/// Parses "x" or "start:stop:step" into an inclusive grid.
fn parse_lambda_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let parse = |s: &str| -> Result<f64> {
        let v: f64 = s.trim().parse().with_context(|| format!("bad number `{s}` in --lambda-dp"))?;
        if !v.is_finite() {
            bail!("non-finite value in --lambda-dp");
        }
        Ok(v)
    };
    match parts.as_slice() {
        [one] => {
            let v = parse(one)?;
            if v <= 0.0 {
                bail!("--lambda-dp must be positive");
            }
            Ok(vec![v])
        }
        [start, stop, step] => {
            let (start, stop, step) = (parse(start)?, parse(stop)?, parse(step)?);
            if step <= 0.0 || stop < start || start <= 0.0 {
                bail!("malformed --lambda-dp range `{spec}` (need 0 < start ≤ stop, step > 0)");
            }
            let mut grid = Vec::new();
            let mut i = 0u32;
            loop {
                let v = start + step * i as f64;
                if v > stop + 1e-9 {
                    break;
                }
                grid.push(v);
                i += 1;
            }
            Ok(grid)
        }
        _ => bail!("malformed --lambda-dp `{spec}` (expected `x` or `start:stop:step`)"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_grid_forms() {
        assert_eq!(parse_lambda_grid("5").unwrap(), vec![5.0]);
        assert_eq!(
            parse_lambda_grid("1:10:1").unwrap(),
            (1..=10).map(f64::from).collect::<Vec<_>>()
        );
        assert_eq!(parse_lambda_grid("2:3:0.5").unwrap(), vec![2.0, 2.5, 3.0]);
        assert!(parse_lambda_grid("10:1:1").is_err());
        assert!(parse_lambda_grid("1:10:0").is_err());
        assert!(parse_lambda_grid("a:b:c").is_err());
        assert!(parse_lambda_grid("1:2:3:4").is_err());
        assert!(parse_lambda_grid("-5").is_err());
    }

    #[test]
    fn figure_presets_shape_the_plan() {
        let cli = Cli::parse_from(["rachsim", "--figure", "success_vs_intensity"]);
        let plan = ExperimentPlan::resolve(&cli, None).unwrap();
        assert_eq!(plan.slots, 10);
        assert_eq!(plan.report, ReportSlots::LastOnly);
        assert_eq!(plan.lambda_grid.len(), 10);

        let cli = Cli::parse_from(["rachsim", "--figure", "success_vs_slot"]);
        let plan = ExperimentPlan::resolve(&cli, None).unwrap();
        assert_eq!(plan.report, ReportSlots::All);
        assert_eq!(plan.lambda_grid, vec![5.0]);
    }

    #[test]
    fn defaults_cover_all_schemes_single_receiver() {
        let cli = Cli::parse_from(["rachsim"]);
        let plan = ExperimentPlan::resolve(&cli, None).unwrap();
        assert_eq!(plan.schemes.len(), 4);
        assert_eq!(plan.receivers, vec![ReceiverModel::Advanced]);
    }

    #[test]
    fn config_lambda_feeds_default_grid() {
        let cli = Cli::parse_from(["rachsim"]);
        let plan = ExperimentPlan::resolve(&cli, Some("lambda_dp = 7.0\n")).unwrap();
        assert_eq!(plan.lambda_grid, vec![7.0]);
        // Explicit flag wins over the config value.
        let cli = Cli::parse_from(["rachsim", "--lambda-dp", "3"]);
        let plan = ExperimentPlan::resolve(&cli, Some("lambda_dp = 7.0\n")).unwrap();
        assert_eq!(plan.lambda_grid, vec![3.0]);
    }
}
