//! rachsim: analytic and Monte Carlo sweeps over the four access schemes,
//! with cross-validation and plot-ready CSV output.

mod output;
mod plan;

use anyhow::{Context, Result};
use clap::Parser;
use output::{Engine, Row};
use plan::{Cli, ExperimentPlan, Mode, ReportSlots};
use rachsim_core::analytic::evolve;
use rachsim_core::sim::{run_with_outcomes, SimConfig};
use std::io::Write;
use std::process::ExitCode;

const EXIT_USAGE: u8 = 1;
const EXIT_COMPARE: u8 = 2;
const EXIT_IO: u8 = 3;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            eprint!("{e}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(e) => {
            // --help / --version
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };

    let config_text = match &cli.config {
        Some(path) => match std::fs::read_to_string(path) {
            Ok(text) => Some(text),
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", path.display());
                return ExitCode::from(EXIT_IO);
            }
        },
        None => None,
    };

    let plan = match ExperimentPlan::resolve(&cli, config_text.as_deref()) {
        Ok(plan) => plan,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(EXIT_USAGE);
        }
    };

    match execute(&plan) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_COMPARE)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_IO)
        }
    }
}

/// Runs the plan. Returns false when compare mode found violations.
fn execute(plan: &ExperimentPlan) -> Result<bool> {
    let mut rows = Vec::new();
    let mut tally_dump = plan
        .dump_tallies
        .as_ref()
        .map(|path| {
            std::fs::File::create(path)
                .map(std::io::BufWriter::new)
                .with_context(|| format!("cannot create tally dump {}", path.display()))
        })
        .transpose()?;

    for &scheme in &plan.schemes {
        for &receiver in &plan.receivers {
            for &lambda in &plan.lambda_grid {
                let mut params = plan.params.clone();
                params.lambda_dp = lambda;

                let reported = |slot: u32| match plan.report {
                    ReportSlots::All => true,
                    ReportSlots::LastOnly => slot == plan.slots,
                };

                if plan.mode != Mode::Simulate {
                    for s in evolve(scheme, receiver, &params, plan.slots) {
                        if !reported(s.traffic.slot) {
                            continue;
                        }
                        rows.push(Row {
                            scheme,
                            receiver,
                            lambda_dp: lambda,
                            slot: s.traffic.slot,
                            engine: Engine::Analytic,
                            success_prob: Some(s.p_overall),
                            success_ci95: None,
                            energy_per_packet_uj: s.energy_per_packet_uj,
                            energy_ci95: None,
                            throughput_bps: Some(s.throughput_bps),
                            fallback_rate: Some(s.p_fb),
                        });
                    }
                }

                if plan.mode != Mode::Analytic {
                    let mut cfg = SimConfig::new(params, scheme, receiver);
                    cfg.slots = plan.slots;
                    cfg.replications = plan.replications;
                    cfg.seed = plan.seed;
                    cfg.pdp_mode = plan.pdp_mode;
                    let (result, outcomes) = run_with_outcomes(&cfg);
                    if let Some(w) = tally_dump.as_mut() {
                        for o in &outcomes {
                            for (m, t) in o.tallies.iter().enumerate() {
                                let mut record = serde_json::to_value(t)?;
                                let obj = record.as_object_mut().expect("tally is an object");
                                obj.insert("scheme".into(), scheme.to_string().into());
                                obj.insert("receiver".into(), receiver.to_string().into());
                                obj.insert("lambda_dp".into(), lambda.into());
                                obj.insert("replication".into(), o.replication.into());
                                obj.insert("slot".into(), (m as u64 + 1).into());
                                writeln!(w, "{record}")?;
                            }
                        }
                    }
                    for s in &result.per_slot {
                        if !reported(s.slot) {
                            continue;
                        }
                        rows.push(Row {
                            scheme,
                            receiver,
                            lambda_dp: lambda,
                            slot: s.slot,
                            engine: Engine::Sim,
                            success_prob: s.success_prob,
                            success_ci95: s.success_ci95,
                            energy_per_packet_uj: s.energy_per_packet_uj,
                            energy_ci95: s.energy_ci95,
                            throughput_bps: s.throughput_bps,
                            fallback_rate: s.fallback_rate,
                        });
                    }
                }
            }
        }
    }

    if let Some(w) = tally_dump.as_mut() {
        w.flush().context("cannot flush tally dump")?;
    }

    let csv = output::to_csv(&rows);
    match &plan.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)
                .with_context(|| format!("cannot create output directory {}", dir.display()))?;
            let path = dir.join("results.csv");
            std::fs::write(&path, csv)
                .with_context(|| format!("cannot write {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => print!("{csv}"),
    }

    if plan.mode == Mode::Compare {
        let comparisons =
            output::compare_rows(&rows, plan.tol_success, plan.tol_energy, plan.tol_throughput);
        eprint!("{}", output::render_comparisons(&comparisons));
        return Ok(comparisons.iter().all(|c| c.pass));
    }
    Ok(true)
}
