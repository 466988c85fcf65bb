//! Result rows, CSV emission, and compare-mode evaluation.

use rachsim_core::analytic::{ReceiverModel, SchemeKind};

pub const CSV_HEADER: &str = "scheme,receiver,lambda_dp,slot,engine,success_prob,success_ci95,\
energy_per_packet_uj,energy_ci95,throughput_bps,fallback_rate";

/// Which engine produced a row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Engine {
    Analytic,
    Sim,
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Engine::Analytic => "analytic",
            Engine::Sim => "sim",
        })
    }
}

/// One (scheme, receiver, λ, slot, engine) result cell.
#[derive(Debug, Clone)]
pub struct Row {
    pub scheme: SchemeKind,
    pub receiver: ReceiverModel,
    pub lambda_dp: f64,
    pub slot: u32,
    pub engine: Engine,
    pub success_prob: Option<f64>,
    pub success_ci95: Option<f64>,
    pub energy_per_packet_uj: Option<f64>,
    pub energy_ci95: Option<f64>,
    pub throughput_bps: Option<f64>,
    pub fallback_rate: Option<f64>,
}

/// Renders a value with six significant digits; empty for undefined cells.
pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt6).unwrap_or_default()
}

/// Six-significant-digit rendering with plain decimal notation in the
/// human-scale range and scientific notation outside it.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let mag = x.abs().log10().floor() as i32;
    if !( -5..=14).contains(&mag) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn sort_key(r: &Row) -> (usize, usize, u64, u32, Engine) {
    let scheme_rank = SchemeKind::ALL.iter().position(|s| *s == r.scheme).unwrap();
    let recv_rank = ReceiverModel::ALL.iter().position(|m| *m == r.receiver).unwrap();
    (scheme_rank, recv_rank, r.lambda_dp.to_bits(), r.slot, r.engine)
}

/// Serialises rows in the contract order (scheme, receiver, λ, slot, engine).
pub fn to_csv(rows: &[Row]) -> String {
    let mut rows: Vec<&Row> = rows.iter().collect();
    rows.sort_by_key(|r| sort_key(r));
    let mut out = String::with_capacity(rows.len() * 96 + CSV_HEADER.len() + 1);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scheme,
            r.receiver,
            fmt6(r.lambda_dp),
            r.slot,
            r.engine,
            fmt_opt(r.success_prob),
            fmt_opt(r.success_ci95),
            fmt_opt(r.energy_per_packet_uj),
            fmt_opt(r.energy_ci95),
            fmt_opt(r.throughput_bps),
            fmt_opt(r.fallback_rate),
        ));
    }
    out
}

/// One tolerance check of compare mode.
#[derive(Debug, Clone)]
pub struct Comparison {
    pub scheme: SchemeKind,
    pub receiver: ReceiverModel,
    pub lambda_dp: f64,
    pub slot: u32,
    pub metric: &'static str,
    pub analytic: f64,
    pub simulated: f64,
    /// |Δ| for absolute metrics, |Δ|/analytic for relative ones.
    pub deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates paired rows against the configured tolerances. Cells with an
/// undefined simulated metric are skipped, never treated as zeros.
pub fn compare_rows(
    rows: &[Row],
    tol_success: f64,
    tol_energy: f64,
    tol_throughput: f64,
) -> Vec<Comparison> {
    let mut out = Vec::new();
    for a in rows.iter().filter(|r| r.engine == Engine::Analytic) {
        let Some(s) = rows.iter().find(|r| {
            r.engine == Engine::Sim
                && r.scheme == a.scheme
                && r.receiver == a.receiver
                && r.lambda_dp == a.lambda_dp
                && r.slot == a.slot
        }) else {
            continue;
        };
        let mut push = |metric: &'static str,
                        ana: Option<f64>,
                        sim: Option<f64>,
                        tol: f64,
                        relative: bool| {
            let (Some(ana), Some(sim)) = (ana, sim) else { return };
            let deviation =
                if relative { (sim - ana).abs() / ana.abs().max(f64::MIN_POSITIVE) } else { (sim - ana).abs() };
            out.push(Comparison {
                scheme: a.scheme,
                receiver: a.receiver,
                lambda_dp: a.lambda_dp,
                slot: a.slot,
                metric,
                analytic: ana,
                simulated: sim,
                deviation,
                tolerance: tol,
                pass: deviation <= tol,
            });
        };
        push("success_prob", a.success_prob, s.success_prob, tol_success, false);
        push("energy_per_packet", a.energy_per_packet_uj, s.energy_per_packet_uj, tol_energy, true);
        push("throughput", a.throughput_bps, s.throughput_bps, tol_throughput, true);
    }
    out
}

/// Human-readable comparison report.
pub fn render_comparisons(comparisons: &[Comparison]) -> String {
    let mut out = String::new();
    for c in comparisons {
        out.push_str(&format!(
            "{} {} λ={} slot {:>2} {:<18} analytic={} sim={} |Δ|={} tol={} {}\n",
            c.scheme,
            c.receiver,
            fmt6(c.lambda_dp),
            c.slot,
            c.metric,
            fmt6(c.analytic),
            fmt6(c.simulated),
            fmt6(c.deviation),
            fmt6(c.tolerance),
            if c.pass { "PASS" } else { "FAIL" },
        ));
    }
    let failed = comparisons.iter().filter(|c| !c.pass).count();
    out.push_str(&format!(
        "compare: {} checks, {} failed\n",
        comparisons.len(),
        failed
    ));
    out
}
