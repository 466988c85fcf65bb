//! Monte Carlo spatio-temporal simulator: PPP population, per-device FCFS
//! queues, preamble groups, PDP detection, SINR capture, fallback, HARQ, and
//! energy accounting.
//!
//! Replications are independent units of work. Each expands the root seed
//! into its own per-purpose RNG streams, so the merged output is bit-identical
//! between serial and parallel execution.

pub mod population;
pub mod rng;
pub mod slot;
pub mod timeline;

use crate::analytic::{ReceiverModel, SchemeKind};
use crate::params::SystemParams;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use population::{arrivals, deploy, DeviceState};
pub use slot::{draw_pdp_peak, resolve_preamble_group, resolve_pusch, SlotTally};
pub use timeline::SimEnergies;

use rng::{RngFactory, StreamKind};
use slot::SlotRngs;

/// How preamble-detection peaks are produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PdpMode {
    /// Sample the Exp(ρ·N_ZC² + σ_n²·N_ZC) peak law directly.
    Distributional,
    /// Synthesise the received Zadoff-Chu preamble and correlate at the true
    /// lag. Statistically equivalent, far slower; used for validation.
    Waveform,
}

impl std::str::FromStr for PdpMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "distributional" | "dist" => Ok(PdpMode::Distributional),
            "waveform" | "wave" => Ok(PdpMode::Waveform),
            _ => Err(format!("unknown pdp mode `{s}` (expected distributional or waveform)")),
        }
    }
}

/// Full description of one simulation experiment.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub params: SystemParams,
    pub scheme: SchemeKind,
    pub receiver: ReceiverModel,
    pub slots: u32,
    pub replications: u32,
    pub seed: u64,
    pub pdp_mode: PdpMode,
}

impl SimConfig {
    pub fn new(params: SystemParams, scheme: SchemeKind, receiver: ReceiverModel) -> Self {
        SimConfig {
            params,
            scheme,
            receiver,
            slots: 10,
            replications: 1_000,
            seed: 1,
            pdp_mode: PdpMode::Distributional,
        }
    }
}

/// Everything one replication produces.
#[derive(Debug, Clone, Serialize)]
pub struct ReplicationOutcome {
    pub replication: u64,
    /// Population size drawn for this replication.
    pub devices: u64,
    pub tallies: Vec<SlotTally>,
    /// Total arrivals across all slots.
    pub arrivals: u64,
    /// Total deliveries across all slots.
    pub deliveries: u64,
    /// Packets still queued after the final slot.
    pub final_queue: u64,
}

/// Pooled estimates for one slot with normal-approximation 95% confidence
/// half-widths computed over per-replication estimates.
#[derive(Debug, Clone, Serialize)]
pub struct SlotEstimate {
    pub slot: u32,
    /// Active (non-empty) device attempts pooled over replications.
    pub active: u64,
    pub deliveries: u64,
    /// Population-slots pooled over replications (denominator of T̂·P̂).
    pub device_slots: u64,
    /// P̂^m = deliveries / active. `None` when no device was active.
    pub success_prob: Option<f64>,
    pub success_ci95: Option<f64>,
    /// Cumulative energy / cumulative deliveries through this slot (µJ).
    pub energy_per_packet_uj: Option<f64>,
    pub energy_ci95: Option<f64>,
    /// R̂^m = deliveries·S / (population·T_RACH), bits/s.
    pub throughput_bps: Option<f64>,
    /// Fallback devices / active devices.
    pub fallback_rate: Option<f64>,
    /// Energy spent in this slot summed over the population (µJ).
    pub energy_slot_uj: f64,
}

/// Merged result of a simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimResult {
    pub per_slot: Vec<SlotEstimate>,
    /// Conservation bookkeeping per replication.
    pub replications: Vec<ReplicationRecord>,
}

/// Packet-conservation record of one replication:
/// arrivals = deliveries + final queue, exactly.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ReplicationRecord {
    pub arrivals: u64,
    pub deliveries: u64,
    pub final_queue: u64,
}

/// Runs one replication end to end.
pub fn run_replication(cfg: &SimConfig, replication: u64) -> ReplicationOutcome {
    let factory = RngFactory::new(cfg.seed);
    let mut pop = deploy(&cfg.params, &mut factory.stream(replication, StreamKind::Deploy));
    let devices = pop.len() as u64;
    let energies = SimEnergies::new(&cfg.params);

    let mut arrivals_rng = factory.stream(replication, StreamKind::Arrivals);
    let mut preamble_rng = factory.stream(replication, StreamKind::Preamble);
    let mut pdp_rng = factory.stream(replication, StreamKind::Pdp);
    let mut fading_rng = factory.stream(replication, StreamKind::Fading);
    let mut harq_rng = factory.stream(replication, StreamKind::Harq);

    let mut tallies = Vec::with_capacity(cfg.slots as usize);
    for _ in 0..cfg.slots {
        let mut rngs = SlotRngs {
            arrivals: &mut arrivals_rng,
            preamble: &mut preamble_rng,
            pdp: &mut pdp_rng,
            fading: &mut fading_rng,
            harq: &mut harq_rng,
        };
        tallies.push(slot::step_slot(
            cfg.scheme,
            cfg.receiver,
            &mut pop,
            &cfg.params,
            &energies,
            cfg.pdp_mode,
            &mut rngs,
        ));
    }

    let arrivals: u64 = tallies.iter().map(|t| t.arrivals).sum();
    let deliveries: u64 = tallies.iter().map(|t| t.deliveries).sum();
    let final_queue: u64 = pop.iter().map(|d| d.queue_len as u64).sum();
    ReplicationOutcome { replication, devices, tallies, arrivals, deliveries, final_queue }
}

/// Runs all replications in parallel. Outcomes are collected in replication
/// order and merged by a serial fold, so the result is bit-identical to
/// [`run_serial`] for the same seed.
pub fn run(cfg: &SimConfig) -> SimResult {
    let outcomes: Vec<ReplicationOutcome> =
        (0..cfg.replications as u64).into_par_iter().map(|r| run_replication(cfg, r)).collect();
    merge(cfg, &outcomes)
}

/// Runs all replications on the calling thread.
pub fn run_serial(cfg: &SimConfig) -> SimResult {
    let outcomes: Vec<ReplicationOutcome> =
        (0..cfg.replications as u64).map(|r| run_replication(cfg, r)).collect();
    merge(cfg, &outcomes)
}

/// Runs all replications and also returns the raw per-replication outcomes
/// (for tally dumps and conservation tests).
pub fn run_with_outcomes(cfg: &SimConfig) -> (SimResult, Vec<ReplicationOutcome>) {
    let outcomes: Vec<ReplicationOutcome> =
        (0..cfg.replications as u64).into_par_iter().map(|r| run_replication(cfg, r)).collect();
    let result = merge(cfg, &outcomes);
    (result, outcomes)
}

fn merge(cfg: &SimConfig, outcomes: &[ReplicationOutcome]) -> SimResult {
    let slots = cfg.slots as usize;
    let mut merged = vec![SlotTally::default(); slots];
    for o in outcomes {
        for (m, t) in o.tallies.iter().enumerate() {
            merged[m].merge(t);
        }
    }

    let device_slots_total: u64 = outcomes.iter().map(|o| o.devices).sum();
    let s_bits = cfg.params.packet_size_bits;
    let t_rach = cfg.params.t_rach_s();

    let mut per_slot = Vec::with_capacity(slots);
    let mut cum_energy = 0.0f64;
    let mut cum_deliveries = 0u64;
    for (m, t) in merged.iter().enumerate() {
        cum_energy += t.energy_uj;
        cum_deliveries += t.deliveries;

        // Per-replication estimates for the confidence half-widths.
        let mut rep_success = Vec::with_capacity(outcomes.len());
        let mut rep_epp = Vec::with_capacity(outcomes.len());
        for o in outcomes {
            let tm = &o.tallies[m];
            if tm.active_devices > 0 {
                rep_success.push(tm.deliveries as f64 / tm.active_devices as f64);
            }
            let (mut e, mut d) = (0.0, 0u64);
            for tt in &o.tallies[..=m] {
                e += tt.energy_uj;
                d += tt.deliveries;
            }
            if d > 0 {
                rep_epp.push(e / d as f64);
            }
        }

        per_slot.push(SlotEstimate {
            slot: m as u32 + 1,
            active: t.active_devices,
            deliveries: t.deliveries,
            device_slots: device_slots_total,
            success_prob: (t.active_devices > 0)
                .then(|| t.deliveries as f64 / t.active_devices as f64),
            success_ci95: crate::stats::mean_ci95(&rep_success).map(|(_, h)| h),
            energy_per_packet_uj: (cum_deliveries > 0)
                .then(|| cum_energy / cum_deliveries as f64),
            energy_ci95: crate::stats::mean_ci95(&rep_epp).map(|(_, h)| h),
            throughput_bps: (device_slots_total > 0)
                .then(|| t.deliveries as f64 * s_bits / (device_slots_total as f64 * t_rach)),
            fallback_rate: (t.active_devices > 0)
                .then(|| t.fallback_devices as f64 / t.active_devices as f64),
            energy_slot_uj: t.energy_uj,
        });
    }

    SimResult {
        per_slot,
        replications: outcomes
            .iter()
            .map(|o| ReplicationRecord {
                arrivals: o.arrivals,
                deliveries: o.deliveries,
                final_queue: o.final_queue,
            })
            .collect(),
    }
}
