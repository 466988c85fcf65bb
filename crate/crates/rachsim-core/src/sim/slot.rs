//! One RACH period: arrivals, preamble selection, group detection, per-scheme
//! contention resolution, HARQ, and energy charging.

use crate::analytic::{ReceiverModel, SchemeKind};
use crate::params::SystemParams;
use crate::sim::timeline::SimEnergies;
use crate::sim::PdpMode;
use crate::zc;
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use super::population::DeviceState;

/// Counters for one slot of one replication. All counters are additive under
/// replication merge.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct SlotTally {
    /// Devices with a non-empty buffer this slot (every one attempts).
    pub active_devices: u64,
    /// Packets handed to the base station this slot.
    pub deliveries: u64,
    /// New packets that arrived this slot.
    pub arrivals: u64,
    /// Preambles chosen by at least one device.
    pub occupied_preambles: u64,
    /// Groups whose PDP peak cleared the detection threshold.
    pub preamble_detected_groups: u64,
    /// Groups in which some device won the PUSCH contention.
    pub pusch_successes: u64,
    /// Groups that entered the fallback Msg3 retry.
    pub fallback_groups: u64,
    /// Devices that entered the fallback Msg3 retry.
    pub fallback_devices: u64,
    /// Devices in groups that went undetected.
    pub undetected_devices: u64,
    /// Detected devices that lost the contention (no fallback path).
    pub contention_loser_devices: u64,
    /// Devices that won a PUSCH contention (direct or fallback).
    pub winner_devices: u64,
    /// Total energy spent by all devices this slot (µJ).
    pub energy_uj: f64,
}

impl SlotTally {
    pub fn merge(&mut self, other: &SlotTally) {
        self.active_devices += other.active_devices;
        self.deliveries += other.deliveries;
        self.arrivals += other.arrivals;
        self.occupied_preambles += other.occupied_preambles;
        self.preamble_detected_groups += other.preamble_detected_groups;
        self.pusch_successes += other.pusch_successes;
        self.fallback_groups += other.fallback_groups;
        self.fallback_devices += other.fallback_devices;
        self.undetected_devices += other.undetected_devices;
        self.contention_loser_devices += other.contention_loser_devices;
        self.winner_devices += other.winner_devices;
        self.energy_uj += other.energy_uj;
    }
}

/// Per-purpose generators for one replication.
pub struct SlotRngs<'a> {
    pub arrivals: &'a mut ChaCha12Rng,
    pub preamble: &'a mut ChaCha12Rng,
    pub pdp: &'a mut ChaCha12Rng,
    pub fading: &'a mut ChaCha12Rng,
    pub harq: &'a mut ChaCha12Rng,
}

/// Draws one PDP peak (mW) for a device on its chosen preamble.
///
/// Distributional mode samples the Exp(ρ·N_ZC² + σ_n²·N_ZC) peak law
/// directly; waveform mode synthesises the received preamble and correlates
/// at the true lag.
pub fn draw_pdp_peak(
    mode: PdpMode,
    params: &SystemParams,
    preamble_index: u32,
    rng: &mut impl Rng,
) -> f64 {
    match mode {
        PdpMode::Distributional => {
            let u: f64 = rng.random::<f64>();
            -params.pdp_scale_mw() * (1.0 - u).ln()
        }
        PdpMode::Waveform => {
            let n = params.n_zc;
            let root = zc::zadoff_chu(1, n);
            let shift_step = (n / params.xi).max(1);
            let preamble = zc::cyclic_shift(&root, preamble_index * shift_step);
            let h = complex_gaussian(rng, 1.0);
            let sigma = params.sigma2_mw();
            let noise: Vec<(f64, f64)> = (0..n).map(|_| complex_gaussian(rng, sigma)).collect();
            let tau0 = rng.random_range(0..n);
            zc::pdp_peak_at_true_lag(&preamble, params.rho_mw(), h, tau0, &noise)
        }
    }
}

/// CN(0, variance) sample as (re, im) via Box-Muller.
fn complex_gaussian(rng: &mut impl Rng, variance: f64) -> (f64, f64) {
    let u1: f64 = rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    let r = (-(1.0 - u1).ln() * variance).sqrt();
    let theta = std::f64::consts::TAU * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Group-level preamble detection: one peak per member, detected iff the
/// maximum clears λ_th. Same-preamble peaks are separable by propagation
/// delay, so no peak merging occurs.
pub fn resolve_preamble_group(
    group_size: usize,
    mode: PdpMode,
    params: &SystemParams,
    preamble_index: u32,
    rng: &mut impl Rng,
) -> bool {
    let th = params.lambda_th_mw();
    let mut detected = false;
    // Draw every member's peak even once detected so the stream layout
    // depends only on group sizes.
    for _ in 0..group_size {
        if draw_pdp_peak(mode, params, preamble_index, rng) > th {
            detected = true;
        }
    }
    detected
}

/// PUSCH contention among a detected group with the given fresh gains.
/// Advanced: the max-gain device wins iff ρ·h_max / (ρ·Σ_others + σ²) > γ_th
/// (ties broken toward the lower index, a probability-zero event).
/// Basic: a singleton wins iff ρ·h / σ² > γ_th; collisions kill everyone.
pub fn resolve_pusch(gains: &[f64], receiver: ReceiverModel, params: &SystemParams) -> Option<usize> {
    let rho = params.rho_mw();
    let sigma2 = params.sigma2_mw();
    let gamma = params.gamma_th();
    match receiver {
        ReceiverModel::Advanced => {
            let mut best = 0usize;
            for (i, &g) in gains.iter().enumerate() {
                if g > gains[best] {
                    best = i;
                }
            }
            let interference: f64 =
                gains.iter().enumerate().filter(|&(i, _)| i != best).map(|(_, &g)| rho * g).sum();
            (rho * gains[best] > gamma * (interference + sigma2)).then_some(best)
        }
        ReceiverModel::Basic => match gains {
            [g] => (rho * g > gamma * sigma2).then_some(0),
            _ => None,
        },
    }
}

/// Runs the data HARQ loop: up to K attempts, each failing independently
/// with probability B. Returns (transmissions used, delivered).
fn run_harq(params: &SystemParams, rng: &mut impl Rng) -> (u32, bool) {
    for k in 1..=params.harq_max {
        if rng.random::<f64>() >= params.bler {
            return (k, true);
        }
        if k == params.harq_max {
            return (k, false);
        }
    }
    unreachable!("harq_max >= 1")
}

fn fresh_gains(count: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..count).map(|_| -(1.0f64 - rng.random::<f64>()).ln()).collect()
}

/// Executes one RACH period over the whole population, mutating queues and
/// per-device energy, and returns the slot tally.
pub fn step_slot(
    scheme: SchemeKind,
    receiver: ReceiverModel,
    pop: &mut [DeviceState],
    params: &SystemParams,
    energies: &SimEnergies,
    mode: PdpMode,
    rngs: &mut SlotRngs<'_>,
) -> SlotTally {
    let mut tally = SlotTally {
        arrivals: super::population::arrivals(pop, params.mu_new, rngs.arrivals),
        ..SlotTally::default()
    };

    let active: Vec<usize> = (0..pop.len()).filter(|&i| pop[i].queue_len > 0).collect();
    tally.active_devices = active.len() as u64;
    if active.is_empty() {
        return tally;
    }

    // Fresh uniform preamble choice per attempt.
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); params.xi as usize];
    for &dev in &active {
        let pre = rngs.preamble.random_range(0..params.xi) as usize;
        groups[pre].push(dev);
    }

    for (pre_idx, group) in groups.iter().enumerate() {
        if group.is_empty() {
            continue;
        }
        tally.occupied_preambles += 1;
        let detected =
            resolve_preamble_group(group.len(), mode, params, pre_idx as u32, rngs.pdp);
        if !detected {
            tally.undetected_devices += group.len() as u64;
            let cost = match scheme {
                SchemeKind::FourStep | SchemeKind::FourStepSdt => energies.e_p + energies.e_msg2f,
                SchemeKind::TwoStep => energies.e_msga + energies.e_msgbf,
                SchemeKind::TwoStepSdt => energies.e_msga + energies.e_data + energies.e_msgbf,
            };
            for &dev in group {
                pop[dev].energy_uj += cost;
                tally.energy_uj += cost;
            }
            continue;
        }
        tally.preamble_detected_groups += 1;

        let gains = fresh_gains(group.len(), rngs.fading);
        let winner = resolve_pusch(&gains, receiver, params);
        if winner.is_some() {
            tally.pusch_successes += 1;
        }

        match scheme {
            SchemeKind::FourStep | SchemeKind::FourStepSdt => {
                let sdt = scheme.is_sdt();
                for (slot_in_group, &dev) in group.iter().enumerate() {
                    let mut cost = energies.e_p + energies.e_msg2s + energies.e_msg3;
                    if sdt {
                        cost += energies.e_data;
                    }
                    if winner == Some(slot_in_group) {
                        tally.winner_devices += 1;
                        cost += energies.e_msg4s;
                        let delivered = if sdt {
                            true
                        } else {
                            let (k, ok) = run_harq(params, rngs.harq);
                            cost += energies.data_k(k);
                            ok
                        };
                        if delivered {
                            tally.deliveries += 1;
                            pop[dev].queue_len -= 1;
                        }
                    } else {
                        // Losers (capture or SINR failure) burn the full CRT.
                        tally.contention_loser_devices += 1;
                        cost += energies.e_msg4f;
                    }
                    pop[dev].energy_uj += cost;
                    tally.energy_uj += cost;
                }
            }
            SchemeKind::TwoStep | SchemeKind::TwoStepSdt => {
                let sdt = scheme.is_sdt();
                let msga = if sdt { energies.e_msga + energies.e_data } else { energies.e_msga };
                match winner {
                    Some(w) => {
                        // Someone decoded: the winner gets its MsgB, the rest
                        // monitor out the window and retry next opportunity.
                        for (slot_in_group, &dev) in group.iter().enumerate() {
                            let mut cost = msga;
                            if slot_in_group == w {
                                tally.winner_devices += 1;
                                cost += energies.e_msgbs;
                                let delivered = if sdt {
                                    true
                                } else {
                                    let (k, ok) = run_harq(params, rngs.harq);
                                    cost += energies.data_k(k);
                                    ok
                                };
                                if delivered {
                                    tally.deliveries += 1;
                                    pop[dev].queue_len -= 1;
                                }
                            } else {
                                tally.contention_loser_devices += 1;
                                cost += energies.e_msgbf;
                            }
                            pop[dev].energy_uj += cost;
                            tally.energy_uj += cost;
                        }
                    }
                    None => {
                        // Nothing decoded: the whole group falls back to a
                        // Msg3 retry with fresh fading.
                        tally.fallback_groups += 1;
                        tally.fallback_devices += group.len() as u64;
                        let fb_gains = fresh_gains(group.len(), rngs.fading);
                        let fb_winner = resolve_pusch(&fb_gains, receiver, params);
                        if fb_winner.is_some() {
                            tally.pusch_successes += 1;
                        }
                        for (slot_in_group, &dev) in group.iter().enumerate() {
                            let mut cost = msga + energies.e_msgbfb + energies.e_msg3;
                            if fb_winner == Some(slot_in_group) {
                                tally.winner_devices += 1;
                                cost += energies.e_msg4s;
                                // Data always runs HARQ after a fallback, in
                                // both 2-step variants.
                                let (k, ok) = run_harq(params, rngs.harq);
                                cost += energies.data_k(k);
                                if ok {
                                    tally.deliveries += 1;
                                    pop[dev].queue_len -= 1;
                                }
                            } else {
                                tally.contention_loser_devices += 1;
                                cost += energies.e_msg4f;
                            }
                            pop[dev].energy_uj += cost;
                            tally.energy_uj += cost;
                        }
                    }
                }
            }
        }
    }
    tally
}
