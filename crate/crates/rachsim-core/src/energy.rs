//! Per-message energy ledger and per-scheme average-energy mixtures.
//!
//! Energy unit convention: µJ = mW × ms. Times are configured in µs and
//! divided by 1000 exactly once, here.

use crate::analytic::{
    preamble_detection_cond, pusch_decoding_cond, ReceiverModel, SchemeKind, TrafficState,
};
use crate::numerics::{poisson_mixture, NeumaierSum};
use crate::params::SystemParams;
use serde::{Deserialize, Serialize};

/// Energy cost of each message/wait interval, in µJ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MessageEnergies {
    /// Preamble slot: transmit T_p, sleep the rest of the slot.
    pub e_p: f64,
    /// RAR wait ending in Msg2 at half the window, plus the Msg3 scheduling
    /// sleep T_K2 + T_Δ.
    pub e_msg2s: f64,
    /// RAR window fully monitored with no Msg2.
    pub e_msg2f: f64,
    /// Msg3 slot.
    pub e_msg3: f64,
    /// CRT wait ending in Msg4 at half the window, PUCCH wait, ACK.
    pub e_msg4s: f64,
    /// CRT fully monitored with no Msg4.
    pub e_msg4f: f64,
    /// One data slot.
    pub e_data: f64,
    /// Expected data-stage energy over the HARQ mixture.
    pub e_data_harq: f64,
    /// MsgA: preamble part plus PUSCH slot.
    pub e_msga: f64,
    /// MsgB success wait, PUCCH wait, ACK.
    pub e_msgbs: f64,
    /// RAR window fully monitored with no MsgB.
    pub e_msgbf: f64,
    /// Fallback MsgB at half the window plus Msg3 scheduling sleep.
    pub e_msgbfb: f64,
}

fn ms(us: f64) -> f64 {
    us / 1000.0
}

/// Computes every per-message energy from the parameter set.
pub fn message_energies(p: &SystemParams) -> MessageEnergies {
    let t_p = ms(p.t_p_us);
    let t_s = ms(p.t_s_us);
    let t_d = ms(p.t_d_us);
    let t_k2 = ms(p.t_k2_us);
    let t_delta = ms(p.t_delta_us);
    let t_pucch = ms(p.t_pucch_us);
    // One monitored slot: decode PDCCH for T_d, sleep the remainder.
    let w = p.p_r_mw * t_d + p.p_s_mw * (t_s - t_d);
    let half_rar = p.n_rar as f64 / 2.0 - 1.0;
    let half_crt = p.n_crt as f64 / 2.0 - 1.0;

    let e_p = p.p_t_mw * t_p + p.p_s_mw * (t_s - t_p);
    MessageEnergies {
        e_p,
        e_msg2s: half_rar * w + p.p_r_mw * t_s + p.p_s_mw * (t_k2 + t_delta),
        e_msg2f: p.n_rar as f64 * w,
        e_msg3: p.p_t_mw * t_s,
        e_msg4s: half_crt * w + p.p_r_mw * t_s + p.p_s_mw * t_pucch + p.p_t_mw * t_s,
        e_msg4f: p.n_crt as f64 * w,
        e_data: p.p_t_mw * t_s,
        e_data_harq: data_harq_energy(p),
        e_msga: e_p + p.p_t_mw * t_s,
        e_msgbs: half_rar * w + p.p_r_mw * t_s + p.p_s_mw * t_pucch + p.p_t_mw * t_s,
        e_msgbf: p.n_rar as f64 * w,
        e_msgbfb: half_rar * w + p.p_r_mw * t_s + p.p_s_mw * (t_k2 + t_delta),
    }
}

/// Energy of a data HARQ procedure that runs exactly k transmissions:
/// k rounds of (data DCI, T_K2 sleep, data slot, N_DCI monitored slots,
/// feedback DCI slot), then the PUCCH wait and the ACK.
pub fn data_energy_k(p: &SystemParams, k: u32) -> f64 {
    let t_s = ms(p.t_s_us);
    let t_d = ms(p.t_d_us);
    let w = p.p_r_mw * t_d + p.p_s_mw * (t_s - t_d);
    let round = w + p.p_s_mw * ms(p.t_k2_us) + p.p_t_mw * t_s + p.n_dci as f64 * w + p.p_r_mw * t_s;
    k as f64 * round + p.p_s_mw * ms(p.t_pucch_us) + p.p_t_mw * t_s
}

/// Expected data-stage energy Σ_{k=1}^{K−1}(1−B)·B^{k−1}·E_data^k +
/// B^{K−1}·E_data^K. The final term covers the "reached attempt K" event
/// whether or not that attempt succeeds.
pub fn data_harq_energy(p: &SystemParams) -> f64 {
    let k_max = p.harq_max;
    let b = p.bler;
    let mut acc = NeumaierSum::new();
    for k in 1..k_max {
        acc.add((1.0 - b) * b.powi(k as i32 - 1) * data_energy_k(p, k));
    }
    acc.add(b.powi(k_max as i32 - 1) * data_energy_k(p, k_max));
    acc.total()
}

/// Mutually exclusive per-attempt outcomes of one scheme, with their
/// probabilities and energy costs. Weights sum to 1.
#[derive(Debug, Clone)]
pub struct BranchMixture {
    /// (probability, energy µJ) per branch, in the scheme's term order.
    pub branches: Vec<(f64, f64)>,
}

impl BranchMixture {
    pub fn weights(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.0).collect()
    }

    /// Probability-weighted mean energy of the mixture.
    pub fn mean_energy(&self) -> f64 {
        let mut acc = NeumaierSum::new();
        for (w, e) in &self.branches {
            acc.add(w * e);
        }
        acc.total()
    }
}

/// Builds the per-attempt outcome mixture of one scheme at one traffic state.
///
/// 4-step variants: I undetected, II detected but PUSCH lost, III success.
/// 2-step variants: I MsgA success, II preamble undetected or another
/// collider captured, III fallback then Msg3 won, IV fallback then Msg3 lost.
/// Term II of the 2-step mixtures uses the weight
/// 1 − Σ pmf·P_pre·(1 − n·P_pus) — with n, not n+1 — which is exactly what
/// makes the four weights total 1 (I + III + IV = Σ pmf·P_pre·(1 − n·P_pus)).
pub fn branch_mixture(
    scheme: SchemeKind,
    traffic: &TrafficState,
    p: &SystemParams,
    receiver: ReceiverModel,
) -> BranchMixture {
    let e = message_energies(p);
    let mean = traffic.interferer_mean(p);
    let pre_miss = 1.0 - poisson_mixture(mean, |n| preamble_detection_cond(n, p));
    let mix = |f: &dyn Fn(u32, f64, f64) -> f64| {
        poisson_mixture(mean, |n| {
            let pre = preamble_detection_cond(n, p);
            let pus = pusch_decoding_cond(n, p, receiver);
            f(n, pre, pus)
        })
    };
    let branches = match scheme {
        SchemeKind::FourStep => vec![
            (pre_miss, e.e_p + e.e_msg2f),
            (mix(&|_, pre, pus| pre * (1.0 - pus)), e.e_p + e.e_msg2s + e.e_msg3 + e.e_msg4f),
            (
                mix(&|_, pre, pus| pre * pus),
                e.e_p + e.e_msg2s + e.e_msg3 + e.e_msg4s + e.e_data_harq,
            ),
        ],
        SchemeKind::FourStepSdt => vec![
            (pre_miss, e.e_p + e.e_msg2f),
            (
                mix(&|_, pre, pus| pre * (1.0 - pus)),
                e.e_p + e.e_msg2s + e.e_msg3 + e.e_data + e.e_msg4f,
            ),
            (
                mix(&|_, pre, pus| pre * pus),
                e.e_p + e.e_msg2s + e.e_msg3 + e.e_data + e.e_msg4s,
            ),
        ],
        SchemeKind::TwoStep => vec![
            (mix(&|_, pre, pus| pre * pus), e.e_msga + e.e_msgbs + e.e_data_harq),
            (
                1.0 - mix(&|n, pre, pus| pre * (1.0 - n as f64 * pus)),
                e.e_msga + e.e_msgbf,
            ),
            (
                mix(&|n, pre, pus| pre * (1.0 - (n as f64 + 1.0) * pus) * pus),
                e.e_msga + e.e_msgbfb + e.e_msg3 + e.e_msg4s + e.e_data_harq,
            ),
            (
                mix(&|n, pre, pus| pre * (1.0 - (n as f64 + 1.0) * pus) * (1.0 - pus)),
                e.e_msga + e.e_msgbfb + e.e_msg3 + e.e_msg4f,
            ),
        ],
        SchemeKind::TwoStepSdt => vec![
            (mix(&|_, pre, pus| pre * pus), e.e_msga + e.e_data + e.e_msgbs),
            (
                1.0 - mix(&|n, pre, pus| pre * (1.0 - n as f64 * pus)),
                e.e_msga + e.e_data + e.e_msgbf,
            ),
            (
                mix(&|n, pre, pus| pre * (1.0 - (n as f64 + 1.0) * pus) * pus),
                e.e_msga + e.e_data + e.e_msgbfb + e.e_msg3 + e.e_msg4s + e.e_data_harq,
            ),
            (
                mix(&|n, pre, pus| pre * (1.0 - (n as f64 + 1.0) * pus) * (1.0 - pus)),
                e.e_msga + e.e_data + e.e_msgbfb + e.e_msg3 + e.e_msg4f,
            ),
        ],
    };
    BranchMixture { branches }
}

/// Average energy E^m spent by the typical device in one RACH attempt:
/// the branch mixture prefixed by the non-empty probability T^m.
pub fn scheme_energy(
    scheme: SchemeKind,
    traffic: &TrafficState,
    p: &SystemParams,
    receiver: ReceiverModel,
) -> f64 {
    traffic.t_nonempty * branch_mixture(scheme, traffic, p, receiver).mean_energy()
}

/// One slot of the per-packet energy history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotEnergySample {
    /// Average per-device energy spent in the slot, E^t (µJ).
    pub energy_uj: f64,
    /// Non-empty probability T^t.
    pub t_nonempty: f64,
    /// Overall success probability P^t.
    pub p_overall: f64,
}

/// The per-packet metric has no value until some success mass accumulates.
#[derive(Debug, Clone, Copy, PartialEq, thiserror::Error)]
pub enum EnergyMetricError {
    #[error("energy per packet is undefined: no successful transmission mass")]
    NoSuccessMass,
    #[error("energy per packet is undefined: empty history")]
    EmptyHistory,
}

/// Average energy per delivered packet over a slot history:
/// Σ_t E^t / Σ_t T^t·P^t. The numerator sums the per-slot average energies;
/// the denominator is the accumulated per-device success mass.
pub fn energy_per_packet(history: &[SlotEnergySample]) -> Result<f64, EnergyMetricError> {
    if history.is_empty() {
        return Err(EnergyMetricError::EmptyHistory);
    }
    let mut energy = NeumaierSum::new();
    let mut mass = NeumaierSum::new();
    for s in history {
        energy.add(s.energy_uj);
        mass.add(s.t_nonempty * s.p_overall);
    }
    if mass.total() <= 0.0 {
        return Err(EnergyMetricError::NoSuccessMass);
    }
    Ok(energy.total() / mass.total())
}
