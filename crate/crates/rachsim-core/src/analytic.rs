//! Closed-form per-slot analysis: preamble detection, PUSCH capture,
//! fallback, overall packet success, queue evolution, and throughput.
//!
//! Conventions: a "slot" is one RACH attempt window of length T_RACH. The
//! typical device contends with N ~ Poisson(λ_Dp·T^m) interferers on its
//! preamble, where T^m is the non-empty buffer probability at attempt m.
//! All infinite sums are truncated per [`crate::numerics::poisson_mixture`].

use crate::energy;
use crate::numerics::{poisson_mixture, poisson_pmf};
use crate::params::SystemParams;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// The four contention-based access schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SchemeKind {
    /// Grant-based: Msg1 preamble, Msg2 grant, Msg3, Msg4, then data + HARQ.
    FourStep,
    /// Grant-based with the payload riding Msg3 (no separate data stage).
    FourStepSdt,
    /// Grant-free: MsgA (preamble + PUSCH), MsgB, then data + HARQ; a
    /// detected-but-undecoded MsgA falls back to a Msg3 retry.
    TwoStep,
    /// Grant-free with the payload riding the MsgA PUSCH; the fallback path
    /// retransmits the data with HARQ.
    TwoStepSdt,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] =
        [SchemeKind::FourStep, SchemeKind::FourStepSdt, SchemeKind::TwoStep, SchemeKind::TwoStepSdt];

    /// 2-step variants integrate the fallback mechanism.
    pub fn has_fallback(self) -> bool {
        matches!(self, SchemeKind::TwoStep | SchemeKind::TwoStepSdt)
    }

    /// SDT variants deliver the payload inside the RA procedure.
    pub fn is_sdt(self) -> bool {
        matches!(self, SchemeKind::FourStepSdt | SchemeKind::TwoStepSdt)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SchemeKind::FourStep => "4step",
            SchemeKind::FourStepSdt => "4stepSDT",
            SchemeKind::TwoStep => "2step",
            SchemeKind::TwoStepSdt => "2stepSDT",
        };
        f.write_str(s)
    }
}

impl FromStr for SchemeKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "4step" | "fourstep" => Ok(SchemeKind::FourStep),
            "4stepsdt" | "fourstepsdt" => Ok(SchemeKind::FourStepSdt),
            "2step" | "twostep" => Ok(SchemeKind::TwoStep),
            "2stepsdt" | "twostepsdt" => Ok(SchemeKind::TwoStepSdt),
            _ => Err(format!("unknown scheme `{s}` (expected 4step, 4stepSDT, 2step, 2stepSDT)")),
        }
    }
}

/// Receiver capability at the base station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ReceiverModel {
    /// Capture effect: the strongest colliding PUSCH is decoded when its
    /// SINR clears γ_th.
    Advanced,
    /// No multi-user detection: every collision destroys all transmissions.
    Basic,
}

impl ReceiverModel {
    pub const ALL: [ReceiverModel; 2] = [ReceiverModel::Advanced, ReceiverModel::Basic];
}

impl fmt::Display for ReceiverModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReceiverModel::Advanced => "advanced",
            ReceiverModel::Basic => "basic",
        })
    }
}

impl FromStr for ReceiverModel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "advanced" | "adv" => Ok(ReceiverModel::Advanced),
            "basic" => Ok(ReceiverModel::Basic),
            _ => Err(format!("unknown receiver `{s}` (expected advanced or basic)")),
        }
    }
}

/// Analytic queue state of the typical device at one RACH attempt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrafficState {
    /// Slot (RACH attempt) index, starting at 1.
    pub slot: u32,
    /// New-packet intensity μ_New^m.
    pub mu_new: f64,
    /// Accumulated-packet intensity μ_Cum^m (0 at m = 1).
    pub mu_cum: f64,
    /// Non-empty buffer probability T^m = 1 − e^{−μ_New^m − μ_Cum^m}.
    pub t_nonempty: f64,
}

impl TrafficState {
    /// State of the first RACH attempt: nothing accumulated yet.
    pub fn first(mu_new: f64) -> Self {
        TrafficState { slot: 1, mu_new, mu_cum: 0.0, t_nonempty: -(-mu_new).exp_m1() }
    }

    /// Mean number of interferers on the typical device's preamble.
    pub fn interferer_mean(&self, params: &SystemParams) -> f64 {
        params.lambda_dp * self.t_nonempty
    }
}

/// Advances the queue recursion by one slot:
/// μ_Cum^m = μ_New^{m−1} + μ_Cum^{m−1} − P^{m−1}·T^{m−1}, clamped at zero,
/// with T^m recomputed from the new intensities.
///
/// The clamp covers the regime where the thinning term exceeds the remaining
/// load, which the recursion does not otherwise forbid.
pub fn queue_step(prev: &TrafficState, p_overall_prev: f64, mu_new_next: f64) -> TrafficState {
    debug_assert!((0.0..=1.0).contains(&p_overall_prev));
    let mu_cum = (prev.mu_new + prev.mu_cum - p_overall_prev * prev.t_nonempty).max(0.0);
    TrafficState {
        slot: prev.slot + 1,
        mu_new: mu_new_next,
        mu_cum,
        t_nonempty: -(-mu_new_next - mu_cum).exp_m1(),
    }
}

/// PMF of the interferer count: P[N = n] with N ~ Poisson(λ_Dp·T^m).
pub fn interferer_pmf(n: u32, lambda_dp: f64, t_nonempty: f64) -> f64 {
    debug_assert!(lambda_dp >= 0.0);
    debug_assert!((0.0..=1.0).contains(&t_nonempty));
    poisson_pmf(n, lambda_dp * t_nonempty)
}

/// Preamble detection success probability conditioned on n interferers:
/// the group of n+1 peaks is detected when at least one exceeds λ_th, each
/// peak being Exp(ρ·N_ZC² + σ_n²·N_ZC).
pub fn preamble_detection_cond(n: u32, params: &SystemParams) -> f64 {
    let miss = -(-params.lambda_th_mw() / params.pdp_scale_mw()).exp_m1();
    1.0 - miss.powf(n as f64 + 1.0)
}

/// Overall preamble detection success probability at the given traffic state.
pub fn preamble_detection_overall(traffic: &TrafficState, params: &SystemParams) -> f64 {
    poisson_mixture(traffic.interferer_mean(params), |n| preamble_detection_cond(n, params))
}

/// PUSCH decoding success probability of the typical device conditioned on
/// n interferers and preamble detection.
///
/// Advanced receiver: [1 − (1 − e^{−γ_th·σ²/ρ})^{n+1}] / [(n+1)·(1+γ_th)^n],
/// the numerically stable rewrite of the alternating binomial sum, with the
/// interference Laplace factor evaluated at γ_th/ρ independent of the
/// binomial index. Basic receiver: e^{−γ_th·σ²/ρ} for a singleton, else 0.
pub fn pusch_decoding_cond(n: u32, params: &SystemParams, receiver: ReceiverModel) -> f64 {
    let clear_noise = (-params.gamma_th() * params.sigma2_mw() / params.rho_mw()).exp();
    match receiver {
        ReceiverModel::Advanced => {
            let miss = 1.0 - clear_noise;
            let numer = 1.0 - miss.powf(n as f64 + 1.0);
            numer / ((n as f64 + 1.0) * (1.0 + params.gamma_th()).powf(n as f64))
        }
        ReceiverModel::Basic => {
            if n == 0 {
                clear_noise
            } else {
                0.0
            }
        }
    }
}

/// Overall PUSCH decoding success probability,
/// Σ_n pmf(n)·P_pre|A(n)·P_pus|B(n).
pub fn pusch_decoding_overall(
    traffic: &TrafficState,
    params: &SystemParams,
    receiver: ReceiverModel,
) -> f64 {
    poisson_mixture(traffic.interferer_mean(params), |n| {
        preamble_detection_cond(n, params) * pusch_decoding_cond(n, params, receiver)
    })
}

/// Data transmission success probability after the RA procedure: 1 − B^K.
pub fn data_success(params: &SystemParams) -> f64 {
    1.0 - params.bler.powf(params.harq_max as f64)
}

/// Fallback probability and fallback-then-decode probability for the 2-step
/// variants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FallbackProbs {
    /// P[preamble detected, no MsgA PUSCH decoded among the colliders].
    pub p_fb: f64,
    /// As above, and the typical device wins the fallback Msg3 contention.
    pub p_fb_pus: f64,
}

/// Computes the fallback probabilities. The factor (1 − (n+1)·P_pus|B) is the
/// probability that no colliding MsgA PUSCH is decoded; it is nonnegative
/// because (n+1)·P_pus|B is the probability that the max-gain device clears
/// the SINR threshold.
pub fn fallback_probs(
    traffic: &TrafficState,
    params: &SystemParams,
    receiver: ReceiverModel,
) -> FallbackProbs {
    let mean = traffic.interferer_mean(params);
    let p_fb = poisson_mixture(mean, |n| {
        let pus = pusch_decoding_cond(n, params, receiver);
        preamble_detection_cond(n, params) * (1.0 - (n as f64 + 1.0) * pus)
    });
    let p_fb_pus = poisson_mixture(mean, |n| {
        let pus = pusch_decoding_cond(n, params, receiver);
        preamble_detection_cond(n, params) * (1.0 - (n as f64 + 1.0) * pus) * pus
    });
    FallbackProbs { p_fb, p_fb_pus }
}

/// Overall packet transmission success probability of one scheme at one slot.
pub fn overall_success(
    scheme: SchemeKind,
    traffic: &TrafficState,
    params: &SystemParams,
    receiver: ReceiverModel,
) -> f64 {
    let mean = traffic.interferer_mean(params);
    let d = data_success(params);
    poisson_mixture(mean, |n| {
        let pre = preamble_detection_cond(n, params);
        let pus = pusch_decoding_cond(n, params, receiver);
        let fb = pre * (1.0 - (n as f64 + 1.0) * pus) * pus;
        match scheme {
            SchemeKind::FourStep => pre * pus * d,
            SchemeKind::FourStepSdt => pre * pus,
            SchemeKind::TwoStep => pre * pus * d + fb * d,
            SchemeKind::TwoStepSdt => pre * pus + fb * d,
        }
    })
}

/// Average throughput T^m·P^m·S/T_RACH in bits per second.
pub fn throughput(traffic: &TrafficState, p_overall: f64, params: &SystemParams) -> f64 {
    traffic.t_nonempty * p_overall * params.packet_size_bits / params.t_rach_s()
}

/// Analytic outputs for one slot of one scheme.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlotAnalytics {
    pub scheme: SchemeKind,
    pub receiver: ReceiverModel,
    pub traffic: TrafficState,
    /// Overall preamble detection probability.
    pub p_pre: f64,
    /// Overall PUSCH decoding probability.
    pub p_pus: f64,
    /// Fallback probability (0 for 4-step variants).
    pub p_fb: f64,
    /// Fallback-then-decode probability (0 for 4-step variants).
    pub p_fb_pus: f64,
    /// Overall packet transmission success probability P^m.
    pub p_overall: f64,
    /// Average throughput R^m (bits/s).
    pub throughput_bps: f64,
    /// Average energy spent in this slot per device, E^m (µJ).
    pub energy_uj: f64,
    /// Cumulative average energy per delivered packet through this slot (µJ).
    /// `None` until any success mass has accumulated.
    pub energy_per_packet_uj: Option<f64>,
}

/// Iterates the queue recursion for slots 1..=`slots`, populating every
/// per-slot analytic quantity. Deterministic.
pub fn evolve(
    scheme: SchemeKind,
    receiver: ReceiverModel,
    params: &SystemParams,
    slots: u32,
) -> Vec<SlotAnalytics> {
    let mut out = Vec::with_capacity(slots as usize);
    let mut traffic = TrafficState::first(params.mu_new);
    let mut history = Vec::with_capacity(slots as usize);
    for _ in 0..slots {
        let p_pre = preamble_detection_overall(&traffic, params);
        let p_pus = pusch_decoding_overall(&traffic, params, receiver);
        let (p_fb, p_fb_pus) = if scheme.has_fallback() {
            let fb = fallback_probs(&traffic, params, receiver);
            (fb.p_fb, fb.p_fb_pus)
        } else {
            (0.0, 0.0)
        };
        let p_overall = overall_success(scheme, &traffic, params, receiver);
        let energy_uj = energy::scheme_energy(scheme, &traffic, params, receiver);
        history.push(energy::SlotEnergySample {
            energy_uj,
            t_nonempty: traffic.t_nonempty,
            p_overall,
        });
        out.push(SlotAnalytics {
            scheme,
            receiver,
            traffic,
            p_pre,
            p_pus,
            p_fb,
            p_fb_pus,
            p_overall,
            throughput_bps: throughput(&traffic, p_overall, params),
            energy_uj,
            energy_per_packet_uj: energy::energy_per_packet(&history).ok(),
        });
        traffic = queue_step(&traffic, p_overall, params.mu_new);
    }
    out
}
