//! Acceptance suite: one test per criterion, each printing an explicit
//! pass/fail line (run with `--nocapture` to see them on success).
//!
//! Tolerances are pinned here, not calibrated after the fact. Where the
//! closed-form capture model's documented approximation exceeds a stated
//! tolerance, the test reports the measured gap and fails honestly; the
//! affected criteria and the measured magnitudes are described in the README.

use rachsim_core::analytic::{evolve, ReceiverModel, SchemeKind};
use rachsim_core::energy::branch_mixture;
use rachsim_core::params::SystemParams;
use rachsim_core::sim::rng::{RngFactory, StreamKind};
use rachsim_core::sim::{run, run_serial, run_with_outcomes, PdpMode, SimConfig};
use rachsim_core::stats;
use rachsim_core::zc;
use rand::Rng;

const SEED: u64 = 20260809;

fn defaults() -> SystemParams {
    SystemParams::defaults()
}

fn sim(scheme: SchemeKind, receiver: ReceiverModel, params: SystemParams, reps: u32, slots: u32) -> rachsim_core::sim::SimResult {
    let mut cfg = SimConfig::new(params, scheme, receiver);
    cfg.replications = reps;
    cfg.slots = slots;
    cfg.seed = SEED;
    run(&cfg)
}

fn criterion_1_for(scheme: SchemeKind) {
    let params = defaults();
    let analytic = evolve(scheme, ReceiverModel::Advanced, &params, 10);
    let result = sim(scheme, ReceiverModel::Advanced, params, 16_000, 10);

    let mut max_gap = 0.0f64;
    let mut min_samples = u64::MAX;
    let mut failing = Vec::new();
    for (a, s) in analytic.iter().zip(&result.per_slot) {
        let p_hat = s.success_prob.expect("active devices in every slot at these defaults");
        let gap = (p_hat - a.p_overall).abs();
        println!(
            "  slot {:2}: P_analytic={:.4} P_sim={:.4} |Δ|={:.4} samples={}",
            s.slot, a.p_overall, p_hat, gap, s.active
        );
        max_gap = max_gap.max(gap);
        min_samples = min_samples.min(s.active);
        if gap > 0.02 {
            failing.push(s.slot);
        }
    }
    assert!(min_samples >= 100_000, "sample budget: {min_samples} < 1e5 per cell");
    let verdict = if failing.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 1 ({scheme}, advanced, λ_Dp=5): {verdict} — max |P̂−P| = {max_gap:.4} \
         (tolerance 0.02, ≥{min_samples} samples/cell)"
    );
    assert!(
        failing.is_empty(),
        "{scheme}: |P̂−P| > 0.02 at slots {failing:?} (max {max_gap:.4}); the closed-form \
         capture probability under-counts capture wins for n ≥ 1 colliders (documented \
         approximation in the closed-form capture model)"
    );
}

#[test]
fn acceptance_1_success_agreement_4step() {
    criterion_1_for(SchemeKind::FourStep);
}

#[test]
fn acceptance_1_success_agreement_4step_sdt() {
    criterion_1_for(SchemeKind::FourStepSdt);
}

#[test]
fn acceptance_1_success_agreement_2step() {
    criterion_1_for(SchemeKind::TwoStep);
}

#[test]
fn acceptance_1_success_agreement_2step_sdt() {
    criterion_1_for(SchemeKind::TwoStepSdt);
}

#[test]
fn acceptance_2_pdp_peak_distribution() {
    let params = defaults();

    // Noiseless fixed-gain peak: exactly ρ·N_ZC² (ideal autocorrelation).
    let root = zc::zadoff_chu(1, params.n_zc);
    let preamble = zc::cyclic_shift(&root, 26);
    let zeros = vec![(0.0, 0.0); params.n_zc as usize];
    let peak = zc::pdp_peak_at_true_lag(&preamble, params.rho_mw(), (1.0, 0.0), 173, &zeros);
    let ideal = params.rho_mw() * (params.n_zc as f64).powi(2);
    let rel = (peak - ideal).abs() / ideal;
    assert!(rel < 1e-9, "noiseless peak off by {rel:e}");

    // 10⁴ waveform-mode peaks against Exp(ρ·N_ZC² + σ_n²·N_ZC).
    let f = RngFactory::new(SEED);
    let mut rng = f.stream(0, StreamKind::Pdp);
    let samples: Vec<f64> = (0..10_000)
        .map(|i| {
            rachsim_core::sim::draw_pdp_peak(
                PdpMode::Waveform,
                &params,
                i % params.xi,
                &mut rng,
            )
        })
        .collect();
    let (d, p) = stats::ks_test_exponential(&samples, params.pdp_scale_mw());
    let verdict = if p > 0.01 && rel < 1e-9 { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 2 (PDP peak law): {verdict} — KS D={d:.4} p={p:.3} \
         (need p > 0.01); noiseless peak rel err {rel:.2e} (need < 1e-9)"
    );
    assert!(p > 0.01, "KS rejects the exponential peak law: D={d}, p={p}");
}

#[test]
fn acceptance_3_capture_formula_brute_force_gap() {
    let params = defaults();
    let gamma = params.gamma_th();
    let s = params.sigma2_mw() / params.rho_mw();
    let f = RngFactory::new(SEED ^ 0x3333);
    let trials = 1_000_000u64;

    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for n in 0..=3u32 {
        let mut rng = f.stream(n as u64, StreamKind::Fading);
        let mut wins = 0u64;
        for _ in 0..trials {
            let h0 = -(1.0f64 - rng.random::<f64>()).ln();
            let mut max_other: f64 = 0.0;
            let mut interference = 0.0;
            for _ in 0..n {
                let h = -(1.0f64 - rng.random::<f64>()).ln();
                max_other = max_other.max(h);
                interference += h;
            }
            if h0 > max_other && h0 > gamma * (interference + s) {
                wins += 1;
            }
        }
        let measured = wins as f64 / trials as f64;
        let formula =
            rachsim_core::analytic::pusch_decoding_cond(n, &params, ReceiverModel::Advanced);
        let gap = (measured - formula).abs();
        worst = worst.max(gap);
        rows.push((n, formula, measured, gap));
        println!(
            "  n={n}: formula={formula:.5} brute-force={measured:.5} |gap|={gap:.5}"
        );
    }
    let failing: Vec<u32> = rows.iter().filter(|r| r.3 > 0.05).map(|r| r.0).collect();
    let verdict = if failing.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 3 (closed-form capture vs brute force, 10⁶ trials): {verdict} — \
         max |gap| = {worst:.4} (tolerance 0.05); the gap documents the interference \
         Laplace-factor approximation"
    );
    assert!(
        failing.is_empty(),
        "printed capture formula deviates from the physical rule by more than 0.05 \
         at n ∈ {failing:?} (max {worst:.4})"
    );
}

#[test]
fn acceptance_4_success_orderings() {
    let mut violations = Vec::new();
    for receiver in ReceiverModel::ALL {
        for lam in 1..=10u32 {
            let mut params = defaults();
            params.lambda_dp = lam as f64;

            // Analytic slot-10 values.
            let p = |scheme| evolve(scheme, receiver, &params, 10)[9].p_overall;
            let (s4, s4sdt, s2, s2sdt) = (
                p(SchemeKind::FourStep),
                p(SchemeKind::FourStepSdt),
                p(SchemeKind::TwoStep),
                p(SchemeKind::TwoStepSdt),
            );
            for (label, ok) in [
                ("2stepSDT ≥ 4stepSDT", s2sdt >= s4sdt - 1e-12),
                ("4stepSDT ≥ 4step", s4sdt >= s4 - 1e-12),
                ("2stepSDT ≥ 2step", s2sdt >= s2 - 1e-12),
                ("2step ≥ 4step", s2 >= s4 - 1e-12),
            ] {
                if !ok {
                    violations.push(format!("analytic {receiver} λ={lam}: {label}"));
                }
            }

            // Simulated slot-10 values within CI slack.
            let est = |scheme| {
                let r = sim(scheme, receiver, params.clone(), 2_000, 10);
                let s = &r.per_slot[9];
                (s.success_prob.unwrap(), s.success_ci95.unwrap_or(0.0))
            };
            let (e4, e4sdt, e2, e2sdt) = (
                est(SchemeKind::FourStep),
                est(SchemeKind::FourStepSdt),
                est(SchemeKind::TwoStep),
                est(SchemeKind::TwoStepSdt),
            );
            for (label, hi, lo) in [
                ("2stepSDT ≥ 4stepSDT", e2sdt, e4sdt),
                ("4stepSDT ≥ 4step", e4sdt, e4),
                ("2stepSDT ≥ 2step", e2sdt, e2),
                ("2step ≥ 4step", e2, e4),
            ] {
                if hi.0 < lo.0 - (hi.1 + lo.1) {
                    violations.push(format!(
                        "simulated {receiver} λ={lam}: {label} ({:.4} < {:.4})",
                        hi.0, lo.0
                    ));
                }
            }
        }
    }
    let verdict = if violations.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 4a (success orderings, slot 10, λ_Dp 1–10, both engines): {verdict}"
    );
    assert!(violations.is_empty(), "ordering violations: {violations:#?}");
}

#[test]
fn acceptance_4_energy_ordering() {
    // Per-packet energy at slot 10: E_4step > E_4stepSDT > E_2step > E_2stepSDT.
    let mut violations = Vec::new();
    for receiver in ReceiverModel::ALL {
        for lam in 1..=10u32 {
            let mut params = defaults();
            params.lambda_dp = lam as f64;
            let epp = |scheme| {
                evolve(scheme, receiver, &params, 10)[9]
                    .energy_per_packet_uj
                    .expect("success mass accumulates at these defaults")
            };
            let (e4, e4sdt, e2, e2sdt) = (
                epp(SchemeKind::FourStep),
                epp(SchemeKind::FourStepSdt),
                epp(SchemeKind::TwoStep),
                epp(SchemeKind::TwoStepSdt),
            );
            println!(
                "  {receiver} λ={lam:2}: 4step={e4:8.1} 4stepSDT={e4sdt:8.1} 2step={e2:8.1} 2stepSDT={e2sdt:8.1}"
            );
            for (label, ok) in [
                ("4step > 4stepSDT", e4 > e4sdt),
                ("4stepSDT > 2step", e4sdt > e2),
                ("2step > 2stepSDT", e2 > e2sdt),
            ] {
                if !ok {
                    violations.push(format!("{receiver} λ={lam}: {label}"));
                }
            }
        }
    }
    let verdict = if violations.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 4b (energy ordering 4step > 4stepSDT > 2step > 2stepSDT): {verdict}"
    );
    assert!(
        violations.is_empty(),
        "energy ordering violations (the 2-step success path carries the full \
         scheduled-data procedure, which at low collision rates outweighs \
         4-step SDT's piggybacked data): {violations:#?}"
    );
}

#[test]
fn acceptance_5_energy_mixture_completeness() {
    let mut worst = 0.0f64;
    for receiver in ReceiverModel::ALL {
        for lam in 1..=10u32 {
            let mut params = defaults();
            params.lambda_dp = lam as f64;
            for scheme in SchemeKind::ALL {
                for slot in evolve(scheme, receiver, &params, 10) {
                    let total: f64 =
                        branch_mixture(scheme, &slot.traffic, &params, receiver).weights().iter().sum();
                    worst = worst.max((total - 1.0).abs());
                }
            }
        }
    }
    let verdict = if worst <= 1e-9 { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 5 (branch-weight completeness over λ×slot×scheme×receiver): \
         {verdict} — max |Σw − 1| = {worst:.2e} (tolerance 1e-9)"
    );
    assert!(worst <= 1e-9);
}

#[test]
fn acceptance_6_stability_and_congestion_shapes() {
    let params = defaults();
    let mut failures = Vec::new();

    // Advanced receiver: stable region by slot 10 (both engines).
    for scheme in SchemeKind::ALL {
        let tr = evolve(scheme, ReceiverModel::Advanced, &params, 10);
        let d_ana = (tr[9].p_overall - tr[8].p_overall).abs();
        if d_ana >= 0.01 {
            failures.push(format!("analytic {scheme}: |P10−P9| = {d_ana:.4}"));
        }
        let r = sim(scheme, ReceiverModel::Advanced, params.clone(), 8_000, 10);
        let d_sim =
            (r.per_slot[9].success_prob.unwrap() - r.per_slot[8].success_prob.unwrap()).abs();
        if d_sim >= 0.01 {
            failures.push(format!("simulated {scheme}: |P̂10−P̂9| = {d_sim:.4}"));
        }
        println!("  advanced {scheme}: |ΔP| analytic={d_ana:.4} simulated={d_sim:.4}");
    }

    // Basic receiver congestion: strictly decreasing on slots 2..=10.
    for scheme in SchemeKind::ALL {
        let tr = evolve(scheme, ReceiverModel::Basic, &params, 10);
        for w in tr[1..].windows(2) {
            if w[1].p_overall >= w[0].p_overall {
                failures.push(format!(
                    "analytic basic {scheme}: P^{} ≥ P^{}",
                    w[1].traffic.slot, w[0].traffic.slot
                ));
            }
        }
        let r = sim(scheme, ReceiverModel::Basic, params.clone(), 8_000, 10);
        let probs: Vec<f64> = r.per_slot.iter().map(|s| s.success_prob.unwrap()).collect();
        for m in 2..probs.len() {
            if probs[m] >= probs[m - 1] {
                failures.push(format!(
                    "simulated basic {scheme}: P̂^{} ≥ P̂^{}",
                    m + 1,
                    m
                ));
            }
        }
    }

    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 6 (advanced stability |P10−P9| < 0.01; basic strictly \
         decreasing on slots 2–10, both engines): {verdict}"
    );
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn acceptance_7_flow_balance() {
    // Steady state, advanced receiver, λ_Dp ≤ 5: the per-device delivered
    // rate matches the arrival rate 0.1, hence R ≈ μ_New·S/T_RACH.
    let expected_r = 0.1 * 800.0 / 0.0315;
    let mut failures = Vec::new();
    for lam in [1u32, 3, 5] {
        for scheme in SchemeKind::ALL {
            let mut params = defaults();
            params.lambda_dp = lam as f64;
            let r = sim(scheme, ReceiverModel::Advanced, params, 4_000, 10);
            let s10 = &r.per_slot[9];
            let rate = s10.deliveries as f64 / s10.device_slots as f64;
            let thpt = s10.throughput_bps.unwrap();
            println!(
                "  λ={lam} {scheme}: delivered rate/device = {rate:.4} (target 0.1), \
                 R̂ = {thpt:.1} bit/s (target {expected_r:.1})"
            );
            if (rate - 0.1).abs() > 0.01 {
                failures.push(format!("λ={lam} {scheme}: rate {rate:.4}"));
            }
            if (thpt - expected_r).abs() > 0.1 * expected_r {
                failures.push(format!("λ={lam} {scheme}: throughput {thpt:.1}"));
            }
        }
    }
    let verdict = if failures.is_empty() { "PASS" } else { "FAIL" };
    println!(
        "[acceptance] criterion 7 (flow balance: delivered rate within 10% of μ_New, \
         R ≈ 2539.7 bit/s): {verdict}"
    );
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn acceptance_8_packet_conservation() {
    let mut checked = 0u32;
    for scheme in SchemeKind::ALL {
        let mut cfg = SimConfig::new(defaults(), scheme, ReceiverModel::Advanced);
        cfg.replications = 100;
        cfg.seed = SEED ^ 0x88;
        let (_, outcomes) = run_with_outcomes(&cfg);
        for o in &outcomes {
            assert_eq!(
                o.arrivals,
                o.deliveries + o.final_queue,
                "{scheme} replication {}: {} arrivals vs {} delivered + {} queued",
                o.replication,
                o.arrivals,
                o.deliveries,
                o.final_queue
            );
            checked += 1;
        }
    }
    println!(
        "[acceptance] criterion 8 (packet conservation, exact): PASS — {checked} replications"
    );
}

#[test]
fn acceptance_9_determinism() {
    for scheme in SchemeKind::ALL {
        let mut cfg = SimConfig::new(defaults(), scheme, ReceiverModel::Advanced);
        cfg.replications = 200;
        cfg.seed = SEED ^ 0x99;
        let parallel = run(&cfg);
        let serial = run_serial(&cfg);
        let rerun = run(&cfg);
        for ((a, b), c) in parallel.per_slot.iter().zip(&serial.per_slot).zip(&rerun.per_slot) {
            assert_eq!(a.deliveries, b.deliveries);
            assert_eq!(a.active, b.active);
            assert_eq!(a.energy_slot_uj.to_bits(), b.energy_slot_uj.to_bits());
            assert_eq!(
                a.success_prob.map(f64::to_bits),
                b.success_prob.map(f64::to_bits)
            );
            assert_eq!(
                a.energy_per_packet_uj.map(f64::to_bits),
                b.energy_per_packet_uj.map(f64::to_bits)
            );
            assert_eq!(a.deliveries, c.deliveries);
            assert_eq!(a.energy_slot_uj.to_bits(), c.energy_slot_uj.to_bits());
        }
    }
    println!(
        "[acceptance] criterion 9 (seeded determinism, serial ≡ parallel, bit-exact): PASS"
    );
}
