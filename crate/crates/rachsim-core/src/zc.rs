//! Zadoff-Chu sequences and the single-lag correlation used for preamble
//! detection validation.
//!
//! The root sequence is z_r[k] = exp(−jπ·r·k·(k+1)/N_ZC); preambles are its
//! cyclic shifts. Complex samples are plain (re, im) pairs.

use std::f64::consts::PI;

/// Generates the root-`r` Zadoff-Chu sequence of length `n_zc`.
pub fn zadoff_chu(root: u32, n_zc: u32) -> Vec<(f64, f64)> {
    assert!(n_zc >= 2, "ZC length must be at least 2");
    let n = n_zc as f64;
    (0..n_zc)
        .map(|k| {
            let kf = k as f64;
            // Reduce k(k+1)·r mod 2N before the trig call; keeps the phase
            // argument small so cos/sin stay accurate for long sequences.
            let q = (root as u64 * k as u64 * (k as u64 + 1)) % (2 * n_zc as u64);
            let _ = kf;
            let phase = -PI * q as f64 / n;
            (phase.cos(), phase.sin())
        })
        .collect()
}

/// The i-th preamble: the root sequence cyclically shifted by `shift`
/// samples, z^i[k] = z[(k + shift) mod N].
pub fn cyclic_shift(seq: &[(f64, f64)], shift: u32) -> Vec<(f64, f64)> {
    let n = seq.len();
    (0..n).map(|k| seq[(k + shift as usize) % n]).collect()
}

/// Cyclic correlation of `signal` with `reference` at a single lag:
/// Σ_k signal[k]·conj(reference[(k + lag) mod N]).
pub fn correlate_at_lag(signal: &[(f64, f64)], reference: &[(f64, f64)], lag: u32) -> (f64, f64) {
    assert_eq!(signal.len(), reference.len());
    let n = signal.len();
    let mut re = 0.0;
    let mut im = 0.0;
    for k in 0..n {
        let (a, b) = signal[k];
        let (c, d) = reference[(k + lag as usize) % n];
        re += a * c + b * d;
        im += b * c - a * d;
    }
    (re, im)
}

/// Builds the received preamble √ρ·h·z^i[k+τ0] + n[k] and returns the PDP
/// value |corr|² at the true lag τ0.
///
/// `h` is the complex channel coefficient and `noise` one complex sample per
/// chip (variance σ_n² total, i.e. σ/√2 per quadrature).
pub fn pdp_peak_at_true_lag(
    preamble: &[(f64, f64)],
    rho_mw: f64,
    h: (f64, f64),
    tau0: u32,
    noise: &[(f64, f64)],
) -> f64 {
    let n = preamble.len();
    assert_eq!(noise.len(), n);
    let amp = rho_mw.sqrt();
    let received: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let (zr, zi) = preamble[(k + tau0 as usize) % n];
            (
                amp * (h.0 * zr - h.1 * zi) + noise[k].0,
                amp * (h.0 * zi + h.1 * zr) + noise[k].1,
            )
        })
        .collect();
    let (re, im) = correlate_at_lag(&received, preamble, tau0);
    re * re + im * im
}
