//! # rachsim-core
//!
//! Dual-engine toolkit for contention-based random access in a single cell:
//! a closed-form analytical model and an independent Monte Carlo
//! spatio-temporal simulator for four schemes (4-step, 4-step SDT, 2-step,
//! 2-step SDT), producing per-slot packet success probability, average
//! energy per delivered packet, and throughput.
//!
//! The two engines share nothing but [`params::SystemParams`]; the simulator
//! draws real preamble groups, fading, PDP peaks, and HARQ outcomes, and is
//! used to cross-validate every closed form.
//!
//! Crate layout:
//! - [`params`] — radio/traffic/timing/power constants, unit conversions,
//!   validation, config-file loading
//! - [`analytic`] — per-slot closed forms: preamble detection, PUSCH capture,
//!   fallback, overall success, queue evolution, throughput
//! - [`energy`] — per-message energies and per-scheme average-energy mixtures
//! - [`zc`] — Zadoff-Chu sequences and single-lag correlation
//! - [`sim`] — Monte Carlo engine (PPP population, per-device FCFS queues,
//!   group detection, SINR capture, fallback, HARQ, energy accounting)
//! - [`stats`] — small statistics helpers (CIs, KS test, two-proportion test)

pub mod analytic;
pub mod energy;
pub mod numerics;
pub mod params;
pub mod sim;
pub mod stats;
pub mod zc;

pub use analytic::{evolve, ReceiverModel, SchemeKind, SlotAnalytics, TrafficState};
pub use energy::{message_energies, MessageEnergies};
pub use params::{dbm_to_mw, mw_to_dbm, SystemParams};
pub use sim::{PdpMode, SimConfig, SimResult};
