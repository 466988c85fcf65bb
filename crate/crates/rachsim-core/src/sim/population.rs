//! Device population: PPP deployment over the cell disc and Poisson packet
//! arrivals into per-device FCFS queues.

use crate::params::SystemParams;
use rand::Rng;
use rand_distr::{Distribution, Poisson};

/// One simulated device.
///
/// Positions are drawn and kept for deployment fidelity but have no
/// numerical effect under ideal full path-loss inversion; a future
/// power-truncation extension can use them without a schema change.
#[derive(Debug, Clone)]
pub struct DeviceState {
    pub id: u32,
    /// FCFS queue length; deliveries pop exactly one packet.
    pub queue_len: u32,
    /// Position in the cell disc (km from centre).
    pub position_km: (f64, f64),
    /// Cumulative energy spent across all attempts (µJ). Non-decreasing.
    pub energy_uj: f64,
}

/// Draws the population: device count ~ Poisson(λ_Dp·ξ), positions uniform
/// on the disc of the configured area, all queues empty.
pub fn deploy(params: &SystemParams, rng: &mut impl Rng) -> Vec<DeviceState> {
    let mean = params.mean_population();
    let count = if mean > 0.0 {
        Poisson::new(mean).expect("positive mean").sample(rng) as u64
    } else {
        0
    };
    let radius = (params.cell_area_km2 / std::f64::consts::PI).sqrt();
    (0..count as u32)
        .map(|id| {
            // Uniform on the disc: angle uniform, radius by inverse CDF.
            let theta = rng.random::<f64>() * std::f64::consts::TAU;
            let r = radius * rng.random::<f64>().sqrt();
            DeviceState {
                id,
                queue_len: 0,
                position_km: (r * theta.cos(), r * theta.sin()),
                energy_uj: 0.0,
            }
        })
        .collect()
}

/// Adds an independent Poisson(μ_New) batch of packets to every queue.
/// Returns the total number of arrivals. No packet is ever dropped.
pub fn arrivals(pop: &mut [DeviceState], mu_new: f64, rng: &mut impl Rng) -> u64 {
    if mu_new <= 0.0 {
        return 0;
    }
    let dist = Poisson::new(mu_new).expect("positive mean");
    let mut total = 0u64;
    for dev in pop.iter_mut() {
        let k = dist.sample(rng) as u32;
        dev.queue_len += k;
        total += k as u64;
    }
    total
}
