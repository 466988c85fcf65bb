//! Independent energy accountant for the simulator.
//!
//! Energies are rebuilt here from explicit radio-state timelines
//! (transmit/receive/sleep segments), not taken from the closed forms in
//! [`crate::energy`]; a consistency test pins the two routes against each
//! other to 1e-9 µJ.

use crate::params::SystemParams;

/// Per-branch energies used by the simulator, µJ.
#[derive(Debug, Clone)]
pub struct SimEnergies {
    pub e_p: f64,
    pub e_msg2s: f64,
    pub e_msg2f: f64,
    pub e_msg3: f64,
    pub e_msg4s: f64,
    pub e_msg4f: f64,
    pub e_data: f64,
    pub e_msga: f64,
    pub e_msgbs: f64,
    pub e_msgbf: f64,
    pub e_msgbfb: f64,
    /// E_data^k for k = 1..=K, indexed by k−1.
    pub e_data_k: Vec<f64>,
}

struct Timeline<'a> {
    p: &'a SystemParams,
    total_uj: f64,
}

impl<'a> Timeline<'a> {
    fn new(p: &'a SystemParams) -> Self {
        Timeline { p, total_uj: 0.0 }
    }

    fn transmit(mut self, dur_us: f64) -> Self {
        self.total_uj += self.p.p_t_mw * dur_us / 1000.0;
        self
    }

    fn receive(mut self, dur_us: f64) -> Self {
        self.total_uj += self.p.p_r_mw * dur_us / 1000.0;
        self
    }

    fn sleep(mut self, dur_us: f64) -> Self {
        self.total_uj += self.p.p_s_mw * dur_us / 1000.0;
        self
    }

    /// A PDCCH-monitored slot: decode for T_d, sleep the remainder.
    fn monitored_slots(mut self, count: f64) -> Self {
        let w = self.p.p_r_mw * self.p.t_d_us / 1000.0
            + self.p.p_s_mw * (self.p.t_s_us - self.p.t_d_us) / 1000.0;
        self.total_uj += count * w;
        self
    }

    fn uj(self) -> f64 {
        self.total_uj
    }
}

impl SimEnergies {
    pub fn new(p: &SystemParams) -> Self {
        let half_rar = p.n_rar as f64 / 2.0 - 1.0;
        let half_crt = p.n_crt as f64 / 2.0 - 1.0;

        let e_p = Timeline::new(p).transmit(p.t_p_us).sleep(p.t_s_us - p.t_p_us).uj();
        let e_msg3 = Timeline::new(p).transmit(p.t_s_us).uj();
        let e_data_k = (1..=p.harq_max)
            .map(|k| {
                let mut t = Timeline::new(p);
                for _ in 0..k {
                    // Data DCI, K2 wait, data slot, feedback gap, feedback DCI slot.
                    t = t
                        .monitored_slots(1.0)
                        .sleep(p.t_k2_us)
                        .transmit(p.t_s_us)
                        .monitored_slots(p.n_dci as f64)
                        .receive(p.t_s_us);
                }
                t.sleep(p.t_pucch_us).transmit(p.t_s_us).uj()
            })
            .collect();

        SimEnergies {
            e_p,
            e_data_k,
            e_msg2s: Timeline::new(p)
                .monitored_slots(half_rar)
                .receive(p.t_s_us)
                .sleep(p.t_k2_us + p.t_delta_us)
                .uj(),
            e_msg2f: Timeline::new(p).monitored_slots(p.n_rar as f64).uj(),
            e_msg3,
            e_msg4s: Timeline::new(p)
                .monitored_slots(half_crt)
                .receive(p.t_s_us)
                .sleep(p.t_pucch_us)
                .transmit(p.t_s_us)
                .uj(),
            e_msg4f: Timeline::new(p).monitored_slots(p.n_crt as f64).uj(),
            e_data: Timeline::new(p).transmit(p.t_s_us).uj(),
            e_msga: Timeline::new(p)
                .transmit(p.t_p_us)
                .sleep(p.t_s_us - p.t_p_us)
                .transmit(p.t_s_us)
                .uj(),
            e_msgbs: Timeline::new(p)
                .monitored_slots(half_rar)
                .receive(p.t_s_us)
                .sleep(p.t_pucch_us)
                .transmit(p.t_s_us)
                .uj(),
            e_msgbf: Timeline::new(p).monitored_slots(p.n_rar as f64).uj(),
            e_msgbfb: Timeline::new(p)
                .monitored_slots(half_rar)
                .receive(p.t_s_us)
                .sleep(p.t_k2_us + p.t_delta_us)
                .uj(),
        }
    }

    pub fn data_k(&self, k: u32) -> f64 {
        self.e_data_k[(k - 1) as usize]
    }
}
