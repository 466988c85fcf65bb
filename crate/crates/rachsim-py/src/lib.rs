//! Python bindings: the parameter set, the closed-form per-slot model, and
//! the Monte Carlo simulator, exposed as plain functions returning dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use rachsim_core::analytic::{ReceiverModel, SchemeKind};
use rachsim_core::{analytic, energy, params, sim};

/// Wraps the core parameter struct with Python attribute access.
#[pyclass(name = "SystemParams", from_py_object)]
#[derive(Clone)]
struct PySystemParams {
    inner: params::SystemParams,
}

macro_rules! params_class {
    ($(($field:ident, $setter:ident, $ty:ty)),+ $(,)?) => {
        #[pymethods]
        impl PySystemParams {
            /// The evaluation defaults.
            #[staticmethod]
            fn defaults() -> Self {
                PySystemParams { inner: params::SystemParams::defaults() }
            }

            /// Parses a flat TOML document; unknown keys are an error.
            #[staticmethod]
            fn from_toml(text: &str) -> PyResult<Self> {
                params::SystemParams::from_toml_str(text)
                    .map(|inner| PySystemParams { inner })
                    .map_err(|e| PyValueError::new_err(e.to_string()))
            }

            #[new]
            fn new() -> Self {
                Self::defaults()
            }

            /// Raises ValueError listing every violated invariant.
            fn validate(&self) -> PyResult<()> {
                self.inner.validate().map_err(|e| PyValueError::new_err(e.to_string()))
            }

            /// The parameters as a plain dict.
            fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
                let d = PyDict::new(py);
                $(d.set_item(stringify!($field), self.inner.$field)?;)+
                Ok(d)
            }

            fn __repr__(&self) -> String {
                format!("{:?}", self.inner)
            }

            $(
                #[getter]
                fn $field(&self) -> $ty {
                    self.inner.$field
                }

                #[setter]
                fn $setter(&mut self, value: $ty) {
                    self.inner.$field = value;
                }
            )+
        }
    };
}

params_class!(
    (rho_dbm, set_rho_dbm, f64),
    (sigma2_dbm, set_sigma2_dbm, f64),
    (gamma_th_db, set_gamma_th_db, f64),
    (lambda_th_dbm, set_lambda_th_dbm, f64),
    (n_zc, set_n_zc, u32),
    (bler, set_bler, f64),
    (harq_max, set_harq_max, u32),
    (mu_new, set_mu_new, f64),
    (lambda_dp, set_lambda_dp, f64),
    (xi, set_xi, u32),
    (packet_size_bits, set_packet_size_bits, f64),
    (t_rach_us, set_t_rach_us, f64),
    (t_p_us, set_t_p_us, f64),
    (t_s_us, set_t_s_us, f64),
    (t_d_us, set_t_d_us, f64),
    (n_rar, set_n_rar, u32),
    (n_crt, set_n_crt, u32),
    (n_dci, set_n_dci, u32),
    (t_k2_us, set_t_k2_us, f64),
    (t_delta_us, set_t_delta_us, f64),
    (t_pucch_us, set_t_pucch_us, f64),
    (p_s_mw, set_p_s_mw, f64),
    (p_r_mw, set_p_r_mw, f64),
    (p_t_mw, set_p_t_mw, f64),
    (alpha, set_alpha, f64),
    (cell_area_km2, set_cell_area_km2, f64),
);

fn parse_scheme(s: &str) -> PyResult<SchemeKind> {
    s.parse().map_err(PyValueError::new_err)
}

fn parse_receiver(s: &str) -> PyResult<ReceiverModel> {
    s.parse().map_err(PyValueError::new_err)
}

/// Converts a power in dBm to linear milliwatts.
#[pyfunction]
fn dbm_to_mw(x_dbm: f64) -> PyResult<f64> {
    params::dbm_to_mw(x_dbm).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Converts a power in linear milliwatts to dBm.
#[pyfunction]
fn mw_to_dbm(x_mw: f64) -> PyResult<f64> {
    params::mw_to_dbm(x_mw).map_err(|e| PyValueError::new_err(e.to_string()))
}

/// Per-message energies (µJ) as a dict.
#[pyfunction]
fn message_energies<'py>(py: Python<'py>, p: &PySystemParams) -> PyResult<Bound<'py, PyDict>> {
    let e = energy::message_energies(&p.inner);
    let d = PyDict::new(py);
    d.set_item("e_p", e.e_p)?;
    d.set_item("e_msg2s", e.e_msg2s)?;
    d.set_item("e_msg2f", e.e_msg2f)?;
    d.set_item("e_msg3", e.e_msg3)?;
    d.set_item("e_msg4s", e.e_msg4s)?;
    d.set_item("e_msg4f", e.e_msg4f)?;
    d.set_item("e_data", e.e_data)?;
    d.set_item("e_data_harq", e.e_data_harq)?;
    d.set_item("e_msga", e.e_msga)?;
    d.set_item("e_msgbs", e.e_msgbs)?;
    d.set_item("e_msgbf", e.e_msgbf)?;
    d.set_item("e_msgbfb", e.e_msgbfb)?;
    Ok(d)
}

/// Closed-form per-slot evolution. Returns one dict per slot.
#[pyfunction]
#[pyo3(signature = (p, scheme, receiver="advanced", slots=10))]
fn evolve<'py>(
    py: Python<'py>,
    p: &PySystemParams,
    scheme: &str,
    receiver: &str,
    slots: u32,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if slots == 0 {
        return Err(PyValueError::new_err("slots must be at least 1"));
    }
    let scheme = parse_scheme(scheme)?;
    let receiver = parse_receiver(receiver)?;
    analytic::evolve(scheme, receiver, &p.inner, slots)
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("slot", s.traffic.slot)?;
            d.set_item("mu_cum", s.traffic.mu_cum)?;
            d.set_item("t_nonempty", s.traffic.t_nonempty)?;
            d.set_item("p_pre", s.p_pre)?;
            d.set_item("p_pus", s.p_pus)?;
            d.set_item("p_fb", s.p_fb)?;
            d.set_item("p_fb_pus", s.p_fb_pus)?;
            d.set_item("p_overall", s.p_overall)?;
            d.set_item("throughput_bps", s.throughput_bps)?;
            d.set_item("energy_uj", s.energy_uj)?;
            d.set_item("energy_per_packet_uj", s.energy_per_packet_uj)?;
            Ok(d)
        })
        .collect()
}

/// Monte Carlo simulation. Returns one dict per slot with pooled estimates
/// and 95% confidence half-widths.
#[pyfunction]
#[pyo3(signature = (p, scheme, receiver="advanced", slots=10, replications=1000, seed=1, pdp_mode="distributional"))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    p: &PySystemParams,
    scheme: &str,
    receiver: &str,
    slots: u32,
    replications: u32,
    seed: u64,
    pdp_mode: &str,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    if slots == 0 || replications == 0 {
        return Err(PyValueError::new_err("slots and replications must be at least 1"));
    }
    let mut cfg = sim::SimConfig::new(p.inner.clone(), parse_scheme(scheme)?, parse_receiver(receiver)?);
    cfg.slots = slots;
    cfg.replications = replications;
    cfg.seed = seed;
    cfg.pdp_mode = pdp_mode.parse().map_err(PyValueError::new_err)?;
    let result = py.detach(|| sim::run(&cfg));
    result
        .per_slot
        .into_iter()
        .map(|s| {
            let d = PyDict::new(py);
            d.set_item("slot", s.slot)?;
            d.set_item("active", s.active)?;
            d.set_item("deliveries", s.deliveries)?;
            d.set_item("success_prob", s.success_prob)?;
            d.set_item("success_ci95", s.success_ci95)?;
            d.set_item("energy_per_packet_uj", s.energy_per_packet_uj)?;
            d.set_item("energy_ci95", s.energy_ci95)?;
            d.set_item("throughput_bps", s.throughput_bps)?;
            d.set_item("fallback_rate", s.fallback_rate)?;
            Ok(d)
        })
        .collect()
}

#[pymodule]
fn rachsim_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_function(wrap_pyfunction!(dbm_to_mw, m)?)?;
    m.add_function(wrap_pyfunction!(mw_to_dbm, m)?)?;
    m.add_function(wrap_pyfunction!(message_energies, m)?)?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
