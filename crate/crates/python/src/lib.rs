//! Python bindings for `vesflex`. Scenarios are passed as plain numbers and
//! lists; every function builds a constant-weather scenario starting at the
//! setpoint unless stated otherwise.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use vesflex::battery::{bangbang_energy_oracle as oracle, energy_capacity as lp_energy, Direction};
use vesflex::ensemble::min_loads as ensemble_min_loads;
use vesflex::flexset::{envelope, Scenario};
use vesflex::humidity::{latent_sensible_split, MoistAirState, PsychroConstants};
use vesflex::planner::{plan as plan_reference, Norm, PlanRequest};
use vesflex::thermal::{simulate as simulate_rc, DisturbanceSeries, ThermalParams};
use vesflex::{Error, Trajectory, Unit};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Infeasible(_)
        | Error::EmptyEnvelope { .. }
        | Error::LoadCapExceeded { .. }
        | Error::Solver(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

#[allow(clippy::too_many_arguments)]
fn steady(
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
    theta_a: f64,
    q_d: f64,
    theta_sp: f64,
    delta_theta: f64,
    dt: f64,
    steps: usize,
) -> Result<Scenario, Error> {
    let params = ThermalParams::new(r, c, eta_cop, p_rated)?;
    Scenario::steady(params, theta_a, q_d, theta_sp, delta_theta, dt, steps)
}

/// Temperature trajectory (len(p) + 1 samples) under power `p` and weather.
#[pyfunction]
#[pyo3(signature = (r, c, eta_cop, p_rated, theta0, p, theta_a, q_d, dt))]
#[allow(clippy::too_many_arguments)]
fn simulate(
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
    theta0: f64,
    p: Vec<f64>,
    theta_a: Vec<f64>,
    q_d: Vec<f64>,
    dt: f64,
) -> PyResult<Vec<f64>> {
    let params = ThermalParams::new(r, c, eta_cop, p_rated).map_err(to_py)?;
    let dist = DisturbanceSeries::new(dt, theta_a, q_d).map_err(to_py)?;
    let p = Trajectory::new(dt, p, Unit::Kilowatt).map_err(to_py)?;
    Ok(simulate_rc(&params, theta0, &p, &dist)
        .map_err(to_py)?
        .into_values())
}

/// Quasi-steady envelope `(p_lo, p_hi)` for constant weather.
#[pyfunction]
#[pyo3(signature = (r, c, eta_cop, p_rated, theta_a, q_d, theta_sp, delta_theta, dt, steps))]
#[allow(clippy::too_many_arguments)]
fn flex_envelope(
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
    theta_a: f64,
    q_d: f64,
    theta_sp: f64,
    delta_theta: f64,
    dt: f64,
    steps: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let scn = steady(
        r,
        c,
        eta_cop,
        p_rated,
        theta_a,
        q_d,
        theta_sp,
        delta_theta,
        dt,
        steps,
    )
    .map_err(to_py)?;
    let env = envelope(&scn).map_err(to_py)?;
    Ok((env.p_lo().to_vec(), env.p_hi().to_vec()))
}

/// Projection of `reference` onto the flexibility set: `(p_star, theta_star)`.
#[pyfunction]
#[pyo3(signature = (r, c, eta_cop, p_rated, theta_a, q_d, theta_sp, delta_theta, dt, reference, norm = "two"))]
#[allow(clippy::too_many_arguments)]
fn plan(
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
    theta_a: f64,
    q_d: f64,
    theta_sp: f64,
    delta_theta: f64,
    dt: f64,
    reference: Vec<f64>,
    norm: &str,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let norm: Norm = norm.parse().map_err(to_py)?;
    let n = reference.len();
    let scn = steady(
        r,
        c,
        eta_cop,
        p_rated,
        theta_a,
        q_d,
        theta_sp,
        delta_theta,
        dt,
        n,
    )
    .map_err(to_py)?;
    let r_ba = Trajectory::new(dt, reference, Unit::Kilowatt).map_err(to_py)?;
    let res = plan_reference(&PlanRequest::new(scn, r_ba, norm)).map_err(to_py)?;
    Ok((res.p_star.into_values(), res.theta_star.into_values()))
}

/// Sensible and latent specific coil loads (kJ/kg) and the latent fraction.
#[pyfunction]
fn humidity_split(
    mixed_t: f64,
    mixed_w: f64,
    conditioned_t: f64,
    conditioned_w: f64,
) -> PyResult<(f64, f64, Option<f64>)> {
    let m = MoistAirState::new(mixed_t, mixed_w).map_err(to_py)?;
    let c = MoistAirState::new(conditioned_t, conditioned_w).map_err(to_py)?;
    let s = latent_sensible_split(m, c, &PsychroConstants::default());
    Ok((s.sensible, s.latent, s.latent_fraction))
}

/// Fewest pulse-pair loads that track `reference` (kW) exactly.
#[pyfunction]
#[pyo3(signature = (reference, u = 1.0, cap = 1000))]
fn min_loads(reference: Vec<f64>, u: f64, cap: usize) -> PyResult<usize> {
    ensemble_min_loads(&reference, u, cap).map_err(to_py)
}

/// Charging energy capacity (kWh) by LP over `steps` of `dt` hours.
#[pyfunction]
#[pyo3(signature = (r, c, eta_cop, p_rated, theta_a, q_d, theta_sp, delta_theta, dt, steps))]
#[allow(clippy::too_many_arguments)]
fn energy_capacity(
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
    theta_a: f64,
    q_d: f64,
    theta_sp: f64,
    delta_theta: f64,
    dt: f64,
    steps: usize,
) -> PyResult<f64> {
    let scn = steady(
        r,
        c,
        eta_cop,
        p_rated,
        theta_a,
        q_d,
        theta_sp,
        delta_theta,
        dt,
        steps,
    )
    .map_err(to_py)?;
    Ok(lp_energy(&scn, Direction::Charge).map_err(to_py)?.value)
}

/// Closed-form charging energy for steady weather starting at the setpoint.
#[pyfunction]
fn bangbang_energy_oracle(
    r: f64,
    c: f64,
    eta_cop: f64,
    delta_theta: f64,
    p_tilde_max: f64,
    horizon: f64,
) -> PyResult<f64> {
    let params = ThermalParams::new(r, c, eta_cop, 1.0).map_err(to_py)?;
    oracle(&params, delta_theta, p_tilde_max, horizon).map_err(to_py)
}

#[pymodule]
fn vesflex_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(flex_envelope, m)?)?;
    m.add_function(wrap_pyfunction!(plan, m)?)?;
    m.add_function(wrap_pyfunction!(humidity_split, m)?)?;
    m.add_function(wrap_pyfunction!(min_loads, m)?)?;
    m.add_function(wrap_pyfunction!(energy_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(bangbang_energy_oracle, m)?)?;
    Ok(())
}
