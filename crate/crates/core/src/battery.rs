//! Battery-equivalent capacities of a flexible load: the stored-energy
//! signal and the charge/discharge rate and energy capacities over a finite
//! horizon, computed by LP, with a closed-form check for steady weather.

use crate::flexset::{is_member_within, Scenario};
use crate::planner::{add_temperature_rows, require_optimal, MEMBERSHIP_TOL};
use crate::series::check_same_grid;
use crate::solver::{solve_lp, LinearProgram, Sense};
use crate::{Error, Result, Trajectory, Unit};

const LP_TOL: f64 = 1e-9;

/// Cumulative deviation energy `ẽ_k = Σ_{j<k} (p_j − p^b_j)·dt`, `N + 1`
/// samples starting at zero.
pub fn energy_state(p: &Trajectory, baseline: &Trajectory) -> Result<Trajectory> {
    check_same_grid(p, "power", baseline, "baseline")?;
    let dt = p.dt();
    let mut e = Vec::with_capacity(p.len() + 1);
    let mut acc = 0.0;
    e.push(acc);
    for (a, b) in p.values().iter().zip(baseline.values()) {
        acc += (a - b) * dt;
        e.push(acc);
    }
    Trajectory::new(dt, e, Unit::KilowattHour)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// Consume more than the baseline.
    Charge,
    /// Consume less than the baseline.
    Discharge,
}

impl Direction {
    fn sign(self) -> f64 {
        match self {
            Direction::Charge => 1.0,
            Direction::Discharge => -1.0,
        }
    }
}

/// A capacity in one direction with the sample where it peaks and the
/// feasible power trajectory that attains it.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalCapacity {
    pub value: f64,
    /// Power sample for rates, energy sample (`1..=N`) for energies.
    pub peak_sample: usize,
    pub argmax: Trajectory,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VirtualBatteryCaps {
    pub p_c: f64,
    pub p_dc: f64,
    pub e_c: f64,
    pub e_dc: f64,
    pub horizon: f64,
    pub weather: String,
}

fn prepare(scn: &Scenario) -> Result<Vec<f64>> {
    if let Some(k) = scn.first_unreachable() {
        return Err(Error::Infeasible(format!(
            "temperature bounds unreachable at sample {k}"
        )));
    }
    Ok(scn.baseline()?.power.into_values())
}

fn base_lp(scn: &Scenario) -> LinearProgram {
    let n = scn.steps();
    let mut lp = LinearProgram::new(Sense::Maximize, n);
    for k in 0..n {
        lp.set_bounds(k, 0.0, scn.params().p_rated());
    }
    add_temperature_rows(&mut lp, scn);
    lp
}

/// Solves `max sign·Σ_{j<end} p_j` and returns the clamped, verified power.
fn solve_prefix(
    scn: &Scenario,
    template: &LinearProgram,
    start: usize,
    end: usize,
    dir: Direction,
) -> Result<Vec<f64>> {
    let mut lp = template.clone();
    for j in start..end {
        lp.set_objective(j, dir.sign());
    }
    let (x, _) = require_optimal(solve_lp(&lp, LP_TOL))?;
    let p_rated = scn.params().p_rated();
    let p: Vec<f64> = x.iter().map(|v| v.clamp(0.0, p_rated)).collect();
    let traj = Trajectory::new(scn.dt(), p.clone(), Unit::Kilowatt)?;
    let verdict = is_member_within(&traj, scn, MEMBERSHIP_TOL)?;
    if let Some(v) = verdict.violation {
        return Err(Error::Solver(format!(
            "capacity trajectory leaves the set at sample {}",
            v.index
        )));
    }
    Ok(p)
}

/// Indices sorted by descending bound, lowest index first among ties.
fn by_descending(bounds: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..bounds.len()).collect();
    order.sort_by(|&a, &b| bounds[b].total_cmp(&bounds[a]).then(a.cmp(&b)));
    order
}

/// Largest one-sample power deviation from the baseline in direction `dir`.
pub fn rate_capacity(scn: &Scenario, dir: Direction) -> Result<DirectionalCapacity> {
    let base = prepare(scn)?;
    let p_rated = scn.params().p_rated();
    let bound: Vec<f64> = base
        .iter()
        .map(|&b| match dir {
            Direction::Charge => p_rated - b,
            Direction::Discharge => b,
        })
        .collect();
    let template = base_lp(scn);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for k in by_descending(&bound) {
        if let Some((v, _, _)) = &best {
            if *v >= bound[k] - LP_TOL {
                break;
            }
        }
        let p = solve_prefix(scn, &template, k, k + 1, dir)?;
        let value = dir.sign() * (p[k] - base[k]);
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, k, p));
        }
    }
    finish(scn, best)
}

/// Largest cumulative deviation energy `±ẽ(t)` over the horizon.
pub fn energy_capacity(scn: &Scenario, dir: Direction) -> Result<DirectionalCapacity> {
    let base = prepare(scn)?;
    let n = scn.steps();
    let dt = scn.dt();
    let template = base_lp(scn);
    let base_prefix: Vec<f64> = base
        .iter()
        .scan(0.0, |acc, &b| {
            *acc += b * dt;
            Some(*acc)
        })
        .collect();
    let value_at =
        |p: &[f64], t: usize| dir.sign() * (p[..t].iter().sum::<f64>() * dt - base_prefix[t - 1]);

    let steady = scn.dist().first_variation().is_none()
        && !scn.bounds().is_time_varying()
        && !scn.baseline()?.is_saturated();
    if steady {
        // Holding the baseline from any feasible state keeps ẽ constant, so
        // the terminal sample attains the maximum.
        let p = solve_prefix(scn, &template, 0, n, dir)?;
        let value = value_at(&p, n);
        return finish(scn, Some((value, n, p)));
    }

    let p_rated = scn.params().p_rated();
    let bound: Vec<f64> = (1..=n)
        .map(|t| match dir {
            Direction::Charge => p_rated * dt * t as f64 - base_prefix[t - 1],
            Direction::Discharge => base_prefix[t - 1],
        })
        .collect();
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    for i in by_descending(&bound) {
        let t = i + 1;
        if let Some((v, _, _)) = &best {
            if *v >= bound[i] - LP_TOL {
                break;
            }
        }
        let p = solve_prefix(scn, &template, 0, t, dir)?;
        let value = value_at(&p, t);
        if best.as_ref().is_none_or(|(v, _, _)| value > *v) {
            best = Some((value, t, p));
        }
    }
    finish(scn, best)
}

fn finish(scn: &Scenario, best: Option<(f64, usize, Vec<f64>)>) -> Result<DirectionalCapacity> {
    match best {
        Some((value, peak_sample, p)) => Ok(DirectionalCapacity {
            value: value.max(0.0),
            peak_sample,
            argmax: Trajectory::new(scn.dt(), p, Unit::Kilowatt)?,
        }),
        None => Err(Error::param("horizon", "need at least one step")),
    }
}

/// `(p_c, p_dc)`, kW.
pub fn rate_capacities(scn: &Scenario) -> Result<(DirectionalCapacity, DirectionalCapacity)> {
    Ok((
        rate_capacity(scn, Direction::Charge)?,
        rate_capacity(scn, Direction::Discharge)?,
    ))
}

/// `(e_c, e_dc)`, kWh.
pub fn energy_capacities(scn: &Scenario) -> Result<(DirectionalCapacity, DirectionalCapacity)> {
    Ok((
        energy_capacity(scn, Direction::Charge)?,
        energy_capacity(scn, Direction::Discharge)?,
    ))
}

/// All four capacities over the scenario horizon.
pub fn virtual_battery_caps(scn: &Scenario) -> Result<VirtualBatteryCaps> {
    let (p_c, p_dc) = rate_capacities(scn)?;
    let (e_c, e_dc) = energy_capacities(scn)?;
    Ok(VirtualBatteryCaps {
        p_c: p_c.value,
        p_dc: p_dc.value,
        e_c: e_c.value,
        e_dc: e_dc.value,
        horizon: scn.steps() as f64 * scn.dt(),
        weather: scn.dist().label().to_string(),
    })
}

/// Continuous-time charging energy for steady weather starting at the
/// setpoint: full deviation `p̃_max` until `θ̃ = −Δθ` at
/// `t₁ = RC·ln(Rη·p̃_max / (Rη·p̃_max − Δθ))`, then the hold power
/// `Δθ/(Rη)`. If the bound is never reached the ramp runs the whole horizon.
pub fn bangbang_energy_oracle(
    params: &crate::thermal::ThermalParams,
    delta_theta: f64,
    p_tilde_max: f64,
    horizon: f64,
) -> Result<f64> {
    if !(delta_theta >= 0.0 && delta_theta.is_finite()) {
        return Err(Error::param(
            "delta_theta",
            format!("must be >= 0, got {delta_theta}"),
        ));
    }
    if !(p_tilde_max >= 0.0 && p_tilde_max.is_finite()) {
        return Err(Error::param(
            "p_tilde_max",
            format!("must be >= 0, got {p_tilde_max}"),
        ));
    }
    if !(horizon >= 0.0 && horizon.is_finite()) {
        return Err(Error::param(
            "horizon",
            format!("must be >= 0, got {horizon}"),
        ));
    }
    let gain = params.dc_gain();
    let reach = gain * p_tilde_max;
    if delta_theta >= reach {
        return Ok(p_tilde_max * horizon);
    }
    let t1 = (params.time_constant() * (reach / (reach - delta_theta)).ln()).min(horizon);
    Ok(p_tilde_max * t1 + delta_theta / gain * (horizon - t1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::thermal::{equilibrium_power, ThermalParams};
    use proptest::prelude::*;

    const HOT: (f64, f64) = (32.0, 1.5);

    fn steady(
        params: ThermalParams,
        weather: (f64, f64),
        delta: f64,
        dt: f64,
        hours: f64,
    ) -> Scenario {
        Scenario::steady(
            params,
            weather.0,
            weather.1,
            24.0,
            delta,
            dt,
            (hours / dt).round() as usize,
        )
        .unwrap()
    }

    fn reference_with_headroom(up: f64) -> ThermalParams {
        let p_eq = equilibrium_power(
            &ThermalParams::reference_building(10.0).unwrap(),
            HOT.0,
            HOT.1,
            24.0,
        );
        ThermalParams::reference_building(p_eq + up).unwrap()
    }

    fn traj(dt: f64, v: Vec<f64>) -> Trajectory {
        Trajectory::new(dt, v, Unit::Kilowatt).unwrap()
    }

    #[test]
    fn energy_state_examples() {
        let b = traj(0.25, vec![1.0; 4]);
        let e = energy_state(&b, &b).unwrap();
        assert!(e.values().iter().all(|&v| v == 0.0));
        assert_eq!(e.len(), 5);
        let p = traj(0.25, vec![2.0, 2.0, 0.0, 0.0]);
        let e = energy_state(&p, &b).unwrap();
        assert_eq!(e.values(), &[0.0, 0.25, 0.5, 0.25, 0.0]);
        assert!(energy_state(&p, &traj(0.5, vec![1.0; 4])).is_err());
    }

    #[test]
    fn energy_state_of_sinusoid() {
        let dt = 1.0 / 3600.0;
        let w = 2.0 * std::f64::consts::PI;
        let b = traj(dt, vec![1.0; 3600]);
        let p =
            Trajectory::from_fn(dt, 3600, Unit::Kilowatt, |t| 1.0 + 0.3 * (w * t).sin()).unwrap();
        let e = energy_state(&p, &b).unwrap();
        let peak = e.values().iter().cloned().fold(f64::MIN, f64::max);
        // ∫ 0.3 sin(2πt) peaks at 2·0.3/(2π) after half a cycle.
        assert!((peak - 0.6 / w).abs() < 1e-4, "{peak}");
        assert!(e.values().last().unwrap().abs() < 1e-9);
    }

    #[test]
    fn oracle_values() {
        let params = ThermalParams::reference_building(3.0).unwrap();
        let t1 = params.time_constant() * (params.dc_gain() / (params.dc_gain() - 1.0)).ln();
        assert!((t1 - 0.387396).abs() < 1e-6);
        let e10 = bangbang_energy_oracle(&params, 1.0, 1.0, 10.0).unwrap();
        assert!((e10 - 1.40197).abs() < 1e-5, "{e10}");
        let e20 = bangbang_energy_oracle(&params, 1.0, 1.0, 20.0).unwrap();
        assert!((e20 - e10 - 10.0 / params.dc_gain()).abs() < 1e-12);
        assert_eq!(
            bangbang_energy_oracle(&params, 0.0, 1.0, 10.0).unwrap(),
            0.0
        );
        assert!((bangbang_energy_oracle(&params, 1.0, 1.0, t1).unwrap() - t1).abs() < 1e-12);
        assert_eq!(
            bangbang_energy_oracle(&params, 20.0, 1.0, 2.0).unwrap(),
            2.0
        );
    }

    #[test]
    fn rates_from_the_interior() {
        let params = ThermalParams::reference_building(1.5).unwrap();
        // Weather giving p_eq = 0.5 kW with no internal gain.
        let theta_a = 24.0 + 0.5 * params.dc_gain();
        let scn = steady(params, (theta_a, 0.0), 1.0, 1.0 / 60.0, 2.0);
        let (c, dc) = rate_capacities(&scn).unwrap();
        assert!((c.value - 1.0).abs() < 1e-9, "{}", c.value);
        assert_eq!(c.peak_sample, 0);
        assert!((dc.value - 0.5).abs() < 1e-9, "{}", dc.value);
        assert!(is_member_within(&c.argmax, &scn, MEMBERSHIP_TOL)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn saturated_baseline_has_no_charging_headroom() {
        let params = ThermalParams::reference_building(0.5).unwrap();
        let scn = steady(params, (30.0, 0.0), 1.0, 1.0 / 60.0, 0.5);
        assert!(scn.baseline().unwrap().is_saturated());
        let (c, _) = rate_capacities(&scn).unwrap();
        assert!(c.value.abs() < 1e-9);
    }

    #[test]
    fn zero_band_has_no_energy() {
        let scn = steady(reference_with_headroom(1.0), HOT, 0.0, 1.0 / 30.0, 2.0);
        let (c, dc) = energy_capacities(&scn).unwrap();
        assert!(
            c.value < 1e-7 && dc.value < 1e-7,
            "{} {}",
            c.value,
            dc.value
        );
    }

    #[test]
    fn lp_matches_oracle_ten_hours() {
        let params = reference_with_headroom(1.0);
        let scn = steady(params, HOT, 1.0, 1.0 / 30.0, 10.0);
        let (c, _) = energy_capacities(&scn).unwrap();
        let oracle = bangbang_energy_oracle(&params, 1.0, 1.0, 10.0).unwrap();
        assert!(
            (c.value - oracle).abs() < 1e-4,
            "lp {} oracle {oracle}",
            c.value
        );
        assert_eq!(c.peak_sample, scn.steps());
        assert!(is_member_within(&c.argmax, &scn, MEMBERSHIP_TOL)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn sweep_matches_terminal_shortcut_under_weather_change() {
        // Time-varying weather forces the per-sample sweep; with the weather
        // change at the end it must agree with the steady value on the prefix.
        let dt = 0.1;
        let params = reference_with_headroom(1.0);
        let scn = steady(params, HOT, 1.0, dt, 3.0);
        let (steady_c, _) = energy_capacities(&scn).unwrap();
        let mut ta = vec![HOT.0; 31];
        ta[30] = 20.0;
        let dist = crate::thermal::DisturbanceSeries::new(dt, ta, vec![HOT.1; 31]).unwrap();
        let varying = Scenario::new(params, scn.bounds().clone(), dist, 24.0, 24.0).unwrap();
        let (c, _) = energy_capacities(&varying).unwrap();
        assert!(c.value >= steady_c.value - 1e-9);
        assert!(is_member_within(&c.argmax, &varying, MEMBERSHIP_TOL)
            .unwrap()
            .is_feasible());
    }

    #[test]
    fn monotone_in_horizon_band_and_rating() {
        let dt = 0.1;
        let e = |up: f64, delta: f64, hours: f64| {
            energy_capacity(
                &steady(reference_with_headroom(up), HOT, delta, dt, hours),
                Direction::Charge,
            )
            .unwrap()
            .value
        };
        let base = e(1.0, 1.0, 3.0);
        assert!(e(1.0, 1.0, 5.0) >= base - 1e-9);
        assert!(e(1.0, 1.5, 3.0) >= base - 1e-9);
        assert!(e(1.5, 1.0, 3.0) >= base - 1e-9);
    }

    #[test]
    fn symmetric_scenario_is_symmetric() {
        let p_eq = equilibrium_power(
            &ThermalParams::reference_building(10.0).unwrap(),
            HOT.0,
            HOT.1,
            24.0,
        );
        let params = ThermalParams::reference_building(2.0 * p_eq).unwrap();
        let scn = steady(params, HOT, 1.0, 0.1, 4.0);
        let caps = virtual_battery_caps(&scn).unwrap();
        assert!((caps.p_c - caps.p_dc).abs() < 1e-7);
        assert!(
            (caps.e_c - caps.e_dc).abs() < 1e-7,
            "{} {}",
            caps.e_c,
            caps.e_dc
        );
        assert!((caps.horizon - 4.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_scenario_is_rejected() {
        let params = ThermalParams::reference_building(0.5).unwrap();
        let scn = steady(params, (40.0, 2.0), 1.0, 0.1, 5.0);
        assert!(matches!(rate_capacities(&scn), Err(Error::Infeasible(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(12))]
        #[test]
        fn lp_matches_oracle_across_parameters(
            r in 2.0f64..4.0, c in 1.0f64..2.0, delta in 0.5f64..1.5, up in 0.5f64..1.5,
        ) {
            let probe = ThermalParams::new(r, c, 3.5, 100.0).unwrap();
            let p_eq = equilibrium_power(&probe, HOT.0, HOT.1, 24.0);
            let params = probe.with_p_rated(p_eq + up).unwrap();
            let scn = steady(params, HOT, delta, 1.0 / 30.0, 5.0);
            let (cap, _) = energy_capacities(&scn).unwrap();
            let oracle = bangbang_energy_oracle(&params, delta, up, 5.0).unwrap();
            prop_assert!((cap.value - oracle).abs() < 1e-4, "lp {} oracle {}", cap.value, oracle);
        }
    }
}
