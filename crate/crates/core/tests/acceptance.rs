//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vesflex::battery::{bangbang_energy_oracle, energy_capacity, Direction};
use vesflex::deferrable::{counterexample_check, hot_day_energy, DeferrableKind, DeferrableSpec};
use vesflex::ensemble::{
    min_loads, schedule_tracking, square_wave, triangle_staircase, validate_schedule,
};
use vesflex::flexset::{envelope, is_member, sinusoid_trajectory, Scenario};
use vesflex::humidity::{
    latent_fraction, latent_sensible_split, PsychroConstants, DESIGN_CONDITIONED_AIR,
    DESIGN_MIXED_AIR,
};
use vesflex::planner::{plan, Norm, PlanRequest};
use vesflex::qos::QosBounds;
use vesflex::solver::{solve_lp, LinearProgram, Sense};
use vesflex::thermal::{
    equilibrium_power, sine_response_amplitude, tf_magnitude, DisturbanceSeries, StepMap,
    ThermalParams,
};
use vesflex::{Trajectory, Unit};

type Outcome = Result<String, String>;

const DT: f64 = 1.0 / 60.0;
const HOT: (f64, f64) = (32.0, 1.5);

fn paper(p_rated: f64) -> ThermalParams {
    ThermalParams::reference_building(p_rated).expect("reference parameters are valid")
}

fn steady(
    params: ThermalParams,
    weather: (f64, f64),
    delta: f64,
    dt: f64,
    steps: usize,
) -> Scenario {
    Scenario::steady(params, weather.0, weather.1, 24.0, delta, dt, steps).expect("valid scenario")
}

fn timed(limit: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    match out {
        Ok(msg) if took <= limit => Ok(format!("{msg} [{:.2} s]", took.as_secs_f64())),
        Ok(msg) => Err(format!(
            "{msg} but took {:.2} s (limit {} s)",
            took.as_secs_f64(),
            limit.as_secs()
        )),
        Err(msg) => Err(format!("{msg} [{:.2} s]", took.as_secs_f64())),
    }
}

fn check(ok: bool, msg: String) -> Outcome {
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn envelope_number() -> Outcome {
    let scn = steady(paper(3.0), (30.0, 1.0), 1.0, DT, 60);
    let env = envelope(&scn).map_err(|e| e.to_string())?;
    let hw = env.half_width()[0];
    check(
        (hw - 0.1055).abs() <= 1e-3,
        format!("half-width {hw:.6} kW"),
    )
}

fn conservativeness_refutation() -> Outcome {
    let scn = steady(paper(3.0), (30.0, 1.0), 1.0, DT, 600);
    let sine = sinusoid_trajectory(&scn, 0.3, TAU).map_err(|e| e.to_string())?;
    let sine_ok = is_member(&sine, &scn)
        .map_err(|e| e.to_string())?
        .is_feasible();
    let hold = scn
        .baseline()
        .map_err(|e| e.to_string())?
        .power
        .map(|v| v + 0.3)
        .map_err(|e| e.to_string())?;
    let v = is_member(&hold, &scn).map_err(|e| e.to_string())?.violation;
    let t = v.map(|v| v.index as f64 * DT);
    let hold_ok = t.is_some_and(|t| (t - 1.51).abs() <= 0.02);
    check(
        sine_ok && hold_ok,
        format!("0.3 kW sinusoid member = {sine_ok}; 0.3 kW hold first violation at {t:?} h"),
    )
}

fn frequency_fidelity() -> Outcome {
    let params = paper(3.0);
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 4.0] {
        let omega = m * TAU;
        let dt = 1.0 / (120.0 * m);
        let sim = sine_response_amplitude(&params, 0.3, omega, dt, 8.0 * params.time_constant(), 4)
            .map_err(|e| e.to_string())?;
        let expected = 0.3 * tf_magnitude(&params, omega);
        worst = worst.max((sim / expected - 1.0).abs());
    }
    check(
        worst <= 0.02,
        format!("max relative amplitude error {:.4}%", 100.0 * worst),
    )
}

fn humidity() -> Outcome {
    let split = latent_sensible_split(
        DESIGN_MIXED_AIR,
        DESIGN_CONDITIONED_AIR,
        &PsychroConstants::default(),
    );
    let fraction = latent_fraction(20.0, 11.0).unwrap_or(f64::NAN);
    check(
        (split.latent - 11.28).abs() <= 0.01 && (fraction - 0.355).abs() <= 0.005,
        format!(
            "latent {:.4} kJ/kg, fraction(20, 11) = {:.2}%",
            split.latent,
            100.0 * fraction
        ),
    )
}

fn deferrable_counterexample() -> Outcome {
    let p_hot = equilibrium_power(&paper(10.0), HOT.0, HOT.1, 24.0);
    let params = paper(p_hot + 1.0);
    let day =
        |w: (f64, f64)| DisturbanceSeries::constant(DT, w.0, w.1, 1440).expect("valid weather");
    let e = hot_day_energy(&params, 24.0, &day(HOT)).map_err(|e| e.to_string())?;
    let spec = DeferrableSpec::new(
        0.0,
        Some(e),
        24.0,
        params.p_rated(),
        DeferrableKind::Battery,
    )
    .map_err(|e| e.to_string())?;
    let bounds = QosBounds::symmetric(24.0, 1.0).map_err(|e| e.to_string())?;
    let cold =
        Scenario::new(params, bounds, day((15.0, 0.2)), 24.0, 24.0).map_err(|e| e.to_string())?;
    let r = counterexample_check(&spec, &cold).map_err(|e| e.to_string())?;
    check(
        r.deferrable_ok && !r.qos_ok,
        format!(
            "E = {e:.4} kWh: deferrable_ok = {}, qos_ok = {}, first violation at {:?} h",
            r.deferrable_ok,
            r.qos_ok,
            r.first_violation.map(|v| v.index as f64 * DT)
        ),
    )
}

fn ensemble() -> Outcome {
    let mut notes = Vec::new();
    let mut ok = true;
    for period in [20, 21] {
        let tri = triangle_staircase(5, 1.0, period).map_err(|e| e.to_string())?;
        let needed = min_loads(&tri, 1.0, usize::MAX).map_err(|e| e.to_string())?;
        let tracked = schedule_tracking(&tri, 1.0, 24).is_ok();
        ok &= tracked;
        notes.push(format!(
            "triangle/{period} needs {needed} loads (<= 24: {tracked})"
        ));
    }
    let mut square_ok = true;
    for n in 1..=5 {
        let wave = square_wave(n as f64, 1, 4);
        square_ok &= schedule_tracking(&wave, 1.0, n)
            .map(|s| {
                s.loads_used() == n && s.aggregate == wave && validate_schedule(&s).unwrap_or(false)
            })
            .unwrap_or(false);
    }
    ok &= square_ok;
    notes.push(format!(
        "square wave amplitude n·u with n loads for n = 1..5: {square_ok}"
    ));
    check(ok, notes.join("; "))
}

fn battery() -> Outcome {
    let p_eq = equilibrium_power(&paper(10.0), HOT.0, HOT.1, 24.0);
    let params = paper(p_eq + 1.0);
    let dt = 1.0 / 30.0;
    let scn = steady(params, HOT, 1.0, dt, 300);
    let lp = energy_capacity(&scn, Direction::Charge)
        .map_err(|e| e.to_string())?
        .value;
    let oracle = bangbang_energy_oracle(&params, 1.0, 1.0, 10.0).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let probe = ThermalParams::new(
            rng.random_range(2.0..4.0),
            rng.random_range(1.0..2.0),
            3.5,
            100.0,
        )
        .map_err(|e| e.to_string())?;
        let delta = rng.random_range(0.5..1.5);
        let up = rng.random_range(0.5..1.5);
        let p_eq = equilibrium_power(&probe, HOT.0, HOT.1, 24.0);
        let params = probe.with_p_rated(p_eq + up).map_err(|e| e.to_string())?;
        let scn = steady(params, HOT, delta, dt, 150);
        let cap = energy_capacity(&scn, Direction::Charge)
            .map_err(|e| e.to_string())?
            .value;
        let want = bangbang_energy_oracle(&params, delta, up, 5.0).map_err(|e| e.to_string())?;
        worst = worst.max((cap - want).abs());
    }
    check(
        (lp - oracle).abs() <= 1e-4 && worst <= 1e-4,
        format!(
            "10 h: lp {lp:.6} vs oracle {oracle:.6} kWh; 50-point sweep max error {worst:.2e} kWh"
        ),
    )
}

fn envelope_soundness(rng: &mut ChaCha8Rng) -> Result<bool, String> {
    for _ in 0..200 {
        let ta = rng.random_range(26.0..34.0);
        let qd = rng.random_range(0.5..2.0);
        let theta0 = rng.random_range(23.0..25.0);
        let dist = DisturbanceSeries::constant(DT, ta, qd, 240).map_err(|e| e.to_string())?;
        let bounds = QosBounds::symmetric(24.0, 1.0).map_err(|e| e.to_string())?;
        let scn =
            Scenario::new(paper(3.0), bounds, dist, 24.0, theta0).map_err(|e| e.to_string())?;
        let env = envelope(&scn).map_err(|e| e.to_string())?;
        let p: Vec<f64> = (0..240)
            .map(|k| env.p_lo()[k] + rng.random_range(0.0..=1.0) * (env.p_hi()[k] - env.p_lo()[k]))
            .collect();
        let p = Trajectory::new(DT, p, Unit::Kilowatt).map_err(|e| e.to_string())?;
        if !is_member(&p, &scn)
            .map_err(|e| e.to_string())?
            .is_feasible()
        {
            return Ok(false);
        }
    }
    Ok(true)
}

fn planner_idempotent() -> Result<bool, String> {
    let scn = steady(paper(3.0), (30.0, 1.0), 1.0, 0.1, 60);
    let base = scn.baseline().map_err(|e| e.to_string())?.power;
    let r = base.map(|v| v + 0.4).map_err(|e| e.to_string())?;
    let first = plan(&PlanRequest::new(scn.clone(), r, Norm::Two)).map_err(|e| e.to_string())?;
    let again =
        plan(&PlanRequest::new(scn, first.p_star.clone(), Norm::Two)).map_err(|e| e.to_string())?;
    Ok(first
        .p_star
        .values()
        .iter()
        .zip(again.p_star.values())
        .all(|(a, b)| (a - b).abs() <= 1e-6))
}

/// Best squared error over all power sequences on a `step` lattice.
fn lattice_optimum(scn: &Scenario, r: &[f64], step: f64) -> f64 {
    let map = StepMap::new(scn.params(), scn.dt());
    let levels = (scn.params().p_rated() / step).round() as usize;
    let (ta, qd) = (scn.dist().theta_a()[0], scn.dist().q_d()[0]);
    let (lo, hi) = (scn.bounds().theta_min(), scn.bounds().theta_max());
    let mut best = f64::INFINITY;
    let mut stack = vec![(0usize, scn.theta0(), 0.0f64)];
    while let Some((k, theta, cost)) = stack.pop() {
        if cost >= best {
            continue;
        }
        if k == r.len() {
            best = cost;
            continue;
        }
        let mut order: Vec<f64> = (0..=levels).map(|i| i as f64 * step).collect();
        order.sort_by(|a, b| (b - r[k]).abs().total_cmp(&(a - r[k]).abs()));
        for p in order {
            let t = map.step(theta, ta, qd, p);
            if (lo..=hi).contains(&t) {
                stack.push((k + 1, t, cost + (p - r[k]).powi(2)));
            }
        }
    }
    best
}

fn planner_lattice() -> Result<bool, String> {
    let dt = 0.25;
    let scn = steady(paper(2.0), (30.0, 1.0), 1.0, dt, 5);
    let base = scn.baseline().map_err(|e| e.to_string())?.power;
    let r: Vec<f64> = base.values().iter().map(|b| b + 0.5).collect();
    let rt = Trajectory::new(dt, r.clone(), Unit::Kilowatt).map_err(|e| e.to_string())?;
    let res = plan(&PlanRequest::new(scn.clone(), rt, Norm::Two)).map_err(|e| e.to_string())?;
    let qp = res.tracking_error.l2.powi(2);
    let lattice = lattice_optimum(&scn, &r, 0.01);
    Ok(qp > 1e-3 && qp <= lattice + 1e-9 && lattice - qp < 5.0 * (2.0 * 0.01 * 0.3 + 1e-4))
}

/// Single-load rows of length `h`: idle slots and adjacent opposite pairs.
fn rows(h: usize) -> Vec<Vec<i64>> {
    if h == 0 {
        return vec![vec![]];
    }
    let mut out: Vec<Vec<i64>> = rows(h - 1)
        .into_iter()
        .map(|r| [vec![0], r].concat())
        .collect();
    if h >= 2 {
        for tail in rows(h - 2) {
            for s in [1, -1] {
                out.push([vec![s, -s], tail.clone()].concat());
            }
        }
    }
    out
}

fn ensemble_oracle() -> Result<bool, String> {
    use std::collections::HashMap;
    for h in 1..=6 {
        let all = rows(h);
        let mut best: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut layer: Vec<(usize, Vec<i64>)> = vec![(0, vec![0; h])];
        best.insert(vec![0; h], 0);
        for used in 1..=4 {
            let mut next = Vec::new();
            for (from, agg) in &layer {
                for (i, row) in all.iter().enumerate().skip(*from) {
                    let a: Vec<i64> = agg.iter().zip(row).map(|(x, y)| x + y).collect();
                    best.entry(a.clone()).or_insert(used);
                    next.push((i, a));
                }
            }
            layer = next;
        }
        for (agg, k) in &best {
            let r: Vec<f64> = agg.iter().map(|&v| v as f64).collect();
            if min_loads(&r, 1.0, 4).ok() != Some(*k) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn solver_deterministic() -> Result<bool, String> {
    let mut lp = LinearProgram::new(Sense::Maximize, 3);
    for (j, c) in [3.0, 2.0, 4.0].into_iter().enumerate() {
        lp.set_objective(j, c);
        lp.set_bounds(j, 0.0, 10.0);
    }
    lp.add_le(vec![(0, 1.0), (1, 1.0), (2, 2.0)], 12.0);
    lp.add_le(vec![(0, 2.0), (1, 1.0), (2, 3.0)], 15.0);
    let lp_same = solve_lp(&lp, 1e-9) == solve_lp(&lp, 1e-9);
    let scn = steady(paper(3.0), (30.0, 1.0), 1.0, 0.1, 40);
    let r = scn
        .baseline()
        .map_err(|e| e.to_string())?
        .power
        .map(|v| v + 0.3)
        .map_err(|e| e.to_string())?;
    let req = PlanRequest::new(scn, r, Norm::Two);
    let a = plan(&req).map_err(|e| e.to_string())?;
    let b = plan(&req).map_err(|e| e.to_string())?;
    Ok(lp_same && a.p_star == b.p_star && a.report == b.report)
}

fn property_suites() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let results = [
        ("envelope soundness x200", envelope_soundness(&mut rng)?),
        ("planner idempotence", planner_idempotent()?),
        ("planner lattice optimality", planner_lattice()?),
        ("ensemble oracle equivalence", ensemble_oracle()?),
        ("solver determinism", solver_deterministic()?),
    ];
    let msg = results
        .iter()
        .map(|(n, ok)| format!("{n}: {}", if *ok { "ok" } else { "FAILED" }))
        .collect::<Vec<_>>();
    check(results.iter().all(|(_, ok)| *ok), msg.join("; "))
}

type Criterion = (&'static str, u64, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("envelope half-width", 1, envelope_number),
        (
            "conservativeness refutation",
            1,
            conservativeness_refutation,
        ),
        ("frequency-response fidelity", 5, frequency_fidelity),
        ("humidity latent load", 1, humidity),
        ("deferrable counterexample", 1, deferrable_counterexample),
        ("ensemble tracking", 30, ensemble),
        ("battery capacities", 60, battery),
        ("property suites", 120, property_suites),
    ];
    let mut failed = 0;
    for (i, (name, limit, f)) in criteria.into_iter().enumerate() {
        match timed(Duration::from_secs(limit), f) {
            Ok(msg) => println!("PASS {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 8 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
