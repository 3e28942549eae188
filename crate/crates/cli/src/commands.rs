use std::fs::{self, File};
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use vesflex::battery::virtual_battery_caps;
use vesflex::deferrable::{counterexample_check, hot_day_energy, DeferrableSpec};
use vesflex::ensemble::{schedule_tracking, triangle_staircase};
use vesflex::flexset::{conservativeness_curve, envelope as flex_envelope, is_member};
use vesflex::humidity::{
    coil_thermal_power, electric_demand_cd, latent_sensible_split, AhuOperatingPoint, MoistAirState,
};
use vesflex::io;
use vesflex::planner::{plan as plan_reference, receding_horizon, Norm, PlanRequest};
use vesflex::thermal::{equilibrium_power, DisturbanceSeries};
use vesflex::{Trajectory, Unit};

use crate::config::{Config, WeatherOverride};
use crate::Common;

fn load(common: &Common) -> Result<Config> {
    Config::load(common.config.as_deref())
}

fn output(common: &Common, name: &str) -> Result<(PathBuf, BufWriter<File>)> {
    fs::create_dir_all(&common.out_dir)
        .with_context(|| format!("creating {}", common.out_dir.display()))?;
    let path = common.out_dir.join(name);
    let file = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
    Ok((path, BufWriter::new(file)))
}

fn no_override() -> WeatherOverride {
    WeatherOverride::default()
}

pub fn simulate(
    common: &Common,
    power: Option<PathBuf>,
    disturbance: Option<PathBuf>,
) -> Result<()> {
    let cfg = load(common)?;
    let scn = cfg.scenario(&no_override(), disturbance.as_deref())?;
    let p = match &power {
        Some(path) => {
            io::read_power(File::open(path).with_context(|| format!("opening {}", path.display()))?)
                .with_context(|| format!("reading power {}", path.display()))?
        }
        None => scn.baseline()?.power,
    };
    let theta = scn.simulate(&p).context("simulating")?;
    let verdict = is_member(&p, &scn)?;
    let (path, w) = output(common, "simulate.csv")?;
    io::write_series(w, &io::TEMPERATURE_HEADER, &theta)?;
    let (lo, hi) = theta
        .values()
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &t| (a.min(t), b.max(t)));
    println!("steps={} theta_min_C={lo} theta_max_C={hi}", p.len());
    match verdict.violation {
        None => println!("qos_ok=true"),
        Some(v) => println!(
            "qos_ok=false first_violation_t_hours={} theta_C={}",
            v.index as f64 * scn.dt(),
            v.value
        ),
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn envelope(common: &Common, disturbance: Option<PathBuf>, samples: usize) -> Result<()> {
    let cfg = load(common)?;
    let scn = cfg.scenario(&no_override(), disturbance.as_deref())?;
    let env = flex_envelope(&scn)?;
    let (path, w) = output(common, "envelope.csv")?;
    io::write_envelope(w, &env)?;
    let hw = env.half_width();
    let (lo, hi) = hw
        .iter()
        .fold((f64::MAX, f64::MIN), |(a, b), &v| (a.min(v), b.max(v)));
    println!("half_width_kW min={lo} max={hi}");
    if samples > 0 {
        let mut rng = ChaCha8Rng::seed_from_u64(common.seed);
        let mut feasible = 0;
        for _ in 0..samples {
            let p: Vec<f64> = (0..env.len())
                .map(|k| {
                    env.p_lo()[k] + rng.random_range(0.0..=1.0) * (env.p_hi()[k] - env.p_lo()[k])
                })
                .collect();
            let p = Trajectory::new(scn.dt(), p, Unit::Kilowatt)?;
            feasible += usize::from(is_member(&p, &scn)?.is_feasible());
        }
        println!(
            "soundness seed={} feasible={feasible}/{samples}",
            common.seed
        );
        if feasible != samples {
            bail!(
                "{} of {samples} trajectories inside the envelope left the temperature band",
                samples - feasible
            );
        }
    }
    println!("wrote {}", path.display());
    Ok(())
}

pub fn freq(common: &Common, omega_cycles: Option<Vec<f64>>) -> Result<()> {
    let cfg = load(common)?;
    let scn = cfg.scenario(&no_override(), None)?;
    let cycles = omega_cycles.unwrap_or_else(|| cfg.freq.omega_cycles_per_hour.clone());
    if let Some(bad) = cycles.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        bail!("frequencies must be finite and >= 0 cycles/h, got {bad}");
    }
    let omegas: Vec<f64> = cycles.iter().map(|c| c * std::f64::consts::TAU).collect();
    let curve = conservativeness_curve(&scn, &omegas)?;
    for (c, pt) in cycles.iter().zip(&curve) {
        println!(
            "omega_cycles_per_hour={c} A_max = {:.5} kW (unclamped {:.5} kW, ratio {:.4})",
            pt.a_max, pt.a_max_unclamped, pt.ratio_unclamped
        );
    }
    let col = |f: fn(&vesflex::flexset::ConservativenessPoint) -> f64| {
        curve.iter().map(f).collect::<Vec<f64>>()
    };
    let cols = [
        col(|p| p.omega),
        col(|p| p.a_max_unclamped),
        col(|p| p.a_max),
        col(|p| p.ratio_unclamped),
        col(|p| p.ratio),
    ];
    let (path, w) = output(common, "freq.csv")?;
    let refs: Vec<&[f64]> = cols.iter().map(Vec::as_slice).collect();
    io::write_table(w, &io::FREQ_HEADER, &refs)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn plan(
    common: &Common,
    reference: Option<PathBuf>,
    disturbance: Option<PathBuf>,
    norm: Option<String>,
    horizon_steps: Option<usize>,
) -> Result<()> {
    let cfg = load(common)?;
    let scn = cfg.scenario(&no_override(), disturbance.as_deref())?;
    let norm: Norm = norm.unwrap_or_else(|| cfg.plan.norm.clone()).parse()?;
    let r = match reference.or_else(|| cfg.plan.reference_csv.as_ref().map(|p| cfg.resolve(p))) {
        Some(path) => io::read_reference(
            File::open(&path).with_context(|| format!("opening {}", path.display()))?,
        )
        .with_context(|| format!("reading reference {}", path.display()))?,
        None => {
            let offset = cfg.plan.reference_offset;
            scn.baseline()?.power.map(|b| b + offset)?
        }
    };
    let horizon = horizon_steps.or(cfg.plan.horizon_steps);
    let (p, theta) = match horizon {
        None => {
            let res = plan_reference(&PlanRequest::new(scn.clone(), r.clone(), norm))?;
            println!(
                "norm={norm} tracking_error l1={} l2={} linf={} iterations={}",
                res.tracking_error.l1,
                res.tracking_error.l2,
                res.tracking_error.linf,
                res.report.iterations
            );
            (res.p_star, res.theta_star)
        }
        Some(h) => {
            if h == 0 || h > r.len() {
                bail!("horizon_steps must be in 1..={}, got {h}", r.len());
            }
            let windows = r.len() - h + 1;
            let forecasts = (0..windows)
                .map(|i| r.slice(i, h))
                .collect::<vesflex::Result<Vec<_>>>()?;
            let rh = receding_horizon(&scn, &forecasts, norm, h, 1)?;
            println!("norm={norm} receding windows={windows} horizon_steps={h}");
            (rh.executed, rh.theta)
        }
    };
    let (path, w) = output(common, "plan.csv")?;
    io::write_plan(w, &p, &theta)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn humidity(common: &Common) -> Result<()> {
    let cfg = load(common)?;
    let h = &cfg.humidity;
    let mixed = MoistAirState::new(h.mixed_t, h.mixed_w).context("mixed-air state")?;
    let conditioned =
        MoistAirState::new(h.conditioned_t, h.conditioned_w).context("conditioned-air state")?;
    let op = AhuOperatingPoint::new(h.m_dot, mixed, conditioned, h.eta_cop_ch)?;
    let q = coil_thermal_power(&op);
    let p = electric_demand_cd(&op);
    let split = latent_sensible_split(mixed, conditioned, &op.constants());
    let values = [
        Some(q),
        Some(p),
        Some(split.sensible),
        Some(split.latent),
        split.latent_fraction,
    ];
    println!(
        "q_cd_kW={q} p_cd_kW={p} sensible_kJkg={} latent_kJkg={} latent_fraction={}",
        split.sensible,
        split.latent,
        split
            .latent_fraction
            .map_or_else(|| "n/a".into(), |f| f.to_string())
    );
    let (path, w) = output(common, "humidity.csv")?;
    io::write_record(w, &io::HUMIDITY_HEADER, &values)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn deferrable(common: &Common, kind: Option<String>) -> Result<()> {
    let cfg = load(common)?;
    let d = &cfg.deferrable;
    if d.check.headroom.is_some() {
        bail!("set `headroom_kW` in [deferrable], not in [deferrable.check]");
    }
    let mut check = cfg.scenario(&d.check, None)?;
    let dt = check.dt();
    let hot_steps = (d.window_hours / dt).round() as usize;
    let hot =
        DisturbanceSeries::constant(dt, d.hot_theta_a, d.hot_q_d, hot_steps)?.with_label("hot day");
    let mut params = *check.params();
    if let Some(headroom) = d.headroom {
        let p_eq = equilibrium_power(&params, d.hot_theta_a, d.hot_q_d, cfg.scenario.theta_sp);
        params = params.with_p_rated(p_eq + headroom)?;
        check = check.with_params(params);
    }
    let energy = match d.energy {
        Some(e) => e,
        None => hot_day_energy(&params, cfg.scenario.theta_sp, &hot)?,
    };
    let kind = kind.unwrap_or_else(|| d.kind.clone()).parse()?;
    let spec = DeferrableSpec::new(
        d.tau_hours,
        Some(energy),
        d.window_hours,
        d.power_cap.unwrap_or(params.p_rated()),
        kind,
    )?;
    let r = counterexample_check(&spec, &check)?;
    let v = r.first_violation;
    println!(
        "kind={kind} energy_kWh={energy} power_cap_kW={} deferrable_ok={} qos_ok={}",
        spec.power_cap(),
        r.deferrable_ok,
        r.qos_ok
    );
    if let Some(v) = v {
        println!(
            "first_violation_t_hours={} value={}",
            v.index as f64 * dt,
            v.value
        );
    }
    let flag = |b: bool| Some(if b { 1.0 } else { 0.0 });
    let values = [
        flag(r.deferrable_ok),
        flag(r.qos_ok),
        v.map(|v| v.index as f64),
        v.map(|v| v.index as f64 * dt),
        v.map(|v| v.value),
    ];
    let (path, w) = output(common, "deferrable.csv")?;
    io::write_record(w, &io::DEFERRABLE_HEADER, &values)?;
    let (profile_path, w) = output(common, "deferrable_profile.csv")?;
    io::write_series(w, &io::POWER_HEADER, &r.profile)?;
    println!("wrote {} and {}", path.display(), profile_path.display());
    Ok(())
}

pub fn ensemble(
    common: &Common,
    reference: Option<PathBuf>,
    max_loads: Option<usize>,
) -> Result<()> {
    let cfg = load(common)?;
    let e = &cfg.ensemble;
    let units = match reference.or_else(|| e.reference_csv.as_ref().map(|p| cfg.resolve(p))) {
        Some(path) => io::read_ensemble_reference(
            File::open(&path).with_context(|| format!("opening {}", path.display()))?,
        )
        .with_context(|| format!("reading reference {}", path.display()))?,
        None => triangle_staircase(e.triangle_peak_units, 1.0, e.triangle_period_slots)?,
    };
    let reference: Vec<f64> = units.iter().map(|v| v * e.u).collect();
    let cap = max_loads.unwrap_or(e.max_loads);
    let s = schedule_tracking(&reference, e.u, cap)?;
    println!(
        "slots={} loads_used={} max_loads={cap}",
        s.slots(),
        s.loads_used()
    );
    let (path, w) = output(common, "schedule.csv")?;
    io::write_schedule(w, &s)?;
    println!("wrote {}", path.display());
    Ok(())
}

pub fn capacity(common: &Common, disturbance: Option<PathBuf>) -> Result<()> {
    let cfg = load(common)?;
    let scn = cfg.scenario(&cfg.capacity, disturbance.as_deref())?;
    let caps = virtual_battery_caps(&scn)?;
    println!(
        "p_c_kW={} p_dc_kW={} e_c_kWh={} e_dc_kWh={} horizon_h={}",
        caps.p_c, caps.p_dc, caps.e_c, caps.e_dc, caps.horizon
    );
    let values = [caps.p_c, caps.p_dc, caps.e_c, caps.e_dc, caps.horizon].map(Some);
    let (path, w) = output(common, "capacity.csv")?;
    io::write_record(w, &io::CAPACITY_HEADER, &values)?;
    println!("wrote {}", path.display());
    Ok(())
}
