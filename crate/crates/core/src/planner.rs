//! Projection of a grid reference onto the flexibility set, one-shot and in a
//! receding-horizon loop.

use std::fmt;
use std::str::FromStr;

use crate::flexset::{is_member_within, Scenario};
use crate::series::same_dt;
use crate::solver::{solve_box_qp, solve_lp, BoxQp, LinearProgram, QpOptions, Sense, SolveReport};
use crate::thermal::StepMap;
use crate::{Error, Result, Trajectory, Unit};

/// Tolerance for the post-solve membership check.
pub const MEMBERSHIP_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Norm {
    #[default]
    Two,
    One,
    Inf,
}

impl fmt::Display for Norm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Norm::Two => "two",
            Norm::One => "one",
            Norm::Inf => "inf",
        })
    }
}

impl FromStr for Norm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "two" | "2" => Ok(Norm::Two),
            "one" | "1" => Ok(Norm::One),
            "inf" | "infinity" => Ok(Norm::Inf),
            other => Err(Error::param(
                "norm",
                format!("expected two, one or inf, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanRequest {
    pub scn: Scenario,
    pub r_ba: Trajectory,
    pub norm: Norm,
    pub horizon: usize,
}

impl PlanRequest {
    /// Request over the full scenario horizon.
    pub fn new(scn: Scenario, r_ba: Trajectory, norm: Norm) -> Self {
        let horizon = scn.steps();
        PlanRequest {
            scn,
            r_ba,
            norm,
            horizon,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::param("horizon", "must be at least one step"));
        }
        if !same_dt(self.r_ba.dt(), self.scn.dt()) {
            return Err(Error::StepMismatch {
                left: self.r_ba.dt(),
                right: self.scn.dt(),
            });
        }
        if self.r_ba.len() < self.horizon {
            return Err(Error::LengthMismatch {
                what: "reference",
                left: self.r_ba.len(),
                other: "horizon",
                right: self.horizon,
            });
        }
        if self.scn.steps() < self.horizon {
            return Err(Error::LengthMismatch {
                what: "disturbance",
                left: self.scn.steps(),
                other: "horizon",
                right: self.horizon,
            });
        }
        Ok(())
    }
}

/// Discrete norms of `r_ba − p*` over the horizon, kW.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TrackingError {
    pub l1: f64,
    pub l2: f64,
    pub linf: f64,
}

impl TrackingError {
    pub fn between(r: &[f64], p: &[f64]) -> Self {
        let mut e = TrackingError::default();
        for (a, b) in r.iter().zip(p) {
            let d = (a - b).abs();
            e.l1 += d;
            e.l2 += d * d;
            e.linf = e.linf.max(d);
        }
        e.l2 = e.l2.sqrt();
        e
    }

    pub fn get(&self, norm: Norm) -> f64 {
        match norm {
            Norm::Two => self.l2,
            Norm::One => self.l1,
            Norm::Inf => self.linf,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub p_star: Trajectory,
    /// `N + 1` samples starting at `θ0`.
    pub theta_star: Trajectory,
    pub tracking_error: TrackingError,
    pub report: SolveReport,
}

/// Closest member of the flexibility set to the reference in the requested
/// norm, over `req.horizon` steps.
pub fn plan(req: &PlanRequest) -> Result<PlanResult> {
    req.validate()?;
    let scn = req.scn.window(0, req.horizon, req.scn.theta0())?;
    if let Some(k) = scn.first_unreachable() {
        return Err(Error::Infeasible(format!(
            "no admissible power keeps the temperature in bounds at t = {} h",
            k as f64 * scn.dt()
        )));
    }
    let r = &req.r_ba.values()[..req.horizon];
    let (p, report) = match req.norm {
        Norm::Two => solve_two(&scn, r)?,
        Norm::One | Norm::Inf => solve_lp_norm(&scn, r, req.norm)?,
    };
    let p_rated = scn.params().p_rated();
    let p: Vec<f64> = p.into_iter().map(|v| v.clamp(0.0, p_rated)).collect();
    let p_star = Trajectory::new(scn.dt(), p, Unit::Kilowatt)?;
    let verdict = is_member_within(&p_star, &scn, MEMBERSHIP_TOL)?;
    if let Some(v) = verdict.violation {
        return Err(Error::Solver(format!(
            "planned trajectory leaves the bounds at sample {} ({} = {})",
            v.index, v.channel, v.value
        )));
    }
    let theta_star = scn.simulate(&p_star)?;
    let tracking_error = TrackingError::between(r, p_star.values());
    Ok(PlanResult {
        p_star,
        theta_star,
        tracking_error,
        report,
    })
}

pub(crate) fn require_optimal(report: SolveReport) -> Result<(Vec<f64>, SolveReport)> {
    match &report.solution {
        Some(x) if report.is_optimal() => Ok((x.clone(), report)),
        _ => Err(Error::Solver(format!(
            "{} after {} iterations",
            report.status, report.iterations
        ))),
    }
}

/// Squared 2-norm as a QP over interleaved `(p_k, θ_{k+1})` with the exact
/// step map as equality rows.
fn solve_two(scn: &Scenario, r: &[f64]) -> Result<(Vec<f64>, SolveReport)> {
    let n = scn.steps();
    let map = StepMap::new(scn.params(), scn.dt());
    let p_rated = scn.params().p_rated();
    let mut qp = BoxQp::new(2 * n);
    let (ta, qd) = (scn.dist().theta_a(), scn.dist().q_d());
    for k in 0..n {
        let (ip, it) = (2 * k, 2 * k + 1);
        qp.hess_diag[ip] = 1.0;
        qp.linear[ip] = -r[k];
        qp.lower[ip] = 0.0;
        qp.upper[ip] = p_rated;
        qp.lower[it] = scn.bounds().theta_lo(k + 1);
        qp.upper[it] = scn.bounds().theta_hi(k + 1);
        // θ_{k+1} − a·θ_k + g·p_k = drive_k
        let mut row = vec![(ip, map.power_gain), (it, 1.0)];
        let mut rhs = map.drive(ta[k], qd[k]);
        if k == 0 {
            rhs += map.decay * scn.theta0();
        } else {
            row.insert(0, (it - 2, -map.decay));
        }
        qp.add_eq(row, rhs);
    }
    let (x, report) = require_optimal(solve_box_qp(&qp, &QpOptions::default()))?;
    Ok(((0..n).map(|k| x[2 * k]).collect(), report))
}

/// Temperature range rows over the power variables `0..n`:
/// `lo_{k+1} ≤ free_{k+1} + Σ_{j≤k} h(k−j)·p_j ≤ hi_{k+1}`.
pub(crate) fn add_temperature_rows(lp: &mut LinearProgram, scn: &Scenario) {
    let n = scn.steps();
    let map = StepMap::new(scn.params(), scn.dt());
    let free = scn.free_response();
    let impulse: Vec<f64> = (0..n).map(|lag| map.impulse(lag)).collect();
    for k in 0..n {
        let coeffs: Vec<(usize, f64)> = (0..=k)
            .map(|j| (j, impulse[k - j]))
            .filter(|&(_, a)| a.abs() > 1e-15)
            .collect();
        let lo = scn.bounds().theta_lo(k + 1) - free[k + 1];
        let hi = scn.bounds().theta_hi(k + 1) - free[k + 1];
        lp.add_row(coeffs, lo, hi);
    }
}

fn solve_lp_norm(scn: &Scenario, r: &[f64], norm: Norm) -> Result<(Vec<f64>, SolveReport)> {
    let n = scn.steps();
    let p_rated = scn.params().p_rated();
    let extra = if norm == Norm::One { n } else { 1 };
    let mut lp = LinearProgram::new(Sense::Minimize, n + extra);
    for k in 0..n {
        lp.set_bounds(k, 0.0, p_rated);
    }
    for e in n..n + extra {
        lp.set_objective(e, 1.0);
    }
    add_temperature_rows(&mut lp, scn);
    for (k, &rk) in r.iter().enumerate() {
        let e = if norm == Norm::One { n + k } else { n };
        lp.add_ge(vec![(k, 1.0), (e, 1.0)], rk);
        lp.add_ge(vec![(k, -1.0), (e, 1.0)], -rk);
    }
    let (x, report) = require_optimal(solve_lp(&lp, 1e-9))?;
    Ok((x[..n].to_vec(), report))
}

/// Snaps a carried temperature that sits within the membership tolerance
/// outside the bounds back onto them.
fn carry_state(scn: &Scenario, k: usize, theta: f64) -> f64 {
    let (lo, hi) = (scn.bounds().theta_lo(k), scn.bounds().theta_hi(k));
    if theta < lo && theta >= lo - MEMBERSHIP_TOL {
        lo
    } else if theta > hi && theta <= hi + MEMBERSHIP_TOL {
        hi
    } else {
        theta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecedingResult {
    /// Applied power, `windows × apply_steps` samples.
    pub executed: Trajectory,
    /// Temperature under the applied power, one more sample than `executed`.
    pub theta: Trajectory,
    pub plans: Vec<PlanResult>,
}

/// Receding-horizon loop. Window `i` starts at step `i·apply_steps` from the
/// temperature reached by the power applied so far, plans `horizon` steps
/// against `forecasts[i]` and applies the first `apply_steps` of the plan.
pub fn receding_horizon(
    scn: &Scenario,
    forecasts: &[Trajectory],
    norm: Norm,
    horizon: usize,
    apply_steps: usize,
) -> Result<RecedingResult> {
    if apply_steps == 0 || apply_steps > horizon {
        return Err(Error::param(
            "apply_steps",
            format!("must be in 1..={horizon}, got {apply_steps}"),
        ));
    }
    let mut applied = Vec::with_capacity(forecasts.len() * apply_steps);
    let mut plans = Vec::with_capacity(forecasts.len());
    let mut theta = scn.theta0();
    for (i, forecast) in forecasts.iter().enumerate() {
        let start = i * apply_steps;
        if start + horizon > scn.steps() {
            return Err(Error::LengthMismatch {
                what: "disturbance",
                left: scn.steps(),
                other: "end of receding window",
                right: start + horizon,
            });
        }
        let window = scn.window(start, horizon, theta)?;
        let req = PlanRequest {
            scn: window,
            r_ba: forecast.clone(),
            norm,
            horizon,
        };
        let result = plan(&req)?;
        applied.extend_from_slice(&result.p_star.values()[..apply_steps]);
        theta = carry_state(
            scn,
            start + apply_steps,
            result.theta_star.values()[apply_steps],
        );
        plans.push(result);
    }
    let executed = Trajectory::new(scn.dt(), applied, Unit::Kilowatt)?;
    let run = scn.window(0, executed.len(), scn.theta0())?;
    let verdict = is_member_within(&executed, &run, MEMBERSHIP_TOL)?;
    if let Some(v) = verdict.violation {
        return Err(Error::Solver(format!(
            "executed trajectory leaves the bounds at sample {}",
            v.index
        )));
    }
    let theta = run.simulate(&executed)?;
    Ok(RecedingResult {
        executed,
        theta,
        plans,
    })
}
