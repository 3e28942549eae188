//! Flexibility-set membership, the quasi-steady power envelope and the
//! frequency-domain measure of how conservative that envelope is.

use crate::qos::{satisfies_within, QosBounds, QosSignal, Verdict};
use crate::series::same_dt;
use crate::thermal::{
    baseline_trajectory, equilibrium_power, max_sine_amplitude, simulate, Baseline,
    DisturbanceSeries, StepMap, ThermalParams,
};
use crate::{Error, Result, Trajectory, Unit};

/// Everything a feasibility question is asked against.
///
/// Temperature bounds index temperature samples: bound `k` applies to `θ_k`,
/// so a per-sample bound series needs `N + 1` entries for `N` steps.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    params: ThermalParams,
    bounds: QosBounds,
    dist: DisturbanceSeries,
    theta_sp: f64,
    theta0: f64,
}

impl Scenario {
    pub fn new(
        params: ThermalParams,
        bounds: QosBounds,
        dist: DisturbanceSeries,
        theta_sp: f64,
        theta0: f64,
    ) -> Result<Self> {
        if let Some(len) = bounds.series_len() {
            if len < dist.len() + 1 {
                return Err(Error::LengthMismatch {
                    what: "temperature bound series",
                    left: len,
                    other: "temperature samples (steps + 1)",
                    right: dist.len() + 1,
                });
            }
        }
        if !(theta_sp.is_finite()
            && theta_sp >= bounds.theta_min()
            && theta_sp <= bounds.theta_max())
        {
            return Err(Error::param(
                "theta_sp",
                format!(
                    "{theta_sp} °C is outside [{}, {}] °C",
                    bounds.theta_min(),
                    bounds.theta_max()
                ),
            ));
        }
        let (lo, hi) = (bounds.theta_lo(0), bounds.theta_hi(0));
        if !(theta0.is_finite() && theta0 >= lo && theta0 <= hi) {
            return Err(Error::Infeasible(format!(
                "initial temperature {theta0} °C is outside [{lo}, {hi}] °C"
            )));
        }
        Ok(Scenario {
            params,
            bounds,
            dist,
            theta_sp,
            theta0,
        })
    }

    /// Time-invariant scenario: constant weather, symmetric band
    /// `theta_sp ± delta_theta`, starting at the setpoint.
    pub fn steady(
        params: ThermalParams,
        theta_a: f64,
        q_d: f64,
        theta_sp: f64,
        delta_theta: f64,
        dt: f64,
        steps: usize,
    ) -> Result<Self> {
        let dist = DisturbanceSeries::constant(dt, theta_a, q_d, steps)?;
        Self::new(
            params,
            QosBounds::symmetric(theta_sp, delta_theta)?,
            dist,
            theta_sp,
            theta_sp,
        )
    }

    pub fn params(&self) -> &ThermalParams {
        &self.params
    }
    pub fn bounds(&self) -> &QosBounds {
        &self.bounds
    }
    pub fn dist(&self) -> &DisturbanceSeries {
        &self.dist
    }
    pub fn theta_sp(&self) -> f64 {
        self.theta_sp
    }
    pub fn theta0(&self) -> f64 {
        self.theta0
    }
    pub fn dt(&self) -> f64 {
        self.dist.dt()
    }
    /// Number of power steps `N`.
    pub fn steps(&self) -> usize {
        self.dist.len()
    }

    pub fn with_params(&self, params: ThermalParams) -> Self {
        Scenario {
            params,
            ..self.clone()
        }
    }

    /// Steps `start..start + len` starting from temperature `theta0`.
    pub fn window(&self, start: usize, len: usize, theta0: f64) -> Result<Self> {
        let dist = self.dist.slice(start, len)?;
        let bounds = match self.bounds.series_len() {
            Some(_) => self.bounds.window(start, len + 1)?,
            None => self.bounds.clone(),
        };
        Self::new(self.params, bounds, dist, self.theta_sp, theta0)
    }

    pub fn baseline(&self) -> Result<Baseline> {
        baseline_trajectory(&self.params, self.theta_sp, &self.dist)
    }

    /// Temperature trajectory (`N + 1` samples) under `p`.
    pub fn simulate(&self, p: &Trajectory) -> Result<Trajectory> {
        simulate(&self.params, self.theta0, p, &self.dist)
    }

    /// `θ` under zero power, the free response the power terms add to.
    pub(crate) fn free_response(&self) -> Vec<f64> {
        let map = StepMap::new(&self.params, self.dt());
        let mut theta = Vec::with_capacity(self.steps() + 1);
        let mut t = self.theta0;
        theta.push(t);
        for (&ta, &qd) in self.dist.theta_a().iter().zip(self.dist.q_d()) {
            t = map.step(t, ta, qd, 0.0);
            theta.push(t);
        }
        theta
    }

    /// Exact feasibility of the set by forward propagation of the reachable
    /// temperature interval. Returns the first temperature sample at which
    /// no admissible power keeps the state inside the bounds.
    pub fn first_unreachable(&self) -> Option<usize> {
        let map = StepMap::new(&self.params, self.dt());
        let p_rated = self.params.p_rated();
        let (mut lo, mut hi) = (self.theta0, self.theta0);
        for (k, (&ta, &qd)) in self.dist.theta_a().iter().zip(self.dist.q_d()).enumerate() {
            let next_lo = map
                .step(lo, ta, qd, p_rated)
                .max(self.bounds.theta_lo(k + 1));
            let next_hi = map.step(hi, ta, qd, 0.0).min(self.bounds.theta_hi(k + 1));
            if next_lo > next_hi + 1e-12 {
                return Some(k + 1);
            }
            lo = next_lo;
            hi = next_hi.max(next_lo);
        }
        None
    }

    /// Steady-state temperature tolerance `min(θsp − θmin, θmax − θsp)` of
    /// the constant band.
    pub fn delta_theta(&self) -> f64 {
        (self.theta_sp - self.bounds.theta_min()).min(self.bounds.theta_max() - self.theta_sp)
    }
}

fn check_power(p: &Trajectory, scn: &Scenario, tol: f64) -> Result<()> {
    if !same_dt(p.dt(), scn.dt()) {
        return Err(Error::StepMismatch {
            left: p.dt(),
            right: scn.dt(),
        });
    }
    if p.len() != scn.steps() {
        return Err(Error::LengthMismatch {
            what: "power",
            left: p.len(),
            other: "disturbance",
            right: scn.steps(),
        });
    }
    let p_rated = scn.params.p_rated();
    if let Some((index, &value)) = p
        .values()
        .iter()
        .enumerate()
        .find(|(_, &v)| v < -tol || v > p_rated + tol)
    {
        return Err(Error::PowerOutOfRange {
            index,
            value,
            p_rated,
        });
    }
    Ok(())
}

/// `p ∈ Ω`: simulate and test the temperature against the bounds.
pub fn is_member(p: &Trajectory, scn: &Scenario) -> Result<Verdict> {
    is_member_within(p, scn, 0.0)
}

/// As [`is_member`], widening power and temperature bounds by `tol`.
pub fn is_member_within(p: &Trajectory, scn: &Scenario, tol: f64) -> Result<Verdict> {
    check_power(p, scn, tol)?;
    let theta = scn.simulate(p)?;
    satisfies_within(&QosSignal::new(theta), &scn.bounds, tol)
}

/// Quasi-steady power envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct FlexEnvelope {
    dt: f64,
    p_lo: Vec<f64>,
    p_hi: Vec<f64>,
}

impl FlexEnvelope {
    pub fn new(dt: f64, p_lo: Vec<f64>, p_hi: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if p_lo.len() != p_hi.len() {
            return Err(Error::LengthMismatch {
                what: "p_lo",
                left: p_lo.len(),
                other: "p_hi",
                right: p_hi.len(),
            });
        }
        if let Some(index) = p_lo.iter().zip(&p_hi).position(|(l, h)| !(l <= h)) {
            return Err(Error::EmptyEnvelope {
                samples: vec![index],
            });
        }
        Ok(FlexEnvelope { dt, p_lo, p_hi })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn p_lo(&self) -> &[f64] {
        &self.p_lo
    }
    pub fn p_hi(&self) -> &[f64] {
        &self.p_hi
    }
    pub fn len(&self) -> usize {
        self.p_lo.len()
    }
    pub fn is_empty(&self) -> bool {
        self.p_lo.is_empty()
    }

    pub fn half_width(&self) -> Vec<f64> {
        self.p_lo
            .iter()
            .zip(&self.p_hi)
            .map(|(l, h)| 0.5 * (h - l))
            .collect()
    }

    pub fn contains(&self, p: &Trajectory) -> bool {
        p.len() == self.len()
            && p.values()
                .iter()
                .zip(self.p_lo.iter().zip(&self.p_hi))
                .all(|(v, (l, h))| l <= v && v <= h)
    }
}

/// Power band that holds the temperature inside its bounds in steady state
/// at every step: `p_hi` holds the lower bound, `p_lo` the upper one, both
/// clamped to `[0, p_rated]`. Step `k` uses the bounds of sample `k + 1`.
pub fn envelope(scn: &Scenario) -> Result<FlexEnvelope> {
    let params = &scn.params;
    let p_rated = params.p_rated();
    let n = scn.steps();
    let mut p_lo = Vec::with_capacity(n);
    let mut p_hi = Vec::with_capacity(n);
    let mut empty = Vec::new();
    for (k, (&ta, &qd)) in scn.dist.theta_a().iter().zip(scn.dist.q_d()).enumerate() {
        let hi_raw = equilibrium_power(params, ta, qd, scn.bounds.theta_lo(k + 1));
        let lo_raw = equilibrium_power(params, ta, qd, scn.bounds.theta_hi(k + 1));
        if hi_raw < 0.0 || lo_raw > p_rated {
            empty.push(k);
        }
        p_lo.push(lo_raw.clamp(0.0, p_rated));
        p_hi.push(hi_raw.clamp(0.0, p_rated));
    }
    if !empty.is_empty() {
        return Err(Error::EmptyEnvelope { samples: empty });
    }
    FlexEnvelope::new(scn.dt(), p_lo, p_hi)
}

/// `baseline + amplitude·sin(ωt)` on the scenario grid.
pub fn sinusoid_trajectory(scn: &Scenario, amplitude: f64, omega: f64) -> Result<Trajectory> {
    let base = scn.baseline()?.power;
    let dt = scn.dt();
    Trajectory::new(
        dt,
        base.values()
            .iter()
            .enumerate()
            .map(|(k, b)| b + amplitude * (omega * k as f64 * dt).sin())
            .collect(),
        Unit::Kilowatt,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConservativenessPoint {
    /// rad/h
    pub omega: f64,
    /// `Δθ/|G(jω)|`, kW.
    pub a_max_unclamped: f64,
    /// Clamped to the power headroom `min(p_rated − p_eq, p_eq)`, kW.
    pub a_max: f64,
    pub ratio_unclamped: f64,
    pub ratio: f64,
}

/// Largest feasible sinusoid amplitude per frequency relative to the
/// zero-frequency (envelope) value.
pub fn conservativeness_curve(
    scn: &Scenario,
    omegas: &[f64],
) -> Result<Vec<ConservativenessPoint>> {
    if let Some(index) = scn.dist.first_variation() {
        return Err(Error::TimeVarying { index });
    }
    if scn.bounds.is_time_varying() {
        return Err(Error::param(
            "bounds",
            "per-sample temperature bounds are not time-invariant",
        ));
    }
    let params = &scn.params;
    let delta = scn.delta_theta();
    let p_eq = equilibrium_power(
        params,
        scn.dist.theta_a()[0],
        scn.dist.q_d()[0],
        scn.theta_sp,
    );
    let headroom = (params.p_rated() - p_eq).min(p_eq).max(0.0);
    let a0 = max_sine_amplitude(params, delta, 0.0);
    let a0_clamped = a0.min(headroom);
    omegas
        .iter()
        .map(|&omega| {
            if !(omega >= 0.0 && omega.is_finite()) {
                return Err(Error::param("omega", format!("must be >= 0, got {omega}")));
            }
            let a = max_sine_amplitude(params, delta, omega);
            let clamped = a.min(headroom);
            Ok(ConservativenessPoint {
                omega,
                a_max_unclamped: a,
                a_max: clamped,
                ratio_unclamped: if a0 > 0.0 { a / a0 } else { 1.0 },
                ratio: if a0_clamped > 0.0 {
                    clamped / a0_clamped
                } else {
                    1.0
                },
            })
        })
        .collect()
}
