//! First-order RC model of a cooled space.
//!
//! ```text
//! C dθ/dt = -(θ - θa)/R + q_d - η p
//! ```
//!
//! with `R` in °C/kW, `C` in kWh/°C and time in hours. Inputs are held
//! constant over each step and the ODE is integrated exactly, so a step of
//! length `dt` maps `θ_k` to `a·θ_k + (1 - a)·θ_ss,k` with `a = exp(-dt/RC)`
//! and `θ_ss,k` the steady state for the held inputs.

use crate::series::same_dt;
use crate::{Error, Result, Trajectory, Unit};

/// Default simulation step: one minute.
pub const DEFAULT_DT: f64 = 1.0 / 60.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    r: f64,
    c: f64,
    eta_cop: f64,
    p_rated: f64,
}

impl ThermalParams {
    pub fn new(r: f64, c: f64, eta_cop: f64, p_rated: f64) -> Result<Self> {
        for (name, v) in [
            ("R", r),
            ("C", c),
            ("eta_cop", eta_cop),
            ("p_rated", p_rated),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(
                    name,
                    format!("must be positive and finite, got {v}"),
                ));
            }
        }
        Ok(ThermalParams {
            r,
            c,
            eta_cop,
            p_rated,
        })
    }

    /// Building parameters fitted to a real building (R = 2.707 °C/kW,
    /// C = 1.283 kWh/°C, COP 3.5) with the given rated power.
    pub fn reference_building(p_rated: f64) -> Result<Self> {
        Self::new(2.707, 1.283, 3.5, p_rated)
    }

    pub fn r(&self) -> f64 {
        self.r
    }
    pub fn c(&self) -> f64 {
        self.c
    }
    pub fn eta_cop(&self) -> f64 {
        self.eta_cop
    }
    pub fn p_rated(&self) -> f64 {
        self.p_rated
    }

    /// Time constant `RC` in hours.
    pub fn time_constant(&self) -> f64 {
        self.r * self.c
    }

    /// DC gain from power deviation to temperature deviation, `R·η` (°C/kW).
    pub fn dc_gain(&self) -> f64 {
        self.r * self.eta_cop
    }

    pub fn with_p_rated(&self, p_rated: f64) -> Result<Self> {
        Self::new(self.r, self.c, self.eta_cop, p_rated)
    }

    /// Steady-state temperature for power `p` held against `theta_a`, `q_d`.
    pub fn steady_temperature(&self, theta_a: f64, q_d: f64, p: f64) -> f64 {
        theta_a + self.r * (q_d - self.eta_cop * p)
    }
}

/// Weather and internal gains, one sample per step.
#[derive(Debug, Clone, PartialEq)]
pub struct DisturbanceSeries {
    dt: f64,
    theta_a: Vec<f64>,
    q_d: Vec<f64>,
    label: String,
}

impl DisturbanceSeries {
    pub fn new(dt: f64, theta_a: Vec<f64>, q_d: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if theta_a.len() != q_d.len() {
            return Err(Error::LengthMismatch {
                what: "theta_a",
                left: theta_a.len(),
                other: "q_d",
                right: q_d.len(),
            });
        }
        if theta_a.is_empty() {
            return Err(Error::param("disturbance", "needs at least one sample"));
        }
        let bad = theta_a.iter().chain(&q_d).position(|v| !v.is_finite());
        if let Some(i) = bad {
            return Err(Error::NonFinite {
                index: i % theta_a.len(),
            });
        }
        Ok(DisturbanceSeries {
            dt,
            theta_a,
            q_d,
            label: String::from("unnamed"),
        })
    }

    pub fn constant(dt: f64, theta_a: f64, q_d: f64, len: usize) -> Result<Self> {
        Self::new(dt, vec![theta_a; len], vec![q_d; len])
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
    pub fn len(&self) -> usize {
        self.theta_a.len()
    }
    pub fn is_empty(&self) -> bool {
        self.theta_a.is_empty()
    }
    pub fn theta_a(&self) -> &[f64] {
        &self.theta_a
    }
    pub fn q_d(&self) -> &[f64] {
        &self.q_d
    }
    pub fn label(&self) -> &str {
        &self.label
    }
    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    /// Index of the first sample differing from sample 0, if any.
    pub fn first_variation(&self) -> Option<usize> {
        let (a0, q0) = (self.theta_a[0], self.q_d[0]);
        (1..self.len()).find(|&k| self.theta_a[k] != a0 || self.q_d[k] != q0)
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if len == 0 || start + len > self.len() {
            return Err(Error::LengthMismatch {
                what: "requested window",
                left: start + len,
                other: "disturbance",
                right: self.len(),
            });
        }
        let mut out = Self::new(
            self.dt,
            self.theta_a[start..start + len].to_vec(),
            self.q_d[start..start + len].to_vec(),
        )?;
        out.label = self.label.clone();
        Ok(out)
    }
}

/// Exact zero-order-hold step map for a given `dt`.
#[derive(Debug, Clone, Copy)]
pub struct StepMap {
    /// `exp(-dt/RC)`
    pub decay: f64,
    /// Temperature drop per kW held over one step, `(1 - a)·R·η`.
    pub power_gain: f64,
    r: f64,
}

impl StepMap {
    pub fn new(params: &ThermalParams, dt: f64) -> Self {
        let decay = (-dt / params.time_constant()).exp();
        StepMap {
            decay,
            power_gain: (1.0 - decay) * params.dc_gain(),
            r: params.r,
        }
    }

    /// Contribution of the held disturbance to `θ_{k+1}`.
    pub fn drive(&self, theta_a: f64, q_d: f64) -> f64 {
        (1.0 - self.decay) * (theta_a + self.r * q_d)
    }

    pub fn step(&self, theta: f64, theta_a: f64, q_d: f64, p: f64) -> f64 {
        self.decay * theta + self.drive(theta_a, q_d) - self.power_gain * p
    }

    /// Coefficient of `p_j` in `θ_k` for `j < k`: `-(1-a)Rη·a^(k-1-j)`.
    pub fn impulse(&self, lag: usize) -> f64 {
        -self.power_gain * self.decay.powi(lag as i32)
    }
}

/// `p_eq = (q_d0 + (θa0 − θsp)/R)/η`. Negative values mean heating would be
/// required; they are returned as-is.
pub fn equilibrium_power(params: &ThermalParams, theta_a0: f64, q_d0: f64, theta_sp: f64) -> f64 {
    (q_d0 + (theta_a0 - theta_sp) / params.r) / params.eta_cop
}

/// Temperature trajectory under power `p`.
///
/// Returns `N + 1` samples: `θ(0) = theta0` followed by the temperature at the
/// end of each of the `N` steps.
pub fn simulate(
    params: &ThermalParams,
    theta0: f64,
    p: &Trajectory,
    dist: &DisturbanceSeries,
) -> Result<Trajectory> {
    if !same_dt(p.dt(), dist.dt()) {
        return Err(Error::StepMismatch {
            left: p.dt(),
            right: dist.dt(),
        });
    }
    if p.len() != dist.len() {
        return Err(Error::LengthMismatch {
            what: "power",
            left: p.len(),
            other: "disturbance",
            right: dist.len(),
        });
    }
    if !theta0.is_finite() {
        return Err(Error::param("theta0", "must be finite"));
    }
    let map = StepMap::new(params, p.dt());
    let mut theta = Vec::with_capacity(p.len() + 1);
    theta.push(theta0);
    let mut current = theta0;
    for ((&pk, &ta), &qd) in p.values().iter().zip(dist.theta_a()).zip(dist.q_d()) {
        current = map.step(current, ta, qd, pk);
        theta.push(current);
    }
    Trajectory::new(p.dt(), theta, Unit::Celsius)
}

/// `|G(jω)| = (η/C)/sqrt(ω² + (1/RC)²)` with ω in rad/h.
pub fn tf_magnitude(params: &ThermalParams, omega: f64) -> f64 {
    let pole = 1.0 / params.time_constant();
    (params.eta_cop / params.c) / (omega * omega + pole * pole).sqrt()
}

/// Largest sinusoidal power amplitude at `omega` whose steady temperature
/// swing stays within `delta_theta`. Not clamped to the power range.
pub fn max_sine_amplitude(params: &ThermalParams, delta_theta: f64, omega: f64) -> f64 {
    delta_theta / tf_magnitude(params, omega)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Saturation {
    None,
    /// Unclamped demand was negative (heating regime).
    Low,
    /// Unclamped demand exceeded rated power.
    High,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Baseline {
    pub power: Trajectory,
    pub saturation: Vec<Saturation>,
}

impl Baseline {
    pub fn is_saturated(&self) -> bool {
        self.saturation.iter().any(|s| *s != Saturation::None)
    }
}

/// Per-step quasi-steady demand holding `theta_sp`, clamped to `[0, p_rated]`.
pub fn baseline_trajectory(
    params: &ThermalParams,
    theta_sp: f64,
    dist: &DisturbanceSeries,
) -> Result<Baseline> {
    let mut power = Vec::with_capacity(dist.len());
    let mut saturation = Vec::with_capacity(dist.len());
    for (&ta, &qd) in dist.theta_a().iter().zip(dist.q_d()) {
        let p = equilibrium_power(params, ta, qd, theta_sp);
        let (clamped, flag) = if p < 0.0 {
            (0.0, Saturation::Low)
        } else if p > params.p_rated {
            (params.p_rated, Saturation::High)
        } else {
            (p, Saturation::None)
        };
        power.push(clamped);
        saturation.push(flag);
    }
    Ok(Baseline {
        power: Trajectory::new(dist.dt(), power, Unit::Kilowatt)?,
        saturation,
    })
}

/// Steady-state amplitude of the temperature response to
/// `p = p_eq + amplitude·sin(ωt)` around a time-invariant equilibrium,
/// measured from simulation.
///
/// The first `settle` hours are discarded; the amplitude is then the
/// magnitude of the Fourier coefficient at `omega` over `cycles` whole
/// periods. Choose `dt` so that a period is an integer number of steps.
pub fn sine_response_amplitude(
    params: &ThermalParams,
    amplitude: f64,
    omega: f64,
    dt: f64,
    settle: f64,
    cycles: usize,
) -> Result<f64> {
    if !(omega > 0.0) || cycles == 0 {
        return Err(Error::param(
            "omega",
            "needs a positive frequency and at least one cycle",
        ));
    }
    let period = std::f64::consts::TAU / omega;
    let skip = (settle / dt).ceil() as usize;
    let window = ((cycles as f64 * period) / dt).round() as usize;
    let n = skip + window;
    // Equilibrium at 0 °C with zero disturbance and p_eq = 0 is enough: the
    // model is linear, so only deviations matter.
    let dist = DisturbanceSeries::constant(dt, 0.0, 0.0, n)?;
    let p = Trajectory::from_fn(dt, n, Unit::Kilowatt, |t| amplitude * (omega * t).sin())?;
    let theta = simulate(params, 0.0, &p, &dist)?;
    let (mut s, mut c) = (0.0, 0.0);
    for k in skip..n {
        let t = k as f64 * dt;
        let v = theta.values()[k];
        s += v * (omega * t).sin();
        c += v * (omega * t).cos();
    }
    Ok(2.0 * (s * s + c * c).sqrt() / window as f64)
}

pub fn fahrenheit_to_celsius(f: f64) -> f64 {
    (f - 32.0) * 5.0 / 9.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn paper(p_rated: f64) -> ThermalParams {
        ThermalParams::reference_building(p_rated).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(ThermalParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ThermalParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ThermalParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn equilibrium_power_examples() {
        let p = paper(5.0);
        assert_eq!(equilibrium_power(&p, 24.0, 0.0, 24.0), 0.0);
        // (1.5 + 8/2.707)/3.5
        assert!((equilibrium_power(&p, 32.0, 1.5, 24.0) - 1.272943).abs() < 1e-6);
        // heating regime is reported, not clamped
        assert!((equilibrium_power(&p, 20.0, 0.0, 24.0) + 0.422186).abs() < 1e-6);
    }

    #[test]
    fn tf_magnitude_examples() {
        let p = paper(5.0);
        assert!((tf_magnitude(&p, 0.0) - 9.4745).abs() < 1e-9);
        assert!((tf_magnitude(&p, std::f64::consts::TAU) - 0.43372).abs() < 1e-4);
        assert!(tf_magnitude(&p, 1e9) < 1e-8);
    }

    #[test]
    fn max_sine_amplitude_examples() {
        let p = paper(5.0);
        assert!((max_sine_amplitude(&p, 1.0, 0.0) - 0.105546).abs() < 1e-6);
        assert!((max_sine_amplitude(&p, 1.0, std::f64::consts::TAU) - 2.3056).abs() < 1e-3);
        assert_eq!(max_sine_amplitude(&p, 0.0, 3.0), 0.0);
    }

    #[test]
    fn simulate_rejects_mismatched_inputs() {
        let params = paper(5.0);
        let dist = DisturbanceSeries::constant(0.1, 30.0, 1.0, 10).unwrap();
        let short = Trajectory::constant(0.1, 1.0, 9, Unit::Kilowatt).unwrap();
        assert!(matches!(
            simulate(&params, 24.0, &short, &dist),
            Err(Error::LengthMismatch {
                left: 9,
                right: 10,
                ..
            })
        ));
        let other_dt = Trajectory::constant(0.2, 1.0, 10, Unit::Kilowatt).unwrap();
        assert!(matches!(
            simulate(&params, 24.0, &other_dt, &dist),
            Err(Error::StepMismatch { .. })
        ));
    }

    #[test]
    fn equilibrium_is_a_fixed_point() {
        let params = paper(5.0);
        let dist = DisturbanceSeries::constant(DEFAULT_DT, 32.0, 1.5, 600).unwrap();
        let p_eq = equilibrium_power(&params, 32.0, 1.5, 24.0);
        let p = Trajectory::constant(DEFAULT_DT, p_eq, 600, Unit::Kilowatt).unwrap();
        let theta = simulate(&params, 24.0, &p, &dist).unwrap();
        assert_eq!(theta.len(), 601);
        assert!(theta.values().iter().all(|t| (t - 24.0).abs() < 1e-9));
    }

    #[test]
    fn baseline_clamps_and_flags() {
        let params = paper(1.0);
        let dist = DisturbanceSeries::new(0.5, vec![30.0, 34.0, 45.0, 10.0], vec![1.0; 4]).unwrap();
        let b = baseline_trajectory(&params, 24.0, &dist).unwrap();
        let v = b.power.values();
        assert!((v[0] - 0.918994).abs() < 1e-6);
        assert_eq!(v[1], 1.0);
        assert_eq!(b.saturation[1], Saturation::High);
        assert_eq!(v[3], 0.0);
        assert_eq!(b.saturation[3], Saturation::Low);
        assert!(b.is_saturated());
    }

    #[test]
    fn fahrenheit_conversion() {
        assert!((fahrenheit_to_celsius(75.0) - 23.8889).abs() < 1e-4);
        assert!((fahrenheit_to_celsius(55.0) - 12.7778).abs() < 1e-4);
    }
}
