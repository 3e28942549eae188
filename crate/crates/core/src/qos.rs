//! Quality-of-service signals and the sets they must stay in.
//!
//! Channels are temperature, humidity ratio and the compressor lockout
//! counter. Intervals are closed: touching a bound is feasible. A channel
//! that the bounds leave unconfigured is unconstrained.

use std::collections::VecDeque;
use std::fmt;

use crate::series::check_same_grid;
use crate::{Error, Result, Trajectory, Unit};

#[derive(Debug, Clone, PartialEq)]
pub struct QosBounds {
    theta_min: f64,
    theta_max: f64,
    humidity: Option<(f64, f64)>,
    tau_lock: Option<f64>,
    theta_series: Option<(Vec<f64>, Vec<f64>)>,
}

impl QosBounds {
    /// Temperature band `[theta_min, theta_max]`. A zero-width band is
    /// allowed; it admits only trajectories that hold the temperature exactly.
    pub fn temperature(theta_min: f64, theta_max: f64) -> Result<Self> {
        if !(theta_min.is_finite() && theta_max.is_finite()) || theta_min > theta_max {
            return Err(Error::param(
                "theta bounds",
                format!("need finite theta_min <= theta_max, got [{theta_min}, {theta_max}]"),
            ));
        }
        Ok(QosBounds {
            theta_min,
            theta_max,
            humidity: None,
            tau_lock: None,
            theta_series: None,
        })
    }

    /// Symmetric band `setpoint ± delta`.
    pub fn symmetric(setpoint: f64, delta: f64) -> Result<Self> {
        if !(delta >= 0.0) {
            return Err(Error::param(
                "delta_theta",
                format!("must be >= 0, got {delta}"),
            ));
        }
        Self::temperature(setpoint - delta, setpoint + delta)
    }

    pub fn with_humidity(mut self, w_min: f64, w_max: f64) -> Result<Self> {
        if !(w_min.is_finite() && w_max.is_finite()) || w_min >= w_max {
            return Err(Error::param(
                "humidity bounds",
                format!("need w_min < w_max, got [{w_min}, {w_max}]"),
            ));
        }
        self.humidity = Some((w_min, w_max));
        Ok(self)
    }

    pub fn with_lockout(mut self, tau_lock: f64) -> Result<Self> {
        if !(tau_lock > 0.0 && tau_lock.is_finite()) {
            return Err(Error::param(
                "tau_lock",
                format!("must be positive, got {tau_lock}"),
            ));
        }
        self.tau_lock = Some(tau_lock);
        Ok(self)
    }

    /// Per-sample temperature bounds overriding the constant band.
    pub fn with_temperature_series(mut self, lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::LengthMismatch {
                what: "theta_min series",
                left: lo.len(),
                other: "theta_max series",
                right: hi.len(),
            });
        }
        if let Some(k) = lo
            .iter()
            .zip(&hi)
            .position(|(l, h)| !(l <= h) || !l.is_finite() || !h.is_finite())
        {
            return Err(Error::param(
                "theta bounds",
                format!("sample {k}: need finite theta_min <= theta_max"),
            ));
        }
        self.theta_series = Some((lo, hi));
        Ok(self)
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }
    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }
    pub fn humidity(&self) -> Option<(f64, f64)> {
        self.humidity
    }
    pub fn tau_lock(&self) -> Option<f64> {
        self.tau_lock
    }
    pub fn is_time_varying(&self) -> bool {
        self.theta_series.is_some()
    }

    /// Number of samples the overrides cover, if any.
    pub fn series_len(&self) -> Option<usize> {
        self.theta_series.as_ref().map(|(lo, _)| lo.len())
    }

    pub fn theta_lo(&self, k: usize) -> f64 {
        match &self.theta_series {
            Some((lo, _)) => lo[k],
            None => self.theta_min,
        }
    }

    pub fn theta_hi(&self, k: usize) -> f64 {
        match &self.theta_series {
            Some((_, hi)) => hi[k],
            None => self.theta_max,
        }
    }

    /// Bounds restricted to samples `start..start + len`.
    pub fn window(&self, start: usize, len: usize) -> Result<Self> {
        let mut out = self.clone();
        if let Some((lo, hi)) = &self.theta_series {
            if start + len > lo.len() {
                return Err(Error::LengthMismatch {
                    what: "requested window",
                    left: start + len,
                    other: "temperature bound series",
                    right: lo.len(),
                });
            }
            out.theta_series = Some((
                lo[start..start + len].to_vec(),
                hi[start..start + len].to_vec(),
            ));
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QosSignal {
    theta: Trajectory,
    w: Option<Trajectory>,
    s: Option<Trajectory>,
}

impl QosSignal {
    pub fn new(theta: Trajectory) -> Self {
        QosSignal {
            theta,
            w: None,
            s: None,
        }
    }

    pub fn with_humidity(mut self, w: Trajectory) -> Result<Self> {
        check_same_grid(&self.theta, "temperature", &w, "humidity")?;
        self.w = Some(w);
        Ok(self)
    }

    pub fn with_lockout(mut self, s: Trajectory) -> Result<Self> {
        check_same_grid(&self.theta, "temperature", &s, "lockout count")?;
        self.s = Some(s);
        Ok(self)
    }

    pub fn theta(&self) -> &Trajectory {
        &self.theta
    }
    pub fn humidity(&self) -> Option<&Trajectory> {
        self.w.as_ref()
    }
    pub fn lockout(&self) -> Option<&Trajectory> {
        self.s.as_ref()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    Temperature,
    Humidity,
    Lockout,
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Temperature => "temperature",
            Channel::Humidity => "humidity",
            Channel::Lockout => "lockout",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Violation {
    pub index: usize,
    pub channel: Channel,
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verdict {
    pub violation: Option<Violation>,
}

impl Verdict {
    pub const FEASIBLE: Verdict = Verdict { violation: None };

    pub fn is_feasible(&self) -> bool {
        self.violation.is_none()
    }
}

/// `q(t) ∈ Q(t)` at every sample.
pub fn satisfies(q: &QosSignal, bounds: &QosBounds) -> Result<Verdict> {
    satisfies_within(q, bounds, 0.0)
}

/// As [`satisfies`], widening every bound by `tol` to absorb solver noise.
pub fn satisfies_within(q: &QosSignal, bounds: &QosBounds, tol: f64) -> Result<Verdict> {
    let n = q.theta.len();
    if let Some(len) = bounds.series_len() {
        if len < n {
            return Err(Error::LengthMismatch {
                what: "temperature bound series",
                left: len,
                other: "temperature signal",
                right: n,
            });
        }
    }
    let humidity = match (bounds.humidity, &q.w) {
        (Some(b), Some(w)) => Some((b, w)),
        (Some(_), None) => return Err(Error::MissingChannel("humidity")),
        _ => None,
    };
    let lockout = match (bounds.tau_lock, &q.s) {
        (Some(_), Some(s)) => Some(s),
        (Some(_), None) => return Err(Error::MissingChannel("lockout")),
        _ => None,
    };

    // Scanning sample-major in channel order makes the first hit the minimal
    // index, ties broken by channel order.
    for k in 0..n {
        let t = q.theta.values()[k];
        let (lo, hi) = (bounds.theta_lo(k), bounds.theta_hi(k));
        if t < lo - tol || t > hi + tol {
            return Ok(violation(k, Channel::Temperature, t, lo, hi));
        }
        if let Some(((lo, hi), w)) = humidity {
            let v = w.values()[k];
            if v < lo - tol || v > hi + tol {
                return Ok(violation(k, Channel::Humidity, v, lo, hi));
            }
        }
        if let Some(s) = lockout {
            let v = s.values()[k];
            if !(0.0..=1.0).contains(&v) {
                return Ok(violation(k, Channel::Lockout, v, 0.0, 1.0));
            }
        }
    }
    Ok(Verdict::FEASIBLE)
}

fn violation(index: usize, channel: Channel, value: f64, lower: f64, upper: f64) -> Verdict {
    Verdict {
        violation: Some(Violation {
            index,
            channel,
            value,
            lower,
            upper,
        }),
    }
}

/// Switch counter `s(t)`: number of on/off changes in `(t − τ_lock, t]`.
///
/// The state before the first sample is taken to equal the first sample, so
/// no event is recorded at `t = 0`.
pub fn lockout_count(on_off: &Trajectory, tau_lock: f64) -> Result<Trajectory> {
    let prior = on_off.values().first().copied().unwrap_or(0.0) == 1.0;
    lockout_count_from(on_off, tau_lock, prior)
}

/// As [`lockout_count`] with an explicit state before the first sample; a
/// first sample that differs from `prior` is a switch at `t = 0`.
pub fn lockout_count_from(
    on_off: &Trajectory,
    tau_lock: f64,
    prior_on: bool,
) -> Result<Trajectory> {
    let dt = on_off.dt();
    if !(tau_lock >= dt - 1e-12) {
        return Err(Error::param(
            "tau_lock",
            format!("must be at least one step ({dt} h), got {tau_lock}"),
        ));
    }
    let mut prev = prior_on;
    let mut events: VecDeque<usize> = VecDeque::new();
    let mut counts = Vec::with_capacity(on_off.len());
    for (k, &v) in on_off.values().iter().enumerate() {
        let on = match v {
            1.0 => true,
            0.0 => false,
            x => return Err(Error::NonBinary { index: k, value: x }),
        };
        if on != prev {
            events.push_back(k);
            prev = on;
        }
        // Half-open window: an event exactly τ_lock old has left it.
        while let Some(&e) = events.front() {
            if (k - e) as f64 * dt >= tau_lock - 1e-9 * tau_lock.max(1.0) {
                events.pop_front();
            } else {
                break;
            }
        }
        counts.push(events.len() as f64);
    }
    Trajectory::new(dt, counts, Unit::Count)
}
