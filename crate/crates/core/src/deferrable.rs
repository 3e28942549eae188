//! Deferrable energy loads: an arrival time, an energy need, a window and a
//! power cap, in three flavours. Batteries need exactly `E` in the window,
//! bakeries need it in one contiguous run, buckets have no fixed energy.

use std::fmt;
use std::str::FromStr;

use crate::flexset::{is_member, Scenario};
use crate::qos::Violation;
use crate::thermal::{baseline_trajectory, DisturbanceSeries, ThermalParams};
use crate::{Error, Result, Trajectory, Unit};

/// Cumulative-energy tolerance, kWh.
pub const ENERGY_TOL: f64 = 1e-6;
const POWER_TOL: f64 = 1e-9;
const TIME_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeferrableKind {
    Battery,
    Bucket,
    Bakery,
}

impl fmt::Display for DeferrableKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeferrableKind::Battery => "battery",
            DeferrableKind::Bucket => "bucket",
            DeferrableKind::Bakery => "bakery",
        })
    }
}

impl FromStr for DeferrableKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "battery" => Ok(DeferrableKind::Battery),
            "bucket" => Ok(DeferrableKind::Bucket),
            "bakery" => Ok(DeferrableKind::Bakery),
            other => Err(Error::param(
                "kind",
                format!("expected battery, bucket or bakery, got `{other}`"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeferrableSpec {
    tau: f64,
    energy: Option<f64>,
    window: f64,
    power_cap: f64,
    kind: DeferrableKind,
    energy_band: Option<(f64, f64)>,
}

impl DeferrableSpec {
    /// Arrival `tau` (h), energy `E` (kWh), window `T` (h), cap `P` (kW).
    /// Batteries and bakeries need `energy`; buckets ignore it.
    pub fn new(
        tau: f64,
        energy: Option<f64>,
        window: f64,
        power_cap: f64,
        kind: DeferrableKind,
    ) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::param("tau", format!("must be >= 0, got {tau}")));
        }
        if !(window > 0.0 && window.is_finite()) {
            return Err(Error::param(
                "window",
                format!("must be positive, got {window}"),
            ));
        }
        if !(power_cap > 0.0 && power_cap.is_finite()) {
            return Err(Error::param(
                "power_cap",
                format!("must be positive, got {power_cap}"),
            ));
        }
        let energy = match (kind, energy) {
            (DeferrableKind::Bucket, _) => None,
            (_, Some(e)) if e >= 0.0 && e.is_finite() => Some(e),
            (_, Some(e)) => return Err(Error::param("energy", format!("must be >= 0, got {e}"))),
            (_, None) => {
                return Err(Error::param(
                    "energy",
                    format!("a {kind} needs an energy demand"),
                ))
            }
        };
        Ok(DeferrableSpec {
            tau,
            energy,
            window,
            power_cap,
            kind,
            energy_band: None,
        })
    }

    /// Bucket only: bounds on the energy delivered by the end of the window.
    pub fn with_energy_band(mut self, lo: f64, hi: f64) -> Result<Self> {
        if self.kind != DeferrableKind::Bucket {
            return Err(Error::param(
                "energy_band",
                "only buckets take an energy band",
            ));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::param(
                "energy_band",
                format!("need lo <= hi, got [{lo}, {hi}]"),
            ));
        }
        self.energy_band = Some((lo, hi));
        Ok(self)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }
    pub fn energy(&self) -> Option<f64> {
        self.energy
    }
    pub fn window(&self) -> f64 {
        self.window
    }
    pub fn power_cap(&self) -> f64 {
        self.power_cap
    }
    pub fn kind(&self) -> DeferrableKind {
        self.kind
    }
    pub fn energy_band(&self) -> Option<(f64, f64)> {
        self.energy_band
    }
    pub fn end(&self) -> f64 {
        self.tau + self.window
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpecFeasibility {
    pub feasible: bool,
    /// Bakery only: duration of the single full-power run, h.
    pub run_length: Option<f64>,
}

/// Whether some `0 ≤ p ≤ P` meets the spec.
pub fn spec_feasible(spec: &DeferrableSpec) -> SpecFeasibility {
    let capacity = spec.power_cap * spec.window;
    match spec.kind {
        DeferrableKind::Battery => SpecFeasibility {
            feasible: spec.energy.unwrap_or(0.0) <= capacity + ENERGY_TOL,
            run_length: None,
        },
        DeferrableKind::Bucket => SpecFeasibility {
            feasible: spec
                .energy_band
                .is_none_or(|(lo, hi)| hi >= 0.0 && lo <= capacity + ENERGY_TOL),
            run_length: None,
        },
        DeferrableKind::Bakery => {
            let run = spec.energy.unwrap_or(0.0) / spec.power_cap;
            SpecFeasibility {
                feasible: run <= spec.window + TIME_TOL,
                run_length: Some(run),
            }
        }
    }
}

/// Energy of a zero-order-hold power series over `[a, b]`, kWh.
pub fn energy_between(p: &Trajectory, a: f64, b: f64) -> f64 {
    let dt = p.dt();
    p.values()
        .iter()
        .enumerate()
        .map(|(k, v)| {
            let (s, e) = (k as f64 * dt, (k + 1) as f64 * dt);
            let overlap = (e.min(b) - s.max(a)).max(0.0);
            v * overlap
        })
        .sum()
}

/// Checks a power profile sampled from `t = 0` against the spec: power in
/// `[0, P]`, no energy outside `[τ, τ + T]`, the required energy inside it,
/// and for bakeries a single contiguous run of nonzero power.
pub fn trajectory_satisfies(spec: &DeferrableSpec, p: &Trajectory) -> Result<bool> {
    if p.duration() + TIME_TOL < spec.end() {
        return Err(Error::WindowTooShort {
            have: p.duration(),
            need: spec.end(),
        });
    }
    if p.values()
        .iter()
        .any(|&v| v < -POWER_TOL || v > spec.power_cap + POWER_TOL)
    {
        return Ok(false);
    }
    let before = energy_between(p, 0.0, spec.tau);
    let inside = energy_between(p, spec.tau, spec.end());
    let after = energy_between(p, spec.end(), p.duration());
    if before > ENERGY_TOL || after > ENERGY_TOL {
        return Ok(false);
    }
    let energy_ok = match (spec.kind, spec.energy, spec.energy_band) {
        (DeferrableKind::Bucket, _, Some((lo, hi))) => {
            inside >= lo - ENERGY_TOL && inside <= hi + ENERGY_TOL
        }
        (DeferrableKind::Bucket, _, None) => true,
        (_, Some(e), _) => (inside - e).abs() <= ENERGY_TOL,
        (_, None, _) => unreachable!("validated at construction"),
    };
    if !energy_ok {
        return Ok(false);
    }
    if spec.kind == DeferrableKind::Bakery {
        let on: Vec<usize> = p
            .values()
            .iter()
            .enumerate()
            .filter(|(_, &v)| v > POWER_TOL)
            .map(|(k, _)| k)
            .collect();
        if let (Some(first), Some(last)) = (on.first(), on.last()) {
            if last - first + 1 != on.len() {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Full power from the first sample at or after `τ` until `E` is delivered,
/// then off. `len` samples of `dt` hours.
pub fn front_loaded_profile(spec: &DeferrableSpec, dt: f64, len: usize) -> Result<Trajectory> {
    let start = ((spec.tau / dt) - TIME_TOL).ceil().max(0.0) as usize;
    let mut remaining = spec.energy.unwrap_or(0.0);
    let mut p = vec![0.0; len];
    for v in p.iter_mut().skip(start) {
        if remaining <= 0.0 {
            break;
        }
        let step = (spec.power_cap * dt).min(remaining);
        *v = step / dt;
        remaining -= step;
    }
    Trajectory::new(dt, p, Unit::Kilowatt)
}

/// Energy the baseline consumes over the disturbance series, kWh.
pub fn hot_day_energy(
    params: &ThermalParams,
    theta_sp: f64,
    hot: &DisturbanceSeries,
) -> Result<f64> {
    let base = baseline_trajectory(params, theta_sp, hot)?;
    Ok(base.power.values().iter().sum::<f64>() * hot.dt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleReport {
    pub deferrable_ok: bool,
    pub qos_ok: bool,
    pub first_violation: Option<Violation>,
    pub profile: Trajectory,
}

/// Runs the front-loaded profile for `spec` through both the deferrable-load
/// definition and the temperature constraints of `scn`.
pub fn counterexample_check(spec: &DeferrableSpec, scn: &Scenario) -> Result<CounterexampleReport> {
    let horizon = scn.steps() as f64 * scn.dt();
    if spec.end() > horizon + TIME_TOL {
        return Err(Error::WindowTooShort {
            have: horizon,
            need: spec.end(),
        });
    }
    let profile = front_loaded_profile(spec, scn.dt(), scn.steps())?;
    check_profile(spec, scn, profile)
}

/// As [`counterexample_check`] for a caller-supplied profile.
pub fn check_profile(
    spec: &DeferrableSpec,
    scn: &Scenario,
    profile: Trajectory,
) -> Result<CounterexampleReport> {
    let deferrable_ok = trajectory_satisfies(spec, &profile)?;
    let verdict = is_member(&profile, scn)?;
    Ok(CounterexampleReport {
        deferrable_ok,
        qos_ok: verdict.is_feasible(),
        first_violation: verdict.violation,
        profile,
    })
}
