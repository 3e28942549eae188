//! Pulse-pair scheduling for a homogeneous collection of loads.
//!
//! Each load deviates from its baseline by `+u` or `−u` for exactly one slot
//! and must then take the opposite deviation in the next slot. It may start
//! a new pair in the slot right after the previous one ends.
//!
//! A schedule with `a_t` up-down and `b_t` down-up pairs starting at slot `t`
//! has `a_t − b_t = S_t`, the cumulative reference through `t`. Slot `t` is
//! therefore occupied by at least `|S_{t−1}| + |S_t|` loads; choosing
//! `a_t = S_t⁺`, `b_t = S_t⁻` attains this, and since pairs are intervals a
//! greedy assignment needs no more loads than the peak occupancy.

use crate::{Error, Result};

const INTEGER_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseLoadSpec {
    u: f64,
    slot: f64,
    n: usize,
}

impl PulseLoadSpec {
    /// Deviation `u` (kW), slot length (h) and fleet size.
    pub fn new(u: f64, slot: f64, n: usize) -> Result<Self> {
        if !(u > 0.0 && u.is_finite()) {
            return Err(Error::param("u", format!("must be positive, got {u}")));
        }
        if !(slot > 0.0 && slot.is_finite()) {
            return Err(Error::param(
                "slot",
                format!("must be positive, got {slot}"),
            ));
        }
        if n == 0 {
            return Err(Error::param("n", "need at least one load"));
        }
        Ok(PulseLoadSpec { u, slot, n })
    }

    pub fn u(&self) -> f64 {
        self.u
    }
    pub fn slot(&self) -> f64 {
        self.slot
    }
    pub fn n(&self) -> usize {
        self.n
    }
}

/// Per-load deviations in units of `u`, one row per load.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSchedule {
    pub u: f64,
    pub loads: Vec<Vec<i8>>,
    /// Column sums times `u`, kW.
    pub aggregate: Vec<f64>,
}

impl EnsembleSchedule {
    /// Builds the schedule and its aggregate from per-load rows.
    pub fn from_loads(u: f64, loads: Vec<Vec<i8>>, slots: usize) -> Result<Self> {
        if let Some((i, row)) = loads.iter().enumerate().find(|(_, r)| r.len() != slots) {
            return Err(Error::MalformedSchedule(format!(
                "load {i} has {} slots, expected {slots}",
                row.len()
            )));
        }
        let aggregate = (0..slots)
            .map(|t| loads.iter().map(|r| r[t] as f64).sum::<f64>() * u)
            .collect();
        Ok(EnsembleSchedule {
            u,
            loads,
            aggregate,
        })
    }

    pub fn loads_used(&self) -> usize {
        self.loads.len()
    }

    pub fn slots(&self) -> usize {
        self.aggregate.len()
    }
}

/// True iff every row is idle slots and adjacent opposite-sign pairs, and the
/// stored aggregate equals the column sums times `u`.
pub fn validate_schedule(s: &EnsembleSchedule) -> Result<bool> {
    let slots = s.aggregate.len();
    for (i, row) in s.loads.iter().enumerate() {
        if row.len() != slots {
            return Err(Error::MalformedSchedule(format!(
                "load {i} has {} slots, expected {slots}",
                row.len()
            )));
        }
        if let Some(t) = row.iter().position(|v| !(-1..=1).contains(v)) {
            return Err(Error::MalformedSchedule(format!(
                "load {i} slot {t} holds {}",
                row[t]
            )));
        }
    }
    let grammar_ok = s.loads.iter().all(|row| parses_as_pairs(row));
    let sums_ok = (0..slots).all(|t| {
        let col: i64 = s.loads.iter().map(|r| r[t] as i64).sum();
        (col as f64 * s.u - s.aggregate[t]).abs() <= INTEGER_TOL * (1.0 + s.aggregate[t].abs())
    });
    Ok(grammar_ok && sums_ok)
}

fn parses_as_pairs(row: &[i8]) -> bool {
    let mut t = 0;
    while t < row.len() {
        if row[t] == 0 {
            t += 1;
        } else if t + 1 < row.len() && row[t + 1] == -row[t] {
            t += 2;
        } else {
            return false;
        }
    }
    true
}

/// Converts a kW reference to integer multiples of `u`.
pub fn reference_units(reference: &[f64], u: f64) -> Result<Vec<i64>> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(Error::param("u", format!("must be positive, got {u}")));
    }
    reference
        .iter()
        .enumerate()
        .map(|(slot, &value)| {
            let x = value / u;
            let r = x.round();
            if !x.is_finite() || (x - r).abs() > INTEGER_TOL * (1.0 + r.abs()) {
                Err(Error::NonIntegerReference { slot, value })
            } else {
                Ok(r as i64)
            }
        })
        .collect()
}

fn cumulative(units: &[i64]) -> Result<Vec<i64>> {
    let s: Vec<i64> = units
        .iter()
        .scan(0i64, |acc, &r| {
            *acc += r;
            Some(*acc)
        })
        .collect();
    let sum = s.last().copied().unwrap_or(0);
    if sum != 0 {
        return Err(Error::NonZeroSum { sum });
    }
    Ok(s)
}

fn required_loads(s: &[i64]) -> usize {
    (0..s.len())
        .map(|t| {
            let prev = if t == 0 { 0 } else { s[t - 1].unsigned_abs() };
            (prev + s[t].unsigned_abs()) as usize
        })
        .max()
        .unwrap_or(0)
}

/// Smallest fleet that tracks `reference` (kW) exactly; errors if it exceeds `cap`.
pub fn min_loads(reference: &[f64], u: f64, cap: usize) -> Result<usize> {
    let s = cumulative(&reference_units(reference, u)?)?;
    let needed = required_loads(&s);
    if needed > cap {
        return Err(Error::LoadCapExceeded { cap, needed });
    }
    Ok(needed)
}

/// Exact-tracking schedule with the fewest loads, or `LoadCapExceeded` if
/// that exceeds `max_loads`.
pub fn schedule_tracking(reference: &[f64], u: f64, max_loads: usize) -> Result<EnsembleSchedule> {
    let s = cumulative(&reference_units(reference, u)?)?;
    let needed = required_loads(&s);
    if needed > max_loads {
        return Err(Error::LoadCapExceeded {
            cap: max_loads,
            needed,
        });
    }
    let slots = s.len();
    let mut loads: Vec<Vec<i8>> = Vec::with_capacity(needed);
    // Last slot each load is busy in.
    let mut busy_until: Vec<usize> = Vec::with_capacity(needed);
    for (t, &st) in s.iter().enumerate() {
        let sign: i8 = if st > 0 { 1 } else { -1 };
        for _ in 0..st.unsigned_abs() {
            let idx = match busy_until.iter().position(|&b| b < t) {
                Some(i) => i,
                None => {
                    loads.push(vec![0; slots]);
                    busy_until.push(0);
                    loads.len() - 1
                }
            };
            loads[idx][t] = sign;
            loads[idx][t + 1] = -sign;
            busy_until[idx] = t + 1;
        }
    }
    EnsembleSchedule::from_loads(u, loads, slots)
}

/// Square wave: `amplitude` for `half_period` slots, then `−amplitude`.
pub fn square_wave(amplitude: f64, half_period: usize, cycles: usize) -> Vec<f64> {
    (0..cycles)
        .flat_map(|_| {
            std::iter::repeat_n(amplitude, half_period)
                .chain(std::iter::repeat_n(-amplitude, half_period))
        })
        .collect()
}

/// Integer staircase triangle `0, 1, …, peak, …, 1, 0, −1, …, −peak, …, −1`
/// in units of `step`, padded with trailing zeros up to `period` slots.
pub fn triangle_staircase(peak: usize, step: f64, period: usize) -> Result<Vec<f64>> {
    let p = peak as i64;
    let base: Vec<i64> = (0..4 * p)
        .map(|k| {
            if k <= 2 * p {
                p - (k - p).abs()
            } else {
                (k - 3 * p).abs() - p
            }
        })
        .collect();
    if period < base.len() {
        return Err(Error::param(
            "period",
            format!("must be at least {} slots", base.len()),
        ));
    }
    Ok(base
        .into_iter()
        .map(|k| k as f64 * step)
        .chain(std::iter::repeat_n(0.0, period - 4 * peak))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePoint {
    pub half_period: usize,
    /// Largest trackable square-wave amplitude, kW.
    pub amplitude: f64,
    pub units: usize,
}

/// For each half-period, the largest integer multiple of `u` whose
/// one-cycle square wave the fleet of `n` loads tracks exactly.
pub fn amplitude_timescale_curve(
    spec: &PulseLoadSpec,
    half_periods: &[usize],
) -> Result<Vec<AmplitudePoint>> {
    half_periods
        .iter()
        .map(|&tau| {
            if tau == 0 {
                return Err(Error::param("half_period", "must be at least one slot"));
            }
            let mut units = 0;
            while units < spec.n {
                let wave = square_wave((units + 1) as f64 * spec.u, tau, 1);
                if min_loads(&wave, spec.u, spec.n).is_err() {
                    break;
                }
                units += 1;
            }
            Ok(AmplitudePoint {
                half_period: tau,
                amplitude: units as f64 * spec.u,
                units,
            })
        })
        .collect()
}
