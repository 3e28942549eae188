//! CSV ingestion and export. Column names carry their units; time columns
//! must be uniform to within `TIME_TOL` hours. Numbers are written in
//! shortest round-trip form, so parsing an emitted file recovers the payload.

use std::io::{Read, Write};

use crate::ensemble::EnsembleSchedule;
use crate::flexset::FlexEnvelope;
use crate::thermal::DisturbanceSeries;
use crate::{Error, Result, Trajectory, Unit};

/// Allowed deviation of a time stamp from the uniform grid, h.
pub const TIME_TOL: f64 = 1e-9;

pub const DISTURBANCE_HEADER: [&str; 3] = ["t_hours", "theta_a_C", "q_d_kW"];
pub const ENVELOPE_HEADER: [&str; 3] = ["t_hours", "p_lo_kW", "p_hi_kW"];
pub const REFERENCE_HEADER: [&str; 2] = ["t_hours", "r_ba_kW"];
pub const POWER_HEADER: [&str; 2] = ["t_hours", "p_kW"];
pub const TEMPERATURE_HEADER: [&str; 2] = ["t_hours", "theta_C"];
pub const PLAN_HEADER: [&str; 3] = ["t_hours", "p_star_kW", "theta_C"];
pub const ENSEMBLE_REFERENCE_HEADER: [&str; 2] = ["slot", "deviation_units"];
pub const HUMIDITY_HEADER: [&str; 5] = [
    "q_cd_kW",
    "p_cd_kW",
    "sensible_kJkg",
    "latent_kJkg",
    "latent_fraction",
];
pub const CAPACITY_HEADER: [&str; 5] = ["p_c_kW", "p_dc_kW", "e_c_kWh", "e_dc_kWh", "horizon_h"];
pub const FREQ_HEADER: [&str; 5] = [
    "omega_rad_per_h",
    "a_max_unclamped_kW",
    "a_max_kW",
    "ratio_unclamped",
    "ratio",
];
pub const DEFERRABLE_HEADER: [&str; 5] = [
    "deferrable_ok",
    "qos_ok",
    "violation_index",
    "violation_t_hours",
    "violation_value",
];

fn csv_err(e: csv::Error) -> Error {
    Error::Parse(format!("csv: {e}"))
}

fn io_err(e: std::io::Error) -> Error {
    Error::Parse(format!("write failed: {e}"))
}

fn parse_cell(cell: &str, row: usize, col: &str) -> Result<Option<f64>> {
    let cell = cell.trim();
    if cell.is_empty() {
        return Ok(None);
    }
    match cell.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(Some(v)),
        _ => Err(Error::Parse(format!(
            "row {row}, column `{col}`: `{cell}` is not a finite number"
        ))),
    }
}

/// Reads a table whose header must be exactly `expected`, returning columns.
/// Empty cells are `None`.
fn read_optional_columns<R: Read>(rdr: R, expected: &[&str]) -> Result<Vec<Vec<Option<f64>>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(rdr);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    if header != expected {
        return Err(Error::Parse(format!(
            "header `{}` does not match expected `{}`",
            header.join(","),
            expected.join(",")
        )));
    }
    read_body(&mut rdr, &header)
}

fn read_body<R: Read>(
    rdr: &mut csv::Reader<R>,
    header: &[String],
) -> Result<Vec<Vec<Option<f64>>>> {
    let mut cols = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let row = i + 1;
        if rec.len() != header.len() {
            return Err(Error::Parse(format!(
                "row {row} has {} fields, expected {}",
                rec.len(),
                header.len()
            )));
        }
        for (c, cell) in rec.iter().enumerate() {
            cols[c].push(parse_cell(cell, row, &header[c])?);
        }
    }
    Ok(cols)
}

fn require_all(cols: Vec<Vec<Option<f64>>>, header: &[&str]) -> Result<Vec<Vec<f64>>> {
    cols.into_iter()
        .zip(header)
        .map(|(col, name)| {
            col.into_iter()
                .enumerate()
                .map(|(i, v)| {
                    v.ok_or_else(|| {
                        Error::Parse(format!("row {}, column `{name}`: empty cell", i + 1))
                    })
                })
                .collect()
        })
        .collect()
}

/// Reads a table whose header must be exactly `expected`, returning columns.
pub fn read_table<R: Read>(rdr: R, expected: &[&str]) -> Result<Vec<Vec<f64>>> {
    require_all(read_optional_columns(rdr, expected)?, expected)
}

/// Step of a uniform time column.
fn uniform_step(t: &[f64]) -> Result<f64> {
    if t.len() < 2 {
        return Err(Error::Parse(format!(
            "time column needs at least 2 rows to fix the step, got {}",
            t.len()
        )));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::Parse("time column must be increasing".into()));
    }
    for (k, &tk) in t.iter().enumerate() {
        if (tk - (t[0] + k as f64 * dt)).abs() > TIME_TOL {
            return Err(Error::Parse(format!(
                "time column is not uniform: row {} has t = {tk} h, expected {} h",
                k + 1,
                t[0] + k as f64 * dt
            )));
        }
    }
    Ok(dt)
}

fn writer<W: Write>(w: W, header: &[&str]) -> Result<csv::Writer<W>> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(header).map_err(csv_err)?;
    Ok(wtr)
}

fn fmt(v: f64) -> String {
    format!("{v}")
}

fn finish<W: Write>(wtr: csv::Writer<W>) -> Result<()> {
    wtr.into_inner()
        .map_err(|e| io_err(e.into_error()))?
        .flush()
        .map_err(io_err)
}

fn write_time_table<W: Write>(w: W, header: &[&str], dt: f64, cols: &[&[f64]]) -> Result<()> {
    let mut wtr = writer(w, header)?;
    let n = cols.first().map_or(0, |c| c.len());
    for k in 0..n {
        let mut rec = vec![fmt(k as f64 * dt)];
        rec.extend(cols.iter().map(|c| fmt(c[k])));
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    finish(wtr)
}

/// Writes equal-length columns under `header`.
pub fn write_table<W: Write>(w: W, header: &[&str], cols: &[&[f64]]) -> Result<()> {
    if header.len() != cols.len() {
        return Err(Error::LengthMismatch {
            what: "header",
            left: header.len(),
            other: "columns",
            right: cols.len(),
        });
    }
    let n = cols.first().map_or(0, |c| c.len());
    if let Some(c) = cols.iter().find(|c| c.len() != n) {
        return Err(Error::LengthMismatch {
            what: "first column",
            left: n,
            other: "another column",
            right: c.len(),
        });
    }
    let mut wtr = writer(w, header)?;
    for k in 0..n {
        wtr.write_record(cols.iter().map(|c| fmt(c[k])))
            .map_err(csv_err)?;
    }
    finish(wtr)
}

pub fn read_disturbance<R: Read>(r: R) -> Result<DisturbanceSeries> {
    let mut cols = read_table(r, &DISTURBANCE_HEADER)?;
    let dt = uniform_step(&cols[0])?;
    let q_d = cols.pop().unwrap_or_default();
    let theta_a = cols.pop().unwrap_or_default();
    DisturbanceSeries::new(dt, theta_a, q_d)
}

pub fn write_disturbance<W: Write>(w: W, d: &DisturbanceSeries) -> Result<()> {
    write_time_table(w, &DISTURBANCE_HEADER, d.dt(), &[d.theta_a(), d.q_d()])
}

/// Reads a two-column `t_hours,<value>` series.
pub fn read_series<R: Read>(r: R, header: &[&str; 2], unit: Unit) -> Result<Trajectory> {
    let cols = read_table(r, header)?;
    let dt = uniform_step(&cols[0])?;
    Trajectory::new(dt, cols[1].clone(), unit)
}

pub fn write_series<W: Write>(w: W, header: &[&str; 2], s: &Trajectory) -> Result<()> {
    write_time_table(w, header, s.dt(), &[s.values()])
}

pub fn read_reference<R: Read>(r: R) -> Result<Trajectory> {
    read_series(r, &REFERENCE_HEADER, Unit::Kilowatt)
}

pub fn read_power<R: Read>(r: R) -> Result<Trajectory> {
    read_series(r, &POWER_HEADER, Unit::Kilowatt)
}

pub fn read_envelope<R: Read>(r: R) -> Result<FlexEnvelope> {
    let mut cols = read_table(r, &ENVELOPE_HEADER)?;
    let dt = uniform_step(&cols[0])?;
    let hi = cols.pop().unwrap_or_default();
    let lo = cols.pop().unwrap_or_default();
    FlexEnvelope::new(dt, lo, hi)
}

pub fn write_envelope<W: Write>(w: W, env: &FlexEnvelope) -> Result<()> {
    write_time_table(w, &ENVELOPE_HEADER, env.dt(), &[env.p_lo(), env.p_hi()])
}

/// Plan export: `N + 1` rows, the last power sample carried forward onto
/// the terminal temperature row.
pub fn write_plan<W: Write>(w: W, p: &Trajectory, theta: &Trajectory) -> Result<()> {
    if theta.len() != p.len() + 1 {
        return Err(Error::LengthMismatch {
            what: "theta",
            left: theta.len(),
            other: "power + 1",
            right: p.len() + 1,
        });
    }
    let mut padded = p.values().to_vec();
    padded.push(p.values().last().copied().unwrap_or(0.0));
    write_time_table(w, &PLAN_HEADER, p.dt(), &[&padded, theta.values()])
}

/// Inverse of [`write_plan`]: `(p, θ)` with `N` and `N + 1` samples.
pub fn read_plan<R: Read>(r: R) -> Result<(Trajectory, Trajectory)> {
    let mut cols = read_table(r, &PLAN_HEADER)?;
    let dt = uniform_step(&cols[0])?;
    let theta = cols.pop().unwrap_or_default();
    let mut p = cols.pop().unwrap_or_default();
    p.pop();
    Ok((
        Trajectory::new(dt, p, Unit::Kilowatt)?,
        Trajectory::new(dt, theta, Unit::Celsius)?,
    ))
}

/// Ensemble reference in units of `u`; slots must be `0, 1, 2, …`.
pub fn read_ensemble_reference<R: Read>(r: R) -> Result<Vec<f64>> {
    let cols = read_table(r, &ENSEMBLE_REFERENCE_HEADER)?;
    for (k, &s) in cols[0].iter().enumerate() {
        if s != k as f64 {
            return Err(Error::Parse(format!(
                "slot column must count 0, 1, 2, …; row {} has {s}",
                k + 1
            )));
        }
    }
    Ok(cols[1].clone())
}

pub fn write_ensemble_reference<W: Write>(w: W, reference: &[f64]) -> Result<()> {
    let mut wtr = writer(w, &ENSEMBLE_REFERENCE_HEADER)?;
    for (k, v) in reference.iter().enumerate() {
        wtr.write_record([k.to_string(), fmt(*v)])
            .map_err(csv_err)?;
    }
    finish(wtr)
}

fn schedule_header(loads: usize) -> Vec<String> {
    let mut h = vec!["slot".to_string()];
    h.extend((0..loads).map(|i| format!("load_{i}")));
    h.push("aggregate_kW".to_string());
    h
}

/// Schedule export: one row per slot, one column per load (units of `u`)
/// plus the aggregate in kW.
pub fn write_schedule<W: Write>(w: W, s: &EnsembleSchedule) -> Result<()> {
    let header = schedule_header(s.loads_used());
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(&header).map_err(csv_err)?;
    for t in 0..s.slots() {
        let mut rec = vec![t.to_string()];
        rec.extend(s.loads.iter().map(|row| row[t].to_string()));
        rec.push(fmt(s.aggregate[t]));
        wtr.write_record(&rec).map_err(csv_err)?;
    }
    finish(wtr)
}

/// Inverse of [`write_schedule`]; `u` is not stored in the file.
pub fn read_schedule<R: Read>(r: R, u: f64) -> Result<EnsembleSchedule> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(r);
    let header: Vec<String> = rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(str::to_string)
        .collect();
    let loads = header.len().saturating_sub(2);
    if header.len() < 2 || header != schedule_header(loads) {
        return Err(Error::Parse(format!(
            "header `{}` is not `slot,load_0,…,aggregate_kW`",
            header.join(",")
        )));
    }
    let named: Vec<&str> = header.iter().map(String::as_str).collect();
    let cols = require_all(read_body(&mut rdr, &header)?, &named)?;
    let mut rows = Vec::with_capacity(loads);
    for (i, col) in cols[1..=loads].iter().enumerate() {
        let row = col
            .iter()
            .enumerate()
            .map(|(t, &v)| {
                if v == -1.0 || v == 0.0 || v == 1.0 {
                    Ok(v as i8)
                } else {
                    Err(Error::MalformedSchedule(format!(
                        "load {i} slot {t} holds {v}"
                    )))
                }
            })
            .collect::<Result<Vec<i8>>>()?;
        rows.push(row);
    }
    Ok(EnsembleSchedule {
        u,
        loads: rows,
        aggregate: cols[loads + 1].clone(),
    })
}

/// One-row table with optional (empty) cells.
pub fn write_record<W: Write>(w: W, header: &[&str], values: &[Option<f64>]) -> Result<()> {
    if header.len() != values.len() {
        return Err(Error::LengthMismatch {
            what: "header",
            left: header.len(),
            other: "values",
            right: values.len(),
        });
    }
    let mut wtr = writer(w, header)?;
    wtr.write_record(values.iter().map(|v| v.map(fmt).unwrap_or_default()))
        .map_err(csv_err)?;
    finish(wtr)
}

/// Reads the single data row of a table with header `header`.
pub fn read_record<R: Read>(r: R, header: &[&str]) -> Result<Vec<Option<f64>>> {
    let cols = read_optional_columns(r, header)?;
    if cols.first().map_or(0, Vec::len) != 1 {
        return Err(Error::Parse(format!(
            "expected exactly one data row, got {}",
            cols.first().map_or(0, Vec::len)
        )));
    }
    Ok(cols.into_iter().map(|c| c[0]).collect())
}
