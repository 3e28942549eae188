use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Unit {
    Kilowatt,
    KilowattHour,
    Celsius,
    HumidityRatio,
    Count,
    Dimensionless,
}

impl Unit {
    pub fn symbol(self) -> &'static str {
        match self {
            Unit::Kilowatt => "kW",
            Unit::KilowattHour => "kWh",
            Unit::Celsius => "°C",
            Unit::HumidityRatio => "kg/kg",
            Unit::Count => "count",
            Unit::Dimensionless => "-",
        }
    }
}

/// Uniformly sampled time series. Sample `k` sits at `t = k·dt` hours.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    dt: f64,
    values: Vec<f64>,
    unit: Unit,
}

impl Trajectory {
    pub fn new(dt: f64, values: Vec<f64>, unit: Unit) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Trajectory { dt, values, unit })
    }

    pub fn constant(dt: f64, value: f64, len: usize, unit: Unit) -> Result<Self> {
        Self::new(dt, vec![value; len], unit)
    }

    pub fn from_fn(dt: f64, len: usize, unit: Unit, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(dt, (0..len).map(|k| f(k as f64 * dt)).collect(), unit)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn unit(&self) -> Unit {
        self.unit
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn time(&self, k: usize) -> f64 {
        k as f64 * self.dt
    }

    pub fn duration(&self) -> f64 {
        self.len() as f64 * self.dt
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(
            self.dt,
            self.values.iter().map(|&v| f(v)).collect(),
            self.unit,
        )
    }

    /// Elementwise `self + other`; shapes must agree.
    pub fn add(&self, other: &Trajectory) -> Result<Self> {
        check_same_grid(self, "left", other, "right")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a + b)
            .collect();
        Self::new(self.dt, values, self.unit)
    }

    pub fn sub(&self, other: &Trajectory) -> Result<Self> {
        check_same_grid(self, "left", other, "right")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        Self::new(self.dt, values, self.unit)
    }

    pub fn slice(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.len() {
            return Err(Error::LengthMismatch {
                what: "requested window",
                left: start + len,
                other: "trajectory",
                right: self.len(),
            });
        }
        Self::new(self.dt, self.values[start..start + len].to_vec(), self.unit)
    }
}

pub(crate) fn same_dt(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1.0)
}

pub(crate) fn check_same_grid(
    a: &Trajectory,
    a_name: &'static str,
    b: &Trajectory,
    b_name: &'static str,
) -> Result<()> {
    if !same_dt(a.dt, b.dt) {
        return Err(Error::StepMismatch {
            left: a.dt,
            right: b.dt,
        });
    }
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            what: a_name,
            left: a.len(),
            other: b_name,
            right: b.len(),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_step_and_nan() {
        assert!(Trajectory::new(0.0, vec![1.0], Unit::Kilowatt).is_err());
        assert_eq!(
            Trajectory::new(0.1, vec![1.0, f64::NAN], Unit::Kilowatt),
            Err(Error::NonFinite { index: 1 })
        );
    }

    #[test]
    fn arithmetic_requires_same_grid() {
        let a = Trajectory::constant(0.1, 1.0, 3, Unit::Kilowatt).unwrap();
        let b = Trajectory::constant(0.2, 1.0, 3, Unit::Kilowatt).unwrap();
        assert!(matches!(a.add(&b), Err(Error::StepMismatch { .. })));
        let c = Trajectory::constant(0.1, 0.5, 3, Unit::Kilowatt).unwrap();
        assert_eq!(a.sub(&c).unwrap().values(), &[0.5, 0.5, 0.5]);
    }
}
