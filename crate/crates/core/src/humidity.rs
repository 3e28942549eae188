//! Psychrometrics of a cooling coil: moist-air enthalpy, coil duty, chiller
//! electric demand and the latent/sensible split.

use crate::{Error, Result};

/// Dry-bulb temperature (°C) and humidity ratio (kg water per kg dry air).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoistAirState {
    temp: f64,
    w: f64,
}

impl MoistAirState {
    pub const TEMP_RANGE: (f64, f64) = (-50.0, 60.0);

    pub fn new(temp: f64, w: f64) -> Result<Self> {
        let (lo, hi) = Self::TEMP_RANGE;
        if !(temp >= lo && temp <= hi) {
            return Err(Error::param(
                "temp",
                format!("{temp} °C is outside [{lo}, {hi}] °C"),
            ));
        }
        if !(w >= 0.0 && w.is_finite()) {
            return Err(Error::param(
                "w",
                format!("humidity ratio must be >= 0, got {w}"),
            ));
        }
        Ok(MoistAirState { temp, w })
    }

    pub fn temp(&self) -> f64 {
        self.temp
    }
    pub fn w(&self) -> f64 {
        self.w
    }
}

/// Return/mixed air at the cooling design point, 75 °F.
pub const DESIGN_MIXED_AIR: MoistAirState = MoistAirState {
    temp: 23.89,
    w: 0.009,
};
/// Conditioned air leaving the coil, 55 °F.
pub const DESIGN_CONDITIONED_AIR: MoistAirState = MoistAirState {
    temp: 12.78,
    w: 0.004,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PsychroConstants {
    /// kJ/(kg·°C)
    pub cp_air: f64,
    /// kJ/(kg·°C)
    pub cp_water_vapor: f64,
    /// kJ/kg
    pub h_g: f64,
}

impl Default for PsychroConstants {
    fn default() -> Self {
        PsychroConstants {
            cp_air: 1.0,
            cp_water_vapor: 4.184,
            h_g: 2256.0,
        }
    }
}

impl PsychroConstants {
    pub fn new(cp_air: f64, cp_water_vapor: f64, h_g: f64) -> Result<Self> {
        for (name, v) in [
            ("cp_air", cp_air),
            ("cp_water_vapor", cp_water_vapor),
            ("h_g", h_g),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(PsychroConstants {
            cp_air,
            cp_water_vapor,
            h_g,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AhuOperatingPoint {
    m_dot_sa: f64,
    mixed: MoistAirState,
    conditioned: MoistAirState,
    eta_cop_ch: f64,
    constants: PsychroConstants,
}

impl AhuOperatingPoint {
    /// `m_dot_sa` in kg/s; `eta_cop_ch` may be `+∞` for an ideal plant.
    pub fn new(
        m_dot_sa: f64,
        mixed: MoistAirState,
        conditioned: MoistAirState,
        eta_cop_ch: f64,
    ) -> Result<Self> {
        if !(m_dot_sa > 0.0 && m_dot_sa.is_finite()) {
            return Err(Error::param(
                "m_dot_sa",
                format!("must be positive, got {m_dot_sa}"),
            ));
        }
        if !(eta_cop_ch > 0.0) {
            return Err(Error::param(
                "eta_cop_ch",
                format!("must be positive, got {eta_cop_ch}"),
            ));
        }
        Ok(AhuOperatingPoint {
            m_dot_sa,
            mixed,
            conditioned,
            eta_cop_ch,
            constants: PsychroConstants::default(),
        })
    }

    pub fn with_constants(mut self, constants: PsychroConstants) -> Self {
        self.constants = constants;
        self
    }

    pub fn m_dot_sa(&self) -> f64 {
        self.m_dot_sa
    }
    pub fn mixed(&self) -> MoistAirState {
        self.mixed
    }
    pub fn conditioned(&self) -> MoistAirState {
        self.conditioned
    }
    pub fn eta_cop_ch(&self) -> f64 {
        self.eta_cop_ch
    }
    pub fn constants(&self) -> PsychroConstants {
        self.constants
    }
}

/// `h = cp·T + W·(h_g + cp_w·T)`, kJ per kg dry air.
pub fn specific_enthalpy(state: MoistAirState, c: &PsychroConstants) -> f64 {
    c.cp_air * state.temp + state.w * (c.h_g + c.cp_water_vapor * state.temp)
}

/// Heat removed from the mixed-air stream, kW thermal. Negative when the
/// coil adds heat.
pub fn coil_thermal_power(op: &AhuOperatingPoint) -> f64 {
    let c = &op.constants;
    op.m_dot_sa * (specific_enthalpy(op.mixed, c) - specific_enthalpy(op.conditioned, c))
}

/// Chiller electric demand for the coil duty, kW.
pub fn electric_demand_cd(op: &AhuOperatingPoint) -> f64 {
    coil_thermal_power(op) / op.eta_cop_ch
}

/// Adiabatic mixing by mass fraction of outdoor air.
pub fn mix_air(oa: MoistAirState, ra: MoistAirState, oa_fraction: f64) -> Result<MoistAirState> {
    if !(0.0..=1.0).contains(&oa_fraction) {
        return Err(Error::param(
            "oa_fraction",
            format!("must be in [0, 1], got {oa_fraction}"),
        ));
    }
    if oa_fraction == 0.0 {
        return Ok(ra);
    }
    if oa_fraction == 1.0 {
        return Ok(oa);
    }
    let blend = |a: f64, b: f64| oa_fraction * a + (1.0 - oa_fraction) * b;
    MoistAirState::new(blend(oa.temp, ra.temp), blend(oa.w, ra.w))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentSensibleSplit {
    /// kJ/kg
    pub sensible: f64,
    /// kJ/kg
    pub latent: f64,
    /// `latent / (sensible + latent)`; `None` when both are zero.
    pub latent_fraction: Option<f64>,
}

/// `latent / (sensible + latent)`, undefined when the total is zero.
pub fn latent_fraction(sensible: f64, latent: f64) -> Option<f64> {
    let total = sensible + latent;
    if total == 0.0 {
        None
    } else {
        Some(latent / total)
    }
}

/// Components of the approximate enthalpy drop `cp·ΔT + h_g·ΔW`.
pub fn latent_sensible_split(
    mixed: MoistAirState,
    conditioned: MoistAirState,
    c: &PsychroConstants,
) -> LatentSensibleSplit {
    let sensible = c.cp_air * (mixed.temp - conditioned.temp);
    let latent = c.h_g * (mixed.w - conditioned.w);
    LatentSensibleSplit {
        sensible,
        latent,
        latent_fraction: latent_fraction(sensible, latent),
    }
}

/// Relative error of a demand model that sees temperature only: the latent
/// share of the coil load.
pub fn humidity_neglect_error(
    mixed: MoistAirState,
    conditioned: MoistAirState,
    c: &PsychroConstants,
) -> Result<f64> {
    let split = latent_sensible_split(mixed, conditioned, c);
    match split.latent_fraction {
        Some(f) if split.sensible + split.latent > 0.0 => Ok(f),
        _ => Err(Error::param(
            "coil load",
            format!(
                "total load {} kJ/kg must be positive",
                split.sensible + split.latent
            ),
        )),
    }
}
