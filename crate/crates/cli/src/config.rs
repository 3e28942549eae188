//! TOML configuration. Every physical key carries its unit in the name;
//! unknown keys are rejected so a misspelt unit cannot be silently ignored.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use vesflex::flexset::Scenario;
use vesflex::qos::QosBounds;
use vesflex::thermal::{equilibrium_power, DisturbanceSeries, ThermalParams};

pub const REFERENCE_PRESET: &str = include_str!("../presets/reference.toml");

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub scenario: ScenarioCfg,
    #[serde(default)]
    pub plan: PlanCfg,
    #[serde(default)]
    pub freq: FreqCfg,
    #[serde(default)]
    pub humidity: HumidityCfg,
    #[serde(default)]
    pub deferrable: DeferrableCfg,
    #[serde(default)]
    pub ensemble: EnsembleCfg,
    #[serde(default)]
    pub capacity: WeatherOverride,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioCfg {
    #[serde(rename = "R_C_per_kW")]
    pub r: f64,
    #[serde(rename = "C_kWh_per_C")]
    pub c: f64,
    pub eta_cop: f64,
    #[serde(rename = "p_rated_kW")]
    pub p_rated: f64,
    #[serde(rename = "theta_sp_C")]
    pub theta_sp: f64,
    #[serde(rename = "delta_theta_C")]
    pub delta_theta: f64,
    #[serde(rename = "theta0_C")]
    pub theta0: Option<f64>,
    #[serde(rename = "theta_a_C")]
    pub theta_a: Option<f64>,
    #[serde(rename = "q_d_kW")]
    pub q_d: Option<f64>,
    pub dt_hours: Option<f64>,
    pub horizon_hours: Option<f64>,
    pub disturbance_csv: Option<PathBuf>,
}

/// Constant weather on a uniform grid; fields left out fall back to the
/// scenario block.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeatherOverride {
    #[serde(rename = "theta_a_C")]
    pub theta_a: Option<f64>,
    #[serde(rename = "q_d_kW")]
    pub q_d: Option<f64>,
    pub dt_hours: Option<f64>,
    pub horizon_hours: Option<f64>,
    /// Sets `p_rated` to the equilibrium demand of this weather plus the headroom.
    #[serde(rename = "headroom_kW")]
    pub headroom: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanCfg {
    pub reference_csv: Option<PathBuf>,
    /// Without a reference file: baseline plus this offset.
    #[serde(rename = "reference_offset_kW", default = "default_offset")]
    pub reference_offset: f64,
    #[serde(default = "default_norm")]
    pub norm: String,
    pub horizon_steps: Option<usize>,
}

fn default_offset() -> f64 {
    0.3
}
fn default_norm() -> String {
    "two".into()
}

impl Default for PlanCfg {
    fn default() -> Self {
        PlanCfg {
            reference_csv: None,
            reference_offset: default_offset(),
            norm: default_norm(),
            horizon_steps: None,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreqCfg {
    #[serde(default = "default_omegas")]
    pub omega_cycles_per_hour: Vec<f64>,
}

fn default_omegas() -> Vec<f64> {
    vec![0.0, 0.5, 1.0, 2.0, 4.0]
}

impl Default for FreqCfg {
    fn default() -> Self {
        FreqCfg {
            omega_cycles_per_hour: default_omegas(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HumidityCfg {
    #[serde(rename = "m_dot_kg_per_s")]
    pub m_dot: f64,
    #[serde(rename = "mixed_T_C")]
    pub mixed_t: f64,
    #[serde(rename = "mixed_W_kg_per_kg")]
    pub mixed_w: f64,
    #[serde(rename = "conditioned_T_C")]
    pub conditioned_t: f64,
    #[serde(rename = "conditioned_W_kg_per_kg")]
    pub conditioned_w: f64,
    pub eta_cop_ch: f64,
}

impl Default for HumidityCfg {
    fn default() -> Self {
        HumidityCfg {
            m_dot: 1.0,
            mixed_t: 23.89,
            mixed_w: 0.009,
            conditioned_t: 12.78,
            conditioned_w: 0.004,
            eta_cop_ch: 3.5,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeferrableCfg {
    #[serde(default = "default_kind")]
    pub kind: String,
    #[serde(default)]
    pub tau_hours: f64,
    /// Without an energy: the baseline energy of the hot day over the window.
    #[serde(rename = "energy_kWh")]
    pub energy: Option<f64>,
    #[serde(default = "default_window")]
    pub window_hours: f64,
    /// Defaults to the rated power of the check scenario.
    #[serde(rename = "power_cap_kW")]
    pub power_cap: Option<f64>,
    #[serde(rename = "hot_theta_a_C", default = "default_hot_ta")]
    pub hot_theta_a: f64,
    #[serde(rename = "hot_q_d_kW", default = "default_hot_qd")]
    pub hot_q_d: f64,
    /// Sets `p_rated` to the hot-day equilibrium demand plus this headroom.
    #[serde(rename = "headroom_kW")]
    pub headroom: Option<f64>,
    /// Weather of the day the profile is checked on.
    #[serde(default)]
    pub check: WeatherOverride,
}

fn default_kind() -> String {
    "battery".into()
}
fn default_window() -> f64 {
    24.0
}
fn default_hot_ta() -> f64 {
    32.0
}
fn default_hot_qd() -> f64 {
    1.5
}

impl Default for DeferrableCfg {
    fn default() -> Self {
        DeferrableCfg {
            kind: default_kind(),
            tau_hours: 0.0,
            energy: None,
            window_hours: default_window(),
            power_cap: None,
            hot_theta_a: default_hot_ta(),
            hot_q_d: default_hot_qd(),
            headroom: None,
            check: WeatherOverride::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleCfg {
    #[serde(rename = "u_kW", default = "default_u")]
    pub u: f64,
    #[serde(default = "default_cap")]
    pub max_loads: usize,
    pub reference_csv: Option<PathBuf>,
    /// Without a reference file: staircase triangle of this peak and period.
    #[serde(default = "default_peak")]
    pub triangle_peak_units: usize,
    #[serde(default = "default_period")]
    pub triangle_period_slots: usize,
}

fn default_u() -> f64 {
    1.0
}
fn default_cap() -> usize {
    1000
}
fn default_peak() -> usize {
    5
}
fn default_period() -> usize {
    21
}

impl Default for EnsembleCfg {
    fn default() -> Self {
        EnsembleCfg {
            u: default_u(),
            max_loads: default_cap(),
            reference_csv: None,
            triangle_peak_units: default_peak(),
            triangle_period_slots: default_period(),
        }
    }
}

impl Config {
    /// Loads `path`, or the bundled preset when `path` is `None`.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Self::parse(REFERENCE_PRESET, PathBuf::from(".")),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config {}", p.display()))?;
                let dir = p.parent().map(Path::to_path_buf).unwrap_or_default();
                Self::parse(&text, dir).with_context(|| format!("in config {}", p.display()))
            }
        }
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self> {
        let mut cfg: Config = toml::from_str(text).context("malformed config")?;
        cfg.base_dir = base_dir;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn open(&self, p: &Path) -> Result<File> {
        let full = self.resolve(p);
        File::open(&full).with_context(|| format!("opening {}", full.display()))
    }

    pub fn params(&self) -> Result<ThermalParams> {
        let s = &self.scenario;
        Ok(ThermalParams::new(s.r, s.c, s.eta_cop, s.p_rated)?)
    }

    /// The scenario block, with `over` replacing weather fields it sets and
    /// `disturbance` replacing the weather entirely.
    pub fn scenario(&self, over: &WeatherOverride, disturbance: Option<&Path>) -> Result<Scenario> {
        let s = &self.scenario;
        let mut params = self.params()?;
        let csv = disturbance.map(Path::to_path_buf).or_else(|| {
            if over.theta_a.is_some() || over.q_d.is_some() {
                None
            } else {
                s.disturbance_csv.clone()
            }
        });
        let dist = match csv {
            Some(path) => {
                let d = vesflex::io::read_disturbance(self.open(&path)?)
                    .with_context(|| format!("reading disturbance {}", path.display()))?;
                match over.horizon_hours.or(s.horizon_hours) {
                    Some(h) => {
                        let n = steps(h, d.dt())?;
                        d.slice(0, n.min(d.len()))?
                    }
                    None => d,
                }
            }
            None => {
                let pick = |a: Option<f64>, b: Option<f64>, name: &str| {
                    a.or(b)
                        .with_context(|| format!("scenario needs `{name}` or `disturbance_csv`"))
                };
                let ta = pick(over.theta_a, s.theta_a, "theta_a_C")?;
                let qd = pick(over.q_d, s.q_d, "q_d_kW")?;
                let dt = pick(over.dt_hours, s.dt_hours, "dt_hours")?;
                let h = pick(over.horizon_hours, s.horizon_hours, "horizon_hours")?;
                DisturbanceSeries::constant(dt, ta, qd, steps(h, dt)?)?
            }
        };
        if let Some(headroom) = over.headroom {
            let p_eq = equilibrium_power(&params, dist.theta_a()[0], dist.q_d()[0], s.theta_sp);
            params = params.with_p_rated(p_eq + headroom)?;
        }
        let bounds = QosBounds::symmetric(s.theta_sp, s.delta_theta)?;
        Ok(Scenario::new(
            params,
            bounds,
            dist,
            s.theta_sp,
            s.theta0.unwrap_or(s.theta_sp),
        )?)
    }
}

fn steps(hours: f64, dt: f64) -> Result<usize> {
    if !(hours > 0.0 && dt > 0.0) {
        bail!("horizon_hours and dt_hours must be positive, got {hours} and {dt}");
    }
    let n = hours / dt;
    if (n - n.round()).abs() > 1e-6 {
        bail!("horizon_hours {hours} is not a whole number of {dt} h steps");
    }
    Ok(n.round() as usize)
}
