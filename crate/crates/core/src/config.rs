//! Run configuration in human units.
//!
//! Config files are JSON. AP density is given per km², area in km², radio
//! powers in mW, circuit powers in W, coding/decoding/backhaul powers in
//! W per Gbit/s and the AP computational efficiency in Gflops/W. Everything
//! is converted to SI when [`RunConfig::system_params`] and
//! [`RunConfig::power_model`] are called; unknown keys are rejected.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ApcMode;
use crate::optimizer::{Grid, Scale};
use crate::params::{noise_power, pilot_corr_sum, PilotMode, PowerModel, SystemParams};
use crate::sim::{McOptions, PilotPolicy, UserAveraging};

const KM2: f64 = 1e6;
const GBPS: f64 = 1e9;

/// The shipped Table III configuration.
pub const TABLE_III_JSON: &str = include_str!("../../../config/table3.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: SystemSection,
    pub power: PowerSection,
    pub constraint: ConstraintSection,
    #[serde(default)]
    pub apc_mode: ApcMode,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub n_antennas: u32,
    pub n_users: u32,
    pub pilot_reuse: f64,
    pub ap_density_per_km2: f64,
    pub area_km2: f64,
    pub pathloss_exp: f64,
    pub rho_tr_mw: f64,
    pub rho_d_mw: f64,
    pub noise_figure_db: f64,
    pub temperature_k: f64,
    /// Overrides the pilot SNR derived from `rho_tr_mw` and the noise power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_tr_snr: Option<f64>,
    /// Overrides the data SNR derived from `rho_d_mw` and the noise power.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho_d_snr: Option<f64>,
    pub tau_c: u32,
    pub dl_fraction: f64,
    pub bandwidth_hz: f64,
    #[serde(default)]
    pub pilot_mode: PilotMode,
    /// Overrides A; otherwise it follows `pilot_mode`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pilot_corr_sum: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerSection {
    pub p_fp_w: f64,
    pub p_lo_w: f64,
    pub p_ap_w: f64,
    pub p_ue_w: f64,
    pub p_cod_w_per_gbps: f64,
    pub p_dec_w_per_gbps: f64,
    pub p_bt_w_per_gbps: f64,
    pub l_ap_gflops_per_w: f64,
    pub amp_eff: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSection {
    pub gamma0: f64,
}

/// A sweepable quantity; λ is in AP/km² on a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    Zeta,
    Lambda,
    N,
    K,
    Gamma0,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::Zeta => "zeta",
            SweepVariable::Lambda => "lambda",
            SweepVariable::N => "n",
            SweepVariable::K => "k",
            SweepVariable::Gamma0 => "gamma0",
        }
    }

    pub fn is_integer(self) -> bool {
        matches!(self, SweepVariable::N | SweepVariable::K)
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub variable: SweepVariable,
    pub min: f64,
    pub max: f64,
    pub steps: usize,
    #[serde(default)]
    pub scale: Scale,
}

impl SweepAxis {
    /// Axis values in config units. Integer variables are rounded and
    /// deduplicated.
    pub fn grid(&self) -> Result<Grid> {
        let g = Grid::new(self.min, self.max, self.steps, self.scale)?;
        if !self.variable.is_integer() {
            return Ok(g);
        }
        let mut v: Vec<f64> = g.values().iter().map(|x| x.round()).collect();
        v.dedup();
        Grid::from_values(v)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub n_realizations: u64,
    pub seed: u64,
    #[serde(default)]
    pub pilots: PilotPolicy,
    #[serde(default)]
    pub users: UserAveraging,
    /// Emit one NDJSON record per realization next to the summary.
    #[serde(default)]
    pub records: bool,
}

impl Default for McSection {
    fn default() -> Self {
        McSection { n_realizations: 1000, seed: 0, pilots: PilotPolicy::default(), users: UserAveraging::default(), records: false }
    }
}

impl McSection {
    pub fn options(&self) -> McOptions {
        McOptions { pilots: self.pilots, users: self.users }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            _ => Err(Error::config("output.format", format!("expected csv or json, got `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn table_iii() -> Self {
        RunConfig::from_json(TABLE_III_JSON).expect("shipped config is valid")
    }

    /// Parses and validates a JSON document.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            let reason = e.inner().to_string();
            // the path already ends in an unknown key, except at the root
            let key = match reason.strip_prefix("unknown field `").and_then(|r| r.split('`').next()) {
                Some(field) if path == "." => field.to_string(),
                _ => path,
            };
            Error::Config { key, reason }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.system;
        let positive = [
            ("system.pilot_reuse", s.pilot_reuse),
            ("system.ap_density_per_km2", s.ap_density_per_km2),
            ("system.area_km2", s.area_km2),
            ("system.rho_tr_mw", s.rho_tr_mw),
            ("system.rho_d_mw", s.rho_d_mw),
            ("system.temperature_k", s.temperature_k),
            ("system.bandwidth_hz", s.bandwidth_hz),
            ("power.l_ap_gflops_per_w", self.power.l_ap_gflops_per_w),
            ("constraint.gamma0", self.constraint.gamma0),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive and finite, got {v}")));
            }
        }
        for (key, v) in [("system.rho_tr_snr", s.rho_tr_snr), ("system.rho_d_snr", s.rho_d_snr)] {
            if let Some(v) = v.filter(|v| !(*v > 0.0 && v.is_finite())) {
                return Err(Error::config(key, format!("must be positive and finite, got {v}")));
            }
        }
        let p = &self.power;
        let non_negative = [
            ("power.p_fp_w", p.p_fp_w),
            ("power.p_lo_w", p.p_lo_w),
            ("power.p_ap_w", p.p_ap_w),
            ("power.p_ue_w", p.p_ue_w),
            ("power.p_cod_w_per_gbps", p.p_cod_w_per_gbps),
            ("power.p_dec_w_per_gbps", p.p_dec_w_per_gbps),
            ("power.p_bt_w_per_gbps", p.p_bt_w_per_gbps),
        ];
        for (key, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be non-negative and finite, got {v}")));
            }
        }
        if !(p.amp_eff > 0.0 && p.amp_eff <= 1.0) {
            return Err(Error::config("power.amp_eff", format!("must lie in (0, 1], got {}", p.amp_eff)));
        }
        if s.n_antennas == 0 {
            return Err(Error::config("system.n_antennas", "must be at least 1"));
        }
        if s.n_users == 0 {
            return Err(Error::config("system.n_users", "must be at least 1"));
        }
        if s.tau_c == 0 {
            return Err(Error::config("system.tau_c", "must be at least 1"));
        }
        if s.pilot_reuse < 1.0 {
            return Err(Error::config("system.pilot_reuse", format!("must be >= 1, got {}", s.pilot_reuse)));
        }
        if !(s.pathloss_exp > 2.0 && s.pathloss_exp.is_finite()) {
            return Err(Error::config("system.pathloss_exp", format!("must exceed 2, got {}", s.pathloss_exp)));
        }
        if !(s.dl_fraction > 0.0 && s.dl_fraction <= 1.0) {
            return Err(Error::config("system.dl_fraction", format!("must lie in (0, 1], got {}", s.dl_fraction)));
        }
        if !(s.noise_figure_db >= 0.0 && s.noise_figure_db.is_finite()) {
            return Err(Error::config("system.noise_figure_db", format!("must be a non-negative dB value, got {}", s.noise_figure_db)));
        }
        if let Some(a) = s.pilot_corr_sum.filter(|a| !(*a >= 1.0 && a.is_finite())) {
            return Err(Error::config("system.pilot_corr_sum", format!("must be >= 1, got {a}")));
        }
        let tau_tr = s.n_users as f64 / s.pilot_reuse;
        if !(tau_tr >= 1.0 - 1e-12 && tau_tr <= s.tau_c as f64 + 1e-12) {
            return Err(Error::config(
                "system.pilot_reuse",
                format!("training length n_users/pilot_reuse = {tau_tr} must lie in [1, tau_c = {}]", s.tau_c),
            ));
        }
        if s.pilot_mode == PilotMode::WelchBound && s.pilot_corr_sum.is_none() && s.n_users < 3 {
            return Err(Error::config("system.pilot_mode", "the Welch bound needs n_users >= 3"));
        }
        for (i, axis) in self.sweep.iter().enumerate() {
            axis.grid().map_err(|e| Error::config(format!("sweep[{i}]"), e.to_string()))?;
            if axis.scale == Scale::Log && !(axis.min > 0.0) {
                return Err(Error::config(format!("sweep[{i}].min"), "log axes need min > 0"));
            }
            if self.sweep[..i].iter().any(|a| a.variable == axis.variable) {
                return Err(Error::config(format!("sweep[{i}].variable"), format!("{} is swept twice", axis.variable)));
            }
        }
        if self.mc.n_realizations == 0 {
            return Err(Error::config("mc.n_realizations", "must be at least 1"));
        }
        self.system_params()?;
        Ok(())
    }

    /// W
    pub fn noise_power(&self) -> Result<f64> {
        let s = &self.system;
        noise_power(s.bandwidth_hz, s.noise_figure_db, s.temperature_k)
            .map_err(|e| Error::config("system", e.to_string()))
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let s = &self.system;
        let noise = self.noise_power()?;
        let (tr_w, d_w) = (s.rho_tr_mw / 1e3, s.rho_d_mw / 1e3);
        let mut p = SystemParams {
            n_antennas: s.n_antennas,
            n_users: s.n_users,
            pilot_reuse: s.pilot_reuse,
            ap_density: s.ap_density_per_km2 / KM2,
            area: s.area_km2 * KM2,
            pathloss_exp: s.pathloss_exp,
            rho_tr: s.rho_tr_snr.unwrap_or(tr_w / noise),
            rho_d: s.rho_d_snr.unwrap_or(d_w / noise),
            rho_tr_watts: tr_w,
            rho_d_watts: d_w,
            tau_c: s.tau_c,
            dl_fraction: s.dl_fraction,
            bandwidth: s.bandwidth_hz,
            pilot_corr_sum: 1.0,
        };
        p.pilot_corr_sum = match s.pilot_corr_sum {
            Some(a) => a,
            None => pilot_corr_sum(&p, s.pilot_mode).map_err(|e| Error::config("system.pilot_mode", e.to_string()))?,
        };
        p.validate().map_err(|e| Error::config("system", e.to_string()))?;
        Ok(p)
    }

    pub fn power_model(&self) -> PowerModel {
        let p = &self.power;
        PowerModel {
            p_fp: p.p_fp_w,
            p_lo: p.p_lo_w,
            p_ap: p.p_ap_w,
            p_ue: p.p_ue_w,
            p_cod: p.p_cod_w_per_gbps / GBPS,
            p_dec: p.p_dec_w_per_gbps / GBPS,
            p_bt: p.p_bt_w_per_gbps / GBPS,
            l_ap: p.l_ap_gflops_per_w * 1e9,
            amp_eff: p.amp_eff,
        }
    }

    pub fn gamma0(&self) -> f64 {
        self.constraint.gamma0
    }
}

pub fn load_config(path: impl AsRef<Path>) -> Result<RunConfig> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::config(path.display().to_string(), format!("cannot read config: {e}")))?;
    RunConfig::from_json(&text)
}

pub fn write_config(cfg: &RunConfig, path: impl AsRef<Path>) -> Result<()> {
    let mut text = cfg.to_json()?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn shipped_file_is_table_iii() {
        let cfg = RunConfig::table_iii();
        let (p, want) = (cfg.system_params().unwrap(), SystemParams::table_iii());
        assert_eq!(p.ap_density, 1e-4);
        assert_eq!(p.area, 1e6);
        assert_eq!((p.n_antennas, p.n_users, p.tau_c), (20, 10, 200));
        assert_relative_eq!(p.rho_tr, want.rho_tr, max_relative = 1e-15);
        assert_relative_eq!(p.rho_d, want.rho_d, max_relative = 1e-15);
        assert_eq!(p.pilot_corr_sum, want.pilot_corr_sum);
        let pm = cfg.power_model();
        assert_eq!(pm.p_fp, 5.0);
        assert_eq!(pm.l_ap, 750e9);
        assert_relative_eq!(pm.traffic_power(), PowerModel::table_iii().traffic_power(), max_relative = 1e-15);
    }

    #[test]
    fn unknown_key_is_named() {
        let text = TABLE_III_JSON.replacen("\"n_users\"", "\"n_user\"", 1);
        match RunConfig::from_json(&text) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "system.n_user"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn negative_bandwidth_is_rejected() {
        let mut cfg = RunConfig::table_iii();
        cfg.system.bandwidth_hz = -1.0;
        match cfg.validate() {
            Err(Error::Config { key, .. }) => assert_eq!(key, "system.bandwidth_hz"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        let mut cfg = RunConfig::table_iii();
        cfg.sweep.push(SweepAxis { variable: SweepVariable::Lambda, min: 5.0, max: 200.0, steps: 40, scale: Scale::Log });
        cfg.system.rho_d_snr = Some(3.0);
        write_config(&cfg, &path).unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }

    #[test]
    fn integer_axes_round() {
        let a = SweepAxis { variable: SweepVariable::N, min: 2.0, max: 4.0, steps: 5, scale: Scale::Linear };
        assert_eq!(a.grid().unwrap().values(), &[2.0, 3.0, 4.0]);
    }

    #[test]
    fn schema_lists_every_key() {
        fn keys(v: &serde_json::Value, prefix: &str, out: &mut Vec<String>) {
            if let Some(m) = v.as_object() {
                for (k, v) in m {
                    out.push(format!("{prefix}{k}"));
                    keys(v, &format!("{prefix}{k}."), out);
                }
            }
        }
        fn schema_keys(v: &serde_json::Value, prefix: &str, out: &mut Vec<String>) {
            let props = v.get("properties").or_else(|| v.get("items").and_then(|i| i.get("properties")));
            if let Some(m) = props.and_then(|p| p.as_object()) {
                for (k, v) in m {
                    out.push(format!("{prefix}{k}"));
                    schema_keys(v, &format!("{prefix}{k}."), out);
                }
            }
        }
        let mut cfg = RunConfig::table_iii();
        cfg.system.rho_tr_snr = Some(1.0);
        cfg.system.rho_d_snr = Some(1.0);
        cfg.system.pilot_corr_sum = Some(1.0);
        cfg.output.path = Some("x".into());
        let mut v = serde_json::to_value(&cfg).unwrap();
        v["sweep"] = serde_json::json!({"variable": 0, "min": 0, "max": 0, "steps": 0, "scale": 0});
        let schema: serde_json::Value = serde_json::from_str(include_str!("../../../config/schema.json")).unwrap();
        let (mut a, mut b) = (Vec::new(), Vec::new());
        keys(&v, "", &mut a);
        schema_keys(&schema, "", &mut b);
        a.sort();
        b.sort();
        assert_eq!(a, b);
    }
}
