//! Radio, network and power-consumption parameters.
//!
//! Everything in this module is stored in SI units: AP density in AP/m²,
//! area in m², bandwidth in Hz, circuit powers in W and the traffic-dependent
//! powers in W per bit/s. The human-unit view (AP/km², mW, W per Gbit/s) lives
//! in [`crate::config`].

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Boltzmann constant in J/K.
pub const BOLTZMANN: f64 = 1.381e-23;

/// Noise power `κ_B · B · T · NF` in W.
///
/// `noise_figure_db` is in dB, `temperature` in K.
pub fn noise_power(bandwidth: f64, noise_figure_db: f64, temperature: f64) -> Result<f64> {
    if !(bandwidth > 0.0) || !(temperature > 0.0) {
        return Err(Error::domain(format!(
            "noise power needs positive bandwidth and temperature, got B = {bandwidth}, T = {temperature}"
        )));
    }
    if !noise_figure_db.is_finite() || noise_figure_db < 0.0 {
        return Err(Error::domain(format!(
            "noise figure must be a finite, non-negative dB value, got {noise_figure_db}"
        )));
    }
    Ok(BOLTZMANN * bandwidth * temperature * 10f64.powf(noise_figure_db / 10.0))
}

/// How the pilot cross-correlation sum `A = Σⱼ |ψⱼᴴψₖ|²` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PilotMode {
    /// ζ users share each orthogonal pilot, so `A = ζ`.
    #[default]
    OrthogonalReuse,
    /// Welch lower bound on the total cross-correlation of K sequences of
    /// length τ_tr.
    WelchBound,
}

/// The Welch-bound value of `A` for `k` users and `tau_tr` pilot samples.
///
/// The bound falls below one once `tau_tr > k - 1`; orthogonal pilots exist
/// there, so the result is clamped to one.
pub fn welch_bound(k: f64, tau_tr: f64) -> Result<f64> {
    if !(k > 2.0) {
        return Err(Error::domain(format!("Welch bound needs K > 2, got K = {k}")));
    }
    if !(tau_tr > 0.0) {
        return Err(Error::domain(format!("Welch bound needs tau_tr > 0, got {tau_tr}")));
    }
    Ok(welch_bound_unclamped(k, tau_tr).max(1.0))
}

pub(crate) fn welch_bound_unclamped(k: f64, tau_tr: f64) -> f64 {
    1.0 + (k - 1.0 - tau_tr) / (tau_tr * (k - 2.0))
}

/// Radio and network scalars of one operating point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Antennas per AP (N).
    pub n_antennas: u32,
    /// Users in the region (K).
    pub n_users: u32,
    /// Pilot reuse factor ζ; the training length is τ_tr = K/ζ.
    pub pilot_reuse: f64,
    /// AP intensity λ_AP in AP/m².
    pub ap_density: f64,
    /// Region size S in m².
    pub area: f64,
    /// Path-loss exponent α (> 2).
    pub pathloss_exp: f64,
    /// Normalized UL pilot power (pilot SNR).
    pub rho_tr: f64,
    /// Normalized DL data power (data SNR).
    pub rho_d: f64,
    /// UL pilot power in W.
    pub rho_tr_watts: f64,
    /// DL data power in W.
    pub rho_d_watts: f64,
    /// Samples per coherence block.
    pub tau_c: u32,
    /// DL payload fraction ξ.
    pub dl_fraction: f64,
    /// Bandwidth B_w in Hz.
    pub bandwidth: f64,
    /// Pilot cross-correlation sum A.
    pub pilot_corr_sum: f64,
}

impl SystemParams {
    /// The numerical-results parameter set: N = 20, K = 10, ζ = 4,
    /// 100 AP/km² over 1 km², α = 4, 100 mW pilots, 200 mW data,
    /// τc = 200, ξ = 1/3, 20 MHz at 9 dB noise figure and 290 K.
    pub fn table_iii() -> Self {
        let np = noise_power(20e6, 9.0, 290.0).expect("constant inputs");
        let mut p = SystemParams {
            n_antennas: 20,
            n_users: 10,
            pilot_reuse: 4.0,
            ap_density: 100e-6,
            area: 1e6,
            pathloss_exp: 4.0,
            rho_tr: 0.1 / np,
            rho_d: 0.2 / np,
            rho_tr_watts: 0.1,
            rho_d_watts: 0.2,
            tau_c: 200,
            dl_fraction: 1.0 / 3.0,
            bandwidth: 20e6,
            pilot_corr_sum: 1.0,
        };
        p.pilot_corr_sum = pilot_corr_sum(&p, PilotMode::OrthogonalReuse).expect("valid defaults");
        p
    }

    /// Uplink training length τ_tr = K/ζ (not necessarily an integer).
    pub fn tau_tr(&self) -> f64 {
        self.n_users as f64 / self.pilot_reuse
    }

    /// Sets both watt powers and re-derives the normalized ones from the
    /// given noise power.
    pub fn with_watt_powers(mut self, rho_tr_watts: f64, rho_d_watts: f64, noise: f64) -> Self {
        self.rho_tr_watts = rho_tr_watts;
        self.rho_d_watts = rho_d_watts;
        self.rho_tr = rho_tr_watts / noise;
        self.rho_d = rho_d_watts / noise;
        self
    }

    /// Recomputes `pilot_corr_sum` for the current K and ζ.
    pub fn with_pilot_mode(mut self, mode: PilotMode) -> Result<Self> {
        self.pilot_corr_sum = pilot_corr_sum(&self, mode)?;
        Ok(self)
    }

    /// Strict pilot mode: round τ_tr up to an integer and set ζ = K/τ_tr.
    pub fn with_integer_pilots(mut self) -> Self {
        let tau = self.tau_tr().ceil().max(1.0);
        self.pilot_reuse = self.n_users as f64 / tau;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("pilot_reuse", self.pilot_reuse),
            ("ap_density", self.ap_density),
            ("area", self.area),
            ("rho_tr", self.rho_tr),
            ("rho_d", self.rho_d),
            ("rho_tr_watts", self.rho_tr_watts),
            ("rho_d_watts", self.rho_d_watts),
            ("bandwidth", self.bandwidth),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be positive and finite, got {v}")));
            }
        }
        if self.n_antennas == 0 || self.n_users == 0 || self.tau_c == 0 {
            return Err(Error::domain("n_antennas, n_users and tau_c must be positive"));
        }
        if self.pilot_reuse < 1.0 {
            return Err(Error::domain(format!("pilot_reuse must be >= 1, got {}", self.pilot_reuse)));
        }
        if !(self.pathloss_exp > 2.0) || !self.pathloss_exp.is_finite() {
            return Err(Error::domain(format!(
                "pathloss_exp must exceed 2, got {}",
                self.pathloss_exp
            )));
        }
        if !(self.dl_fraction > 0.0 && self.dl_fraction <= 1.0) {
            return Err(Error::domain(format!(
                "dl_fraction must lie in (0, 1], got {}",
                self.dl_fraction
            )));
        }
        if !(self.pilot_corr_sum >= 1.0) || !self.pilot_corr_sum.is_finite() {
            return Err(Error::domain(format!(
                "pilot_corr_sum must be >= 1, got {}",
                self.pilot_corr_sum
            )));
        }
        let tau_tr = self.tau_tr();
        if !(tau_tr >= 1.0 - 1e-12 && tau_tr <= self.tau_c as f64 + 1e-12) {
            return Err(Error::domain(format!(
                "tau_tr = K/zeta = {tau_tr} must lie in [1, tau_c = {}]",
                self.tau_c
            )));
        }
        Ok(())
    }
}

/// The pilot cross-correlation sum `A` for the current K and ζ.
pub fn pilot_corr_sum(params: &SystemParams, mode: PilotMode) -> Result<f64> {
    match mode {
        PilotMode::OrthogonalReuse => Ok(params.pilot_reuse),
        PilotMode::WelchBound => welch_bound(params.n_users as f64, params.tau_tr()),
    }
}

/// Circuit and amplifier constants of the power-consumption model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerModel {
    /// Fixed power per AP (cooling, control signalling) in W.
    pub p_fp: f64,
    /// Local oscillator power per AP in W.
    pub p_lo: f64,
    /// Power per AP antenna chain in W.
    pub p_ap: f64,
    /// Power per UE antenna chain in W.
    pub p_ue: f64,
    /// Coding power in W per bit/s.
    pub p_cod: f64,
    /// Decoding power in W per bit/s.
    pub p_dec: f64,
    /// Backhaul traffic power in W per bit/s.
    pub p_bt: f64,
    /// AP computational efficiency in flops/W.
    pub l_ap: f64,
    /// Power amplifier efficiency in (0, 1].
    pub amp_eff: f64,
}

impl PowerModel {
    pub fn table_iii() -> Self {
        PowerModel {
            p_fp: 5.0,
            p_lo: 0.1,
            p_ap: 0.2,
            p_ue: 0.1,
            p_cod: 0.01e-9,
            p_dec: 0.08e-9,
            p_bt: 0.025e-9,
            l_ap: 750e9,
            amp_eff: 0.5,
        }
    }

    /// `C₀ = P_FP + P_LO`.
    pub fn c0(&self) -> f64 {
        self.p_fp + self.p_lo
    }

    /// Traffic-dependent power `𝓑 = P_COD + P_DEC + P_BT` in W per bit/s.
    pub fn traffic_power(&self) -> f64 {
        self.p_cod + self.p_dec + self.p_bt
    }

    pub fn validate(&self) -> Result<()> {
        let non_negative = [
            ("p_fp", self.p_fp),
            ("p_lo", self.p_lo),
            ("p_ap", self.p_ap),
            ("p_ue", self.p_ue),
            ("p_cod", self.p_cod),
            ("p_dec", self.p_dec),
            ("p_bt", self.p_bt),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.l_ap > 0.0) || !self.l_ap.is_finite() {
            return Err(Error::domain(format!("l_ap must be positive, got {}", self.l_ap)));
        }
        if !(self.amp_eff > 0.0 && self.amp_eff <= 1.0) {
            return Err(Error::domain(format!("amp_eff must lie in (0, 1], got {}", self.amp_eff)));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn noise_power_at_nine_db() {
        let np = noise_power(20e6, 9.0, 290.0).unwrap();
        assert_relative_eq!(np, 1.381e-23 * 2e7 * 290.0 * 10f64.powf(0.9), max_relative = 1e-15);
        assert!((np - 6.36e-13).abs() < 0.01e-13);
        // normalized 200 mW data power
        assert!((0.2 / np - 3.1e11).abs() / 3.1e11 < 0.02);
    }

    #[test]
    fn noise_power_unit_noise_figure() {
        let np = noise_power(20e6, 0.0, 290.0).unwrap();
        assert_eq!(np, BOLTZMANN * 20e6 * 290.0);
    }

    #[test]
    fn noise_power_rejects_bad_inputs() {
        assert!(noise_power(0.0, 9.0, 290.0).is_err());
        assert!(noise_power(1e6, 9.0, -1.0).is_err());
        assert!(noise_power(1e6, f64::NAN, 290.0).is_err());
    }

    #[test]
    fn pilot_corr_sum_examples() {
        let mut p = SystemParams::table_iii();
        p.n_users = 10;
        p.pilot_reuse = 1.0;
        assert_eq!(pilot_corr_sum(&p, PilotMode::OrthogonalReuse).unwrap(), 1.0);
        p.pilot_reuse = 2.0; // tau_tr = 5
        assert_relative_eq!(pilot_corr_sum(&p, PilotMode::WelchBound).unwrap(), 1.1, max_relative = 1e-15);
        p.n_users = 12;
        p.pilot_reuse = 4.0;
        assert_eq!(pilot_corr_sum(&p, PilotMode::OrthogonalReuse).unwrap(), 4.0);
    }

    #[test]
    fn welch_needs_more_than_two_users() {
        let mut p = SystemParams::table_iii();
        p.n_users = 2;
        p.pilot_reuse = 1.0;
        assert!(matches!(pilot_corr_sum(&p, PilotMode::WelchBound), Err(Error::Domain(_))));
    }

    #[test]
    fn welch_clamps_to_one_when_pilots_are_orthogonal() {
        assert_eq!(welch_bound(10.0, 10.0).unwrap(), 1.0);
        assert!(welch_bound_unclamped(10.0, 10.0) < 1.0);
    }

    #[test]
    fn defaults_validate() {
        let p = SystemParams::table_iii();
        p.validate().unwrap();
        assert_eq!(p.pilot_corr_sum, 4.0);
        PowerModel::table_iii().validate().unwrap();
    }

    #[test]
    fn integer_pilot_mode() {
        let mut p = SystemParams::table_iii();
        p.pilot_reuse = 3.0; // tau_tr = 3.33
        let q = p.with_integer_pilots();
        assert_eq!(q.tau_tr(), 4.0);
        assert_eq!(q.pilot_reuse, 2.5);
    }

    #[test]
    fn validate_rejects_short_frames() {
        let mut p = SystemParams::table_iii();
        p.pilot_reuse = 20.0; // tau_tr = 0.5
        assert!(p.validate().is_err());
        let mut p = SystemParams::table_iii();
        p.pathloss_exp = 2.0;
        assert!(p.validate().is_err());
    }
}
