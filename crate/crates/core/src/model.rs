//! Closed-form SINR bound, spectral efficiency, area power consumption and
//! energy efficiency.
//!
//! All functions are pure. The public entry points take [`SystemParams`];
//! the formulas themselves are methods of [`OperatingPoint`], a real-valued
//! view of the parameters that the optimizer also evaluates at non-integer
//! `N` and `K`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{PowerModel, SystemParams};

/// Real-valued copy of [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub n: f64,
    pub k: f64,
    pub zeta: f64,
    /// AP/m²
    pub lambda: f64,
    pub area: f64,
    pub alpha: f64,
    pub rho_tr: f64,
    pub rho_d: f64,
    pub rho_tr_watts: f64,
    pub rho_d_watts: f64,
    pub tau_c: f64,
    pub xi: f64,
    pub bandwidth: f64,
    /// Pilot cross-correlation sum A.
    pub a: f64,
}

impl From<&SystemParams> for OperatingPoint {
    fn from(p: &SystemParams) -> Self {
        OperatingPoint {
            n: p.n_antennas as f64,
            k: p.n_users as f64,
            zeta: p.pilot_reuse,
            lambda: p.ap_density,
            area: p.area,
            alpha: p.pathloss_exp,
            rho_tr: p.rho_tr,
            rho_d: p.rho_d,
            rho_tr_watts: p.rho_tr_watts,
            rho_d_watts: p.rho_d_watts,
            tau_c: p.tau_c as f64,
            xi: p.dl_fraction,
            bandwidth: p.bandwidth,
            a: p.pilot_corr_sum,
        }
    }
}

/// The three additive parts of the inverse-SINR bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckGammaTerms {
    /// `A·((α−2)/(απN ρ_d) + K − 1)`: estimation quality and pilot contamination.
    pub contamination: f64,
    /// `ζ/(απKρ_tr)·((K−1)(α−2) + (α−1)/(Nρ_d))`: pilot-noise term.
    pub pilot_noise: f64,
    /// `λ_AP·(K − 1)`.
    pub density: f64,
}

impl CheckGammaTerms {
    pub fn total(&self) -> f64 {
        self.contamination + self.pilot_noise + self.density
    }
}

/// Which construction of the area power consumption to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ApcMode {
    /// Polynomial form with coefficients re-derived from the per-component
    /// model; agrees with [`ApcMode::FirstPrinciples`] to rounding.
    #[default]
    Polynomial,
    /// Polynomial form with the published coefficients taken verbatim
    /// (powers in W). Kept for comparison only.
    PolynomialPrinted,
    /// Sum of transmit, fixed, transceiver, estimation, precoding and
    /// backhaul-traffic powers.
    FirstPrinciples,
}

/// Coefficients of `APC = λ(C₀ + C₁K + C₂K² + D₀N + D₁NK − D₂NK²) + 𝓑·B·ASE`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApcCoefficients {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub d0: f64,
    pub d1: f64,
    pub d2: f64,
    /// 𝓑 in W per bit/s.
    pub traffic: f64,
}

impl ApcCoefficients {
    /// Coefficients obtained by expanding the per-component power model.
    pub fn corrected(op: &OperatingPoint, pm: &PowerModel) -> Self {
        let OperatingPoint { zeta, tau_c, xi, bandwidth: b, .. } = *op;
        let l = pm.l_ap;
        ApcCoefficients {
            c0: pm.c0(),
            c1: b / (7.0 * l * tau_c) + xi * op.rho_d_watts / pm.amp_eff + pm.p_ue,
            c2: (op.rho_tr_watts - xi * op.rho_d_watts) / (pm.amp_eff * zeta * tau_c),
            d0: pm.p_ap,
            d1: 3.0 * b * xi / l + 3.0 * b / (l * tau_c),
            d2: 3.0 * b * (xi - 1.0) / (l * zeta * tau_c),
            traffic: pm.traffic_power(),
        }
    }

    /// Coefficients exactly as published, evaluated with watt powers.
    pub fn printed(op: &OperatingPoint, pm: &PowerModel) -> Self {
        let OperatingPoint { zeta, tau_c, xi, bandwidth: b, .. } = *op;
        let l = pm.l_ap;
        ApcCoefficients {
            c0: pm.c0(),
            c1: b / (7.0 * l * tau_c) - xi * op.rho_d_watts / (pm.amp_eff * zeta * tau_c) + pm.p_ue,
            c2: 1.0 / (pm.amp_eff * zeta * op.rho_tr_watts * tau_c),
            d0: pm.p_ap,
            d1: 3.0 * b / l + 3.0 * b / (l * tau_c),
            d2: 3.0 * b * (xi - 1.0) / (l * zeta * tau_c),
            traffic: pm.traffic_power(),
        }
    }

    /// Per-AP power `C₀ + C₁K + C₂K² + D₀N + D₁NK − D₂NK²` in W.
    pub fn per_ap(&self, n: f64, k: f64) -> f64 {
        self.c0 + self.c1 * k + self.c2 * k * k + self.d0 * n + self.d1 * n * k - self.d2 * n * k * k
    }
}

/// Per-AP power components of the first-principles model, in W.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PerApPower {
    /// `P_TX / α_eff`
    pub transmit: f64,
    pub fixed: f64,
    pub transceiver: f64,
    pub estimation: f64,
    pub linear_processing: f64,
}

impl PerApPower {
    pub fn total(&self) -> f64 {
        self.transmit + self.fixed + self.transceiver + self.estimation + self.linear_processing
    }
}

/// Area power consumption split into its AP-density part and its
/// area-level traffic part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApcTerms {
    /// Power drawn by one AP, W.
    pub per_ap: f64,
    /// `λ_AP · per_ap`, W/m².
    pub circuit_and_transmit: f64,
    /// `𝓑 · B_w · ASE`, W/m².
    pub traffic: f64,
}

impl ApcTerms {
    pub fn total(&self) -> f64 {
        self.circuit_and_transmit + self.traffic
    }
}

impl OperatingPoint {
    pub fn tau_tr(&self) -> f64 {
        self.k / self.zeta
    }

    pub fn check_gamma_terms(&self) -> CheckGammaTerms {
        let OperatingPoint { n, k, zeta, lambda, alpha, rho_tr, rho_d, a, .. } = *self;
        let apn = alpha * PI * n * rho_d;
        CheckGammaTerms {
            contamination: a * ((alpha - 2.0) / apn + k - 1.0),
            pilot_noise: zeta / (alpha * PI * k * rho_tr)
                * ((k - 1.0) * (alpha - 2.0) + (alpha - 1.0) / (n * rho_d)),
            density: lambda * (k - 1.0),
        }
    }

    pub fn check_gamma(&self) -> f64 {
        self.check_gamma_terms().total()
    }

    /// Pilot overhead factor `1 − K/(ζτc)`.
    pub fn prefactor(&self) -> f64 {
        1.0 - self.k / (self.zeta * self.tau_c)
    }

    /// Per-user SE for a given SINR, bit/s/Hz.
    pub fn se_at_sinr(&self, sinr: f64) -> Result<f64> {
        let pre = self.prefactor();
        if pre < 0.0 {
            return Err(Error::InfeasibleFrame { overhead: 1.0 - pre });
        }
        Ok(pre * sinr.ln_1p() / std::f64::consts::LN_2)
    }

    pub fn se_per_user(&self) -> Result<f64> {
        self.se_at_sinr(1.0 / self.check_gamma())
    }

    pub fn apc_coefficients(&self, pm: &PowerModel, mode: ApcMode) -> ApcCoefficients {
        match mode {
            ApcMode::PolynomialPrinted => ApcCoefficients::printed(self, pm),
            ApcMode::Polynomial | ApcMode::FirstPrinciples => ApcCoefficients::corrected(self, pm),
        }
    }

    pub fn first_principles_power(&self, pm: &PowerModel) -> PerApPower {
        let OperatingPoint { n, k, tau_c, xi, bandwidth: b, .. } = *self;
        let tau_tr = self.tau_tr();
        let tau_d = xi * (tau_c - tau_tr);
        let p_tx = k * (tau_tr * self.rho_tr_watts + tau_d * self.rho_d_watts) / tau_c;
        let flops_rate = 3.0 * b / (pm.l_ap * tau_c);
        PerApPower {
            transmit: p_tx / pm.amp_eff,
            fixed: pm.p_fp,
            transceiver: n * pm.p_ap + pm.p_lo + k * pm.p_ue,
            estimation: flops_rate * k * n * (tau_tr + 1.0),
            linear_processing: flops_rate * k * n * xi * (tau_c - tau_tr)
                + b * k / (7.0 * tau_c * pm.l_ap),
        }
    }

    /// APC terms for a given ASE (bit/s/Hz/m²).
    pub fn apc_terms(&self, pm: &PowerModel, mode: ApcMode, ase: f64) -> ApcTerms {
        let per_ap = match mode {
            ApcMode::FirstPrinciples => self.first_principles_power(pm).total(),
            _ => self.apc_coefficients(pm, mode).per_ap(self.n, self.k),
        };
        ApcTerms {
            per_ap,
            circuit_and_transmit: self.lambda * per_ap,
            traffic: pm.traffic_power() * self.bandwidth * ase,
        }
    }
}

/// Inverse of the SINR lower bound, `𝛾̌`.
pub fn check_gamma(params: &SystemParams) -> f64 {
    OperatingPoint::from(params).check_gamma()
}

/// Lower bound on the DL average SE per user, bit/s/Hz.
pub fn se_per_user(params: &SystemParams) -> Result<f64> {
    OperatingPoint::from(params).se_per_user()
}

/// Area spectral efficiency `(K/S)·SE`, bit/s/Hz/m².
pub fn ase(params: &SystemParams) -> Result<f64> {
    Ok(params.n_users as f64 / params.area * se_per_user(params)?)
}

fn checked_apc(terms: ApcTerms) -> Result<f64> {
    let apc = terms.total();
    if !(apc > 0.0) || !apc.is_finite() {
        return Err(Error::ModelInconsistency { apc });
    }
    Ok(apc)
}

/// APC from the polynomial form with re-derived coefficients, W/m².
pub fn apc_polynomial(params: &SystemParams, pm: &PowerModel) -> Result<f64> {
    let op = OperatingPoint::from(params);
    checked_apc(op.apc_terms(pm, ApcMode::Polynomial, ase(params)?))
}

/// APC from the polynomial form with the published coefficients, W/m².
pub fn apc_polynomial_printed(params: &SystemParams, pm: &PowerModel) -> Result<f64> {
    let op = OperatingPoint::from(params);
    checked_apc(op.apc_terms(pm, ApcMode::PolynomialPrinted, ase(params)?))
}

/// APC assembled component by component, W/m².
pub fn apc_first_principles(params: &SystemParams, pm: &PowerModel) -> Result<f64> {
    let op = OperatingPoint::from(params);
    checked_apc(op.apc_terms(pm, ApcMode::FirstPrinciples, ase(params)?))
}

/// Energy efficiency together with every intermediate quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EEBreakdown {
    pub check_gamma: f64,
    pub gamma: f64,
    /// bit/s/Hz
    pub se_per_user: f64,
    /// bit/s/Hz/m²
    pub ase: f64,
    /// W/m²
    pub apc: f64,
    /// bit/J
    pub ee: f64,
    pub gamma_terms: CheckGammaTerms,
    pub apc_terms: ApcTerms,
    /// Present for [`ApcMode::FirstPrinciples`].
    pub per_ap_power: Option<PerApPower>,
}

impl OperatingPoint {
    /// EE with the SE evaluated at the supplied SINR.
    pub(crate) fn breakdown_at_sinr(
        &self,
        pm: &PowerModel,
        mode: ApcMode,
        gamma_terms: CheckGammaTerms,
        gamma: f64,
    ) -> Result<EEBreakdown> {
        let se = self.se_at_sinr(gamma)?;
        let ase = self.k / self.area * se;
        let apc_terms = self.apc_terms(pm, mode, ase);
        let apc = checked_apc(apc_terms)?;
        Ok(EEBreakdown {
            check_gamma: 1.0 / gamma,
            gamma,
            se_per_user: se,
            ase,
            apc,
            ee: self.bandwidth * ase / apc,
            gamma_terms,
            apc_terms,
            per_ap_power: (mode == ApcMode::FirstPrinciples).then(|| self.first_principles_power(pm)),
        })
    }

    pub fn energy_efficiency(&self, pm: &PowerModel, mode: ApcMode) -> Result<EEBreakdown> {
        let terms = self.check_gamma_terms();
        let check = terms.total();
        let mut out = self.breakdown_at_sinr(pm, mode, terms, 1.0 / check)?;
        out.check_gamma = check;
        Ok(out)
    }
}

/// `EE = B_w·ASE/APC` in bit/J, with its breakdown.
pub fn energy_efficiency(params: &SystemParams, pm: &PowerModel, mode: ApcMode) -> Result<EEBreakdown> {
    params.validate()?;
    pm.validate()?;
    OperatingPoint::from(params).energy_efficiency(pm, mode)
}

/// EE with the per-user SE pinned to the SINR target `gamma0`, i.e. the
/// objective of the constrained problem evaluated as if the constraint held
/// at the given ζ. The SINR terms of the actual operating point are still
/// reported in `gamma_terms`.
pub fn energy_efficiency_at_target(
    params: &SystemParams,
    pm: &PowerModel,
    mode: ApcMode,
    gamma0: f64,
) -> Result<EEBreakdown> {
    params.validate()?;
    pm.validate()?;
    if !(gamma0 > 0.0) {
        return Err(Error::domain(format!("gamma0 must be positive, got {gamma0}")));
    }
    let op = OperatingPoint::from(params);
    op.breakdown_at_sinr(pm, mode, op.check_gamma_terms(), gamma0)
}

/// Upper limit `1/λ_AP` on feasible SINR targets; callers need `γ₀` strictly
/// below it.
pub fn feasibility_bound(ap_density: f64) -> f64 {
    1.0 / ap_density
}

/// SINR bound in the limit of infinitely many antennas per AP,
/// `απρ_trK / (απK(A(K−1) + Kλ_AP)ρ_tr + (α−2)(K−1)ζ)`.
pub fn sinr_limit_inf_n(params: &SystemParams) -> Result<f64> {
    let op = OperatingPoint::from(params);
    let OperatingPoint { k, zeta, lambda, alpha, rho_tr, a, .. } = op;
    let den = alpha * PI * k * (a * (k - 1.0) + k * lambda) * rho_tr + (alpha - 2.0) * (k - 1.0) * zeta;
    if den == 0.0 || !den.is_finite() {
        return Err(Error::domain(format!("large-N SINR limit has denominator {den}")));
    }
    Ok(alpha * PI * rho_tr * k / den)
}
