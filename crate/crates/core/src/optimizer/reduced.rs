//! The EE objective with the SINR constraint substituted.
//!
//! Holding `1/𝛾̌ = γ₀` pins the per-user SE to `(1 − K/(ζτc))·log₂(1+γ₀)`
//! and fixes ζ as a function of the remaining variables, so every
//! optimizer works on `EE(λ, N, K)` with `ζ = ζ*(λ, N, K)`. A point is
//! feasible when ζ* lies in `[max(1, K/τc), K]`, i.e. `1 ≤ τ_tr ≤ K`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ApcMode, OperatingPoint};
use crate::params::{welch_bound_unclamped, PowerModel, SystemParams};

/// Relative slack allowed on the ζ window, so that points computed as
/// roots of the window boundary still count as feasible.
pub(crate) const WINDOW_TOL: f64 = 1e-9;

/// Per-AP power split by its dependence on N, K and ζ:
/// `u₀ + u_k K + u_n N + u_kn NK + (v_k K + v_kk K² + v_kkn NK²)/ζ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerSplit {
    pub u0: f64,
    pub u_k: f64,
    pub u_n: f64,
    pub u_kn: f64,
    pub v_k: f64,
    pub v_kk: f64,
    pub v_kkn: f64,
}

impl PowerSplit {
    pub fn new(op: &OperatingPoint, pm: &PowerModel, mode: ApcMode) -> Self {
        let OperatingPoint { tau_c, xi, bandwidth: b, .. } = *op;
        let (l, eff) = (pm.l_ap, pm.amp_eff);
        let v_kkn = 3.0 * b * (1.0 - xi) / (l * tau_c);
        match mode {
            ApcMode::Polynomial | ApcMode::FirstPrinciples => PowerSplit {
                u0: pm.c0(),
                u_k: b / (7.0 * l * tau_c) + xi * op.rho_d_watts / eff + pm.p_ue,
                u_n: pm.p_ap,
                u_kn: 3.0 * b * xi / l + 3.0 * b / (l * tau_c),
                v_k: 0.0,
                v_kk: (op.rho_tr_watts - xi * op.rho_d_watts) / (eff * tau_c),
                v_kkn,
            },
            ApcMode::PolynomialPrinted => PowerSplit {
                u0: pm.c0(),
                u_k: b / (7.0 * l * tau_c) + pm.p_ue,
                u_n: pm.p_ap,
                u_kn: 3.0 * b / l + 3.0 * b / (l * tau_c),
                v_k: -xi * op.rho_d_watts / (eff * tau_c),
                v_kk: 1.0 / (eff * op.rho_tr_watts * tau_c),
                v_kkn,
            },
        }
    }

    /// The ζ-independent part, W.
    pub fn base(&self, n: f64, k: f64) -> f64 {
        self.u0 + self.u_k * k + self.u_n * n + self.u_kn * n * k
    }

    /// The part multiplied by 1/ζ, W.
    pub fn pilot_scaled(&self, n: f64, k: f64) -> f64 {
        self.v_k * k + self.v_kk * k * k + self.v_kkn * n * k * k
    }

    pub fn per_ap(&self, n: f64, k: f64, zeta: f64) -> f64 {
        self.base(n, k) + self.pilot_scaled(n, k) / zeta
    }
}

/// How the pilot cross-correlation sum A follows K.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PilotCoupling {
    /// A stays at the value carried by the parameters.
    Fixed,
    /// A is the Welch bound for K sequences of the fixed length `tau_tr`,
    /// clamped to at least one.
    Welch { tau_tr: f64 },
}

/// One point of the reduced problem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedPoint {
    /// AP/m²
    pub lambda: f64,
    pub n: f64,
    pub k: f64,
    /// ζ* at this point (unclipped).
    pub zeta: f64,
    /// Pilot cross-correlation sum used.
    pub a: f64,
    pub feasible: bool,
    /// EE in bit/J with the SE pinned to the target; `-inf` when infeasible.
    pub ee: f64,
}

/// The constrained EE problem for fixed radio and power constants.
#[derive(Debug, Clone)]
pub struct ReducedProblem {
    pub base: OperatingPoint,
    pub power: PowerModel,
    pub mode: ApcMode,
    pub gamma0: f64,
    pub coupling: PilotCoupling,
    pub split: PowerSplit,
}

impl ReducedProblem {
    pub fn new(params: &SystemParams, power: &PowerModel, mode: ApcMode, gamma0: f64) -> Result<Self> {
        params.validate()?;
        power.validate()?;
        if !(gamma0 > 0.0) || !gamma0.is_finite() {
            return Err(Error::domain(format!("gamma0 must be positive and finite, got {gamma0}")));
        }
        let base = OperatingPoint::from(params);
        Ok(ReducedProblem {
            base,
            power: power.clone(),
            mode,
            gamma0,
            coupling: PilotCoupling::Fixed,
            split: PowerSplit::new(&base, power, mode),
        })
    }

    pub fn with_coupling(mut self, coupling: PilotCoupling) -> Self {
        self.coupling = coupling;
        self
    }

    /// Welch coupling with the training length of the base parameters.
    pub fn with_welch(self) -> Self {
        let tau_tr = self.base.tau_tr();
        self.with_coupling(PilotCoupling::Welch { tau_tr })
    }

    pub fn pilot_sum(&self, k: f64) -> f64 {
        match self.coupling {
            PilotCoupling::Fixed => self.base.a,
            PilotCoupling::Welch { tau_tr } => welch_bound_unclamped(k, tau_tr).max(1.0),
        }
    }

    /// `ln(1+γ₀)/ln 2`
    pub fn log_target(&self) -> f64 {
        self.gamma0.ln_1p() / std::f64::consts::LN_2
    }

    pub fn operating_point(&self, lambda: f64, n: f64, k: f64, zeta: f64) -> OperatingPoint {
        OperatingPoint { lambda, n, k, zeta, a: self.pilot_sum(k), ..self.base }
    }

    /// `ζ* = (απNρ_trρ_d − γ₀Q₁)/(γ₀Q₂)`.
    pub fn zeta_star(&self, lambda: f64, n: f64, k: f64) -> f64 {
        let OperatingPoint { alpha, rho_tr, rho_d, .. } = self.base;
        let a = self.pilot_sum(k);
        let x = alpha * PI * n * rho_tr * rho_d;
        let q1 = rho_tr * (a * (alpha - 2.0) + alpha * PI * n * rho_d * (k - 1.0) * (a + lambda));
        let q2 = ((alpha - 1.0) + n * rho_d * (alpha - 2.0) * (k - 1.0)) / k;
        (x - self.gamma0 * q1) / (self.gamma0 * q2)
    }

    /// `[max(1, K/τc), K]`
    pub fn zeta_window(&self, k: f64) -> (f64, f64) {
        ((k / self.base.tau_c).max(1.0), k)
    }

    pub fn in_window(&self, k: f64, zeta: f64) -> bool {
        let (lo, hi) = self.zeta_window(k);
        zeta >= lo * (1.0 - WINDOW_TOL) && zeta <= hi * (1.0 + WINDOW_TOL) && zeta.is_finite()
    }

    /// EE with SE pinned to the target at an explicit ζ, or `None` when ζ
    /// is outside its window or the power model goes non-positive.
    pub fn pinned_ee(&self, lambda: f64, n: f64, k: f64, zeta: f64) -> Option<f64> {
        let (lo, hi) = self.zeta_window(k);
        let zeta = zeta.clamp(lo, hi);
        let b = self.base.bandwidth;
        let se = (1.0 - k / (zeta * self.base.tau_c)) * self.log_target();
        let ase = k / self.base.area * se;
        let apc = lambda * self.split.per_ap(n, k, zeta) + self.power.traffic_power() * b * ase;
        (apc > 0.0 && apc.is_finite()).then(|| b * ase / apc)
    }

    pub fn evaluate(&self, lambda: f64, n: f64, k: f64) -> ReducedPoint {
        let zeta = self.zeta_star(lambda, n, k);
        let ee = if self.in_window(k, zeta) { self.pinned_ee(lambda, n, k, zeta) } else { None };
        ReducedPoint {
            lambda,
            n,
            k,
            zeta,
            a: self.pilot_sum(k),
            feasible: ee.is_some(),
            ee: ee.unwrap_or(f64::NEG_INFINITY),
        }
    }
}
