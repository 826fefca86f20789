use serde::{Deserialize, Serialize};

use super::geometry::{torus_distance, NetworkRealization};
use super::pilots::PilotAssignment;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Path-loss and estimation statistics of one realization, M×K row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathlossTable {
    pub m: usize,
    pub k: usize,
    /// `l_mk = min(1, r_mk^−α)` with r in meters.
    pub l: Vec<f64>,
    /// `d_mk = Σᵢ |ψᵢᴴψₖ|² l_mi + 1/(τ_tr ρ_tr)`
    pub d: Vec<f64>,
}

impl PathlossTable {
    pub fn new(real: &NetworkRealization, pilots: &PilotAssignment, params: &SystemParams) -> Result<Self> {
        let (m, k) = (real.m_count, real.user_positions.len());
        if pilots.pilot.len() != k {
            return Err(Error::domain(format!("{} pilot indices for {k} users", pilots.pilot.len())));
        }
        let alpha = params.pathloss_exp;
        let mut l = Vec::with_capacity(m * k);
        for ap in &real.ap_positions {
            for ue in &real.user_positions {
                let r = torus_distance(*ap, *ue, real.torus_side);
                l.push(r.powf(-alpha).min(1.0));
            }
        }
        let floor = 1.0 / (params.tau_tr() * params.rho_tr);
        let mut d = vec![floor; m * k];
        for row in 0..m {
            for kk in 0..k {
                for i in (0..k).filter(|&i| pilots.shares(i, kk)) {
                    d[row * k + kk] += l[row * k + i];
                }
            }
        }
        Ok(PathlossTable { m, k, l, d })
    }

    pub fn l(&self, m: usize, k: usize) -> f64 {
        self.l[m * self.k + k]
    }

    pub fn d(&self, m: usize, k: usize) -> f64 {
        self.d[m * self.k + k]
    }

    /// Conditional SINR of user `k`.
    ///
    /// The i = k part of the first sum contains `N Σₘ d_mk/l_mk`, which the
    /// subtracted term removes exactly; both are dropped, leaving
    ///
    /// ```text
    /// M²N / [ Σₘ d_mk (N l_mk + 1/(Kρ_d)) Σ_{i≠k} l_mi⁻² + Σₘ d_mk l_mk⁻²/(Kρ_d)
    ///         + N Σ_{i≠k} (Σₘ l_mk/l_mi)² + M ]
    /// ```
    pub fn sinr(&self, k: usize, params: &SystemParams) -> Result<f64> {
        if self.m == 0 {
            return Err(Error::domain("conditional SINR needs at least one AP"));
        }
        if k >= self.k {
            return Err(Error::domain(format!("user {k} out of range for K = {}", self.k)));
        }
        let n = params.n_antennas as f64;
        let kp = self.k as f64 * params.rho_d;
        let mut first = 0.0;
        let mut own = 0.0;
        let mut cross = vec![0.0; self.k];
        for m in 0..self.m {
            let row = &self.l[m * self.k..(m + 1) * self.k];
            let (lk, dk) = (row[k], self.d(m, k));
            let mut others = 0.0;
            for (i, &li) in row.iter().enumerate() {
                if i != k {
                    others += (li * li).recip();
                    cross[i] += lk / li;
                }
            }
            first += dk * (n * lk + kp.recip()) * others;
            own += dk / (lk * lk * kp);
        }
        let interference: f64 = cross.iter().map(|c| c * c).sum();
        let m = self.m as f64;
        let den = first + own + n * interference + m;
        if !(den > 0.0) || !den.is_finite() {
            return Err(Error::NumericalDegeneracy(format!(
                "SINR denominator {den} for user {k} (M = {}, first = {first}, own = {own}, cross = {interference})",
                self.m
            )));
        }
        Ok(m * m * n / den)
    }
}

pub fn conditional_sinr(
    real: &NetworkRealization,
    pilots: &PilotAssignment,
    params: &SystemParams,
    user: usize,
) -> Result<f64> {
    PathlossTable::new(real, pilots, params)?.sinr(user, params)
}
