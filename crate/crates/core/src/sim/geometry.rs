use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::FEW_APS;
use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Offset between resampling attempts inside one realization's stream
/// family, far above any realistic realization index.
const RESAMPLE_STRIDE: u64 = 1 << 48;
const MAX_RESAMPLES: u64 = 1000;

/// One sampled network.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    /// m, on `[0, torus_side)²`
    pub ap_positions: Vec<[f64; 2]>,
    pub user_positions: Vec<[f64; 2]>,
    pub m_count: usize,
    /// √S, m
    pub torus_side: f64,
    /// Draws with M = 0 that were thrown away before this one.
    pub resamples: u32,
}

impl NetworkRealization {
    /// M ≤ 8: too few APs for the closed form's large-M reasoning.
    pub fn few_aps(&self) -> bool {
        self.m_count <= FEW_APS
    }

    /// Shifts every point by `v`, wrapping around the torus.
    pub fn translated(&self, v: [f64; 2]) -> Self {
        let s = self.torus_side;
        let shift = |p: &[f64; 2]| [(p[0] + v[0]).rem_euclid(s), (p[1] + v[1]).rem_euclid(s)];
        NetworkRealization {
            ap_positions: self.ap_positions.iter().map(shift).collect(),
            user_positions: self.user_positions.iter().map(shift).collect(),
            ..self.clone()
        }
    }
}

/// Wraparound distance on a square torus of side `side`.
pub fn torus_distance(a: [f64; 2], b: [f64; 2], side: f64) -> f64 {
    let wrap = |d: f64| {
        let d = d.abs() % side;
        d.min(side - d)
    };
    wrap(a[0] - b[0]).hypot(wrap(a[1] - b[1]))
}

/// Realization 0 of `seed`.
pub fn sample_realization(params: &SystemParams, seed: u64) -> Result<NetworkRealization> {
    sample_realization_stream(params, seed, 0)
}

/// Realization `index` of `seed`: drawn from ChaCha8 keyed by `seed` on
/// stream `index`, so any realization can be regenerated on its own.
/// M = 0 is redrawn from stream `index + attempt·2⁴⁸`.
pub fn sample_realization_stream(params: &SystemParams, seed: u64, index: u64) -> Result<NetworkRealization> {
    params.validate()?;
    let mean = params.ap_density * params.area;
    let poisson = Poisson::new(mean).map_err(|e| Error::domain(format!("mean AP count {mean}: {e}")))?;
    let side = params.area.sqrt();

    for attempt in 0..=MAX_RESAMPLES {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(index.wrapping_add(attempt.wrapping_mul(RESAMPLE_STRIDE)));
        let m = poisson.sample(&mut rng) as usize;
        if m == 0 {
            continue;
        }
        let mut point = || [rng.random::<f64>() * side, rng.random::<f64>() * side];
        let ap_positions: Vec<[f64; 2]> = (0..m).map(|_| point()).collect();
        let user_positions: Vec<[f64; 2]> = (0..params.n_users).map(|_| point()).collect();
        return Ok(NetworkRealization {
            ap_positions,
            user_positions,
            m_count: m,
            torus_side: side,
            resamples: attempt as u32,
        });
    }
    Err(Error::Simulation(format!(
        "no AP in {MAX_RESAMPLES} draws with mean count {mean}"
    )))
}
