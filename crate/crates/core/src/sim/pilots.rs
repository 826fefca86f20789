use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::SystemParams;

/// Stream reserved for pilot permutations, disjoint from realization streams.
const PILOT_STREAM: u64 = u64::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PilotPolicy {
    /// User u gets pilot u mod τ_tr.
    #[default]
    RoundRobin,
    /// Users are shuffled first, then dealt round-robin.
    Random,
}

/// Orthogonal pilot index per user; users on the same pilot contaminate
/// each other with unit cross-correlation, all others not at all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PilotAssignment {
    pub pilot: Vec<usize>,
    pub n_pilots: usize,
}

impl PilotAssignment {
    pub fn shares(&self, i: usize, k: usize) -> bool {
        self.pilot[i] == self.pilot[k]
    }

    /// `Σⱼ |ψⱼᴴψₖ|²` for user `k`, counting `k` itself.
    pub fn corr_sum(&self, k: usize) -> usize {
        self.pilot.iter().filter(|&&p| p == self.pilot[k]).count()
    }

    /// Users per pilot, indexed by pilot.
    pub fn loads(&self) -> Vec<usize> {
        let mut load = vec![0; self.n_pilots];
        for &p in &self.pilot {
            load[p] += 1;
        }
        load
    }
}

/// Number of orthogonal pilots used by the simulator: `⌈K/ζ⌉`, so no pilot
/// carries more than `⌈ζ⌉` users.
pub fn pilot_count(params: &SystemParams) -> usize {
    let k = params.n_users as usize;
    ((params.tau_tr() - 1e-9).ceil() as usize).clamp(1, k)
}

pub fn assign_pilots(k: usize, tau_tr: usize, policy: PilotPolicy, seed: u64) -> Result<PilotAssignment> {
    if k == 0 || tau_tr == 0 {
        return Err(Error::domain(format!("need K ≥ 1 and τ_tr ≥ 1, got K = {k}, τ_tr = {tau_tr}")));
    }
    let mut order: Vec<usize> = (0..k).collect();
    if policy == PilotPolicy::Random {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(PILOT_STREAM);
        order.shuffle(&mut rng);
    }
    let mut pilot = vec![0; k];
    for (slot, &user) in order.iter().enumerate() {
        pilot[user] = slot % tau_tr;
    }
    Ok(PilotAssignment { pilot, n_pilots: tau_tr })
}
