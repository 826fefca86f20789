use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::geometry::sample_realization_stream;
use super::pilots::{assign_pilots, pilot_count, PilotPolicy};
use super::sinr::PathlossTable;
use crate::error::{Error, Result};
use crate::model::{se_per_user, OperatingPoint};
use crate::params::SystemParams;

/// Largest tolerated share of degenerate realizations before a run aborts.
const MAX_DEGENERATE_SHARE: f64 = 1e-3;

/// Which users' SE a realization contributes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UserAveraging {
    /// User 0 only. Distances on the torus are translation invariant, so
    /// this is the typical user at the origin with the layout shifted.
    #[default]
    Typical,
    /// Mean over all K users of the realization.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct McOptions {
    pub pilots: PilotPolicy,
    pub users: UserAveraging,
}

/// One realization of a Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McRecord {
    pub index: u64,
    pub seed: u64,
    pub m: usize,
    pub resamples: u32,
    /// SINR of user 0, or the mean over users with [`UserAveraging::All`].
    pub sinr: Option<f64>,
    pub se: Option<f64>,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McSummary {
    pub n_realizations: u64,
    /// Realizations that entered the average.
    pub n_used: u64,
    pub degenerate: u64,
    /// M = 0 draws thrown away across the run.
    pub resamples: u64,
    /// Realizations with M ≤ 8.
    pub few_ap_draws: u64,
    pub mean_m: f64,
    /// bit/s/Hz
    pub mean_se: f64,
    pub stderr: f64,
    /// Closed-form lower bound on the average SE, bit/s/Hz.
    pub lower_bound: f64,
    /// `mean_se − lower_bound`
    pub bound_gap: f64,
    /// `bound_gap / lower_bound`
    pub relative_gap: f64,
}

pub fn mc_average_se(params: &SystemParams, n_realizations: u64, seed: u64) -> Result<McSummary> {
    mc_run(params, n_realizations, seed, &McOptions::default()).map(|(s, _)| s)
}

/// Runs `n_realizations` independent draws in parallel. Realization `i`
/// uses stream `i` of `seed`, and results are reduced in index order, so
/// the summary does not depend on the number of worker threads.
pub fn mc_run(
    params: &SystemParams,
    n_realizations: u64,
    seed: u64,
    opts: &McOptions,
) -> Result<(McSummary, Vec<McRecord>)> {
    if n_realizations == 0 {
        return Err(Error::domain("need at least one realization"));
    }
    params.validate()?;
    let lower_bound = se_per_user(params)?;
    let prefactor = OperatingPoint::from(params).prefactor();
    let tau = pilot_count(params);

    let records = (0..n_realizations)
        .into_par_iter()
        .map(|index| one(params, seed, index, tau, prefactor, opts))
        .collect::<Result<Vec<_>>>()?;

    let degenerate = records.iter().filter(|r| r.degenerate).count() as u64;
    let se: Vec<f64> = records.iter().filter_map(|r| r.se).collect();
    if se.is_empty() {
        return Err(Error::Simulation(format!("all {n_realizations} realizations were degenerate")));
    }
    if degenerate as f64 > MAX_DEGENERATE_SHARE * n_realizations as f64 {
        return Err(Error::Simulation(format!(
            "{degenerate} of {n_realizations} realizations had a non-positive SINR denominator"
        )));
    }
    let n = se.len() as f64;
    let mean_se = se.iter().sum::<f64>() / n;
    let stderr = if se.len() > 1 {
        (se.iter().map(|x| (x - mean_se).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    let bound_gap = mean_se - lower_bound;
    let summary = McSummary {
        n_realizations,
        n_used: se.len() as u64,
        degenerate,
        resamples: records.iter().map(|r| r.resamples as u64).sum(),
        few_ap_draws: records.iter().filter(|r| r.m <= super::FEW_APS).count() as u64,
        mean_m: records.iter().map(|r| r.m as f64).sum::<f64>() / records.len() as f64,
        mean_se,
        stderr,
        lower_bound,
        bound_gap,
        relative_gap: bound_gap / lower_bound,
    };
    Ok((summary, records))
}

fn one(params: &SystemParams, seed: u64, index: u64, tau: usize, prefactor: f64, opts: &McOptions) -> Result<McRecord> {
    let real = sample_realization_stream(params, seed, index)?;
    // a distinct permutation per realization when pilots are random
    let pilot_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(index);
    let pilots = assign_pilots(params.n_users as usize, tau, opts.pilots, pilot_seed)?;
    let table = PathlossTable::new(&real, &pilots, params)?;
    let users = match opts.users {
        UserAveraging::Typical => 0..1,
        UserAveraging::All => 0..params.n_users as usize,
    };
    let mut record = McRecord {
        index,
        seed,
        m: real.m_count,
        resamples: real.resamples,
        sinr: None,
        se: None,
        degenerate: false,
    };
    let (mut sinr_sum, mut se_sum) = (0.0, 0.0);
    let count = users.len() as f64;
    for k in users {
        match table.sinr(k, params) {
            Ok(g) => {
                sinr_sum += g;
                se_sum += prefactor * g.log2_1p();
            }
            Err(Error::NumericalDegeneracy(_)) => {
                record.degenerate = true;
                return Ok(record);
            }
            Err(e) => return Err(e),
        }
    }
    record.sinr = Some(sinr_sum / count);
    record.se = Some(se_sum / count);
    Ok(record)
}

/// Writes one JSON object per line.
pub fn write_records<W: Write>(mut w: W, records: &[McRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

trait Log2OnePlus {
    fn log2_1p(self) -> f64;
}

impl Log2OnePlus for f64 {
    fn log2_1p(self) -> f64 {
        self.ln_1p() / std::f64::consts::LN_2
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SystemParams {
        let mut p = SystemParams::table_iii();
        p.area = 0.04e6;
        p
    }

    #[test]
    fn single_realization_is_reproducible() {
        let p = small();
        let a = mc_average_se(&p, 1, 42).unwrap();
        assert_eq!(a, mc_average_se(&p, 1, 42).unwrap());
        assert_eq!(a.stderr, 0.0);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let p = small();
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| mc_run(&p, 64, 5, &McOptions::default()).unwrap())
        };
        let (a, ra) = run(1);
        let (b, rb) = run(4);
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(ra, rb);
    }

    #[test]
    fn zero_realizations_rejected() {
        assert!(mc_average_se(&small(), 0, 1).is_err());
    }

    #[test]
    fn records_are_ndjson() {
        let (_, recs) = mc_run(&small(), 3, 1, &McOptions::default()).unwrap();
        let mut buf = Vec::new();
        write_records(&mut buf, &recs).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back: McRecord = serde_json::from_str(text.lines().nth(2).unwrap()).unwrap();
        assert_eq!(back, recs[2]);
    }
}
