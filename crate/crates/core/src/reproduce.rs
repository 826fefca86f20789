//! Datasets behind the numerical-results figures.
//!
//! Each figure function bakes in the published operating point (Table III
//! plus the figure's own settings) and returns rows in figure units: λ in
//! AP/km², ASE in bit/s/Hz/km², EE in Mbit/J.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::config::{SweepAxis, SweepVariable};
use crate::error::{Error, Result};
use crate::model::{energy_efficiency_at_target, se_per_user, ApcMode, OperatingPoint};
use crate::optimizer::{
    argmax_lexicographic, brute_force_optimum, optimal_n_antennas_with, optimal_n_users_with, optimal_zeta_with, Grid,
    OptimizerOptions, Scale, SearchBounds, Variable,
};
use crate::params::{PilotMode, PowerModel, SystemParams};
use crate::sim::{mc_run, McOptions};
use crate::sweep::{sweep, write_csv, PilotSource};

const KM2: f64 = 1e6;
const MEGA: f64 = 1e6;

/// SINR targets of the constrained-EE figures: average SE of 1, 2, 3 bit/s/Hz.
pub const TARGETS: [f64; 3] = [1.0, 3.0, 7.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Figure {
    Fig1,
    Fig3,
    Fig4,
    Fig5,
}

impl Figure {
    pub const ALL: [Figure; 4] = [Figure::Fig1, Figure::Fig3, Figure::Fig4, Figure::Fig5];

    pub fn name(self) -> &'static str {
        match self {
            Figure::Fig1 => "fig1",
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::domain(format!("unknown figure `{s}`, expected fig1, fig3, fig4 or fig5")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproduceOptions {
    pub apc_mode: ApcMode,
    /// Monte Carlo draws per point of the fig3 upper-bound curves.
    pub n_realizations: u64,
    pub seed: u64,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        ReproduceOptions { apc_mode: ApcMode::Polynomial, n_realizations: 200, seed: 0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceRow {
    pub zeta: f64,
    pub lambda_per_km2: f64,
    pub se_per_user: f64,
    pub ee_mbit_per_j: f64,
    pub is_argmax: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SurfaceArgmax {
    pub zeta: f64,
    pub lambda_per_km2: f64,
    pub ee_mbit_per_j: f64,
}

/// EE over (ζ, λ_AP) at Table III, A = ζ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1 {
    pub rows: Vec<SurfaceRow>,
    pub argmax: Option<SurfaceArgmax>,
}

/// ζ ∈ [1, 10] in steps of 0.25, λ ∈ [5, 200] AP/km² in steps of 5.
pub fn fig1(opts: &ReproduceOptions) -> Result<Fig1> {
    let axes = [
        SweepAxis { variable: SweepVariable::Zeta, min: 1.0, max: 10.0, steps: 37, scale: Scale::Linear },
        SweepAxis { variable: SweepVariable::Lambda, min: 5.0, max: 200.0, steps: 40, scale: Scale::Linear },
    ];
    let p = SystemParams::table_iii();
    let pm = PowerModel::table_iii();
    let sw = sweep(&p, &pm, opts.apc_mode, 3.0, PilotSource::Mode(PilotMode::OrthogonalReuse), &axes)?;
    let best = argmax_lexicographic(sw.iter().map(|r| r.ee_mbit_per_j));
    let rows: Vec<SurfaceRow> = sw
        .iter()
        .enumerate()
        .map(|(i, r)| SurfaceRow {
            zeta: r.zeta,
            lambda_per_km2: r.lambda_per_km2,
            se_per_user: r.se_per_user,
            ee_mbit_per_j: r.ee_mbit_per_j,
            is_argmax: Some(i) == best,
        })
        .collect();
    let argmax = best.map(|i| SurfaceArgmax {
        zeta: rows[i].zeta,
        lambda_per_km2: rows[i].lambda_per_km2,
        ee_mbit_per_j: rows[i].ee_mbit_per_j,
    });
    Ok(Fig1 { rows, argmax })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundRow {
    pub gamma0: f64,
    pub lambda_per_km2: f64,
    pub zeta: f64,
    /// ζ came from the SINR constraint; otherwise the Table III value was kept.
    pub constraint_met: bool,
    pub se_lower_bound: f64,
    pub se_mc: f64,
    pub se_mc_stderr: f64,
    pub relative_gap: f64,
    pub ee_lower_mbit_per_j: f64,
    pub ee_mc_mbit_per_j: f64,
}

/// Lower-bound and Monte Carlo EE against λ_AP for each target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig3 {
    pub rows: Vec<BoundRow>,
}

/// λ ∈ {5, 10, …, 100} AP/km², γ₀ ∈ {1, 3, 7}.
pub fn fig3(opts: &ReproduceOptions) -> Result<Fig3> {
    let pm = PowerModel::table_iii();
    let oopts = OptimizerOptions { apc_mode: opts.apc_mode, ..Default::default() };
    let mut rows = Vec::new();
    for gamma0 in TARGETS {
        for i in 1..=20 {
            let mut p = SystemParams::table_iii();
            p.ap_density = 5.0 * i as f64 / KM2;
            let zeta = optimal_zeta_with(&p, &pm, gamma0, &oopts).ok().map(|r| r.value[0]);
            if let Some(z) = zeta {
                p.pilot_reuse = z;
            }
            let lower = se_per_user(&p)?;
            let (mc, _) = mc_run(&p, opts.n_realizations, opts.seed, &McOptions::default())?;
            let ee = |se: f64| -> Result<f64> {
                let pre = OperatingPoint::from(&p).prefactor();
                let sinr = (se / pre).exp2() - 1.0;
                Ok(energy_efficiency_at_target(&p, &pm, opts.apc_mode, sinr)?.ee / MEGA)
            };
            rows.push(BoundRow {
                gamma0,
                lambda_per_km2: p.ap_density * KM2,
                zeta: p.pilot_reuse,
                constraint_met: zeta.is_some(),
                se_lower_bound: lower,
                se_mc: mc.mean_se,
                se_mc_stderr: mc.stderr,
                relative_gap: mc.relative_gap,
                ee_lower_mbit_per_j: ee(lower)?,
                ee_mc_mbit_per_j: ee(mc.mean_se)?,
            });
        }
    }
    Ok(Fig3 { rows })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TradeoffRow {
    pub k: u32,
    pub gamma0: f64,
    pub zeta: f64,
    /// SINR bound at this ζ reaches γ₀.
    pub meets_target: bool,
    pub ase_per_km2: f64,
    pub ee_mbit_per_j: f64,
}

/// EE against ASE with the SE pinned to `log₂(1+γ₀)`, traced over ζ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig4 {
    pub rows: Vec<TradeoffRow>,
}

/// K ∈ {10, 20}, γ₀ ∈ {1, 3, 7}; ζ runs over 50 log-spaced points of its
/// window `[max(1, K/τc), K]` at Table III λ_AP.
pub fn fig4(opts: &ReproduceOptions) -> Result<Fig4> {
    let pm = PowerModel::table_iii();
    let mut rows = Vec::new();
    for k in [10u32, 20] {
        for gamma0 in TARGETS {
            let mut p = SystemParams::table_iii();
            p.n_users = k;
            let lo = (k as f64 / p.tau_c as f64).max(1.0);
            for &zeta in Grid::log(lo, k as f64, 50)?.values() {
                p.pilot_reuse = zeta;
                p.pilot_corr_sum = zeta;
                let b = energy_efficiency_at_target(&p, &pm, opts.apc_mode, gamma0)?;
                rows.push(TradeoffRow {
                    k,
                    gamma0,
                    zeta,
                    meets_target: 1.0 / b.gamma_terms.total() >= gamma0,
                    ase_per_km2: b.ase * KM2,
                    ee_mbit_per_j: b.ee / MEGA,
                });
            }
        }
    }
    Ok(Fig4 { rows })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub k: u32,
    pub n: u32,
    pub status: String,
    pub meets_target: bool,
    /// EE with the SE pinned to `log₂(1+γ₀)`.
    pub ee_pinned_mbit_per_j: f64,
    /// EE at the SINR bound itself.
    pub ee_mbit_per_j: f64,
    pub is_argmax: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridArgmax {
    pub k: u32,
    pub n: u32,
    pub ee_mbit_per_j: f64,
}

/// Outcome of one optimizer call, kept even when it fails.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizerOutcome {
    pub value: Option<Vec<f64>>,
    pub ee_mbit_per_j: Option<f64>,
    pub authority: Option<String>,
    pub error: Option<String>,
}

impl OptimizerOutcome {
    fn from(r: Result<crate::optimizer::OptimumReport>) -> Self {
        match r {
            Ok(r) => OptimizerOutcome {
                value: Some(r.value.clone()),
                ee_mbit_per_j: Some(r.objective / MEGA),
                authority: Some(format!("{:?}", r.authority)),
                error: None,
            },
            Err(e) => OptimizerOutcome { value: None, ee_mbit_per_j: None, authority: None, error: Some(e.to_string()) },
        }
    }
}

/// EE over (K, N) at γ₀ = 3, ζ = 3, λ_AP = 25 AP/km².
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig5 {
    pub rows: Vec<GridRow>,
    pub argmax: Option<GridArgmax>,
    /// Closed-form N at the grid-optimal K.
    pub antennas: OptimizerOutcome,
    /// Closed-form K at the grid-optimal N.
    pub users: OptimizerOutcome,
    /// Exhaustive search of the constrained problem over the same grid.
    pub brute_force: OptimizerOutcome,
}

pub const FIG5_GAMMA0: f64 = 3.0;

pub fn fig5_params() -> SystemParams {
    let mut p = SystemParams::table_iii();
    p.pilot_reuse = 3.0;
    p.pilot_corr_sum = 3.0;
    p.ap_density = 25.0 / KM2;
    p
}

/// K ∈ [2, 30], N ∈ [2, 64].
pub fn fig5(opts: &ReproduceOptions) -> Result<Fig5> {
    let pm = PowerModel::table_iii();
    let base = fig5_params();
    let mut rows = Vec::new();
    for k in 2..=30u32 {
        for n in 2..=64u32 {
            let mut p = base.clone();
            p.n_users = k;
            p.n_antennas = n;
            let row = energy_efficiency_at_target(&p, &pm, opts.apc_mode, FIG5_GAMMA0).and_then(|pinned| {
                let own = crate::model::energy_efficiency(&p, &pm, opts.apc_mode)?;
                Ok(GridRow {
                    k,
                    n,
                    status: "ok".into(),
                    meets_target: own.gamma >= FIG5_GAMMA0,
                    ee_pinned_mbit_per_j: pinned.ee / MEGA,
                    ee_mbit_per_j: own.ee / MEGA,
                    is_argmax: false,
                })
            });
            rows.push(row.unwrap_or_else(|e| GridRow {
                k,
                n,
                status: e.to_string(),
                meets_target: false,
                ee_pinned_mbit_per_j: f64::NAN,
                ee_mbit_per_j: f64::NAN,
                is_argmax: false,
            }));
        }
    }
    let best = argmax_lexicographic(rows.iter().map(|r| r.ee_pinned_mbit_per_j));
    let argmax = best.map(|i| {
        rows[i].is_argmax = true;
        GridArgmax { k: rows[i].k, n: rows[i].n, ee_mbit_per_j: rows[i].ee_pinned_mbit_per_j }
    });

    let oopts = OptimizerOptions {
        apc_mode: opts.apc_mode,
        bounds: SearchBounds { n: (2, 64), k: (3, 30), ..Default::default() },
        ..Default::default()
    };
    let (k0, n0) = argmax.map(|a| (a.k, a.n)).unwrap_or((base.n_users, base.n_antennas));
    let mut at_k = base.clone();
    at_k.n_users = k0;
    let mut at_n = base.clone();
    at_n.n_antennas = n0;
    let grids = [
        (Variable::K, Grid::integers(3, 30)?),
        (Variable::N, Grid::integers(2, 64)?),
    ];
    Ok(Fig5 {
        rows,
        argmax,
        antennas: OptimizerOutcome::from(optimal_n_antennas_with(&at_k, &pm, FIG5_GAMMA0, &oopts)),
        users: OptimizerOutcome::from(optimal_n_users_with(&at_n, &pm, FIG5_GAMMA0, &oopts)),
        brute_force: OptimizerOutcome::from(brute_force_optimum(&base, &pm, FIG5_GAMMA0, &grids, &oopts)),
    })
}

fn write_json_file<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    std::io::Write::write_all(&mut w, b"\n")?;
    Ok(())
}

fn write_csv_file<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    write_csv(BufWriter::new(File::create(path)?), rows)
}

/// Writes `<fig>.csv` (and a JSON annotation file where the figure has an
/// optimum) into `dir`, returning the paths written.
pub fn reproduce(figure: Figure, opts: &ReproduceOptions, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let csv = dir.join(format!("{figure}.csv"));
    let mut written = vec![csv.clone()];
    match figure {
        Figure::Fig1 => {
            let f = fig1(opts)?;
            write_csv_file(&csv, &f.rows)?;
            let json = dir.join("fig1_argmax.json");
            write_json_file(&json, &f.argmax)?;
            written.push(json);
        }
        Figure::Fig3 => write_csv_file(&csv, &fig3(opts)?.rows)?,
        Figure::Fig4 => write_csv_file(&csv, &fig4(opts)?.rows)?,
        Figure::Fig5 => {
            let f = fig5(opts)?;
            write_csv_file(&csv, &f.rows)?;
            let json = dir.join("fig5_optimum.json");
            write_json_file(
                &json,
                &serde_json::json!({
                    "argmax": f.argmax,
                    "antennas": f.antennas,
                    "users": f.users,
                    "brute_force": f.brute_force,
                }),
            )?;
            written.push(json);
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fig1_marks_one_argmax() {
        let f = fig1(&ReproduceOptions::default()).unwrap();
        assert_eq!(f.rows.len(), 37 * 40);
        assert_eq!(f.rows.iter().filter(|r| r.is_argmax).count(), 1);
        let a = f.argmax.unwrap();
        assert!(f.rows.iter().all(|r| r.ee_mbit_per_j <= a.ee_mbit_per_j));
    }

    #[test]
    fn fig4_covers_both_user_counts() {
        let f = fig4(&ReproduceOptions::default()).unwrap();
        assert_eq!(f.rows.len(), 2 * 3 * 50);
        assert!(f.rows.iter().all(|r| r.ee_mbit_per_j > 0.0 && r.ase_per_km2 > 0.0));
    }

    #[test]
    fn figure_names_parse() {
        for f in Figure::ALL {
            assert_eq!(f.name().parse::<Figure>().unwrap(), f);
        }
        assert!("fig2".parse::<Figure>().is_err());
    }
}
