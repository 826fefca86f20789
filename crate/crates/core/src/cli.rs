//! The `cellfree-ee` command line.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::config::{load_config, OutputFormat, RunConfig};
use crate::error::{Error, Result};
use crate::model::ApcMode;
use crate::optimizer::{brute_force_optimum, joint_optimize_with, optimize, Grid, OptimizerOptions, OptimumReport, Variable};
use crate::reproduce::{reproduce, Figure, ReproduceOptions};
use crate::sim::{mc_run, write_records};
use crate::sweep::{run_sweep, write_csv, write_json};

#[derive(Debug, Parser)]
#[command(name = "cellfree-ee", version, about = "Energy efficiency of cell-free massive MIMO with PPP access points")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Run configuration (JSON); the built-in Table III set when omitted.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for Monte Carlo runs, overriding the config.
    #[arg(long, global = true, env = "CELLFREE_EE_SEED")]
    pub seed: Option<u64>,
    /// Output file (a directory for `reproduce`); stdout when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Table format for `sweep`.
    #[arg(long, global = true, value_enum)]
    pub format: Option<FormatArg>,
    /// Use the printed power-model coefficients verbatim.
    #[arg(long, global = true)]
    pub strict_paper: bool,
    #[arg(long, global = true, value_enum)]
    pub apc_mode: Option<ApcModeArg>,
    /// Worker threads for parallel sections (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ApcModeArg {
    Polynomial,
    FirstPrinciples,
    PolynomialPrinted,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the closed-form model over the config's sweep axes.
    Sweep,
    /// Maximise EE under the SINR target.
    Optimize {
        /// `zeta`, `lambda`, `n`, `k`, a comma list for a joint grid
        /// search, or `all` for alternating optimisation.
        #[arg(long, default_value = "zeta")]
        variable: String,
    },
    /// Monte Carlo estimate of the average SE.
    Simulate {
        /// Overrides `mc.n_realizations`.
        #[arg(long, short = 'n')]
        realizations: Option<u64>,
        /// Write per-realization NDJSON records to this file.
        #[arg(long)]
        records: Option<PathBuf>,
    },
    /// Write the dataset behind a figure.
    Reproduce {
        #[arg(value_parser = parse_figure)]
        figure: Figure,
        /// Monte Carlo draws per point for fig3.
        #[arg(long, short = 'n', default_value_t = 200)]
        realizations: u64,
    },
}

fn parse_figure(s: &str) -> std::result::Result<Figure, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

impl GlobalArgs {
    fn load(&self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => load_config(p)?,
            None => RunConfig::table_iii(),
        };
        if let Some(seed) = self.seed {
            cfg.mc.seed = seed;
        }
        if let Some(f) = self.format {
            cfg.output.format = match f {
                FormatArg::Csv => OutputFormat::Csv,
                FormatArg::Json => OutputFormat::Json,
            };
        }
        if let Some(out) = &self.out {
            cfg.output.path = Some(out.clone());
        }
        cfg.apc_mode = self.apc_mode(cfg.apc_mode);
        Ok(cfg)
    }

    fn apc_mode(&self, default: ApcMode) -> ApcMode {
        if self.strict_paper {
            return ApcMode::PolynomialPrinted;
        }
        match self.apc_mode {
            Some(ApcModeArg::Polynomial) => ApcMode::Polynomial,
            Some(ApcModeArg::FirstPrinciples) => ApcMode::FirstPrinciples,
            Some(ApcModeArg::PolynomialPrinted) => ApcMode::PolynomialPrinted,
            None => default,
        }
    }
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit_json<T: Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    let mut w = output(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// An optimum in figure units alongside the SI report.
#[derive(Debug, Serialize)]
pub struct OptimizeOutput {
    pub zeta: f64,
    pub lambda_per_km2: f64,
    pub n: f64,
    pub k: f64,
    pub ee_mbit_per_j: f64,
    pub report: OptimumReport,
}

impl From<OptimumReport> for OptimizeOutput {
    fn from(report: OptimumReport) -> Self {
        let p = report.point;
        OptimizeOutput {
            zeta: p.zeta,
            lambda_per_km2: p.lambda * 1e6,
            n: p.n,
            k: p.k,
            ee_mbit_per_j: report.objective / 1e6,
            report,
        }
    }
}

/// Runs the optimizer selected by `variable` on the config's operating point.
pub fn cmd_optimize(cfg: &RunConfig, variable: &str) -> Result<OptimumReport> {
    let params = cfg.system_params()?;
    let pm = cfg.power_model();
    let opts = OptimizerOptions { apc_mode: cfg.apc_mode, ..Default::default() };
    if variable.trim() == "all" {
        return joint_optimize_with(&params, &pm, cfg.gamma0(), &opts);
    }
    let vars = variable.split(',').map(str::parse).collect::<Result<Vec<Variable>>>()?;
    if let [v] = vars[..] {
        return optimize(v, &params, &pm, cfg.gamma0(), &opts);
    }
    let b = opts.bounds;
    let grids = vars
        .iter()
        .map(|&v| {
            let g = match v {
                Variable::Zeta => Grid::linear(1.0, params.n_users as f64, opts.oracle_points),
                Variable::Lambda => Grid::log(b.lambda.0, b.lambda.1, opts.oracle_points),
                Variable::N => Grid::integers(b.n.0, b.n.1),
                Variable::K => Grid::integers(b.k.0, b.k.1),
            };
            g.map(|g| (v, g))
        })
        .collect::<Result<Vec<_>>>()?;
    brute_force_optimum(&params, &pm, cfg.gamma0(), &grids, &opts)
}

pub fn run(cli: Cli) -> Result<()> {
    if let Some(t) = cli.global.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .map_err(|e| Error::config("--threads", e.to_string()))?;
    }
    let g = &cli.global;
    match &cli.command {
        Command::Sweep => {
            let cfg = g.load()?;
            let rows = run_sweep(&cfg)?;
            let mut w = output(cfg.output.path.as_deref())?;
            match cfg.output.format {
                OutputFormat::Csv => write_csv(&mut w, &rows)?,
                OutputFormat::Json => write_json(&mut w, &rows)?,
            }
            w.flush()?;
        }
        Command::Optimize { variable } => {
            let cfg = g.load()?;
            let report = cmd_optimize(&cfg, variable)?;
            emit_json(cfg.output.path.as_deref(), &OptimizeOutput::from(report))?;
        }
        Command::Simulate { realizations, records } => {
            let mut cfg = g.load()?;
            if let Some(n) = realizations {
                cfg.mc.n_realizations = *n;
            }
            if cfg.mc.n_realizations == 0 {
                return Err(Error::config("--realizations", "must be at least 1"));
            }
            let params = cfg.system_params()?;
            let (summary, recs) = mc_run(&params, cfg.mc.n_realizations, cfg.mc.seed, &cfg.mc.options())?;
            let records_path = records.clone().or_else(|| {
                cfg.mc.records.then(|| match &cfg.output.path {
                    Some(p) => p.with_extension("records.ndjson"),
                    None => PathBuf::from("records.ndjson"),
                })
            });
            if let Some(p) = records_path {
                let mut w = BufWriter::new(File::create(p)?);
                write_records(&mut w, &recs)?;
                w.flush()?;
            }
            emit_json(cfg.output.path.as_deref(), &summary)?;
        }
        Command::Reproduce { figure, realizations } => {
            let cfg = g.load()?;
            let opts = ReproduceOptions { apc_mode: cfg.apc_mode, n_realizations: *realizations, seed: cfg.mc.seed };
            if opts.n_realizations == 0 {
                return Err(Error::config("--realizations", "must be at least 1"));
            }
            let dir = g.out.clone().unwrap_or_else(|| PathBuf::from("."));
            for path in reproduce(*figure, &opts, &dir)? {
                eprintln!("wrote {}", path.display());
            }
        }
    }
    Ok(())
}
