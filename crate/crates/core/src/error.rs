use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the domain of the formula being evaluated.
    #[error("domain error: {0}")]
    Domain(String),

    /// The pilot phase consumes the whole coherence block (K/(ζτc) ≥ 1).
    #[error("infeasible frame: pilot overhead K/(zeta*tau_c) = {overhead} leaves no room for data")]
    InfeasibleFrame { overhead: f64 },

    /// A power model produced a non-positive area power consumption.
    #[error("power model inconsistency: APC = {apc} W/m^2 is not positive")]
    ModelInconsistency { apc: f64 },

    /// The SINR target cannot be met in the requested search region.
    #[error("infeasible problem: {0}")]
    Infeasible(String),

    /// The conditional SINR denominator came out non-positive through rounding.
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),

    #[error("simulation failure: {0}")]
    Simulation(String),

    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status for the command-line tool: 2 for bad input,
    /// 3 for an infeasible problem, 4 for a failed simulation, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Domain(_) => 2,
            Error::Infeasible(_) | Error::InfeasibleFrame { .. } | Error::ModelInconsistency { .. } => 3,
            Error::Simulation(_) | Error::NumericalDegeneracy(_) => 4,
            Error::Io(_) | Error::Json(_) | Error::Csv(_) => 1,
        }
    }
}
