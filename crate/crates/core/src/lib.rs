//! Energy efficiency of cell-free massive MIMO networks with Poisson-distributed
//! access points.
//!
//! * [`model`]: closed-form SINR bound, SE, area power consumption and EE.
//! * [`optimizer`]: EE maximisation under an SINR target, with every closed
//!   form cross-checked by a numerical search.
//! * [`sim`]: Monte Carlo network drops validating the bound.
//! * [`sweep`], [`reproduce`], [`cli`]: the `cellfree-ee` binary.
//!
//! ```
//! use cellfree_ee::{energy_efficiency, ApcMode, PowerModel, SystemParams};
//!
//! let b = energy_efficiency(&SystemParams::table_iii(), &PowerModel::table_iii(), ApcMode::Polynomial)?;
//! assert!(b.ee > 0.0);
//! # Ok::<(), cellfree_ee::Error>(())
//! ```

// `!(x > 0.0)` is how NaN gets rejected along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod model;
pub mod params;
pub mod optimizer;
pub mod sim;
pub mod config;
pub mod sweep;
pub mod reproduce;
pub mod cli;

pub use error::{Error, Result};
pub use model::{energy_efficiency, ApcMode, EEBreakdown};
pub use optimizer::{OptimizerOptions, OptimumReport, Variable};
pub use params::{PilotMode, PowerModel, SystemParams};

// `cargo test --doc` runs the guide's snippets too.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/sinr.md")]
    mod sinr {}
    #[doc = include_str!("../../../book/src/power.md")]
    mod power {}
    #[doc = include_str!("../../../book/src/optimization.md")]
    mod optimization {}
    #[doc = include_str!("../../../book/src/simulation.md")]
    mod simulation {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
