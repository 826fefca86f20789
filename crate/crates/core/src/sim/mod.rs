//! Monte Carlo simulation of PPP access-point layouts on a torus.
//!
//! A realization is one Poisson draw of AP positions plus K uniform users
//! on the square `[0, √S)²` with wraparound distances. For every
//! realization the conditional SINR of a user is computed from the
//! path-loss statistics alone (small-scale fading and estimation are
//! already averaged out), and the per-user SE averaged over realizations
//! gives an upper bound to compare with the closed-form lower bound.

mod geometry;
mod monte_carlo;
mod pilots;
mod sinr;

pub use geometry::{sample_realization, sample_realization_stream, torus_distance, NetworkRealization};
pub use monte_carlo::{mc_average_se, mc_run, write_records, McOptions, McRecord, McSummary, UserAveraging};
pub use pilots::{assign_pilots, pilot_count, PilotAssignment, PilotPolicy};
pub use sinr::{conditional_sinr, PathlossTable};

/// Draws with at most this many APs are flagged: the law of large numbers
/// behind the closed form is not expected to hold there.
pub const FEW_APS: usize = 8;
