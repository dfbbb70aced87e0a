//! Security analysis of the four-state BB84 protocol over a depolarizing
//! channel attacked by a chain of sequential intercept-resend eavesdroppers.
//!
//! The crate has three layers:
//!
//! - [`model`]: exact closed forms for the Alice–Bob and Alice–Eve agreement
//!   probabilities, mutual information, lost information and the
//!   eavesdropper-added error, plus literal subset-sum oracles in [`oracle`].
//! - [`analysis`]: bisection for the secured/unsecured boundary, QBER
//!   thresholds and the sweep generators that emit [`SweepTable`]s.
//! - [`montecarlo`]: a photon-level simulator of the transmission chain used
//!   to validate the closed forms statistically.

pub mod analysis;
pub mod entropy;
mod error;
pub mod model;
pub mod montecarlo;
pub mod oracle;
pub mod table;
pub mod verify;

pub use analysis::{Boundary, PhaseBoundaryPoint, QRule, QberPoint};
pub use entropy::{binary_entropy, mutual_information};
pub use error::{AnalysisError, ModelError, SimError, TableError};
pub use model::{
    added_error, assess, bob_agreement, eve_agreement, flip_probability, lost_information,
    noiseless_bob_agreement, Agreement, AttackChain, ChannelNoise, SecurityAssessment,
};
pub use table::{Cell, SweepTable};

/// Absolute tolerance on `Σ q_i = 1`.
pub const Q_SUM_TOLERANCE: f64 = 1e-9;
