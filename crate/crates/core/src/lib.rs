//! Photon counting with multiplexed on-off detectors.
//!
//! `clickkit` covers the full chain from an input photon-number distribution
//! to a nonclassicality verdict:
//!
//! - [`state`]: photon-number distributions and their normally ordered
//!   exponential moments.
//! - [`theory`]: exact click-counting statistics `C_k`, click-projector
//!   moments and the binomial parameter `Q_B`.
//! - [`sim`]: a seeded Monte Carlo model of a splitter cascade feeding
//!   imperfect on-off detectors.
//! - [`estimators`]: `Q_B` with uncertainties, factorial moments, the matrix
//!   of moments with its eigen-decomposition, significances and verdicts.
//! - [`ingest`]: the time-tag file format and coincidence windowing.
//! - [`recipes`]: parameter inversions and fixtures used by flux scans.

pub mod error;
pub mod estimators;
pub mod histogram;
pub mod ingest;
pub mod numeric;
pub mod recipes;
pub mod sim;
pub mod state;
pub mod theory;

pub use error::{Error, ErrorKind, Result};
pub use histogram::{ClickHistogram, WindowMode};
pub use state::PhotonNumberDistribution;
pub use theory::{ClickDistribution, DetectorArrayConfig};
