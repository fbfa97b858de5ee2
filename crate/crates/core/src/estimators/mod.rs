//! Statistical quantities estimated from click histograms.

mod bootstrap;
mod jacobi;
mod moments;
mod qb;
mod significance;
mod verdict;

pub use bootstrap::{BootstrapOptions, MIN_BOOTSTRAP_REPLICATES};
pub use jacobi::{symmetric_eigen, SymmetricEigen, JACOBI_MAX_SWEEPS, JACOBI_TOLERANCE};
pub use moments::{factorial_pi_moment, moment_matrix, MomentMatrix};
pub use qb::{
    empirical_click_distribution, qb_delta_sigma, qb_estimate, qb_estimate_with, QbResult, SigmaMethod,
};
pub use significance::{
    quadratic_form, quadratic_form_sigma, significance, significance_all, Significance,
};
pub use verdict::{
    nonclassicality_verdict, DirectionReport, NonclassicalityReport, Verdict, VerdictOptions,
    DEFAULT_THRESHOLD,
};
