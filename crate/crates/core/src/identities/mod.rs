//! Numerical verification of the quantile-based Taylor and mean-value
//! identities and their applications. Both sides of every identity are
//! computed independently and compared.

pub mod application;
pub mod montecarlo;
pub mod printed;
pub mod report;
pub mod testfn;
pub mod verify;

pub use application::{verify_application, ApplicationKind, ApplicationOptions};
pub use montecarlo::{monte_carlo_crosscheck, VerifierTarget};
pub use report::{DensityCheck, IdentityReport, MonteCarloSummary, QuadratureNote, Tolerances};
pub use testfn::TestFunction;
pub use verify::{
    verify_corollary_power, verify_mvt, verify_proportional, verify_taylor1, verify_taylor_n,
};
