//! Checks that the samplers follow their target distributions.
//!
//! Two kinds of evidence are available. Sampling checks draw many seeded
//! samples and compare frequencies against reference values at a 5 sigma
//! (or alpha = 0.001) threshold. Enumeration checks run a sampler on every
//! entropy tape of a fixed length and bracket each outcome's probability
//! exactly.
//!
//! Every report is a deterministic function of the master seed, the check
//! and the number of worker threads.

pub mod checks;
pub mod constants;
pub mod enumerate;
pub mod report;
pub mod stats;
pub mod suite;

pub use checks::{
    cdf_check, laplace_accuracy_check, rate_check, CdfCheckSpec, ContinuousSampler,
    LaplaceAccuracySpec, RateEvent, UnitSampler, DEFAULT_SEED,
};
pub use enumerate::{enumerate_exact, DiscreteSampler, Enumeration, Mass, MassBracket, Outcome};
pub use report::ConformanceReport;
pub use stats::{chi_square_check, ks_check};
pub use suite::{
    all_checks, default_suite, negative_controls, run_suite, Check, CheckKind, KsTarget,
};
