//! Exact random variates without floating point.
//!
//! This crate samples from continuous distributions exactly: a sample is a
//! lazily refined real number whose binary digits are produced on demand
//! from a stream of fair bits, never rounded. It provides
//!
//! * [`entropy`]: seeded, recording and replaying bit sources;
//! * [`lazyreal`]: lazily sampled uniform deviates and their comparison;
//! * [`creal`]: constructive reals on dyadic approximants, with comparison
//!   against dyadic points and decimal rendering;
//! * [`samplers`]: exact Bernoulli, Gaussian, exponential and Laplace
//!   samplers built from comparisons of uniform deviates;
//! * [`conformance`]: statistical and exhaustive checks that the samplers
//!   follow their target laws.
//!
//! ```
//! use exact_rand::creal::to_decimal;
//! use exact_rand::entropy::SeededSource;
//! use exact_rand::samplers::gaussian;
//!
//! let mut src = SeededSource::new(42);
//! let g = gaussian(&mut src).unwrap();
//! // Asking for more digits refines the same sample.
//! let short = to_decimal(&g, 4, &mut src).unwrap();
//! let long = to_decimal(&g, 20, &mut src).unwrap();
//! let (a, b): (f64, f64) = (short.parse().unwrap(), long.parse().unwrap());
//! assert!((a - b).abs() <= 1e-4 + 1e-20);
//! ```

pub mod conformance;
pub mod creal;
pub mod entropy;
pub mod error;
pub mod lazyreal;
pub mod samplers;

pub use creal::{CReal, Decimal, Dyadic};
pub use entropy::{BitSource, RecordingSource, SeededSource, TapeSource};
pub use error::{Error, Result};
pub use lazyreal::LazyUniform;

/// The guide's chapters, compiled as doc-tests so the book cannot drift from
/// the code.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/intro.md")]
    mod intro {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/lazy-uniform.md")]
    mod lazy_uniform {}
    #[doc = include_str!("../../../book/src/constructive-reals.md")]
    mod constructive_reals {}
    #[doc = include_str!("../../../book/src/samplers.md")]
    mod samplers {}
    #[doc = include_str!("../../../book/src/conformance.md")]
    mod conformance {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
    #[doc = include_str!("../../../README.md")]
    mod readme {}
}
