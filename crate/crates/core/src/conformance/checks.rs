//! Sampling checks: CDF conformance through the checker, Bernoulli rates,
//! discretized KS samples and the Laplace accuracy bound.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::thread;

use num_bigint::BigInt;

use super::constants::{CHECKER_MAX_PRECISION, UNDECIDED_BUDGET, Z_THRESHOLD};
use super::report::ConformanceReport;
use super::stats::binomial_z;
use crate::creal::{checker, CReal, Decimal, Dyadic};
use crate::entropy::{BitSource, SeededSource};
use crate::error::{Error, Result};
use crate::lazyreal::{max2, LazyUniform};
use crate::samplers;

/// Seed used by the suite when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED;

/// Smallest trial count a CDF check accepts.
pub const MIN_CDF_TRIALS: u64 = 100;

/// The splitmix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn fnv1a(text: &str) -> u64 {
    text.bytes().fold(0xCBF2_9CE4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// The seed a named check derives from the master seed.
pub fn check_seed(master: u64, name: &str) -> u64 {
    splitmix64(master ^ fnv1a(name))
}

/// The seed of shard `index`. Shard 0 uses `seed` itself, so a single
/// worker sees the same stream as an unsharded run.
pub fn shard_seed(seed: u64, index: usize) -> u64 {
    if index == 0 {
        seed
    } else {
        splitmix64(seed ^ splitmix64(index as u64))
    }
}

/// Splits `trials` across `jobs` workers, each with its own seeded source,
/// and returns their results in shard order.
pub fn sharded<T, F>(seed: u64, trials: u64, jobs: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut SeededSource, u64) -> Result<T> + Sync,
{
    let jobs = jobs.max(1);
    let share = |i: usize| trials / jobs as u64 + u64::from((i as u64) < trials % jobs as u64);
    if jobs == 1 {
        return Ok(vec![work(&mut SeededSource::new(seed), trials)?]);
    }
    thread::scope(|scope| {
        let handles: Vec<_> = (0..jobs)
            .map(|i| {
                let work = &work;
                scope.spawn(move || work(&mut SeededSource::new(shard_seed(seed, i)), share(i)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("conformance worker panicked"))
            .collect()
    })
}

/// Samplers with a real-valued result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContinuousSampler {
    Uniform,
    Max2,
    HalfGaussian,
    Gaussian,
    Exponential,
    Laplace { eps_exp: i64, mu: Decimal },
}

impl ContinuousSampler {
    pub fn draw<S: BitSource + ?Sized>(&self, src: &mut S) -> Result<CReal> {
        Ok(match self {
            Self::Uniform => CReal::of_uniform(LazyUniform::new()),
            Self::Max2 => CReal::of_uniform(max2(src)?),
            Self::HalfGaussian => samplers::half_gaussian(src)?.to_creal(),
            Self::Gaussian => samplers::gaussian(src)?,
            Self::Exponential => samplers::neg_exponential(src)?.to_creal(),
            Self::Laplace { eps_exp, mu } => samplers::laplace(src, *eps_exp, &mu.to_creal())?,
        })
    }

    pub fn name(&self) -> String {
        match self {
            Self::Uniform => "uniform".into(),
            Self::Max2 => "max2".into(),
            Self::HalfGaussian => "half-gaussian".into(),
            Self::Gaussian => "gaussian".into(),
            Self::Exponential => "exponential".into(),
            Self::Laplace { eps_exp, mu } => format!("laplace(eps_exp={eps_exp},mu={mu})"),
        }
    }
}

/// A CDF conformance check: the fraction of samples the checker places
/// below `point` should match `expected_cdf`.
#[derive(Clone, Debug, PartialEq)]
pub struct CdfCheckSpec {
    pub name: String,
    pub sampler: ContinuousSampler,
    pub point: Dyadic,
    pub trials: u64,
    pub expected_cdf: f64,
    pub z_threshold: f64,
}

impl CdfCheckSpec {
    pub fn new(
        name: impl Into<String>,
        sampler: ContinuousSampler,
        point: Dyadic,
        trials: u64,
        expected_cdf: f64,
    ) -> Self {
        Self {
            name: name.into(),
            sampler,
            point,
            trials,
            expected_cdf,
            z_threshold: Z_THRESHOLD,
        }
    }
}

#[derive(Default)]
struct Tally {
    hits: u64,
    misses: u64,
    undecided: u64,
}

impl Tally {
    fn merge(parts: Vec<Tally>) -> Tally {
        parts.into_iter().fold(Tally::default(), |a, b| Tally {
            hits: a.hits + b.hits,
            misses: a.misses + b.misses,
            undecided: a.undecided + b.undecided,
        })
    }

    fn decided(&self) -> u64 {
        self.hits + self.misses
    }

    fn undecided_ok(&self, trials: u64) -> bool {
        self.undecided as f64 <= UNDECIDED_BUDGET * trials as f64
    }
}

/// Runs a CDF check.
///
/// The statistic is the binomial z-score of the below-point frequency among
/// decided trials. The check passes when it is within `z_threshold` and at
/// most 0.1% of trials were undecided.
pub fn cdf_check(spec: &CdfCheckSpec, seed: u64, jobs: usize) -> Result<ConformanceReport> {
    if spec.trials < MIN_CDF_TRIALS {
        return Err(Error::InvalidParameter(format!(
            "a CDF check needs at least {MIN_CDF_TRIALS} trials, got {}",
            spec.trials
        )));
    }
    if !(0.0..=1.0).contains(&spec.expected_cdf) {
        return Err(Error::InvalidParameter(format!(
            "expected CDF {} is not a probability",
            spec.expected_cdf
        )));
    }
    let parts = sharded(seed, spec.trials, jobs, |src, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            let sample = spec.sampler.draw(src)?;
            match checker(&sample, &spec.point, CHECKER_MAX_PRECISION, src) {
                Ok(Ordering::Less) => t.hits += 1,
                Ok(_) => t.misses += 1,
                Err(Error::Undecided { .. }) => t.undecided += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(t)
    })?;
    let t = Tally::merge(parts);
    let statistic = binomial_z(t.hits, t.decided(), spec.expected_cdf);
    Ok(ConformanceReport {
        name: spec.name.clone(),
        observed: BTreeMap::from([("less".into(), t.hits), ("greater".into(), t.misses)]),
        statistic,
        threshold: spec.z_threshold,
        pass: statistic <= spec.z_threshold && t.undecided_ok(spec.trials),
        seed,
        trials: spec.trials,
        undecided: t.undecided,
    })
}

/// Bernoulli events whose success rate has a closed form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RateEvent {
    /// The `e^-1/2` coin returns true.
    HalfExp,
    /// The integer part of an exponential draw is 0.
    ExponentialIntZero,
    /// The first bit of the larger of two uniforms is 1.
    Max2FirstBit,
    /// The integer part of a half-normal draw is 0.
    GaussianIntZero,
}

impl RateEvent {
    pub fn occurs<S: BitSource + ?Sized>(self, src: &mut S) -> Result<bool> {
        match self {
            Self::HalfExp => samplers::bernoulli_half_exp(src),
            Self::ExponentialIntZero => Ok(samplers::neg_exponential(src)?.k == 0),
            Self::Max2FirstBit => max2(src)?.force_next(0, src),
            Self::GaussianIntZero => Ok(samplers::gaussian_int(src)? == 0),
        }
    }
}

/// Counts how often `event` occurs in `trials` draws and z-tests the
/// frequency against `expected`.
pub fn rate_check(
    name: &str,
    event: RateEvent,
    expected: f64,
    trials: u64,
    seed: u64,
    jobs: usize,
) -> Result<ConformanceReport> {
    let parts = sharded(seed, trials, jobs, |src, n| {
        let mut t = Tally::default();
        for _ in 0..n {
            if event.occurs(src)? {
                t.hits += 1;
            } else {
                t.misses += 1;
            }
        }
        Ok(t)
    })?;
    let t = Tally::merge(parts);
    let statistic = binomial_z(t.hits, trials, expected);
    Ok(ConformanceReport {
        name: name.to_string(),
        observed: BTreeMap::from([("true".into(), t.hits), ("false".into(), t.misses)]),
        statistic,
        threshold: Z_THRESHOLD,
        pass: statistic <= Z_THRESHOLD,
        seed,
        trials,
        undecided: 0,
    })
}

/// Uniform-range samplers for the KS check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitSampler {
    Uniform,
    Max2,
}

/// Draws `n` samples, each truncated to its first `bits` bits.
pub fn unit_samples(
    sampler: UnitSampler,
    n: u64,
    bits: u32,
    seed: u64,
    jobs: usize,
) -> Result<Vec<u64>> {
    let parts = sharded(seed, n, jobs, |src, n| {
        (0..n)
            .map(|_| {
                let u = match sampler {
                    UnitSampler::Uniform => LazyUniform::new(),
                    UnitSampler::Max2 => max2(src)?,
                };
                u.get_bits_u64(bits, src)
            })
            .collect::<Result<Vec<u64>>>()
    })?;
    Ok(parts.concat())
}

/// Parameters of the Laplace accuracy check.
#[derive(Clone, Debug, PartialEq)]
pub struct LaplaceAccuracySpec {
    pub name: String,
    pub eps_exp: i64,
    pub mu: Decimal,
    pub beta: f64,
    pub trials: u64,
    /// Multiplies the cut radius; 1 for the real check.
    pub radius_factor: f64,
}

/// The cut radius `ln(1/beta) / 2^eps_exp`, rounded up to a dyadic with 32
/// fractional bits beyond the scale.
pub fn accuracy_radius(beta: f64, eps_exp: i64, radius_factor: f64) -> Dyadic {
    let c = radius_factor * (1.0 / beta).ln();
    // The extra unit covers the rounding error of `ln`.
    let num = (c * 4_294_967_296.0).ceil() as i64 + 1;
    Dyadic::new(num, 32 + eps_exp)
}

/// Counts Laplace draws with `|sample - mu|` beyond the radius and checks the
/// exceedance frequency against `beta` plus five standard errors.
pub fn laplace_accuracy_check(
    spec: &LaplaceAccuracySpec,
    seed: u64,
    jobs: usize,
) -> Result<ConformanceReport> {
    if !(spec.beta > 0.0 && spec.beta < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "beta {} is not in (0, 1)",
            spec.beta
        )));
    }
    if (spec.trials as f64) * spec.beta < 10.0 {
        return Err(Error::InvalidParameter(format!(
            "{} trials at beta {} expect fewer than 10 exceedances",
            spec.trials, spec.beta
        )));
    }
    let radius = accuracy_radius(spec.beta, spec.eps_exp, spec.radius_factor);
    let upper = radius.clone();
    let lower = Dyadic::new(-radius.num.clone(), radius.exp);
    let parts = sharded(seed, spec.trials, jobs, |src, n| {
        let mu = spec.mu.to_creal();
        let neg_mu = -&mu;
        let mut t = Tally::default();
        for _ in 0..n {
            let sample = samplers::laplace(src, spec.eps_exp, &mu)?;
            let diff = &sample + &neg_mu;
            let above = checker(&diff, &upper, CHECKER_MAX_PRECISION, src);
            let outside = match above {
                Ok(Ordering::Greater) => Ok(true),
                Ok(_) => match checker(&diff, &lower, CHECKER_MAX_PRECISION, src) {
                    Ok(ord) => Ok(ord == Ordering::Less),
                    Err(e) => Err(e),
                },
                Err(e) => Err(e),
            };
            match outside {
                Ok(true) => t.hits += 1,
                Ok(false) => t.misses += 1,
                Err(Error::Undecided { .. }) => t.undecided += 1,
                Err(e) => return Err(e),
            }
        }
        Ok(t)
    })?;
    let t = Tally::merge(parts);
    let n = t.decided().max(1) as f64;
    let statistic = t.hits as f64 / n;
    let threshold = spec.beta + 5.0 * (spec.beta * (1.0 - spec.beta) / n).sqrt();
    Ok(ConformanceReport {
        name: spec.name.clone(),
        observed: BTreeMap::from([("outside".into(), t.hits), ("inside".into(), t.misses)]),
        statistic,
        threshold,
        pass: statistic <= threshold && t.undecided_ok(spec.trials),
        seed,
        trials: spec.trials,
        undecided: t.undecided,
    })
}

pub(crate) fn dyadic_int(n: i64) -> Dyadic {
    Dyadic::new(BigInt::from(n), 0)
}
