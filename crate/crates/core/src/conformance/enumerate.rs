//! Exact outcome probabilities by exhausting every entropy tape of a given
//! length.
//!
//! A sampler run on a finite tape either finishes or runs out of bits. Over
//! all `2^depth` tapes, each finished outcome collects the exact dyadic mass
//! of the tapes that produce it, and the tapes that run dry make up the
//! residual. The true probability of an outcome therefore lies in
//! `[lower, lower + residual]`, and the masses always sum to exactly one.
//!
//! Tapes are explored as a prefix tree: a run that finishes after reading
//! `k` bits accounts for all `2^(depth - k)` tapes sharing that prefix in one
//! go, so the work is proportional to the number of distinct executions
//! rather than to `2^depth`.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::entropy::{Bit, BitSource, TapeSource};
use crate::error::{Error, Result};
use crate::lazyreal::LazyUniform;
use crate::samplers;

/// Deepest supported enumeration.
pub const MAX_DEPTH: u32 = 28;

/// An exact probability `num / 2^depth`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mass {
    pub num: u64,
    pub depth: u32,
}

impl Mass {
    pub fn zero(depth: u32) -> Self {
        Self { num: 0, depth }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / (1u64 << self.depth) as f64
    }
}

impl fmt::Display for Mass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.depth)
    }
}

/// A value produced by a discrete sampler.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Outcome {
    Bool(bool),
    Int(i64),
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Bool(b) => write!(f, "{b}"),
            Outcome::Int(n) => write!(f, "{n}"),
        }
    }
}

/// Samplers with a discrete result, addressable by the conformance suite
/// and the enumerator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscreteSampler {
    /// Bernoulli `e^-1/2`.
    HalfExp,
    /// Integer part of the half-normal.
    GaussianInt,
    /// `-1 / 0 / 1` with probabilities `1/m, 1/m, (m-2)/m`.
    Choose3 { m: u64 },
    /// All of `n` fair coin flips come up heads.
    AllOfFair { n: u64 },
    /// Integer part of a standard exponential.
    NegExpInt,
    /// Decreasing run from a deviate whose leading bits are fixed; the rest
    /// of the deviate is drawn from the tape.
    DecreasingTrial { x_prefix: Vec<Bit> },
}

impl DiscreteSampler {
    pub fn draw<S: BitSource + ?Sized>(&self, src: &mut S) -> Result<Outcome> {
        Ok(match self {
            Self::HalfExp => Outcome::Bool(samplers::bernoulli_half_exp(src)?),
            Self::GaussianInt => Outcome::Int(samplers::gaussian_int(src)? as i64),
            Self::Choose3 { m } => Outcome::Int(samplers::choose3(src, *m)?.into()),
            Self::AllOfFair { n } => Outcome::Bool(samplers::all_of(src, |s| s.next_bit(), *n)?),
            Self::NegExpInt => Outcome::Int(samplers::neg_exponential(src)?.k as i64),
            Self::DecreasingTrial { x_prefix } => {
                let x = LazyUniform::with_prefix(x_prefix.clone());
                Outcome::Int(samplers::decreasing_trial(src, 0, &x)? as i64)
            }
        })
    }

    pub fn name(&self) -> String {
        match self {
            Self::HalfExp => "half-exp".into(),
            Self::GaussianInt => "gaussian-int".into(),
            Self::Choose3 { m } => format!("choose3(m={m})"),
            Self::AllOfFair { n } => format!("all-of-fair(n={n})"),
            Self::NegExpInt => "exponential-int".into(),
            Self::DecreasingTrial { x_prefix } => {
                let bits: String = x_prefix
                    .iter()
                    .map(|&b| if b { '1' } else { '0' })
                    .collect();
                format!("decreasing-trial(x=0.{bits}...)")
            }
        }
    }
}

/// Exact probability bounds for one outcome.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MassBracket {
    pub outcome: Outcome,
    pub lower: Mass,
    pub residual: Mass,
}

impl MassBracket {
    /// Whether `p` lies in `[lower, lower + residual]`. Exact for any `f64`.
    pub fn contains(&self, p: f64) -> bool {
        let scaled = p * (1u64 << self.lower.depth) as f64;
        self.lower.num as f64 <= scaled && scaled <= (self.lower.num + self.residual.num) as f64
    }

    pub fn upper(&self) -> Mass {
        Mass {
            num: self.lower.num + self.residual.num,
            depth: self.lower.depth,
        }
    }
}

/// The result of exhausting all tapes of one length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enumeration {
    pub depth: u32,
    pub brackets: Vec<MassBracket>,
    pub residual: Mass,
}

impl Enumeration {
    pub fn bracket(&self, outcome: Outcome) -> Option<&MassBracket> {
        self.brackets.iter().find(|b| b.outcome == outcome)
    }

    /// Lower bound for an outcome the enumeration never reached is zero.
    pub fn bracket_or_empty(&self, outcome: Outcome) -> MassBracket {
        self.bracket(outcome).cloned().unwrap_or(MassBracket {
            outcome,
            lower: Mass::zero(self.depth),
            residual: self.residual,
        })
    }

    /// `sum(lower) + residual`, which is always exactly `2^depth`.
    pub fn total(&self) -> u64 {
        self.brackets.iter().map(|b| b.lower.num).sum::<u64>() + self.residual.num
    }
}

/// Runs `sampler` over every tape of `depth` bits.
pub fn enumerate_exact(sampler: &DiscreteSampler, depth: u32) -> Result<Enumeration> {
    enumerate_with(|src| sampler.draw(src), depth)
}

/// [`enumerate_exact`] for an arbitrary deterministic function of a tape.
pub fn enumerate_with<F>(mut run: F, depth: u32) -> Result<Enumeration>
where
    F: FnMut(&mut TapeSource) -> Result<Outcome>,
{
    if depth > MAX_DEPTH {
        return Err(Error::InvalidParameter(format!(
            "enumeration depth {depth} exceeds {MAX_DEPTH}"
        )));
    }
    let mut lower: BTreeMap<Outcome, u64> = BTreeMap::new();
    let mut residual = 0u64;
    let mut pending: Vec<Vec<Bit>> = vec![Vec::new()];
    while let Some(prefix) = pending.pop() {
        let len = prefix.len() as u32;
        let mut tape = TapeSource::new(prefix.clone());
        match run(&mut tape) {
            Ok(outcome) => {
                debug_assert_eq!(tape.remaining(), 0);
                *lower.entry(outcome).or_default() += 1u64 << (depth - len);
            }
            Err(Error::Exhausted) if len < depth => {
                let mut zero = prefix;
                let mut one = zero.clone();
                zero.push(false);
                one.push(true);
                pending.push(one);
                pending.push(zero);
            }
            Err(Error::Exhausted) => residual += 1,
            Err(other) => return Err(other),
        }
    }
    let residual = Mass {
        num: residual,
        depth,
    };
    let brackets = lower
        .into_iter()
        .map(|(outcome, num)| MassBracket {
            outcome,
            lower: Mass { num, depth },
            residual,
        })
        .collect();
    Ok(Enumeration {
        depth,
        brackets,
        residual,
    })
}
