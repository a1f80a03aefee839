//! The named checks run by `exact-rand check`.

use std::collections::BTreeMap;

use super::checks::{
    cdf_check, check_seed, dyadic_int, laplace_accuracy_check, rate_check, unit_samples,
    CdfCheckSpec, ContinuousSampler, LaplaceAccuracySpec, RateEvent, UnitSampler,
};
use super::constants::*;
use super::enumerate::{enumerate_exact, DiscreteSampler, Outcome};
use super::report::ConformanceReport;
use super::stats::{chi_square_check, ks_check, tally};
use crate::creal::{Decimal, Dyadic};
use crate::error::Result;

/// Target CDFs for the KS check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KsTarget {
    /// `F(x) = x`.
    Identity,
    /// `F(x) = x^2`.
    Square,
}

impl KsTarget {
    pub fn cdf(self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Square => x * x,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CheckKind {
    Cdf(CdfCheckSpec),
    Rate {
        event: RateEvent,
        expected: f64,
        trials: u64,
    },
    /// Chi-square of a discrete sampler's integer outcomes. The last entry
    /// of `pmf` is the mass of everything at or above its index.
    ChiSquare {
        sampler: DiscreteSampler,
        pmf: Vec<f64>,
        trials: u64,
    },
    /// Every listed probability must fall inside its exact bracket.
    Enumerate {
        sampler: DiscreteSampler,
        depth: u32,
        expected: Vec<(Outcome, f64)>,
    },
    Ks {
        sampler: UnitSampler,
        target: KsTarget,
        bits: u32,
        trials: u64,
    },
    LaplaceAccuracy(LaplaceAccuracySpec),
}

/// A named check. Negative controls are expected to fail.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub kind: CheckKind,
    pub expect_fail: bool,
}

impl Check {
    fn new(name: impl Into<String>, kind: CheckKind) -> Self {
        Self {
            name: name.into(),
            kind,
            expect_fail: false,
        }
    }

    fn control(name: impl Into<String>, kind: CheckKind) -> Self {
        Self {
            name: name.into(),
            kind,
            expect_fail: true,
        }
    }

    /// Whether `filter` selects this check: an exact match, or a family
    /// prefix such as `gaussian-cdf` for `gaussian-cdf[1/2^0]`.
    pub fn matches(&self, filter: &str) -> bool {
        self.name == filter
            || self
                .name
                .strip_prefix(filter)
                .is_some_and(|rest| rest.starts_with('['))
    }

    /// The trial count the check runs with by default, if it samples.
    pub fn trials(&self) -> Option<u64> {
        match &self.kind {
            CheckKind::Cdf(spec) => Some(spec.trials),
            CheckKind::Rate { trials, .. }
            | CheckKind::ChiSquare { trials, .. }
            | CheckKind::Ks { trials, .. } => Some(*trials),
            CheckKind::Enumerate { .. } => None,
            CheckKind::LaplaceAccuracy(spec) => Some(spec.trials),
        }
    }

    /// A copy with the trial count replaced. Enumerations are unaffected.
    pub fn with_trials(&self, n: u64) -> Check {
        let mut c = self.clone();
        match &mut c.kind {
            CheckKind::Cdf(spec) => spec.trials = n,
            CheckKind::Rate { trials, .. }
            | CheckKind::ChiSquare { trials, .. }
            | CheckKind::Ks { trials, .. } => *trials = n,
            CheckKind::Enumerate { .. } => {}
            CheckKind::LaplaceAccuracy(spec) => spec.trials = n,
        }
        c
    }

    /// Runs the check with the seed derived from `master_seed` and its name.
    pub fn run(&self, master_seed: u64, jobs: usize) -> Result<ConformanceReport> {
        let seed = check_seed(master_seed, &self.name);
        match &self.kind {
            CheckKind::Cdf(spec) => {
                let spec = CdfCheckSpec {
                    name: self.name.clone(),
                    ..spec.clone()
                };
                cdf_check(&spec, seed, jobs)
            }
            CheckKind::Rate {
                event,
                expected,
                trials,
            } => rate_check(&self.name, *event, *expected, *trials, seed, jobs),
            CheckKind::ChiSquare {
                sampler,
                pmf,
                trials,
            } => {
                let bins = pmf.len();
                let parts = super::checks::sharded(seed, *trials, jobs, |src, n| {
                    let mut values = Vec::with_capacity(n as usize);
                    for _ in 0..n {
                        values.push(outcome_index(sampler.draw(src)?));
                    }
                    Ok(tally(values, bins))
                })?;
                let mut counts = vec![0u64; bins];
                for part in parts {
                    for (c, p) in counts.iter_mut().zip(part) {
                        *c += p;
                    }
                }
                chi_square_check(&self.name, &counts, pmf, None, seed)
            }
            CheckKind::Enumerate {
                sampler,
                depth,
                expected,
            } => {
                let e = enumerate_exact(sampler, *depth)?;
                let mut observed = BTreeMap::new();
                let mut misses = 0u64;
                for (outcome, p) in expected {
                    let b = e.bracket_or_empty(*outcome);
                    observed.insert(format!("{outcome}.lower"), b.lower.num);
                    if !b.contains(*p) {
                        misses += 1;
                    }
                }
                observed.insert("residual".into(), e.residual.num);
                Ok(ConformanceReport {
                    name: self.name.clone(),
                    observed,
                    statistic: misses as f64,
                    threshold: 0.0,
                    pass: misses == 0,
                    seed: 0,
                    trials: 1u64 << depth,
                    undecided: 0,
                })
            }
            CheckKind::Ks {
                sampler,
                target,
                bits,
                trials,
            } => {
                let samples = unit_samples(*sampler, *trials, *bits, seed, jobs)?;
                ks_check(&self.name, &samples, *bits, &|x| target.cdf(x), None, seed)
            }
            CheckKind::LaplaceAccuracy(spec) => {
                let spec = LaplaceAccuracySpec {
                    name: self.name.clone(),
                    ..spec.clone()
                };
                laplace_accuracy_check(&spec, seed, jobs)
            }
        }
    }

    /// Whether a report counts as success for this check, taking negative
    /// controls into account.
    pub fn succeeded(&self, report: &ConformanceReport) -> bool {
        report.pass != self.expect_fail
    }
}

fn outcome_index(o: Outcome) -> u64 {
    match o {
        Outcome::Bool(b) => u64::from(b),
        Outcome::Int(n) => n.max(0) as u64,
    }
}

fn point_label(d: &Dyadic) -> String {
    format!("[{}/2^{}]", d.num, d.exp)
}

fn gaussian_int_pmf() -> Vec<f64> {
    vec![
        GAUSSIAN_INT_PMF[0],
        GAUSSIAN_INT_PMF[1],
        GAUSSIAN_INT_PMF[2],
        GAUSSIAN_INT_TAIL_3,
    ]
}

fn neg_exp_int_pmf() -> Vec<f64> {
    let mut pmf = NEG_EXP_INT_PMF.to_vec();
    pmf.push(NEG_EXP_INT_TAIL_5);
    pmf
}

fn laplace_accuracy(beta: f64, eps_exp: i64, radius_factor: f64) -> LaplaceAccuracySpec {
    LaplaceAccuracySpec {
        name: String::new(),
        eps_exp,
        mu: Decimal::zero(),
        beta,
        trials: 100_000,
        radius_factor,
    }
}

/// The checks that must pass.
pub fn default_suite() -> Vec<Check> {
    let mut suite = vec![
        Check::new(
            "uniform-ks",
            CheckKind::Ks {
                sampler: UnitSampler::Uniform,
                target: KsTarget::Identity,
                bits: 8,
                trials: 10_000,
            },
        ),
        Check::new(
            "max2-ks",
            CheckKind::Ks {
                sampler: UnitSampler::Max2,
                target: KsTarget::Square,
                bits: 8,
                trials: 10_000,
            },
        ),
        Check::new(
            "max2-first-bit",
            CheckKind::Rate {
                event: RateEvent::Max2FirstBit,
                expected: 0.75,
                trials: 100_000,
            },
        ),
        Check::new(
            "all-of-fair-enumerate",
            CheckKind::Enumerate {
                sampler: DiscreteSampler::AllOfFair { n: 2 },
                depth: 2,
                expected: vec![(Outcome::Bool(true), 0.25), (Outcome::Bool(false), 0.75)],
            },
        ),
        Check::new(
            "choose3-enumerate",
            CheckKind::Enumerate {
                sampler: DiscreteSampler::Choose3 { m: 5 },
                depth: 16,
                expected: vec![
                    (Outcome::Int(-1), 0.2),
                    (Outcome::Int(0), 0.2),
                    (Outcome::Int(1), 0.6),
                ],
            },
        ),
        Check::new(
            "half-exp-enumerate",
            CheckKind::Enumerate {
                sampler: DiscreteSampler::HalfExp,
                depth: 24,
                expected: vec![
                    (Outcome::Bool(true), EXP_MINUS_HALF),
                    (Outcome::Bool(false), 1.0 - EXP_MINUS_HALF),
                ],
            },
        ),
        Check::new(
            "half-exp-rate",
            CheckKind::Rate {
                event: RateEvent::HalfExp,
                expected: EXP_MINUS_HALF,
                trials: 1_000_000,
            },
        ),
        Check::new(
            "gaussian-int-enumerate",
            CheckKind::Enumerate {
                sampler: DiscreteSampler::GaussianInt,
                depth: 20,
                expected: (0..3)
                    .map(|k| (Outcome::Int(k), GAUSSIAN_INT_PMF[k as usize]))
                    .collect(),
            },
        ),
        Check::new(
            "gaussian-int-chi2",
            CheckKind::ChiSquare {
                sampler: DiscreteSampler::GaussianInt,
                pmf: gaussian_int_pmf(),
                trials: 100_000,
            },
        ),
        Check::new(
            "exponential-k0",
            CheckKind::Rate {
                event: RateEvent::ExponentialIntZero,
                expected: ONE_MINUS_EXP_MINUS_ONE,
                trials: 100_000,
            },
        ),
        Check::new(
            "exponential-int-chi2",
            CheckKind::ChiSquare {
                sampler: DiscreteSampler::NegExpInt,
                pmf: neg_exp_int_pmf(),
                trials: 100_000,
            },
        ),
        Check::new(
            "exponential-cdf[1/2^0]",
            CheckKind::Cdf(CdfCheckSpec::new(
                "",
                ContinuousSampler::Exponential,
                dyadic_int(1),
                10_000,
                ONE_MINUS_EXP_MINUS_ONE,
            )),
        ),
        Check::new(
            "half-gaussian-cdf[1/2^0]",
            CheckKind::Cdf(CdfCheckSpec::new(
                "",
                ContinuousSampler::HalfGaussian,
                dyadic_int(1),
                10_000,
                HALF_NORMAL_BELOW_ONE,
            )),
        ),
    ];
    for (num, exp, phi) in NORMAL_CDF {
        let point = Dyadic::new(num, exp);
        suite.push(Check::new(
            format!("gaussian-cdf{}", point_label(&point)),
            CheckKind::Cdf(CdfCheckSpec::new(
                "",
                ContinuousSampler::Gaussian,
                point,
                10_000,
                phi,
            )),
        ));
    }
    for (eps_exp, point, f) in LAPLACE_CDF {
        let sampler = ContinuousSampler::Laplace {
            eps_exp,
            mu: Decimal::zero(),
        };
        suite.push(Check::new(
            format!("laplace-cdf[eps_exp={eps_exp},{point}/2^0]"),
            CheckKind::Cdf(CdfCheckSpec::new("", sampler, dyadic_int(point), 10_000, f)),
        ));
    }
    suite.push(Check::new(
        "laplace-cdf[eps_exp=1,mu=2,2/2^0]",
        CheckKind::Cdf(CdfCheckSpec::new(
            "",
            ContinuousSampler::Laplace {
                eps_exp: 1,
                mu: "2".parse().expect("literal"),
            },
            dyadic_int(2),
            10_000,
            0.5,
        )),
    ));
    for (beta, eps_exp) in [(0.1, 0), (0.01, 1)] {
        suite.push(Check::new(
            format!("laplace-accuracy[beta={beta},eps_exp={eps_exp}]"),
            CheckKind::LaplaceAccuracy(laplace_accuracy(beta, eps_exp, 1.0)),
        ));
    }
    suite
}

/// Deliberately wrong targets. Each must be rejected at the same thresholds
/// the real checks use.
pub fn negative_controls() -> Vec<Check> {
    let mut shifted = vec![0.0];
    let pmf = gaussian_int_pmf();
    shifted.extend_from_slice(&pmf[..pmf.len() - 2]);
    shifted.push(pmf[pmf.len() - 2] + pmf[pmf.len() - 1]);
    let mut controls = vec![
        Check::control(
            "control:gaussian-int-chi2-shifted",
            CheckKind::ChiSquare {
                sampler: DiscreteSampler::GaussianInt,
                pmf: shifted,
                trials: 100_000,
            },
        ),
        Check::control(
            "control:uniform-ks-square",
            CheckKind::Ks {
                sampler: UnitSampler::Uniform,
                target: KsTarget::Square,
                bits: 8,
                trials: 10_000,
            },
        ),
        Check::control(
            "control:max2-ks-identity",
            CheckKind::Ks {
                sampler: UnitSampler::Max2,
                target: KsTarget::Identity,
                bits: 8,
                trials: 10_000,
            },
        ),
        Check::control(
            "control:gaussian-cdf-wrong",
            CheckKind::Cdf(CdfCheckSpec::new(
                "",
                ContinuousSampler::Gaussian,
                dyadic_int(1),
                10_000,
                0.5,
            )),
        ),
        Check::control(
            "control:half-exp-enumerate-half",
            CheckKind::Enumerate {
                sampler: DiscreteSampler::HalfExp,
                depth: 16,
                expected: vec![(Outcome::Bool(true), 0.5)],
            },
        ),
    ];
    for (beta, eps_exp) in [(0.1, 0), (0.01, 1)] {
        controls.push(Check::control(
            format!("control:laplace-accuracy-halved[beta={beta},eps_exp={eps_exp}]"),
            CheckKind::LaplaceAccuracy(laplace_accuracy(beta, eps_exp, 0.5)),
        ));
    }
    controls
}

/// Every check by name, positive and negative.
pub fn all_checks() -> Vec<Check> {
    let mut all = default_suite();
    all.extend(negative_controls());
    all
}

/// Runs `checks` in order and returns their reports.
pub fn run_suite(
    checks: &[Check],
    master_seed: u64,
    jobs: usize,
) -> Result<Vec<ConformanceReport>> {
    checks.iter().map(|c| c.run(master_seed, jobs)).collect()
}
