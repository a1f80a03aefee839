//! Acceptance criteria. Runs as a plain binary so that every criterion
//! prints its own verdict line under `cargo test`.

use std::io::Write;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use exact_rand::conformance::constants::EXP_MINUS_HALF;
use exact_rand::conformance::{
    all_checks, default_suite, enumerate_exact, run_suite, Check, ConformanceReport,
    DiscreteSampler, Outcome, DEFAULT_SEED,
};
use exact_rand::creal::to_decimal;
use exact_rand::entropy::{BitSource, RecordingSource, SeededSource};
use exact_rand::lazyreal::{max2, LazyUniform};
use exact_rand::samplers::{gaussian, laplace, neg_exponential};
use exact_rand::{CReal, Decimal, Result};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn named(name: &str) -> Check {
    all_checks()
        .into_iter()
        .find(|c| c.name == name)
        .unwrap_or_else(|| panic!("no check {name}"))
}

fn family(prefix: &str) -> Vec<Check> {
    default_suite()
        .into_iter()
        .filter(|c| c.matches(prefix))
        .collect()
}

fn summarize(checks: &[Check], reports: &[ConformanceReport]) -> (bool, String) {
    let ok = checks.iter().zip(reports).all(|(c, r)| c.succeeded(r));
    let parts: Vec<String> = reports
        .iter()
        .map(|r| format!("{}: {:.4} vs {:.4}", r.name, r.statistic, r.threshold))
        .collect();
    (ok, parts.join("; "))
}

// ---------------------------------------------------------------------------
// 1. Approximation contract on random expression trees.

/// A source of zero bits: a deviate with a forced prefix then evaluates to
/// exactly that prefix.
struct Zeros;

impl BitSource for Zeros {
    fn next_bit(&mut self) -> Result<bool> {
        Ok(false)
    }
}

/// An exact rational `n / d` with `d > 0`.
#[derive(Clone)]
struct Q {
    n: BigInt,
    d: BigInt,
}

impl Q {
    fn int(n: i64) -> Q {
        Q {
            n: n.into(),
            d: 1.into(),
        }
    }

    fn add(&self, o: &Q) -> Q {
        Q {
            n: &self.n * &o.d + &o.n * &self.d,
            d: &self.d * &o.d,
        }
    }

    fn neg(&self) -> Q {
        Q {
            n: -&self.n,
            d: self.d.clone(),
        }
    }

    fn div_pow2(&self, z: i64) -> Q {
        if z >= 0 {
            Q {
                n: self.n.clone(),
                d: &self.d << z as usize,
            }
        } else {
            Q {
                n: &self.n << (-z) as usize,
                d: self.d.clone(),
            }
        }
    }

    /// Whether `|a - self * 2^p| <= 1`.
    fn approximated_by(&self, a: &BigInt, p: i64) -> bool {
        if p >= 0 {
            (a * &self.d - (&self.n << p as usize)).abs() <= self.d
        } else {
            let s = (-p) as usize;
            ((a * &self.d) << s) - &self.n <= (&self.d << s)
                && &self.n - ((a * &self.d) << s) <= (&self.d << s)
        }
    }
}

struct Gen {
    rng: ChaCha8Rng,
    pool: Vec<(CReal, Option<Q>)>,
}

impl Gen {
    fn below(&mut self, n: u64) -> u64 {
        self.rng.next_u64() % n
    }

    fn range(&mut self, lo: i64, hi: i64) -> i64 {
        lo + self.below((hi - lo + 1) as u64) as i64
    }

    /// A random tree of depth at most `depth`. With `exact`, uniform leaves
    /// get a finite forced prefix and the exact value is returned alongside.
    fn tree(&mut self, depth: u32, exact: bool) -> (CReal, Option<Q>) {
        if !self.pool.is_empty() && self.below(8) == 0 {
            let i = self.below(self.pool.len() as u64) as usize;
            return self.pool[i].clone();
        }
        let leaf = depth == 0 || self.below(3) == 0;
        let node = if leaf {
            match self.below(4) {
                0 => {
                    let z = self.range(-1000, 1000);
                    (CReal::of_int(z), Some(Q::int(z)))
                }
                1 => {
                    let n = self.range(-1000, 1000);
                    let d = self.range(1, 997);
                    (
                        CReal::of_rational(n, d).unwrap(),
                        Some(Q {
                            n: n.into(),
                            d: d.into(),
                        }),
                    )
                }
                _ => {
                    let (u, q) = self.uniform(exact);
                    if self.below(2) == 0 {
                        (CReal::of_uniform(u), q)
                    } else {
                        let b = self.below(2) == 1;
                        let z = self.range(0, 50);
                        let q = q.map(|q| {
                            let v = Q::int(z).add(&q);
                            if b {
                                v.neg()
                            } else {
                                v
                            }
                        });
                        (CReal::of_bzu(b, z, u), q)
                    }
                }
            }
        } else {
            match self.below(3) {
                0 => {
                    let (x, qx) = self.tree(depth - 1, exact);
                    let (y, qy) = self.tree(depth - 1, exact);
                    let q = qx.zip(qy).map(|(a, b)| a.add(&b));
                    (&x + &y, q)
                }
                1 => {
                    let (x, qx) = self.tree(depth - 1, exact);
                    (-&x, qx.map(|q| q.neg()))
                }
                _ => {
                    let (x, qx) = self.tree(depth - 1, exact);
                    let z = self.range(-12, 12);
                    (x.scal_pow2(z), qx.map(|q| q.div_pow2(z)))
                }
            }
        };
        if self.pool.len() < 64 {
            self.pool.push(node.clone());
        } else {
            let i = self.below(64) as usize;
            self.pool[i] = node.clone();
        }
        node
    }

    fn uniform(&mut self, exact: bool) -> (LazyUniform, Option<Q>) {
        if !exact {
            return (LazyUniform::new(), None);
        }
        let len = self.below(90) as usize;
        let bits: Vec<bool> = (0..len).map(|_| self.below(2) == 1).collect();
        let n = bits
            .iter()
            .fold(BigInt::zero(), |acc, &b| (acc << 1usize) + u32::from(b));
        let q = Q {
            n,
            d: BigInt::from(1) << len,
        };
        (LazyUniform::with_prefix(bits), Some(q))
    }
}

fn criterion_1() -> Verdict {
    const TREES: usize = 10_000;
    let mut violations = 0usize;
    let (mut blind, mut nodes) = (0usize, 0usize);
    let mut first: Option<String> = None;

    // Reference approximant at P = p + 64 on fresh deviates:
    // |A 2^64 - A_P| <= 2^64 + 1.
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(1),
        pool: Vec::new(),
    };
    let mut src = SeededSource::new(2);
    let bound = (BigInt::from(1) << 64usize) + 1;
    for i in 0..TREES {
        let depth = gen.below(7) as u32;
        let (x, _) = gen.tree(depth, false);
        let p = gen.range(-8, 60);
        let a = x.approx(p, &mut src).unwrap();
        let reference = x.approx(p + 64, &mut src).unwrap();
        if ((a << 64usize) - reference).abs() > bound {
            violations += 1;
            first.get_or_insert(format!("reference tree {i} at p={p}"));
        }
    }

    // Exact rational oracle on deviates with finite forced prefixes:
    // |A - r 2^p| <= 1.
    let mut gen = Gen {
        rng: ChaCha8Rng::seed_from_u64(3),
        pool: Vec::new(),
    };
    for i in 0..TREES {
        let depth = gen.below(7) as u32;
        let (x, q) = gen.tree(depth, true);
        let q = q.expect("exact trees carry their value");
        for _ in 0..2 {
            let p = gen.range(-8, 60);
            let a = x.approx(p, &mut Zeros).unwrap();
            if !q.approximated_by(&a, p) {
                violations += 1;
                first.get_or_insert(format!("exact tree {i} at p={p}"));
            }
            // The oracle itself must reject an approximant that is off by 3.
            if q.approximated_by(&(&a + 3), p) || q.approximated_by(&(&a - 3), p) {
                blind += 1;
            }
            nodes += 1;
        }
    }
    let detail = match first {
        None => format!(
            "{} trees, 0 violations; oracle rejected all {nodes} perturbed approximants: {}",
            2 * TREES,
            blind == 0
        ),
        Some(at) => format!("{violations} violations, first: {at}"),
    };
    verdict(violations == 0 && blind == 0, detail)
}

// ---------------------------------------------------------------------------

fn criterion_2() -> Verdict {
    let e = enumerate_exact(&DiscreteSampler::HalfExp, 24).unwrap();
    let b = e.bracket_or_empty(Outcome::Bool(true));
    let bracketed = b.contains(EXP_MINUS_HALF) && e.total() == 1 << 24;
    let rate = named("half-exp-rate");
    let r = rate.run(DEFAULT_SEED, 1).unwrap();
    verdict(
        bracketed && rate.succeeded(&r) && r.trials == 1_000_000,
        format!(
            "bracket [{}, {}] contains {EXP_MINUS_HALF}: {bracketed}; rate z = {:.3} over {} draws",
            b.lower,
            b.upper(),
            r.statistic,
            r.trials
        ),
    )
}

fn criterion_3() -> Verdict {
    let c = named("gaussian-int-chi2");
    let r = c.run(DEFAULT_SEED, 1).unwrap();
    verdict(
        c.succeeded(&r) && r.trials == 100_000,
        format!(
            "chi2 = {:.3} <= {:.3}, bins {:?}",
            r.statistic, r.threshold, r.observed
        ),
    )
}

fn criterion_4() -> Verdict {
    let checks = family("gaussian-cdf");
    let reports = run_suite(&checks, DEFAULT_SEED, 1).unwrap();
    let undecided_ok = reports
        .iter()
        .all(|r| r.undecided as f64 <= 0.001 * r.trials as f64);
    let (ok, detail) = summarize(&checks, &reports);
    verdict(ok && undecided_ok && checks.len() == 7, detail)
}

fn criterion_5() -> Verdict {
    let c = named("exponential-k0");
    let r = c.run(DEFAULT_SEED, 1).unwrap();
    verdict(
        c.succeeded(&r),
        format!(
            "P(k=0) z = {:.3} over {} draws, counts {:?}",
            r.statistic, r.trials, r.observed
        ),
    )
}

fn criterion_6() -> Verdict {
    let checks: Vec<Check> = family("laplace-cdf")
        .into_iter()
        .filter(|c| !c.name.contains("mu="))
        .collect();
    let reports = run_suite(&checks, DEFAULT_SEED, 1).unwrap();
    let (ok, detail) = summarize(&checks, &reports);
    verdict(ok && checks.len() == 6, detail)
}

fn criterion_7() -> Verdict {
    let mut checks = family("laplace-accuracy");
    checks.extend(
        all_checks()
            .into_iter()
            .filter(|c| c.name.starts_with("control:laplace-accuracy-halved")),
    );
    let reports = run_suite(&checks, DEFAULT_SEED, 1).unwrap();
    let (ok, detail) = summarize(&checks, &reports);
    verdict(ok && checks.len() == 4, detail)
}

fn criterion_8() -> Verdict {
    let checks = vec![named("max2-ks"), named("control:uniform-ks-square")];
    let reports = run_suite(&checks, DEFAULT_SEED, 1).unwrap();
    let (ok, detail) = summarize(&checks, &reports);
    verdict(ok, detail)
}

fn render_run<S: BitSource>(src: &mut S) -> Vec<String> {
    let mut rows = Vec::new();
    let mu: Decimal = "-1.375".parse().unwrap();
    for _ in 0..40 {
        let g = gaussian(src).unwrap();
        rows.push(to_decimal(&g, 25, src).unwrap());
        let e = neg_exponential(src).unwrap();
        rows.push(to_decimal(&e.to_creal(), 9, src).unwrap());
        let l = laplace(src, -1, &mu.to_creal()).unwrap();
        rows.push(to_decimal(&l, 14, src).unwrap());
        let m = CReal::of_uniform(max2(src).unwrap());
        rows.push(to_decimal(&m, 5, src).unwrap());
    }
    rows
}

fn criterion_9() -> Verdict {
    let mut rec = RecordingSource::new(SeededSource::new(DEFAULT_SEED));
    let first = render_run(&mut rec);
    let mut tape = rec.replay();
    let replayed = render_run(&mut tape);
    let again = render_run(&mut SeededSource::new(DEFAULT_SEED));
    let replay_ok = first == replayed && first == again && tape.remaining() == 0;

    let start = Instant::now();
    let suite = default_suite();
    let reports = run_suite(&suite, DEFAULT_SEED, 1).unwrap();
    let elapsed = start.elapsed();
    let suite_ok = suite.iter().zip(&reports).all(|(c, r)| c.succeeded(r));
    let rerun = run_suite(&suite, DEFAULT_SEED, 1).unwrap();
    let stable = reports == rerun;
    let within_budget = elapsed <= Duration::from_secs(600);
    verdict(
        replay_ok && suite_ok && stable && within_budget,
        format!(
            "replay identical: {replay_ok}; {} suite checks pass: {suite_ok}; reports stable: {stable}; suite time {:.1}s",
            suite.len(),
            elapsed.as_secs_f64()
        ),
    )
}

/// Name, check and time budget in seconds.
type Criterion = (&'static str, fn() -> Verdict, u64);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("approximation contract on random trees", criterion_1, 60),
        ("e^-1/2 coin: exact bracket and rate", criterion_2, 60),
        ("gaussian integer part chi-square", criterion_3, 60),
        ("gaussian CDF at seven dyadic points", criterion_4, 300),
        ("exponential integer part P(k=0)", criterion_5, 600),
        ("laplace CDF", criterion_6, 600),
        (
            "laplace accuracy bound and halved-radius control",
            criterion_7,
            600,
        ),
        (
            "max of two uniforms KS and uniform control",
            criterion_8,
            600,
        ),
        ("determinism, replay and full suite", criterion_9, 600),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = run();
        let secs = start.elapsed().as_secs_f64();
        let pass = v.pass && secs <= *budget as f64;
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {} [{}] {name} ({secs:.2}s): {}",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            v.detail
        );
        std::io::stdout().flush().ok();
    }
    println!(
        "acceptance: {}/{} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
