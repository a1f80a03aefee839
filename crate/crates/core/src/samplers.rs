//! Exact samplers for the Gaussian, exponential and Laplace distributions.
//!
//! Everything here is built from fair bits and comparisons of lazy uniform
//! deviates; no floating-point value is ever produced. Continuous results
//! come back either as an integer part paired with a [`LazyUniform`]
//! fractional part, or as a [`CReal`].
//!
//! The building blocks follow von Neumann's observation that the length `n`
//! of a strictly decreasing run of uniforms started below `x` has
//! probability `x^n/n! - x^(n+1)/(n+1)!`. Parity of such runs yields
//! Bernoulli trials with parameters of the form `e^-f(x)`, which are then
//! combined by rejection.
//!
//! Every sampler draws fresh deviates from the source it is handed, in
//! program order, so a run is a pure function of its bit stream.

use std::cmp::Ordering;

use num_bigint::BigInt;

use crate::creal::CReal;
use crate::entropy::BitSource;
use crate::error::{Error, Result};
use crate::lazyreal::{cmp_uniform, le_half, LazyUniform};

/// A half-normal draw: the real `k + frac`, with joint density proportional
/// to `exp(-(k + x)^2 / 2)` on `N x [0, 1]`.
#[derive(Clone, Debug)]
pub struct HalfSample {
    pub k: u64,
    pub frac: LazyUniform,
}

/// A standard exponential draw: the real `k + frac`, with density
/// `exp(-(k + x))`.
#[derive(Clone, Debug)]
pub struct ExpSample {
    pub k: u64,
    pub frac: LazyUniform,
}

impl HalfSample {
    pub fn to_creal(&self) -> CReal {
        CReal::of_bzu(false, self.k, self.frac.clone())
    }
}

impl ExpSample {
    pub fn to_creal(&self) -> CReal {
        CReal::of_bzu(false, self.k, self.frac.clone())
    }
}

fn is_less(ord: Ordering) -> bool {
    ord == Ordering::Less
}

/// Extends a strictly decreasing run that starts at `x` with fresh deviates
/// and returns `n0` plus the number of extensions.
///
/// Given `x`, the result `n` has probability
/// `x^(n-n0)/(n-n0)! - x^(n-n0+1)/(n-n0+1)!` for `n >= n0`.
pub fn decreasing_trial<S: BitSource + ?Sized>(
    src: &mut S,
    n0: u64,
    x: &LazyUniform,
) -> Result<u64> {
    let mut n = n0;
    let mut last = x.clone();
    loop {
        let y = LazyUniform::new();
        if is_less(cmp_uniform(&y, &last, src)?) {
            n += 1;
            last = y;
        } else {
            return Ok(n);
        }
    }
}

/// A Bernoulli trial that succeeds with probability `e^-1/2`.
pub fn bernoulli_half_exp<S: BitSource + ?Sized>(src: &mut S) -> Result<bool> {
    let x = LazyUniform::new();
    if le_half(&x, src)? {
        Ok(decreasing_trial(src, 0, &x)? % 2 == 1)
    } else {
        Ok(true)
    }
}

/// Counts successes of `trial` before its first failure, starting from `n0`.
pub fn geometric<S, F>(src: &mut S, mut trial: F, n0: u64) -> Result<u64>
where
    S: BitSource + ?Sized,
    F: FnMut(&mut S) -> Result<bool>,
{
    let mut n = n0;
    while trial(src)? {
        n += 1;
    }
    Ok(n)
}

/// Runs `trial` up to `n` times and reports whether all of them succeeded.
/// Stops at the first failure; `n == 0` runs nothing.
pub fn all_of<S, F>(src: &mut S, mut trial: F, n: u64) -> Result<bool>
where
    S: BitSource + ?Sized,
    F: FnMut(&mut S) -> Result<bool>,
{
    for _ in 0..n {
        if !trial(src)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The integer part of a half-normal variate: `k >= 0` with probability
/// proportional to `e^(-k^2/2)`.
pub fn gaussian_int<S: BitSource + ?Sized>(src: &mut S) -> Result<u64> {
    loop {
        let k = geometric(src, |s| bernoulli_half_exp(s), 0)?;
        if all_of(src, |s| bernoulli_half_exp(s), k * k.saturating_sub(1))? {
            return Ok(k);
        }
    }
}

/// Returns -1 and 0 with probability `1/m` each, and 1 otherwise.
pub fn choose3<S: BitSource + ?Sized>(src: &mut S, m: u64) -> Result<i8> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "choose3 needs m >= 2, got {m}"
        )));
    }
    Ok(match src.rand_uniform(m - 1)? {
        0 => -1,
        1 => 0,
        _ => 1,
    })
}

/// A Bernoulli trial with success probability `(2 - x) / (2k + 2)`.
pub fn thin_bernoulli<S: BitSource + ?Sized>(src: &mut S, k: u64, x: &LazyUniform) -> Result<bool> {
    let f = choose3(src, 2 * k + 2)?;
    let r = LazyUniform::new();
    Ok(f == 0 || (f == -1 && is_less(cmp_uniform(x, &r, src)?)))
}

/// A decreasing run of deviates below `x`, thinned at every step by
/// [`thin_bernoulli`]. With `q = (2k + x) / (2k + 2)` the result `n` has
/// probability `(xq)^n/n! - (xq)^(n+1)/(n+1)!`.
pub fn thinned_trial<S: BitSource + ?Sized>(src: &mut S, k: u64, x: &LazyUniform) -> Result<u64> {
    let mut n = 0;
    let mut last = x.clone();
    loop {
        let z = LazyUniform::new();
        if is_less(cmp_uniform(&last, &z, src)?) || thin_bernoulli(src, k, x)? {
            return Ok(n);
        }
        n += 1;
        last = z;
    }
}

/// A Bernoulli trial with success probability `e^(-x(2k + x)/(2k + 2))`.
pub fn bernoulli_exp_frac<S: BitSource + ?Sized>(
    src: &mut S,
    k: u64,
    x: &LazyUniform,
) -> Result<bool> {
    Ok(thinned_trial(src, k, x)? % 2 == 0)
}

/// A draw from the half-normal distribution on `[0, inf)`.
pub fn half_gaussian<S: BitSource + ?Sized>(src: &mut S) -> Result<HalfSample> {
    loop {
        let k = gaussian_int(src)?;
        let x = LazyUniform::new();
        if all_of(src, |s| bernoulli_exp_frac(s, k, &x), k + 1)? {
            return Ok(HalfSample { k, frac: x });
        }
    }
}

/// A standard normal variate.
pub fn gaussian<S: BitSource + ?Sized>(src: &mut S) -> Result<CReal> {
    let HalfSample { k, frac } = half_gaussian(src)?;
    let sign = src.next_bit()?;
    Ok(CReal::of_bzu(sign, k, frac))
}

/// A standard exponential variate, split into integer and fractional parts.
pub fn neg_exponential<S: BitSource + ?Sized>(src: &mut S) -> Result<ExpSample> {
    let mut k = 0;
    loop {
        let x = LazyUniform::new();
        if decreasing_trial(src, 0, &x)? % 2 == 0 {
            return Ok(ExpSample { k, frac: x });
        }
        k += 1;
    }
}

/// A Laplace variate with location `mu` and rate `2^eps_exp`, i.e. density
/// `(e/2) exp(-e |x - mu|)` with `e = 2^eps_exp`.
pub fn laplace<S: BitSource + ?Sized>(src: &mut S, eps_exp: i64, mu: &CReal) -> Result<CReal> {
    let ExpSample { k, frac } = neg_exponential(src)?;
    let sign = src.next_bit()?;
    let symmetric = CReal::of_bzu(sign, BigInt::from(k), frac);
    Ok(mu + &symmetric.scal_pow2(eps_exp))
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use crate::creal::{checker, Dyadic};
    use crate::entropy::{RecordingSource, SeededSource, TapeSource};
    use num_traits::ToPrimitive;

    // Reference values computed with mpmath at 30 digits.
    const EXP_MINUS_HALF: f64 = 0.606530659712633424;
    const EXP_MINUS_ONE: f64 = 0.367879441171442322;
    const EXP_MINUS_3_8: f64 = 0.687289278790972199;
    const E_MINUS_ONE: f64 = 1.718281828459045235;
    const HALF_GEOMETRIC_MEAN: f64 = 1.541494082536798284;
    const HALF_NORMAL_BELOW_ONE: f64 = 0.682689492137085897;

    fn z_score(hits: u64, trials: u64, p: f64) -> f64 {
        let sd = (trials as f64 * p * (1.0 - p)).sqrt();
        (hits as f64 - trials as f64 * p).abs() / sd
    }

    fn rate<F>(seed: u64, trials: u64, p: f64, mut event: F)
    where
        F: FnMut(&mut SeededSource) -> bool,
    {
        let mut src = SeededSource::new(seed);
        let hits = (0..trials).filter(|_| event(&mut src)).count() as u64;
        let z = z_score(hits, trials, p);
        assert!(
            z <= 5.0,
            "rate {} vs {p}: z = {z}",
            hits as f64 / trials as f64
        );
    }

    /// `1` then `zeros` zero bits: a deviate pinned just above one half.
    fn near_half(zeros: usize) -> LazyUniform {
        let mut bits = vec![true];
        bits.extend(std::iter::repeat_n(false, zeros));
        LazyUniform::with_prefix(bits)
    }

    fn near(value_bit: bool, len: usize) -> LazyUniform {
        LazyUniform::with_prefix(vec![value_bit; len])
    }

    #[test]
    fn decreasing_trial_never_below_start() {
        let mut src = SeededSource::new(1);
        for n0 in [0, 3, 17] {
            for _ in 0..1_000 {
                let x = LazyUniform::new();
                assert!(decreasing_trial(&mut src, n0, &x).unwrap() >= n0);
            }
        }
    }

    #[test]
    fn decreasing_trial_mean_near_one() {
        // At x = 1 the run length has mean e - 1; x pinned within 2^-40 of 1.
        let mut src = SeededSource::new(2);
        let trials = 100_000;
        let lengths: Vec<f64> = (0..trials)
            .map(|_| decreasing_trial(&mut src, 5, &near(true, 40)).unwrap() as f64 - 5.0)
            .collect();
        let mean = lengths.iter().sum::<f64>() / trials as f64;
        let var = lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / trials as f64;
        let z = (mean - E_MINUS_ONE).abs() / (var / trials as f64).sqrt();
        assert!(z <= 5.0, "mean {mean}");
    }

    #[test]
    fn bernoulli_half_exp_shortcut_above_half() {
        // First bit 1: x > 1/2 and the trial succeeds after a single bit.
        let mut tape = TapeSource::new(vec![true]);
        assert_eq!(bernoulli_half_exp(&mut tape), Ok(true));
        assert_eq!(tape.consumed(), 1);
    }

    #[test]
    fn bernoulli_half_exp_rate() {
        rate(3, 1_000_000, EXP_MINUS_HALF, |s| {
            bernoulli_half_exp(s).unwrap()
        });
    }

    #[test]
    fn geometric_edge_cases_and_law() {
        let mut src = SeededSource::new(4);
        assert_eq!(geometric(&mut src, |_| Ok(false), 7), Ok(7));

        let trials = 100_000u64;
        let mut counts = [0u64; 7];
        for _ in 0..trials {
            let n = geometric(&mut src, |s| s.next_bit(), 2).unwrap() - 2;
            if let Some(c) = counts.get_mut(n as usize) {
                *c += 1;
            }
        }
        for (k, &c) in counts.iter().enumerate() {
            let p = 0.5f64.powi(k as i32 + 1);
            assert!(z_score(c, trials, p) <= 5.0, "k={k} count={c}");
        }
    }

    #[test]
    fn geometric_of_half_exp_mean() {
        let mut src = SeededSource::new(5);
        let trials = 100_000;
        let draws: Vec<f64> = (0..trials)
            .map(|_| geometric(&mut src, bernoulli_half_exp, 0).unwrap() as f64)
            .collect();
        let mean = draws.iter().sum::<f64>() / trials as f64;
        let p = EXP_MINUS_HALF;
        let sd = (p / (1.0 - p).powi(2) / trials as f64).sqrt();
        assert!(
            (mean - HALF_GEOMETRIC_MEAN).abs() <= 5.0 * sd,
            "mean {mean}"
        );
    }

    #[test]
    fn all_of_cases() {
        let mut empty = TapeSource::default();
        let mut calls = 0;
        let r = all_of(
            &mut empty,
            |_| {
                calls += 1;
                Ok(true)
            },
            0,
        );
        assert_eq!((r, calls), (Ok(true), 0));
        assert_eq!(all_of(&mut empty, |_| Ok(false), 1), Ok(false));
        rate(6, 100_000, EXP_MINUS_ONE, |s| {
            all_of(s, bernoulli_half_exp, 2).unwrap()
        });
    }

    #[test]
    fn gaussian_int_accepts_zero_without_acceptance_trials() {
        // x = 0.0... takes the run branch; y = 0.1... > x ends the run at
        // length 0, so H fails, k = 0 and no acceptance trial is drawn.
        let mut tape = TapeSource::new(vec![false, true]);
        assert_eq!(gaussian_int(&mut tape), Ok(0));
        assert_eq!(tape.consumed(), 2);
    }

    #[test]
    fn gaussian_int_tail_is_negligible() {
        let mut src = SeededSource::new(7);
        let big = (0..100_000)
            .filter(|_| gaussian_int(&mut src).unwrap() >= 6)
            .count();
        assert!(big <= 10, "{big}");
    }

    #[test]
    fn choose3_cases() {
        let mut src = SeededSource::new(8);
        assert!(choose3(&mut src, 1).is_err());
        assert!(choose3(&mut src, 0).is_err());
        for _ in 0..10_000 {
            assert_ne!(choose3(&mut src, 2).unwrap(), 1);
        }
        let trials = 100_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..trials {
            counts[(choose3(&mut src, 4).unwrap() + 1) as usize] += 1;
        }
        for (c, p) in counts.iter().zip([0.25, 0.25, 0.5]) {
            assert!(z_score(*c, trials, p) <= 5.0, "{counts:?}");
        }
    }

    #[test]
    fn thin_bernoulli_rates() {
        // (2 - x) / (2k + 2) for x pinned near 0, 1 and 1/2.
        let mut src = SeededSource::new(9);
        let misses = (0..100_000)
            .filter(|_| !thin_bernoulli(&mut src, 0, &near(false, 40)).unwrap())
            .count();
        assert_eq!(misses, 0);
        rate(10, 100_000, 0.5, |s| {
            thin_bernoulli(s, 0, &near(true, 40)).unwrap()
        });
        rate(11, 100_000, 0.1875, |s| {
            thin_bernoulli(s, 3, &near_half(40)).unwrap()
        });
    }

    #[test]
    fn thinned_trial_pmf() {
        let mut src = SeededSource::new(12);
        for _ in 0..1_000 {
            assert_eq!(thinned_trial(&mut src, 0, &near(false, 60)).unwrap(), 0);
        }
        rate(13, 100_000, 0.5, |s| {
            thinned_trial(s, 0, &near(true, 40)).unwrap() == 0
        });

        // k = 1, x = 1/2: q = 5/8, xq = 5/16.
        let expected = [0.6875, 0.263671875, 0.043741861979166667];
        let trials = 100_000u64;
        let mut counts = [0u64; 3];
        for _ in 0..trials {
            let n = thinned_trial(&mut src, 1, &near_half(40)).unwrap();
            if let Some(c) = counts.get_mut(n as usize) {
                *c += 1;
            }
        }
        for (c, p) in counts.iter().zip(expected) {
            assert!(z_score(*c, trials, p) <= 5.0, "{counts:?}");
        }
    }

    #[test]
    fn bernoulli_exp_frac_rates() {
        let mut src = SeededSource::new(14);
        let misses = (0..10_000)
            .filter(|_| !bernoulli_exp_frac(&mut src, 0, &near(false, 60)).unwrap())
            .count();
        assert_eq!(misses, 0);
        rate(15, 100_000, EXP_MINUS_HALF, |s| {
            bernoulli_exp_frac(s, 0, &near(true, 40)).unwrap()
        });
        rate(16, 100_000, EXP_MINUS_3_8, |s| {
            bernoulli_exp_frac(s, 2, &near_half(40)).unwrap()
        });
    }

    #[test]
    fn half_gaussian_integer_marginal() {
        rate(17, 100_000, HALF_NORMAL_BELOW_ONE, |s| {
            half_gaussian(s).unwrap().k == 0
        });
    }

    #[test]
    fn half_gaussian_checker_at_one() {
        let one = Dyadic::new(1, 0);
        rate(18, 20_000, HALF_NORMAL_BELOW_ONE, |s| {
            let h = half_gaussian(s).unwrap().to_creal();
            checker(&h, &one, 128, s).unwrap() == Ordering::Less
        });
    }

    #[test]
    fn gaussian_is_symmetric() {
        let zero = Dyadic::new(0, 0);
        rate(19, 10_000, 0.5, |s| {
            let g = gaussian(s).unwrap();
            checker(&g, &zero, 128, s).unwrap() == Ordering::Less
        });
    }

    #[test]
    fn neg_exponential_integer_marginal() {
        let mut src = SeededSource::new(20);
        let trials = 100_000u64;
        let mut counts = [0u64; 5];
        for _ in 0..trials {
            let k = neg_exponential(&mut src).unwrap().k;
            if let Some(c) = counts.get_mut(k as usize) {
                *c += 1;
            }
        }
        for (j, &c) in counts.iter().enumerate() {
            let p = (1.0 - EXP_MINUS_ONE) * EXP_MINUS_ONE.powi(j as i32);
            assert!(z_score(c, trials, p) <= 5.0, "{counts:?}");
        }
    }

    #[test]
    fn laplace_shift_symmetry() {
        let two = Dyadic::new(2, 0);
        let mu = CReal::of_int(2);
        rate(21, 10_000, 0.5, |s| {
            let l = laplace(s, 1, &mu).unwrap();
            checker(&l, &two, 128, s).unwrap() == Ordering::Less
        });
    }

    #[test]
    fn laplace_cdf_at_one() {
        let one = Dyadic::new(1, 0);
        let mu = CReal::of_int(0);
        rate(22, 10_000, 1.0 - EXP_MINUS_ONE / 2.0, |s| {
            let l = laplace(s, 0, &mu).unwrap();
            checker(&l, &one, 128, s).unwrap() == Ordering::Less
        });
    }

    #[test]
    fn samplers_replay_from_recorded_tape() {
        let mut rec = RecordingSource::new(SeededSource::new(23));
        let first: Vec<String> = (0..50)
            .map(|_| {
                let g = gaussian(&mut rec).unwrap();
                crate::creal::to_decimal(&g, 12, &mut rec).unwrap()
            })
            .collect();
        let mut tape = rec.replay();
        let again: Vec<String> = (0..50)
            .map(|_| {
                let g = gaussian(&mut tape).unwrap();
                crate::creal::to_decimal(&g, 12, &mut tape).unwrap()
            })
            .collect();
        assert_eq!(first, again);
        assert_eq!(tape.remaining(), 0);
    }

    fn magnitudes_by_sign(
        seed: u64,
        n: usize,
        draw: impl Fn(&mut SeededSource) -> CReal,
    ) -> (Vec<f64>, Vec<f64>) {
        let mut src = SeededSource::new(seed);
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for _ in 0..n {
            let x = draw(&mut src);
            let a = x.approx(32, &mut src).unwrap();
            let v = a.to_f64().unwrap() / 2f64.powi(32);
            if v < 0.0 {
                neg.push(-v);
            } else {
                pos.push(v);
            }
        }
        (pos, neg)
    }

    #[test]
    fn sign_is_independent_of_magnitude() {
        use crate::conformance::stats::{ks_two_sample, ks_two_sample_threshold};
        let zero = CReal::of_int(0);
        let (pos, neg) = magnitudes_by_sign(24, 20_000, |s| gaussian(s).unwrap());
        assert!(ks_two_sample(&pos, &neg) <= ks_two_sample_threshold(pos.len(), neg.len()));
        let (pos, neg) = magnitudes_by_sign(25, 20_000, |s| laplace(s, 1, &zero).unwrap());
        assert!(ks_two_sample(&pos, &neg) <= ks_two_sample_threshold(pos.len(), neg.len()));
    }
}
