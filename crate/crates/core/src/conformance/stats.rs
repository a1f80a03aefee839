//! Goodness-of-fit statistics: binomial z-scores, Pearson chi-square with
//! tail merging, and Kolmogorov-Smirnov on a dyadic grid.

use std::collections::BTreeMap;

use super::constants::{CHI2_CRITICAL_001, KS_COEFFICIENT};
use super::report::ConformanceReport;
use crate::error::{Error, Result};

/// Minimum expected count per chi-square bin.
pub const MIN_EXPECTED: f64 = 5.0;

/// `|hits/n - p| / sqrt(p (1 - p) / n)`.
///
/// For `p` of exactly 0 or 1 the score is 0 when the observation matches
/// and infinite otherwise.
pub fn binomial_z(hits: u64, n: u64, p: f64) -> f64 {
    if n == 0 {
        return f64::INFINITY;
    }
    let f = hits as f64 / n as f64;
    let var = p * (1.0 - p) / n as f64;
    if var == 0.0 {
        return if f == p { 0.0 } else { f64::INFINITY };
    }
    (f - p).abs() / var.sqrt()
}

/// Upper 0.001 chi-square quantile for `dof` degrees of freedom.
pub fn chi2_critical_001(dof: usize) -> Option<f64> {
    dof.checked_sub(1)
        .and_then(|i| CHI2_CRITICAL_001.get(i).copied())
}

/// A chi-square bin: its label, observed count and expected probability.
#[derive(Clone, Debug, PartialEq)]
pub struct Bin {
    pub label: String,
    pub observed: u64,
    pub prob: f64,
}

/// Merges bins whose expected count falls below [`MIN_EXPECTED`] into their
/// inner neighbour, working in from both ends.
pub fn merge_sparse_bins(mut bins: Vec<Bin>, n: u64) -> Vec<Bin> {
    let sparse = |b: &Bin| b.prob * (n as f64) < MIN_EXPECTED;
    while bins.len() >= 2 && sparse(bins.last().unwrap()) {
        let tail = bins.pop().unwrap();
        let last = bins.last_mut().unwrap();
        last.label = format!("{}+{}", last.label, tail.label);
        last.observed += tail.observed;
        last.prob += tail.prob;
    }
    while bins.len() >= 2 && sparse(&bins[0]) {
        let head = bins.remove(0);
        bins[0].label = format!("{}+{}", head.label, bins[0].label);
        bins[0].observed += head.observed;
        bins[0].prob += head.prob;
    }
    bins
}

/// Pearson chi-square of `observed` against `expected_pmf`, bin by bin.
///
/// Both slices describe the same bins; the caller folds any infinite tail
/// into the last one. Sparse bins are merged first. `critical` defaults to
/// the 0.001 quantile for the surviving degrees of freedom.
pub fn chi_square_check(
    name: &str,
    observed: &[u64],
    expected_pmf: &[f64],
    critical: Option<f64>,
    seed: u64,
) -> Result<ConformanceReport> {
    if observed.len() != expected_pmf.len() {
        return Err(Error::InvalidParameter(format!(
            "{} observed bins but {} expected probabilities",
            observed.len(),
            expected_pmf.len()
        )));
    }
    let n: u64 = observed.iter().sum();
    let bins: Vec<Bin> = observed
        .iter()
        .zip(expected_pmf)
        .enumerate()
        .map(|(i, (&o, &p))| Bin {
            label: i.to_string(),
            observed: o,
            prob: p,
        })
        .collect();
    let bins = merge_sparse_bins(bins, n);
    if bins.len() < 2 || bins.iter().any(|b| b.prob * (n as f64) < MIN_EXPECTED) {
        return Err(Error::DegenerateBinning { bins: bins.len() });
    }
    let statistic: f64 = bins
        .iter()
        .map(|b| {
            let e = b.prob * n as f64;
            (b.observed as f64 - e).powi(2) / e
        })
        .sum();
    let dof = bins.len() - 1;
    let threshold = match critical {
        Some(c) => c,
        None => chi2_critical_001(dof).ok_or_else(|| {
            Error::InvalidParameter(format!("no tabulated critical value for {dof} dof"))
        })?,
    };
    Ok(ConformanceReport {
        name: name.to_string(),
        observed: bins.into_iter().map(|b| (b.label, b.observed)).collect(),
        statistic,
        threshold,
        pass: statistic <= threshold,
        seed,
        trials: n,
        undecided: 0,
    })
}

/// Counts values into `bins` bins, the last of which collects everything
/// at or above `bins - 1`.
pub fn tally(values: impl IntoIterator<Item = u64>, bins: usize) -> Vec<u64> {
    let mut counts = vec![0u64; bins];
    for v in values {
        let i = (v as usize).min(bins - 1);
        counts[i] += 1;
    }
    counts
}

/// Default KS rejection threshold for `n` samples discretized to `bits`.
pub fn ks_threshold(n: usize, bits: u32) -> f64 {
    KS_COEFFICIENT / (n as f64).sqrt() + (-(bits as f64)).exp2()
}

/// One-sample Kolmogorov-Smirnov check of samples in `[0, 1)` given as
/// `floor(x * 2^bits)`.
///
/// The empirical CDF is evaluated exactly at each grid point `j / 2^bits`,
/// where it equals the fraction of samples below `j`. `threshold` defaults
/// to [`ks_threshold`].
pub fn ks_check(
    name: &str,
    samples: &[u64],
    bits: u32,
    cdf: &dyn Fn(f64) -> f64,
    threshold: Option<f64>,
    seed: u64,
) -> Result<ConformanceReport> {
    if !(8..=24).contains(&bits) {
        return Err(Error::InvalidParameter(format!(
            "KS discretization must use 8 to 24 bits, got {bits}"
        )));
    }
    if samples.len() < 1000 {
        return Err(Error::InvalidParameter(format!(
            "KS needs at least 1000 samples, got {}",
            samples.len()
        )));
    }
    let cells = 1usize << bits;
    let mut hist = vec![0u64; cells];
    for &v in samples {
        let i = usize::try_from(v)
            .ok()
            .filter(|&i| i < cells)
            .ok_or_else(|| {
                Error::InvalidParameter(format!("sample {v} is off the {bits}-bit grid"))
            })?;
        hist[i] += 1;
    }
    let n = samples.len() as f64;
    let mut below = 0u64;
    let mut d: f64 = 0.0;
    for (j, count) in hist.iter().chain([&0]).enumerate() {
        let x = j as f64 / cells as f64;
        d = d.max((below as f64 / n - cdf(x)).abs());
        below += count;
    }
    let threshold = threshold.unwrap_or_else(|| ks_threshold(samples.len(), bits));
    let half = hist[..cells / 2].iter().sum::<u64>();
    Ok(ConformanceReport {
        name: name.to_string(),
        observed: BTreeMap::from([
            ("below_half".to_string(), half),
            ("above_half".to_string(), samples.len() as u64 - half),
        ]),
        statistic: d,
        threshold,
        pass: d <= threshold,
        seed,
        trials: samples.len() as u64,
        undecided: 0,
    })
}

/// Two-sample KS statistic `sup |F_a - F_b|` over the pooled sample points.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

/// Two-sample KS threshold at the same confidence as [`KS_COEFFICIENT`].
pub fn ks_two_sample_threshold(n: usize, m: usize) -> f64 {
    KS_COEFFICIENT * ((n + m) as f64 / (n * m) as f64).sqrt()
}
