//! Reference values for the conformance checks.
//!
//! Computed ahead of time with mpmath at 30 significant digits (and scipy for
//! the chi-square quantiles), then frozen here. Nothing in this table is
//! derived from the samplers under test.

#![allow(clippy::excessive_precision)]

/// `e^-1/2`.
pub const EXP_MINUS_HALF: f64 = 0.606_530_659_712_633_424;
/// `e^-1`.
pub const EXP_MINUS_ONE: f64 = 0.367_879_441_171_442_322;
/// `1 - e^-1`.
pub const ONE_MINUS_EXP_MINUS_ONE: f64 = 0.632_120_558_828_557_678;

/// `sum_{k >= 0} e^(-k^2/2)`.
pub const GAUSSIAN_INT_NORM: f64 = 1.753_314_144_021_452_772;
/// `e^(-k^2/2) / GAUSSIAN_INT_NORM` for `k = 0..=5`.
pub const GAUSSIAN_INT_PMF: [f64; 6] = [
    0.570_348_447_487_208_798,
    0.345_933_820_120_493_013,
    0.077_188_268_684_243_723,
    0.006_335_998_928_727_276,
    0.000_191_330_589_014_177,
    0.000_002_125_490_851_018,
];
/// Mass of `k >= 3` under the same law.
pub const GAUSSIAN_INT_TAIL_3: f64 = 0.006_529_463_708_054_466;

/// `integral_0^inf e^(-x^2/2) dx = sqrt(pi/2)`.
pub const HALF_NORMAL_NORM: f64 = 1.253_314_137_315_500_251;
/// `P(half-normal < 1) = erf(1/sqrt(2))`.
pub const HALF_NORMAL_BELOW_ONE: f64 = 0.682_689_492_137_085_897;

/// Standard normal CDF at the dyadic points used by the suite.
pub const NORMAL_CDF: [(i64, i64, f64); 7] = [
    // (numerator, exponent, Phi(numerator / 2^exponent))
    (-2, 0, 0.022_750_131_948_179_207),
    (-1, 0, 0.158_655_253_931_457_051),
    (-1, 1, 0.308_537_538_725_986_896),
    (0, 0, 0.5),
    (1, 1, 0.691_462_461_274_013_104),
    (1, 0, 0.841_344_746_068_542_949),
    (2, 0, 0.977_249_868_051_820_793),
];

/// Laplace(mu = 0, rate 2^eps_exp) CDF: `(eps_exp, point, F(point))`.
pub const LAPLACE_CDF: [(i64, i64, f64); 6] = [
    (0, -1, 0.183_939_720_585_721_161),
    (0, 0, 0.5),
    (0, 1, 0.816_060_279_414_278_839),
    (1, -1, 0.067_667_641_618_306_346),
    (1, 0, 0.5),
    (1, 1, 0.932_332_358_381_693_654),
];

/// `(1 - e^-1) e^-j` for `j = 0..=4`.
pub const NEG_EXP_INT_PMF: [f64; 5] = [
    0.632_120_558_828_557_678,
    0.232_544_157_934_829_630,
    0.085_548_214_868_748_749,
    0.031_471_429_479_129_763,
    0.011_577_691_889_648_713,
];
/// `e^-5`, the mass of `j >= 5`.
pub const NEG_EXP_INT_TAIL_5: f64 = 0.006_737_946_999_085_467;

/// Upper 0.001 quantiles of the chi-square distribution, indexed by degrees
/// of freedom minus one.
pub const CHI2_CRITICAL_001: [f64; 20] = [
    10.827_566_171,
    13.815_510_558,
    16.266_236_196,
    18.466_826_953,
    20.515_005_652,
    22.457_744_485,
    24.321_886_348,
    26.124_481_558,
    27.877_164_871,
    29.588_298_445,
    31.264_133_620,
    32.909_490_407,
    34.528_178_975,
    36.123_273_680,
    37.697_298_218,
    39.252_354_791,
    40.790_216_707,
    42.312_396_332,
    43.820_195_965,
    45.314_746_618,
];

/// Default z-score threshold for frequency checks.
pub const Z_THRESHOLD: f64 = 5.0;

/// One-sample Kolmogorov-Smirnov coefficient at alpha ~ 0.001: reject when
/// `D_n > KS_COEFFICIENT / sqrt(n)`.
pub const KS_COEFFICIENT: f64 = 1.95;

/// Fraction of trials allowed to end undecided at the precision cap.
pub const UNDECIDED_BUDGET: f64 = 0.001;

/// Precision cap for comparisons against dyadic points.
pub const CHECKER_MAX_PRECISION: i64 = 128;
