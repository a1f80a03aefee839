//! Constructive reals on dyadic approximants.
//!
//! A [`CReal`] denotes a real `r` through a procedure that, for any precision
//! `p`, returns an integer `A` with
//!
//! ```text
//! |A - r * 2^p| <= 1
//! ```
//!
//! Every constructor in this module preserves that bound. Only the operations
//! the exact samplers need are provided: integer and rational constants,
//! addition, negation, scaling by powers of two, and lifting a
//! [`LazyUniform`]. There is no general multiplication.
//!
//! Reals built from lazy uniforms draw entropy when evaluated, so evaluation
//! takes the [`BitSource`] the deviates were sampled from.
//!
//! Each node caches its highest-precision approximant. Repeated requests at
//! that precision are served from the cache; coarser requests are recomputed
//! (or, for a lazy uniform, truncated), so a cached real returns exactly the
//! approximants an uncached one would.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg};
use std::rc::Rc;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::entropy::{Bit, BitSource};
use crate::error::{Error, Result};
use crate::lazyreal::LazyUniform;

/// Precision of an approximant: `approx(p)` is scaled by `2^p`.
pub type Precision = i64;

/// Default precision cap for [`cmp`].
pub const DEFAULT_MAX_PRECISION: Precision = 1 << 12;

/// A real number represented by its integer approximants.
#[derive(Clone)]
pub struct CReal(Rc<Node>);

struct Node {
    kind: Kind,
    cache: Option<RefCell<Option<(Precision, BigInt)>>>,
}

enum Kind {
    Int(BigInt),
    Ratio { num: BigInt, den: BigInt },
    Sum(CReal, CReal),
    Negated(CReal),
    Scaled(CReal, i64),
    Uniform(LazyUniform),
}

impl CReal {
    fn node(kind: Kind) -> Self {
        CReal(Rc::new(Node {
            kind,
            cache: Some(RefCell::new(None)),
        }))
    }

    /// The integer `z`.
    pub fn of_int(z: impl Into<BigInt>) -> Self {
        Self::node(Kind::Int(z.into()))
    }

    /// The rational `num / den`. Approximants are rounded to nearest, so the
    /// error never exceeds one half.
    pub fn of_rational(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Result<Self> {
        let (mut num, mut den) = (num.into(), den.into());
        if den.is_zero() {
            return Err(Error::InvalidParameter("zero denominator".into()));
        }
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        Ok(Self::node(Kind::Ratio { num, den }))
    }

    /// The value of a lazy uniform deviate.
    pub fn of_uniform(u: LazyUniform) -> Self {
        Self::node(Kind::Uniform(u))
    }

    /// `(-1)^b * (z + r)` where `r` is the value of `u`.
    pub fn of_bzu(b: Bit, z: impl Into<BigInt>, u: LazyUniform) -> Self {
        let abs = &CReal::of_int(z) + &CReal::of_uniform(u);
        if b {
            -&abs
        } else {
            abs
        }
    }

    /// `self / 2^z`.
    pub fn scal_pow2(&self, z: i64) -> Self {
        Self::node(Kind::Scaled(self.clone(), z))
    }

    /// An approximant `A` with `|A - r * 2^p| <= 1`.
    pub fn approx<S: BitSource + ?Sized>(&self, p: Precision, src: &mut S) -> Result<BigInt> {
        if let Some(cache) = &self.0.cache {
            if let Some((q, a)) = &*cache.borrow() {
                match p.cmp(q) {
                    Ordering::Equal => return Ok(a.clone()),
                    // Truncating the memoized bits is exactly get_bits at p.
                    Ordering::Less if p > 0 && matches!(self.0.kind, Kind::Uniform(_)) => {
                        return Ok(a >> (q - p) as usize)
                    }
                    _ => {}
                }
            }
        }
        let a = self.evaluate(p, src)?;
        if let Some(cache) = &self.0.cache {
            let mut slot = cache.borrow_mut();
            if slot.as_ref().is_none_or(|(q, _)| p > *q) {
                *slot = Some((p, a.clone()));
            }
        }
        Ok(a)
    }

    fn evaluate<S: BitSource + ?Sized>(&self, p: Precision, src: &mut S) -> Result<BigInt> {
        Ok(match &self.0.kind {
            Kind::Int(z) => shift_round(z, p),
            Kind::Ratio { num, den } => {
                if p >= 0 {
                    round_div(&(num << p as usize), den)
                } else {
                    round_div(num, &(den << p.unsigned_abs() as usize))
                }
            }
            Kind::Sum(x, y) => {
                let z = x.approx(p + 2, src)? + y.approx(p + 2, src)?;
                shift_round(&z, -2)
            }
            Kind::Negated(x) => -x.approx(p, src)?,
            Kind::Scaled(x, z) => x.approx(p - z, src)?,
            Kind::Uniform(u) => {
                if p <= 0 {
                    BigInt::zero()
                } else {
                    BigInt::from(u.get_bits(p as usize, src)?)
                }
            }
        })
    }

    /// A structurally identical real with caching switched off at every node.
    /// Lazy uniforms are shared with `self`.
    pub fn without_cache(&self) -> Self {
        let kind = match &self.0.kind {
            Kind::Int(z) => Kind::Int(z.clone()),
            Kind::Ratio { num, den } => Kind::Ratio {
                num: num.clone(),
                den: den.clone(),
            },
            Kind::Sum(x, y) => Kind::Sum(x.without_cache(), y.without_cache()),
            Kind::Negated(x) => Kind::Negated(x.without_cache()),
            Kind::Scaled(x, z) => Kind::Scaled(x.without_cache(), *z),
            Kind::Uniform(u) => Kind::Uniform(u.clone()),
        };
        CReal(Rc::new(Node { kind, cache: None }))
    }
}

impl Add for &CReal {
    type Output = CReal;

    fn add(self, rhs: &CReal) -> CReal {
        CReal::node(Kind::Sum(self.clone(), rhs.clone()))
    }
}

impl Add for CReal {
    type Output = CReal;

    fn add(self, rhs: CReal) -> CReal {
        CReal::node(Kind::Sum(self, rhs))
    }
}

impl Neg for &CReal {
    type Output = CReal;

    fn neg(self) -> CReal {
        CReal::node(Kind::Negated(self.clone()))
    }
}

impl Neg for CReal {
    type Output = CReal;

    fn neg(self) -> CReal {
        CReal::node(Kind::Negated(self))
    }
}

impl fmt::Debug for CReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0.kind {
            Kind::Int(z) => write!(f, "{z}"),
            Kind::Ratio { num, den } => write!(f, "({num}/{den})"),
            Kind::Sum(x, y) => write!(f, "({x:?} + {y:?})"),
            Kind::Negated(x) => write!(f, "-{x:?}"),
            Kind::Scaled(x, z) => write!(f, "({x:?} / 2^{z})"),
            Kind::Uniform(u) => write!(f, "{u:?}"),
        }
    }
}

/// `a * 2^shift`, rounded to nearest with ties away from zero.
fn shift_round(a: &BigInt, shift: i64) -> BigInt {
    if shift >= 0 {
        return a << shift as usize;
    }
    let s = shift.unsigned_abs() as usize;
    let half = BigInt::one() << (s - 1);
    let magnitude = (a.abs() + half) >> s;
    if a.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// `n / d` for `d > 0`, rounded to nearest with ties away from zero.
fn round_div(n: &BigInt, d: &BigInt) -> BigInt {
    let two = BigInt::from(2);
    let magnitude = (n.abs() * &two + d).div_floor(&(d * &two));
    if n.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// Compares `x` and `y` by evaluating both at precisions `start_p`,
/// `start_p + 1`, ... until their approximants are more than two apart.
///
/// Never returns `Equal`: equal arguments run into the cap and yield
/// [`Error::Undecided`].
pub fn cmp<S: BitSource + ?Sized>(
    x: &CReal,
    y: &CReal,
    start_p: Precision,
    max_p: Precision,
    src: &mut S,
) -> Result<Ordering> {
    if start_p > max_p {
        return Err(Error::InvalidParameter(format!(
            "start precision {start_p} exceeds cap {max_p}"
        )));
    }
    for p in start_p..=max_p {
        let a = x.approx(p, src)?;
        let b = y.approx(p, src)?;
        if &a + 2 < b {
            return Ok(Ordering::Less);
        }
        if &b + 2 < a {
            return Ok(Ordering::Greater);
        }
    }
    Err(Error::Undecided { cap: max_p })
}

/// A dyadic rational `num / 2^exp`.
#[derive(Clone, Debug, Eq)]
pub struct Dyadic {
    pub num: BigInt,
    pub exp: i64,
}

impl Dyadic {
    pub fn new(num: impl Into<BigInt>, exp: i64) -> Self {
        Self {
            num: num.into(),
            exp,
        }
    }

    pub fn to_creal(&self) -> CReal {
        CReal::of_int(self.num.clone()).scal_pow2(self.exp)
    }

    /// Both numerators brought over the common denominator `2^max(exp)`.
    fn aligned(&self, other: &Dyadic) -> (BigInt, BigInt) {
        let e = self.exp.max(other.exp);
        (
            &self.num << (e - self.exp) as usize,
            &other.num << (e - other.exp) as usize,
        )
    }

    /// Nearest `f64`, for reporting only.
    pub fn to_f64(&self) -> f64 {
        self.num.to_f64().unwrap_or(f64::NAN) * 2f64.powi(-(self.exp as i32))
    }
}

impl PartialEq for Dyadic {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a == b
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = self.aligned(other);
        a.cmp(&b)
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/2^{}", self.num, self.exp)
    }
}

/// Compares a sampled real against the dyadic point `point`: `Less` means
/// the sample lies below it.
pub fn checker<S: BitSource + ?Sized>(
    sample: &CReal,
    point: &Dyadic,
    max_p: Precision,
    src: &mut S,
) -> Result<Ordering> {
    cmp(sample, &point.to_creal(), 0, max_p, src)
}

/// Renders `x` with `digits` fractional decimal digits, accurate to within
/// `10^-digits`.
pub fn to_decimal<S: BitSource + ?Sized>(x: &CReal, digits: u32, src: &mut S) -> Result<String> {
    if digits == 0 {
        return Err(Error::InvalidParameter("digits must be at least 1".into()));
    }
    let scale = BigInt::from(10u32).pow(digits);
    // ceil(log2(10^digits)) + 2 guarantees 2^-p <= 10^-digits / 4.
    let p = (&scale - 1u32).bits() as i64 + 2;
    let a = x.approx(p, src)?;
    let scaled = round_div(&(a * &scale), &(BigInt::one() << p as usize));
    let (int_part, frac_part) = scaled.abs().div_rem(&scale);
    let sign = if scaled.is_negative() { "-" } else { "" };
    Ok(format!(
        "{sign}{int_part}.{frac_part:0>width$}",
        width = digits as usize
    ))
}

/// An exact decimal literal such as `-2.375`, kept as `mantissa / 10^scale`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decimal {
    mantissa: BigInt,
    scale: u32,
}

impl Decimal {
    pub fn zero() -> Self {
        Self {
            mantissa: BigInt::zero(),
            scale: 0,
        }
    }

    pub fn to_creal(&self) -> CReal {
        if self.scale == 0 {
            CReal::of_int(self.mantissa.clone())
        } else {
            CReal::of_rational(self.mantissa.clone(), BigInt::from(10u32).pow(self.scale))
                .expect("power of ten is nonzero")
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_string()
            .parse()
            .expect("decimal literal parses as f64")
    }
}

impl FromStr for Decimal {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("not a decimal literal: {s:?}"));
        let (negative, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_digits, frac_digits) = body.split_once('.').unwrap_or((body, ""));
        if int_digits.is_empty() && frac_digits.is_empty() {
            return Err(bad());
        }
        if !int_digits
            .chars()
            .chain(frac_digits.chars())
            .all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int_digits}{frac_digits}");
        let magnitude: BigInt = digits.parse().map_err(|_| bad())?;
        Ok(Self {
            mantissa: if negative { -magnitude } else { magnitude },
            scale: frac_digits.len() as u32,
        })
    }
}

impl fmt::Display for Decimal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.mantissa.is_negative() { "-" } else { "" };
        let digits = self.mantissa.abs().to_string();
        let scale = self.scale as usize;
        if scale == 0 {
            return write!(f, "{sign}{digits}");
        }
        let padded = format!("{digits:0>width$}", width = scale + 1);
        let (int_part, frac_part) = padded.split_at(padded.len() - scale);
        write!(f, "{sign}{int_part}.{frac_part}")
    }
}
