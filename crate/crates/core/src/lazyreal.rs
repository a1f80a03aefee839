//! Lazily sampled uniform deviates on `[0, 1]`.
//!
//! A [`LazyUniform`] stores the binary expansion of its value, most
//! significant bit first, and only draws a bit when somebody asks for it.
//! Bits that have been drawn never change, so every observation of the first
//! `k` bits agrees with every other.
//!
//! Clones share the same memo: a clone *is* the same deviate, and
//! [`cmp_uniform`] recognises it by identity without drawing anything.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;
use std::rc::Rc;

use num_bigint::BigUint;

use crate::entropy::{Bit, BitSource};
use crate::error::{Error, Result};

/// Default number of agreeing bit pairs [`cmp_uniform`] inspects before
/// giving up with [`Error::Undecided`]. Two independent deviates get that far
/// with probability 2^-65536.
pub const DEFAULT_CMP_BIT_CAP: usize = 1 << 16;

/// A uniform `[0, 1]` sample whose digits are drawn on demand.
#[derive(Clone, Default)]
pub struct LazyUniform {
    cells: Rc<RefCell<Vec<Bit>>>,
}

impl LazyUniform {
    /// A fresh deviate. Draws nothing.
    pub fn new() -> Self {
        Self::default()
    }

    /// A deviate whose leading bits are already fixed. Used to condition a
    /// sampler on a known neighbourhood of its argument.
    pub fn with_prefix(bits: impl Into<Vec<Bit>>) -> Self {
        Self {
            cells: Rc::new(RefCell::new(bits.into())),
        }
    }

    /// Number of bits forced so far.
    pub fn forced_len(&self) -> usize {
        self.cells.borrow().len()
    }

    /// A copy of the bits forced so far.
    pub fn prefix(&self) -> Vec<Bit> {
        self.cells.borrow().clone()
    }

    /// Whether `self` and `other` are the same deviate.
    pub fn same_as(&self, other: &LazyUniform) -> bool {
        Rc::ptr_eq(&self.cells, &other.cells)
    }

    /// Returns bit `index` (0 is the `1/2` digit), drawing from `src` if it
    /// has not been forced yet. Any unforced bits below `index` are forced
    /// first, in order.
    pub fn force_next<S: BitSource + ?Sized>(&self, index: usize, src: &mut S) -> Result<Bit> {
        let mut cells = self.cells.borrow_mut();
        while cells.len() <= index {
            let bit = src.next_bit()?;
            cells.push(bit);
        }
        Ok(cells[index])
    }

    /// The first `n` bits as a big-endian integer, i.e. `floor(r * 2^n)`.
    pub fn get_bits<S: BitSource + ?Sized>(&self, n: usize, src: &mut S) -> Result<BigUint> {
        if n > 0 {
            self.force_next(n - 1, src)?;
        }
        let cells = self.cells.borrow();
        let mut acc = BigUint::default();
        for chunk in cells[..n].chunks(64) {
            let word = chunk.iter().fold(0u64, |a, &b| (a << 1) | u64::from(b));
            acc = (acc << chunk.len()) | BigUint::from(word);
        }
        Ok(acc)
    }

    /// Like [`get_bits`](Self::get_bits) for `n <= 64`.
    pub fn get_bits_u64<S: BitSource + ?Sized>(&self, n: u32, src: &mut S) -> Result<u64> {
        assert!(n <= 64, "get_bits_u64 supports at most 64 bits");
        if n > 0 {
            self.force_next(n as usize - 1, src)?;
        }
        let cells = self.cells.borrow();
        Ok(cells[..n as usize]
            .iter()
            .fold(0u64, |a, &b| (a << 1) | u64::from(b)))
    }
}

impl fmt::Debug for LazyUniform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let bits: String = self
            .cells
            .borrow()
            .iter()
            .map(|&b| if b { '1' } else { '0' })
            .collect();
        write!(f, "LazyUniform(0.{bits}...)")
    }
}

/// Compares two deviates bit by bit, forcing `x`'s bit before `y`'s at each
/// position.
///
/// Returns `Equal` only when `x` and `y` are the same deviate.
pub fn cmp_uniform<S: BitSource + ?Sized>(
    x: &LazyUniform,
    y: &LazyUniform,
    src: &mut S,
) -> Result<Ordering> {
    cmp_uniform_capped(x, y, src, DEFAULT_CMP_BIT_CAP)
}

/// [`cmp_uniform`] with an explicit cap on the number of bit pairs scanned.
pub fn cmp_uniform_capped<S: BitSource + ?Sized>(
    x: &LazyUniform,
    y: &LazyUniform,
    src: &mut S,
    max_bits: usize,
) -> Result<Ordering> {
    if x.same_as(y) {
        return Ok(Ordering::Equal);
    }
    for i in 0..max_bits {
        let a = x.force_next(i, src)?;
        let b = y.force_next(i, src)?;
        match a.cmp(&b) {
            Ordering::Equal => continue,
            decided => return Ok(decided),
        }
    }
    Err(Error::Undecided {
        cap: max_bits as i64,
    })
}

/// Whether `x` lies below one half, decided by its first bit alone.
///
/// This treats `x = 1/2` exactly (all further bits zero) as "above", an
/// event of probability zero.
pub fn le_half<S: BitSource + ?Sized>(x: &LazyUniform, src: &mut S) -> Result<bool> {
    Ok(!x.force_next(0, src)?)
}

/// The larger of two fresh uniform deviates. Its density on `[0, 1]` is
/// `2x`.
pub fn max2<S: BitSource + ?Sized>(src: &mut S) -> Result<LazyUniform> {
    let x = LazyUniform::new();
    let y = LazyUniform::new();
    Ok(if cmp_uniform(&x, &y, src)? == Ordering::Less {
        y
    } else {
        x
    })
}
