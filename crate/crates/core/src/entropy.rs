//! Sources of fair random bits.
//!
//! Every sampler in this crate draws its randomness one bit at a time from a
//! [`BitSource`]. Nothing else touches a random number generator, which makes
//! any run reproducible from its seed and replayable from a recorded tape.
//!
//! Three sources are provided:
//!
//! * [`SeededSource`] expands a 64-bit seed with ChaCha8 (the stream for a
//!   given seed is fixed by `rand_chacha`'s `seed_from_u64`, period 2^70 words).
//! * [`TapeSource`] replays a finite bit sequence and then reports
//!   [`Error::Exhausted`].
//! * [`RecordingSource`] wraps another source and logs every bit it hands out.
//!
//! Tape files store one ASCII `0`/`1` per bit followed by a newline; see
//! [`write_tape`] and [`read_tape`].

use std::io::{self, BufRead, Write};

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// A single fair coin flip. `true` is the bit `1`.
pub type Bit = bool;

/// An abstract stream of fair random bits.
///
/// A source is single-owner: independent tasks should use independently
/// seeded sources rather than sharing one.
pub trait BitSource {
    /// Draws the next bit.
    fn next_bit(&mut self) -> Result<Bit>;

    /// Draws an integer uniformly from `0..=bound`.
    ///
    /// Draws `bit_length(bound)` bits most-significant first and retries
    /// whenever the packed value exceeds `bound`. `bound == 0` consumes no
    /// entropy.
    fn rand_uniform(&mut self, bound: u64) -> Result<u64> {
        let width = u64::BITS - bound.leading_zeros();
        loop {
            let mut value = 0u64;
            for _ in 0..width {
                value = (value << 1) | u64::from(self.next_bit()?);
            }
            if value <= bound {
                return Ok(value);
            }
        }
    }
}

impl<S: BitSource + ?Sized> BitSource for &mut S {
    fn next_bit(&mut self) -> Result<Bit> {
        (**self).next_bit()
    }
}

impl<S: BitSource + ?Sized> BitSource for Box<S> {
    fn next_bit(&mut self) -> Result<Bit> {
        (**self).next_bit()
    }
}

/// Deterministic bits expanded from a 64-bit seed.
#[derive(Debug, Clone)]
pub struct SeededSource {
    rng: ChaCha8Rng,
    word: u64,
    remaining: u32,
}

impl SeededSource {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            word: 0,
            remaining: 0,
        }
    }
}

impl BitSource for SeededSource {
    fn next_bit(&mut self) -> Result<Bit> {
        if self.remaining == 0 {
            self.word = self.rng.next_u64();
            self.remaining = u64::BITS;
        }
        self.remaining -= 1;
        Ok((self.word >> self.remaining) & 1 == 1)
    }
}

/// Replays a finite sequence of bits, then reports [`Error::Exhausted`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TapeSource {
    bits: Vec<Bit>,
    cursor: usize,
}

impl TapeSource {
    pub fn new(bits: Vec<Bit>) -> Self {
        Self { bits, cursor: 0 }
    }

    /// Builds a tape from a string of `0`/`1` characters, ignoring whitespace.
    pub fn from_bit_str(text: &str) -> Result<Self> {
        parse_bits(text)
            .map(Self::new)
            .map_err(|e| Error::InvalidParameter(e.to_string()))
    }

    /// Number of bits handed out so far.
    pub fn consumed(&self) -> usize {
        self.cursor
    }

    pub fn remaining(&self) -> usize {
        self.bits.len() - self.cursor
    }
}

impl BitSource for TapeSource {
    fn next_bit(&mut self) -> Result<Bit> {
        let bit = *self.bits.get(self.cursor).ok_or(Error::Exhausted)?;
        self.cursor += 1;
        Ok(bit)
    }
}

/// Passes bits through from an inner source while logging each one.
///
/// Replaying [`RecordingSource::log`] through a [`TapeSource`] reproduces
/// every downstream result exactly.
#[derive(Debug, Clone)]
pub struct RecordingSource<S> {
    inner: S,
    log: Vec<Bit>,
}

impl<S: BitSource> RecordingSource<S> {
    pub fn new(inner: S) -> Self {
        Self {
            inner,
            log: Vec::new(),
        }
    }

    pub fn log(&self) -> &[Bit] {
        &self.log
    }

    pub fn into_log(self) -> Vec<Bit> {
        self.log
    }

    /// A tape that replays everything recorded so far.
    pub fn replay(&self) -> TapeSource {
        TapeSource::new(self.log.clone())
    }
}

impl<S: BitSource> BitSource for RecordingSource<S> {
    fn next_bit(&mut self) -> Result<Bit> {
        let bit = self.inner.next_bit()?;
        self.log.push(bit);
        Ok(bit)
    }
}

fn parse_bits(text: &str) -> io::Result<Vec<Bit>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(io::Error::new(
                io::ErrorKind::InvalidData,
                format!("invalid tape character {other:?}"),
            )),
        })
        .collect()
}

/// Writes `bits` as ASCII `0`/`1` characters followed by a single newline.
pub fn write_tape<W: Write>(mut out: W, bits: &[Bit]) -> io::Result<()> {
    let text: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
    out.write_all(text.as_bytes())?;
    out.write_all(b"\n")
}

/// Reads a tape written by [`write_tape`]. Whitespace, including one bit per
/// line, is accepted.
pub fn read_tape<R: BufRead>(mut input: R) -> io::Result<Vec<Bit>> {
    let mut text = String::new();
    input.read_to_string(&mut text)?;
    parse_bits(&text)
}
