//! Integer-picosecond virtual time.
//!
//! All scheduling arithmetic runs on integer picoseconds so that byte
//! serialization times stay exact (800 ps per byte at 10 Gb/s) and the gap
//! test never hits float-comparison hazards.

use std::fmt;
use std::ops::{Add, AddAssign, Sub};

pub const PS_PER_MICROSECOND: u64 = 1_000_000;
pub const PS_PER_SECOND: u64 = 1_000_000_000_000;

/// A point in virtual time, or a span, in integer picoseconds.
#[derive(Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Picos(u64);

impl Picos {
    pub const ZERO: Picos = Picos(0);

    pub const fn from_ps(ps: u64) -> Self {
        Picos(ps)
    }

    pub const fn as_ps(self) -> u64 {
        self.0
    }

    /// Nearest-picosecond conversion; negative or non-finite input clamps to zero.
    pub fn from_secs_f64(secs: f64) -> Self {
        let ps = secs * PS_PER_SECOND as f64;
        if ps.is_finite() && ps > 0.0 {
            Picos(ps.round() as u64)
        } else {
            Picos(0)
        }
    }

    pub fn from_micros_f64(us: f64) -> Self {
        Self::from_secs_f64(us * 1e-6)
    }

    pub fn as_secs_f64(self) -> f64 {
        self.0 as f64 / PS_PER_SECOND as f64
    }

    pub fn as_micros_f64(self) -> f64 {
        self.0 as f64 / PS_PER_MICROSECOND as f64
    }

    pub fn checked_sub(self, rhs: Picos) -> Option<Picos> {
        self.0.checked_sub(rhs.0).map(Picos)
    }

    pub fn saturating_sub(self, rhs: Picos) -> Picos {
        Picos(self.0.saturating_sub(rhs.0))
    }
}

impl Add for Picos {
    type Output = Picos;
    fn add(self, rhs: Picos) -> Picos {
        Picos(self.0 + rhs.0)
    }
}

impl AddAssign for Picos {
    fn add_assign(&mut self, rhs: Picos) {
        self.0 += rhs.0;
    }
}

impl Sub for Picos {
    type Output = Picos;
    fn sub(self, rhs: Picos) -> Picos {
        Picos(self.0 - rhs.0)
    }
}

impl fmt::Debug for Picos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}ps", self.0)
    }
}

/// Serialization time of `length_bytes` on a link of `capacity_bps`, rounded
/// to the nearest picosecond. Exact for the 10 Gb/s default: 800 ps per byte.
pub fn service_time(length_bytes: u32, capacity_bps: u64) -> Picos {
    debug_assert!(capacity_bps > 0);
    let bits = length_bytes as u128 * 8 * PS_PER_SECOND as u128;
    let cap = capacity_bps as u128;
    Picos(((bits + cap / 2) / cap) as u64)
}
