//! Closed-form truncation bounds for radix-`2^p` digit selection.
//!
//! All inequalities are decided by exact integer comparison; no logarithm is
//! ever evaluated in floating point.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exactnum::{ceil_div, floor_div, pow2, Rational};

pub const MIN_BITS: u32 = 2;
pub const MAX_BITS: u32 = 7;

/// Radix `β = 2^p` with digit set `{-a..a}`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct RadixConfig {
    p: u32,
    beta: u32,
    a: u32,
    rho: Rational,
}

impl RadixConfig {
    pub fn new(beta: u32, a: u32) -> Result<Self> {
        if beta == 2 {
            return Err(Error::RadixTwo);
        }
        if !beta.is_power_of_two() {
            return Err(Error::NotPowerOfTwo(beta));
        }
        let p = beta.trailing_zeros();
        if !(MIN_BITS..=MAX_BITS).contains(&p) {
            return Err(Error::RadixOutOfRange(beta));
        }
        let (lo, hi) = (beta / 2, beta - 1);
        if a < lo || a > hi {
            return Err(Error::DigitOutOfRange { beta, a, lo, hi });
        }
        let rho = Rational::new(a as i128, (beta - 1) as i128)?;
        Ok(RadixConfig { p, beta, a, rho })
    }

    pub fn from_bits(p: u32, a: u32) -> Result<Self> {
        if p == 1 {
            return Err(Error::RadixTwo);
        }
        if !(MIN_BITS..=MAX_BITS).contains(&p) {
            return Err(Error::RadixOutOfRange(1u32.checked_shl(p).unwrap_or(0)));
        }
        Self::new(1 << p, a)
    }

    /// The maximally redundant digit set `{-(β-1)..β-1}`.
    pub fn maximally_redundant(p: u32) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&p) {
            return Self::from_bits(p, 0);
        }
        Self::from_bits(p, (1 << p) - 1)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    pub fn a(&self) -> u32 {
        self.a
    }

    pub fn rho(&self) -> Rational {
        self.rho
    }

    pub fn is_maximally_redundant(&self) -> bool {
        self.a == self.beta - 1
    }

    /// Every valid config for radices `2^p`, `p` in `bits`, in (β, a) order.
    pub fn all(bits: std::ops::RangeInclusive<u32>) -> Vec<RadixConfig> {
        bits.filter(|p| (MIN_BITS..=MAX_BITS).contains(p))
            .flat_map(|p| {
                let beta = 1u32 << p;
                (beta / 2..beta).map(move |a| RadixConfig::new(beta, a).expect("in range"))
            })
            .collect()
    }
}

impl fmt::Debug for RadixConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadixConfig(beta={}, a={}, rho={})", self.beta, self.a, self.rho)
    }
}

impl fmt::Display for RadixConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "beta={} a={}", self.beta, self.a)
    }
}

/// Fractional bits kept of the divisor (`u`) and of the shifted partial
/// remainder (`t`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TruncationPair {
    pub u: u32,
    pub t: u32,
}

impl TruncationPair {
    pub fn new(u: u32, t: u32) -> Self {
        TruncationPair { u, t }
    }

    /// `u + t`; the table has `2^(u+t)` entries up to a constant.
    pub fn cost(&self) -> u32 {
        self.u + self.t
    }
}

impl fmt::Display for TruncationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(u={}, t={})", self.u, self.t)
    }
}

const HALF: Rational = Rational::HALF;

/// Smallest `e >= 0` with `2^-e < bound` (`strict`) or `2^-e <= bound`.
/// `None` if `bound <= 0`.
fn smallest_exponent(bound: Rational, strict: bool) -> Option<u32> {
    if !bound.is_positive() {
        return None;
    }
    let (n, d) = (bound.numer(), bound.denom());
    (0..127).find(|&e| {
        // 2^-e vs n/d  <=>  d vs n * 2^e
        let rhs = n.checked_mul(1i128 << e);
        match rhs {
            Some(rhs) if strict => d < rhs,
            Some(rhs) => d <= rhs,
            None => true,
        }
    })
}

/// `ρ = a/(β-1)`.
pub fn redundancy_index(cfg: &RadixConfig) -> Rational {
    cfg.rho
}

/// `(ρ - 1/2) / (a - ρ)`, the bound on `2^-u`.
fn divisor_bound(cfg: &RadixConfig) -> Rational {
    let rho = cfg.rho;
    (rho - HALF).checked_div(&(Rational::from_int(cfg.a as i128) - rho)).expect("a > rho for beta > 2")
}

/// Smallest `u` with `2^-u < (ρ - 1/2)/(a - ρ)`.
pub fn u_min(cfg: &RadixConfig) -> u32 {
    smallest_exponent(divisor_bound(cfg), true).expect("rho > 1/2")
}

/// Smallest `t` with `t > 1 - log2(ρ - 1/2)`, i.e. `2^(t-1)(ρ - 1/2) > 1`.
pub fn t_prime(cfg: &RadixConfig) -> u32 {
    smallest_exponent(cfg.rho - HALF, true).expect("rho > 1/2") + 1
}

/// Smallest `u'` with `2^-u' <= (ρ - 1/2 - 2^(1-t)) / (a - ρ)`; from this `u'`
/// on, the gap `δ` is at least one at `k = 2^(u'-1)`.
pub fn u_for_t(cfg: &RadixConfig, t: u32) -> Result<u32> {
    let rho = cfg.rho;
    let slack = rho - HALF - Rational::pow2(1 - t as i32)?;
    let bound = slack.checked_div(&(Rational::from_int(cfg.a as i128) - rho))?;
    smallest_exponent(bound, false).ok_or(Error::TBelowPrime { t, t_prime: t_prime(cfg) })
}

/// `u_for_t` at `t = t'`.
pub fn u_max(cfg: &RadixConfig) -> u32 {
    u_for_t(cfg, t_prime(cfg)).expect("t' makes the bound positive")
}

/// `(ρ - 1/2) - (a - ρ) 2^-u`, the weak bound on `2^-t`.
pub fn weak_bound(cfg: &RadixConfig, u: u32) -> Result<Rational> {
    let rho = cfg.rho;
    let excess = (Rational::from_int(cfg.a as i128) - rho).mul_pow2(-(u as i32))?;
    Ok((rho - HALF).checked_sub(&excess)?)
}

/// Smallest `t` with `2^-t <= (ρ - 1/2) - (a - ρ) 2^-u`.
pub fn t_hat(cfg: &RadixConfig, u: u32) -> Result<u32> {
    smallest_exponent(weak_bound(cfg, u)?, false).ok_or(Error::UBelowMinimum { u, u_min: u_min(cfg) })
}

/// `δ = 2^(t0-u)((2ρ - 1)k - (d - ρ)) - 1`.
pub fn delta_gap(cfg: &RadixConfig, t0: u32, u: u32, d: u32, k: u64) -> Result<Rational> {
    let rho = cfg.rho;
    let two_rho_minus_one = rho + rho - Rational::ONE;
    let inner = two_rho_minus_one
        .checked_mul(&Rational::from_int(k as i128))?
        .checked_sub(&(Rational::from_int(d as i128) - rho))?;
    Ok(inner.mul_pow2(t0 as i32 - u as i32)? - Rational::ONE)
}

/// `Δ = ⌊2^(t-u)(d + ρ - 1)k⌋ - ⌈2^(t-u)(d - ρ)(k + 1) + 1⌉`.
///
/// Non-negative exactly when a selection constant `s_{d,k}` exists at
/// granularity `2^-t`. Evaluated over the common denominator
/// `(β - 1) 2^max(u-t, 0)`.
pub fn delta_margin(cfg: &RadixConfig, t: u32, u: u32, d: u32, k: u64) -> i128 {
    let m = (cfg.beta - 1) as i128;
    let (a, d, k) = (cfg.a as i128, d as i128, k as i128);
    let (scale, den) =
        if t >= u { (pow2(t - u).expect("t - u < 127"), m) } else { (1, m * pow2(u - t).expect("u - t < 127")) };
    let upper = (d * m + a - m) * k * scale;
    let lower = (d * m - a) * (k + 1) * scale;
    floor_div(upper, den) - ceil_div(lower, den) - 1
}

/// The divisor indices `k` with `2^(u-1) <= k < 2^u`.
pub fn divisor_indices(u: u32) -> std::ops::Range<u64> {
    assert!((1..63).contains(&u), "u out of range");
    (1u64 << (u - 1))..(1u64 << u)
}
