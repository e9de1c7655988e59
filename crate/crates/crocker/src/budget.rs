//! Saturating exact integer arithmetic for combinatorial change budgets.
//!
//! Worst-case budgets multiply binomial coefficients by frame and point
//! counts, which can exceed any fixed-width integer by design. Values
//! saturate at a ceiling (default `2^63 - 1`) and carry a flag so a report
//! can state that a bound overflowed instead of silently wrapping.

use serde::{Deserialize, Serialize};
use std::fmt;

/// Default saturation ceiling, `2^63 - 1`.
pub const DEFAULT_CEILING: u64 = i64::MAX as u64;

/// A nonnegative integer that saturates at a configurable ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SatUint {
    value: u64,
    saturated: bool,
    #[serde(skip, default = "default_ceiling")]
    ceiling: u64,
}

fn default_ceiling() -> u64 {
    DEFAULT_CEILING
}

impl SatUint {
    pub fn exact(value: u64) -> Self {
        Self::with_ceiling(value, DEFAULT_CEILING)
    }

    pub fn with_ceiling(value: u64, ceiling: u64) -> Self {
        if value > ceiling {
            Self { value: ceiling, saturated: true, ceiling }
        } else {
            Self { value, saturated: false, ceiling }
        }
    }

    pub fn zero() -> Self {
        Self::exact(0)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn is_saturated(&self) -> bool {
        self.saturated
    }

    pub fn saturating_add(self, other: Self) -> Self {
        let ceiling = self.ceiling.min(other.ceiling);
        let sum = u128::from(self.value) + u128::from(other.value);
        let mut out = Self::with_ceiling(clamp_u128(sum, ceiling), ceiling);
        out.saturated |= self.saturated || other.saturated || sum > u128::from(ceiling);
        out
    }

    pub fn saturating_mul(self, other: Self) -> Self {
        let ceiling = self.ceiling.min(other.ceiling);
        let prod = u128::from(self.value) * u128::from(other.value);
        let mut out = Self::with_ceiling(clamp_u128(prod, ceiling), ceiling);
        out.saturated |= self.saturated || other.saturated || prod > u128::from(ceiling);
        out
    }

    pub fn mul_scalar(self, k: u64) -> Self {
        self.saturating_mul(Self::with_ceiling(k.min(self.ceiling), self.ceiling))
    }
}

fn clamp_u128(v: u128, ceiling: u64) -> u64 {
    if v > u128::from(ceiling) {
        ceiling
    } else {
        v as u64
    }
}

impl fmt::Display for SatUint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.saturated {
            write!(f, ">={}", self.value)
        } else {
            write!(f, "{}", self.value)
        }
    }
}

/// Binomial coefficient `C(n, k)` with saturation at the default ceiling.
pub fn binomial(n: u64, k: u64) -> SatUint {
    binomial_with_ceiling(n, k, DEFAULT_CEILING)
}

/// Binomial coefficient with an explicit saturation ceiling.
///
/// Computed by the multiplicative recurrence, which stays exact because
/// each partial product is itself a binomial coefficient. Once the partial
/// value exceeds the ceiling the result is pinned there, since C(n, k) is
/// increasing in k for k <= n/2.
pub fn binomial_with_ceiling(n: u64, k: u64, ceiling: u64) -> SatUint {
    if k > n {
        return SatUint::with_ceiling(0, ceiling);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - k + 1 + i) / u128::from(i + 1);
        if acc > u128::from(ceiling) {
            let mut out = SatUint::with_ceiling(ceiling, ceiling);
            out.saturated = true;
            return out;
        }
    }
    SatUint::with_ceiling(acc as u64, ceiling)
}
