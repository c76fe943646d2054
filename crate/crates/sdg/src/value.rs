//! Integers extended with an absorbing negative infinity.

use core::fmt;
use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul};

/// An integer or `-∞`.
///
/// `-∞` marks inadmissible outcomes: it absorbs every addition and is smaller
/// than every finite value.  The variant order makes the derived `Ord` agree
/// with that convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    /// Negative infinity.
    NegInf,
    /// A finite integer.
    Finite(i64),
}

impl ExtendedValue {
    /// Zero.
    pub const ZERO: Self = ExtendedValue::Finite(0);

    /// Returns the finite value, or `None` for `-∞`.
    pub fn finite(self) -> Option<i64> {
        match self {
            ExtendedValue::Finite(v) => Some(v),
            ExtendedValue::NegInf => None,
        }
    }

    /// True for `-∞`.
    pub fn is_neg_inf(self) -> bool {
        matches!(self, ExtendedValue::NegInf)
    }

    /// Subtraction of a finite amount (`-∞` stays `-∞`).
    pub fn minus(self, v: i64) -> Self {
        match self {
            ExtendedValue::Finite(x) => ExtendedValue::Finite(x - v),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        }
    }
}

impl From<i64> for ExtendedValue {
    fn from(v: i64) -> Self {
        ExtendedValue::Finite(v)
    }
}

impl Add for ExtendedValue {
    type Output = ExtendedValue;
    fn add(self, rhs: Self) -> Self {
        match (self, rhs) {
            (ExtendedValue::Finite(a), ExtendedValue::Finite(b)) => ExtendedValue::Finite(a + b),
            _ => ExtendedValue::NegInf,
        }
    }
}

impl AddAssign for ExtendedValue {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Multiplication by a non-negative count; `0 · (-∞) = 0` because an empty
/// group of agents contributes nothing.
impl Mul<ExtendedValue> for u64 {
    type Output = ExtendedValue;
    fn mul(self, rhs: ExtendedValue) -> ExtendedValue {
        if self == 0 {
            return ExtendedValue::ZERO;
        }
        match rhs {
            ExtendedValue::Finite(v) => ExtendedValue::Finite(v * self as i64),
            ExtendedValue::NegInf => ExtendedValue::NegInf,
        }
    }
}

impl Sum for ExtendedValue {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ExtendedValue::ZERO, Add::add)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::Finite(v) => write!(f, "{v}"),
            ExtendedValue::NegInf => f.write_str("-inf"),
        }
    }
}
