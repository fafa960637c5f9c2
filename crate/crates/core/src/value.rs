//! Values in the naturals extended by infinity, the codomain of every order
//! and valuation function in the crate.

use std::fmt;
use std::ops::Add;

/// A value in `ℕ ∪ {∞}`. `Inf` compares greater than every finite value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValOrInf {
    Fin(u64),
    Inf,
}

impl ValOrInf {
    pub fn is_infinite(self) -> bool {
        matches!(self, ValOrInf::Inf)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            ValOrInf::Fin(n) => Some(n),
            ValOrInf::Inf => None,
        }
    }

    /// Unwraps a finite value, panicking on infinity.
    pub fn expect_finite(self, what: &str) -> u64 {
        match self {
            ValOrInf::Fin(n) => n,
            ValOrInf::Inf => panic!("expected finite value for {what}"),
        }
    }
}

impl Add for ValOrInf {
    type Output = ValOrInf;
    fn add(self, rhs: ValOrInf) -> ValOrInf {
        match (self, rhs) {
            (ValOrInf::Fin(a), ValOrInf::Fin(b)) => ValOrInf::Fin(a + b),
            _ => ValOrInf::Inf,
        }
    }
}

impl From<u64> for ValOrInf {
    fn from(n: u64) -> Self {
        ValOrInf::Fin(n)
    }
}

impl fmt::Display for ValOrInf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValOrInf::Fin(n) => write!(f, "{n}"),
            ValOrInf::Inf => write!(f, "inf"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_and_addition() {
        assert!(ValOrInf::Fin(5) < ValOrInf::Inf);
        assert!(ValOrInf::Fin(2) < ValOrInf::Fin(3));
        assert_eq!(ValOrInf::Fin(2) + ValOrInf::Fin(3), ValOrInf::Fin(5));
        assert_eq!(ValOrInf::Fin(2) + ValOrInf::Inf, ValOrInf::Inf);
    }
}
