use std::fmt;
use std::ops::Add;
use std::str::FromStr;

/// Cardinality of a realization set: a natural number or countably infinite.
///
/// The derived order puts every `Finite(k)` below `Infinite`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Count {
    Finite(u64),
    Infinite,
}

impl Count {
    pub const ZERO: Count = Count::Finite(0);

    pub fn is_infinite(self) -> bool {
        matches!(self, Count::Infinite)
    }

    pub fn finite(self) -> Option<u64> {
        match self {
            Count::Finite(k) => Some(k),
            Count::Infinite => None,
        }
    }

    /// `min(self, cap)` as a plain number; used for capped color-class counts.
    pub fn capped(self, cap: u64) -> u64 {
        match self {
            Count::Finite(k) => k.min(cap),
            Count::Infinite => cap,
        }
    }

    /// `self ≥ k` for a finite threshold.
    pub fn at_least(self, k: u64) -> bool {
        match self {
            Count::Finite(j) => j >= k,
            Count::Infinite => true,
        }
    }

    /// Product where `0 · ∞ = 0`.
    pub fn mul(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(0), _) | (_, Count::Finite(0)) => Count::ZERO,
            (Count::Finite(a), Count::Finite(b)) => a.checked_mul(b).map_or(Count::Infinite, Count::Finite),
            _ => Count::Infinite,
        }
    }

    /// `self · (self-1) ⋯ (self-k+1)`, the number of injective `k`-tuples.
    pub fn falling(self, k: u64) -> Count {
        match self {
            Count::Infinite if k == 0 => Count::Finite(1),
            Count::Infinite => Count::Infinite,
            Count::Finite(n) if k > n => Count::ZERO,
            Count::Finite(n) => (0..k).fold(Count::Finite(1), |acc, i| acc.mul(Count::Finite(n - i))),
        }
    }
}

impl Add for Count {
    type Output = Count;

    fn add(self, other: Count) -> Count {
        match (self, other) {
            (Count::Finite(a), Count::Finite(b)) => a.checked_add(b).map_or(Count::Infinite, Count::Finite),
            _ => Count::Infinite,
        }
    }
}

impl std::iter::Sum for Count {
    fn sum<I: Iterator<Item = Count>>(iter: I) -> Count {
        iter.fold(Count::ZERO, |a, b| a + b)
    }
}

impl From<u64> for Count {
    fn from(k: u64) -> Self {
        Count::Finite(k)
    }
}

impl fmt::Display for Count {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Count::Finite(k) => write!(f, "fin:{k}"),
            Count::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Count {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" => Ok(Count::Infinite),
            t => t
                .strip_prefix("fin:")
                .and_then(|k| k.parse().ok())
                .map(Count::Finite)
                .ok_or_else(|| format!("not a count: `{s}`")),
        }
    }
}
