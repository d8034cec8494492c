use std::cmp::Ordering;
use std::fmt;

/// A DBM entry: `(c, <)`, `(c, <=)` or `+inf`.
///
/// Encoded as `2c + 1` for non-strict and `2c` for strict bounds so that the
/// integer order is the bound order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bound(i64);

impl Bound {
    pub const INF: Bound = Bound(i64::MAX);
    pub const LE_ZERO: Bound = Bound(1);
    pub const LT_ZERO: Bound = Bound(0);

    pub const fn le(c: i64) -> Bound {
        Bound((c << 1) | 1)
    }

    pub const fn lt(c: i64) -> Bound {
        Bound(c << 1)
    }

    pub fn new(c: i64, strict: bool) -> Bound {
        if strict {
            Bound::lt(c)
        } else {
            Bound::le(c)
        }
    }

    pub fn is_inf(self) -> bool {
        self == Bound::INF
    }

    /// Constant part; meaningless for `INF`.
    pub fn constant(self) -> i64 {
        self.0 >> 1
    }

    pub fn is_strict(self) -> bool {
        self.0 & 1 == 0
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Bound) -> Bound {
        if self.is_inf() || other.is_inf() {
            Bound::INF
        } else {
            Bound((((self.0 >> 1) + (other.0 >> 1)) << 1) | (self.0 & other.0 & 1))
        }
    }

    /// The bound of the complementary half-space, read on the transposed entry:
    /// `not (xi - xj ≺ c)` is `xj - xi ≺' -c`.
    pub fn complement(self) -> Bound {
        debug_assert!(!self.is_inf());
        Bound(1 - self.0)
    }

    /// Compares `lhs` (an exact difference of clock values) against the bound.
    pub fn admits(self, lhs: &crate::Rational) -> bool {
        if self.is_inf() {
            return true;
        }
        let c = crate::rational::int(self.constant());
        match lhs.cmp(&c) {
            Ordering::Less => true,
            Ordering::Equal => !self.is_strict(),
            Ordering::Greater => false,
        }
    }
}

impl fmt::Debug for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_inf() {
            f.write_str("inf")
        } else {
            write!(f, "({}, {})", self.constant(), if self.is_strict() { "<" } else { "<=" })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_matches_bound_strength() {
        assert!(Bound::lt(3) < Bound::le(3));
        assert!(Bound::le(3) < Bound::lt(4));
        assert!(Bound::le(-2) < Bound::LT_ZERO);
        assert!(Bound::le(1_000) < Bound::INF);
    }

    #[test]
    fn addition_keeps_strictness() {
        assert_eq!(Bound::le(2).add(Bound::le(3)), Bound::le(5));
        assert_eq!(Bound::le(2).add(Bound::lt(3)), Bound::lt(5));
        assert_eq!(Bound::lt(-2).add(Bound::lt(3)), Bound::lt(1));
        assert_eq!(Bound::le(2).add(Bound::INF), Bound::INF);
    }

    #[test]
    fn complement_flips_strictness_and_sign() {
        assert_eq!(Bound::le(3).complement(), Bound::lt(-3));
        assert_eq!(Bound::lt(3).complement(), Bound::le(-3));
        assert_eq!(Bound::le(-4).complement(), Bound::lt(4));
    }
}
