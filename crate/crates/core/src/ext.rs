//! Extended reals `R ∪ {+∞}`.
//!
//! `-∞` and NaN are not representable. Every quantity computed by this crate
//! is either nonnegative or the positive part of something, so the total order
//! on [`ExtReal`] is the usual one with `+∞` on top.

use core::cmp::Ordering;
use core::fmt;
use core::ops::Add;

/// A finite real or `+∞`.
#[derive(Clone, Copy, PartialEq)]
pub struct ExtReal(f64);

impl ExtReal {
    pub const INFINITY: ExtReal = ExtReal(f64::INFINITY);
    pub const ZERO: ExtReal = ExtReal(0.0);

    /// Wraps a finite value.
    ///
    /// Panics on NaN or infinities; use [`ExtReal::INFINITY`] for `+∞`.
    pub fn finite(v: f64) -> Self {
        assert!(v.is_finite(), "ExtReal::finite called with {v}");
        ExtReal(v)
    }

    /// Accepts finite values and `+∞`, rejects NaN and `-∞`.
    pub fn new(v: f64) -> Option<Self> {
        if v.is_nan() || v == f64::NEG_INFINITY {
            None
        } else {
            Some(ExtReal(v))
        }
    }

    pub fn is_infinite(self) -> bool {
        self.0 == f64::INFINITY
    }

    pub fn is_finite(self) -> bool {
        !self.is_infinite()
    }

    /// The underlying `f64` (`f64::INFINITY` for `+∞`).
    pub fn value(self) -> f64 {
        self.0
    }

    pub fn to_finite(self) -> Option<f64> {
        if self.is_finite() {
            Some(self.0)
        } else {
            None
        }
    }

    /// `max{self, 0}`.
    pub fn positive_part(self) -> Self {
        if self.0 > 0.0 {
            self
        } else {
            ExtReal::ZERO
        }
    }

    pub fn max(self, other: Self) -> Self {
        if other > self {
            other
        } else {
            self
        }
    }

    pub fn min(self, other: Self) -> Self {
        if other < self {
            other
        } else {
            self
        }
    }

    /// `[self - other]₊` where `other` may be `+∞` (giving 0).
    ///
    /// `self` must be finite.
    pub fn descent(self, other: Self) -> f64 {
        debug_assert!(self.is_finite());
        if other.is_infinite() {
            0.0
        } else {
            let d = self.0 - other.0;
            if d > 0.0 {
                d
            } else {
                0.0
            }
        }
    }
}

impl From<f64> for ExtReal {
    fn from(v: f64) -> Self {
        ExtReal::new(v).expect("NaN or -inf is not an extended real")
    }
}

impl Eq for ExtReal {}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtReal {
    fn cmp(&self, other: &Self) -> Ordering {
        // NaN is excluded at construction.
        self.0.partial_cmp(&other.0).unwrap_or(Ordering::Equal)
    }
}

impl Add for ExtReal {
    type Output = ExtReal;

    fn add(self, rhs: Self) -> Self {
        if self.is_infinite() || rhs.is_infinite() {
            ExtReal::INFINITY
        } else {
            ExtReal(self.0 + rhs.0)
        }
    }
}

impl fmt::Debug for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            f.write_str("inf")
        } else {
            fmt::Display::fmt(&self.0, f)
        }
    }
}

#[cfg(feature = "serde")]
impl serde::Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

#[cfg(feature = "serde")]
impl<'de> serde::Deserialize<'de> for ExtReal {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Visitor;

        impl<'de> serde::de::Visitor<'de> for Visitor {
            type Value = ExtReal;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a finite number or the string \"inf\"")
            }

            fn visit_f64<E: serde::de::Error>(self, v: f64) -> Result<ExtReal, E> {
                ExtReal::new(v).ok_or_else(|| E::custom("NaN or -inf is not an extended real"))
            }

            fn visit_i64<E: serde::de::Error>(self, v: i64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_u64<E: serde::de::Error>(self, v: u64) -> Result<ExtReal, E> {
                Ok(ExtReal(v as f64))
            }

            fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<ExtReal, E> {
                match v {
                    "inf" | "+inf" | "infinity" => Ok(ExtReal::INFINITY),
                    _ => Err(E::custom("expected \"inf\"")),
                }
            }

            fn visit_unit<E: serde::de::Error>(self) -> Result<ExtReal, E> {
                Ok(ExtReal::INFINITY)
            }
        }

        d.deserialize_any(Visitor)
    }
}

/// Ratio of nonnegative extended reals.
///
/// `r/0 = +∞` for `r > 0`, `∞/d = ∞`, and `0/0` evaluates to `zero_over_zero`
/// (callers pass `0` where the `0/0 = 0` convention applies).
pub fn extreal_div(num: ExtReal, den: ExtReal, zero_over_zero: ExtReal) -> ExtReal {
    debug_assert!(num.0 >= 0.0 && den.0 >= 0.0, "extreal_div expects nonnegative operands");
    match (num.is_infinite(), den.is_infinite()) {
        (true, true) => ExtReal::INFINITY,
        (true, false) => ExtReal::INFINITY,
        (false, true) => ExtReal::ZERO,
        (false, false) => {
            if den.0 == 0.0 {
                if num.0 == 0.0 {
                    zero_over_zero
                } else {
                    ExtReal::INFINITY
                }
            } else {
                ExtReal(num.0 / den.0)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn division_conventions() {
        let conv = ExtReal::ZERO;
        assert_eq!(extreal_div(2.0.into(), 4.0.into(), conv), ExtReal::finite(0.5));
        assert_eq!(extreal_div(0.0.into(), 0.0.into(), conv), ExtReal::ZERO);
        assert_eq!(extreal_div(1.0.into(), 0.0.into(), conv), ExtReal::INFINITY);
        assert_eq!(
            extreal_div(0.0.into(), 0.0.into(), ExtReal::INFINITY),
            ExtReal::INFINITY
        );
        assert_eq!(extreal_div(ExtReal::INFINITY, 3.0.into(), conv), ExtReal::INFINITY);
        assert_eq!(extreal_div(3.0.into(), ExtReal::INFINITY, conv), ExtReal::ZERO);
    }

    #[test]
    fn order_and_addition() {
        assert!(ExtReal::INFINITY > ExtReal::finite(1e300));
        assert_eq!(ExtReal::finite(1.0) + ExtReal::INFINITY, ExtReal::INFINITY);
        assert_eq!(ExtReal::finite(1.0) + ExtReal::finite(2.0), ExtReal::finite(3.0));
        assert!(ExtReal::new(f64::NAN).is_none());
        assert!(ExtReal::new(f64::NEG_INFINITY).is_none());
    }

    #[test]
    fn positive_part_and_descent() {
        assert_eq!(ExtReal::finite(-2.0).positive_part(), ExtReal::ZERO);
        assert_eq!(ExtReal::finite(5.0).positive_part(), ExtReal::finite(5.0));
        assert_eq!(ExtReal::INFINITY.positive_part(), ExtReal::INFINITY);
        assert_eq!(ExtReal::finite(1.0).descent(ExtReal::INFINITY), 0.0);
        assert_eq!(ExtReal::finite(1.0).descent(ExtReal::finite(0.25)), 0.75);
        assert_eq!(ExtReal::finite(1.0).descent(ExtReal::finite(3.0)), 0.0);
    }
}
