//! Scalar abstraction for time values.
//!
//! Core arithmetic (the temporal network, timed reference resolution,
//! duration splitting) is generic over any exact ordered scalar. The
//! canonical instantiation is [`crate::Time`] (arbitrary-precision
//! rationals); plain integers satisfy the same bounds and are handy in
//! tests. Floating point types are not `Ord` and are intentionally not
//! usable here: the trace semantics depend on exact comparisons.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Signed;
use std::fmt;

/// An exact, totally ordered, signed scalar.
pub trait TimeScalar: Signed + Ord + Clone + fmt::Debug + fmt::Display {}

impl<T> TimeScalar for T where T: Signed + Ord + Clone + fmt::Debug + fmt::Display {}

/// A [`TimeScalar`] that is order-dense, so a strictly positive value can be
/// halved exactly. Needed to realize strict constraints as rational gaps when
/// extracting schedules.
pub trait DenseTimeScalar: TimeScalar {
    /// Exact halving: for `x > 0`, `0 < x.halved() < x`.
    fn halved(&self) -> Self;
}

impl DenseTimeScalar for BigRational {
    fn halved(&self) -> Self {
        self / BigRational::from_integer(BigInt::from(2))
    }
}

/// Whole-number time value.
pub fn time_int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Exact fraction `n/d`. Panics if `d == 0`.
pub fn time_frac(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Formats a rational as `n` (denominator one) or `n/d`, in lowest terms.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom() == &BigInt::from(1) {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `n` or `n/d` into a rational in lowest terms. The denominator must
/// be a nonzero integer; whitespace is not accepted.
pub fn parse_rational(s: &str) -> Result<BigRational, RationalParseError> {
    let err = || RationalParseError(s.to_string());
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let n: BigInt = numer.parse().map_err(|_| err())?;
    let d: BigInt = match denom {
        Some(d) => d.parse().map_err(|_| err())?,
        None => BigInt::from(1),
    };
    if d == BigInt::from(0) {
        return Err(err());
    }
    Ok(BigRational::new(n, d))
}

/// A string that is not a valid `n` or `n/d` rational.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational literal {0:?} (expected \"n\" or \"n/d\" with nonzero d)")]
pub struct RationalParseError(pub String);

/// An exact integer count of fixed subdivisions of the time unit.
///
/// Within one problem every rational is a multiple of `1/D` for the common
/// denominator `D` of all offsets and duration bounds, so difference
/// arithmetic stays exact in integers scaled by `D`. Arithmetic panics on
/// overflow instead of wrapping.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Ticks(pub i64);

impl fmt::Display for Ticks {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}t", self.0)
    }
}

macro_rules! ticks_checked_op {
    ($trait:ident, $method:ident, $checked:ident) => {
        impl std::ops::$trait for Ticks {
            type Output = Ticks;
            fn $method(self, rhs: Ticks) -> Ticks {
                Ticks(self.0.$checked(rhs.0).expect("tick arithmetic overflow"))
            }
        }
    };
}

ticks_checked_op!(Add, add, checked_add);
ticks_checked_op!(Sub, sub, checked_sub);
ticks_checked_op!(Mul, mul, checked_mul);
ticks_checked_op!(Div, div, checked_div);
ticks_checked_op!(Rem, rem, checked_rem);

impl std::ops::Neg for Ticks {
    type Output = Ticks;
    fn neg(self) -> Ticks {
        Ticks(self.0.checked_neg().expect("tick arithmetic overflow"))
    }
}

impl num_traits::Zero for Ticks {
    fn zero() -> Self {
        Ticks(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl num_traits::One for Ticks {
    fn one() -> Self {
        Ticks(1)
    }
}

impl num_traits::Num for Ticks {
    type FromStrRadixErr = std::num::ParseIntError;
    fn from_str_radix(str: &str, radix: u32) -> Result<Self, Self::FromStrRadixErr> {
        i64::from_str_radix(str, radix).map(Ticks)
    }
}

impl Signed for Ticks {
    fn abs(&self) -> Self {
        Ticks(self.0.checked_abs().expect("tick arithmetic overflow"))
    }
    fn abs_sub(&self, other: &Self) -> Self {
        if self.0 <= other.0 {
            Ticks(0)
        } else {
            *self - *other
        }
    }
    fn signum(&self) -> Self {
        Ticks(self.0.signum())
    }
    fn is_positive(&self) -> bool {
        self.0 > 0
    }
    fn is_negative(&self) -> bool {
        self.0 < 0
    }
}
