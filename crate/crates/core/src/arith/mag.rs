//! Upper bounds for ball radii.
//!
//! A [`Mag`] is a nonnegative real stored at low precision where every
//! operation rounds toward +∞, so the stored value is always an upper bound
//! for the exact result of the same operations on exact inputs.

use std::cmp::Ordering;
use std::fmt;

use rug::float::Round;
use rug::ops::{AddAssignRound, MulAssignRound};
use rug::Float;

/// Working precision of radius arithmetic, in bits.
pub const MAG_PREC: u32 = 32;

#[derive(Clone, PartialEq, PartialOrd)]
pub struct Mag(pub(crate) Float);

impl fmt::Debug for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.3e}", self.0.to_f64_round(Round::Up))
    }
}

impl fmt::Display for Mag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Default for Mag {
    fn default() -> Self {
        Mag::zero()
    }
}

impl Mag {
    pub fn zero() -> Self {
        Mag(Float::new(MAG_PREC))
    }

    pub fn inf() -> Self {
        Mag(Float::with_val(MAG_PREC, rug::float::Special::Infinity))
    }

    /// Upper bound for |x|.
    pub fn from_f64(x: f64) -> Self {
        assert!(!x.is_nan(), "NaN radius");
        Mag(Float::with_val_round(MAG_PREC, x.abs(), Round::Up).0)
    }

    /// Upper bound for |x|.
    pub fn from_float(x: &Float) -> Self {
        Mag(Float::with_val_round(MAG_PREC, x.abs_ref(), Round::Up).0)
    }

    pub fn from_int(x: u64) -> Self {
        Mag(Float::with_val_round(MAG_PREC, x, Round::Up).0)
    }

    /// 2^e.
    pub fn pow2(e: i32) -> Self {
        let mut f = Float::with_val(MAG_PREC, 1);
        f <<= e;
        Mag(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64_round(Round::Up)
    }

    /// Approximate base-10 logarithm (−∞ for zero); used for diagnostics and
    /// step planning only.
    pub fn log10(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let mut f = self.0.clone();
        f.log10_mut();
        f.to_f64()
    }

    pub fn add(&self, other: &Mag) -> Mag {
        let mut r = self.0.clone();
        r.add_assign_round(&other.0, Round::Up);
        Mag(r)
    }

    pub fn mul(&self, other: &Mag) -> Mag {
        let mut r = self.0.clone();
        r.mul_assign_round(&other.0, Round::Up);
        Mag(r)
    }

    pub fn mul_f64(&self, x: f64) -> Mag {
        self.mul(&Mag::from_f64(x))
    }

    /// Upper bound for self / lower, where `lower` is a lower bound of the
    /// true divisor.  Division by a nonpositive lower bound yields +∞.
    pub fn div_lower(&self, lower: &Float) -> Mag {
        if *lower <= 0 {
            return if self.is_zero() { Mag::zero() } else { Mag::inf() };
        }
        Mag(Float::with_val_round(MAG_PREC, &self.0 / lower, Round::Up).0)
    }

    pub fn div(&self, lower: &Mag) -> Mag {
        self.div_lower(&lower.0)
    }

    pub fn pow(&self, k: u32) -> Mag {
        let mut acc = Mag(Float::with_val(MAG_PREC, 1));
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn sqrt(&self) -> Mag {
        Mag(Float::with_val_round(MAG_PREC, self.0.sqrt_ref(), Round::Up).0)
    }

    /// e^x, rounded up.
    pub fn exp(&self) -> Mag {
        Mag(Float::with_val_round(MAG_PREC, self.0.exp_ref(), Round::Up).0)
    }

    /// e^x − 1, rounded up.
    pub fn expm1(&self) -> Mag {
        Mag(Float::with_val_round(MAG_PREC, self.0.exp_m1_ref(), Round::Up).0)
    }

    pub fn max(&self, other: &Mag) -> Mag {
        if self.0 >= other.0 {
            self.clone()
        } else {
            other.clone()
        }
    }

    pub fn lt_f64(&self, x: f64) -> bool {
        self.0 < x
    }

    pub fn le(&self, other: &Mag) -> bool {
        self.0.partial_cmp(&other.0) != Some(Ordering::Greater)
    }
}

/// Lower bound for `a - b` (clamped at zero), with `a` a lower bound and `b`
/// an upper bound.
pub fn lower_sub(a: &Float, b: &Mag) -> Float {
    let r = Float::with_val_round(MAG_PREC, a - b.as_float(), Round::Down).0;
    if r < 0 {
        Float::new(MAG_PREC)
    } else {
        r
    }
}

/// Lower bound for |x| at radius precision.
pub fn lower_abs(x: &Float) -> Float {
    Float::with_val_round(MAG_PREC, x.abs_ref(), Round::Down).0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_is_upward() {
        let third = Mag::from_int(1).div(&Mag::from_int(3));
        assert!(third.to_f64() * 3.0 >= 1.0);
        let sum = Mag::from_f64(0.1).add(&Mag::from_f64(0.2));
        assert!(sum.to_f64() >= 0.3);
    }

    #[test]
    fn division_by_nonpositive_is_infinite() {
        let m = Mag::from_int(1).div_lower(&Float::new(MAG_PREC));
        assert!(!m.is_finite());
        assert!(Mag::zero().div_lower(&Float::new(MAG_PREC)).is_zero());
    }

    #[test]
    fn lower_sub_clamps() {
        let a = Float::with_val(MAG_PREC, 1);
        assert_eq!(lower_sub(&a, &Mag::from_int(2)), 0);
        assert!(lower_sub(&a, &Mag::from_f64(0.25)) <= 0.75);
    }
}
