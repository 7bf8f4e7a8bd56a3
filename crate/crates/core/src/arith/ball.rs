//! Real and complex balls: a high-precision midpoint plus a [`Mag`] radius.
//!
//! Every operation returns a ball that contains the exact result for every
//! choice of exact inputs inside the operand balls.  Complex balls are
//! discs (one radius), not rectangles.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::mag::{lower_abs, lower_sub, Mag, MAG_PREC};
use crate::error::{Error, Result};

/// Bits of working precision needed for `digits` decimal digits, plus guard bits.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * std::f64::consts::LOG2_10).ceil() as u32 + 24
}

/// Rounding error of one midpoint operation with result magnitude `m`.
fn round_err(m: &Mag, prec: u32) -> Mag {
    m.mul(&Mag::pow2(2 - prec as i32))
}

#[derive(Clone)]
pub struct RBall {
    pub mid: Float,
    pub rad: Mag,
}

impl fmt::Debug for RBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{} +/- {:?}]", self.mid.to_string_radix(10, Some(20)), self.rad)
    }
}

impl RBall {
    pub fn new(mid: Float, rad: Mag) -> Self {
        RBall { mid, rad }
    }

    pub fn exact(mid: Float) -> Self {
        RBall { mid, rad: Mag::zero() }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        RBall::exact(Float::with_val(prec, n))
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        RBall::exact(Float::with_val(prec, x))
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        let (mid, ord) = Float::with_val_round(prec, q, Round::Nearest);
        let rad = if ord == std::cmp::Ordering::Equal {
            Mag::zero()
        } else {
            round_err(&Mag::from_float(&mid), prec)
        };
        RBall { mid, rad }
    }

    pub fn prec(&self) -> u32 {
        self.mid.prec()
    }

    pub fn abs_upper(&self) -> Mag {
        Mag::from_float(&self.mid).add(&self.rad)
    }

    pub fn abs_lower(&self) -> Float {
        lower_sub(&lower_abs(&self.mid), &self.rad)
    }

    pub fn is_positive(&self) -> bool {
        self.mid > 0 && self.abs_lower() > 0
    }

    pub fn is_negative(&self) -> bool {
        self.mid < 0 && self.abs_lower() > 0
    }

    pub fn contains_zero(&self) -> bool {
        !(self.abs_lower() > 0)
    }

    /// Upper bound of the ball as a float rounded up.
    pub fn upper(&self) -> Float {
        let r = Float::with_val_round(self.prec(), self.rad.as_float(), Round::Up).0;
        Float::with_val_round(self.prec(), &self.mid + &r, Round::Up).0
    }

    /// Lower bound of the ball as a float rounded down.
    pub fn lower(&self) -> Float {
        let r = Float::with_val_round(self.prec(), self.rad.as_float(), Round::Up).0;
        Float::with_val_round(self.prec(), &self.mid - &r, Round::Down).0
    }

    pub fn to_f64(&self) -> f64 {
        self.mid.to_f64()
    }

    pub fn add(&self, o: &RBall) -> RBall {
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid + &o.mid);
        let rad = self.rad.add(&o.rad).add(&round_err(&Mag::from_float(&mid), p));
        RBall { mid, rad }
    }

    pub fn sub(&self, o: &RBall) -> RBall {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RBall {
        RBall { mid: Float::with_val(self.prec(), -&self.mid), rad: self.rad.clone() }
    }

    pub fn mul(&self, o: &RBall) -> RBall {
        let p = self.prec().max(o.prec());
        let mid = Float::with_val(p, &self.mid * &o.mid);
        let am = Mag::from_float(&self.mid);
        let bm = Mag::from_float(&o.mid);
        let rad = am
            .mul(&o.rad)
            .add(&bm.mul(&self.rad))
            .add(&self.rad.mul(&o.rad))
            .add(&round_err(&Mag::from_float(&mid), p));
        RBall { mid, rad }
    }

    pub fn inv(&self) -> Result<RBall> {
        let lo = self.abs_lower();
        if !(lo > 0) {
            return Err(Error::RaisePrecision("division by a ball containing zero".into()));
        }
        let p = self.prec();
        let mid = Float::with_val(p, self.mid.recip_ref());
        let am = lower_abs(&self.mid);
        // |1/x - 1/m| <= r / (|m| (|m| - r))
        let denom = Float::with_val_round(MAG_PREC, &am * &lo, Round::Down).0;
        let rad = self.rad.div_lower(&denom).add(&round_err(&Mag::from_float(&mid), p));
        Ok(RBall { mid, rad })
    }

    pub fn div(&self, o: &RBall) -> Result<RBall> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn sqrt(&self) -> Result<RBall> {
        let lo = self.abs_lower();
        if !(self.mid > 0 && lo > 0) {
            return Err(Error::RaisePrecision("sqrt of a ball touching zero".into()));
        }
        let p = self.prec();
        let mid = Float::with_val(p, self.mid.sqrt_ref());
        let s = Float::with_val_round(MAG_PREC, lo.sqrt_ref(), Round::Down).0;
        let rad = self.rad.div_lower(&s).add(&round_err(&Mag::from_float(&mid), p));
        Ok(RBall { mid, rad })
    }

    pub fn log(&self) -> Result<RBall> {
        let lo = self.abs_lower();
        if !(self.mid > 0 && lo > 0) {
            return Err(Error::RaisePrecision("log of a ball touching zero".into()));
        }
        let p = self.prec();
        let mid = Float::with_val(p, self.mid.ln_ref());
        let rad = self
            .rad
            .div_lower(&lo)
            .add(&round_err(&Mag::from_float(&mid).add(&Mag::from_int(1)), p));
        Ok(RBall { mid, rad })
    }

    pub fn to_cball(&self) -> CBall {
        CBall { re: self.mid.clone(), im: Float::new(self.prec()), rad: self.rad.clone() }
    }

    /// True if the two balls certainly overlap or touch.
    pub fn overlaps(&self, o: &RBall) -> bool {
        let d = Float::with_val(self.prec().max(o.prec()), &self.mid - &o.mid);
        let dl = lower_abs(&d);
        !(lower_sub(&dl, &self.rad.add(&o.rad)) > 0)
    }

    /// The unique integer in the ball, if the ball has radius < 1/2 around it.
    pub fn unique_integer(&self) -> Option<Integer> {
        if !self.rad.lt_f64(0.25) {
            return None;
        }
        let n = self.mid.to_integer()?;
        let d = Float::with_val(self.prec(), &self.mid - &n);
        if Mag::from_float(&d).add(&self.rad).lt_f64(0.5) {
            Some(n)
        } else {
            None
        }
    }
}

/// A complex disc ball.
#[derive(Clone)]
pub struct CBall {
    pub re: Float,
    pub im: Float,
    pub rad: Mag,
}

impl fmt::Debug for CBall {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[({}) + ({})i +/- {:?}]",
            self.re.to_string_radix(10, Some(18)),
            self.im.to_string_radix(10, Some(18)),
            self.rad
        )
    }
}

/// Serialized as decimal strings for midpoint parts plus a radius upper bound.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq)]
pub struct CBallRepr {
    pub re: String,
    pub im: String,
    pub rad: f64,
}

impl CBall {
    pub fn zero(prec: u32) -> Self {
        CBall { re: Float::new(prec), im: Float::new(prec), rad: Mag::zero() }
    }

    pub fn one(prec: u32) -> Self {
        CBall::from_int(1, prec)
    }

    pub fn i(prec: u32) -> Self {
        CBall { re: Float::new(prec), im: Float::with_val(prec, 1), rad: Mag::zero() }
    }

    pub fn from_int(n: i64, prec: u32) -> Self {
        CBall { re: Float::with_val(prec, n), im: Float::new(prec), rad: Mag::zero() }
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        CBall { re: Float::with_val(prec, re), im: Float::with_val(prec, im), rad: Mag::zero() }
    }

    pub fn from_floats(re: Float, im: Float) -> Self {
        CBall { re, im, rad: Mag::zero() }
    }

    pub fn from_rational(q: &Rational, prec: u32) -> Self {
        RBall::from_rational(q, prec).to_cball()
    }

    pub fn from_rationals(re: &Rational, im: &Rational, prec: u32) -> Self {
        let a = RBall::from_rational(re, prec);
        let b = RBall::from_rational(im, prec);
        CBall { re: a.mid, im: b.mid, rad: a.rad.add(&b.rad) }
    }

    pub fn with_rad(mut self, r: Mag) -> Self {
        self.rad = self.rad.add(&r);
        self
    }

    pub fn pi(prec: u32) -> Self {
        let p = Float::with_val(prec, Constant::Pi);
        let rad = round_err(&Mag::from_int(4), prec);
        CBall { re: p, im: Float::new(prec), rad }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    /// Round midpoint to a new working precision (radius accounts for it).
    pub fn set_prec(&self, prec: u32) -> CBall {
        let re = Float::with_val(prec, &self.re);
        let im = Float::with_val(prec, &self.im);
        let extra = if prec < self.prec() {
            round_err(&self.mid_abs(), prec)
        } else {
            Mag::zero()
        };
        CBall { re, im, rad: self.rad.add(&extra) }
    }

    pub fn repr(&self) -> CBallRepr {
        let digits = (self.prec() as f64 / std::f64::consts::LOG2_10) as usize;
        CBallRepr {
            re: self.re.to_string_radix(10, Some(digits.max(5))),
            im: self.im.to_string_radix(10, Some(digits.max(5))),
            rad: self.rad.to_f64(),
        }
    }

    pub fn from_repr(r: &CBallRepr, prec: u32) -> Result<CBall> {
        let re = Float::parse(&r.re).map_err(|e| Error::Parse(e.to_string()))?;
        let im = Float::parse(&r.im).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(CBall {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
            rad: Mag::from_f64(r.rad).add(&round_err(&Mag::from_int(1), prec)),
        })
    }

    pub fn re_ball(&self) -> RBall {
        RBall { mid: self.re.clone(), rad: self.rad.clone() }
    }

    pub fn im_ball(&self) -> RBall {
        RBall { mid: self.im.clone(), rad: self.rad.clone() }
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn mid(&self) -> CBall {
        CBall { re: self.re.clone(), im: self.im.clone(), rad: Mag::zero() }
    }

    /// Parts rounded outward to MAG_PREC first: hypot at full precision is
    /// far more than a bound needs.
    pub fn mid_abs(&self) -> Mag {
        let up = |x: &Float| Float::with_val_round(MAG_PREC, x.abs_ref(), Round::Up).0;
        let (a, b) = (up(&self.re), up(&self.im));
        Mag(Float::with_val_round(MAG_PREC, a.hypot_ref(&b), Round::Up).0)
    }

    fn mid_abs_lower(&self) -> Float {
        let down = |x: &Float| Float::with_val_round(MAG_PREC, x.abs_ref(), Round::Down).0;
        let (a, b) = (down(&self.re), down(&self.im));
        Float::with_val_round(MAG_PREC, a.hypot_ref(&b), Round::Down).0
    }

    /// Upper bound for |z| over the ball.
    pub fn abs_upper(&self) -> Mag {
        self.mid_abs().add(&self.rad)
    }

    /// Lower bound for |z| over the ball (zero if it contains the origin).
    pub fn abs_lower(&self) -> Float {
        lower_sub(&self.mid_abs_lower(), &self.rad)
    }

    /// Ball enclosing |z|.
    pub fn abs(&self) -> RBall {
        let p = self.prec();
        let mid = Float::with_val(p, self.re.hypot_ref(&self.im));
        let rad = self.rad.add(&round_err(&Mag::from_float(&mid), p));
        RBall { mid, rad }
    }

    pub fn contains_zero(&self) -> bool {
        !(self.abs_lower() > 0)
    }

    /// Midpoint argument in (−π, π].
    pub fn arg_mid(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    /// Whether `self` and `o` intersect (a necessary condition for equality).
    pub fn overlaps(&self, o: &CBall) -> bool {
        let d = self.sub(&o.mid());
        !(lower_sub(&d.mid_abs_lower(), &self.rad.add(&o.rad)) > 0)
    }

    /// Whether `o` lies entirely inside `self`.
    pub fn contains(&self, o: &CBall) -> bool {
        let p = self.prec().max(o.prec());
        let dre = Float::with_val(p, &o.re - &self.re);
        let dim = Float::with_val(p, &o.im - &self.im);
        let d = Mag(Float::with_val_round(MAG_PREC, dre.hypot_ref(&dim), Round::Up).0)
            .add(&round_err(&Mag::from_int(1), p));
        d.add(&o.rad).le(&self.rad)
    }

    pub fn conj(&self) -> CBall {
        CBall { re: self.re.clone(), im: Float::with_val(self.im.prec(), -&self.im), rad: self.rad.clone() }
    }

    pub fn neg(&self) -> CBall {
        CBall {
            re: Float::with_val(self.re.prec(), -&self.re),
            im: Float::with_val(self.im.prec(), -&self.im),
            rad: self.rad.clone(),
        }
    }

    pub fn add(&self, o: &CBall) -> CBall {
        let p = self.prec().max(o.prec());
        let re = Float::with_val(p, &self.re + &o.re);
        let im = Float::with_val(p, &self.im + &o.im);
        let m = Mag::from_float(&re).add(&Mag::from_float(&im));
        CBall { re, im, rad: self.rad.add(&o.rad).add(&round_err(&m, p)) }
    }

    pub fn sub(&self, o: &CBall) -> CBall {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &CBall) -> CBall {
        let p = self.prec().max(o.prec());
        let ac = Float::with_val(p, &self.re * &o.re);
        let bd = Float::with_val(p, &self.im * &o.im);
        let ad = Float::with_val(p, &self.re * &o.im);
        let bc = Float::with_val(p, &self.im * &o.re);
        let re = Float::with_val(p, &ac - &bd);
        let im = Float::with_val(p, &ad + &bc);
        let am = self.mid_abs();
        let bm = o.mid_abs();
        let rad = am
            .mul(&o.rad)
            .add(&bm.mul(&self.rad))
            .add(&self.rad.mul(&o.rad))
            .add(&round_err(&am.mul(&bm), p).mul_f64(4.0));
        CBall { re, im, rad }
    }

    pub fn sqr(&self) -> CBall {
        self.mul(self)
    }

    pub fn mul_real(&self, x: &RBall) -> CBall {
        self.mul(&x.to_cball())
    }

    pub fn mul_int(&self, n: i64) -> CBall {
        let p = self.prec();
        let re = Float::with_val(p, &self.re * n);
        let im = Float::with_val(p, &self.im * n);
        let m = Mag::from_float(&re).add(&Mag::from_float(&im));
        CBall { re, im, rad: self.rad.mul(&Mag::from_int(n.unsigned_abs())).add(&round_err(&m, p)) }
    }

    pub fn mul_rational(&self, q: &Rational) -> CBall {
        self.mul(&CBall::from_rational(q, self.prec()))
    }

    /// Multiply by i.
    pub fn mul_i(&self) -> CBall {
        CBall {
            re: Float::with_val(self.im.prec(), -&self.im),
            im: self.re.clone(),
            rad: self.rad.clone(),
        }
    }

    /// Scale by 2^e exactly.
    pub fn mul_2exp(&self, e: i32) -> CBall {
        let mut re = self.re.clone();
        let mut im = self.im.clone();
        re <<= e;
        im <<= e;
        CBall { re, im, rad: self.rad.mul(&Mag::pow2(e)) }
    }

    pub fn inv(&self) -> Result<CBall> {
        let lo = self.abs_lower();
        if !(lo > 0) {
            return Err(Error::RaisePrecision("inverse of a ball containing zero".into()));
        }
        let p = self.prec();
        let n2 = Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref());
        let re = Float::with_val(p, &self.re / &n2);
        let im = Float::with_val(p, -(Float::with_val(p, &self.im / &n2)));
        let am = self.mid_abs_lower();
        let denom = Float::with_val_round(MAG_PREC, &am * &lo, Round::Down).0;
        let out = CBall { re, im, rad: Mag::zero() };
        let rad = self.rad.div_lower(&denom).add(&round_err(&out.mid_abs(), p).mul_f64(4.0));
        Ok(CBall { rad, ..out })
    }

    pub fn div(&self, o: &CBall) -> Result<CBall> {
        Ok(self.mul(&o.inv()?))
    }

    pub fn div_int(&self, n: i64) -> CBall {
        assert!(n != 0);
        let p = self.prec();
        let re = Float::with_val(p, &self.re / n);
        let im = Float::with_val(p, &self.im / n);
        let m = Mag::from_float(&re).add(&Mag::from_float(&im));
        let rad = self.rad.div(&Mag::from_int(n.unsigned_abs())).add(&round_err(&m, p));
        CBall { re, im, rad }
    }

    pub fn pow(&self, k: u32) -> CBall {
        let mut acc = CBall::one(self.prec());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.sqr();
            }
        }
        acc
    }

    pub fn powi(&self, k: i64) -> Result<CBall> {
        if k >= 0 {
            Ok(self.pow(k as u32))
        } else {
            Ok(self.inv()?.pow((-k) as u32))
        }
    }

    /// Square root on the branch that is continuous on the ball and equals the
    /// principal root at the midpoint.
    pub fn sqrt(&self) -> Result<CBall> {
        let lo = self.abs_lower();
        if !(lo > 0) {
            return Err(Error::RaisePrecision("sqrt of a ball containing zero".into()));
        }
        let p = self.prec();
        let m = Float::with_val(p, self.re.hypot_ref(&self.im));
        // principal sqrt: sqrt((m + re)/2) + i sign(im) sqrt((m - re)/2)
        let (mut sr, mut si);
        if self.re >= 0 {
            sr = Float::with_val(p, &m + &self.re);
            sr >>= 1;
            sr.sqrt_mut();
            si = Float::with_val(p, &self.im / &sr);
            si >>= 1;
        } else {
            si = Float::with_val(p, &m - &self.re);
            si >>= 1;
            si.sqrt_mut();
            if self.im < 0 {
                si = -si;
            }
            sr = Float::with_val(p, &self.im / &si);
            sr >>= 1;
        }
        let out = CBall { re: sr, im: si, rad: Mag::zero() };
        let s = Float::with_val_round(MAG_PREC, lo.sqrt_ref(), Round::Down).0;
        let rad = self.rad.div_lower(&s).add(&round_err(&out.mid_abs(), p).mul_f64(8.0));
        Ok(CBall { rad, ..out })
    }

    /// exp(z).
    pub fn exp(&self) -> CBall {
        let p = self.prec();
        let e = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        let re = Float::with_val(p, &e * &c);
        let im = Float::with_val(p, &e * &s);
        let out = CBall { re, im, rad: Mag::zero() };
        let em = out.mid_abs();
        let rad = em.mul(&self.rad.expm1()).add(&round_err(&em, p).mul_f64(8.0));
        CBall { rad, ..out }
    }

    /// Logarithm on the branch continuous on the ball whose imaginary part at
    /// the midpoint lies in (−π, π].
    pub fn log(&self) -> Result<CBall> {
        let lo = self.abs_lower();
        if !(lo > 0) {
            return Err(Error::RaisePrecision("log of a ball containing zero".into()));
        }
        let p = self.prec();
        let m = Float::with_val(p, self.re.hypot_ref(&self.im));
        let re = Float::with_val(p, m.ln_ref());
        let im = Float::with_val(p, self.im.atan2_ref(&self.re));
        let out = CBall { re, im, rad: Mag::zero() };
        // |log(z) - log(m)| <= -log(1 - r/|m|) <= r / (|m| - r)
        let rad = self.rad.div_lower(&lo).add(&round_err(&out.mid_abs().add(&Mag::from_int(1)), p).mul_f64(4.0));
        Ok(CBall { rad, ..out })
    }

    /// e^{iθ} for real θ given as a ball.
    pub fn cis(theta: &RBall) -> CBall {
        let p = theta.prec();
        let (s, c) = theta.mid.clone().sin_cos(Float::new(p));
        let rad = theta.rad.add(&round_err(&Mag::from_int(2), p));
        CBall { re: c, im: s, rad }
    }

    /// The unique Gaussian integer's real part if the ball is near a real integer.
    pub fn unique_real_integer(&self) -> Option<Integer> {
        if !self.im_ball().abs_upper().lt_f64(0.5) {
            return None;
        }
        self.re_ball().unique_integer()
    }
}

impl<'a> Add<&'a CBall> for &'a CBall {
    type Output = CBall;
    fn add(self, o: &CBall) -> CBall {
        CBall::add(self, o)
    }
}

impl<'a> Sub<&'a CBall> for &'a CBall {
    type Output = CBall;
    fn sub(self, o: &CBall) -> CBall {
        CBall::sub(self, o)
    }
}

impl<'a> Mul<&'a CBall> for &'a CBall {
    type Output = CBall;
    fn mul(self, o: &CBall) -> CBall {
        CBall::mul(self, o)
    }
}

impl<'a> Neg for &'a CBall {
    type Output = CBall;
    fn neg(self) -> CBall {
        CBall::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn third() -> CBall {
        CBall::from_int(1, P).div_int(3)
    }

    #[test]
    fn arithmetic_contains_exact_values() {
        let x = third();
        let y = x.mul_int(3);
        assert!(y.overlaps(&CBall::one(P)));
        assert!(y.rad.lt_f64(1e-55));
        let z = CBall::from_f64(1.0, 2.0, P);
        let w = z.mul(&z.inv().unwrap());
        assert!(w.overlaps(&CBall::one(P)));
        assert!(w.rad.lt_f64(1e-55));
    }

    #[test]
    fn sqrt_branch_is_principal_at_midpoint() {
        let m1 = CBall::from_int(-4, P);
        let s = m1.sqrt().unwrap();
        assert!(s.overlaps(&CBall::from_f64(0.0, 2.0, P)));
        let z = CBall::from_f64(-3.0, -4.0, P);
        let s = z.sqrt().unwrap();
        assert!(s.overlaps(&CBall::from_f64(1.0, -2.0, P)));
        assert!(s.sqr().overlaps(&z));
    }

    #[test]
    fn exp_log_roundtrip() {
        let z = CBall::from_f64(0.3, -1.2, P);
        let w = z.exp().log().unwrap();
        assert!(w.overlaps(&z));
        assert!(w.rad.lt_f64(1e-50));
        let e = CBall::pi(P).mul_i().exp();
        assert!(e.overlaps(&CBall::from_int(-1, P)));
    }

    #[test]
    fn radius_propagates_under_perturbation() {
        let z = CBall::from_f64(2.0, 0.0, P).with_rad(Mag::from_f64(1e-10));
        let s = z.sqrt().unwrap();
        // sqrt(2 + 1e-10) lies inside the enclosure
        let shifted = CBall::from_f64(2.0 + 1e-10, 0.0, P).sqrt().unwrap();
        assert!(s.contains(&shifted.mid()));
        assert!(!s.rad.lt_f64(1e-12));
    }

    #[test]
    fn inverse_of_zero_ball_fails() {
        let z = CBall::zero(P).with_rad(Mag::from_f64(1e-3));
        assert!(z.inv().is_err());
        assert!(z.log().is_err());
    }

    #[test]
    fn unique_integer_detection() {
        let x = RBall::from_f64(3.0000001, 64);
        assert_eq!(x.unique_integer(), Some(Integer::from(3)));
        let y = RBall::new(Float::with_val(64, 3.5), Mag::zero());
        assert_eq!(y.unique_integer(), None);
    }

    #[test]
    fn repr_roundtrip() {
        let z = CBall::from_f64(0.125, -3.5, P).with_rad(Mag::from_f64(1e-40));
        let back = CBall::from_repr(&z.repr(), P).unwrap();
        assert!(back.overlaps(&z));
    }
}
