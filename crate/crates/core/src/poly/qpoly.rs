//! Univariate polynomials and rational functions with exact rational
//! coefficients.

use std::fmt;

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::CBall;
use crate::error::{Error, Result};

/// Dense polynomial, coefficients from degree 0 upward, no trailing zeros.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct QPoly {
    coeffs: Vec<Rational>,
}

impl fmt::Debug for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{i}")?,
            }
        }
        Ok(())
    }
}

/// Parse "p/q" or "p" into a rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    Rational::parse(s)
        .map(Rational::from)
        .map_err(|e| Error::Parse(format!("bad rational `{s}`: {e}")))
}

/// Absolute multiplicative height of a rational: max(|p|, |q|).
pub fn rational_height(q: &Rational) -> Integer {
    let n = q.numer().clone().abs();
    let d = q.denom().clone();
    if n > d {
        n
    } else {
        d
    }
}

impl QPoly {
    pub fn zero() -> Self {
        QPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        QPoly::constant(Rational::from(1))
    }

    pub fn constant(c: Rational) -> Self {
        QPoly::new(vec![c])
    }

    /// The polynomial t.
    pub fn x() -> Self {
        QPoly::new(vec![Rational::new(), Rational::from(1)])
    }

    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        QPoly::new(c.iter().map(|&x| Rational::from(x)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with deg 0 = −1 represented as `None`.
    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn deg0(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn add(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn neg(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }

    pub fn scale(&self, s: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    pub fn mul(&self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![Rational::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Rational::from(a * b);
            }
        }
        QPoly::new(out)
    }

    pub fn pow(&self, k: u32) -> QPoly {
        let mut acc = QPoly::one();
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    /// Multiply by t^k.
    pub fn shift_up(&self, k: usize) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let mut c = vec![Rational::new(); k];
        c.extend(self.coeffs.iter().cloned());
        QPoly::new(c)
    }

    pub fn derivative(&self) -> QPoly {
        QPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Rational::from(c * Integer::from(i)))
                .collect(),
        )
    }

    pub fn divrem(&self, d: &QPoly) -> (QPoly, QPoly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg0();
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() < d.coeffs.len() {
            return (QPoly::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let c = Rational::from(&r[i + dd] / &lc);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= Rational::from(&c * dc);
                }
            }
            q[i] = c;
        }
        r.truncate(dd);
        (QPoly::new(q), QPoly::new(r))
    }

    pub fn monic(&self) -> QPoly {
        if self.is_zero() {
            return QPoly::zero();
        }
        let lc = self.lc();
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(c / &lc)).collect())
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, o: &QPoly) -> QPoly {
        let mut a = self.clone();
        let mut b = o.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Squarefree part (monic).
    pub fn squarefree(&self) -> QPoly {
        if self.deg0() == 0 {
            return self.monic();
        }
        let g = self.gcd(&self.derivative());
        self.divrem(&g).0.monic()
    }

    /// p(t + s) for rational s.
    pub fn taylor_shift(&self, s: &Rational) -> QPoly {
        let mut out = QPoly::zero();
        let lin = QPoly::new(vec![s.clone(), Rational::from(1)]);
        for c in self.coeffs.iter().rev() {
            out = out.mul(&lin).add(&QPoly::constant(c.clone()));
        }
        out
    }

    /// Coefficients of p(z0 + w) in w, evaluated in ball arithmetic.
    pub fn taylor_at(&self, z0: &CBall) -> Vec<CBall> {
        let p = z0.prec();
        let n = self.coeffs.len();
        let mut out: Vec<CBall> = self.coeffs.iter().map(|c| CBall::from_rational(c, p)).collect();
        // repeated synthetic division (Horner shift)
        for k in 0..n {
            for j in (k..n.saturating_sub(1)).rev() {
                let t = out[j].add(&out[j + 1].mul(z0));
                out[j] = t;
            }
        }
        out
    }

    pub fn eval(&self, z: &CBall) -> CBall {
        let p = z.prec();
        let mut acc = CBall::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&CBall::from_rational(c, p));
        }
        acc
    }

    pub fn eval_rational(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Least common multiple of coefficient denominators.
    pub fn denom_lcm(&self) -> Integer {
        self.coeffs.iter().fold(Integer::from(1), |acc, c| acc.lcm(c.denom()))
    }

    /// Max height of the coefficients.
    pub fn coeff_height(&self) -> Integer {
        self.coeffs.iter().map(rational_height).max().unwrap_or_else(|| Integer::from(1))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(|c| c.to_string()).collect()
    }

    pub fn from_strings(s: &[String]) -> Result<QPoly> {
        Ok(QPoly::new(s.iter().map(|x| parse_rational(x)).collect::<Result<_>>()?))
    }
}

/// A reduced quotient of polynomials with monic denominator.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RationalFunction {
    num: QPoly,
    den: QPoly,
}

#[derive(Serialize, Deserialize, Clone, Debug, PartialEq)]
pub struct RationalFunctionRepr {
    pub num: Vec<String>,
    pub den: Vec<String>,
}

impl RationalFunction {
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(RationalFunction { num, den: QPoly::one() });
        }
        let g = num.gcd(&den);
        let (n, _) = num.divrem(&g);
        let (d, _) = den.divrem(&g);
        let lc = d.lc();
        Ok(RationalFunction {
            num: n.scale(&Rational::from(lc.recip_ref())),
            den: d.monic(),
        })
    }

    pub fn zero() -> Self {
        RationalFunction { num: QPoly::zero(), den: QPoly::one() }
    }

    pub fn poly(p: QPoly) -> Self {
        RationalFunction { num: p, den: QPoly::one() }
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::poly(QPoly::constant(c))
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn add(&self, o: &RationalFunction) -> RationalFunction {
        let n = self.num.mul(&o.den).add(&o.num.mul(&self.den));
        RationalFunction::new(n, self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn sub(&self, o: &RationalFunction) -> RationalFunction {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> RationalFunction {
        RationalFunction { num: self.num.neg(), den: self.den.clone() }
    }

    pub fn mul(&self, o: &RationalFunction) -> RationalFunction {
        RationalFunction::new(self.num.mul(&o.num), self.den.mul(&o.den)).expect("nonzero denominators")
    }

    pub fn scale(&self, s: &Rational) -> RationalFunction {
        RationalFunction::new(self.num.scale(s), self.den.clone()).expect("nonzero denominator")
    }

    pub fn derivative(&self) -> RationalFunction {
        let n = self.num.derivative().mul(&self.den).sub(&self.num.mul(&self.den.derivative()));
        RationalFunction::new(n, self.den.mul(&self.den)).expect("nonzero denominator")
    }

    /// max(deg num, deg den).
    pub fn degree(&self) -> usize {
        self.num.deg0().max(self.den.deg0())
    }

    /// Max height of the coefficients of numerator and (monic) denominator;
    /// 1 for the zero function.
    pub fn height(&self) -> Integer {
        if self.is_zero() {
            return Integer::from(1);
        }
        let a = self.num.coeff_height();
        let b = self.den.coeff_height();
        if a > b {
            a
        } else {
            b
        }
    }

    /// Order of pole at infinity: deg num − deg den (positive means a pole).
    pub fn degree_growth(&self) -> i64 {
        if self.is_zero() {
            return i64::MIN;
        }
        self.num.deg0() as i64 - self.den.deg0() as i64
    }

    /// f(1/u), reduced.
    pub fn invert_variable(&self) -> RationalFunction {
        let d = self.num.deg0().max(self.den.deg0());
        // f(1/u) = u^d num(1/u) / (u^d den(1/u))
        let rev = |p: &QPoly| {
            let mut c: Vec<Rational> = (0..=d).map(|i| p.coeff(i)).collect();
            c.reverse();
            QPoly::new(c)
        };
        RationalFunction::new(rev(&self.num), rev(&self.den)).expect("reversal of nonzero den")
    }

    /// Multiply by t^k (k may be negative).
    pub fn mul_power(&self, k: i64) -> RationalFunction {
        if k >= 0 {
            RationalFunction::new(self.num.shift_up(k as usize), self.den.clone()).unwrap()
        } else {
            RationalFunction::new(self.num.clone(), self.den.shift_up((-k) as usize)).unwrap()
        }
    }

    /// f(t + s).
    pub fn shift(&self, s: &Rational) -> RationalFunction {
        RationalFunction::new(self.num.taylor_shift(s), self.den.taylor_shift(s)).unwrap()
    }

    /// Valuation at t = 0: order of zero (positive) or pole (negative).
    pub fn valuation_at_zero(&self) -> i64 {
        if self.is_zero() {
            return i64::MAX;
        }
        let v = |p: &QPoly| p.coeffs().iter().position(|c| *c != 0).unwrap_or(0) as i64;
        v(&self.num) - v(&self.den)
    }

    pub fn eval(&self, z: &CBall) -> Result<CBall> {
        self.num.eval(z).div(&self.den.eval(z))
    }

    pub fn repr(&self) -> RationalFunctionRepr {
        RationalFunctionRepr { num: self.num.to_strings(), den: self.den.to_strings() }
    }

    pub fn from_repr(r: &RationalFunctionRepr) -> Result<Self> {
        RationalFunction::new(QPoly::from_strings(&r.num)?, QPoly::from_strings(&r.den)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn gcd_and_division() {
        let a = QPoly::from_ints(&[-1, 0, 1]); // t^2 - 1
        let b = QPoly::from_ints(&[1, 1]); // t + 1
        let (quo, r) = a.divrem(&b);
        assert!(r.is_zero());
        assert_eq!(quo, QPoly::from_ints(&[-1, 1]));
        assert_eq!(a.gcd(&b.mul(&QPoly::from_ints(&[3, 1]))), b);
    }

    #[test]
    fn rational_function_is_reduced() {
        let f = RationalFunction::new(QPoly::from_ints(&[-1, 0, 1]), QPoly::from_ints(&[2, 2])).unwrap();
        assert_eq!(f.den(), &QPoly::one());
        assert_eq!(f.num(), &QPoly::new(vec![q(-1, 2), q(1, 2)]));
    }

    #[test]
    fn legendre_entry_height() {
        // (1/4) / (t(1 - t))
        let f = RationalFunction::new(QPoly::new(vec![q(1, 4)]), QPoly::from_ints(&[0, 1, -1])).unwrap();
        assert_eq!(f.height(), 4);
        assert_eq!(f.degree(), 2);
        assert_eq!(RationalFunction::zero().height(), 1);
    }

    #[test]
    fn taylor_shift_matches_taylor_at() {
        let p = QPoly::from_ints(&[1, -3, 0, 2]);
        let s = q(1, 3);
        let exact = p.taylor_shift(&s);
        let balls = p.taylor_at(&CBall::from_rational(&s, 128));
        for (i, b) in balls.iter().enumerate() {
            assert!(b.overlaps(&CBall::from_rational(&exact.coeff(i), 128)));
        }
    }

    #[test]
    fn invert_variable_roundtrip() {
        let f = RationalFunction::new(QPoly::from_ints(&[0, 1]), QPoly::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(f.invert_variable().invert_variable(), f);
    }
}
