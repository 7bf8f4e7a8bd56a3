//! Integer polynomials.

use std::fmt;

use rug::{Integer, Rational};

use super::qpoly::QPoly;
use crate::arith::CBall;

/// Dense integer polynomial, coefficients from degree 0 upward.
#[derive(Clone, PartialEq, Eq, Default, Hash)]
pub struct ZPoly {
    coeffs: Vec<Integer>,
}

impl fmt::Debug for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_qpoly())
    }
}

impl fmt::Display for ZPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.to_qpoly())
    }
}

impl ZPoly {
    pub fn new(mut coeffs: Vec<Integer>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        ZPoly { coeffs }
    }

    pub fn from_ints(c: &[i64]) -> Self {
        ZPoly::new(c.iter().map(|&x| Integer::from(x)).collect())
    }

    pub fn zero() -> Self {
        ZPoly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        ZPoly::from_ints(&[1])
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Integer {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn lc(&self) -> Integer {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn content(&self) -> Integer {
        self.coeffs.iter().fold(Integer::new(), |g, c| g.gcd(c))
    }

    /// Primitive part with positive leading coefficient.
    pub fn primitive(&self) -> ZPoly {
        if self.is_zero() {
            return ZPoly::zero();
        }
        let mut g = self.content();
        if self.lc() < 0 {
            g = -g;
        }
        ZPoly::new(self.coeffs.iter().map(|c| Integer::from(c.div_exact_ref(&g))).collect())
    }

    /// Primitive integer multiple of a rational polynomial.
    pub fn from_qpoly(p: &QPoly) -> ZPoly {
        let l = p.denom_lcm();
        ZPoly::new(
            p.coeffs()
                .iter()
                .map(|c| Integer::from(c.numer() * Integer::from(&l / c.denom())))
                .collect(),
        )
        .primitive()
    }

    pub fn to_qpoly(&self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| Rational::from(c)).collect())
    }

    pub fn add(&self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &ZPoly) -> ZPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        ZPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &ZPoly) -> ZPoly {
        if self.is_zero() || o.is_zero() {
            return ZPoly::zero();
        }
        let mut out = vec![Integer::new(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += Integer::from(a * b);
            }
        }
        ZPoly::new(out)
    }

    pub fn scale(&self, s: &Integer) -> ZPoly {
        ZPoly::new(self.coeffs.iter().map(|c| Integer::from(c * s)).collect())
    }

    /// Exact quotient if `d` divides `self` over ℤ.
    pub fn div_exact(&self, d: &ZPoly) -> Option<ZPoly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(ZPoly::zero());
        }
        if self.degree() < d.degree() {
            return None;
        }
        let dd = d.degree();
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        let mut q = vec![Integer::new(); r.len() - dd];
        for i in (0..q.len()).rev() {
            let (c, rem) = r[i + dd].clone().div_rem(lc.clone());
            if rem != 0 {
                return None;
            }
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[i + j] -= Integer::from(&c * dc);
                }
            }
            q[i] = c;
        }
        if r.iter().take(dd).any(|c| *c != 0) {
            return None;
        }
        Some(ZPoly::new(q))
    }

    pub fn derivative(&self) -> ZPoly {
        ZPoly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| Integer::from(c * i as u64)).collect())
    }

    /// Max absolute value of the coefficients (naive height).
    pub fn height(&self) -> Integer {
        self.coeffs.iter().map(|c| c.clone().abs()).max().unwrap_or_default()
    }

    /// ℓ¹ norm of the coefficient vector.
    pub fn l1_norm(&self) -> Integer {
        self.coeffs.iter().fold(Integer::new(), |s, c| s + c.clone().abs())
    }

    /// Upper bound for the ℓ² norm (integer ceiling).
    pub fn l2_norm_ceil(&self) -> Integer {
        let s = self.coeffs.iter().fold(Integer::new(), |s, c| s + Integer::from(c * c));
        let r = s.clone().sqrt();
        if Integer::from(&r * &r) == s {
            r
        } else {
            r + 1
        }
    }

    pub fn eval(&self, z: &CBall) -> CBall {
        let p = z.prec();
        let mut acc = CBall::zero(p);
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(z).add(&CBall::from_rational(&Rational::from(c), p));
        }
        acc
    }

    pub fn eval_int(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    /// Squarefree decomposition: primitive factors `g_i` with self ∝ Π g_i^i.
    pub fn squarefree_decomposition(&self) -> Vec<(ZPoly, u32)> {
        // Yun's algorithm over ℚ, then primitive parts.
        let f = self.to_qpoly();
        let mut out = vec![];
        if f.deg0() == 0 {
            return out;
        }
        let fp = f.derivative();
        let mut a = f.gcd(&fp);
        let mut b = f.divrem(&a).0;
        let mut c = fp.divrem(&a).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        loop {
            a = b.gcd(&d);
            if a.deg0() > 0 {
                out.push((ZPoly::from_qpoly(&a), i));
            }
            b = b.divrem(&a).0;
            if b.deg0() == 0 {
                break;
            }
            c = d.divrem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Reduction modulo `m` into symmetric residues.
    pub fn symmetric_mod(&self, m: &Integer) -> ZPoly {
        let half = Integer::from(m >> 1);
        ZPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    let mut r = Integer::from(c % m);
                    if r < 0 {
                        r += m;
                    }
                    if r > half {
                        r -= m;
                    }
                    r
                })
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_division() {
        let a = ZPoly::from_ints(&[-1, 0, 1]);
        assert_eq!(a.div_exact(&ZPoly::from_ints(&[1, 1])), Some(ZPoly::from_ints(&[-1, 1])));
        assert_eq!(a.div_exact(&ZPoly::from_ints(&[1, 2])), None);
    }

    #[test]
    fn yun_decomposition() {
        // (x-1)^2 (x+2)
        let f = ZPoly::from_ints(&[-1, 1]).mul(&ZPoly::from_ints(&[-1, 1])).mul(&ZPoly::from_ints(&[2, 1]));
        let d = f.squarefree_decomposition();
        assert_eq!(d, vec![(ZPoly::from_ints(&[2, 1]), 1), (ZPoly::from_ints(&[-1, 1]), 2)]);
    }

    #[test]
    fn symmetric_residues() {
        let f = ZPoly::from_ints(&[7, -7, 3]);
        assert_eq!(f.symmetric_mod(&Integer::from(5)), ZPoly::from_ints(&[2, -2, -2]));
    }
}
