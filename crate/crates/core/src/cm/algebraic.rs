//! Algebraic numbers from balls: integer relations on powers, certified by
//! factorization and root isolation; absolute heights via Mahler measure.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{CBall, CBallRepr};
use crate::error::{Error, Result};
use crate::lattice::integer_relations;
use crate::poly::{factor, isolate_roots_qpoly, ZPoly};

/// Digits of headroom demanded beyond 2D·log₁₀ Hmax.
const GUARD_DIGITS: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct AlgebraicNumber {
    /// Primitive, irreducible, positive leading coefficient.
    pub minpoly: ZPoly,
    /// Contains exactly one root of `minpoly`.
    pub root: CBall,
    pub degree: usize,
    /// Absolute multiplicative height M(minpoly)^{1/d}.
    pub height: f64,
    /// log of `height`.
    pub log_height: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AlgebraicRepr {
    pub minpoly: Vec<String>,
    pub root: CBallRepr,
}

fn normalize(p: &ZPoly) -> ZPoly {
    let p = p.primitive();
    if p.lc() < 0 {
        p.scale(&Integer::from(-1))
    } else {
        p
    }
}

/// log M(p) = log|lc| + Σ log max(1, |root|).
fn log_mahler(p: &ZPoly, roots: &[CBall]) -> f64 {
    let lc = p.lc().to_f64().abs().ln();
    lc + roots.iter().map(|r| r.to_c64()).map(|(a, b)| a.hypot(b).ln().max(0.0)).sum::<f64>()
}

impl AlgebraicNumber {
    /// The root of the irreducible `p` nearest to `approx`, which must be
    /// the only root overlapping it.
    pub fn from_minpoly(p: &ZPoly, approx: &CBall, prec: u32) -> Result<AlgebraicNumber> {
        let p = normalize(p);
        if p.degree() == 0 {
            return Err(Error::InvalidInput("constant polynomial".into()));
        }
        let roots = isolate_roots_qpoly(&p.to_qpoly(), prec)?;
        let near: Vec<&CBall> = roots.iter().filter(|r| r.overlaps(approx)).collect();
        if near.len() != 1 {
            return Err(Error::InsufficientPrecision(format!("{} roots overlap the input ball", near.len())));
        }
        let d = p.degree();
        let lh = log_mahler(&p, &roots) / d as f64;
        Ok(AlgebraicNumber { root: near[0].clone(), minpoly: p, degree: d, height: lh.exp(), log_height: lh })
    }

    pub fn rational(q: &Rational, prec: u32) -> AlgebraicNumber {
        let p = ZPoly::new(vec![-Integer::from(q.numer()), Integer::from(q.denom())]);
        let h = q.numer().to_f64().abs().max(q.denom().to_f64());
        AlgebraicNumber { minpoly: p, root: CBall::from_rational(q, prec), degree: 1, height: h, log_height: h.ln() }
    }

    pub fn repr(&self) -> AlgebraicRepr {
        AlgebraicRepr { minpoly: self.minpoly.coeffs().iter().map(|c| c.to_string()).collect(), root: self.root.repr() }
    }

    /// Discriminant of a quadratic minimal polynomial.
    pub fn quadratic_discriminant(&self) -> Option<Integer> {
        if self.degree != 2 {
            return None;
        }
        let c = self.minpoly.coeffs();
        Some(Integer::from(&c[1] * &c[1]) - Integer::from(4) * Integer::from(&c[2] * &c[0]))
    }
}

/// (H, h).
pub fn height(a: &AlgebraicNumber) -> (f64, f64) {
    (a.height, a.log_height)
}

/// Height of a tuple: the max over coordinates.
pub fn height_point(pts: &[AlgebraicNumber]) -> f64 {
    pts.iter().map(|a| a.height).fold(1.0, f64::max)
}

/// Binomial bound on the coefficients of a degree-d minimal polynomial of
/// a number of height ≤ H.
fn coefficient_bound(d: usize, hmax: f64) -> f64 {
    let binom = (0..d / 2).fold(1.0, |b, k| b * (d - k) as f64 / (k + 1) as f64);
    binom * hmax.powi(d as i32)
}

/// Find an algebraic number of degree ≤ `max_degree` and height ≤ `hmax`
/// inside `x`.  `None` means no candidate below the bounds.
pub fn recognize_algebraic(x: &CBall, max_degree: usize, hmax: f64) -> Result<Option<AlgebraicNumber>> {
    let prec = x.prec();
    let rad = if x.rad.is_zero() { 2f64.powi(-(prec as i32)).max(f64::MIN_POSITIVE) } else { x.rad.to_f64() };
    let needed = 2.0 * max_degree as f64 * hmax.log10() + GUARD_DIGITS;
    let have = -rad.log10();
    if have < needed {
        return Err(Error::InsufficientPrecision(format!("{have:.0} digits available, {needed:.0} needed")));
    }
    let weight = ((have - GUARD_DIGITS / 2.0) * std::f64::consts::LOG2_10) as u32;
    let mid = x.mid();
    for d in 1..=max_degree {
        let mut pw = CBall::one(prec);
        let mut vals = vec![];
        for _ in 0..=d {
            vals.push(vec![Float::with_val(prec, &pw.re), Float::with_val(prec, &pw.im)]);
            pw = pw.mul(&mid);
        }
        let bound = coefficient_bound(d, hmax);
        for rel in integer_relations(&vals, weight)?.into_iter().take(2) {
            let p = ZPoly::new(rel);
            if p.degree() == 0 || p.height().to_f64() > bound {
                continue;
            }
            if !p.eval(x).contains_zero() {
                continue;
            }
            for (f, _) in factor(&p).1 {
                if !f.eval(x).contains_zero() {
                    continue;
                }
                if let Ok(a) = AlgebraicNumber::from_minpoly(&f, x, prec) {
                    if a.height <= hmax * (1.0 + 1e-9) {
                        return Ok(Some(a));
                    }
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 256;

    fn zp(c: &[i64]) -> ZPoly {
        ZPoly::from_ints(c)
    }

    #[test]
    fn recognizes_small_examples() {
        let s2 = CBall::from_int(2, P).sqrt().unwrap();
        let a = recognize_algebraic(&s2, 2, 100.0).unwrap().unwrap();
        assert_eq!(a.minpoly, zp(&[-2, 0, 1]));
        assert!((a.height - 2f64.sqrt()).abs() < 1e-12);
        let i = CBall::i(P);
        assert_eq!(recognize_algebraic(&i, 2, 100.0).unwrap().unwrap().minpoly, zp(&[1, 0, 1]));
    }

    #[test]
    fn rationals_round_trip() {
        for (n, d) in [(2, 1), (1, 3), (-7, 12), (0, 1)] {
            let q = Rational::from((n, d));
            let a = recognize_algebraic(&CBall::from_rational(&q, P), 4, 1000.0).unwrap().unwrap();
            assert_eq!(a.minpoly, AlgebraicNumber::rational(&q, P).minpoly);
            assert!((a.height - (n as f64).abs().max(d as f64)).abs() < 1e-9);
        }
    }

    #[test]
    fn precision_precondition() {
        let x = CBall::from_f64(1.5, 0.0, 64).with_rad(crate::arith::Mag::from_f64(1e-8));
        assert!(matches!(recognize_algebraic(&x, 4, 100.0), Err(Error::InsufficientPrecision(_))));
    }

    #[test]
    fn transcendental_not_recognized() {
        let pi = CBall::pi(P);
        assert!(recognize_algebraic(&pi, 3, 50.0).unwrap().is_none());
    }
}
