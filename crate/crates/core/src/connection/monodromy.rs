//! Monodromy along closed loops and quasi-unipotency certification.
//!
//! Convention: continuing X along γ gives X·M_γ in terms of the starting
//! basis, so going around γ₁ then γ₂ gives M_{γ₂}·M_{γ₁}.

use super::system::ConnectionSystem;
use crate::arith::{bits_for_digits, CBall, CMat};
use crate::error::{Error, Result};

/// Matrix (M^k − I)^n certified to be within `residual` of zero.
#[derive(Clone, Debug, PartialEq)]
pub struct QuasiUnipotency {
    pub k: u32,
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct MonodromyMatrix {
    pub matrix: CMat,
    pub path: Vec<CBall>,
    pub quasi_unipotency: Option<QuasiUnipotency>,
}

impl MonodromyMatrix {
    /// Largest entry of (M^k − I)^e.
    pub fn unipotency_residual(&self, k: u32, e: u32) -> f64 {
        let n = self.matrix.rows;
        let p = self.matrix.prec();
        self.matrix.pow(k).sub(&CMat::identity(n, p)).pow(e).max_abs().to_f64()
    }

    pub fn det(&self) -> CBall {
        self.matrix.det()
    }
}

/// Polygon with `n` vertices on the circle |z − c| = r, starting at angle
/// `start` (radians), counterclockwise if `ccw`, closed (last = first).
pub fn circle_loop(c: &CBall, r: f64, start: f64, n: usize, ccw: bool, prec: u32) -> Vec<CBall> {
    let sgn = if ccw { 1.0 } else { -1.0 };
    let mut out: Vec<CBall> = (0..n)
        .map(|k| {
            let th = start + sgn * 2.0 * std::f64::consts::PI * k as f64 / n as f64;
            c.add(&CBall::from_f64(r * th.cos(), r * th.sin(), prec)).mid()
        })
        .collect();
    out.push(out[0].clone());
    out
}

impl ConnectionSystem {
    /// Monodromy along a closed polyline, with quasi-unipotency search over
    /// k ≤ `k_max`.
    pub fn monodromy_along(&self, path: &[CBall], digits: u32, k_max: u32) -> Result<MonodromyMatrix> {
        if path.len() < 2 || !path[0].overlaps(path.last().unwrap()) {
            return Err(Error::InvalidInput("loop must be closed".into()));
        }
        let n = self.dimension();
        let prec = bits_for_digits(digits);
        let (m, _) = self.transport(&CMat::identity(n, prec), path, digits)?;
        let det = m.det();
        if det.contains_zero() {
            return Err(Error::RaisePrecision("monodromy determinant not separated from zero".into()));
        }
        let mut mm = MonodromyMatrix { matrix: m, path: path.to_vec(), quasi_unipotency: None };
        let tol = 10f64.powf(-(digits as f64) / 2.0);
        for k in 1..=k_max {
            let r = mm.unipotency_residual(k, n as u32);
            if r < tol {
                mm.quasi_unipotency = Some(QuasiUnipotency { k, residual: r });
                break;
            }
        }
        Ok(mm)
    }

    /// Monodromy around a finite singular point `s`, based at `base`: the loop
    /// goes around the circle centred at s through `base` counterclockwise.
    pub fn monodromy(&self, s: &CBall, base: &CBall, digits: u32) -> Result<MonodromyMatrix> {
        let prec = bits_for_digits(digits);
        let d = base.sub(s);
        let (dr, di) = d.to_c64();
        let r = dr.hypot(di);
        // the circle must enclose s only
        for t in self.finite_singularities() {
            if t.overlaps(s) {
                continue;
            }
            let dist = t.sub(s).abs_lower().to_f64();
            let tr = t.sub(s).abs_upper().to_f64();
            if (dist - r).abs() < r * 0.05 || tr < r {
                return Err(Error::PathTooClose);
            }
        }
        let mut path = circle_loop(s, r, di.atan2(dr), 64, true, prec);
        path[0] = base.clone();
        *path.last_mut().unwrap() = base.clone();
        self.monodromy_along(&path, digits, 12)
    }
}

impl ConnectionSystem {
    /// Monodromy of a clockwise circle of radius `r` centred at `base` that
    /// encloses every finite singularity, joined to `base` by a vertical
    /// segment from below: the loop around ∞.
    pub fn monodromy_at_infinity(&self, base: &CBall, r: f64, digits: u32) -> Result<MonodromyMatrix> {
        let prec = bits_for_digits(digits);
        for t in self.finite_singularities() {
            if t.sub(base).abs_upper().to_f64() > 0.9 * r {
                return Err(Error::PathTooClose);
            }
        }
        let bottom = base.sub(&CBall::from_f64(0.0, r, prec)).mid();
        let circle = circle_loop(base, r, -std::f64::consts::FRAC_PI_2, 64, false, prec);
        let mut path = vec![base.clone(), bottom.clone()];
        path.extend(circle.into_iter().skip(1));
        *path.last_mut().unwrap() = bottom;
        path.push(base.clone());
        self.monodromy_along(&path, digits, 12)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::system::legendre_system;
    use rug::Rational;

    fn half(prec: u32) -> CBall {
        CBall::from_rational(&Rational::from((1, 2)), prec)
    }

    #[test]
    fn legendre_local_monodromies_unipotent() {
        let s = legendre_system();
        let p = 200;
        let m0 = s.monodromy(&CBall::zero(p), &half(p), 50).unwrap();
        let m1 = s.monodromy(&CBall::one(p), &half(p), 50).unwrap();
        for m in [&m0, &m1] {
            assert_eq!(m.quasi_unipotency.as_ref().unwrap().k, 1);
            assert!(m.unipotency_residual(1, 2) < 1e-30);
            // not the identity
            assert!(m.unipotency_residual(1, 1) > 0.1);
        }
    }

    #[test]
    fn loop_without_singularity_is_trivial() {
        let s = legendre_system();
        let p = 128;
        let path = circle_loop(&CBall::from_f64(0.5, 2.0, p), 0.5, 0.0, 16, true, p);
        let m = s.monodromy_along(&path, 30, 4).unwrap();
        assert!(m.unipotency_residual(1, 1) < 1e-25);
    }

    #[test]
    fn legendre_monodromy_relation() {
        let s = legendre_system();
        let p = 200;
        let digits = 50;
        let m0 = s.monodromy(&CBall::zero(p), &half(p), digits).unwrap();
        let m1 = s.monodromy(&CBall::one(p), &half(p), digits).unwrap();
        let minf = s.monodromy_at_infinity(&half(p), 1.5, digits).unwrap();
        assert_eq!(minf.quasi_unipotency.as_ref().unwrap().k, 2);
        let prod = m0.matrix.mul(&m1.matrix).mul(&minf.matrix);
        assert!(prod.sub(&CMat::identity(2, prod.prec())).is_zero_within(1e-30));
    }
}
