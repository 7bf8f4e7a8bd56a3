//! Power-series solutions at ordinary points and their analytic continuation.

use rug::Float;

use super::system::ConnectionSystem;
use crate::arith::{bits_for_digits, CBall, CMat, Mag};
use crate::error::{Error, Result};

/// Largest truncation order tried for one step.
const MAX_ORDER: usize = 6000;

/// Majorant data: the normalized solution Φ at the basepoint satisfies
/// ‖Φ_k‖∞ ≤ c_k ρ^{−k} with c_k the coefficients of (1 − u)^{−Mρ}.
#[derive(Clone, Debug)]
pub struct Majorant {
    pub m: Mag,
    pub rho: f64,
}

impl Majorant {
    fn a(&self) -> Mag {
        self.m.mul_f64(self.rho)
    }

    /// Bound for Σ_{k ≥ from} ‖Φ_k‖ s^k, or for the derivative series
    /// Σ_{k ≥ from} k ‖Φ_k‖ s^{k−1} when `deriv`.
    pub fn tail(&self, s: &Mag, from: usize, deriv: bool) -> Mag {
        if self.m.is_zero() {
            return Mag::zero();
        }
        let q = s.div_lower(&Float::with_val(53, self.rho));
        if !q.lt_f64(1.0) {
            return Mag::inf();
        }
        let a = self.a();
        // t_k = c_k q^k
        let mut t = Mag::from_int(1);
        for k in 0..from {
            t = t.mul(&q).mul(&a.add(&Mag::from_int(k as u64))).div(&Mag::from_int(k as u64 + 1));
        }
        let from_f = from as u64;
        let (mut theta, lead) = if deriv {
            let f = from_f.max(1);
            let th = q.mul(&a.add(&Mag::from_int(f))).div(&Mag::from_int(f));
            // k c_k s^{k-1} ρ^{-k} = (k/ρ) t_k / q
            let lead = t.mul(&Mag::from_int(f)).div_lower(&Float::with_val(53, self.rho)).div(&q);
            (th, lead)
        } else {
            let th = q.mul(&a.add(&Mag::from_int(from_f))).div(&Mag::from_int(from_f + 1));
            (th, t)
        };
        theta = theta.max(&q);
        if !theta.lt_f64(1.0) {
            return Mag::inf();
        }
        let one_minus = Float::with_val(53, 1) - theta.as_float();
        lead.div_lower(&(one_minus - Float::with_val(53, 1e-15)))
    }

    /// Smallest order K such that the tail from K+1 at radius s is below
    /// 10^(log10_budget), planned in floating point.
    pub fn plan_order(&self, s: f64, log10_budget: f64) -> Option<usize> {
        if self.m.is_zero() || s == 0.0 {
            return Some(1);
        }
        let q = s / self.rho;
        if q >= 1.0 {
            return None;
        }
        let a = self.a().to_f64();
        let mut lt = 0.0f64;
        for k in 0..MAX_ORDER {
            // lt = log10 t_{k}
            let theta = (q * (k as f64 + a) / (k as f64 + 1.0)).max(q);
            if theta < 1.0 && lt - (1.0 - theta).log10() < log10_budget - 0.5 {
                return Some(k.max(1));
            }
            lt += (q * (k as f64 + a) / (k as f64 + 1.0)).log10();
        }
        None
    }
}

/// Fundamental solution X(z) = Φ(z)·V near a basepoint z₀ ∉ Σ, where Φ is
/// the power-series solution with Φ(z₀) = I and V = X(z₀).
#[derive(Clone, Debug)]
pub struct SolutionGerm {
    basepoint: CBall,
    value: CMat,
    coeffs: Vec<CMat>,
    radius: f64,
    majorant: Majorant,
}

impl SolutionGerm {
    pub fn basepoint(&self) -> &CBall {
        &self.basepoint
    }

    /// X at the basepoint.
    pub fn value(&self) -> &CMat {
        &self.value
    }

    /// Taylor coefficients of Φ.
    pub fn coeffs(&self) -> &[CMat] {
        &self.coeffs
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Certified lower bound on the radius of convergence.
    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn majorant(&self) -> &Majorant {
        &self.majorant
    }

    /// Bound on the truncation error of Φ on |z − z₀| ≤ s.
    pub fn tail_bound(&self, s: f64) -> Mag {
        self.majorant.tail(&Mag::from_f64(s), self.coeffs.len(), false)
    }

    fn eval_phi(&self, z: &CBall, deriv: bool) -> Result<CMat> {
        let w = z.sub(&self.basepoint);
        let s = w.abs_upper();
        let tail = self.majorant.tail(&s, self.coeffs.len(), deriv);
        if !tail.is_finite() {
            return Err(Error::InvalidInput("evaluation point outside the certified disc".into()));
        }
        let n = self.value.rows;
        let prec = self.value.prec();
        let mut acc = CMat::zeros(n, n, prec);
        let k_max = self.coeffs.len() - 1;
        for k in (0..=k_max).rev() {
            if deriv {
                if k == 0 {
                    break;
                }
                acc = acc.scale(&w).add(&self.coeffs[k].scale(&CBall::from_int(k as i64, prec)));
            } else {
                acc = acc.scale(&w).add(&self.coeffs[k]);
            }
        }
        Ok(acc.map(|x| x.clone().with_rad(tail.clone())))
    }

    /// X(z) for z in the certified disc.
    pub fn eval(&self, z: &CBall) -> Result<CMat> {
        Ok(self.eval_phi(z, false)?.mul(&self.value))
    }

    /// X′(z) for z in the certified disc.
    pub fn eval_derivative(&self, z: &CBall) -> Result<CMat> {
        Ok(self.eval_phi(z, true)?.mul(&self.value))
    }
}

fn working_prec(digits: u32) -> u32 {
    bits_for_digits(digits) + 16
}

impl ConnectionSystem {
    /// Taylor coefficients Φ_0..Φ_K of the solution with Φ(z₀) = I.
    fn series_coeffs(&self, z0: &CBall, order: usize) -> Result<Vec<CMat>> {
        let n = self.dimension();
        let prec = z0.prec();
        let (den, numer) = self.common_form();
        let dc = den.taylor_at(z0);
        let d0inv = dc[0].inv().map_err(|_| Error::BasepointNearSingularity)?;
        let ncoef: Vec<Vec<CBall>> = numer.iter().map(|p| p.taylor_at(z0)).collect();
        let nd = ncoef.iter().map(|c| c.len()).max().unwrap_or(0);
        let nmats: Vec<CMat> = (0..nd)
            .map(|i| {
                CMat::from_fn(n, n, |r, c| ncoef[r * n + c].get(i).cloned().unwrap_or_else(|| CBall::zero(prec)))
            })
            .collect();
        let mut x = vec![CMat::identity(n, prec)];
        for k in 0..order {
            let mut s = CMat::zeros(n, n, prec);
            for (i, ni) in nmats.iter().enumerate().take(k + 1) {
                s = s.add(&ni.mul(&x[k - i]));
            }
            for i in 1..dc.len().min(k + 2) {
                let f = dc[i].mul_int((k + 1 - i) as i64);
                s = s.sub(&x[k + 1 - i].scale(&f));
            }
            let c = d0inv.div_int((k + 1) as i64);
            x.push(s.scale(&c));
        }
        Ok(x)
    }

    fn majorant_at(&self, z0: &CBall, rho: f64) -> Result<Majorant> {
        let m = if self.entries().iter().all(|e| e.is_zero()) {
            Mag::zero()
        } else {
            self.sup_norm_on_circle(z0, rho)?
        };
        Ok(Majorant { m, rho })
    }

    /// Choose a majorant radius and order for a step of length s from z₀.
    fn plan_step(&self, z0: &CBall, s: f64, radius: f64, log10_budget: f64) -> Result<(Majorant, usize)> {
        let cands: Vec<f64> = if radius.is_finite() {
            [0.3, 0.5, 0.7, 0.85].iter().map(|f| s + (radius - s) * f).collect()
        } else {
            vec![2.0 * s.max(1e-3), 4.0 * s.max(1e-3), 8.0 * s.max(1e-3)]
        };
        let mut best: Option<(Majorant, usize)> = None;
        for rho in cands {
            let Ok(mj) = self.majorant_at(z0, rho) else { continue };
            if let Some(k) = mj.plan_order(s, log10_budget) {
                if best.as_ref().map_or(true, |(_, bk)| k < *bk) {
                    best = Some((mj, k));
                }
            }
        }
        best.ok_or_else(|| Error::RaisePrecision("no admissible truncation order for step".into()))
    }

    /// Power-series fundamental solution at z₀ with X(z₀) = I, truncated at
    /// order K, at `digits` decimal digits.
    pub fn local_solve(&self, z0: &CBall, order: usize, digits: u32) -> Result<SolutionGerm> {
        if order == 0 {
            return Err(Error::InvalidInput("truncation order must be positive".into()));
        }
        let prec = working_prec(digits);
        let z0 = z0.set_prec(prec);
        let radius = self.distance_to_singularities(&z0);
        if radius <= 1e-30 || radius.is_nan() {
            return Err(Error::BasepointNearSingularity);
        }
        let coeffs = self.series_coeffs(&z0, order)?;
        let rho = if radius.is_finite() { 0.9 * radius } else { 1.0 };
        let majorant = self.majorant_at(&z0, rho)?;
        Ok(SolutionGerm { value: CMat::identity(self.dimension(), prec), basepoint: z0, coeffs, radius, majorant })
    }

    /// Transition matrix Φ_{z0}(z1) of the normalized solution at z₀.
    fn transition(&self, z0: &CBall, z1: &CBall, log10_budget: f64) -> Result<CMat> {
        let prec = z0.prec();
        let w = z1.sub(z0);
        let s = w.abs_upper().to_f64();
        if s == 0.0 {
            return Ok(CMat::identity(self.dimension(), prec));
        }
        let radius = self.distance_to_singularities(z0);
        let (mj, k) = self.plan_step(z0, s, radius, log10_budget)?;
        let coeffs = self.series_coeffs(z0, k)?;
        let g = SolutionGerm {
            basepoint: z0.clone(),
            value: CMat::identity(self.dimension(), prec),
            coeffs,
            radius,
            majorant: mj,
        };
        g.eval_phi(z1, false)
    }

    /// Split a polyline into steps each at most half the distance to Σ.
    pub fn plan_path(&self, path: &[CBall], prec: u32) -> Result<Vec<CBall>> {
        let tol = 1e-40f64;
        let mut pts = vec![path[0].mid().set_prec(prec)];
        for seg in path.windows(2) {
            let b = seg[1].mid().set_prec(prec);
            loop {
                let c = pts.last().unwrap().clone();
                let r = self.distance_to_singularities(&c);
                if r < tol {
                    return Err(Error::PathTooClose);
                }
                let diff = b.sub(&c);
                let len = diff.abs_upper().to_f64();
                if len == 0.0 {
                    break;
                }
                let h = 0.5 * r;
                if len <= h {
                    let rb = self.distance_to_singularities(&b);
                    if rb < tol {
                        return Err(Error::PathTooClose);
                    }
                    pts.push(b.clone());
                    break;
                }
                let f = CBall::from_f64(h / len * (1.0 - 1e-12), 0.0, prec);
                pts.push(c.add(&diff.mul(&f)).mid());
                if pts.len() > 1_000_000 {
                    return Err(Error::PathTooClose);
                }
            }
        }
        Ok(pts)
    }

    /// Continue a germ along a polyline starting at its basepoint.
    pub fn continue_along(&self, germ: &SolutionGerm, path: &[CBall], digits: u32) -> Result<SolutionGerm> {
        if path.is_empty() || !path[0].overlaps(germ.basepoint()) {
            return Err(Error::InvalidInput("path must start at the germ basepoint".into()));
        }
        if path.len() == 1 {
            return Ok(germ.clone());
        }
        let (v, end) = self.transport(germ.value(), path, digits)?;
        let mut g = self.local_solve(&end, germ.order().max(1), digits)?;
        g.value = v;
        Ok(g)
    }

    /// Transport a value of X along a path: returns X(end) and the end point.
    pub fn transport(&self, value: &CMat, path: &[CBall], digits: u32) -> Result<(CMat, CBall)> {
        let steps0 = self.plan_path(path, 64)?.len().max(2);
        let prec = working_prec(digits) + (steps0 as f64).log2().ceil() as u32 + 8;
        let pts = self.plan_path(path, prec)?;
        let nsteps = (pts.len() - 1).max(1) as f64;
        let log10_budget = -(digits as f64) - nsteps.log10() - 2.0;
        let mut v = value.set_prec(prec);
        for w in pts.windows(2) {
            let t = self.transition(&w[0], &w[1], log10_budget)?;
            v = t.mul(&v);
        }
        let bound = 10f64.powf(-(digits as f64) / 2.0);
        if !v.max_rad().lt_f64(bound) {
            return Err(Error::RaisePrecision(format!(
                "continuation error {} exceeds 1e-{}",
                v.max_rad(),
                digits / 2
            )));
        }
        Ok((v, pts.last().unwrap().clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::system::legendre_system;
    use rug::Rational;

    fn q(n: i64, d: i64, prec: u32) -> CBall {
        CBall::from_rational(&Rational::from((n, d)), prec)
    }

    #[test]
    fn basepoint_on_sigma_rejected() {
        let s = legendre_system();
        assert!(matches!(s.local_solve(&CBall::zero(64), 10, 20), Err(Error::BasepointNearSingularity)));
    }

    #[test]
    fn zero_system_is_identity() {
        let s = ConnectionSystem::zero(2);
        let g = s.local_solve(&q(1, 3, 64), 5, 20).unwrap();
        let x = g.eval(&CBall::from_f64(100.0, -7.0, 90)).unwrap();
        assert!(x.sub(&CMat::identity(2, 90)).is_zero_within(1e-20));
        assert!(g.radius().is_infinite());
    }

    #[test]
    fn hypergeometric_series_at_half() {
        // F(t) = Σ ((1/2)_k / k!)^2 t^k; column (F, F') via X(1/2)^{-1}
        let s = legendre_system();
        let digits = 40;
        let g = s.local_solve(&q(1, 2, 64), 400, digits).unwrap();
        let prec = 200;
        let f_at = |t: &Rational| {
            let mut c = Rational::from(1);
            let mut f = Rational::new();
            let mut fp = Rational::new();
            let mut tk = Rational::from(1);
            for k in 0..2000 {
                f += Rational::from(&c * &tk);
                let kk = Rational::from(k + 1);
                let ratio = Rational::from((2 * k + 1, 2)) / &kk;
                let next = Rational::from(&c * &ratio) * &ratio;
                fp += Rational::from(&next * &tk) * &kk;
                c = next;
                tk *= t;
                if k > 400 {
                    break;
                }
            }
            (f, fp)
        };
        // F and F' at 1/2 and 0.6 from the series (converges for |t| < 1)
        let (f0, fp0) = f_at(&Rational::from((1, 2)));
        let t1 = Rational::from((3, 5));
        let x = g.eval(&CBall::from_rational(&t1, prec)).unwrap();
        let pred_f = x[(0, 0)].mul(&CBall::from_rational(&f0, prec)).add(&x[(0, 1)].mul(&CBall::from_rational(&fp0, prec)));
        // series truncated at 400 terms at t = 0.6: error ~ 0.6^400, fine
        let (f1, _) = f_at(&t1);
        let diff = pred_f.sub(&CBall::from_rational(&f1, prec));
        assert!(diff.abs_upper().lt_f64(1e-30), "{:?}", diff);
    }

    #[test]
    fn path_and_reverse_is_identity() {
        let s = legendre_system();
        let p = 64;
        let path = vec![q(1, 2, p), CBall::from_f64(0.5, 0.7, p), CBall::from_f64(-0.8, 0.3, p)];
        let mut rev = path.clone();
        rev.reverse();
        let mut full = path.clone();
        full.extend(rev.into_iter().skip(1));
        let (v, _) = s.transport(&CMat::identity(2, p), &full, 30).unwrap();
        assert!(v.sub(&CMat::identity(2, v.prec())).is_zero_within(1e-25));
    }
}
