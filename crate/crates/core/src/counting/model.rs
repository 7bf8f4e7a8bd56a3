//! Certified local models of analytic functions: polynomials in w = z − c
//! (and optionally in L = log w) with ball coefficients plus a uniform
//! remainder, valid on |w| ≤ r, |L| ≤ ℓ.

use rug::float::Round;
use rug::Float;

use crate::arith::mag::MAG_PREC;
use crate::arith::{CBall, Mag};
use crate::error::{Error, Result};

/// e^x rounded up, for radii far below the f64 range.
pub fn mag_exp(x: f64) -> Mag {
    let e = Float::with_val(64, x).exp();
    Mag(Float::with_val_round(MAG_PREC, &e, Round::Up).0).mul_f64(1.0 + 1e-12)
}

#[derive(Clone, Debug)]
pub struct Model {
    /// coeffs[m][k] multiplies L^m w^k.
    pub coeffs: Vec<Vec<CBall>>,
    /// Upper bound for |w|.
    pub r: Mag,
    /// Upper bound for |L| (unused when there is no L-dependence).
    pub ell: Mag,
    /// Highest retained w-degree.
    pub order: usize,
    pub err: Mag,
    prec: u32,
}

impl Model {
    pub fn constant(c: CBall, r: Mag, ell: Mag, order: usize) -> Model {
        let prec = c.prec();
        Model { coeffs: vec![vec![c]], r, ell, order, err: Mag::zero(), prec }
    }

    /// Σ c_k w^k + err.
    pub fn taylor(coeffs: Vec<CBall>, r: Mag, order: usize, err: Mag) -> Model {
        let prec = coeffs.first().map_or(64, CBall::prec);
        let mut m = Model { coeffs: vec![coeffs], r, ell: Mag::zero(), order, err, prec };
        m.truncate();
        m
    }

    /// Σ_m L^m P_m(w) + err.
    pub fn with_log(coeffs: Vec<Vec<CBall>>, r: Mag, ell: Mag, order: usize, err: Mag) -> Model {
        let prec = coeffs.first().and_then(|c| c.first()).map_or(64, CBall::prec);
        let mut m = Model { coeffs, r, ell, order, err, prec };
        m.truncate();
        m
    }

    pub fn prec(&self) -> u32 {
        self.prec
    }

    pub fn log_degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn weight(&self, m: usize, k: usize) -> Mag {
        self.ell.pow(m as u32).mul(&self.r.pow(k as u32))
    }

    /// Drop w-degrees above `order`, moving their bound into `err`.
    fn truncate(&mut self) {
        let mut extra = Mag::zero();
        for (m, row) in self.coeffs.iter_mut().enumerate() {
            if row.len() > self.order + 1 {
                for (k, c) in row.iter().enumerate().skip(self.order + 1) {
                    extra = extra.add(&c.abs_upper().mul(&self.ell.pow(m as u32)).mul(&self.r.pow(k as u32)));
                }
                row.truncate(self.order + 1);
            }
        }
        self.err = self.err.add(&extra);
    }

    fn zero_like(&self) -> Model {
        Model {
            coeffs: vec![vec![]],
            r: self.r.clone(),
            ell: self.ell.clone(),
            order: self.order,
            err: Mag::zero(),
            prec: self.prec,
        }
    }

    /// Sup of the polynomial part on the domain.
    pub fn poly_bound(&self) -> Mag {
        let mut s = Mag::zero();
        for (m, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.re.is_zero() || !c.im.is_zero() || !c.rad.is_zero() {
                    s = s.add(&c.abs_upper().mul(&self.weight(m, k)));
                }
            }
        }
        s
    }

    pub fn bound(&self) -> Mag {
        self.poly_bound().add(&self.err)
    }

    pub fn add(&self, o: &Model) -> Model {
        let mut out = self.zero_like();
        out.order = self.order.max(o.order);
        let ml = self.coeffs.len().max(o.coeffs.len());
        out.coeffs = (0..ml)
            .map(|m| {
                let a = self.coeffs.get(m).map_or(&[][..], |v| &v[..]);
                let b = o.coeffs.get(m).map_or(&[][..], |v| &v[..]);
                (0..a.len().max(b.len()))
                    .map(|k| match (a.get(k), b.get(k)) {
                        (Some(x), Some(y)) => x.add(y),
                        (Some(x), None) => x.clone(),
                        (None, Some(y)) => y.clone(),
                        _ => unreachable!(),
                    })
                    .collect()
            })
            .collect();
        out.err = self.err.add(&o.err);
        out
    }

    pub fn neg(&self) -> Model {
        let mut out = self.clone();
        for row in out.coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = c.neg();
            }
        }
        out
    }

    pub fn sub(&self, o: &Model) -> Model {
        self.add(&o.neg())
    }

    pub fn scale(&self, s: &CBall) -> Model {
        let mut out = self.clone();
        for row in out.coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = c.mul(s);
            }
        }
        out.err = self.err.mul(&s.abs_upper());
        out
    }

    pub fn mul(&self, o: &Model) -> Model {
        let mut out = self.zero_like();
        out.order = self.order.max(o.order);
        let ml = self.coeffs.len() + o.coeffs.len() - 1;
        let zero = CBall::zero(self.prec);
        let mut rows: Vec<Vec<CBall>> = vec![vec![]; ml];
        let mut dropped = Mag::zero();
        for (ma, ra) in self.coeffs.iter().enumerate() {
            for (mb, rb) in o.coeffs.iter().enumerate() {
                let row = &mut rows[ma + mb];
                for (i, a) in ra.iter().enumerate() {
                    if a.re.is_zero() && a.im.is_zero() && a.rad.is_zero() {
                        continue;
                    }
                    for (j, b) in rb.iter().enumerate() {
                        if i + j > out.order {
                            dropped = dropped.add(&a.abs_upper().mul(&b.abs_upper()).mul(&self.weight(ma + mb, i + j)));
                            continue;
                        }
                        if row.len() <= i + j {
                            row.resize(i + j + 1, zero.clone());
                        }
                        row[i + j] = row[i + j].add(&a.mul(b));
                    }
                }
            }
        }
        out.coeffs = rows;
        // |fg − PfPg| ≤ ef·(|Pg| + eg) + eg·|Pf|
        let pa = self.poly_bound();
        let pb = o.poly_bound();
        out.err = self.err.mul(&pb.add(&o.err)).add(&o.err.mul(&pa)).add(&dropped);
        out
    }

    pub fn pow(&self, n: u32) -> Model {
        let mut acc = Model::constant(CBall::one(self.prec), self.r.clone(), self.ell.clone(), self.order);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// 1/g.  Pure Taylor models: the truncated reciprocal series P from the
    /// division recurrence, with |1/g − P| ≤ |P|·|E|/(1 − |E|) where
    /// gP = 1 + E.  Log models: the geometric series in u = g/g₀ − 1.
    pub fn recip(&self) -> Result<Model> {
        let g0 = self.coeffs[0].first().cloned().unwrap_or_else(|| CBall::zero(self.prec));
        let inv0 = g0.inv().map_err(|_| Error::InsufficientPrecision("model constant term vanishes".into()))?;
        if self.coeffs.len() == 1 {
            let g = &self.coeffs[0];
            let mut h = vec![inv0.clone()];
            for k in 1..=self.order {
                let mut s = CBall::zero(self.prec);
                for j in 1..=k.min(g.len() - 1) {
                    s = s.add(&g[j].mul(&h[k - j]));
                }
                h.push(s.mul(&inv0).neg());
            }
            let p = Model { coeffs: vec![h], err: Mag::zero(), ..self.clone() };
            let mut e = self.mul(&p);
            e.coeffs[0][0] = e.coeffs[0][0].sub(&CBall::one(self.prec));
            let eb = e.bound();
            if !eb.lt_f64(0.5) {
                return Err(Error::IncreaseSubdivision(format!("reciprocal not certified on the disc ({eb})")));
            }
            let mut out = p.clone();
            out.err = p.poly_bound().mul(&eb).mul_f64(2.0);
            return Ok(out);
        }
        let mut u = self.scale(&inv0);
        u.coeffs[0][0] = CBall::zero(self.prec);
        let b = u.bound();
        if !b.lt_f64(0.5) {
            return Err(Error::IncreaseSubdivision(format!("denominator varies too much on the disc ({b})")));
        }
        let target = Mag::pow2(-(self.prec as i32) - 4);
        let mut n = 1;
        while !b.pow(n + 1).le(&target) && n < 4 * self.prec {
            n += 1;
        }
        let one = Model::constant(CBall::one(self.prec), self.r.clone(), self.ell.clone(), self.order);
        let mut acc = one.clone();
        for _ in 0..n {
            acc = one.sub(&u.mul(&acc));
        }
        // tail Σ_{j>n} B^j ≤ B^{n+1}/(1 − B) ≤ 2B^{n+1}
        acc.err = acc.err.add(&b.pow(n + 1).mul_f64(2.0));
        Ok(acc.scale(&inv0))
    }

    pub fn div(&self, o: &Model) -> Result<Model> {
        Ok(self.mul(&o.recip()?))
    }

    /// Value at (w, L).
    pub fn eval(&self, w: &CBall, l: Option<&CBall>) -> CBall {
        let mut acc = CBall::zero(self.prec);
        for row in self.coeffs.iter().rev() {
            let mut p = CBall::zero(self.prec);
            for c in row.iter().rev() {
                p = p.mul(w).add(c);
            }
            acc = match l {
                Some(l) => acc.mul(l).add(&p),
                None => p,
            };
        }
        acc.with_rad(self.err.clone())
    }

    /// Same function at a lower working precision, dropping the terms that
    /// no longer matter into the remainder.
    pub fn coarsen(&self, prec: u32) -> Model {
        let mut m = self.clone();
        m.prec = prec;
        for row in m.coeffs.iter_mut() {
            for c in row.iter_mut() {
                *c = c.set_prec(prec);
            }
        }
        let cut = self.poly_bound().mul(&Mag::pow2(-(prec as i32)));
        let row = &m.coeffs[0];
        let mut tail = Mag::zero();
        let mut k = row.len();
        while k > 1 {
            let t = tail.add(&row[k - 1].abs_upper().mul(&m.r.pow(k as u32 - 1)));
            if !t.le(&cut) {
                break;
            }
            tail = t;
            k -= 1;
        }
        if m.coeffs.len() == 1 && k < row.len() {
            m.order = k - 1;
            m.truncate();
        }
        m
    }

    /// Enclosure over a wide ball w (pure Taylor models): second-order
    /// mean-value form about the midpoint, which avoids the cancellation
    /// blow-up of ball Horner.
    pub fn eval_ball(&self, w: &CBall) -> CBall {
        let d = w.rad.clone();
        if d.is_zero() {
            return self.eval(w, None);
        }
        let w0 = w.mid();
        let row = &self.coeffs[0];
        let mut v = CBall::zero(self.prec);
        let mut dv = CBall::zero(self.prec);
        for c in row.iter().rev() {
            dv = dv.mul(&w0).add(&v);
            v = v.mul(&w0).add(c);
        }
        let s = w0.abs_upper().add(&d);
        let mut m2 = Mag::zero();
        for (k, c) in row.iter().enumerate().skip(2) {
            m2 = m2.add(&c.abs_upper().mul_f64((k * (k - 1)) as f64).mul(&s.pow(k as u32 - 2)));
        }
        let lin = dv.abs_upper().mul(&d);
        let quad = m2.mul(&d.pow(2)).mul_f64(0.5);
        v.with_rad(lin.add(&quad).add(&self.err))
    }

    /// Derivative in w of the polynomial part (no L-dependence), for Newton
    /// steps only.
    pub fn derivative_mid(&self, w: &CBall) -> CBall {
        let row = &self.coeffs[0];
        let mut acc = CBall::zero(self.prec);
        for (k, c) in row.iter().enumerate().skip(1).rev() {
            acc = acc.mul(w).add(&c.mul_int(k as i64));
        }
        acc.mid()
    }

    /// Taylor coefficients scaled by r^k (pure Taylor models only).
    pub fn scaled_coeffs(&self) -> Vec<CBall> {
        let r = CBall::from_floats(Float::with_val(self.prec, self.r.as_float()), Float::new(self.prec));
        let mut rk = CBall::one(self.prec);
        let mut out = vec![];
        for c in &self.coeffs[0] {
            out.push(c.mul(&rk));
            rk = rk.mul(&r);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn exp_model(r: f64, order: usize) -> Model {
        // e^w = Σ w^k/k!, tail ≤ 2 r^{K+1}/(K+1)! for r ≤ 1
        let mut c = vec![];
        let mut f = 1.0f64;
        let mut q = rug::Rational::from(1);
        for k in 0..=order {
            if k > 0 {
                q /= k as u32;
                f *= r / k as f64;
            }
            c.push(CBall::from_rational(&q, P));
        }
        Model::taylor(c, Mag::from_f64(r), order, Mag::from_f64(2.0 * f * r / (order + 1) as f64))
    }

    #[test]
    fn product_and_reciprocal() {
        let e = exp_model(0.25, 30);
        let inv = e.recip().unwrap();
        let one = e.mul(&inv);
        let w = CBall::from_f64(0.1, -0.2, P);
        let v = one.eval(&w, None);
        assert!(v.sub(&CBall::one(P)).abs_upper().lt_f64(1e-20), "{v:?}");
        // e^w · e^w = e^{2w}
        let sq = e.mul(&e).eval(&w, None);
        assert!(sq.overlaps(&w.mul_int(2).exp()));
        assert!(one.err.lt_f64(1e-20));
    }

    #[test]
    fn dependent_difference_cancels() {
        let e = exp_model(0.25, 30);
        let d = e.mul(&e).sub(&e.pow(2));
        assert!(d.bound().lt_f64(1e-25), "{}", d.bound());
    }

    #[test]
    fn log_model_bound() {
        // 1 + L·w with |w| ≤ 1e-3, |L| ≤ 10
        let c = vec![vec![CBall::one(P)], vec![CBall::zero(P), CBall::one(P)]];
        let m = Model::with_log(c, Mag::from_f64(1e-3), Mag::from_f64(10.0), 5, Mag::zero());
        let b = m.bound().to_f64();
        assert!((b - 1.01).abs() < 1e-6);
        assert!(mag_exp(-3000.0).log10() < -1300.0);
    }
}
