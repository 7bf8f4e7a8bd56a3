//! Analytic tuples (f₁, …, f_m) and their certified Taylor models on discs.

use rug::Rational;
use serde::Serialize;

use super::model::Model;
use crate::arith::{bits_for_digits, CBall, Mag};
use crate::error::{Error, Result};
use crate::periods::{legendre_connection, LegendreTau};
use crate::poly::QPoly;

#[derive(Clone, Debug)]
pub enum Func {
    Poly(QPoly),
    /// e^{az}.
    Exp { re: f64, im: f64 },
    /// sin(ωz).
    Sin(f64),
    /// τ(t)^n for the Legendre family, principal branch (continued from ½
    /// along the straight segment, detouring above the real half-lines).
    Tau(u32),
}

impl Func {
    pub fn label(&self) -> String {
        match self {
            Func::Poly(p) => format!("poly[{}]", p.to_strings().join(",")),
            Func::Exp { re, im } => format!("exp(({re}+{im}i)z)"),
            Func::Sin(w) => format!("sin({w}z)"),
            Func::Tau(1) => "tau".into(),
            Func::Tau(n) => format!("tau^{n}"),
        }
    }

    pub fn is_legendre(&self) -> bool {
        matches!(self, Func::Tau(_))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Disc {
    pub center: (f64, f64),
    pub radius: f64,
}

impl Disc {
    pub fn new(cx: f64, cy: f64, radius: f64) -> Disc {
        Disc { center: (cx, cy), radius }
    }

    pub fn center_ball(&self, prec: u32) -> CBall {
        CBall::from_f64(self.center.0, self.center.1, prec)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        (x - self.center.0).hypot(y - self.center.1) <= self.radius
    }

    pub fn scaled(&self, f: f64) -> Disc {
        Disc { center: self.center, radius: self.radius * f }
    }

    /// A ball containing the disc.
    pub fn ball(&self, prec: u32) -> CBall {
        self.center_ball(prec).with_rad(Mag::from_f64(self.radius))
    }
}

#[derive(Clone, Debug)]
pub struct AnalyticTuple {
    pub funcs: Vec<Func>,
    /// Claimed valency per function.
    pub valency: Option<Vec<u32>>,
}

impl AnalyticTuple {
    pub fn new(funcs: Vec<Func>) -> AnalyticTuple {
        AnalyticTuple { funcs, valency: None }
    }

    pub fn with_valency(mut self, p: Vec<u32>) -> AnalyticTuple {
        self.valency = Some(p);
        self
    }

    /// (z, z²).
    pub fn parabola() -> AnalyticTuple {
        AnalyticTuple::new(vec![Func::Poly(QPoly::x()), Func::Poly(QPoly::from_ints(&[0, 0, 1]))])
    }

    /// (τ, τ²) for the Legendre family.
    pub fn legendre() -> AnalyticTuple {
        AnalyticTuple::new(vec![Func::Tau(1), Func::Tau(2)])
    }

    pub fn dim(&self) -> usize {
        self.funcs.len()
    }

    pub fn labels(&self) -> Vec<String> {
        self.funcs.iter().map(Func::label).collect()
    }

    pub fn is_legendre(&self) -> bool {
        self.funcs.iter().any(Func::is_legendre)
    }

    /// Taylor models at `digits` on the whole disc.
    pub fn disc_models(&self, disc: &Disc, digits: u32) -> Result<Vec<Model>> {
        let mut tau: Option<Model> = None;
        let mut out = vec![];
        for f in &self.funcs {
            out.push(match f {
                Func::Tau(n) => {
                    if tau.is_none() {
                        tau = Some(tau_model(disc, digits)?);
                    }
                    tau.as_ref().unwrap().pow(*n)
                }
                _ => elementary_model(f, disc, digits)?,
            });
        }
        Ok(out)
    }
}

/// Truncation order given to polynomial models.
const POLY_ORDER: usize = 48;

/// Order K with x^{K+1}/(K+1)! ≤ 10^{−digits}/4.
fn exp_order(x: f64, digits: u32) -> usize {
    let target = -(digits as f64) * std::f64::consts::LN_10 - 4f64.ln();
    let mut lt = 0.0;
    let lx = x.max(1e-300).ln();
    for k in 0..100_000 {
        lt += lx - ((k + 1) as f64).ln();
        if lt < target && (k as f64 + 2.0) > 2.0 * x {
            return k;
        }
    }
    100_000
}

/// e^{a(c + w)} = e^{ac} Σ aᵏwᵏ/k!.
fn exp_coeffs(a: &CBall, c: &CBall, r: f64, digits: u32) -> (Vec<CBall>, Mag, usize) {
    let ar = a.abs_upper().to_f64() * r;
    let k = exp_order(ar, digits).max(1);
    let e0 = a.mul(c).exp();
    let mut out = vec![e0.clone()];
    for j in 1..=k {
        let next = out[j - 1].mul(a).div_int(j as i64);
        out.push(next);
    }
    // |e^{ac}| (|a|r)^{K+1}/(K+1)! · 1/(1 − |a|r/(K+2))
    let mut t = e0.abs_upper();
    let arm = Mag::from_f64(ar);
    for j in 1..=k + 1 {
        t = t.mul(&arm).div(&Mag::from_int(j as u64));
    }
    let q = ar / (k as f64 + 2.0);
    let tail = t.mul_f64(1.0 / (1.0 - q)).mul_f64(1.0 + 1e-9);
    (out, tail, k)
}

fn elementary_model(f: &Func, disc: &Disc, digits: u32) -> Result<Model> {
    let prec = bits_for_digits(digits) + 32;
    let c = disc.center_ball(prec);
    let r = Mag::from_f64(disc.radius);
    match f {
        Func::Poly(p) => {
            let co = p.taylor_at(&c);
            // room for the products formed during interpolation
            let order = (co.len().max(1) - 1).max(POLY_ORDER);
            Ok(Model::taylor(co, r, order, Mag::zero()))
        }
        Func::Exp { re, im } => {
            let a = CBall::from_f64(*re, *im, prec);
            let (co, tail, k) = exp_coeffs(&a, &c, disc.radius, digits);
            Ok(Model::taylor(co, r, k, tail))
        }
        Func::Sin(w) => {
            let a = CBall::from_f64(0.0, *w, prec);
            let (p, tp, kp) = exp_coeffs(&a, &c, disc.radius, digits);
            let (n, tn, _) = exp_coeffs(&a.neg(), &c, disc.radius, digits);
            let inv2i = CBall::from_rationals(&Rational::new(), &Rational::from((-1, 2)), prec);
            let co = p.iter().zip(&n).map(|(x, y)| x.sub(y).mul(&inv2i)).collect();
            Ok(Model::taylor(co, r, kp, tp.add(&tn).mul_f64(0.5)))
        }
        Func::Tau(_) => unreachable!(),
    }
}

/// τ = i·V₀₁/V₀₀ from the power-series germ at the disc centre, V at the
/// centre being continued from ½.
fn tau_model(disc: &Disc, digits: u32) -> Result<Model> {
    let sys = legendre_connection();
    let prec = bits_for_digits(digits) + 32;
    let c = disc.center_ball(prec);
    let v = LegendreTau::at(&c, digits + 10)?.v;
    let probe = sys.local_solve(&c, 1, digits + 10)?;
    if disc.radius >= 0.95 * probe.radius() {
        return Err(Error::InvalidInput("disc too close to a singular point".into()));
    }
    let budget = -(digits as f64) - 8.0;
    let order = probe
        .majorant()
        .plan_order(disc.radius, budget)
        .ok_or_else(|| Error::InvalidInput("disc outside the germ's convergence disc".into()))?;
    let germ = sys.local_solve(&c, order, digits + 10)?;
    let tail = germ.tail_bound(disc.radius);
    let vmax = v.max_abs().mul_f64(2.0);
    let col = |j: usize| -> Vec<CBall> {
        germ.coeffs().iter().map(|phi| phi[(0, 0)].mul(&v[(0, j)]).add(&phi[(0, 1)].mul(&v[(1, j)]))).collect()
    };
    let r = Mag::from_f64(disc.radius);
    let err = tail.mul(&vmax);
    let f = Model::taylor(col(0), r.clone(), order, err.clone());
    let g = Model::taylor(col(1), r, order, err);
    Ok(g.div(&f)?.scale(&CBall::i(prec)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_and_sin_models_enclose() {
        let d = Disc::new(0.1, 0.0, 0.25);
        let t = AnalyticTuple::new(vec![Func::Exp { re: 1.0, im: 0.0 }, Func::Sin(3.0)]);
        let m = t.disc_models(&d, 30).unwrap();
        let z = CBall::from_f64(0.2, 0.1, 128);
        let w = z.sub(&d.center_ball(128));
        assert!(m[0].eval(&w, None).overlaps(&z.exp()));
        let iz = z.mul_int(3).mul_i();
        let s = iz.exp().sub(&iz.neg().exp()).div(&CBall::i(128).mul_int(2)).unwrap();
        let v = m[1].eval(&w, None);
        assert!(v.overlaps(&s));
        assert!(v.rad.lt_f64(1e-25));
    }

    #[test]
    fn tau_model_matches_transport() {
        let d = Disc::new(0.5, 0.2, 0.1);
        let m = &AnalyticTuple::legendre().disc_models(&d, 30).unwrap()[0];
        let z = CBall::from_f64(0.55, 0.25, 160);
        let direct = LegendreTau::at(&z, 40).unwrap();
        let tz = CBall::i(160).mul(&direct.v[(0, 1)]).div(&direct.v[(0, 0)]).unwrap();
        let v = m.eval(&z.sub(&d.center_ball(160)), None);
        assert!(v.overlaps(&tz), "{v:?} vs {tz:?}");
        assert!(v.rad.lt_f64(1e-25));
    }
}
