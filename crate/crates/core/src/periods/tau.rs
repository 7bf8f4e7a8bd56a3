//! Siegel points τ from period matrices, and τ along paths.

use rug::Rational;

use super::family::HyperellipticFamily;
use super::quadrature::{periods_at_ordered, BigPeriodMatrix};
use crate::arith::{bits_for_digits, CBall, CMat, Mag};
use crate::connection::{legendre_system, ConnectionSystem};
use crate::error::{Error, Result};
use crate::siegel::SiegelPoint;

/// The Legendre Picard–Fuchs connection: X = (F, F′) with F = ₂F₁(½,½;1;t).
pub fn legendre_connection() -> ConnectionSystem {
    legendre_system()
}

/// τ = P₂⁻¹P₁, validated.
pub fn tau_from_periods(p: &BigPeriodMatrix) -> Result<SiegelPoint> {
    let inv = p.p2.inverse().map_err(|_| Error::NotInvertible("b-period block".into()))?;
    SiegelPoint::new(inv.mul(&p.p1))
}

/// (F(½), F′(½)) for F = ₂F₁(½,½;1;t), by the series with a tail bound.
pub fn hypergeometric_at_half(prec: u32) -> (CBall, CBall) {
    let kmax = prec as usize + 24;
    let half = Rational::from((1, 2));
    let mut a = Rational::from(1);
    let mut tk = Rational::from(1); // t^k
    let (mut f, mut df) = (Rational::new(), Rational::new());
    for k in 0..kmax {
        f += Rational::from(&a * &tk);
        if k > 0 {
            df += Rational::from(&a * &tk) * Rational::from(2 * k as u64);
        }
        let r = Rational::from((2 * k as u64 + 1, 2 * k as u64 + 2));
        a *= Rational::from(&r * &r);
        tk *= &half;
    }
    // a_k ≤ 1: tails ≤ 2^{1−K} and ≤ 4K·2^{1−K}
    let e1 = Mag::pow2(1 - kmax as i32);
    let e2 = e1.mul_f64(4.0 * kmax as f64);
    let fb = CBall::from_rational(&f, prec);
    let db = CBall::from_rational(&df, prec);
    (fb.clone().with_rad(fb.rad.add(&e1)), db.clone().with_rad(db.rad.add(&e2)))
}

/// Genus-1 τ via the connection: the columns of V are (F, F′) and (G, G′)
/// with G(t) = F(1 − t), so τ = i·G/F (= iK′/K on (0, 1)).
#[derive(Clone, Debug)]
pub struct LegendreTau {
    pub t: CBall,
    pub v: CMat,
}

impl LegendreTau {
    pub fn at_half(digits: u32) -> LegendreTau {
        let prec = bits_for_digits(digits) + 16;
        let (f, df) = hypergeometric_at_half(prec);
        let v = CMat::from_fn(2, 2, |i, j| match (i, j) {
            (0, _) => f.clone(),
            (1, 0) => df.clone(),
            _ => df.neg(),
        });
        LegendreTau { t: CBall::from_rational(&Rational::from((1, 2)), prec), v }
    }

    pub fn tau(&self) -> Result<SiegelPoint> {
        let r = CBall::i(self.v.prec()).mul(&self.v[(0, 1)]).div(&self.v[(0, 0)])?;
        SiegelPoint::new(CMat::from_fn(1, 1, |_, _| r.clone()))
    }

    /// Continue along a polyline starting at the current parameter.
    pub fn continue_along(&self, path: &[CBall], digits: u32) -> Result<LegendreTau> {
        let mut full = vec![self.t.clone()];
        full.extend(path.iter().cloned());
        let (v, end) = legendre_connection().transport(&self.v, &full, digits)?;
        Ok(LegendreTau { t: end, v })
    }

    /// From ½ to `t`, avoiding the real half-lines through 0 and 1.
    pub fn at(t: &CBall, digits: u32) -> Result<LegendreTau> {
        let base = LegendreTau::at_half(digits);
        let (re, im) = t.to_c64();
        let p = t.prec().max(base.v.prec());
        let mut path = vec![];
        if im.abs() < 0.05 && !(0.05..=0.95).contains(&re) {
            path.push(CBall::from_f64(0.5, 0.5, p));
            path.push(CBall::from_f64(re, 0.5, p));
        }
        path.push(t.clone());
        base.continue_along(&path, digits)
    }
}

fn tau_distance(a: &SiegelPoint, b: &SiegelPoint) -> f64 {
    let (x, y) = (a.to_c64(), b.to_c64());
    x.iter()
        .flatten()
        .zip(y.iter().flatten())
        .map(|(p, q)| (p.0 - q.0).hypot(p.1 - q.1))
        .fold(0.0, f64::max)
}

const MAX_REFINE: usize = 24;

/// τ(t) along a path, branch-continuous: consecutive outputs differ by less
/// than 0.1 (steps are bisected as needed).  Returns one point per input
/// vertex.
pub fn tau_path(family: &HyperellipticFamily, path: &[CBall], digits: u32) -> Result<Vec<SiegelPoint>> {
    if path.is_empty() {
        return Ok(vec![]);
    }
    if family.genus() == 1 && family.label() == "legendre" {
        let mut cur = LegendreTau::at(&path[0], digits)?;
        let mut out = vec![cur.tau()?];
        for w in path.windows(2) {
            let (next, tau) = refine(&cur, out.last().unwrap(), &w[0], &w[1], digits, &|c, a, b| {
                let n = c.continue_along(&[a.clone(), b.clone()][1..], digits)?;
                let t = n.tau()?;
                Ok((n, t))
            })?;
            cur = next;
            out.push(tau);
        }
        return Ok(out);
    }
    let first = periods_at_ordered(family, &path[0], None, digits)?;
    let mut cur = first.clone();
    let mut out = vec![tau_from_periods(&first)?];
    for w in path.windows(2) {
        let (next, tau) = refine(&cur, out.last().unwrap(), &w[0], &w[1], digits, &|c: &BigPeriodMatrix, _a, b| {
            let n = periods_at_ordered(family, b, Some(&c.branch_points), digits)?;
            let t = tau_from_periods(&n)?;
            Ok((n, t))
        })?;
        cur = next;
        out.push(tau);
    }
    Ok(out)
}

type StepFn<'a, S> = dyn Fn(&S, &CBall, &CBall) -> Result<(S, SiegelPoint)> + 'a;

/// Advance from a to b, bisecting until every sub-step moves τ by < 0.1.
fn refine<S: Clone>(
    state: &S,
    tau: &SiegelPoint,
    a: &CBall,
    b: &CBall,
    digits: u32,
    step: &StepFn<'_, S>,
) -> Result<(S, SiegelPoint)> {
    fn go<S: Clone>(
        state: &S,
        tau: &SiegelPoint,
        a: &CBall,
        b: &CBall,
        depth: usize,
        step: &StepFn<'_, S>,
    ) -> Result<(S, SiegelPoint)> {
        let (s, t) = step(state, a, b)?;
        if tau_distance(tau, &t) < 0.1 {
            return Ok((s, t));
        }
        if depth >= MAX_REFINE {
            return Err(Error::RaisePrecision("τ is discontinuous along the path".into()));
        }
        let mid = a.add(b).mul_2exp(-1).mid();
        let (s1, t1) = go(state, tau, a, &mid, depth + 1, step)?;
        go(&s1, &t1, &mid, b, depth + 1, step)
    }
    let _ = digits;
    go(state, tau, a, b, 0, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::family::catalog;
    use crate::periods::quadrature::periods_at;
    use crate::siegel::reduce::equivalent_g1;

    fn j_of(tau: &SiegelPoint) -> f64 {
        // j via λ: reduce to the domain, then compare with i (j = 1728 ⇔ τ ~ i)
        let r = crate::siegel::reduce(tau).unwrap().tau.to_c64()[0][0];
        (r.0).hypot(r.1 - 1.0)
    }

    #[test]
    fn hypergeometric_value_at_half() {
        let (f, _) = hypergeometric_at_half(128);
        // ₂F₁(½,½;1;½) = 2K(1/√2)/π
        let k = 1.854_074_677_301_372;
        assert!((f.to_c64().0 - 2.0 * k / std::f64::consts::PI).abs() < 1e-14);
    }

    #[test]
    fn legendre_square_lattice_points() {
        let f = catalog("legendre").unwrap();
        for t in [(-1.0, 0.0), (0.5, 0.0), (2.0, 0.0)] {
            let tt = CBall::from_f64(t.0, t.1, 128);
            let tau = tau_from_periods(&periods_at(&f, &tt, 30).unwrap()).unwrap();
            assert!(j_of(&tau) < 1e-20, "t = {t:?}");
            let tc = LegendreTau::at(&tt, 30).unwrap().tau().unwrap();
            assert!(j_of(&tc) < 1e-20, "connection t = {t:?}");
        }
    }

    #[test]
    fn quadrature_and_connection_agree() {
        let f = catalog("legendre").unwrap();
        for t in [(0.3, 0.2), (-0.7, 1.1), (1.6, -0.4), (0.1, -0.05)] {
            let tt = CBall::from_f64(t.0, t.1, 128);
            let a = tau_from_periods(&periods_at(&f, &tt, 30).unwrap()).unwrap();
            let b = LegendreTau::at(&tt, 30).unwrap().tau().unwrap();
            assert!(equivalent_g1(&a, &b, 1e-15).unwrap(), "t = {t:?}");
        }
    }

    #[test]
    fn loop_around_zero_translates_by_two() {
        let f = catalog("legendre").unwrap();
        let p = 128;
        let pts: Vec<CBall> = (0..=24)
            .map(|k| {
                let th = 2.0 * std::f64::consts::PI * k as f64 / 24.0;
                CBall::from_f64(0.3 * th.cos(), 0.3 * th.sin(), p)
            })
            .collect();
        let taus = tau_path(&f, &pts, 30).unwrap();
        let a = taus[0].to_c64()[0][0];
        let b = taus.last().unwrap().to_c64()[0][0];
        // τ = iG/F picks up ±2 around t = 0, where F is holomorphic and G has a log
        assert!(((b.0 - a.0).abs() - 2.0).abs() < 1e-15 && (b.1 - a.1).abs() < 1e-15, "{a:?} {b:?}");
    }

    #[test]
    fn constant_path() {
        let f = catalog("wilson_g2").unwrap();
        let t = CBall::from_f64(3.0, 0.5, 128);
        let taus = tau_path(&f, &[t.clone(), t], 30).unwrap();
        assert!(taus[0].overlaps(&taus[1]));
    }

    #[test]
    fn genus_two_path_is_continuous() {
        let f = catalog("masser_g2").unwrap();
        let pts: Vec<CBall> = (0..=4).map(|k| CBall::from_f64(3.0 + 0.25 * k as f64, 0.3, 128)).collect();
        let taus = tau_path(&f, &pts, 24).unwrap();
        for w in taus.windows(2) {
            assert!(tau_distance(&w[0], &w[1]) < 0.1);
        }
    }
}
