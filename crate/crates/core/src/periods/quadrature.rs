//! Period matrices of hyperelliptic curves by certified quadrature.
//!
//! Branch points are sorted lexicographically and joined into a chain
//! e₁ → e₂ → … ; on the segment [a, b] write x = m + h·u with u ∈ [−1, 1], so
//!
//!   y = √(1 − u²) · Φ(u),   Φ(u) = i·h·√lc · Π_{k ≠ a,b} r_k(x),
//!
//! where r_k(x) = √d_k · √((x − e_k)/d_k) with d_k the unit vector from e_k
//! to the midpoint.  Each r_k is holomorphic on any Bernstein ellipse of the
//! segment that excludes e_k, since its cut points radially away from the
//! segment.  Integrals of x^{k−1}dx/y are then Gauss–Chebyshev sums with the
//! error bound 2πM/(ρ^{2N} − 1) for M = sup |x^{k−1}/Φ| on the ellipse E_ρ.

use crate::arith::cmat::is_positive_definite;
use crate::arith::{bits_for_digits, CBall, CMat, Mag, RBall};
use crate::error::{Error, Result};
use crate::poly::isolate_roots;

use super::family::HyperellipticFamily;

/// Periods (P₁ | P₂) of x^{k−1}dx/y over a symplectic basis, P₂ the block
/// over the b-cycles, so that τ = P₂⁻¹P₁.
#[derive(Clone, Debug)]
pub struct BigPeriodMatrix {
    pub t: CBall,
    pub p1: CMat,
    pub p2: CMat,
    /// Branch points in chain order.
    pub branch_points: Vec<CBall>,
    /// Rows: a-cycles then b-cycles, as integer combinations of the chain
    /// cycles (loops around consecutive branch points).
    pub cycles: Vec<Vec<i64>>,
    /// Periods over the chain cycles, g × (number of chain cycles).
    pub chain_periods: CMat,
}

impl BigPeriodMatrix {
    pub fn genus(&self) -> usize {
        self.p1.rows
    }

    /// (P₁ | P₂) as a g × 2g matrix.
    pub fn matrix(&self) -> CMat {
        self.p1.hcat(&self.p2)
    }

    /// τ = P₂⁻¹P₁ and the asymmetry bound.
    pub fn raw_tau(&self) -> Result<(CMat, Mag)> {
        let inv = self
            .p2
            .inverse()
            .map_err(|_| Error::NotInvertible("b-period block".into()))?;
        Ok(inv.mul(&self.p1).symmetrize())
    }

    /// Riemann relations: τ symmetric within its error and Im τ ≻ 0.
    pub fn riemann_relations_hold(&self) -> bool {
        match self.raw_tau() {
            Ok((tau, asym)) => {
                let err = tau.max_rad().mul_f64(4.0).add(&Mag::pow2(-(tau.prec() as i32) / 2));
                asym.le(&err) && is_positive_definite(&tau.im_part())
            }
            Err(_) => false,
        }
    }
}

struct Other {
    e: CBall,
    d: CBall,
    sqrt_d: CBall,
}

struct Segment {
    m: CBall,
    h: CBall,
    others: Vec<Other>,
    /// i·h·√lc
    scale: CBall,
}

impl Segment {
    fn new(pts: &[CBall], i: usize, lc_sqrt: &CBall) -> Result<Segment> {
        let (a, b) = (&pts[i], &pts[i + 1]);
        let m = a.add(b).mul_2exp(-1);
        let h = b.sub(a).mul_2exp(-1);
        let mut others = vec![];
        for (k, e) in pts.iter().enumerate() {
            if k == i || k == i + 1 {
                continue;
            }
            let v = m.sub(e).mid();
            let d = v.div(&v.abs().to_cball())?.mid();
            others.push(Other { e: e.clone(), sqrt_d: d.sqrt()?, d });
        }
        let scale = CBall::i(m.prec()).mul(&h).mul(lc_sqrt);
        Ok(Segment { m, h, others, scale })
    }

    fn x(&self, u: &CBall) -> CBall {
        self.m.add(&self.h.mul(u))
    }

    fn phi(&self, u: &CBall) -> Result<CBall> {
        let x = self.x(u);
        let mut p = self.scale.clone();
        for o in &self.others {
            p = p.mul(&o.sqrt_d).mul(&x.sub(&o.e).div(&o.d)?.sqrt()?);
        }
        Ok(p)
    }

    /// Bernstein parameter of the largest ellipse excluding the other
    /// branch points (f64 estimate).
    fn rho_max(&self) -> f64 {
        let (mr, mi) = self.m.to_c64();
        let (hr, hi) = self.h.to_c64();
        let hh = hr * hr + hi * hi;
        let mut best = f64::INFINITY;
        for o in &self.others {
            let (er, ei) = o.e.to_c64();
            // u = (e − m)/h
            let (dr, di) = (er - mr, ei - mi);
            let ur = (dr * hr + di * hi) / hh;
            let ui = (di * hr - dr * hi) / hh;
            // |u ± √(u² − 1)|: use |u−1| + |u+1| = ρ + 1/ρ
            let s = ((ur - 1.0).hypot(ui) + (ur + 1.0).hypot(ui)) / 2.0;
            best = best.min(s + (s * s - 1.0).max(0.0).sqrt());
        }
        best
    }

    /// Upper bounds, k = 1..g, for sup |x^{k−1}/Φ| on the ellipse E_ρ:
    /// 256 arcs, each bisected until its covering ball misses every other
    /// branch point.
    fn sup_bounds(&self, rho: f64, lc_abs: &RBall, g: usize) -> Result<Vec<Mag>> {
        let arcs = 256usize;
        let step = 2.0 * std::f64::consts::PI / arcs as f64;
        let base = self.h.set_prec(64).abs().mul(&lc_abs.sqrt()?);
        let mut best = vec![Mag::zero(); g];
        let mut stack: Vec<(f64, f64, u32)> = (0..arcs).map(|l| (l as f64 * step, (l + 1) as f64 * step, 0)).collect();
        while let Some((t0, t1, depth)) = stack.pop() {
            match self.arc_bound(rho, t0, t1, &base)? {
                Some((xa, lo)) => {
                    for (k, b) in best.iter_mut().enumerate() {
                        *b = b.max(&xa.pow(k as u32).div_lower(&lo));
                    }
                }
                None if depth < 24 => {
                    let mid = 0.5 * (t0 + t1);
                    stack.push((t0, mid, depth + 1));
                    stack.push((mid, t1, depth + 1));
                }
                None => return Err(Error::NearSingularFiber("ellipse meets a branch point".into())),
            }
        }
        Ok(best)
    }

    /// (sup |x|, inf |Φ|) over the arc θ ∈ [t0, t1] of E_ρ, or None when the
    /// covering ball is too wide to separate Φ from 0.
    fn arc_bound(&self, rho: f64, t0: f64, t1: f64, base: &RBall) -> Result<Option<(Mag, rug::Float)>> {
        let p = 64;
        let (major, minor) = ((rho + 1.0 / rho) / 2.0, (rho - 1.0 / rho) / 2.0);
        let th = 0.5 * (t0 + t1);
        let uc = CBall::from_f64(major * th.cos(), minor * th.sin(), p);
        let u = uc.with_rad(Mag::from_f64(major * 0.5 * (t1 - t0) * 1.0001));
        let x = self.x(&u.set_prec(p)).set_prec(p);
        let mut den = base.clone();
        for o in &self.others {
            let dist = x.sub(&o.e.set_prec(p)).abs();
            if !dist.is_positive() {
                return Ok(None);
            }
            den = den.mul(&dist.sqrt()?);
        }
        let lo = den.lower();
        if !(lo > 0) {
            return Ok(None);
        }
        Ok(Some((x.abs_upper(), lo)))
    }
}

/// Gauss–Chebyshev nodes cos((2j − 1)π/(2N)).
fn chebyshev_nodes(n: usize, prec: u32) -> Vec<CBall> {
    let pi = CBall::pi(prec).re_ball();
    (1..=n)
        .map(|j| {
            let th = pi.mul(&RBall::from_int((2 * j - 1) as i64, prec)).div(&RBall::from_int(2 * n as i64, prec));
            CBall::cis(&th.expect("nonzero")).re_ball().to_cball()
        })
        .collect()
}

fn lex_sort(pts: &mut [CBall]) {
    pts.sort_by(|a, b| {
        let (ar, ai) = a.to_c64();
        let (br, bi) = b.to_c64();
        ar.total_cmp(&br).then(ai.total_cmp(&bi))
    });
}

/// Integer symplectic basis for a unimodular alternating form given on the
/// standard basis: rows a₁..a_g, b₁..b_g with ⟨a_i, b_j⟩ = δ_ij.
pub fn symplectic_basis(form: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = form.len();
    let pair = |u: &[i64], v: &[i64]| -> i64 {
        let mut s = 0;
        for i in 0..n {
            for j in 0..n {
                s += u[i] * form[i][j] * v[j];
            }
        }
        s
    };
    let mut rest: Vec<Vec<i64>> = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
    let (mut a, mut b) = (vec![], vec![]);
    while !rest.is_empty() {
        let u = rest.remove(0);
        let Some(pos) = rest.iter().position(|v| pair(&u, v).abs() == 1) else {
            return Err(Error::InvalidInput("intersection form is not unimodular on the chain".into()));
        };
        let mut v = rest.remove(pos);
        if pair(&u, &v) < 0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
        for w in rest.iter_mut() {
            let (wu, wv) = (pair(w, &u), pair(w, &v));
            for i in 0..n {
                w[i] += -wv * u[i] + wu * v[i];
            }
        }
        a.push(u);
        b.push(v);
    }
    a.extend(b);
    Ok(a)
}

/// Big period matrix of the fibre at `t`.
pub fn periods_at(family: &HyperellipticFamily, t: &CBall, digits: u32) -> Result<BigPeriodMatrix> {
    periods_at_ordered(family, t, None, digits)
}

/// Order `pts` to follow `prev` (nearest-neighbour matching), for tracking
/// branch points along a path.
fn match_order(pts: Vec<CBall>, prev: &[CBall]) -> Result<Vec<CBall>> {
    let mut left = pts;
    let mut out = vec![];
    for p in prev {
        let (pr, pi) = p.to_c64();
        let k = (0..left.len())
            .min_by(|&a, &b| {
                let (ar, ai) = left[a].to_c64();
                let (br, bi) = left[b].to_c64();
                (ar - pr).hypot(ai - pi).total_cmp(&(br - pr).hypot(bi - pi))
            })
            .ok_or_else(|| Error::InvalidInput("branch point count changed".into()))?;
        out.push(left.remove(k));
    }
    if !left.is_empty() {
        return Err(Error::InvalidInput("branch point count changed".into()));
    }
    Ok(out)
}

/// As `periods_at`, with the chain order inherited from a previous fibre.
pub fn periods_at_ordered(
    family: &HyperellipticFamily,
    t: &CBall,
    prev: Option<&[CBall]>,
    digits: u32,
) -> Result<BigPeriodMatrix> {
    let g = family.genus();
    let prec = bits_for_digits(digits) + 32;
    let t = t.set_prec(prec);
    if !family.is_smooth_at(&t) {
        return Err(Error::NearSingularFiber(format!("{:?}", t.to_c64())));
    }
    let coeffs = family.at(&t);
    let lc = coeffs.last().unwrap().clone();
    let mut pts = isolate_roots(&coeffs, prec).map_err(|_| Error::NearSingularFiber(format!("{:?}", t.to_c64())))?;
    match prev {
        Some(prev) => pts = match_order(pts, prev)?,
        None => lex_sort(&mut pts),
    }
    let lc_sqrt = lc.sqrt()?;
    let lc_abs = lc.set_prec(64).abs();
    let ncyc = 2 * g;
    let segs = (0..pts.len() - 1).map(|i| Segment::new(&pts, i, &lc_sqrt)).collect::<Result<Vec<_>>>()?;

    // integrals over the segments, I[i][k] = ∫ x^k dx / y_i
    let log_target = -(digits as f64 + 4.0) * std::f64::consts::LN_10;
    let mut integrals = vec![];
    for seg in segs.iter().take(ncyc) {
        let rmax = seg.rho_max();
        if !(rmax > 1.0 + 1e-6) {
            return Err(Error::NearSingularFiber(format!("{:?}", t.to_c64())));
        }
        // the sup bound only grows like dist^{-1/2} near a branch point, so
        // the ellipse can come close to the largest admissible one
        let rho = 1.0 + (0.9 * (rmax - 1.0)).min(4.0);
        let sups = seg.sup_bounds(rho, &lc_abs, g)?;
        let hm = seg.h.abs_upper();
        let mmax = sups.iter().fold(Mag::zero(), |a, b| a.max(b)).mul(&hm).mul_f64(2.0 * std::f64::consts::PI);
        let n = ((mmax.to_f64().ln() - log_target) / (2.0 * rho.ln())).ceil().max(8.0);
        if n > 1_000_000.0 {
            return Err(Error::NearSingularFiber(format!("quadrature needs {n} nodes")));
        }
        let n = n as usize;
        let denom = (2.0 * n as f64 * rho.ln()).exp_m1();
        let nodes = chebyshev_nodes(n, prec);
        let mut sums = vec![CBall::zero(prec); g];
        for u in &nodes {
            let x = seg.x(u);
            let inv = seg.phi(u)?.inv()?;
            let mut xp = CBall::one(prec);
            for s in sums.iter_mut() {
                *s = s.add(&xp.mul(&inv));
                xp = xp.mul(&x);
            }
        }
        let w = CBall::pi(prec).div_int(n as i64).mul(&seg.h);
        let row: Vec<CBall> = sums
            .iter()
            .zip(&sups)
            .map(|(s, m)| {
                let err = m.mul(&hm).mul_f64(2.0 * std::f64::consts::PI).div(&Mag::from_f64(denom * (1.0 - 1e-9)));
                let v = s.mul(&w);
                let r = v.rad.add(&err);
                v.with_rad(r)
            })
            .collect();
        integrals.push(row);
    }

    // relative branch signs: y'_{i+1} = continuation of y'_i counterclockwise
    // around the shared branch point
    let mut cum = vec![1.0f64; ncyc];
    for i in 0..ncyc - 1 {
        let p = &pts[i + 1];
        let (pr, pi_) = p.to_c64();
        let (ar, ai) = pts[i].to_c64();
        let (cr, ci) = pts[i + 2].to_c64();
        let a1 = (ai - pi_).atan2(ar - pr);
        let mut a2 = (ci - pi_).atan2(cr - pr);
        while a2 <= a1 {
            a2 += 2.0 * std::f64::consts::PI;
        }
        while a2 > a1 + 2.0 * std::f64::consts::PI {
            a2 -= 2.0 * std::f64::consts::PI;
        }
        let f1 = segs[i].phi(&CBall::one(prec))?.to_c64();
        let f2 = segs[i + 1].phi(&CBall::from_int(-1, prec))?.to_c64();
        let (h1, h2) = (segs[i].h.abs_upper().to_f64(), segs[i + 1].h.abs_upper().to_f64());
        // S = √(|h₂|/|h₁|) · Φ_i(1)/Φ_{i+1}(−1) · e^{i(α₂ − α₁)/2}
        let d = f2.0 * f2.0 + f2.1 * f2.1;
        let q = ((f1.0 * f2.0 + f1.1 * f2.1) / d, (f1.1 * f2.0 - f1.0 * f2.1) / d);
        let (c, s) = (((a2 - a1) / 2.0).cos(), ((a2 - a1) / 2.0).sin());
        let k = (h2 / h1).sqrt();
        let sr = k * (q.0 * c - q.1 * s);
        let si = k * (q.0 * s + q.1 * c);
        if si.abs() > 0.1 || (sr.abs() - 1.0).abs() > 0.1 {
            return Err(Error::RaisePrecision("branch matching at a branch point failed".into()));
        }
        cum[i + 1] = cum[i] * sr.signum();
    }
    let chain = CMat::from_fn(g, ncyc, |k, i| integrals[i][k].mul_int(2 * cum[i] as i64));

    for eps in [1i64, -1] {
        let form: Vec<Vec<i64>> = (0..ncyc)
            .map(|i| {
                (0..ncyc)
                    .map(|j| if j == i + 1 { eps } else if i == j + 1 { -eps } else { 0 })
                    .collect()
            })
            .collect();
        let basis = symplectic_basis(&form)?;
        let combine = |rows: &[Vec<i64>]| {
            CMat::from_fn(g, g, |k, c| {
                let mut s = CBall::zero(prec);
                for (j, &m) in rows[c].iter().enumerate() {
                    if m != 0 {
                        s = s.add(&chain[(k, j)].mul_int(m));
                    }
                }
                s
            })
        };
        let pm = BigPeriodMatrix {
            t: t.clone(),
            p1: combine(&basis[..g]),
            p2: combine(&basis[g..]),
            branch_points: pts.clone(),
            cycles: basis.clone(),
            chain_periods: chain.clone(),
        };
        if pm.riemann_relations_hold() {
            return Ok(pm);
        }
    }
    Err(Error::RaisePrecision("Riemann relations fail for both orientations".into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::family::catalog;
    use rug::Rational;

    #[test]
    fn chain_form_basis() {
        let form = vec![vec![0, 1, 0, 0], vec![-1, 0, 1, 0], vec![0, -1, 0, 1], vec![0, 0, -1, 0]];
        let b = symplectic_basis(&form).unwrap();
        let pair = |u: &[i64], v: &[i64]| -> i64 {
            (0..4).map(|i| (0..4).map(|j| u[i] * form[i][j] * v[j]).sum::<i64>()).sum()
        };
        for i in 0..4 {
            for j in 0..4 {
                let want = if j == i + 2 { 1 } else if i == j + 2 { -1 } else { 0 };
                assert_eq!(pair(&b[i], &b[j]), want);
            }
        }
    }

    #[test]
    fn legendre_periods_match_elliptic_integral() {
        // for 0 < t < 1, ∫_0^t dx/|y| = π·₂F₁(½,½;1;t) = 2K(√t); cycles double it
        let f = catalog("legendre").unwrap();
        let m = periods_at(&f, &CBall::from_rational(&Rational::from((1, 2)), 128), 30).unwrap();
        assert!(m.riemann_relations_hold());
        let k = 1.854_074_677_301_372; // K(1/√2)
        let found = (0..2)
            .map(|i| m.chain_periods[(0, i)].to_c64())
            .any(|(re, im)| ((re.hypot(im)) - 4.0 * k).abs() < 1e-12);
        assert!(found);
    }

    #[test]
    fn genus_two_and_three_riemann_relations() {
        let p = 160;
        for (label, t) in [("wilson_g2", 3), ("masser_g2", 3), ("mestre_g3", 1), ("masser_g4", 2)] {
            let f = catalog(label).unwrap();
            let tt = CBall::from_f64(t as f64, 0.25, p);
            let m = periods_at(&f, &tt, 30).unwrap();
            assert!(m.riemann_relations_hold(), "{label}");
            assert!(m.matrix().max_rad().lt_f64(1e-25), "{label}");
        }
    }

    #[test]
    fn singular_fibre_rejected() {
        let f = catalog("legendre").unwrap();
        assert!(matches!(periods_at(&f, &CBall::one(128), 20), Err(Error::NearSingularFiber(_))));
    }
}
