//! Linear systems dX = Ω·X with Ω a matrix of rational functions.

use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::arith::{CBall, CMat, Mag};
use crate::error::{Error, Result};
use crate::poly::{factor, isolate_roots, QPoly, RationalFunction, RationalFunctionRepr, ZPoly};

/// A point of the singular locus.
#[derive(Clone, Debug)]
pub enum Singularity {
    /// A root of the irreducible integer polynomial `factor`.
    Finite { point: CBall, factor: ZPoly },
    Infinity,
}

impl Singularity {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Singularity::Infinity)
    }

    pub fn point(&self) -> Option<&CBall> {
        match self {
            Singularity::Finite { point, .. } => Some(point),
            Singularity::Infinity => None,
        }
    }
}

/// Σ: finite poles of Ω plus a flag for ∞.
#[derive(Clone, Debug)]
pub struct SingularLocus {
    pub finite: Vec<CBall>,
    pub infinity: bool,
}

#[derive(Clone, Debug)]
pub struct ConnectionSystem {
    n: usize,
    omega: Vec<RationalFunction>,
    /// Monic lcm of all denominators.
    den: QPoly,
    /// Ω·den, entrywise polynomials.
    numer: Vec<QPoly>,
    sing_factors: Vec<ZPoly>,
    /// Finite singular points isolated at moderate precision; used for
    /// distance bounds only.
    finite_cache: Vec<CBall>,
}

impl PartialEq for ConnectionSystem {
    fn eq(&self, o: &Self) -> bool {
        self.n == o.n && self.omega == o.omega
    }
}

const CACHE_PREC: u32 = 128;

#[derive(Serialize, Deserialize)]
struct SystemRepr {
    dimension: usize,
    omega: Vec<Vec<RationalFunctionRepr>>,
}

impl ConnectionSystem {
    /// Build from row-major entries.
    pub fn new(n: usize, omega: Vec<RationalFunction>) -> Result<Self> {
        if n == 0 || omega.len() != n * n {
            return Err(Error::InvalidInput(format!("expected {} entries for dimension {n}", n * n)));
        }
        let mut den = QPoly::one();
        for e in &omega {
            let g = den.gcd(e.den());
            den = den.mul(e.den()).divrem(&g).0.monic();
        }
        let numer = omega.iter().map(|e| e.num().mul(&den.divrem(e.den()).0)).collect();
        let sing_factors = if den.deg0() == 0 {
            vec![]
        } else {
            factor(&ZPoly::from_qpoly(&den)).1.into_iter().map(|(f, _)| f).collect()
        };
        let mut sys = ConnectionSystem { n, omega, den, numer, sing_factors, finite_cache: vec![] };
        sys.finite_cache = sys.singular_locus(CACHE_PREC)?.finite;
        Ok(sys)
    }

    pub fn zero(n: usize) -> Self {
        ConnectionSystem::new(n, vec![RationalFunction::zero(); n * n]).expect("valid shape")
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &RationalFunction {
        &self.omega[i * self.n + j]
    }

    pub fn entries(&self) -> &[RationalFunction] {
        &self.omega
    }

    /// Common denominator d and numerator matrix N with Ω = N/d.
    pub fn common_form(&self) -> (&QPoly, &[QPoly]) {
        (&self.den, &self.numer)
    }

    pub fn scale(&self, s: &Rational) -> ConnectionSystem {
        ConnectionSystem::new(self.n, self.omega.iter().map(|e| e.scale(s)).collect()).expect("valid shape")
    }

    /// (max degree, max height) over the entries.
    pub fn complexity(&self) -> (usize, Integer) {
        let d = self.omega.iter().map(|e| e.degree()).max().unwrap_or(0);
        let h = self.omega.iter().map(|e| e.height()).max().unwrap_or_else(|| Integer::from(1));
        (d, h)
    }

    /// Ω has a singularity at ∞ unless every entry is O(1/z²).
    pub fn singular_at_infinity(&self) -> bool {
        self.omega.iter().any(|e| !e.is_zero() && e.degree_growth() >= -1)
    }

    /// Irreducible factors of the common denominator.
    pub fn singular_factors(&self) -> &[ZPoly] {
        &self.sing_factors
    }

    pub fn singular_points(&self, prec: u32) -> Result<Vec<Singularity>> {
        let mut out = vec![];
        for f in &self.sing_factors {
            let c: Vec<CBall> = f.coeffs().iter().map(|x| CBall::from_rational(&Rational::from(x), prec)).collect();
            for r in isolate_roots(&c, prec)? {
                out.push(Singularity::Finite { point: r, factor: f.clone() });
            }
        }
        if self.singular_at_infinity() {
            out.push(Singularity::Infinity);
        }
        Ok(out)
    }

    pub fn singular_locus(&self, prec: u32) -> Result<SingularLocus> {
        let pts = self.singular_points(prec)?;
        Ok(SingularLocus {
            infinity: pts.iter().any(|s| s.is_infinity()),
            finite: pts.into_iter().filter_map(|s| s.point().cloned()).collect(),
        })
    }

    /// Ω evaluated on a ball.
    pub fn eval(&self, z: &CBall) -> Result<CMat> {
        let d = self.den.eval(z);
        let inv = d.inv().map_err(|_| Error::PathTooClose)?;
        let data: Vec<CBall> = self.numer.iter().map(|p| p.eval(z).mul(&inv)).collect();
        Ok(CMat::from_fn(self.n, self.n, |i, j| data[i * self.n + j].clone()))
    }

    /// Finite singular points (cached isolation at moderate precision).
    pub fn finite_singularities(&self) -> &[CBall] {
        &self.finite_cache
    }

    /// Certified lower bound for the distance from `z` to the finite part of Σ
    /// (+∞ when there is none).
    pub fn distance_to_singularities(&self, z: &CBall) -> f64 {
        let mut best = f64::INFINITY;
        for s in &self.finite_cache {
            let d = z.sub(s).abs_lower().to_f64_round(rug::float::Round::Down);
            best = best.min(d);
        }
        best
    }

    /// Upper bound for the sup over |z − c| = ρ of the ∞-norm of Ω (which by
    /// the maximum principle bounds it on the closed disc).  Fails if the
    /// circle meets a pole.
    pub fn sup_norm_on_circle(&self, c: &CBall, rho: f64) -> Result<Mag> {
        let prec = 64;
        let c = c.set_prec(prec);
        let mut arcs = 32usize;
        'outer: loop {
            let arc_rad = Mag::from_f64(rho * (std::f64::consts::PI / arcs as f64) * 1.01);
            let mut best = Mag::zero();
            for k in 0..arcs {
                let th = 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / arcs as f64;
                let z = c.add(&CBall::from_f64(rho * th.cos(), rho * th.sin(), prec)).with_rad(arc_rad.clone());
                match self.eval(&z) {
                    Ok(m) => best = best.max(&m.norm_inf()),
                    Err(_) => {
                        if arcs >= 4096 {
                            return Err(Error::PathTooClose);
                        }
                        arcs *= 2;
                        continue 'outer;
                    }
                }
            }
            return Ok(best);
        }
    }

    /// Pole orders of the entries at a singularity: `None` for zero entries.
    /// For ∞ these are orders in w = 1/z of −Ω(1/w)/w².
    pub fn pole_orders(&self, s: &Singularity) -> Vec<Option<i64>> {
        self.omega
            .iter()
            .map(|e| {
                if e.is_zero() {
                    return None;
                }
                Some(match s {
                    Singularity::Infinity => 2 + e.degree_growth(),
                    Singularity::Finite { factor, .. } => {
                        let d = ZPoly::from_qpoly(e.den());
                        let mut m = 0;
                        let mut cur = d;
                        while let Some(q) = cur.div_exact(factor) {
                            m += 1;
                            cur = q;
                        }
                        m
                    }
                })
            })
            .collect()
    }

    /// Find integer shears k with X = diag(w^{k_i})·Y giving a simple pole in
    /// the local variable w at `s`.  Feasibility of k_i − k_j ≤ 1 − order_ij is
    /// decided exactly by Bellman–Ford; normalized so min k = 0.
    pub fn shear_at(&self, s: &Singularity) -> Result<Vec<i64>> {
        let n = self.n;
        let ords = self.pole_orders(s);
        // edge j -> i with weight 1 - order_ij  (constraint k_i <= k_j + w)
        let mut edges = vec![];
        for i in 0..n {
            for j in 0..n {
                if let Some(o) = ords[i * n + j] {
                    if i != j {
                        edges.push((j, i, 1 - o));
                    } else if o > 1 {
                        return Err(Error::IrregularSingularity(format!(
                            "diagonal entry ({i},{i}) has a pole of order {o}"
                        )));
                    }
                }
            }
        }
        let mut k = vec![0i64; n];
        for _ in 0..n {
            let mut changed = false;
            for &(j, i, w) in &edges {
                if k[j] + w < k[i] {
                    k[i] = k[j] + w;
                    changed = true;
                }
            }
            if !changed {
                let m = *k.iter().min().unwrap();
                return Ok(k.into_iter().map(|x| x - m).collect());
            }
        }
        Err(Error::IrregularSingularity("no diagonal shear yields a simple pole".into()))
    }

    pub fn to_json(&self) -> String {
        let n = self.n;
        let r = SystemRepr {
            dimension: n,
            omega: (0..n).map(|i| (0..n).map(|j| self.entry(i, j).repr()).collect()).collect(),
        };
        serde_json::to_string_pretty(&r).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: SystemRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        if r.omega.len() != r.dimension || r.omega.iter().any(|row| row.len() != r.dimension) {
            return Err(Error::Parse("omega shape does not match dimension".into()));
        }
        let entries = r.omega.iter().flatten().map(RationalFunction::from_repr).collect::<Result<Vec<_>>>()?;
        ConnectionSystem::new(r.dimension, entries)
    }
}

/// dX = Ω X for the Legendre family: X = (F, F′) with F the hypergeometric
/// function ₂F₁(1/2, 1/2; 1; t).
pub fn legendre_system() -> ConnectionSystem {
    let t1mt = QPoly::from_ints(&[0, 1, -1]);
    let e = |num: QPoly, den: QPoly| RationalFunction::new(num, den).expect("nonzero den");
    ConnectionSystem::new(
        2,
        vec![
            RationalFunction::zero(),
            RationalFunction::constant(Rational::from(1)),
            e(QPoly::new(vec![Rational::from((1, 4))]), t1mt.clone()),
            e(QPoly::from_ints(&[-1, 2]), t1mt),
        ],
    )
    .expect("valid shape")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_locus_and_complexity() {
        let s = legendre_system();
        let loc = s.singular_locus(128).unwrap();
        assert!(loc.infinity);
        assert_eq!(loc.finite.len(), 2);
        assert!(loc.finite.iter().any(|z| z.overlaps(&CBall::zero(128))));
        assert!(loc.finite.iter().any(|z| z.overlaps(&CBall::one(128))));
        assert_eq!(s.complexity(), (2, Integer::from(4)));
    }

    #[test]
    fn zero_system() {
        let s = ConnectionSystem::zero(3);
        let loc = s.singular_locus(64).unwrap();
        assert!(loc.finite.is_empty() && !loc.infinity);
        assert_eq!(s.complexity(), (0, Integer::from(1)));
    }

    #[test]
    fn sqrt2_poles() {
        let e = RationalFunction::new(QPoly::one(), QPoly::from_ints(&[-2, 0, 1])).unwrap();
        let s = ConnectionSystem::new(1, vec![e]).unwrap();
        let loc = s.singular_locus(128).unwrap();
        assert!(!loc.infinity);
        assert_eq!(loc.finite.len(), 2);
        let r2 = CBall::from_int(2, 128).sqrt().unwrap();
        assert!(loc.finite.iter().any(|z| z.overlaps(&r2)));
        assert!(loc.finite.iter().any(|z| z.overlaps(&r2.neg())));
    }

    #[test]
    fn legendre_shears() {
        let s = legendre_system();
        for p in s.singular_points(64).unwrap() {
            let k = s.shear_at(&p).unwrap();
            if p.is_infinity() {
                assert_eq!(k, vec![0, 1]);
            } else {
                assert_eq!(k, vec![0, 0]);
            }
        }
    }

    #[test]
    fn irregular_rejected() {
        // dX = X/z^2 dz is irregular at 0
        let e = RationalFunction::new(QPoly::one(), QPoly::from_ints(&[0, 0, 1])).unwrap();
        let s = ConnectionSystem::new(1, vec![e]).unwrap();
        let p = &s.singular_points(64).unwrap()[0];
        assert!(matches!(s.shear_at(p), Err(Error::IrregularSingularity(_))));
    }

    #[test]
    fn json_roundtrip() {
        let s = legendre_system();
        let back = ConnectionSystem::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }
}
