//! Hyperelliptic families y² = f(x, t) and the catalogue.

use std::sync::OnceLock;

use rug::Rational;
use serde::{Deserialize, Serialize};

use crate::arith::CBall;
use crate::error::{Error, Result};
use crate::poly::{factor, isolate_roots, isolate_roots_qpoly, QPoly, ZPoly};

pub const CATALOG: [&str; 5] = ["legendre", "wilson_g2", "mestre_g3", "masser_g2", "masser_g4"];

#[derive(Debug)]
pub struct HyperellipticFamily {
    label: String,
    genus: usize,
    /// coeffs[i] is the coefficient of x^i, a polynomial in t.
    coeffs: Vec<QPoly>,
    disc: OnceLock<QPoly>,
}

impl Clone for HyperellipticFamily {
    fn clone(&self) -> Self {
        let disc = OnceLock::new();
        if let Some(d) = self.disc.get() {
            let _ = disc.set(d.clone());
        }
        HyperellipticFamily { label: self.label.clone(), genus: self.genus, coeffs: self.coeffs.clone(), disc }
    }
}

impl PartialEq for HyperellipticFamily {
    fn eq(&self, o: &Self) -> bool {
        self.label == o.label && self.genus == o.genus && self.coeffs == o.coeffs
    }
}

#[derive(Serialize, Deserialize)]
struct FamilyRepr {
    label: String,
    genus: usize,
    coeffs: Vec<Vec<String>>,
}

impl HyperellipticFamily {
    pub fn new(label: &str, genus: usize, mut coeffs: Vec<QPoly>) -> Result<Self> {
        while coeffs.last().is_some_and(QPoly::is_zero) {
            coeffs.pop();
        }
        let d = coeffs.len().saturating_sub(1);
        if genus == 0 || (d != 2 * genus + 1 && d != 2 * genus + 2) {
            return Err(Error::InvalidInput(format!("degree {d} in x does not match genus {genus}")));
        }
        let fam = HyperellipticFamily { label: label.into(), genus, coeffs, disc: OnceLock::new() };
        if fam.is_isotrivial()? {
            return Err(Error::Isotrivial(label.into()));
        }
        Ok(fam)
    }

    /// Compare the Möbius invariants of the branch sets at two parameters:
    /// the multiset of j(λ) over all 4-subsets (with ∞ for odd degree).
    pub fn is_isotrivial(&self) -> Result<bool> {
        let prec = 128;
        let params = [(2.0 / 7.0, 3.0 / 11.0), (-5.0 / 13.0, 1.0 / 3.0), (1.25, -0.75), (-2.5, 0.4)];
        let mut invs = vec![];
        for (re, im) in params {
            let t = CBall::from_f64(re, im, prec);
            if !self.is_smooth_at(&t) {
                continue;
            }
            let pts = isolate_roots(&self.at(&t), prec)?;
            invs.push(branch_invariants(&pts, self.degree() % 2 == 1)?);
            if invs.len() == 2 {
                break;
            }
        }
        if invs.len() < 2 {
            return Err(Error::InvalidInput("family is singular at the test parameters".into()));
        }
        let (a, b) = (&invs[0], &invs[1]);
        let mut used = vec![false; b.len()];
        for x in a {
            let tol = 1e-8 * (1.0 + x.0.hypot(x.1));
            match (0..b.len()).find(|&k| !used[k] && (b[k].0 - x.0).hypot(b[k].1 - x.1) < tol) {
                Some(k) => used[k] = true,
                None => return Ok(false),
            }
        }
        Ok(true)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[QPoly] {
        &self.coeffs
    }

    /// Coefficients in x of f(·, t), low degree first.
    pub fn at(&self, t: &CBall) -> Vec<CBall> {
        self.coeffs.iter().map(|c| c.eval(t)).collect()
    }

    pub fn at_rational(&self, t: &Rational) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| c.eval_rational(t)).collect())
    }

    /// disc_x f(x, t) · lc_x f(x, t), a polynomial in t whose roots are the
    /// parameters where f is not squarefree or drops degree.
    pub fn discriminant(&self) -> &QPoly {
        self.disc.get_or_init(|| {
            let f = &self.coeffs;
            let df: Vec<QPoly> = (1..f.len()).map(|i| f[i].scale(&Rational::from(i as u64))).collect();
            let res = sylvester_resultant(f, &df);
            let lc = f.last().unwrap();
            // res = ± lc · disc, so res itself vanishes exactly on the locus
            res.mul(lc)
        })
    }

    /// Roots of the discriminant, as isolating balls.
    pub fn discriminant_locus(&self, prec: u32) -> Result<Vec<CBall>> {
        let z = ZPoly::from_qpoly(self.discriminant());
        let mut out = vec![];
        for (p, _) in factor(&z).1 {
            out.extend(isolate_roots_qpoly(&p.to_qpoly(), prec)?);
        }
        Ok(out)
    }

    /// True if f(·, t) is certifiably squarefree of full degree.
    pub fn is_smooth_at(&self, t: &CBall) -> bool {
        !self.discriminant().eval(t).contains_zero()
    }

    pub fn to_json(&self) -> String {
        let r = FamilyRepr {
            label: self.label.clone(),
            genus: self.genus,
            coeffs: self.coeffs.iter().map(QPoly::to_strings).collect(),
        };
        serde_json::to_string_pretty(&r).expect("serializable")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let r: FamilyRepr = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let coeffs = r.coeffs.iter().map(|c| QPoly::from_strings(c)).collect::<Result<Vec<_>>>()?;
        HyperellipticFamily::new(&r.label, r.genus, coeffs)
    }
}

/// j(λ) = 256(λ² − λ + 1)³/(λ²(λ − 1)²) of the cross-ratio of every
/// 4-subset of the branch points (∞ appended when `with_infinity`).
fn branch_invariants(pts: &[CBall], with_infinity: bool) -> Result<Vec<(f64, f64)>> {
    let n = pts.len() + with_infinity as usize;
    let mut out = vec![];
    let at = |k: usize| pts.get(k);
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let (z1, z2, z3) = (at(a).unwrap(), at(b).unwrap(), at(c).unwrap());
                    // (z3 − z1)(z4 − z2) / ((z3 − z2)(z4 − z1)), z4 = ∞ allowed
                    let lam = match at(d) {
                        Some(z4) => z3.sub(z1).mul(&z4.sub(z2)).div(&z3.sub(z2).mul(&z4.sub(z1)))?,
                        None => z3.sub(z1).div(&z3.sub(z2))?,
                    };
                    let one = CBall::one(lam.prec());
                    let num = lam.sqr().sub(&lam).add(&one).pow(3).mul_int(256);
                    let den = lam.sqr().mul(&lam.sub(&one).sqr());
                    out.push(num.div(&den)?.to_c64());
                }
            }
        }
    }
    Ok(out)
}

/// Resultant of two polynomials in x with coefficients in ℚ[t], by
/// fraction-free (Bareiss) elimination of the Sylvester matrix.
fn sylvester_resultant(f: &[QPoly], g: &[QPoly]) -> QPoly {
    let (m, n) = (f.len() - 1, g.len() - 1);
    let size = m + n;
    let mut a = vec![vec![QPoly::zero(); size]; size];
    for i in 0..n {
        for (k, c) in f.iter().rev().enumerate() {
            a[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in g.iter().rev().enumerate() {
            a[n + i][i + k] = c.clone();
        }
    }
    let mut sign = false;
    let mut prev = QPoly::one();
    for k in 0..size {
        let Some(p) = (k..size).find(|&i| !a[i][k].is_zero()) else { return QPoly::zero() };
        if p != k {
            a.swap(p, k);
            sign = !sign;
        }
        for i in k + 1..size {
            for j in k + 1..size {
                let num = a[k][k].mul(&a[i][j]).sub(&a[i][k].mul(&a[k][j]));
                a[i][j] = num.divrem(&prev).0;
            }
            a[i][k] = QPoly::zero();
        }
        prev = a[k][k].clone();
    }
    if sign {
        prev.neg()
    } else {
        prev
    }
}

fn tpoly(c: &[i64]) -> QPoly {
    QPoly::from_ints(c)
}

/// t^k as a polynomial.
fn tpow(k: usize) -> QPoly {
    QPoly::one().shift_up(k)
}

/// Π (x − r_i) with r_i polynomials in t.
fn product_of_linear(roots: &[QPoly]) -> Vec<QPoly> {
    let mut f = vec![QPoly::one()];
    for r in roots {
        let mut next = vec![QPoly::zero(); f.len() + 1];
        for (i, c) in f.iter().enumerate() {
            next[i + 1] = next[i + 1].add(c);
            next[i] = next[i].sub(&c.mul(r));
        }
        f = next;
    }
    f
}

/// The catalogued families.
pub fn catalog(label: &str) -> Result<HyperellipticFamily> {
    let (g, coeffs) = match label {
        "legendre" => (1, product_of_linear(&[QPoly::zero(), QPoly::one(), tpow(1)])),
        "wilson_g2" => (
            2,
            // 1 − 2x + t x² − (2t − 3) x³ + (t − 2) x⁴ + x⁵
            vec![tpoly(&[1]), tpoly(&[-2]), tpoly(&[0, 1]), tpoly(&[3, -2]), tpoly(&[-2, 1]), tpoly(&[1])],
        ),
        "mestre_g3" => (
            3,
            // 64 − 32x − 16t x² + 48x³ + (8t + 156)x⁴ + 34x⁵ − t x⁶ + x⁷
            vec![
                tpoly(&[64]),
                tpoly(&[-32]),
                tpoly(&[0, -16]),
                tpoly(&[48]),
                tpoly(&[156, 8]),
                tpoly(&[34]),
                tpoly(&[0, -1]),
                tpoly(&[1]),
            ],
        ),
        "masser_g2" => (2, product_of_linear(&[QPoly::zero(), QPoly::one(), tpow(1), tpow(2), tpow(4)])),
        "masser_g4" => (
            3,
            product_of_linear(&[QPoly::zero(), QPoly::one(), tpow(1), tpow(2), tpow(4), tpow(5), tpow(8)]),
        ),
        _ => return Err(Error::UnknownFamily(label.into())),
    };
    HyperellipticFamily::new(label, g, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_data() {
        let f = catalog("legendre").unwrap();
        assert_eq!(f.genus(), 1);
        // x³ − (1 + t)x² + t x
        assert_eq!(f.coeffs()[2], tpoly(&[-1, -1]));
        assert_eq!(f.coeffs()[1], tpoly(&[0, 1]));
        // locus {0, 1}: disc = t²(t − 1)² up to a constant
        let d = f.discriminant();
        let monic = d.monic();
        assert_eq!(monic, QPoly::from_ints(&[0, 0, 1, -2, 1]));
    }

    #[test]
    fn genera_and_degrees() {
        for (l, g, d) in [("wilson_g2", 2, 5), ("mestre_g3", 3, 7), ("masser_g2", 2, 5), ("masser_g4", 3, 7)] {
            let f = catalog(l).unwrap();
            assert_eq!((f.genus(), f.degree()), (g, d));
        }
        assert!(matches!(catalog("nope"), Err(Error::UnknownFamily(_))));
    }

    #[test]
    fn wilson_matches_printed_form() {
        let f = catalog("wilson_g2").unwrap();
        let t = Rational::from(3);
        // x⁵ + x⁴ − 3x³ + 3x² − 2x + 1 at t = 3
        assert_eq!(f.at_rational(&t), QPoly::from_ints(&[1, -2, 3, -3, 1, 1]));
    }

    #[test]
    fn isotrivial_family_rejected() {
        // y² = x⁵ − t⁵: every fibre is isomorphic to y² = x⁵ − 1
        let c = vec![tpoly(&[0, 0, 0, 0, 0, -1]), QPoly::zero(), QPoly::zero(), QPoly::zero(), QPoly::zero(), tpoly(&[1])];
        assert!(matches!(HyperellipticFamily::new("const", 2, c), Err(Error::Isotrivial(_))));
        for l in CATALOG {
            assert!(!catalog(l).unwrap().is_isotrivial().unwrap());
        }
    }

    #[test]
    fn json_roundtrip() {
        let f = catalog("masser_g2").unwrap();
        let g = HyperellipticFamily::from_json(&f.to_json()).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn masser_locus_contains_roots_of_unity() {
        let f = catalog("masser_g2").unwrap();
        let p = 128;
        let loc = f.discriminant_locus(p).unwrap();
        let minus_one = CBall::from_int(-1, p);
        assert!(loc.iter().any(|r| r.overlaps(&minus_one)));
        assert!(loc.iter().any(|r| r.overlaps(&CBall::zero(p))));
        assert!(f.is_smooth_at(&CBall::from_int(2, p)));
    }
}
