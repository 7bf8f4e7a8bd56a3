//! Endomorphisms of the period lattice by integer-relation search, and the
//! discriminants of the detected ring.
//!
//! With Π = P₂(τ | I), an integral R = (A B; C D) is the rational
//! representation of an endomorphism iff (τ | I)·R = α′(τ | I) for some α′,
//! i.e. τBτ + Dτ − τA − C = 0; then α′ = τB + D and α = P₂α′P₂⁻¹.

use rug::{Float, Integer, Rational};
use serde::Serialize;

use crate::arith::{CBall, CMat, Mag};
use crate::error::{Error, Result};
use crate::lattice::integer_relations;
use crate::periods::{periods_at, BigPeriodMatrix, HyperellipticFamily};
use crate::poly::{factor, QMat, QPoly, ZPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Classification {
    Generic,
    #[serde(rename = "RM")]
    Rm,
    #[serde(rename = "CM")]
    Cm,
    Other,
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Classification::Generic => "generic (not found below bounds)",
            Classification::Rm => "RM",
            Classification::Cm => "CM",
            Classification::Other => "other",
        })
    }
}

#[derive(Clone, Debug)]
pub struct Endomorphism {
    /// 2g × 2g, acting on cycle coordinates: Π·R = α·Π.
    pub rational: Vec<Vec<i64>>,
    /// g × g.
    pub analytic: CMat,
    /// R† = J⁻¹RᵀJ lies in the detected ring.
    pub rosati_stable: bool,
    /// ‖τBτ + Dτ − τA − C‖ (upper bound).
    pub residual: f64,
}

#[derive(Clone, Debug)]
pub struct EndomorphismData {
    pub genus: usize,
    /// ℤ-basis of the detected ring; the first element is the identity.
    pub basis: Vec<Endomorphism>,
    pub classification: Classification,
    /// Products of basis elements are integral combinations of the basis.
    pub closed: bool,
    pub commutative: bool,
    /// Entry bound S.
    pub bound: u64,
    /// Precisions (digits) at which the relations were confirmed.
    pub digits: Vec<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DiscKind {
    Center,
    Polarized,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Discriminant {
    pub value: i64,
    pub kind: DiscKind,
}

fn qmat(r: &[Vec<i64>]) -> QMat {
    QMat::from_fn(r.len(), r[0].len(), |i, j| Rational::from(r[i][j]))
}

fn flat(m: &QMat) -> Vec<Rational> {
    (0..m.rows).flat_map(|i| (0..m.cols).map(move |j| (i, j))).map(|ij| m[ij].clone()).collect()
}

fn to_int(m: &QMat) -> Option<Vec<Vec<i64>>> {
    (0..m.rows)
        .map(|i| {
            (0..m.cols)
                .map(|j| {
                    let x = &m[(i, j)];
                    if *x.denom() == 1 { x.numer().to_i64() } else { None }
                })
                .collect()
        })
        .collect()
}

/// J = (0 I; −I 0).
fn j_form(g: usize) -> QMat {
    QMat::from_fn(2 * g, 2 * g, |i, j| {
        if j == i + g {
            Rational::from(1)
        } else if i == j + g {
            Rational::from(-1)
        } else {
            Rational::new()
        }
    })
}

/// R† = J⁻¹RᵀJ.
pub fn rosati(r: &QMat) -> QMat {
    let j = j_form(r.rows / 2);
    j.scale(&Rational::from(-1)).mul(&r.transpose()).mul(&j)
}

/// Coordinates of `v` in the ℚ-span of `basis`, if it lies there.
fn coords(basis: &[QMat], v: &QMat) -> Option<Vec<Rational>> {
    let fb: Vec<Vec<Rational>> = basis.iter().map(flat).collect();
    let fv = flat(v);
    let n = fv.len();
    let r = basis.len();
    let aug = QMat::from_fn(n, r + 1, |i, k| if k < r { fb[k][i].clone() } else { fv[i].clone() });
    let (red, piv) = aug.rref();
    if piv.contains(&r) {
        return None;
    }
    let mut x = vec![Rational::new(); r];
    for (row, &p) in piv.iter().enumerate() {
        x[p] = red[(row, r)].clone();
    }
    Some(x)
}

fn int_coords(basis: &[QMat], v: &QMat) -> Option<Vec<Integer>> {
    coords(basis, v)?.into_iter().map(|x| (*x.denom() == 1).then(|| x.numer().clone())).collect()
}

/// Trace of multiplication by `x` on the ℤ-module spanned by `basis`.
fn regular_trace(basis: &[QMat], x: &QMat) -> Option<Rational> {
    let mut t = Rational::new();
    for (m, e) in basis.iter().enumerate() {
        t += coords(basis, &x.mul(e))?[m].clone();
    }
    Some(t)
}

fn gram_det(basis: &[QMat], pair: impl Fn(&QMat, &QMat) -> QMat) -> Option<Rational> {
    let n = basis.len();
    let mut g = QMat::zeros(n, n);
    for a in 0..n {
        for b in 0..n {
            g[(a, b)] = regular_trace(basis, &pair(&basis[a], &basis[b]))?;
        }
    }
    Some(g.det())
}

/// Smallest annihilating polynomial among the products of the irreducible
/// factors of the characteristic polynomial.
pub fn minimal_polynomial(r: &[Vec<i64>]) -> ZPoly {
    let m = qmat(r);
    let cp = ZPoly::from_qpoly(&m.charpoly());
    let (_, fs) = factor(&cp);
    let mut exps: Vec<u32> = vec![1; fs.len()];
    loop {
        let p = fs.iter().zip(&exps).fold(ZPoly::one(), |acc, ((f, _), &e)| (0..e).fold(acc, |a, _| a.mul(f)));
        if eval_at_matrix(&p.to_qpoly(), &m).is_zero() {
            return p;
        }
        // semisimplicity fails only for non-endomorphisms; grow exponents
        match exps.iter().zip(&fs).position(|(&e, (_, mult))| e < *mult) {
            Some(k) => exps[k] += 1,
            None => return cp,
        }
    }
}

fn eval_at_matrix(p: &QPoly, m: &QMat) -> QMat {
    let mut acc = QMat::zeros(m.rows, m.cols);
    for c in p.coeffs().iter().rev() {
        acc = acc.mul(m).add(&QMat::identity(m.rows).scale(c));
    }
    acc
}

/// Unimodular U with first row x (x primitive).
fn complete_to_unimodular(x: &[Integer]) -> Option<Vec<Vec<Integer>>> {
    let n = x.len();
    let mut y = x.to_vec();
    let mut v: Vec<Vec<Integer>> = (0..n).map(|i| (0..n).map(|j| Integer::from((i == j) as i32)).collect()).collect();
    let col_op = |v: &mut Vec<Vec<Integer>>, dst: usize, src: usize, q: &Integer| {
        for row in v.iter_mut() {
            let t = Integer::from(q * &row[src]);
            row[dst] -= t;
        }
    };
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| y[i] != 0).collect();
        let p = *nz.iter().min_by_key(|&&i| y[i].clone().abs())?;
        if nz.len() == 1 {
            for row in v.iter_mut() {
                row.swap(0, p);
            }
            y.swap(0, p);
            break;
        }
        for &j in &nz {
            if j != p {
                let q = Integer::from(&y[j] / &y[p]);
                let s = Integer::from(&q * &y[p]);
                y[j] -= s;
                col_op(&mut v, j, p, &q);
            }
        }
    }
    if y[0] == -1 {
        for row in v.iter_mut() {
            row[0] = -row[0].clone();
        }
    } else if y[0] != 1 {
        return None;
    }
    // U = V⁻¹
    let q = QMat::from_fn(n, n, |i, j| Rational::from(&v[i][j]));
    let inv = q.inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)].numer().clone()).collect()).collect())
}

/// E(R) = τBτ + Dτ − τA − C.
fn defect(tau: &CMat, r: &[Vec<i64>]) -> CMat {
    let g = tau.rows;
    let p = tau.prec();
    let blk = |r0: usize, c0: usize| CMat::from_fn(g, g, |i, j| CBall::from_int(r[r0 + i][c0 + j], p));
    let (a, b, c, d) = (blk(0, 0), blk(0, g), blk(g, 0), blk(g, g));
    tau.mul(&b).mul(tau).add(&d.mul(tau)).sub(&tau.mul(&a)).sub(&c)
}

/// Candidate relation matrices from one LLL run on τ.
fn relation_candidates(tau: &CMat, bound: u64, digits: u32) -> Result<Vec<Vec<Vec<i64>>>> {
    let g = tau.rows;
    let n = 2 * g;
    let p = tau.prec();
    let t = |i: usize, j: usize| &tau[(i, j)];
    let mut vals = vec![];
    for r in 0..n {
        for c in 0..n {
            let mut comp = vec![];
            for i in 0..g {
                for j in 0..g {
                    let coef = match (r < g, c < g) {
                        (true, true) if c == j => t(i, r).neg(),
                        (true, false) => t(i, r).mul(t(c - g, j)),
                        (false, true) if r - g == i && c == j => CBall::from_int(-1, p),
                        (false, false) if r - g == i => t(c - g, j).clone(),
                        _ => CBall::zero(p),
                    };
                    comp.push(Float::with_val(p, &coef.re));
                    comp.push(Float::with_val(p, &coef.im));
                }
            }
            vals.push(comp);
        }
    }
    let weight = (0.8 * digits as f64 * std::f64::consts::LOG2_10) as u32;
    let tol = 10f64.powf(-(digits as f64) / 2.0);
    let mut out = vec![];
    for rel in integer_relations(&vals, weight)? {
        let Some(flat): Option<Vec<i64>> = rel.iter().map(|x| x.to_i64()).collect() else { continue };
        if flat.iter().all(|&x| x == 0) || flat.iter().any(|x| x.unsigned_abs() > bound) {
            continue;
        }
        let m: Vec<Vec<i64>> = flat.chunks(n).map(|c| c.to_vec()).collect();
        if defect(tau, &m).max_abs().to_f64() < tol {
            out.push(m);
        }
    }
    Ok(out)
}

/// Effective digits of τ: its precision, capped by what the radii allow.
fn effective_digits(tau: &CMat) -> u32 {
    let from_prec = (tau.prec() as f64 / std::f64::consts::LOG2_10) as u32;
    let rad = tau.max_rad();
    let from_rad = if rad.is_zero() { u32::MAX } else { (-rad.log10()).max(0.0) as u32 };
    from_prec.min(from_rad)
}

fn tau_of(pi: &CMat) -> Result<(CMat, CMat)> {
    let g = pi.rows;
    if pi.cols != 2 * g {
        return Err(Error::InvalidInput("period matrix must be g × 2g".into()));
    }
    let p2 = pi.block(0, g, g, g);
    let inv = p2.inverse().map_err(|_| Error::NotInvertible("b-period block".into()))?;
    Ok((inv.mul(&pi.block(0, 0, g, g)), p2))
}

/// Endomorphisms of the lattice spanned by the columns of Π (g × 2g)
/// with |entries| ≤ S, found at Π's own precision.
pub fn detect_from_periods(pi: &CMat, bound: u64) -> Result<EndomorphismData> {
    let (tau, p2) = tau_of(pi)?;
    let digits = effective_digits(&tau);
    let found = relation_candidates(&tau, bound, digits)?;
    assemble(&tau, &p2, found, bound, vec![digits])
}

/// As `detect_from_periods`, requiring the Riemann relations.
pub fn detect_endomorphisms(p: &BigPeriodMatrix, bound: u64) -> Result<EndomorphismData> {
    if !p.riemann_relations_hold() {
        return Err(Error::InvalidInput("Riemann relations not certified".into()));
    }
    detect_from_periods(&p.matrix(), bound)
}

/// Detection at `digits` and `2·digits`; a relation is reported only if
/// found at the lower precision and confirmed at the higher one.
pub fn detect_endomorphisms_at(
    family: &HyperellipticFamily,
    t: &CBall,
    bound: u64,
    digits: u32,
) -> Result<EndomorphismData> {
    let lo = periods_at(family, t, digits)?;
    let hi = periods_at(family, t, 2 * digits)?;
    for p in [&lo, &hi] {
        if !p.riemann_relations_hold() {
            return Err(Error::InvalidInput("Riemann relations not certified".into()));
        }
    }
    let (tau_lo, _) = tau_of(&lo.matrix())?;
    let (tau_hi, p2_hi) = tau_of(&hi.matrix())?;
    let d_lo = effective_digits(&tau_lo).min(digits);
    let d_hi = effective_digits(&tau_hi).min(2 * digits);
    let tol_hi = 10f64.powf(-(d_hi as f64) / 2.0);
    let confirmed: Vec<_> = relation_candidates(&tau_lo, bound, d_lo)?
        .into_iter()
        .filter(|m| defect(&tau_hi, m).max_abs().to_f64() < tol_hi)
        .collect();
    assemble(&tau_hi, &p2_hi, confirmed, bound, vec![d_lo, d_hi])
}

fn assemble(
    tau: &CMat,
    p2: &CMat,
    found: Vec<Vec<Vec<i64>>>,
    bound: u64,
    digits: Vec<u32>,
) -> Result<EndomorphismData> {
    let g = tau.rows;
    let id = QMat::identity(2 * g);
    let mut basis: Vec<QMat> = vec![];
    for m in &found {
        let q = qmat(m);
        let mut trial = basis.clone();
        trial.push(q.clone());
        let rank = QMat::from_fn(trial.len(), 4 * g * g, |i, j| flat(&trial[i])[j].clone()).rank();
        if rank == trial.len() {
            basis = trial;
        }
    }
    // put the identity first
    match coords(&basis, &id) {
        None => basis.insert(0, id.clone()),
        Some(x) => {
            if x.iter().any(|c| *c.denom() != 1) {
                return Err(Error::RaisePrecision("identity is not integral in the detected lattice".into()));
            }
            let xi: Vec<Integer> = x.iter().map(|c| c.numer().clone()).collect();
            let u = complete_to_unimodular(&xi)
                .ok_or_else(|| Error::RaisePrecision("identity is not primitive in the detected lattice".into()))?;
            basis = u
                .iter()
                .map(|row| {
                    row.iter().zip(&basis).fold(QMat::zeros(2 * g, 2 * g), |acc, (c, b)| acc.add(&b.scale(&Rational::from(c))))
                })
                .collect();
        }
    }
    let mut closed = true;
    let mut commutative = true;
    for a in &basis {
        for b in &basis {
            let ab = a.mul(b);
            if int_coords(&basis, &ab).is_none() {
                closed = false;
            }
            if ab != b.mul(a) {
                commutative = false;
            }
        }
    }
    let r = basis.len();
    let all_symmetric = basis.iter().all(|b| rosati(b) == *b);
    let classification = if r == 1 {
        Classification::Generic
    } else if closed && commutative && r == 2 * g {
        Classification::Cm
    } else if closed && commutative && r == g && all_symmetric {
        Classification::Rm
    } else {
        Classification::Other
    };
    let p = tau.prec();
    let p2inv = p2.inverse().map_err(|_| Error::NotInvertible("b-period block".into()))?;
    let elems = basis
        .iter()
        .map(|b| {
            let m = to_int(b).ok_or_else(|| Error::InvalidInput("entry overflow".into()))?;
            let bb = CMat::from_fn(g, g, |i, j| CBall::from_int(m[i][g + j], p));
            let dd = CMat::from_fn(g, g, |i, j| CBall::from_int(m[g + i][g + j], p));
            let alpha = p2.mul(&tau.mul(&bb).add(&dd)).mul(&p2inv);
            Ok(Endomorphism {
                residual: defect(tau, &m).max_abs().to_f64(),
                rosati_stable: int_coords(&basis, &rosati(b)).is_some(),
                rational: m,
                analytic: alpha,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EndomorphismData { genus: g, basis: elems, classification, closed, commutative, bound, digits })
}

impl EndomorphismData {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    fn qbasis(&self) -> Vec<QMat> {
        self.basis.iter().map(|e| qmat(&e.rational)).collect()
    }

    /// Largest residual over the basis.
    pub fn max_residual(&self) -> f64 {
        self.basis.iter().map(|e| e.residual).fold(0.0, f64::max)
    }

    /// For rank-2 rings: the generator η of ℤ[η] = ring, normalized so its
    /// minimal polynomial is x² − D/4 or x² − x − (D − 1)/4.
    pub fn quadratic_generator(&self) -> Option<(Vec<Vec<i64>>, ZPoly)> {
        if self.rank() != 2 {
            return None;
        }
        let eta = qmat(&self.basis[1].rational);
        let mp = ZPoly::from_qpoly(&minimal_polynomial(&self.basis[1].rational).to_qpoly());
        if mp.degree() != 2 {
            return None;
        }
        // x² + bx + c: shift by k so b ∈ {0, −1}
        let b = mp.coeff(1).to_i64()?;
        let k = (b + b.rem_euclid(2)) / 2; // η + k has linear coefficient b − 2k
        let shifted = eta.add(&QMat::identity(eta.rows).scale(&Rational::from(k)));
        let m = to_int(&shifted)?;
        let mp = minimal_polynomial(&m);
        Some((m, mp))
    }

    /// Minimal polynomials of all basis elements are irreducible (no
    /// idempotents found among them or their pairwise sums).
    pub fn simple_below_bounds(&self) -> bool {
        let q = self.qbasis();
        let irreducible = |m: &QMat| {
            let Some(mi) = to_int(m) else { return false };
            factor(&minimal_polynomial(&mi)).1.len() == 1
        };
        q.iter().all(&irreducible) && q.iter().enumerate().all(|(i, a)| q[i + 1..].iter().all(|b| irreducible(&a.add(b))))
    }
}

/// Discriminant of the trace form on an integral basis of the center.
pub fn center_discriminant(e: &EndomorphismData) -> Result<Discriminant> {
    if !e.closed {
        return Err(Error::RaisePrecision("detected ring not closed under multiplication".into()));
    }
    let basis = e.qbasis();
    let center = if e.commutative { basis.clone() } else { integral_center(&basis)? };
    let d = gram_det(&center, |a, b| a.mul(b))
        .ok_or_else(|| Error::RaisePrecision("center basis not extractable".into()))?;
    rational_to_disc(d, DiscKind::Center)
}

/// Discriminant of (x, y) ↦ Tr(x·y†) on the detected ring: positive
/// definite by Rosati positivity, and equal to the trace form Tr(xy) on
/// Rosati-symmetric elements.
pub fn polarized_discriminant(e: &EndomorphismData) -> Result<Discriminant> {
    if !e.closed || e.basis.iter().any(|b| !b.rosati_stable) {
        return Err(Error::RaisePrecision("detected ring not Rosati-stable".into()));
    }
    let basis = e.qbasis();
    let d = gram_det(&basis, |a, b| a.mul(&rosati(b)))
        .ok_or_else(|| Error::RaisePrecision("trace form not extractable".into()))?;
    rational_to_disc(d, DiscKind::Polarized)
}

fn rational_to_disc(d: Rational, kind: DiscKind) -> Result<Discriminant> {
    if *d.denom() != 1 || d == 0 {
        return Err(Error::RaisePrecision(format!("non-integral or zero discriminant {d}")));
    }
    let value = d.numer().to_i64().ok_or_else(|| Error::InvalidInput("discriminant overflow".into()))?;
    Ok(Discriminant { value, kind })
}

/// ℤ-basis of {x ∈ ring : xb = bx ∀b}, via an exact integer kernel.
fn integral_center(basis: &[QMat]) -> Result<Vec<QMat>> {
    let r = basis.len();
    let mut cols: Vec<Vec<Integer>> = vec![vec![]; r];
    for (i, bi) in basis.iter().enumerate() {
        for bj in basis {
            let c = int_coords(basis, &bi.mul(bj).sub(&bj.mul(bi)))
                .ok_or_else(|| Error::RaisePrecision("commutator not integral".into()))?;
            cols[i].extend(c);
        }
    }
    let m = QMat::from_fn(r * r, r, |k, i| Rational::from(&cols[i][k]));
    let dim = r - m.rank();
    let vals: Vec<Vec<Float>> = cols.iter().map(|c| c.iter().map(|x| Float::with_val(256, x)).collect()).collect();
    let rels = integer_relations(&vals, 64)?;
    let center: Vec<QMat> = rels
        .into_iter()
        .take(dim)
        .map(|c| c.iter().zip(basis).fold(QMat::zeros(basis[0].rows, basis[0].cols), |acc, (x, b)| acc.add(&b.scale(&Rational::from(x)))))
        .collect();
    for z in &center {
        if basis.iter().any(|b| z.mul(b) != b.mul(z)) {
            return Err(Error::RaisePrecision("center basis not extractable".into()));
        }
    }
    Ok(center)
}

/// Bound on the residual a reported relation may have at `digits`.
pub fn residual_tolerance(digits: u32) -> Mag {
    Mag::from_f64(10f64.powf(-(digits as f64) / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::catalog;
    use crate::poly::is_irreducible;

    fn ring(mats: &[Vec<Vec<i64>>], g: usize) -> EndomorphismData {
        let tau = CMat::identity(g, 64);
        assemble(&tau, &CMat::identity(g, 64), mats.to_vec(), 50, vec![]).unwrap()
    }

    #[test]
    fn trace_form_examples() {
        // ℤ[i], ℤ[ω] (ω = (1+√−3)/2), ℤ[√−5] as 2×2 integer matrices
        for (m, d) in [
            (vec![vec![0, -1], vec![1, 0]], -4),
            (vec![vec![0, -1], vec![1, 1]], -3),
            (vec![vec![0, -5], vec![1, 0]], -20),
        ] {
            let e = ring(&[vec![vec![1, 0], vec![0, 1]], m], 1);
            assert_eq!(center_discriminant(&e).unwrap().value, d);
        }
        let z = ring(&[], 1);
        assert_eq!(z.classification, Classification::Generic);
        assert_eq!(center_discriminant(&z).unwrap().value, 1);
        assert_eq!(polarized_discriminant(&z).unwrap().value, 1);
    }

    #[test]
    fn unimodular_completion() {
        let x: Vec<Integer> = [6, 10, 15].iter().map(|&v| Integer::from(v)).collect();
        let u = complete_to_unimodular(&x).unwrap();
        assert_eq!(u[0], x);
        let q = QMat::from_fn(3, 3, |i, j| Rational::from(&u[i][j]));
        assert_eq!(q.det().clone().abs(), 1);
    }

    #[test]
    fn legendre_cm_point() {
        let f = catalog("legendre").unwrap();
        let t = CBall::from_int(-1, 256);
        let e = detect_endomorphisms_at(&f, &t, 50, 40).unwrap();
        assert_eq!(e.classification, Classification::Cm);
        assert_eq!(e.rank(), 2);
        assert_eq!(center_discriminant(&e).unwrap().value, -4);
        assert_eq!(polarized_discriminant(&e).unwrap().value, 4);
        // α is multiplication by ±i
        let a = e.basis[1].analytic[(0, 0)].to_c64();
        assert!(a.0.abs() < 1e-20 && (a.1.abs() - 1.0).abs() < 1e-20);
        assert!(e.max_residual() < 1e-30);
    }

    #[test]
    fn legendre_generic_point() {
        let f = catalog("legendre").unwrap();
        let t = CBall::from_f64(0.3712, 0.1234, 256);
        for d in [30, 40] {
            let e = detect_endomorphisms_at(&f, &t, 50, d).unwrap();
            assert_eq!(e.classification, Classification::Generic);
            assert_eq!(polarized_discriminant(&e).unwrap().value, 1);
        }
    }

    #[test]
    fn wilson_real_multiplication() {
        let f = catalog("wilson_g2").unwrap();
        let t = CBall::from_f64(3.0, 0.5, 256);
        let e = detect_endomorphisms_at(&f, &t, 50, 30).unwrap();
        assert_eq!(e.classification, Classification::Rm, "rank {}", e.rank());
        let (eta, mp) = e.quadratic_generator().unwrap();
        assert_eq!(mp, ZPoly::from_ints(&[-1, -1, 1]));
        let cp = ZPoly::from_qpoly(&qmat(&eta).charpoly());
        assert_eq!(cp, mp.mul(&mp));
        let d = polarized_discriminant(&e).unwrap().value;
        assert!(d % 5 == 0 && ((d / 5) as f64).sqrt().fract() == 0.0, "Disc_r = {d}");
    }

    #[test]
    fn masser_generic() {
        let f = catalog("masser_g2").unwrap();
        let t = CBall::from_f64(3.3, 0.7, 256);
        let e = detect_endomorphisms_at(&f, &t, 50, 30).unwrap();
        assert_eq!(e.classification, Classification::Generic);
    }

    #[test]
    fn isogeny_stable_center_discriminant() {
        let f = catalog("legendre").unwrap();
        let p = periods_at(&f, &CBall::from_int(-1, 256), 60).unwrap().matrix();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(7);
        let mut tried = 0;
        while tried < 6 {
            let m: Vec<i64> = (0..4).map(|_| rand::Rng::gen_range(&mut rng, -2..=2)).collect();
            let det = m[0] * m[3] - m[1] * m[2];
            if det == 0 || det.abs() > 4 {
                continue;
            }
            tried += 1;
            let mm = CMat::from_int(2, 2, &m, p.prec());
            let e = detect_from_periods(&p.mul(&mm), 50).unwrap();
            let d = center_discriminant(&e).unwrap().value;
            let q = d / -4;
            assert!(d % 4 == 0 && q > 0 && (q as f64).sqrt().fract() == 0.0, "M = {m:?}: D = {d}");
        }
    }

    #[test]
    fn mestre_cubic_real_multiplication() {
        let f = catalog("mestre_g3").unwrap();
        let t = CBall::from_f64(2.5, 0.4, 256);
        let e = detect_endomorphisms_at(&f, &t, 50, 40).unwrap();
        assert_eq!(e.classification, Classification::Rm, "rank {}", e.rank());
        // some generator has minimal polynomial of x³ + x² − 2x − 1 up to x ↦ ±x + k
        let cubic = e.basis.iter().skip(1).map(|b| minimal_polynomial(&b.rational)).find(|m| m.degree() == 3).unwrap();
        assert!(is_irreducible(&cubic));
        let disc = cubic_discriminant(&cubic);
        assert!(disc % 49 == 0 && ((disc / 49) as f64).sqrt().fract() == 0.0, "disc {disc}");
    }
}

#[cfg(test)]
fn cubic_discriminant(p: &ZPoly) -> i64 {
    let c: Vec<i64> = p.coeffs().iter().map(|x| x.to_i64().unwrap()).collect();
    let (d, cc, b, a) = (c[0], c[1], c[2], c[3]);
    b * b * cc * cc - 4 * a * cc.pow(3) - 4 * b.pow(3) * d - 27 * a * a * d * d + 18 * a * b * cc * d
}
