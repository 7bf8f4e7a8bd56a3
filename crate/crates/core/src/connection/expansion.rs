//! Frobenius expansions at regular singular points.
//!
//! In the local variable w (w = z − s, or w = 1/z at ∞) a fundamental
//! solution is written as
//!
//!   X(w) = G(w) · H(w) · w^L,     H(0) = I,
//!
//! where G is a Laurent-monomial gauge (the product of the shears and constant
//! changes of basis used to reach a non-resonant simple pole), H a convergent
//! power series and L block diagonal with blocks λ·I + N, N nilpotent.  The
//! reduction is done exactly over ℚ, which requires s rational or s = ∞.

use rug::Rational;

use super::system::{ConnectionSystem, Singularity};
use crate::arith::{bits_for_digits, CBall, CMat, Mag};
use crate::error::{Error, Result};
use crate::poly::{factor, QMat, RationalFunction, ZPoly};

/// Where an expansion is centred.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LocalPoint {
    Finite(Rational),
    Infinity,
}

impl LocalPoint {
    pub fn from_singularity(s: &Singularity) -> Result<LocalPoint> {
        match s {
            Singularity::Infinity => Ok(LocalPoint::Infinity),
            Singularity::Finite { factor, .. } if factor.degree() == 1 => {
                let c = factor.coeffs();
                Ok(LocalPoint::Finite(Rational::from((-c[0].clone(), c[1].clone()))))
            }
            Singularity::Finite { .. } => Err(Error::InvalidInput(
                "local expansions need a rational singular point or ∞".into(),
            )),
        }
    }

    /// Local coordinate w of z.
    pub fn local_coordinate(&self, z: &CBall) -> Result<CBall> {
        match self {
            LocalPoint::Finite(s) => Ok(z.sub(&CBall::from_rational(s, z.prec()))),
            LocalPoint::Infinity => z.inv(),
        }
    }

    /// Inverse of `local_coordinate`.
    pub fn from_local(&self, w: &CBall) -> Result<CBall> {
        match self {
            LocalPoint::Finite(s) => Ok(w.add(&CBall::from_rational(s, w.prec()))),
            LocalPoint::Infinity => w.inv(),
        }
    }
}

/// Local system w·dY/dw = B(w)·Y together with the gauge X = G·Y.
#[derive(Clone, Debug)]
struct LocalForm {
    n: usize,
    b: Vec<RationalFunction>,
    g: Vec<RationalFunction>,
}

fn rf_const(q: &Rational) -> RationalFunction {
    RationalFunction::constant(q.clone())
}

fn rf_matmul(n: usize, a: &[RationalFunction], b: &[RationalFunction]) -> Vec<RationalFunction> {
    let mut out = vec![RationalFunction::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = RationalFunction::zero();
            for k in 0..n {
                if !a[i * n + k].is_zero() && !b[k * n + j].is_zero() {
                    s = s.add(&a[i * n + k].mul(&b[k * n + j]));
                }
            }
            out[i * n + j] = s;
        }
    }
    out
}

fn q_to_rf(m: &QMat) -> Vec<RationalFunction> {
    (0..m.rows * m.cols).map(|k| rf_const(&m[(k / m.cols, k % m.cols)])).collect()
}

/// Value at w = 0 of a function holomorphic there.
fn value_at_zero(f: &RationalFunction) -> Result<Rational> {
    if f.is_zero() {
        return Ok(Rational::new());
    }
    let d = f.den().coeff(0);
    if d == 0 {
        return Err(Error::IrregularSingularity("pole of order > 1 after reduction".into()));
    }
    Ok(f.num().coeff(0) / d)
}

impl LocalForm {
    fn residue(&self) -> Result<QMat> {
        let n = self.n;
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = value_at_zero(&self.b[i * n + j])?;
            }
        }
        Ok(m)
    }

    /// Y = P·Y'.
    fn conjugate(&mut self, p: &QMat) {
        let pinv = p.inverse().expect("invertible change of basis");
        let n = self.n;
        self.b = rf_matmul(n, &rf_matmul(n, &q_to_rf(&pinv), &self.b), &q_to_rf(p));
        self.g = rf_matmul(n, &self.g, &q_to_rf(p));
    }

    /// Y = diag(w^{e_i})·Y'.
    fn shear(&mut self, e: &[i64]) {
        let n = self.n;
        for i in 0..n {
            for j in 0..n {
                let k = i * n + j;
                let mut v = self.b[k].mul_power(e[j] - e[i]);
                if i == j && e[i] != 0 {
                    v = v.sub(&RationalFunction::constant(Rational::from(e[i])));
                }
                self.b[k] = v;
                self.g[k] = self.g[k].mul_power(e[j]);
            }
        }
    }
}

/// Rational eigenvalues with algebraic multiplicities, ascending.
fn rational_eigenvalues(m: &QMat) -> Result<Vec<(Rational, usize)>> {
    let cp = ZPoly::from_qpoly(&m.charpoly());
    let (_, facs) = factor(&cp);
    let mut out = vec![];
    for (f, e) in facs {
        if f.degree() != 1 {
            return Err(Error::InvalidInput(format!(
                "local exponents are not rational (factor of degree {})",
                f.degree()
            )));
        }
        let c = f.coeffs();
        out.push((Rational::from((-c[0].clone(), c[1].clone())), e as usize));
    }
    out.sort();
    Ok(out)
}

fn shifted_power(m: &QMat, lambda: &Rational) -> QMat {
    let n = m.rows;
    m.sub(&QMat::identity(n).scale(lambda)).pow(n as u32)
}

/// Column basis of the image of `m`.
fn image(m: &QMat) -> QMat {
    let (_, piv) = m.rref();
    QMat::from_fn(m.rows, piv.len(), |i, k| m[(i, piv[k])].clone())
}

fn is_pos_integer(q: &Rational) -> bool {
    *q > 0 && *q.denom() == 1
}

/// Raise the smallest exponent of each resonant class until no two
/// exponents differ by a positive integer.
fn remove_resonance(form: &mut LocalForm) -> Result<()> {
    let n = form.n;
    for _ in 0..64 * n.max(1) + 64 {
        let b0 = form.residue()?;
        let eig = rational_eigenvalues(&b0)?;
        let nu = eig.iter().map(|e| &e.0).find(|nu| {
            eig.iter().any(|(mu, _)| is_pos_integer(&Rational::from(mu - *nu)))
        });
        let Some(nu) = nu.cloned() else { return Ok(()) };
        let m = shifted_power(&b0, &nu);
        let e = m.kernel();
        let p = e.hcat(&image(&m));
        let r = e.cols;
        form.conjugate(&p);
        let mut sh = vec![0i64; n];
        sh[..r].fill(-1);
        form.shear(&sh);
    }
    Err(Error::InvalidInput("resonance reduction did not terminate".into()))
}

/// One diagonal block λ·I + N of the exponent matrix L.
#[derive(Clone, Debug)]
pub struct ExponentBlock {
    pub lambda: Rational,
    pub start: usize,
    pub size: usize,
    /// Nilpotent part N, size × size.
    pub nilpotent: QMat,
}

impl ExponentBlock {
    /// Smallest m with N^m = 0, minus one: the highest power of log w.
    pub fn log_degree(&self) -> usize {
        (1..=self.size).find(|&m| self.nilpotent.pow(m as u32).is_zero()).unwrap_or(self.size) - 1
    }
}

/// Certified Frobenius expansion at a regular singular point.
#[derive(Clone, Debug)]
pub struct LocalExpansion {
    pub point: LocalPoint,
    pub blocks: Vec<ExponentBlock>,
    /// Gauge G(w): Laurent monomials in w, row-major.
    gauge: Vec<RationalFunction>,
    /// H_0 = I, H_1, …, H_depth.
    series: Vec<CMat>,
    /// Branch cut: the ray arg w = `cut` (radians).
    pub cut: f64,
    /// Radius (in w) of the punctured disc where the remainder is certified.
    pub disc_radius: f64,
    /// Bound on max |entry| of the series tail of H on that disc.
    pub remainder: Mag,
    /// Radius of convergence lower bound of H (in w).
    pub convergence_radius: f64,
    majorant: (Mag, f64, f64),
    prec: u32,
}

/// The first `k + 1` Taylor coefficients at 0 of a function holomorphic there.
fn taylor_coeffs(f: &RationalFunction, k: usize, prec: u32) -> Vec<CBall> {
    let mut out = vec![CBall::zero(prec); k + 1];
    if f.is_zero() {
        return out;
    }
    let num: Vec<CBall> = f.num().coeffs().iter().map(|c| CBall::from_rational(c, prec)).collect();
    let den: Vec<CBall> = f.den().coeffs().iter().map(|c| CBall::from_rational(c, prec)).collect();
    let d0 = Rational::from(f.den().coeff(0).recip_ref());
    for i in 0..=k {
        let mut s = num.get(i).cloned().unwrap_or_else(|| CBall::zero(prec));
        for j in 1..den.len().min(i + 1) {
            s = s.sub(&den[j].mul(&out[i - j]));
        }
        out[i] = s.mul_rational(&d0);
    }
    out
}

/// Solve B0·H − H·(B0 + k) = rhs.
fn sylvester(b0: &CMat, k: usize, rhs: &CMat) -> Result<CMat> {
    let n = b0.rows;
    let p = b0.prec();
    let mut t = CMat::zeros(n * n, n * n, p);
    for i in 0..n {
        for j in 0..n {
            let r = i * n + j;
            for l in 0..n {
                t[(r, l * n + j)] = t[(r, l * n + j)].add(&b0[(i, l)]);
                t[(r, i * n + l)] = t[(r, i * n + l)].sub(&b0[(l, j)]);
            }
            t[(r, r)] = t[(r, r)].sub(&CBall::from_int(k as i64, p));
        }
    }
    let v = CMat::from_fn(n * n, 1, |r, _| rhs[(r / n, r % n)].clone());
    let x = t.solve(&v)?;
    Ok(CMat::from_fn(n, n, |i, j| x[(i * n + j, 0)].clone()))
}

impl ConnectionSystem {
    /// Frobenius expansion at `s` with `depth` series terms.  `cut` is the
    /// direction (radians, in the local variable w) of the branch cut.
    pub fn local_expansion(&self, s: &Singularity, depth: usize, cut: f64, digits: u32) -> Result<LocalExpansion> {
        let n = self.dimension();
        let point = LocalPoint::from_singularity(s)?;
        if self.pole_orders(s).iter().all(|o| o.map_or(true, |o| o <= 0)) {
            return Err(Error::NotSingular);
        }
        let shear = self.shear_at(s)?;
        let b = self
            .entries()
            .iter()
            .map(|e| match &point {
                LocalPoint::Finite(r) => e.shift(r).mul_power(1),
                LocalPoint::Infinity => e.invert_variable().mul_power(-1).neg(),
            })
            .collect();
        let id: Vec<RationalFunction> = (0..n * n)
            .map(|k| if k / n == k % n { rf_const(&Rational::from(1)) } else { RationalFunction::zero() })
            .collect();
        let mut form = LocalForm { n, b, g: id };
        form.shear(&shear);
        if form.b.iter().any(|f| f.valuation_at_zero() < 0) {
            return Err(Error::IrregularSingularity("shear did not produce a simple pole".into()));
        }
        remove_resonance(&mut form)?;

        // split the residue into generalized eigenspaces
        let b0 = form.residue()?;
        let eig = rational_eigenvalues(&b0)?;
        let mut p = QMat::zeros(n, 0);
        let mut spans = vec![];
        for (lam, _) in &eig {
            let e = shifted_power(&b0, lam).kernel();
            spans.push((lam.clone(), p.cols, e.cols));
            p = p.hcat(&e);
        }
        form.conjugate(&p);
        let b0 = form.residue()?;
        let blocks: Vec<ExponentBlock> = spans
            .into_iter()
            .map(|(lambda, start, size)| {
                let nilpotent = b0.block(start, start, size, size).sub(&QMat::identity(size).scale(&lambda));
                ExponentBlock { lambda, start, size, nilpotent }
            })
            .collect();

        let prec = bits_for_digits(digits) + 32;
        let coeffs: Vec<Vec<CBall>> = form.b.iter().map(|f| taylor_coeffs(f, depth, prec)).collect();
        let bj: Vec<CMat> = (0..=depth).map(|j| CMat::from_fn(n, n, |r, c| coeffs[r * n + c][j].clone())).collect();
        let mut series = vec![CMat::identity(n, prec)];
        for k in 1..=depth {
            let mut rhs = CMat::zeros(n, n, prec);
            for j in 1..=k {
                rhs = rhs.sub(&bj[j].mul(&series[k - j]));
            }
            series.push(sylvester(&bj[0], k, &rhs)?);
        }

        let local = ConnectionSystem::new(n, form.b.clone())?;
        let origin = CBall::zero(64);
        let conv = local.distance_to_singularities(&origin);
        let (disc_radius, rho) = if conv.is_finite() { (conv / 2.0, 0.8 * conv) } else { (1.0, 4.0) };
        let m = local.sup_norm_on_circle(&origin, rho)?;
        let beta = b0.to_cmat(64).norm_inf().to_f64();
        let mut out = LocalExpansion {
            point,
            blocks,
            gauge: form.g,
            series,
            cut,
            disc_radius,
            remainder: Mag::inf(),
            convergence_radius: conv,
            majorant: (m, rho, beta),
            prec,
        };
        out.remainder = out.tail_bound(disc_radius);
        Ok(out)
    }
}

impl LocalExpansion {
    pub fn depth(&self) -> usize {
        self.series.len() - 1
    }

    pub fn dimension(&self) -> usize {
        self.series[0].rows
    }

    /// Distinct exponents λ (the exponents of w^L).
    pub fn exponents(&self) -> Vec<Rational> {
        let mut v: Vec<Rational> = self.blocks.iter().map(|b| b.lambda.clone()).collect();
        v.dedup();
        v
    }

    /// Highest power of log w that occurs.
    pub fn log_degree(&self) -> usize {
        self.blocks.iter().map(ExponentBlock::log_degree).max().unwrap_or(0)
    }

    /// Bound on the ∞-norm of Σ_{k>depth} H_k w^k for |w| ≤ r: from the
    /// recurrence, ‖H_k‖(k − 2‖B₀‖) ≤ Σ_j ‖B_j‖‖H_{k−j}‖ with Cauchy bounds
    /// ‖B_j‖ ≤ M ρ^{−j}, whose majorant terms decay with ratio
    /// ≤ θ = (r/ρ)(1 + M/(K+1−2β)).
    pub fn tail_bound(&self, r: f64) -> Mag {
        let (m, rho, beta) = &self.majorant;
        let k1 = self.series.len() as f64;
        let denom = (k1 - 2.0 * beta) * (1.0 - 1e-12);
        if denom <= 0.0 || r >= *rho {
            return Mag::inf();
        }
        let q = Mag::from_f64(r).div(&Mag::from_f64(*rho));
        let md = m.div(&Mag::from_f64(denom));
        let theta = q.mul(&Mag::from_f64(1.0).add(&md)).to_f64();
        if theta >= 1.0 {
            return Mag::inf();
        }
        let rm = Mag::from_f64(*rho);
        let s = self
            .series
            .iter()
            .enumerate()
            .fold(Mag::zero(), |acc, (i, h)| acc.add(&h.norm_inf().mul(&rm.pow(i as u32))));
        let t = md.mul(&s).mul(&q.pow(self.series.len() as u32));
        t.div(&Mag::from_f64((1.0 - theta) * (1.0 - 1e-12)))
    }

    /// log w on the branch with the cut along arg w = `cut`.
    pub fn log_local(&self, w: &CBall) -> Result<CBall> {
        let p = w.prec();
        let pi = CBall::pi(p);
        let shift = CBall::from_f64(self.cut, 0.0, p).sub(&pi);
        let rot = w.mul(&CBall::cis(&shift.neg().re_ball()));
        let re = rot.re_ball();
        if !re.is_positive() && rot.im_ball().contains_zero() {
            return Err(Error::InvalidInput("point on the branch cut".into()));
        }
        Ok(rot.log()?.add(&shift.mul_i()))
    }

    fn h_at(&self, w: &CBall) -> CMat {
        let mut acc = self.series.last().unwrap().clone();
        for h in self.series.iter().rev().skip(1) {
            acc = acc.scale(w).add(h);
        }
        let tail = self.tail_bound(w.abs_upper().to_f64());
        acc.map(|x| x.clone().with_rad(x.rad.add(&tail)))
    }

    fn gauge_at(&self, w: &CBall) -> Result<CMat> {
        let n = self.dimension();
        let mut g = CMat::zeros(n, n, w.prec());
        for (k, f) in self.gauge.iter().enumerate() {
            if !f.is_zero() {
                g[(k / n, k % n)] = f.eval(w)?;
            }
        }
        Ok(g)
    }

    /// Decomposition X(w) = Σ w^λ (log w)^m C_{λ,m}(w): returns (λ, m, C).
    pub fn eval_parts(&self, w: &CBall) -> Result<Vec<(Rational, usize, CMat)>> {
        let w = w.set_prec(self.prec);
        let n = self.dimension();
        let gh = self.gauge_at(&w)?.mul(&self.h_at(&w));
        let mut out = vec![];
        for b in &self.blocks {
            let nc = b.nilpotent.to_cmat(self.prec);
            let mut np = CMat::identity(b.size, self.prec);
            let mut fact = 1i64;
            for m in 0..=b.log_degree() {
                if m > 0 {
                    np = np.mul(&nc);
                    fact *= m as i64;
                }
                let mut e = CMat::zeros(n, n, self.prec);
                for i in 0..b.size {
                    for j in 0..b.size {
                        e[(b.start + i, b.start + j)] = np[(i, j)].div_int(fact);
                    }
                }
                out.push((b.lambda.clone(), m, gh.mul(&e)));
            }
        }
        Ok(out)
    }

    /// Value at a local coordinate w.
    pub fn eval_local(&self, w: &CBall) -> Result<CMat> {
        let w = w.set_prec(self.prec);
        let l = self.log_local(&w)?;
        let n = self.dimension();
        let mut x = CMat::zeros(n, n, self.prec);
        for (lam, m, c) in self.eval_parts(&w)? {
            let f = l.mul_rational(&lam).exp().mul(&l.pow(m as u32));
            x = x.add(&c.scale(&f));
        }
        Ok(x)
    }

    /// Value at z.
    pub fn eval(&self, z: &CBall) -> Result<CMat> {
        self.eval_local(&self.point.local_coordinate(&z.set_prec(self.prec))?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::system::legendre_system;
    use crate::poly::QPoly;
    use std::f64::consts::PI;

    fn finite(s: i64) -> Singularity {
        Singularity::Finite { point: CBall::from_int(s, 128), factor: ZPoly::from_ints(&[-s, 1]) }
    }

    /// Compare the expansion with continuation along an arc of radius r
    /// around the (finite) centre, at 10 sample points.
    fn check_against_continuation(sys: &ConnectionSystem, e: &LocalExpansion, c: i64, r: f64, digits: u32) {
        let p = bits_for_digits(digits);
        let pts: Vec<CBall> = (0..10)
            .map(|j| {
                let th = -2.7 + 0.6 * j as f64;
                CBall::from_f64(c as f64 + r * th.cos(), r * th.sin(), p).mid()
            })
            .collect();
        let mut v = e.eval(&pts[0]).unwrap();
        for w in pts.windows(2) {
            v = sys.transport(&v, w, digits).unwrap().0;
            let x = e.eval(&w[1]).unwrap();
            assert!(v.sub(&x).is_zero_within(1e-20), "mismatch {}", v.sub(&x).max_abs());
        }
    }

    #[test]
    fn legendre_exponents_at_zero_and_one() {
        let s = legendre_system();
        for pt in [0, 1] {
            let e = s.local_expansion(&finite(pt), 120, PI, 30).unwrap();
            assert_eq!(e.exponents(), vec![Rational::new()]);
            assert_eq!(e.log_degree(), 1);
            assert!(e.remainder.lt_f64(1e-20));
        }
    }

    #[test]
    fn legendre_exponents_at_infinity() {
        let s = legendre_system();
        let e = s.local_expansion(&Singularity::Infinity, 120, PI, 30).unwrap();
        assert_eq!(e.exponents(), vec![Rational::from((1, 2))]);
        assert_eq!(e.log_degree(), 1);
    }

    #[test]
    fn legendre_expansion_matches_continuation() {
        let s = legendre_system();
        let e = s.local_expansion(&finite(0), 160, PI, 40).unwrap();
        check_against_continuation(&s, &e, 0, 0.4, 40);
        let e1 = s.local_expansion(&finite(1), 160, PI, 40).unwrap();
        check_against_continuation(&s, &e1, 1, 0.4, 40);
    }

    #[test]
    fn resonant_exponents_are_merged() {
        // w X' = [[0, 1], [0, 1]] X: exponents 0 and 1 differ by an integer
        let z = QPoly::x();
        let inv = RationalFunction::new(QPoly::one(), z).unwrap();
        let sys = ConnectionSystem::new(2, vec![RationalFunction::zero(), inv.clone(), RationalFunction::zero(), inv])
            .unwrap();
        let e = sys.local_expansion(&finite(0), 40, PI, 30).unwrap();
        assert_eq!(e.exponents(), vec![Rational::from(1)]);
        check_against_continuation(&sys, &e, 0, 0.5, 30);
    }

    #[test]
    fn regular_point_rejected() {
        let s = legendre_system();
        assert!(matches!(s.local_expansion(&finite(2), 20, PI, 20), Err(Error::NotSingular)));
    }
}
