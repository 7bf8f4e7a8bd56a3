//! The Siegel upper half-space: points, the symplectic action, reduction,
//! norms and cusp profiles.

pub mod cusp;
pub mod reduce;

pub use cusp::{cusp_norm_profile, fit_affine_bound, norm, CuspProfile};
pub use reduce::{reduce, reduce_with_cap, ReductionResult, DEFAULT_ITERATION_CAP};

use crate::arith::cmat::is_positive_definite;
use crate::arith::{CBall, CMat, Mag};
use crate::error::{Error, Result};
use serde::Serialize;

/// A symmetric g×g matrix with positive-definite imaginary part.
#[derive(Clone, Debug)]
pub struct SiegelPoint {
    tau: CMat,
}

impl SiegelPoint {
    /// Validate τ: symmetric up to its certified error (then averaged) and
    /// Im τ certified positive definite.
    pub fn new(tau: CMat) -> Result<SiegelPoint> {
        if !tau.is_square() {
            return Err(Error::InvalidInput("τ must be square".into()));
        }
        let (sym, asym) = tau.symmetrize();
        let tol = tau.max_rad().mul_f64(4.0).add(&Mag::pow2(-(tau.prec() as i32) / 2));
        if !asym.le(&tol) {
            return Err(Error::SymmetryViolation(format!("‖τ − τᵀ‖ = {}", asym.to_f64())));
        }
        // keep the asymmetry inside the radii
        let sym = sym.map(|x| x.clone().with_rad(x.rad.add(&asym)));
        if !is_positive_definite(&sym.im_part()) {
            return Err(Error::InvalidInput("Im τ is not certifiably positive definite".into()));
        }
        Ok(SiegelPoint { tau: sym })
    }

    pub fn from_c64(entries: &[(f64, f64)], g: usize, prec: u32) -> Result<SiegelPoint> {
        SiegelPoint::new(CMat::from_fn(g, g, |i, j| {
            let (re, im) = entries[i * g + j];
            CBall::from_f64(re, im, prec)
        }))
    }

    pub fn tau(&self) -> &CMat {
        &self.tau
    }

    pub fn genus(&self) -> usize {
        self.tau.rows
    }

    pub fn to_c64(&self) -> Vec<Vec<(f64, f64)>> {
        let g = self.genus();
        (0..g).map(|i| (0..g).map(|j| self.tau[(i, j)].to_c64()).collect()).collect()
    }

    pub fn max_rad(&self) -> Mag {
        self.tau.max_rad()
    }

    /// Entrywise ball overlap.
    pub fn overlaps(&self, o: &SiegelPoint) -> bool {
        self.tau.overlaps(&o.tau)
    }
}

/// An integral symplectic matrix (A B; C D) with γᵀJγ = J.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymplecticMatrix {
    g: usize,
    m: Vec<Vec<i64>>,
}

fn matmul(a: &[Vec<i64>], b: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = a.len();
    let k = b.len();
    let c = b[0].len();
    (0..n).map(|i| (0..c).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect()).collect()
}

fn transpose(a: &[Vec<i64>]) -> Vec<Vec<i64>> {
    (0..a[0].len()).map(|j| a.iter().map(|r| r[j]).collect()).collect()
}

fn j_form(g: usize) -> Vec<Vec<i64>> {
    let mut j = vec![vec![0; 2 * g]; 2 * g];
    for i in 0..g {
        j[i][g + i] = 1;
        j[g + i][i] = -1;
    }
    j
}

impl SymplecticMatrix {
    pub fn new(m: Vec<Vec<i64>>) -> Result<SymplecticMatrix> {
        let n = m.len();
        if n % 2 != 0 || m.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput("symplectic matrix must be 2g × 2g".into()));
        }
        let g = n / 2;
        let j = j_form(g);
        if matmul(&matmul(&transpose(&m), &j), &m) != j {
            return Err(Error::InvalidInput("matrix is not symplectic".into()));
        }
        Ok(SymplecticMatrix { g, m })
    }

    pub fn identity(g: usize) -> SymplecticMatrix {
        let m = (0..2 * g).map(|i| (0..2 * g).map(|j| (i == j) as i64).collect()).collect();
        SymplecticMatrix { g, m }
    }

    pub fn from_blocks(a: &[Vec<i64>], b: &[Vec<i64>], c: &[Vec<i64>], d: &[Vec<i64>]) -> Result<SymplecticMatrix> {
        let g = a.len();
        let m = (0..2 * g)
            .map(|i| {
                (0..2 * g)
                    .map(|j| match (i < g, j < g) {
                        (true, true) => a[i][j],
                        (true, false) => b[i][j - g],
                        (false, true) => c[i - g][j],
                        (false, false) => d[i - g][j - g],
                    })
                    .collect()
            })
            .collect();
        SymplecticMatrix::new(m)
    }

    /// τ ↦ τ + B for an integral symmetric B.
    pub fn translation(b: &[Vec<i64>]) -> SymplecticMatrix {
        let g = b.len();
        let mut m = SymplecticMatrix::identity(g).m;
        for i in 0..g {
            for j in 0..g {
                m[i][g + j] = b[i][j];
            }
        }
        SymplecticMatrix { g, m }
    }

    /// τ ↦ U τ Uᵀ for U ∈ GL_g(ℤ).
    pub fn change_of_basis(u: &[Vec<i64>]) -> Result<SymplecticMatrix> {
        let g = u.len();
        let uinv_t = transpose(&integer_inverse(u)?);
        let z = vec![vec![0; g]; g];
        SymplecticMatrix::from_blocks(u, &z, &z, &uinv_t)
    }

    /// τ ↦ −τ⁻¹.
    pub fn inversion(g: usize) -> SymplecticMatrix {
        let mut m = vec![vec![0; 2 * g]; 2 * g];
        for i in 0..g {
            m[i][g + i] = -1;
            m[g + i][i] = 1;
        }
        SymplecticMatrix { g, m }
    }

    /// The genus-1 inversion acting on coordinate k only.
    pub fn partial_inversion(g: usize, k: usize) -> SymplecticMatrix {
        let mut m = SymplecticMatrix::identity(g).m;
        m[k][k] = 0;
        m[g + k][g + k] = 0;
        m[k][g + k] = -1;
        m[g + k][k] = 1;
        SymplecticMatrix { g, m }
    }

    pub fn genus(&self) -> usize {
        self.g
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn block(&self, r: usize, c: usize) -> Vec<Vec<i64>> {
        let g = self.g;
        (0..g).map(|i| (0..g).map(|j| self.m[r * g + i][c * g + j]).collect()).collect()
    }

    pub fn mul(&self, o: &SymplecticMatrix) -> SymplecticMatrix {
        SymplecticMatrix { g: self.g, m: matmul(&self.m, &o.m) }
    }

    /// γ⁻¹ = −J γᵀ J.
    pub fn inverse(&self) -> SymplecticMatrix {
        let j = j_form(self.g);
        let m = matmul(&matmul(&j, &transpose(&self.m)), &j);
        SymplecticMatrix { g: self.g, m: m.into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect() }
    }

    pub fn is_identity(&self) -> bool {
        *self == SymplecticMatrix::identity(self.g)
    }

    fn block_cmat(&self, r: usize, c: usize, prec: u32) -> CMat {
        let b = self.block(r, c);
        CMat::from_fn(self.g, self.g, |i, j| CBall::from_int(b[i][j], prec))
    }

    /// (Aτ + B)(Cτ + D)⁻¹.
    pub fn act(&self, tau: &SiegelPoint) -> Result<SiegelPoint> {
        let t = tau.tau();
        let p = t.prec();
        let num = self.block_cmat(0, 0, p).mul(t).add(&self.block_cmat(0, 1, p));
        let den = self.block_cmat(1, 0, p).mul(t).add(&self.block_cmat(1, 1, p));
        let inv = den.inverse().map_err(|_| Error::NotInvertible("Cτ + D".into()))?;
        SiegelPoint::new(num.mul(&inv))
    }

    /// det(Cτ + D).
    pub fn automorphy_det(&self, tau: &SiegelPoint) -> CBall {
        let t = tau.tau();
        let p = t.prec();
        self.block_cmat(1, 0, p).mul(t).add(&self.block_cmat(1, 1, p)).det()
    }
}

/// Inverse of an integer matrix with determinant ±1.
pub fn integer_inverse(u: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    use crate::poly::QMat;
    use rug::Rational;
    let g = u.len();
    let q = QMat::from_fn(g, g, |i, j| Rational::from(u[i][j]));
    let inv = q.inverse().ok_or_else(|| Error::NotInvertible("integer matrix".into()))?;
    (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    let x = &inv[(i, j)];
                    if *x.denom() != 1 {
                        return Err(Error::InvalidInput("matrix is not unimodular".into()));
                    }
                    x.numer().to_i64().ok_or_else(|| Error::InvalidInput("entry overflow".into()))
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn pt(re: f64, im: f64) -> SiegelPoint {
        SiegelPoint::from_c64(&[(re, im)], 1, P).unwrap()
    }

    #[test]
    fn genus_one_actions() {
        let i = pt(0.0, 1.0);
        let id = SymplecticMatrix::identity(1);
        assert!(id.act(&i).unwrap().overlaps(&i));
        let t = SymplecticMatrix::translation(&[vec![1]]);
        assert!(t.act(&i).unwrap().overlaps(&pt(1.0, 1.0)));
        let s = SymplecticMatrix::inversion(1);
        assert!(s.act(&i).unwrap().overlaps(&i));
    }

    #[test]
    fn action_is_a_group_action() {
        let tau = SiegelPoint::from_c64(&[(0.1, 1.2), (0.3, 0.4), (0.3, 0.4), (-0.2, 0.9)], 2, P).unwrap();
        let g1 = SymplecticMatrix::translation(&[vec![1, 2], vec![2, -1]]);
        let g2 = SymplecticMatrix::inversion(2);
        let g3 = SymplecticMatrix::change_of_basis(&[vec![1, 1], vec![0, 1]]).unwrap();
        let g = g1.mul(&g2).mul(&g3);
        let lhs = g.act(&tau).unwrap();
        let rhs = g1.act(&g2.act(&g3.act(&tau).unwrap()).unwrap()).unwrap();
        assert!(lhs.overlaps(&rhs));
        assert!(g.mul(&g.inverse()).is_identity());
    }

    #[test]
    fn rejects_non_symplectic() {
        assert!(SymplecticMatrix::new(vec![vec![2, 0], vec![0, 1]]).is_err());
    }

    #[test]
    fn rejects_asymmetric_or_non_positive() {
        assert!(SiegelPoint::from_c64(&[(0.0, 1.0), (0.5, 0.0), (0.0, 0.0), (0.0, 1.0)], 2, P).is_err());
        assert!(SiegelPoint::from_c64(&[(0.0, -1.0)], 1, P).is_err());
    }
}
