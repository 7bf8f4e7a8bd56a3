//! Dense matrices of complex balls.

use std::fmt;

use rug::Float;

use super::ball::{CBall, RBall};
use super::mag::Mag;
use crate::error::{Error, Result};

#[derive(Clone)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<CBall>,
}

impl fmt::Debug for CMat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "CMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let (a, b) = self[(i, j)].to_c64();
                write!(f, " ({a:.6e},{b:.6e})")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for CMat {
    type Output = CBall;
    fn index(&self, (i, j): (usize, usize)) -> &CBall {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut CBall {
        &mut self.data[i * self.cols + j]
    }
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize, prec: u32) -> Self {
        CMat { rows, cols, data: vec![CBall::zero(prec); rows * cols] }
    }

    pub fn identity(n: usize, prec: u32) -> Self {
        let mut m = CMat::zeros(n, n, prec);
        for i in 0..n {
            m[(i, i)] = CBall::one(prec);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CBall) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        CMat { rows, cols, data }
    }

    pub fn from_int(rows: usize, cols: usize, vals: &[i64], prec: u32) -> Self {
        assert_eq!(vals.len(), rows * cols);
        CMat::from_fn(rows, cols, |i, j| CBall::from_int(vals[i * cols + j], prec))
    }

    pub fn prec(&self) -> u32 {
        self.data.iter().map(|x| x.prec()).max().unwrap_or(64)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[CBall] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&CBall) -> CBall) -> CMat {
        CMat { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn add(&self, o: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].add(&o[(i, j)]))
    }

    pub fn sub(&self, o: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        CMat::from_fn(self.rows, self.cols, |i, j| self[(i, j)].sub(&o[(i, j)]))
    }

    pub fn scale(&self, s: &CBall) -> CMat {
        self.map(|x| x.mul(s))
    }

    pub fn mul(&self, o: &CMat) -> CMat {
        assert_eq!(self.cols, o.rows, "dimension mismatch");
        let p = self.prec().max(o.prec());
        CMat::from_fn(self.rows, o.cols, |i, j| {
            let mut acc = CBall::zero(p);
            for k in 0..self.cols {
                acc = acc.add(&self[(i, k)].mul(&o[(k, j)]));
            }
            acc
        })
    }

    pub fn pow(&self, k: u32) -> CMat {
        let mut acc = CMat::identity(self.rows, self.prec());
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn hcat(&self, o: &CMat) -> CMat {
        assert_eq!(self.rows, o.rows);
        CMat::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn set_prec(&self, prec: u32) -> CMat {
        self.map(|x| x.set_prec(prec))
    }

    /// Midpoint matrix (radii dropped).
    pub fn mid(&self) -> CMat {
        self.map(|x| x.mid())
    }

    /// Upper bound on the max-row-sum norm (operator norm for ‖·‖∞).
    pub fn norm_inf(&self) -> Mag {
        let mut best = Mag::zero();
        for i in 0..self.rows {
            let mut s = Mag::zero();
            for j in 0..self.cols {
                s = s.add(&self[(i, j)].abs_upper());
            }
            best = best.max(&s);
        }
        best
    }

    /// Largest entrywise upper bound of |m_ij|.
    pub fn max_abs(&self) -> Mag {
        self.data.iter().fold(Mag::zero(), |m, x| m.max(&x.abs_upper()))
    }

    /// Largest radius over the entries.
    pub fn max_rad(&self) -> Mag {
        self.data.iter().fold(Mag::zero(), |m, x| m.max(&x.rad))
    }

    /// True when every entry ball contains zero and is bounded by `tol`.
    pub fn is_zero_within(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.abs_upper().lt_f64(tol))
    }

    pub fn overlaps(&self, o: &CMat) -> bool {
        self.data.iter().zip(&o.data).all(|(a, b)| a.overlaps(b))
    }

    /// Solve self · X = rhs by Gaussian elimination with partial pivoting on
    /// midpoint magnitudes.
    pub fn solve(&self, rhs: &CMat) -> Result<CMat> {
        assert!(self.is_square());
        assert_eq!(self.rows, rhs.rows);
        let n = self.rows;
        let mut a = self.clone();
        let mut b = rhs.clone();
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].mid_abs();
            for r in col + 1..n {
                let v = a[(r, col)].mid_abs();
                if !v.le(&best) {
                    best = v;
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)].clone();
                    a[(col, j)] = a[(piv, j)].clone();
                    a[(piv, j)] = t;
                }
                for j in 0..b.cols {
                    let t = b[(col, j)].clone();
                    b[(col, j)] = b[(piv, j)].clone();
                    b[(piv, j)] = t;
                }
            }
            let inv = a[(col, col)]
                .inv()
                .map_err(|_| Error::NotInvertible(format!("pivot {col} contains zero")))?;
            for r in col + 1..n {
                let f = a[(r, col)].mul(&inv);
                for j in col..n {
                    let t = a[(r, j)].sub(&f.mul(&a[(col, j)]));
                    a[(r, j)] = t;
                }
                for j in 0..b.cols {
                    let t = b[(r, j)].sub(&f.mul(&b[(col, j)]));
                    b[(r, j)] = t;
                }
            }
        }
        let p = self.prec();
        let mut x = CMat::zeros(n, b.cols, p);
        for j in 0..b.cols {
            for i in (0..n).rev() {
                let mut s = b[(i, j)].clone();
                for k in i + 1..n {
                    s = s.sub(&a[(i, k)].mul(&x[(k, j)]));
                }
                x[(i, j)] = s.div(&a[(i, i)])?;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<CMat> {
        self.solve(&CMat::identity(self.rows, self.prec()))
    }

    pub fn det(&self) -> CBall {
        assert!(self.is_square());
        let n = self.rows;
        let p = self.prec();
        if n == 0 {
            return CBall::one(p);
        }
        let mut a = self.clone();
        let mut det = CBall::one(p);
        for col in 0..n {
            let mut piv = col;
            let mut best = a[(col, col)].mid_abs();
            for r in col + 1..n {
                let v = a[(r, col)].mid_abs();
                if !v.le(&best) {
                    best = v;
                    piv = r;
                }
            }
            if piv != col {
                for j in 0..n {
                    let t = a[(col, j)].clone();
                    a[(col, j)] = a[(piv, j)].clone();
                    a[(piv, j)] = t;
                }
                det = det.neg();
            }
            let inv = match a[(col, col)].inv() {
                Ok(v) => v,
                Err(_) => {
                    // Pivot ball contains zero: fall back to the cofactor-free
                    // bound via Hadamard.
                    return self.det_hadamard_enclosure();
                }
            };
            det = det.mul(&a[(col, col)]);
            for r in col + 1..n {
                let f = a[(r, col)].mul(&inv);
                for j in col..n {
                    let t = a[(r, j)].sub(&f.mul(&a[(col, j)]));
                    a[(r, j)] = t;
                }
            }
        }
        det
    }

    /// Enclosure of det centred at 0 with Hadamard's bound as radius.
    fn det_hadamard_enclosure(&self) -> CBall {
        let mut bound = Mag::from_int(1);
        for i in 0..self.rows {
            let mut s = Mag::zero();
            for j in 0..self.cols {
                let a = self[(i, j)].abs_upper();
                s = s.add(&a.mul(&a));
            }
            bound = bound.mul(&s.sqrt());
        }
        CBall::zero(self.prec()).with_rad(bound)
    }

    /// Symmetrize (A + Aᵀ)/2, returning the result and an upper bound for
    /// the asymmetry ‖A − Aᵀ‖ (max entry).
    pub fn symmetrize(&self) -> (CMat, Mag) {
        let t = self.transpose();
        let diff = self.sub(&t).max_abs();
        let s = self.add(&t).map(|x| x.mul_2exp(-1));
        (s, diff)
    }

    pub fn im_part(&self) -> Vec<Vec<RBall>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].im_ball()).collect()).collect()
    }

    pub fn re_part(&self) -> Vec<Vec<RBall>> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self[(i, j)].re_ball()).collect()).collect()
    }
}

/// Certified Cholesky positivity test for a real symmetric ball matrix.
/// Returns `Ok(true)` when every pivot is certifiably positive.
pub fn is_positive_definite(m: &[Vec<RBall>]) -> bool {
    let n = m.len();
    if n == 0 {
        return true;
    }
    let mut l: Vec<Vec<RBall>> = vec![vec![RBall::exact(Float::new(m[0][0].prec())); n]; n];
    for j in 0..n {
        let mut d = m[j][j].clone();
        for k in 0..j {
            d = d.sub(&l[j][k].mul(&l[j][k]));
        }
        if !d.is_positive() {
            return false;
        }
        let s = match d.sqrt() {
            Ok(s) => s,
            Err(_) => return false,
        };
        l[j][j] = s.clone();
        for i in j + 1..n {
            let mut v = m[i][j].clone();
            for k in 0..j {
                v = v.sub(&l[i][k].mul(&l[j][k]));
            }
            l[i][j] = match v.div(&s) {
                Ok(x) => x,
                Err(_) => return false,
            };
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 160;

    #[test]
    fn solve_and_inverse() {
        let a = CMat::from_int(3, 3, &[2, 1, 0, 1, 3, 1, 0, 1, 4], P);
        let inv = a.inverse().unwrap();
        let id = a.mul(&inv);
        assert!(id.overlaps(&CMat::identity(3, P)));
        assert!(id.max_rad().lt_f64(1e-40));
        let d = a.det();
        assert!(d.overlaps(&CBall::from_int(18, P)));
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let a = CMat::from_int(2, 2, &[1, 2, 2, 4], P);
        assert!(a.inverse().is_err());
        assert!(a.det().contains_zero());
    }

    #[test]
    fn cholesky_positivity() {
        let pd = vec![
            vec![RBall::from_int(2, P), RBall::from_int(1, P)],
            vec![RBall::from_int(1, P), RBall::from_int(2, P)],
        ];
        assert!(is_positive_definite(&pd));
        let nd = vec![
            vec![RBall::from_int(1, P), RBall::from_int(2, P)],
            vec![RBall::from_int(2, P), RBall::from_int(1, P)],
        ];
        assert!(!is_positive_definite(&nd));
    }
}
