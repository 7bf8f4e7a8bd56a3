//! Dense matrices over ℚ.

use rug::Rational;

use super::qpoly::QPoly;
use crate::arith::{CBall, CMat};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<Rational>,
}

impl std::ops::Index<(usize, usize)> for QMat {
    type Output = Rational;
    fn index(&self, (i, j): (usize, usize)) -> &Rational {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for QMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Rational {
        &mut self.data[i * self.cols + j]
    }
}

impl QMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        QMat { rows, cols, data: vec![Rational::new(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = QMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Rational::from(1);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Rational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        QMat { rows, cols, data }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }

    pub fn add(&self, o: &QMat) -> QMat {
        QMat::from_fn(self.rows, self.cols, |i, j| Rational::from(&self[(i, j)] + &o[(i, j)]))
    }

    pub fn sub(&self, o: &QMat) -> QMat {
        QMat::from_fn(self.rows, self.cols, |i, j| Rational::from(&self[(i, j)] - &o[(i, j)]))
    }

    pub fn scale(&self, s: &Rational) -> QMat {
        QMat::from_fn(self.rows, self.cols, |i, j| Rational::from(&self[(i, j)] * s))
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        assert_eq!(self.cols, o.rows);
        QMat::from_fn(self.rows, o.cols, |i, j| {
            let mut s = Rational::new();
            for k in 0..self.cols {
                s += Rational::from(&self[(i, k)] * &o[(k, j)]);
            }
            s
        })
    }

    pub fn pow(&self, k: u32) -> QMat {
        let mut acc = QMat::identity(self.rows);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn transpose(&self) -> QMat {
        QMat::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (QMat, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = vec![];
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| m[(i, c)] != 0) else { continue };
            for j in 0..m.cols {
                let t = m[(p, j)].clone();
                m[(p, j)] = m[(r, j)].clone();
                m[(r, j)] = t;
            }
            let inv = Rational::from(m[(r, c)].recip_ref());
            for j in 0..m.cols {
                m[(r, j)] *= &inv;
            }
            for i in 0..m.rows {
                if i != r && m[(i, c)] != 0 {
                    let f = m[(i, c)].clone();
                    for j in 0..m.cols {
                        let t = Rational::from(&f * &m[(r, j)]);
                        m[(i, j)] -= t;
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, as columns of the returned matrix.
    pub fn kernel(&self) -> QMat {
        let (r, piv) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !piv.contains(c)).collect();
        QMat::from_fn(self.cols, free.len(), |i, k| {
            let f = free[k];
            if i == f {
                Rational::from(1)
            } else if let Some(pi) = piv.iter().position(|&p| p == i) {
                Rational::from(-&r[(pi, f)])
            } else {
                Rational::new()
            }
        })
    }

    pub fn inverse(&self) -> Option<QMat> {
        let n = self.rows;
        let mut aug = QMat::zeros(n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug[(i, j)] = self[(i, j)].clone();
            }
            aug[(i, n + i)] = Rational::from(1);
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        Some(QMat::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    pub fn det(&self) -> Rational {
        let n = self.rows;
        let mut m = self.clone();
        let mut d = Rational::from(1);
        for c in 0..n {
            let Some(p) = (c..n).find(|&i| m[(i, c)] != 0) else { return Rational::new() };
            if p != c {
                for j in 0..n {
                    let t = m[(p, j)].clone();
                    m[(p, j)] = m[(c, j)].clone();
                    m[(c, j)] = t;
                }
                d = -d;
            }
            d *= &m[(c, c)];
            for i in c + 1..n {
                if m[(i, c)] != 0 {
                    let f = Rational::from(&m[(i, c)] / &m[(c, c)]);
                    for j in c..n {
                        let t = Rational::from(&f * &m[(c, j)]);
                        m[(i, j)] -= t;
                    }
                }
            }
        }
        d
    }

    /// Characteristic polynomial det(xI − M) (Faddeev–LeVerrier).
    pub fn charpoly(&self) -> QPoly {
        let n = self.rows;
        let mut c = vec![Rational::new(); n + 1];
        c[n] = Rational::from(1);
        let mut mk = QMat::zeros(n, n);
        for k in 1..=n {
            // M_k = A M_{k-1} + c_{n-k+1} I ; c_{n-k} = -tr(A M_k)/k
            let mut next = self.mul(&mk);
            for i in 0..n {
                next[(i, i)] += &c[n - k + 1];
            }
            mk = next;
            let am = self.mul(&mk);
            let tr = (0..n).fold(Rational::new(), |s, i| s + &am[(i, i)]);
            c[n - k] = -tr / Rational::from(k as u64);
        }
        QPoly::new(c)
    }

    /// Horizontal concatenation.
    pub fn hcat(&self, o: &QMat) -> QMat {
        QMat::from_fn(self.rows, self.cols + o.cols, |i, j| {
            if j < self.cols {
                self[(i, j)].clone()
            } else {
                o[(i, j - self.cols)].clone()
            }
        })
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> QMat {
        QMat::from_fn(rows, cols, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    pub fn to_cmat(&self, prec: u32) -> CMat {
        CMat::from_fn(self.rows, self.cols, |i, j| CBall::from_rational(&self[(i, j)], prec))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: usize, v: &[i64]) -> QMat {
        let cols = v.len() / rows;
        QMat::from_fn(rows, cols, |i, j| Rational::from(v[i * cols + j]))
    }

    #[test]
    fn inverse_and_det() {
        let a = m(2, &[2, 1, 1, 1]);
        assert_eq!(a.det(), 1);
        assert_eq!(a.mul(&a.inverse().unwrap()), QMat::identity(2));
        assert!(m(2, &[1, 2, 2, 4]).inverse().is_none());
    }

    #[test]
    fn kernel_and_charpoly() {
        let a = m(3, &[1, 2, 3, 2, 4, 6, 1, 1, 1]);
        let k = a.kernel();
        assert_eq!(k.cols, 1);
        assert!(a.mul(&k).is_zero());
        let j = m(2, &[0, 1, 0, 0]);
        assert_eq!(j.charpoly(), QPoly::from_ints(&[0, 0, 1]));
        assert_eq!(m(2, &[1, 2, 3, 4]).charpoly(), QPoly::from_ints(&[-2, -5, 1]));
    }
}
