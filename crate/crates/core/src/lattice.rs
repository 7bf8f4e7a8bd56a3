//! LLL reduction of integer lattices and integer-relation search.
//!
//! Basis vectors are exact integers; the Gram–Schmidt data is kept in MPFR
//! floats at a precision scaled to the entry size, so no rational
//! arithmetic is needed.

use rug::float::Round;
use rug::{Float, Integer};

use crate::error::{Error, Result};

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    a.iter().zip(b).fold(Integer::new(), |s, (x, y)| s + Integer::from(x * y))
}

/// LLL-reduce the rows of `basis` (δ = 0.99).  Rows must be linearly
/// independent.
pub fn lll(basis: &mut [Vec<Integer>]) -> Result<()> {
    let n = basis.len();
    if n <= 1 {
        return Ok(());
    }
    let bits = basis.iter().flatten().map(|x| x.significant_bits()).max().unwrap_or(1);
    let mut prec = 2 * bits + 4 * n as u32 + 64;
    let orig = basis.to_vec();
    // an apparent dependency can be cancellation in the Gram–Schmidt data
    for _ in 0..3 {
        match lll_at(basis, prec) {
            Err(Error::DegenerateFit(m)) if m.contains("dependent") => {
                basis.clone_from_slice(&orig);
                prec *= 2;
            }
            r => return r,
        }
    }
    lll_at(basis, prec)
}

fn lll_at(basis: &mut [Vec<Integer>], prec: u32) -> Result<()> {
    let n = basis.len();
    let delta = Float::with_val(prec, 0.99);
    let half = Float::with_val(prec, 0.5);
    let mut mu = vec![vec![Float::new(prec); n]; n];
    let mut bb = vec![Float::new(prec); n];
    bb[0] = Float::with_val(prec, dot(&basis[0], &basis[0]));
    if bb[0] == 0 {
        return Err(Error::DegenerateFit("zero lattice vector".into()));
    }
    let mut k = 1;
    let mut kmax = 0;
    let mut guard = 0u64;
    while k < n {
        guard += 1;
        if guard > 50_000_000 {
            return Err(Error::DegenerateFit("lattice reduction did not terminate".into()));
        }
        if k > kmax {
            kmax = k;
            gram_schmidt_row(basis, &mut mu, &mut bb, k, prec);
            if bb[k] <= 0 {
                return Err(Error::DegenerateFit("lattice rows are dependent".into()));
            }
        }
        reduce(basis, &mut mu, k, k - 1, &half);
        let lhs = bb[k].clone();
        let m2 = Float::with_val(prec, mu[k][k - 1].square_ref());
        let rhs = Float::with_val(prec, &delta - &m2) * &bb[k - 1];
        if lhs < rhs {
            swap(basis, &mut mu, &mut bb, k, kmax, prec);
            k = (k - 1).max(1);
        } else {
            for l in (0..k - 1).rev() {
                reduce(basis, &mut mu, k, l, &half);
            }
            k += 1;
        }
    }
    Ok(())
}

fn gram_schmidt_row(b: &[Vec<Integer>], mu: &mut [Vec<Float>], bb: &mut [Float], k: usize, prec: u32) {
    for j in 0..k {
        let mut s = Float::with_val(prec, dot(&b[k], &b[j]));
        for i in 0..j {
            s -= Float::with_val(prec, &mu[j][i] * &mu[k][i]) * &bb[i];
        }
        mu[k][j] = s / &bb[j];
    }
    let mut s = Float::with_val(prec, dot(&b[k], &b[k]));
    for j in 0..k {
        s -= Float::with_val(prec, mu[k][j].square_ref()) * &bb[j];
    }
    bb[k] = s;
}

fn reduce(b: &mut [Vec<Integer>], mu: &mut [Vec<Float>], k: usize, l: usize, half: &Float) {
    if Float::with_val(half.prec(), mu[k][l].abs_ref()) <= *half {
        return;
    }
    let q = Float::with_val(half.prec(), mu[k][l].round_ref());
    let qi = q.to_integer().expect("finite Gram-Schmidt coefficient");
    let bl = b[l].clone();
    for (x, y) in b[k].iter_mut().zip(&bl) {
        *x -= Integer::from(&qi * y);
    }
    mu[k][l] -= &q;
    for i in 0..l {
        let t = Float::with_val(half.prec(), &q * &mu[l][i]);
        mu[k][i] -= t;
    }
}

fn swap(b: &mut [Vec<Integer>], mu: &mut [Vec<Float>], bb: &mut [Float], k: usize, kmax: usize, prec: u32) {
    b.swap(k, k - 1);
    for j in 0..k - 1 {
        let t = mu[k][j].clone();
        mu[k][j] = mu[k - 1][j].clone();
        mu[k - 1][j] = t;
    }
    let m = mu[k][k - 1].clone();
    let big = Float::with_val(prec, &bb[k] + Float::with_val(prec, m.square_ref()) * &bb[k - 1]);
    mu[k][k - 1] = Float::with_val(prec, &m * &bb[k - 1]) / &big;
    bb[k] = Float::with_val(prec, &bb[k - 1] * &bb[k]) / &big;
    bb[k - 1] = big;
    for i in k + 1..=kmax {
        let t = mu[i][k].clone();
        mu[i][k] = Float::with_val(prec, &mu[i][k - 1] - Float::with_val(prec, &m * &t));
        mu[i][k - 1] = t + Float::with_val(prec, &mu[k][k - 1] * &mu[i][k]);
    }
}

/// Round x·2^w to the nearest integer.
pub fn scaled_integer(x: &Float, w: u32) -> Integer {
    let mut y = Float::with_val(x.prec() + w + 8, x);
    y <<= w;
    y.to_integer_round(Round::Nearest).expect("finite value").0
}

/// Search for small integer vectors c with Σ c_i v_i ≈ 0 for every
/// component: `vals[i]` lists the real components attached to unknown `i`.
/// Returns the coefficient parts of the reduced basis, shortest first.
pub fn integer_relations(vals: &[Vec<Float>], weight_bits: u32) -> Result<Vec<Vec<Integer>>> {
    let n = vals.len();
    let m = vals.first().map_or(0, |v| v.len());
    let mut basis: Vec<Vec<Integer>> = (0..n)
        .map(|i| {
            let mut row = vec![Integer::new(); n + m];
            row[i] = Integer::from(1);
            for (c, x) in vals[i].iter().enumerate() {
                row[n + c] = scaled_integer(x, weight_bits);
            }
            row
        })
        .collect();
    lll(&mut basis)?;
    Ok(basis.into_iter().map(|r| r[..n].to_vec()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduces_textbook_example() {
        let mut b = vec![
            vec![Integer::from(1), Integer::from(1), Integer::from(1)],
            vec![Integer::from(-1), Integer::from(0), Integer::from(2)],
            vec![Integer::from(3), Integer::from(5), Integer::from(6)],
        ];
        lll(&mut b).unwrap();
        // determinant is preserved up to sign and first vector is short
        let n0 = dot(&b[0], &b[0]);
        assert!(n0 <= 2);
    }

    #[test]
    fn finds_minimal_polynomial_of_sqrt2_plus_sqrt3() {
        let prec = 400;
        let x = Float::with_val(prec, 2).sqrt() + Float::with_val(prec, 3).sqrt();
        let vals: Vec<Vec<Float>> = (0..5).map(|k| vec![Float::with_val(prec, rug::ops::Pow::pow(&x, k as u32))]).collect();
        let rels = integer_relations(&vals, 300).unwrap();
        let c: Vec<i64> = rels[0].iter().map(|z| z.to_i64().unwrap()).collect();
        let s = if c[4] < 0 { -1 } else { 1 };
        assert_eq!(c.iter().map(|v| v * s).collect::<Vec<_>>(), vec![1, 0, -10, 0, 1]);
    }
}
