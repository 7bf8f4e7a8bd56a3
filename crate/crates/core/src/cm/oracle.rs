//! Independent CM oracle for the Legendre family: reduced binary quadratic
//! forms, j at the CM points, class polynomials, and the λ-polynomial
//! whose roots are the CM parameters.

use rug::Integer;

use crate::arith::{CBall, Mag};
use crate::error::{Error, Result};
use crate::poly::{factor, isolate_roots_qpoly, ZPoly};

/// Primitive reduced forms (a, b, c) of discriminant d < 0:
/// |b| ≤ a ≤ c, b ≥ 0 when |b| = a or a = c.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = vec![];
    if d >= 0 || d.rem_euclid(4) > 1 {
        return out;
    }
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (b < 0 && a == c) {
                continue;
            }
            if gcd(gcd(a, b.abs()), c) == 1 {
                out.push((a, b, c));
            }
        }
        a += 1;
    }
    out
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a } else { gcd(b, a % b) }
}

pub fn class_number(d: i64) -> usize {
    reduced_forms(d).len()
}

/// Negative discriminants −bound ≤ D ≤ −3.
pub fn discriminants(bound: i64) -> Vec<i64> {
    (3..=bound).map(|n| -n).filter(|d| d.rem_euclid(4) <= 1).collect()
}

/// τ = (−b + √D)/(2a).
pub fn form_point(f: (i64, i64, i64), prec: u32) -> CBall {
    let (a, b, c) = f;
    let d = b * b - 4 * a * c;
    let s = CBall::from_int(-d, prec).sqrt().expect("positive").mul_i();
    s.sub(&CBall::from_int(b, prec)).div_int(2 * a)
}

/// j(τ) = E₄(τ)³/Δ(τ), Δ = qΠ(1 − qⁿ)²⁴, with tail bounds.
pub fn j_invariant(tau: &CBall) -> Result<CBall> {
    let p = tau.prec();
    let two_pi_i = CBall::pi(p).mul_int(2).mul_i();
    let q = two_pi_i.mul(tau).exp();
    let qa = q.abs_upper().to_f64();
    if qa >= 0.1 {
        return Err(Error::InvalidInput("Im τ too small for the q-series".into()));
    }
    // terms until n⁴|q|ⁿ < 2^{−p}
    let mut n_max = 1;
    while (n_max as f64).powi(4) * qa.powi(n_max as i32) > 2f64.powi(-(p as i32) - 8) {
        n_max += 1;
    }
    let mut e4 = CBall::one(p);
    let mut prod = CBall::one(p);
    let mut qn = CBall::one(p);
    for n in 1..=n_max {
        qn = qn.mul(&q);
        let s3: i64 = (1..=n as i64).filter(|k| n as i64 % k == 0).map(|k| k.pow(3)).sum();
        e4 = e4.add(&qn.mul_int(240 * s3));
        prod = prod.mul(&CBall::one(p).sub(&qn));
    }
    // Σ_{n>N} σ₃(n)|q|ⁿ ≤ Σ n⁴|q|ⁿ, a geometric tail for |q| ≤ 0.1
    let t = qa.powi(n_max as i32 + 1);
    let tail4 = Mag::from_f64(240.0 * ((n_max + 1) as f64).powi(4) * t / (1.0 - 2.0 * qa));
    let tailp = Mag::from_f64(2.0 * t / (1.0 - qa));
    let e4 = e4.clone().with_rad(e4.rad.add(&tail4));
    let pa = prod.abs_upper();
    let prod = prod.clone().with_rad(prod.rad.add(&pa.mul(&tailp)));
    let delta = q.mul(&prod.pow(24));
    e4.pow(3).div(&delta)
}

/// Π (x − j(τ_f)) over the reduced forms of discriminant d.
pub fn hilbert_class_polynomial(d: i64) -> Result<ZPoly> {
    let forms = reduced_forms(d);
    if forms.is_empty() {
        return Err(Error::InvalidInput(format!("{d} is not a negative discriminant")));
    }
    let mut prec = 128 + 16 * forms.len() as u32;
    loop {
        let mut coeffs = vec![CBall::one(prec)];
        for f in &forms {
            let j = j_invariant(&form_point(*f, prec))?;
            let mut next = vec![CBall::zero(prec); coeffs.len() + 1];
            for (k, c) in coeffs.iter().enumerate() {
                next[k + 1] = next[k + 1].add(c);
                next[k] = next[k].sub(&c.mul(&j));
            }
            coeffs = next;
        }
        let ints: Option<Vec<Integer>> = coeffs.iter().map(CBall::unique_real_integer).collect();
        if let Some(c) = ints {
            return Ok(ZPoly::new(c));
        }
        prec *= 2;
        if prec > 1 << 14 {
            return Err(Error::RaisePrecision("class polynomial coefficients not certified".into()));
        }
    }
}

/// Numerator and denominator of j(λ) = 256(λ² − λ + 1)³ / (λ²(λ − 1)²).
pub fn j_of_lambda() -> (ZPoly, ZPoly) {
    let q = ZPoly::from_ints(&[1, -1, 1]);
    let num = q.mul(&q).mul(&q).scale(&Integer::from(256));
    let den = ZPoly::from_ints(&[0, 0, 1, -2, 1]);
    (num, den)
}

/// Den^h · H_D(Num/Den): its roots are the λ with j(λ) a root of H_D.
pub fn lambda_polynomial(d: i64) -> Result<ZPoly> {
    let h = hilbert_class_polynomial(d)?;
    let (num, den) = j_of_lambda();
    let n = h.degree();
    let mut acc = ZPoly::zero();
    for (i, c) in h.coeffs().iter().enumerate() {
        let mut term = ZPoly::new(vec![c.clone()]);
        for _ in 0..i {
            term = term.mul(&num);
        }
        for _ in i..n {
            term = term.mul(&den);
        }
        acc = acc.add(&term);
    }
    Ok(acc)
}

/// A Legendre parameter with CM by the order of discriminant `disc`.
#[derive(Clone, Debug)]
pub struct CmParameter {
    pub disc: i64,
    pub t: CBall,
    /// Irreducible factor of the λ-polynomial vanishing at t.
    pub minpoly: ZPoly,
}

/// All CM parameters with −bound ≤ D, as isolated roots of the irreducible
/// factors of the λ-polynomials.
pub fn legendre_cm_parameters(bound: i64, prec: u32) -> Result<Vec<CmParameter>> {
    let mut out = vec![];
    for d in discriminants(bound) {
        let g = lambda_polynomial(d)?;
        for (f, _) in factor(&g).1 {
            for t in isolate_roots_qpoly(&f.to_qpoly(), prec)? {
                out.push(CmParameter { disc: d, t, minpoly: f.clone() });
            }
        }
    }
    Ok(out)
}

/// Parameters inside the box |Re t|, |Im t| ≤ half_width, outside the discs
/// of radius `exclude` about 0 and 1.
pub fn in_region(t: &CBall, half_width: f64, exclude: f64) -> bool {
    let (x, y) = t.to_c64();
    x.abs() <= half_width && y.abs() <= half_width && x.hypot(y) > exclude && (x - 1.0).hypot(y) > exclude
}

/// j(λ) with ball arithmetic.
pub fn j_at_lambda(t: &CBall) -> Result<CBall> {
    let (num, den) = j_of_lambda();
    num.eval(t).div(&den.eval(t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_numbers() {
        for (d, h) in [(-3, 1), (-4, 1), (-7, 1), (-15, 2), (-20, 2), (-23, 3), (-56, 4), (-71, 7), (-95, 8), (-100, 2)] {
            assert_eq!(class_number(d), h, "D = {d}");
        }
        // all class-number-one discriminants up to 100
        let one: Vec<i64> = discriminants(100).into_iter().filter(|&d| class_number(d) == 1).collect();
        assert_eq!(one, vec![-3, -4, -7, -8, -11, -12, -16, -19, -27, -28, -43, -67]);
    }

    #[test]
    fn known_j_values() {
        for (d, j) in [(-3, 0i64), (-4, 1728), (-7, -3375), (-8, 8000), (-11, -32768), (-67, -147197952000)] {
            assert_eq!(hilbert_class_polynomial(d).unwrap(), ZPoly::new(vec![Integer::from(-j), Integer::from(1)]));
        }
        // H_{−15} = x² + 191025x − 121287375
        assert_eq!(hilbert_class_polynomial(-15).unwrap(), ZPoly::from_ints(&[-121287375, 191025, 1]));
    }

    #[test]
    fn square_lattice_parameters() {
        let ps = legendre_cm_parameters(4, 128).unwrap();
        let d4: Vec<(f64, f64)> = ps.iter().filter(|p| p.disc == -4).map(|p| p.t.to_c64()).collect();
        for t in [-1.0, 2.0, 0.5] {
            assert!(d4.iter().any(|z| (z.0 - t).abs() < 1e-20 && z.1.abs() < 1e-20));
        }
        assert_eq!(d4.len(), 3);
    }

    #[test]
    fn six_parameters_per_class() {
        let ps = legendre_cm_parameters(100, 256).unwrap();
        for d in discriminants(100) {
            // j = 0 and 1728 are ramified in λ ↦ j
            let stab = match d { -3 => 3, -4 => 2, _ => 1 };
            assert_eq!(ps.iter().filter(|p| p.disc == d).count(), 6 * class_number(d) / stab, "D = {d}");
        }
        for p in &ps {
            let j = j_at_lambda(&p.t).unwrap();
            let h = hilbert_class_polynomial(p.disc).unwrap();
            assert!(h.eval(&j).contains_zero());
        }
    }
}
