//! Certified isolation of the complex roots of a polynomial.
//!
//! Approximations come from Aberth–Ehrlich iteration; each root is then
//! enclosed in the disc D(z, n·|p(z)|/|p'(z)|), which always contains a root
//! of p.  When the n discs are pairwise disjoint each holds exactly one root.

use rug::Float;

use super::qpoly::QPoly;
use crate::arith::{CBall, Mag};
use crate::error::{Error, Result};

fn horner(c: &[CBall], z: &CBall) -> (CBall, CBall) {
    let p = z.prec();
    let mut v = CBall::zero(p);
    let mut d = CBall::zero(p);
    for a in c.iter().rev() {
        d = d.mul(z).add(&v);
        v = v.mul(z).add(a);
    }
    (v, d)
}

type C = (f64, f64);

fn cmul(a: C, b: C) -> C {
    (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
}

fn cdiv(a: C, b: C) -> C {
    let d = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / d, (a.1 * b.0 - a.0 * b.1) / d)
}

fn csub(a: C, b: C) -> C {
    (a.0 - b.0, a.1 - b.1)
}

fn horner64(c: &[C], z: C) -> (C, C) {
    let (mut v, mut d) = ((0.0, 0.0), (0.0, 0.0));
    for &a in c.iter().rev() {
        d = cmul(d, z);
        d = (d.0 + v.0, d.1 + v.1);
        v = cmul(v, z);
        v = (v.0 + a.0, v.1 + a.1);
    }
    (v, d)
}

/// Newton correction p/p′, evaluated through the reversed polynomial
/// outside the unit disc so that huge roots do not overflow.
fn newton64(c: &[C], rev: &[C], z: C) -> C {
    let n = (c.len() - 1) as f64;
    if z.0.hypot(z.1) <= 1.0 {
        let (v, d) = horner64(c, z);
        cdiv(v, d)
    } else {
        let w = cdiv((1.0, 0.0), z);
        let (r, dr) = horner64(rev, w);
        let den = csub((n * r.0, n * r.1), cmul(w, dr));
        cdiv(r, cmul(w, den))
    }
}

/// Starting points on circles whose radii come from the upper convex hull
/// of (k, log|a_k|).
fn initial_guesses(c: &[C]) -> Vec<C> {
    let n = c.len() - 1;
    let pts: Vec<(usize, f64)> =
        (0..=n).filter(|&k| c[k] != (0.0, 0.0)).map(|k| (k, c[k].0.hypot(c[k].1).ln())).collect();
    let mut hull: Vec<(usize, f64)> = vec![];
    for p in pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            // drop b if it lies on or below segment a–p
            if (b.1 - a.1) * (p.0 - a.0) as f64 <= (p.1 - a.1) * (b.0 - a.0) as f64 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = vec![];
    if hull[0].0 > 0 {
        // zero roots are impossible after trimming; guard anyway
        out.extend((0..hull[0].0).map(|_| (1e-300, 0.0)));
    }
    for w in hull.windows(2) {
        let (k0, k1) = (w[0].0, w[1].0);
        let m = k1 - k0;
        let r = ((w[0].1 - w[1].1) / m as f64).exp();
        for j in 0..m {
            let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64 + 0.4 + out.len() as f64 * 0.7;
            out.push((r * th.cos(), r * th.sin()));
        }
    }
    out
}

fn aberth64(c: &[C], z: &mut [C], max_iter: usize) {
    let rev: Vec<C> = c.iter().rev().copied().collect();
    let n = z.len();
    for _ in 0..max_iter {
        let mut moved = false;
        for k in 0..n {
            let w = newton64(c, &rev, z[k]);
            if !(w.0.is_finite() && w.1.is_finite()) {
                continue;
            }
            let mut s = (0.0, 0.0);
            for j in 0..n {
                if j != k {
                    let t = cdiv((1.0, 0.0), csub(z[k], z[j]));
                    if t.0.is_finite() && t.1.is_finite() {
                        s = (s.0 + t.0, s.1 + t.1);
                    }
                }
            }
            let den = csub((1.0, 0.0), cmul(w, s));
            let step = cdiv(w, den);
            if !(step.0.is_finite() && step.1.is_finite()) {
                continue;
            }
            if step.0.hypot(step.1) > 1e-14 * z[k].0.hypot(z[k].1) {
                moved = true;
            }
            z[k] = csub(z[k], step);
        }
        if !moved {
            return;
        }
    }
}

fn aberth(c: &[CBall], z: &mut [CBall], max_iter: usize) -> bool {
    let n = z.len();
    let prec = z[0].prec();
    let eps = Float::with_val(prec, 1) >> (prec as i32 - 8);
    let loose = Float::with_val(prec, 1) >> (prec as i32 / 2);
    // a root is frozen once its step is negligible, or small and no longer
    // shrinking (rounding noise)
    let mut frozen = vec![false; n];
    let mut prev: Vec<Option<Float>> = vec![None; n];
    for _ in 0..max_iter {
        let mut done = true;
        for k in 0..n {
            if frozen[k] {
                continue;
            }
            let (v, d) = horner(c, &z[k]);
            let Ok(w) = v.mid().div(&d.mid()) else {
                // derivative vanishes at the iterate: nudge it
                z[k] = z[k].add(&CBall::from_f64(1e-3, 1e-3, prec));
                done = false;
                continue;
            };
            let mut s = CBall::zero(prec);
            for j in 0..n {
                if j != k {
                    if let Ok(t) = z[k].sub(&z[j]).mid().inv() {
                        s = s.add(&t);
                    }
                }
            }
            let den = CBall::one(prec).sub(&w.mul(&s)).mid();
            let step = w.div(&den).unwrap_or(w).mid();
            let scale = Float::with_val(prec, 1) + z[k].mid_abs().as_float();
            let size = Float::with_val(prec, step.mid_abs().as_float()) / &scale;
            if size <= eps {
                frozen[k] = true;
            } else if size <= loose && prev[k].as_ref().is_some_and(|p| size > Float::with_val(prec, p >> 1)) {
                frozen[k] = true;
            } else {
                done = false;
            }
            prev[k] = Some(size);
            z[k] = z[k].sub(&step).mid();
        }
        if done {
            return true;
        }
    }
    false
}

/// Enclose every root of the polynomial with ball coefficients `c`
/// (degree-0 coefficient first).  Each returned ball contains exactly one
/// root, for every polynomial whose coefficients lie in the given balls.
pub fn isolate_roots(c: &[CBall], prec: u32) -> Result<Vec<CBall>> {
    let mut c: Vec<CBall> = c.to_vec();
    while c.last().is_some_and(|x| x.contains_zero() && x.abs_upper().is_zero()) {
        c.pop();
    }
    if c.len() <= 1 {
        return Ok(vec![]);
    }
    if c.last().unwrap().contains_zero() {
        return Err(Error::RaisePrecision("leading coefficient not separated from zero".into()));
    }
    let n = c.len() - 1;
    if n == 1 {
        let r = c[0].neg().div(&c[1])?;
        return Ok(vec![r]);
    }
    // cheap phase in f64 (scaled so the coefficients stay in range), then polish
    let scale = c.iter().map(|x| x.mid_abs().log10()).filter(|v| v.is_finite()).fold(f64::MIN, f64::max);
    let s = 10f64.powf(-scale.max(-300.0).min(300.0));
    let c64: Vec<C> = c.iter().map(|x| x.to_c64()).map(|(a, b)| (a * s, b * s)).collect();
    let mut z64 = initial_guesses(&c64);
    aberth64(&c64, &mut z64, 500);
    let mut z: Vec<CBall> = z64.iter().map(|&(a, b)| CBall::from_f64(a, b, prec)).collect();
    let c: Vec<CBall> = c.iter().map(|x| x.set_prec(prec)).collect();
    aberth(&c, &mut z, 200);
    certify(&c, &z)
}

fn certify(c: &[CBall], z: &[CBall]) -> Result<Vec<CBall>> {
    let n = z.len();
    let mut out = Vec::with_capacity(n);
    for zk in z {
        let (v, d) = horner(c, &zk.mid());
        let dl = d.abs_lower();
        if dl <= 0 {
            return Err(Error::RaisePrecision("root cluster not resolved".into()));
        }
        let r = v.abs_upper().mul(&Mag::from_int(n as u64)).div_lower(&dl);
        out.push(zk.mid().with_rad(r));
    }
    for i in 0..n {
        for j in i + 1..n {
            if out[i].overlaps(&out[j]) {
                return Err(Error::RaisePrecision("root inclusion discs overlap".into()));
            }
        }
    }
    Ok(out)
}

/// Roots of the squarefree part of an exact rational polynomial.
pub fn isolate_roots_qpoly(p: &QPoly, prec: u32) -> Result<Vec<CBall>> {
    let sf = p.squarefree();
    let c: Vec<CBall> = sf.coeffs().iter().map(|q| CBall::from_rational(q, prec)).collect();
    let mut pr = prec;
    loop {
        match isolate_roots(&c.iter().map(|x| x.set_prec(pr)).collect::<Vec<_>>(), pr) {
            Ok(r) => return Ok(r),
            Err(Error::RaisePrecision(_)) if pr < 16 * prec.max(64) => {
                pr *= 2;
            }
            Err(e) => return Err(e),
        }
    }
}

/// For a polynomial with real coefficients: true if the isolated root
/// `r` (one of `all`) is real, decided by conjugate symmetry.
pub fn is_real_root(r: &CBall, all: &[CBall]) -> bool {
    let c = r.conj();
    all.iter().filter(|s| s.overlaps(&c)).count() == 1 && r.overlaps(&c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn roots_of_cyclotomic() {
        // x^6 - 1
        let p = QPoly::from_ints(&[-1, 0, 0, 0, 0, 0, 1]);
        let r = isolate_roots_qpoly(&p, 200).unwrap();
        assert_eq!(r.len(), 6);
        for z in &r {
            let z6 = z.pow(6).sub(&CBall::one(200));
            assert!(z6.contains_zero());
            assert!(z.rad.to_f64() < 1e-40);
        }
        assert_eq!(r.iter().filter(|z| is_real_root(z, &r)).count(), 2);
    }

    #[test]
    fn close_roots_separated() {
        // (x - 1/1000)(x - 2/1000)(x + 5)
        let a = QPoly::new(vec![Rational::from((-1, 1000)), Rational::from(1)]);
        let b = QPoly::new(vec![Rational::from((-2, 1000)), Rational::from(1)]);
        let p = a.mul(&b).mul(&QPoly::from_ints(&[5, 1]));
        let r = isolate_roots_qpoly(&p, 128).unwrap();
        assert_eq!(r.len(), 3);
        let target = CBall::from_rational(&Rational::from((1, 1000)), 128);
        assert!(r.iter().any(|z| z.overlaps(&target)));
    }

    #[test]
    fn multiple_roots_reduced_to_squarefree() {
        let p = QPoly::from_ints(&[1, -2, 1]); // (x-1)^2
        let r = isolate_roots_qpoly(&p, 64).unwrap();
        assert_eq!(r.len(), 1);
    }
}
