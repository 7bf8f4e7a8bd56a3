//! Brute-force enumeration of low-height algebraic numbers of degree ≤ 2
//! by sweeping minimal-polynomial coefficients, and fast recognition of
//! numerical values as such numbers.

use rug::Integer;

use crate::arith::CBall;
use crate::cm::{recognize_algebraic, AlgebraicNumber};
use crate::error::{Error, Result};
use crate::poly::ZPoly;

/// Axis-parallel box in ℂ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CBox {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl CBox {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> CBox {
        CBox { x0, x1, y0, y1 }
    }

    pub fn from_ball(b: &CBall) -> CBox {
        let (x, y) = b.to_c64();
        let r = b.rad.to_f64() * (1.0 + 1e-12) + 1e-300;
        let s = 4.0 * f64::EPSILON * x.abs().max(y.abs());
        CBox::new(x - r - s, x + r + s, y - r - s, y + r + s)
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }

    pub fn meets_real(&self) -> bool {
        self.y0 <= 0.0 && 0.0 <= self.y1
    }

    /// Range of |ξ| over the box.
    pub fn abs_range(&self) -> (f64, f64) {
        let cx = 0f64.clamp(self.x0, self.x1);
        let cy = 0f64.clamp(self.y0, self.y1);
        let far_x = self.x0.abs().max(self.x1.abs());
        let far_y = self.y0.abs().max(self.y1.abs());
        (cx.hypot(cy), far_x.hypot(far_y))
    }

    /// Range of |Im ξ|.
    fn abs_im_range(&self) -> (f64, f64) {
        let lo = if self.meets_real() { 0.0 } else { self.y0.abs().min(self.y1.abs()) };
        (lo, self.y0.abs().max(self.y1.abs()))
    }

    /// Complex interval product (rounded outward by a relative margin).
    pub fn mul(&self, o: &CBox) -> CBox {
        let (a, b) = ((self.x0, self.x1), (self.y0, self.y1));
        let (c, d) = ((o.x0, o.x1), (o.y0, o.y1));
        let prod = |p: (f64, f64), q: (f64, f64)| {
            let v = [p.0 * q.0, p.0 * q.1, p.1 * q.0, p.1 * q.1];
            (v.iter().cloned().fold(f64::INFINITY, f64::min), v.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
        };
        let (ac, bd, ad, bc) = (prod(a, c), prod(b, d), prod(a, d), prod(b, c));
        let pad = |x: f64| x.abs() * 1e-12;
        let (re0, re1) = (ac.0 - bd.1, ac.1 - bd.0);
        let (im0, im1) = (ad.0 + bc.0, ad.1 + bc.1);
        CBox::new(re0 - pad(re0), re1 + pad(re1), im0 - pad(im0), im1 + pad(im1))
    }

    pub fn pow(&self, n: u32) -> CBox {
        let mut acc = CBox::new(1.0, 1.0, 0.0, 0.0);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }
}

/// Minimal polynomial (low to high degree) and its value(s).
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub minpoly: Vec<i64>,
    pub value: (f64, f64),
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn is_square(n: i64) -> bool {
    if n < 0 {
        return false;
    }
    let r = (n as f64).sqrt().round() as i64;
    (r - 1..=r + 1).any(|s| s >= 0 && s * s == n)
}

/// p/q in [x0, x1] with max(|p|, q) ≤ H.
pub fn rationals_in(x0: f64, x1: f64, h: f64) -> Vec<Candidate> {
    let hm = h.floor() as i64;
    let mut out = vec![];
    for q in 1..=hm {
        let lo = ((q as f64 * x0).ceil() as i64).max(-hm);
        let hi = ((q as f64 * x1).floor() as i64).min(hm);
        for p in lo..=hi {
            if gcd(p, q) == 1 {
                out.push(Candidate { minpoly: vec![-p, q], value: (p as f64 / q as f64, 0.0) });
            }
        }
    }
    out
}

/// Irrational real quadratics with a root in [x0, x1] and
/// M = a·max(1,|α|)·max(1,|β|) ≤ H².
pub fn real_quadratics_in(x0: f64, x1: f64, h: f64) -> Vec<Candidate> {
    let m = h * h;
    let amin_abs = if x0 <= 0.0 && 0.0 <= x1 { 0.0 } else { x0.abs().min(x1.abs()) };
    let mut out = vec![];
    let mut a = 1i64;
    while (a as f64) * amin_abs.max(1.0) <= m {
        let bmax = (m / (a as f64 * amin_abs.max(1.0))).max(1.0);
        let b_lo = (-(a as f64) * (x1 + bmax)).floor() as i64;
        let b_hi = (-(a as f64) * (x0 - bmax)).ceil() as i64;
        let af = a as f64;
        for b in b_lo..=b_hi {
            let g = |x: f64| -(b as f64) * x - af * x * x;
            let mut lo = g(x0).min(g(x1));
            let mut hi = g(x0).max(g(x1));
            let vert = -(b as f64) / (2.0 * af);
            if x0 <= vert && vert <= x1 {
                hi = hi.max(g(vert));
                lo = lo.min(g(vert));
            }
            for c in (lo.floor() as i64)..=(hi.ceil() as i64) {
                let disc = b * b - 4 * a * c;
                if disc <= 0 || is_square(disc) || gcd(gcd(a, b), c) != 1 {
                    continue;
                }
                let s = (disc as f64).sqrt();
                let r1 = (-(b as f64) - s) / (2.0 * af);
                let r2 = (-(b as f64) + s) / (2.0 * af);
                if af * r1.abs().max(1.0) * r2.abs().max(1.0) > m * (1.0 + 1e-12) {
                    continue;
                }
                for r in [r1, r2] {
                    if x0 <= r && r <= x1 {
                        out.push(Candidate { minpoly: vec![c, b, a], value: (r, 0.0) });
                    }
                }
            }
        }
        a += 1;
    }
    out
}

/// Non-real quadratics in the box with M = max(a, c) ≤ H².
pub fn complex_quadratics_in(bx: &CBox, h: f64) -> Vec<Candidate> {
    let m = h * h;
    let (r0, r1) = bx.abs_range();
    let (ylo, yhi) = bx.abs_im_range();
    if yhi <= 0.0 {
        return vec![];
    }
    let mut out = vec![];
    for a in 1..=(m.floor() as i64) {
        let af = a as f64;
        if af * r0 * r0 > m || (ylo > 0.0 && af * ylo * ylo > m) {
            break;
        }
        let c_lo = ((af * r0 * r0).floor() as i64).max(1);
        let c_hi = ((af * r1 * r1).ceil() as i64).min(m.floor() as i64);
        let b_re_lo = (-2.0 * af * bx.x1).floor() as i64;
        let b_re_hi = (-2.0 * af * bx.x0).ceil() as i64;
        for c in c_lo..=c_hi {
            let q = 4.0 * af * c as f64;
            let babs_lo = (q - 4.0 * af * af * yhi * yhi).max(0.0).sqrt().floor() as i64;
            let babs_hi = (q - 4.0 * af * af * ylo * ylo).max(0.0).sqrt().ceil() as i64;
            for sign in [-1i64, 1] {
                for babs in babs_lo..=babs_hi {
                    if sign == 1 && babs == 0 {
                        continue;
                    }
                    let b = sign * babs;
                    if b < b_re_lo || b > b_re_hi {
                        continue;
                    }
                    let disc = b * b - 4 * a * c;
                    if disc >= 0 || gcd(gcd(a, b), c) != 1 {
                        continue;
                    }
                    let re = -(b as f64) / (2.0 * af);
                    let im = ((-disc) as f64).sqrt() / (2.0 * af);
                    for y in [im, -im] {
                        if bx.contains(re, y) {
                            out.push(Candidate { minpoly: vec![c, b, a], value: (re, y) });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Expected number of candidates of degree ≤ k and height ≤ H in the box,
/// from the coefficient-space densities.
pub fn estimate_candidates(bx: &CBox, h: f64, k: u32) -> f64 {
    let m = h * h;
    let mut total = 0.0;
    if bx.meets_real() {
        total += (1..=(h.floor() as i64)).map(|q| ((bx.x1 - bx.x0) * q as f64).min(2.0 * h) + 1.0).sum::<f64>();
    }
    if k < 2 {
        return total;
    }
    let n = 12;
    let (dx, dy) = ((bx.x1 - bx.x0) / n as f64, (bx.y1 - bx.y0) / n as f64);
    let amax = m.floor() as i64;
    let mut a = 1;
    while a <= amax {
        // a-blocks to keep the sum cheap for large H
        let step = (a / 64).max(1);
        let af = a as f64;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let x = bx.x0 + (i as f64 + 0.5) * dx;
                let y = bx.y0 + (j as f64 + 0.5) * dy;
                if af * (x * x + y * y).max(1.0) <= m {
                    s += 4.0 * af * af * y.abs() * dx * dy;
                }
            }
        }
        if bx.meets_real() {
            // db dc = a²|α − β| dα dβ over |β| ≤ βmax
            for i in 0..n {
                let x = bx.x0 + (i as f64 + 0.5) * (bx.x1 - bx.x0) / n as f64;
                if af * x.abs().max(1.0) > m {
                    continue;
                }
                let bm = (m / (af * x.abs().max(1.0))).max(1.0);
                s += af * af * (bm * bm + x * x) * (bx.x1 - bx.x0) / n as f64;
            }
        }
        total += s * step as f64;
        if s == 0.0 && af * bx.abs_range().0.max(1.0).powi(2) > m {
            break;
        }
        a += step;
    }
    total
}

/// All numbers of degree ≤ k ≤ 2 and height ≤ H in the box, refusing
/// sweeps estimated above `cap` candidates.
pub fn candidates_in(bx: &CBox, h: f64, k: u32, cap: f64) -> Result<Vec<Candidate>> {
    if k > 2 {
        return Err(Error::InvalidInput("coefficient sweeps support degree ≤ 2".into()));
    }
    let est = estimate_candidates(bx, h, k);
    if est > cap {
        return Err(Error::IncreaseSubdivision(format!("sweep of ~{est:.2e} candidates exceeds the cap {cap:.0e}")));
    }
    let mut out = vec![];
    if bx.meets_real() {
        out.extend(rationals_in(bx.x0, bx.x1, h));
        if k == 2 {
            out.extend(real_quadratics_in(bx.x0, bx.x1, h));
        }
    }
    if k == 2 {
        out.extend(complex_quadratics_in(bx, h));
    }
    Ok(out)
}

fn zpoly(c: &[i64]) -> ZPoly {
    ZPoly::new(c.iter().map(|&x| Integer::from(x)).collect())
}

/// Best rational approximations of x with denominator ≤ qmax.
fn convergents(x: f64, qmax: f64) -> Vec<(i64, i64)> {
    let mut out = vec![];
    let (mut p0, mut q0, mut p1, mut q1) = (0i64, 1i64, 1i64, 0i64);
    let mut y = x;
    for _ in 0..64 {
        let a = y.floor();
        if a.abs() > 1e15 {
            break;
        }
        let (p2, q2) = (a as i64 * p1 + p0, a as i64 * q1 + q0);
        if q2 as f64 > qmax {
            break;
        }
        out.push((p2, q2));
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = y - a;
        if frac.abs() < 1e-300 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

/// Cheap f64 necessary test for a value of degree ≤ k, height ≤ H (real
/// values are always plausible when k ≥ 2).
pub fn plausible_low(v: (f64, f64), k: u32, h: f64) -> bool {
    let (re, im) = v;
    let scale = re.abs().max(im.abs()).max(1.0);
    if im.abs() < 1e-9 * scale {
        return k >= 2 || convergents(re, h).iter().any(|&(p, q)| (re - p as f64 / q as f64).abs() < 1e-9 * scale);
    }
    k >= 2 && complex_coeffs(re, im, h).next().is_some()
}

/// (a, b, c) with a|ξ|² ≈ c, −2a Re ξ ≈ b, max(a, c) ≤ H².
fn complex_coeffs(re: f64, im: f64, h: f64) -> impl Iterator<Item = [i64; 3]> {
    let abs2 = re * re + im * im;
    let scale = re.abs().max(im.abs()).max(1.0);
    let amax = (h * h / abs2.max(1.0) * (1.0 + 1e-9)).floor().min(1e6) as i64;
    (1..=amax).filter_map(move |a| {
        let (vb, vc) = (-2.0 * a as f64 * re, a as f64 * abs2);
        let (b, c) = (vb.round(), vc.round());
        let close = (vb - b).abs() < 1e-6 * a as f64 * scale && (vc - c).abs() < 1e-6 * a as f64 * scale * scale;
        (close && c <= h * h).then_some([c as i64, b as i64, a])
    })
}

/// Degree-≤k, height-≤H number inside the ball, if any: continued
/// fractions for rationals, coefficient rounding for non-real quadratics,
/// lattice reduction otherwise; certified by root isolation.
pub fn recognize_low(x: &CBall, k: u32, h: f64) -> Option<AlgebraicNumber> {
    let (re, im) = x.to_c64();
    let prec = x.prec();
    let scale = re.abs().max(im.abs()).max(1.0);
    let tol = 1e-9 * scale;
    let accept = |c: &[i64]| -> Option<AlgebraicNumber> {
        let a = AlgebraicNumber::from_minpoly(&zpoly(c), x, prec).ok()?;
        (a.degree as u32 <= k && a.height <= h * (1.0 + 1e-12)).then_some(a)
    };
    if im.abs() < tol {
        for (p, q) in convergents(re, h) {
            if (re - p as f64 / q as f64).abs() < tol && p.abs() as f64 <= h {
                if let Some(a) = accept(&[-p, q]) {
                    return Some(a);
                }
            }
        }
        if k < 2 {
            return None;
        }
        let a = recognize_algebraic(x, k as usize, h).ok()??;
        return (a.height <= h * (1.0 + 1e-12)).then_some(a);
    }
    if k < 2 {
        return None;
    }
    for c in complex_coeffs(re, im, h) {
        if let Some(x) = accept(&c) {
            return Some(x);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sweep_counts() {
        // Farey-type count of p/q ∈ [0, 1], q ≤ 10
        let c = rationals_in(0.0, 1.0, 10.0);
        assert_eq!(c.len(), 33);
    }

    #[test]
    fn complex_sweep_finds_gaussian_and_eisenstein() {
        let bx = CBox::new(-0.6, 0.6, 0.5, 1.1);
        let c = complex_quadratics_in(&bx, 1.0);
        let polys: Vec<_> = c.iter().map(|x| x.minpoly.clone()).collect();
        assert!(polys.contains(&vec![1, 0, 1]));
        assert!(polys.contains(&vec![1, 1, 1]));
        assert!(polys.contains(&vec![1, -1, 1]));
        assert_eq!(c.len(), 3);
    }

    #[test]
    fn real_quadratic_sweep_matches_direct_loop() {
        let h = 4.0;
        let got = real_quadratics_in(0.1, 0.9, h).len();
        let mut want = 0;
        for a in 1..=16i64 {
            for b in -40i64..=40 {
                for c in -40i64..=40 {
                    let d = b * b - 4 * a * c;
                    if d <= 0 || is_square(d) || gcd(gcd(a, b), c) != 1 {
                        continue;
                    }
                    let s = (d as f64).sqrt();
                    let r = [(-(b as f64) - s) / (2.0 * a as f64), (-(b as f64) + s) / (2.0 * a as f64)];
                    let mm = a as f64 * r[0].abs().max(1.0) * r[1].abs().max(1.0);
                    if mm <= h * h {
                        want += r.iter().filter(|x| (0.1..=0.9).contains(*x)).count();
                    }
                }
            }
        }
        assert_eq!(got, want);
    }

    #[test]
    fn recognizes_values() {
        let p = 200;
        let tau = CBall::from_int(-15, p).sqrt().unwrap().add(&CBall::from_int(-1, p)).div_int(2);
        let a = recognize_low(&tau, 2, 10.0).unwrap();
        assert_eq!(a.minpoly.coeffs().iter().map(|c| c.to_i64().unwrap()).collect::<Vec<_>>(), vec![4, 1, 1]);
        let q = CBall::from_int(7, p).div_int(13);
        assert_eq!(recognize_low(&q, 1, 20.0).unwrap().degree, 1);
        assert!(recognize_low(&q, 1, 10.0).is_none());
        assert!(recognize_low(&CBall::pi(p), 2, 100.0).is_none());
    }
}
