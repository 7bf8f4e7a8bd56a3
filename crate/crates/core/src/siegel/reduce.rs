//! Reduction to a fundamental domain: exact for g = 1, practical for g ≥ 2
//! (Minkowski/LLL-reduced Im τ, |Re τ_ij| ≤ 1/2, no raising involution
//! from a fixed finite set increases det Im τ).

use serde::Serialize;

use super::{SiegelPoint, SymplecticMatrix};
use crate::error::{Error, Result};

pub const DEFAULT_ITERATION_CAP: usize = 10_000;

/// Slack used in the decisions; violations smaller than this are treated as
/// boundary cases and left alone, which keeps reduction idempotent.
const SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ReductionResult {
    pub tau: SiegelPoint,
    pub gamma: SymplecticMatrix,
    /// g = 1: certified membership of the standard fundamental domain.
    pub exact: bool,
    /// g ≥ 2: the practical conditions hold at the midpoint.
    pub practical: bool,
    pub steps: usize,
}

#[derive(Serialize)]
struct TraceStep<'a> {
    step: usize,
    gamma: &'a SymplecticMatrix,
}

impl ReductionResult {
    /// JSON dump of the accumulated transformation, for debugging.
    pub fn trace_json(&self) -> String {
        serde_json::to_string(&TraceStep { step: self.steps, gamma: &self.gamma }).expect("serializable")
    }
}

pub fn reduce(tau: &SiegelPoint) -> Result<ReductionResult> {
    reduce_with_cap(tau, DEFAULT_ITERATION_CAP)
}

pub fn reduce_with_cap(tau: &SiegelPoint, cap: usize) -> Result<ReductionResult> {
    if tau.genus() == 1 {
        reduce_g1(tau, cap)
    } else {
        reduce_practical(tau, cap)
    }
}

fn reduce_g1(tau: &SiegelPoint, cap: usize) -> Result<ReductionResult> {
    let mut gamma = SymplecticMatrix::identity(1);
    let mut cur = tau.clone();
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > cap {
            return Err(Error::ReductionStalled);
        }
        let (re, im) = cur.tau()[(0, 0)].to_c64();
        if re.abs() > 0.5 + SLACK {
            let t = SymplecticMatrix::translation(&[vec![-re.round() as i64]]);
            gamma = t.mul(&gamma);
        } else if re * re + im * im < 1.0 - SLACK {
            gamma = SymplecticMatrix::inversion(1).mul(&gamma);
        } else {
            break;
        }
        cur = gamma.act(tau)?;
    }
    let z = &cur.tau()[(0, 0)];
    let rad = z.rad.to_f64();
    let (re, im) = z.to_c64();
    let exact = re.abs() <= 0.5 + rad + SLACK && (re * re + im * im).sqrt() >= 1.0 - rad - SLACK;
    Ok(ReductionResult { tau: cur, gamma, exact, practical: exact, steps })
}

/// Integral U with U Y Uᵀ reduced: Gauss–Lagrange for g = 2 (Minkowski),
/// LLL (δ = 0.99) otherwise.
fn reduce_form(y: &[Vec<f64>]) -> Vec<Vec<i64>> {
    let g = y.len();
    let mut u: Vec<Vec<i64>> = (0..g).map(|i| (0..g).map(|j| (i == j) as i64).collect()).collect();
    let gram = |u: &[Vec<i64>], i: usize, j: usize| -> f64 {
        let mut s = 0.0;
        for a in 0..g {
            for b in 0..g {
                s += u[i][a] as f64 * y[a][b] * u[j][b] as f64;
            }
        }
        s
    };
    let mut k = 1;
    let mut guard = 0;
    while k < g && guard < 10_000 {
        guard += 1;
        for j in (0..k).rev() {
            let mu = gram(&u, k, j) / gram(&u, j, j);
            if mu.abs() > 0.5 + SLACK {
                let r = mu.round() as i64;
                let uj = u[j].clone();
                for (x, y) in u[k].iter_mut().zip(&uj) {
                    *x -= r * y;
                }
            }
        }
        let (bk, bk1) = (gram(&u, k, k), gram(&u, k - 1, k - 1));
        let mu = gram(&u, k, k - 1) / bk1;
        let delta = if g == 2 { 1.0 - SLACK } else { 0.99 };
        if bk < (delta - mu * mu) * bk1 {
            u.swap(k, k - 1);
            k = (k - 1).max(1);
        } else {
            k += 1;
        }
    }
    if g == 2 && gram(&u, 0, 1) < -SLACK {
        u[1].iter_mut().for_each(|x| *x = -*x);
    }
    u
}

fn is_identity(u: &[Vec<i64>]) -> bool {
    u.iter().enumerate().all(|(i, r)| r.iter().enumerate().all(|(j, &x)| x == (i == j) as i64))
}

fn reduce_practical(tau: &SiegelPoint, cap: usize) -> Result<ReductionResult> {
    let g = tau.genus();
    let mut gamma = SymplecticMatrix::identity(g);
    let mut cur = tau.clone();
    let raising: Vec<SymplecticMatrix> = std::iter::once(SymplecticMatrix::inversion(g))
        .chain((0..g).map(|k| SymplecticMatrix::partial_inversion(g, k)))
        .collect();
    let mut steps = 0;
    loop {
        steps += 1;
        if steps > cap {
            return Err(Error::ReductionStalled);
        }
        let t = cur.to_c64();
        let y: Vec<Vec<f64>> = t.iter().map(|r| r.iter().map(|z| z.1).collect()).collect();
        let u = reduce_form(&y);
        if !is_identity(&u) {
            gamma = SymplecticMatrix::change_of_basis(&u)?.mul(&gamma);
            cur = gamma.act(tau)?;
            continue;
        }
        let b: Vec<Vec<i64>> = t
            .iter()
            .map(|r| r.iter().map(|z| if z.0.abs() > 0.5 + SLACK { -z.0.round() as i64 } else { 0 }).collect())
            .collect();
        if b.iter().flatten().any(|&x| x != 0) {
            gamma = SymplecticMatrix::translation(&b).mul(&gamma);
            cur = gamma.act(tau)?;
            continue;
        }
        let best = raising
            .iter()
            .map(|s| (s, s.automorphy_det(&cur).mid_abs().to_f64()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty");
        if best.1 < 1.0 - SLACK {
            gamma = best.0.mul(&gamma);
            cur = gamma.act(tau)?;
            continue;
        }
        break;
    }
    Ok(ReductionResult { tau: cur, gamma, exact: false, practical: true, steps })
}

/// Genus-1 equivalence under SL₂(ℤ): compare reduced forms, allowing for
/// the boundary identifications of the fundamental domain.
pub fn equivalent_g1(a: &SiegelPoint, b: &SiegelPoint, tol: f64) -> Result<bool> {
    let ra = reduce(a)?.tau.to_c64()[0][0];
    let rb = reduce(b)?.tau.to_c64()[0][0];
    let close = |x: (f64, f64), y: (f64, f64)| (x.0 - y.0).hypot(x.1 - y.1) < tol;
    let d = rb.0 * rb.0 + rb.1 * rb.1;
    let minus_inv = (-rb.0 / d, rb.1 / d);
    Ok(close(ra, rb)
        || close(ra, (rb.0 + 1.0, rb.1))
        || close(ra, (rb.0 - 1.0, rb.1))
        || close(ra, minus_inv))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn pt(re: f64, im: f64) -> SiegelPoint {
        SiegelPoint::from_c64(&[(re, im)], 1, P).unwrap()
    }

    #[test]
    fn genus_one_examples() {
        let r = reduce(&pt(5.0, 1.0)).unwrap();
        assert!(r.tau.overlaps(&pt(0.0, 1.0)));
        assert_eq!(r.gamma, SymplecticMatrix::translation(&[vec![-5]]));
        assert!(r.exact);
        let r = reduce(&pt(0.0, 0.5)).unwrap();
        assert!(r.tau.overlaps(&pt(0.0, 2.0)));
    }

    /// Möbius action of T^{±1} and S on f64 points.
    fn words(z: (f64, f64), depth: usize, out: &mut Vec<(f64, f64)>) {
        out.push(z);
        if depth == 0 {
            return;
        }
        let d = z.0 * z.0 + z.1 * z.1;
        for w in [(z.0 + 1.0, z.1), (z.0 - 1.0, z.1), (-z.0 / d, z.1 / d)] {
            words(w, depth - 1, out);
        }
    }

    #[test]
    fn genus_one_matches_brute_force_words() {
        let z = (0.3, 0.4);
        let mut all = vec![];
        words(z, 12, &mut all);
        let in_domain: Vec<_> = all
            .into_iter()
            .filter(|w| w.0.abs() <= 0.5 + 1e-9 && w.0 * w.0 + w.1 * w.1 >= 1.0 - 1e-9)
            .collect();
        assert!(!in_domain.is_empty());
        let r = reduce(&pt(z.0, z.1)).unwrap().tau.to_c64()[0][0];
        assert!(in_domain.iter().any(|w| (w.0 - r.0).hypot(w.1 - r.1) < 1e-9));
    }

    #[test]
    fn reduction_is_idempotent() {
        let r = reduce(&pt(0.3, 0.4)).unwrap();
        assert!(reduce(&r.tau).unwrap().gamma.is_identity());
        let tau = SiegelPoint::from_c64(&[(3.1, 0.3), (0.7, 0.2), (0.7, 0.2), (-1.4, 0.25)], 2, P).unwrap();
        let r = reduce(&tau).unwrap();
        assert!(r.practical);
        let again = reduce(&r.tau).unwrap();
        assert!(again.gamma.is_identity());
        let t = r.tau.to_c64();
        assert!(t.iter().flatten().all(|z| z.0.abs() <= 0.5 + 1e-9));
        // Minkowski: 0 ≤ 2 y12 ≤ y11 ≤ y22
        assert!(2.0 * t[0][1].1 <= t[0][0].1 + 1e-9 && t[0][0].1 <= t[1][1].1 + 1e-9);
    }

    #[test]
    fn equivalence_detects_orbits() {
        let a = pt(0.3, 0.4);
        let g = SymplecticMatrix::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
        let b = g.act(&a).unwrap();
        assert!(equivalent_g1(&a, &b, 1e-9).unwrap());
        assert!(!equivalent_g1(&a, &pt(0.0, 3.0), 1e-9).unwrap());
    }
}
