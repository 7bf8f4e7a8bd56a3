//! The norm on the Siegel space and growth of τ near a cusp.

use serde::Serialize;

use super::{reduce, SiegelPoint};
use crate::arith::CBall;
use crate::error::Result;
use crate::periods::{tau_path, HyperellipticFamily};

/// Eigenvalues of a small real symmetric matrix (cyclic Jacobi).
fn sym_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m = a.to_vec();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| m[i][j] * m[i][j]).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (m[k][p], m[k][q]);
                    m[k][p] = c * akp - s * akq;
                    m[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * apk - s * aqk;
                    m[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i][i]).collect()
}

/// max(max_ij |τ_ij|, ‖(Im τ)⁻¹‖₂): large both near the cusp and near the
/// real boundary.
pub fn norm(tau: &SiegelPoint) -> f64 {
    let t = tau.to_c64();
    let entry = t.iter().flatten().map(|z| z.0.hypot(z.1)).fold(0.0, f64::max);
    let y: Vec<Vec<f64>> = t.iter().map(|r| r.iter().map(|z| z.1).collect()).collect();
    let lmin = sym_eigenvalues(&y).into_iter().fold(f64::INFINITY, f64::min);
    entry.max(1.0 / lmin)
}

/// Least-squares slope B of y against x, and the smallest A with
/// A + B·x ≥ y at every sample.
pub fn fit_affine_bound(samples: &[(f64, f64)]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mx = samples.iter().map(|s| s.0).sum::<f64>() / n;
    let my = samples.iter().map(|s| s.1).sum::<f64>() / n;
    let sxy: f64 = samples.iter().map(|s| (s.0 - mx) * (s.1 - my)).sum();
    let sxx: f64 = samples.iter().map(|s| (s.0 - mx) * (s.0 - mx)).sum();
    let b = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let a = samples.iter().map(|s| s.1 - b * s.0).fold(f64::NEG_INFINITY, f64::max);
    (a, b)
}

#[derive(Clone, Debug, Serialize)]
pub struct CuspProfile {
    /// (|z − s|, ‖τ‖) with τ reduced.
    pub samples: Vec<(f64, f64)>,
    pub a: f64,
    pub b: f64,
}

/// Sample ‖τ‖ on the ray s + r·e^{iθ}, r from `r_max` down to `r_min`
/// geometrically (`n` samples), following one branch of τ.
pub fn cusp_norm_profile(
    family: &HyperellipticFamily,
    s: (f64, f64),
    theta: f64,
    r_max: f64,
    r_min: f64,
    n: usize,
    digits: u32,
) -> Result<CuspProfile> {
    let prec = crate::arith::bits_for_digits(digits) + 16;
    let n = n.max(2);
    let radii: Vec<f64> = (0..n)
        .map(|k| r_max * (r_min / r_max).powf(k as f64 / (n - 1) as f64))
        .collect();
    let path: Vec<CBall> = radii
        .iter()
        .map(|r| CBall::from_f64(s.0 + r * theta.cos(), s.1 + r * theta.sin(), prec))
        .collect();
    let taus = tau_path(family, &path, digits)?;
    let mut samples = vec![];
    for (r, t) in radii.iter().zip(&taus) {
        let red = reduce(t)?;
        samples.push((*r, norm(&red.tau)));
    }
    let xy: Vec<(f64, f64)> = samples.iter().map(|(r, v)| (-r.ln(), *v)).collect();
    let (a, b) = fit_affine_bound(&xy);
    Ok(CuspProfile { samples, a, b })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::catalog;

    const P: u32 = 128;

    #[test]
    fn norm_examples() {
        let i = SiegelPoint::from_c64(&[(0.0, 1.0), (0.0, 0.0), (0.0, 0.0), (0.0, 1.0)], 2, P).unwrap();
        assert!((norm(&i) - 1.0).abs() < 1e-12);
        let big = SiegelPoint::from_c64(&[(0.0, 50.0)], 1, P).unwrap();
        assert!((norm(&big) - 50.0).abs() < 1e-12);
        let small = SiegelPoint::from_c64(&[(0.0, 0.02)], 1, P).unwrap();
        assert!((norm(&small) - 50.0).abs() < 1e-9);
    }

    #[test]
    fn affine_fit_covers_samples() {
        let s = vec![(1.0, 2.1), (2.0, 2.9), (3.0, 4.2)];
        let (a, b) = fit_affine_bound(&s);
        assert!(s.iter().all(|p| a + b * p.0 >= p.1 - 1e-12));
        assert!((b - 1.05).abs() < 1e-9);
    }

    #[test]
    fn legendre_cusp_slope() {
        let f = catalog("legendre").unwrap();
        let prof = cusp_norm_profile(&f, (0.0, 0.0), 0.0, 1e-2, 1e-8, 12, 30).unwrap();
        let target = 1.0 / std::f64::consts::PI;
        assert!((prof.b - target).abs() < 0.1 * target, "B = {}", prof.b);
    }
}
