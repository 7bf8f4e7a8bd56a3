//! CM certificates and the empirical inequality-shape report.

use serde::Serialize;

use super::algebraic::{height_point, recognize_algebraic, AlgebraicNumber, AlgebraicRepr};
use super::endo::{center_discriminant, detect_endomorphisms_at, polarized_discriminant, Classification};
use super::oracle::lambda_polynomial;
use crate::arith::{bits_for_digits, CBall, CBallRepr};
use crate::error::{Error, Result};
use crate::periods::{periods_at, tau_from_periods, HyperellipticFamily};
use crate::poly::factor;
use crate::siegel::{fit_affine_bound, reduce};

/// Height cap used when recognizing entries of the reduced τ.
pub const TAU_HEIGHT_BOUND: f64 = 1e4;

#[derive(Clone, Debug, Serialize)]
pub struct Evidence {
    pub precisions: Vec<u32>,
    #[serde(rename = "S")]
    pub bound: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CmCertificate {
    pub t: AlgebraicRepr,
    /// Reduced τ, row-major.
    pub tau: Vec<CBallRepr>,
    pub disc_center: i64,
    pub disc_polarized: i64,
    #[serde(rename = "H_tau")]
    pub h_tau: f64,
    pub d: usize,
    pub h: f64,
    pub evidence: Evidence,
}

/// Re-isolate the root of `t` at a working precision for `digits`.
fn refine(t: &AlgebraicNumber, digits: u32) -> Result<AlgebraicNumber> {
    AlgebraicNumber::from_minpoly(&t.minpoly, &t.root, bits_for_digits(2 * digits) + 64)
}

/// Certify that the fibre at the algebraic parameter `t` has CM: the
/// detected ring is commutative of rank 2g at two precisions, with its
/// discriminants and the height of the reduced τ.
pub fn certify_cm(family: &HyperellipticFamily, t: &AlgebraicNumber, bound: u64, digits: u32) -> Result<CmCertificate> {
    let t = refine(t, digits)?;
    let e = detect_endomorphisms_at(family, &t.root, bound, digits)?;
    if e.classification != Classification::Cm {
        return Err(Error::InvalidInput(format!("fibre classified {}", e.classification)));
    }
    let dc = center_discriminant(&e)?.value;
    let dp = polarized_discriminant(&e)?.value;
    let per = periods_at(family, &t.root, digits)?;
    let red = reduce(&tau_from_periods(&per)?)?;
    let g = family.genus();
    let mut entries = vec![];
    for i in 0..g {
        for j in i..g {
            let x = &red.tau.tau()[(i, j)];
            let a = recognize_algebraic(x, 2 * g, TAU_HEIGHT_BOUND)?
                .ok_or_else(|| Error::RaisePrecision("reduced τ entry not recognized".into()))?;
            entries.push(a);
        }
    }
    Ok(CmCertificate {
        t: t.repr(),
        tau: red.tau.tau().entries().iter().map(CBall::repr).collect(),
        disc_center: dc,
        disc_polarized: dp,
        h_tau: height_point(&entries),
        d: t.degree,
        h: t.log_height,
        evidence: Evidence { precisions: e.digits.clone(), bound },
    })
}

/// The exact Legendre parameter behind a numerically located CM point: the
/// irreducible factor of the λ-polynomial for the detected discriminant
/// whose isolated root overlaps `t`.
pub fn legendre_parameter(t: &CBall, disc: i64) -> Result<AlgebraicNumber> {
    let g = lambda_polynomial(disc)?;
    for (f, _) in factor(&g).1 {
        if f.eval(t).contains_zero() {
            if let Ok(a) = AlgebraicNumber::from_minpoly(&f, t, t.prec().max(128)) {
                return Ok(a);
            }
        }
    }
    Err(Error::InsufficientPrecision(format!("no factor of the λ-polynomial for {disc} vanishes on the ball")))
}

#[derive(Clone, Debug, Serialize)]
pub struct ShapeRow {
    pub d: usize,
    pub h: f64,
    pub disc_center: i64,
    pub disc_polarized: i64,
    #[serde(rename = "H_tau")]
    pub h_tau: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InequalityReport {
    pub rows: Vec<ShapeRow>,
    /// log H(τ) against log |Disc|: the exponent in the height bound.
    pub slope_height_vs_disc: f64,
    /// log |Disc| against log d; absent when every d is equal.
    pub slope_disc_vs_degree: Option<f64>,
    /// h against log d; absent when every d is equal.
    pub slope_logheight_vs_degree: Option<f64>,
}

impl InequalityReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn slope(xy: &[(f64, f64)]) -> Option<f64> {
    let x0 = xy.first()?.0;
    if xy.iter().all(|p| p.0 == x0) {
        return None;
    }
    Some(fit_affine_bound(xy).1)
}

/// Fitted exponents over the certificates.  Reports only: the constants
/// of the inequalities are not derived.
pub fn check_inequality_shapes(certs: &[CmCertificate]) -> Result<InequalityReport> {
    if certs.is_empty() {
        return Err(Error::InvalidInput("no certificates".into()));
    }
    let rows: Vec<ShapeRow> = certs
        .iter()
        .map(|c| ShapeRow { d: c.d, h: c.h, disc_center: c.disc_center, disc_polarized: c.disc_polarized, h_tau: c.h_tau })
        .collect();
    let ld = |r: &ShapeRow| (r.disc_center.unsigned_abs() as f64).ln();
    let lambda = slope(&rows.iter().map(|r| (ld(r), r.h_tau.ln())).collect::<Vec<_>>())
        .ok_or_else(|| Error::DegenerateFit("all discriminants are equal".into()))?;
    let kappa = slope(&rows.iter().map(|r| ((r.d as f64).ln(), ld(r))).collect::<Vec<_>>());
    let kappa2 = slope(&rows.iter().map(|r| ((r.d as f64).ln(), r.h)).collect::<Vec<_>>());
    Ok(InequalityReport {
        rows,
        slope_height_vs_disc: lambda,
        slope_disc_vs_degree: kappa,
        slope_logheight_vs_degree: kappa2,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::catalog;
    use rug::Rational;

    #[test]
    fn certificate_at_minus_one() {
        let f = catalog("legendre").unwrap();
        let t = AlgebraicNumber::rational(&Rational::from(-1), 128);
        let c = certify_cm(&f, &t, 50, 40).unwrap();
        assert_eq!((c.disc_center, c.disc_polarized, c.d), (-4, 4, 1));
        // reduced τ = i, height 1
        assert!((c.h_tau - 1.0).abs() < 1e-9);
        let js: serde_json::Value = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        for k in ["t", "tau", "disc_center", "disc_polarized", "H_tau", "d", "h", "evidence"] {
            assert!(js.get(k).is_some(), "{k}");
        }
    }

    #[test]
    fn non_cm_parameter_rejected() {
        let f = catalog("legendre").unwrap();
        let t = AlgebraicNumber::rational(&Rational::from((3, 7)), 128);
        assert!(certify_cm(&f, &t, 50, 30).is_err());
    }

    #[test]
    fn report_preconditions() {
        assert!(matches!(check_inequality_shapes(&[]), Err(Error::InvalidInput(_))));
        let f = catalog("legendre").unwrap();
        let t = AlgebraicNumber::rational(&Rational::from(2), 128);
        let c = certify_cm(&f, &t, 50, 30).unwrap();
        assert!(matches!(check_inequality_shapes(&[c.clone()]), Err(Error::DegenerateFit(_))));
    }

    #[test]
    fn lambda_parameter_lookup() {
        let t = CBall::from_f64(0.5, 0.0, 128);
        let a = legendre_parameter(&t, -4).unwrap();
        assert_eq!(a.minpoly, crate::poly::ZPoly::from_ints(&[-1, 2]));
    }
}
