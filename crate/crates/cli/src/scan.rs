//! Candidate-driven CM search on the Legendre family: enumerate CM values
//! of τ, solve τ(t) = τ_candidate by Newton along the period map, then
//! certify the fibre.

use ao_core::arith::{bits_for_digits, CBall, CBallRepr, Mag};
use ao_core::cm::oracle::{discriminants, form_point, reduced_forms};
use ao_core::cm::{
    center_discriminant, certify_cm, check_inequality_shapes, detect_endomorphisms_at, legendre_parameter,
    CmCertificate, InequalityReport,
};
use ao_core::periods::{HyperellipticFamily, LegendreTau};
use ao_core::Error;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{region_label, ScanConfig};
use crate::CliError;

type Mat = [[i64; 2]; 2];

const ID: Mat = [[1, 0], [0, 1]];
const MAX_NEWTON: usize = 30;

fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let mut m = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            m[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    m
}

fn mat_inv(m: &Mat) -> Mat {
    [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]]
}

fn act_f64(m: &Mat, z: (f64, f64)) -> (f64, f64) {
    let num = (m[0][0] as f64 * z.0 + m[0][1] as f64, m[0][0] as f64 * z.1);
    let den = (m[1][0] as f64 * z.0 + m[1][1] as f64, m[1][0] as f64 * z.1);
    let d2 = den.0 * den.0 + den.1 * den.1;
    ((num.0 * den.0 + num.1 * den.1) / d2, (num.1 * den.0 - num.0 * den.1) / d2)
}

/// The form whose upper-half-plane root is m·τ, τ the root of (a, b, c).
pub fn transform_form(f: (i64, i64, i64), m: &Mat) -> (i64, i64, i64) {
    let (a, b, c) = f;
    let ([p, q], [r, s]) = (m[0], m[1]);
    let aa = a * s * s - b * s * r + c * r * r;
    let bb = -2 * a * q * s + b * (s * p + q * r) - 2 * c * r * p;
    let cc = a * q * q - b * q * p + c * p * p;
    if aa < 0 {
        (-aa, -bb, -cc)
    } else {
        (aa, bb, cc)
    }
}

/// SL₂(ℤ) reduction of z, returning (M, M·z).
fn reduce_sl2(mut z: (f64, f64)) -> (Mat, (f64, f64)) {
    let mut m = ID;
    for _ in 0..200 {
        let n = z.0.round();
        z.0 -= n;
        m = mat_mul(&[[1, -(n as i64)], [0, 1]], &m);
        let r2 = z.0 * z.0 + z.1 * z.1;
        if r2 >= 1.0 - 1e-12 {
            break;
        }
        z = (-z.0 / r2, z.1 / r2);
        m = mat_mul(&[[0, -1], [1, 0]], &m);
    }
    (m, z)
}

/// λ(τ) = 16q Π((1 + q^{2n})/(1 + q^{2n−1}))⁸, q = e^{iπτ}: a starting
/// value only; the located t is confirmed on the period map.
pub fn lambda_of(tau: &CBall) -> CBall {
    let prec = tau.prec();
    let q = CBall::i(prec).mul(&CBall::pi(prec)).mul(tau).exp();
    let one = CBall::one(prec);
    let mut prod = one.clone();
    let mut qn = q.clone();
    for n in 1..60 {
        let odd = qn.clone();
        let even = qn.mul(&q);
        let Ok(r) = one.add(&even).div(&one.add(&odd)) else { break };
        prod = prod.mul(&r.pow(8));
        qn = even.mul(&q);
        if n > 4 && qn.abs_upper().log10() < -(prec as f64) * 0.31 {
            break;
        }
    }
    q.mul(&prod).mul_int(16).mid()
}

/// The six values of λ over one j: the anharmonic orbit.
fn anharmonic(l: (f64, f64)) -> [(f64, f64); 6] {
    let inv = |z: (f64, f64)| {
        let d = z.0 * z.0 + z.1 * z.1;
        (z.0 / d, -z.1 / d)
    };
    let one_minus = |z: (f64, f64)| (1.0 - z.0, -z.1);
    let a = one_minus(l);
    let b = inv(l);
    let c = inv(a);
    let d = one_minus(b); // (λ−1)/λ
    let e = inv(d); // λ/(λ−1)
    [l, a, b, c, d, e]
}

#[derive(Clone, Debug, Serialize)]
pub struct Located {
    pub chart: String,
    pub t0: (f64, f64),
    /// Form (a, b, c) of τ on the branch of the period map at t.
    pub branch_form: (i64, i64, i64),
    /// H(τ) on that branch: √max(a, c).
    pub branch_height: f64,
    pub t: CBallRepr,
    /// log₁₀ |Newton step| per iteration.
    pub newton_trace: Vec<f64>,
    pub digits: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanRecord {
    pub disc: i64,
    pub form: (i64, i64, i64),
    pub located: Located,
    pub certificate: CmCertificate,
}

#[derive(Clone, Debug, Serialize)]
pub struct Unresolved {
    pub region: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanReport {
    pub family: String,
    pub region: String,
    pub exclude: f64,
    pub excluded: Vec<String>,
    pub disc_bound: i64,
    pub endomorphism_bound: u64,
    pub precision: Vec<u32>,
    pub seed: u64,
    pub candidates: usize,
    pub certificates: Vec<ScanRecord>,
    pub unresolved: Vec<Unresolved>,
    pub shapes: Option<InequalityReport>,
    pub shape_note: Option<String>,
    pub complete: bool,
}

impl ScanReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    disc: i64,
    form: (i64, i64, i64),
    t0: (f64, f64),
}

fn candidates(cfg: &ScanConfig) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = vec![];
    for d in discriminants(cfg.disc_bound) {
        for f in reduced_forms(d) {
            let l = lambda_of(&form_point(f, 128)).to_c64();
            for t in anharmonic(l) {
                if !cfg.admits(t.0, t.1) {
                    continue;
                }
                // j = 0, 1728 have short orbits
                if out.iter().any(|c| c.disc == d && (c.t0.0 - t.0).hypot(c.t0.1 - t.1) < 1e-8) {
                    continue;
                }
                out.push(Candidate { disc: d, form: f, t0: t });
            }
        }
    }
    out
}

/// Branch of τ at t0 carrying the CM point of `form`: the matrix G with
/// τ_period(t0) = G·τ_form.
fn branch_matrix(tau_p: (f64, f64), form: (i64, i64, i64)) -> Result<Mat, Error> {
    let (m, red) = reduce_sl2(tau_p);
    let t0 = form_point(form, 64).to_c64();
    let twins: [Mat; 6] = [ID, [[1, 1], [0, 1]], [[1, -1], [0, 1]], [[0, -1], [1, 0]], [[1, -1], [1, 0]], [[-1, -1], [1, 0]]];
    let tol = 1e-6 * red.0.hypot(red.1).max(1.0);
    for n in twins {
        let z = act_f64(&n, t0);
        if (z.0 - red.0).hypot(z.1 - red.1) < tol {
            return Ok(mat_mul(&mat_inv(&m), &n));
        }
    }
    Err(Error::InsufficientPrecision(format!("τ(t0) = {tau_p:?} does not reduce to the candidate {form:?}")))
}

fn tau_and_derivative(t: &CBall, digits: u32) -> Result<(CBall, CBall), Error> {
    let lt = LegendreTau::at(t, digits)?;
    let v = &lt.v;
    let i = CBall::i(v.prec());
    let f = &v[(0, 0)];
    let tau = i.mul(&v[(0, 1)]).div(f)?;
    let w = v[(1, 1)].mul(f).sub(&v[(0, 1)].mul(&v[(1, 0)]));
    let dtau = i.mul(&w).div(&f.sqr())?;
    Ok((tau, dtau))
}

fn locate(c: &Candidate, digits: u32) -> Result<Located, Error> {
    let prec = bits_for_digits(digits) + 32;
    let (tau_p, _) = tau_and_derivative(&CBall::from_f64(c.t0.0, c.t0.1, 128), 20)?;
    let g = branch_matrix(tau_p.to_c64(), c.form)?;
    let bf = transform_form(c.form, &g);
    let target = form_point(bf, prec);
    // λ is Γ(2)-invariant, so λ(τ_branch) is the root; Newton confirms it
    // on the period map
    let mut t = lambda_of(&target);
    let mut trace = vec![];
    let tol = -(digits as f64) + 4.0;
    for _ in 0..MAX_NEWTON {
        let (tau, dtau) = tau_and_derivative(&t, digits)?;
        let step = tau.sub(&target).div(&dtau)?.mid();
        let s = step.abs_upper().log10();
        trace.push(s);
        t = t.sub(&step).mid();
        if s < tol {
            let scale = t.abs_upper().to_f64().max(1.0);
            let t = t.with_rad(Mag::from_f64(scale * 10f64.powf(6.0 - digits as f64)));
            return Ok(Located {
                chart: format!("disc({:.6e},{:.6e};1e-6)", c.t0.0, c.t0.1),
                t0: c.t0,
                branch_form: bf,
                branch_height: (bf.0.max(bf.2) as f64).sqrt(),
                t: t.repr(),
                newton_trace: trace,
                digits,
            });
        }
        if s > 0.0 {
            break;
        }
    }
    Err(Error::RaisePrecision(format!("Newton did not converge from t0 = {:?}", c.t0)))
}

/// Run `stage` at successive schedule entries from `from`, retrying once.
fn with_retry<T>(sched: &[u32], from: usize, mut stage: impl FnMut(u32) -> Result<T, Error>) -> Result<T, Error> {
    let first = stage(sched[from]);
    match (first, sched.get(from + 1)) {
        (Ok(v), _) => Ok(v),
        (Err(_), Some(&d)) => stage(d),
        (Err(e), None) => Err(e),
    }
}

fn certify_candidate(fam: &HyperellipticFamily, c: &Candidate, cfg: &ScanConfig, bound: u64) -> Result<ScanRecord, Error> {
    let sched = &cfg.precision;
    let located = with_retry(sched, 0, |d| locate(c, d))?;
    let t = CBall::from_repr(&located.t, bits_for_digits(located.digits) + 32)?;
    let detected = with_retry(sched, 0, |d| {
        let e = detect_endomorphisms_at(fam, &t, bound, d)?;
        center_discriminant(&e)
    })?;
    if detected.value != c.disc {
        return Err(Error::InvalidInput(format!("detected discriminant {} for candidate {}", detected.value, c.disc)));
    }
    let exact = legendre_parameter(&t, detected.value)?;
    let cert = certify_cm(fam, &exact, bound, cfg.top_digits())?;
    if cert.disc_center != c.disc {
        return Err(Error::InvalidInput(format!("certificate discriminant {} for candidate {}", cert.disc_center, c.disc)));
    }
    Ok(ScanRecord { disc: c.disc, form: c.form, located, certificate: cert })
}

fn excluded_discs(cfg: &ScanConfig) -> Vec<String> {
    let (x0, x1, y0, y1) = cfg.region.bbox();
    [(0.0, 0.0), (1.0, 0.0)]
        .iter()
        .filter(|s| {
            let dx = (x0 - s.0).max(s.0 - x1).max(0.0);
            let dy = (y0 - s.1).max(s.1 - y1).max(0.0);
            cfg.exclude > 0.0 && dx.hypot(dy) < cfg.exclude
        })
        .map(|s| format!("disc({},{};{})", s.0, s.1, cfg.exclude))
        .collect()
}

pub fn scan(cfg: &ScanConfig) -> Result<ScanReport, CliError> {
    cfg.validate()?;
    let fam = cfg.load_family()?;
    let bound = cfg.disc_bound.max(50) as u64;
    let mut report = ScanReport {
        family: fam.label().to_string(),
        region: region_label(&cfg.region),
        exclude: cfg.exclude,
        excluded: excluded_discs(cfg),
        disc_bound: cfg.disc_bound,
        endomorphism_bound: bound,
        precision: cfg.precision.clone(),
        seed: cfg.seed,
        candidates: 0,
        certificates: vec![],
        unresolved: vec![],
        shapes: None,
        shape_note: None,
        complete: true,
    };
    if fam.label() != "legendre" || fam.genus() != 1 {
        report.unresolved.push(Unresolved {
            region: report.region.clone(),
            reason: "CM candidate enumeration is implemented for the Legendre family only".into(),
        });
        report.complete = false;
        return Ok(report);
    }
    let cands = candidates(cfg);
    report.candidates = cands.len();
    let results: Vec<(Candidate, Result<ScanRecord, Error>)> =
        cands.into_par_iter().map(|c| { let r = certify_candidate(&fam, &c, cfg, bound); (c, r) }).collect();
    for (c, r) in results {
        match r {
            Ok(rec) => report.certificates.push(rec),
            Err(e) => report.unresolved.push(Unresolved {
                region: format!("disc({:.6e},{:.6e};1e-6)", c.t0.0, c.t0.1),
                reason: format!("D = {}: {e}", c.disc),
            }),
        }
    }
    report.certificates.sort_by(|a, b| {
        (a.disc.abs(), a.located.t0.0, a.located.t0.1)
            .partial_cmp(&(b.disc.abs(), b.located.t0.0, b.located.t0.1))
            .expect("finite")
    });
    report.complete = report.unresolved.is_empty();
    let certs: Vec<CmCertificate> = report.certificates.iter().map(|r| r.certificate.clone()).collect();
    match check_inequality_shapes(&certs) {
        Ok(s) => report.shapes = Some(s),
        Err(e) => report.shape_note = Some(e.to_string()),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_transport_matches_action() {
        let f = (1, 1, 6);
        let m: Mat = [[2, 1], [1, 1]];
        let z = act_f64(&m, form_point(f, 64).to_c64());
        let w = form_point(transform_form(f, &m), 64).to_c64();
        assert!((z.0 - w.0).abs() < 1e-12 && (z.1 - w.1).abs() < 1e-12);
    }

    #[test]
    fn lambda_at_i_is_half() {
        let l = lambda_of(&CBall::i(128)).to_c64();
        assert!((l.0 - 0.5).abs() < 1e-15 && l.1.abs() < 1e-15);
        let orbit = anharmonic(l);
        for want in [(-1.0, 0.0), (2.0, 0.0), (0.5, 0.0)] {
            assert!(orbit.iter().any(|z| (z.0 - want.0).hypot(z.1 - want.1) < 1e-12));
        }
    }

    #[test]
    fn reduction_tracks_matrix() {
        let z = (0.37, 0.05);
        let (m, r) = reduce_sl2(z);
        let w = act_f64(&m, z);
        assert!((w.0 - r.0).abs() < 1e-9 && (w.1 - r.1).abs() < 1e-9);
        assert!(r.0.abs() <= 0.5 + 1e-12 && r.0 * r.0 + r.1 * r.1 >= 1.0 - 1e-9);
    }
}
