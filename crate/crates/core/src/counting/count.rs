//! count_points: plan a chart cover, certify every chart, then locate the
//! low-height points on the listed hypersurfaces.

use rayon::prelude::*;
use serde::Serialize;

use super::cusp::{
    cover_plan, degenerate_interpolate, legendre_cusp_tau, Chart, ChartShape, ChartTag, CuspData, Region,
};
use super::interpolate::{
    pvalent_interpolate, ChartStatus, Constants, Hypersurface, InterpolateOptions, InterpolationCertificate, Provenance,
};
use super::model::{mag_exp, Model};
use super::oracle::{candidates_in, estimate_candidates, plausible_low, recognize_low, CBox, Candidate};
use super::tuple::{AnalyticTuple, Disc, Func};
use super::valency::{model_fn, winding_number};
use crate::arith::{CBall, CBallRepr, Mag};
use crate::cm::algebraic::AlgebraicRepr;
use crate::cm::AlgebraicNumber;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct CountOptions {
    pub digits: u32,
    pub seed: u64,
    /// Valency to claim on disc charts (computed when absent).
    pub p: Option<u32>,
    /// Largest coefficient sweep attempted on one chart.
    pub sweep_cap: f64,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions { digits: 60, seed: 1, p: None, sweep_cap: 4e6 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FoundPoint {
    pub t: CBallRepr,
    /// (log|t − s|, arg) on cusp charts; (Re t, Im t) otherwise.
    pub coords_t: (f64, f64),
    pub coordinates: Vec<AlgebraicRepr>,
    pub height: f64,
    pub chart: String,
    /// Some listed hypersurface of the chart vanishes at the point.
    pub on_hypersurface: bool,
    #[serde(skip)]
    pub values: Vec<AlgebraicNumber>,
}

impl FoundPoint {
    fn key(&self) -> String {
        let mut k: Vec<String> = self.coordinates.iter().map(|c| c.minpoly.join(",")).collect();
        k.push(format!("{:.9e},{:.9e}", self.coords_t.0, self.coords_t.1));
        k.join(";")
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CountReport {
    pub n: usize,
    pub points: Vec<FoundPoint>,
    pub certificate: InterpolationCertificate,
    pub charts: usize,
    pub cusp_charts: usize,
    pub unresolved: Vec<String>,
    pub complete: bool,
}

struct ChartOutcome {
    cert: InterpolationCertificate,
    points: Vec<FoundPoint>,
    unresolved: Vec<String>,
}

/// All points of the tuple's image over `region` whose coordinates have
/// degree ≤ k and height ≤ H, with the certificate bundle.
#[allow(clippy::too_many_arguments)]
pub fn count_points(
    tuple: &AnalyticTuple,
    region: &Region,
    sigma: &[(f64, f64)],
    cusps: &[CuspData],
    height: f64,
    epsilon: f64,
    k: u32,
    opts: &CountOptions,
) -> Result<CountReport> {
    let cover = cover_plan(sigma, region, height, epsilon, k, cusps)?;
    let outcomes: Vec<Result<ChartOutcome>> =
        cover.charts.par_iter().map(|c| chart_outcome(tuple, c, height, epsilon, k, opts)).collect();
    let consts = Constants::new(tuple.dim(), opts.p.unwrap_or(1), epsilon, height, k);
    let claim = format!("every image point over the region with coordinates of degree <= {k} and height <= {height} lies on a listed hypersurface");
    let mut cert = InterpolationCertificate::empty(consts, opts.seed, claim);
    let mut points: Vec<FoundPoint> = vec![];
    let mut unresolved = vec![];
    for o in outcomes {
        let o = o?;
        cert.merge(&o.cert);
        unresolved.extend(o.unresolved);
        for p in o.points {
            let (x, y) = t_f64(&p);
            if !region.contains(x, y) || points.iter().any(|q| same_point(q, &p)) {
                continue;
            }
            points.push(p);
        }
    }
    points.sort_by(|a, b| a.key().cmp(&b.key()));
    cert.complete &= unresolved.is_empty();
    Ok(CountReport {
        n: points.len(),
        complete: cert.complete,
        points,
        certificate: cert,
        charts: cover.charts.len(),
        cusp_charts: cover.cusp_charts(),
        unresolved,
    })
}

fn t_f64(p: &FoundPoint) -> (f64, f64) {
    let re: f64 = p.t.re.parse().unwrap_or(0.0);
    let im: f64 = p.t.im.parse().unwrap_or(0.0);
    (re, im)
}

fn same_point(a: &FoundPoint, b: &FoundPoint) -> bool {
    let coords = a.coordinates.iter().zip(&b.coordinates).all(|(x, y)| x.minpoly == y.minpoly);
    let (ax, ay) = t_f64(a);
    let (bx, by) = t_f64(b);
    let scale = ax.hypot(ay).max(bx.hypot(by)).max(1e-300);
    coords && (ax - bx).hypot(ay - by) <= 1e-9 * scale && (a.coords_t.1 - b.coords_t.1).abs() < 1e-9
}

fn unresolved_outcome(chart: &Chart, consts: Constants, seed: u64, note: String) -> ChartOutcome {
    let mut cert = InterpolationCertificate::empty(consts, seed, String::new());
    let label = chart.label();
    cert.add(
        Provenance {
            chart: label.clone(),
            tag: chart.tag.as_str().into(),
            disc: None,
            status: ChartStatus::Unresolved,
            hypersurface: None,
            log10_sup: None,
            log10_threshold: None,
            note: note.clone(),
        },
        None,
    );
    ChartOutcome { cert, points: vec![], unresolved: vec![format!("{label}: {note}")] }
}

fn recoverable(e: &Error) -> bool {
    !matches!(e, Error::ValencyViolated(_) | Error::InvalidInput(_))
}

fn chart_outcome(
    tuple: &AnalyticTuple,
    chart: &Chart,
    height: f64,
    epsilon: f64,
    k: u32,
    opts: &CountOptions,
) -> Result<ChartOutcome> {
    let consts = Constants::new(tuple.dim(), opts.p.unwrap_or(1), epsilon, height, k);
    match (&chart.shape, &chart.tag) {
        (ChartShape::Disc { disc }, _) => match disc_chart(tuple, chart, disc, height, epsilon, k, opts) {
            Err(e) if recoverable(&e) => Ok(unresolved_outcome(chart, consts, opts.seed, e.to_string())),
            r => r,
        },
        (ChartShape::Annulus { center, log_in, log_out }, ChartTag::CuspAnnulusDegenerate) => {
            let Some(powers) = tau_powers(tuple) else {
                return Ok(unresolved_outcome(chart, consts, opts.seed, "no cusp model for this tuple".into()));
            };
            if center.0.hypot(center.1) > 1e-12 {
                return Ok(unresolved_outcome(chart, consts, opts.seed, "no series model at this cusp".into()));
            }
            match legendre_annulus_chart(&powers, chart, *log_in, *log_out, height, epsilon, k, opts) {
                Err(e) if recoverable(&e) => Ok(unresolved_outcome(chart, consts, opts.seed, e.to_string())),
                r => r,
            }
        }
        (ChartShape::PuncturedDisc { .. } | ChartShape::Annulus { .. }, _) if chart.note.starts_with("no points") => {
            let mut cert = InterpolationCertificate::empty(consts, opts.seed, String::new());
            cert.add(
                Provenance {
                    chart: chart.label(),
                    tag: chart.tag.as_str().into(),
                    disc: None,
                    status: ChartStatus::NoPoints,
                    hypersurface: None,
                    log10_sup: None,
                    log10_threshold: None,
                    note: chart.note.clone(),
                },
                None,
            );
            Ok(ChartOutcome { cert, points: vec![], unresolved: vec![] })
        }
        _ => Ok(unresolved_outcome(chart, consts, opts.seed, chart.note.clone())),
    }
}

fn tau_powers(tuple: &AnalyticTuple) -> Option<Vec<u32>> {
    let p: Vec<u32> = tuple.funcs.iter().filter_map(|f| if let Func::Tau(n) = f { Some(*n) } else { None }).collect();
    (p.len() == tuple.dim() && p[0] == 1).then_some(p)
}

#[allow(clippy::too_many_arguments)]
fn disc_chart(tuple: &AnalyticTuple, chart: &Chart, disc: &Disc, height: f64, epsilon: f64, k: u32, opts: &CountOptions) -> Result<ChartOutcome> {
    let outer = disc.scaled(2.0);
    let iopts = InterpolateOptions { digits: opts.digits, seed: opts.seed, tag: chart.tag.as_str().into() };
    let cert = pvalent_interpolate(tuple, &outer, opts.p, height, epsilon, k, &iopts)?;
    let models = tuple.disc_models(&outer, opts.digits)?;
    let mut points = vec![];
    let mut unresolved = vec![];
    for prov in &cert.provenance {
        match (&prov.status, prov.disc, prov.hypersurface) {
            (ChartStatus::Certified, Some(sub), Some(i)) => {
                let h = &cert.hypersurfaces[i];
                let g = h.eval_models(&models);
                let found = if vanishes_identically(&g) {
                    sweep_disc(&models, outer.center, &sub, height, k, opts.sweep_cap)
                } else {
                    zeros_on_image(&models, &g, outer.center, &sub, height, k)
                };
                match found {
                    Ok(ps) => points.extend(ps.into_iter().map(|mut p| {
                        p.on_hypersurface = h.eval(&p.values.iter().map(|a| a.root.clone()).collect::<Vec<_>>()).contains_zero();
                        p.chart = prov.chart.clone();
                        p
                    })),
                    Err(e) => unresolved.push(format!("{}: {e}", prov.chart)),
                }
            }
            (ChartStatus::Unresolved, _, _) => unresolved.push(format!("{}: {}", prov.chart, prov.note)),
            _ => {}
        }
    }
    Ok(ChartOutcome { cert, points, unresolved })
}

fn vanishes_identically(g: &Model) -> bool {
    g.coeffs.iter().flatten().all(CBall::contains_zero)
}

fn c64(b: &CBall) -> (f64, f64) {
    b.to_c64()
}

/// f64 copies of the Taylor coefficients, for a fast Newton phase.
fn f64_coeffs(m: &Model) -> Vec<(f64, f64)> {
    m.coeffs[0].iter().map(c64).collect()
}

fn horner(c: &[(f64, f64)], w: (f64, f64)) -> ((f64, f64), (f64, f64)) {
    let (mut v, mut d) = ((0.0, 0.0), (0.0, 0.0));
    for &a in c.iter().rev() {
        d = (d.0 * w.0 - d.1 * w.1 + v.0, d.0 * w.1 + d.1 * w.0 + v.1);
        v = (v.0 * w.0 - v.1 * w.1 + a.0, v.0 * w.1 + v.1 * w.0 + a.1);
    }
    (v, d)
}

fn cdiv(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
    let n = b.0 * b.0 + b.1 * b.1;
    ((a.0 * b.0 + a.1 * b.1) / n, (a.1 * b.0 - a.0 * b.1) / n)
}

/// Exact value of a candidate as a ball.
pub fn candidate_ball(c: &Candidate, prec: u32) -> Result<CBall> {
    match c.minpoly.len() {
        2 => Ok(CBall::from_int(-c.minpoly[0], prec).div_int(c.minpoly[1])),
        3 => {
            let (cc, b, a) = (c.minpoly[0], c.minpoly[1], c.minpoly[2]);
            let s = CBall::from_int(b * b - 4 * a * cc, prec).sqrt()?;
            let r1 = CBall::from_int(-b, prec).add(&s).div_int(2 * a);
            let r2 = CBall::from_int(-b, prec).sub(&s).div_int(2 * a);
            let d = |r: &CBall| {
                let (x, y) = r.to_c64();
                (x - c.value.0).hypot(y - c.value.1)
            };
            Ok(if d(&r1) <= d(&r2) { r1 } else { r2 })
        }
        _ => Err(Error::InvalidInput("candidate degree".into())),
    }
}

fn make_point(t: CBall, coords_t: (f64, f64), vals: Vec<AlgebraicNumber>) -> FoundPoint {
    let height = vals.iter().map(|a| a.height).fold(1.0, f64::max);
    FoundPoint {
        t: t.repr(),
        coords_t,
        coordinates: vals.iter().map(AlgebraicNumber::repr).collect(),
        height,
        chart: String::new(),
        on_hypersurface: false,
        values: vals,
    }
}

fn recognize_all(vals: &[CBall], k: u32, height: f64) -> Option<Vec<AlgebraicNumber>> {
    vals.iter().map(|v| recognize_low(v, k, height)).collect()
}

/// Brute-force sweep of one coordinate's candidates over a disc, each
/// solved for t by Newton and filtered by recognition of the others.
pub fn sweep_disc(models: &[Model], center: (f64, f64), sub: &Disc, height: f64, k: u32, cap: f64) -> Result<Vec<FoundPoint>> {
    let prec = models[0].prec();
    let fc: Vec<Vec<(f64, f64)>> = models.iter().map(f64_coeffs).collect();
    let g = 4;
    let side = 2.0 * sub.radius / g as f64;
    let mut out: Vec<FoundPoint> = vec![];
    let mut budget = cap;
    for i in 0..g {
        for j in 0..g {
            let cx = sub.center.0 - sub.radius + side * (i as f64 + 0.5);
            let cy = sub.center.1 - sub.radius + side * (j as f64 + 0.5);
            let cr = side * std::f64::consts::FRAC_1_SQRT_2;
            if (cx - sub.center.0).hypot(cy - sub.center.1) > sub.radius + cr {
                continue;
            }
            let w = CBall::from_f64(cx - center.0, cy - center.1, prec).with_rad(Mag::from_f64(cr));
            let boxes: Vec<CBox> = models.iter().map(|m| CBox::from_ball(&m.eval_ball(&w))).collect();
            if k == 1 && boxes.iter().any(|b| !b.meets_real()) {
                continue;
            }
            // prefer coordinates without critical points on the cell, so
            // Newton converges quadratically to simple roots
            let regular: Vec<bool> = models.iter().map(|m| !derivative(m).eval_ball(&w).contains_zero()).collect();
            let any_regular = regular.iter().any(|r| *r);
            let (s, est) = boxes
                .iter()
                .enumerate()
                .filter(|(s, _)| regular[*s] || !any_regular)
                .map(|(s, b)| (s, estimate_candidates(b, height, k)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            budget -= est;
            if budget < 0.0 {
                return Err(Error::IncreaseSubdivision(format!("disc sweep exceeds the cap {cap:.0e}")));
            }
            for cand in candidates_in(&boxes[s], height, k, cap)? {
                let target = candidate_ball(&cand, prec)?;
                let Some(wz) = newton_disc(&models[s], &fc[s], (cx - center.0, cy - center.1), cand.value, &target, cr) else {
                    continue;
                };
                let (tx, ty) = c64(&wz);
                let t = (tx + center.0, ty + center.1);
                if !sub.contains(t.0, t.1) {
                    continue;
                }
                let vals: Vec<CBall> = models.iter().map(|m| m.eval(&wz, None)).collect();
                let Some(alg) = recognize_all(&vals, k, height) else { continue };
                let tb = wz.add(&CBall::from_f64(center.0, center.1, prec));
                let p = make_point(tb, t, alg);
                if !out.iter().any(|q| same_point(q, &p)) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

fn derivative(m: &Model) -> Model {
    let row: Vec<CBall> = m.coeffs[0].iter().enumerate().skip(1).map(|(k, c)| c.mul_int(k as i64)).collect();
    let row = if row.is_empty() { vec![CBall::zero(m.prec())] } else { row };
    // the remainder of f′ is not controlled by that of f; the choice is a
    // heuristic only
    Model::taylor(row, m.r.clone(), m.order.saturating_sub(1), Mag::zero())
}

/// Newton for f(w) = ξ from w0: f64 phase, then ball-midpoint refinement.
fn newton_disc(m: &Model, fc: &[(f64, f64)], w0: (f64, f64), xi: (f64, f64), target: &CBall, cr: f64) -> Option<CBall> {
    let mut w = w0;
    let mut ok = false;
    for _ in 0..60 {
        let (v, d) = horner(fc, w);
        if d.0 == 0.0 && d.1 == 0.0 {
            return None;
        }
        let step = cdiv((v.0 - xi.0, v.1 - xi.1), d);
        w = (w.0 - step.0, w.1 - step.1);
        if (w.0 - w0.0).hypot(w.1 - w0.1) > 3.0 * cr {
            return None;
        }
        if step.0.hypot(step.1) < 1e-14 * (1.0 + w.0.hypot(w.1)) {
            ok = true;
            break;
        }
    }
    if !ok {
        return None;
    }
    let prec = m.prec();
    let mut wb = CBall::from_f64(w.0, w.1, prec);
    for _ in 0..8 {
        let v = m.eval(&wb.mid(), None).mid().sub(target).mid();
        let d = m.derivative_mid(&wb);
        let step = v.div(&d).ok()?.mid();
        wb = wb.sub(&step).mid();
        if step.abs_upper().log10() < -(prec as f64) * 0.29 {
            break;
        }
    }
    Some(wb)
}

/// Zeros of g = P∘f on the disc by winding numbers and subdivision, then
/// recognition of the coordinates there.
fn zeros_on_image(models: &[Model], g: &Model, center: (f64, f64), sub: &Disc, height: f64, k: u32) -> Result<Vec<FoundPoint>> {
    let prec = 64.max(g.prec() / 2);
    let gc = g.coarsen(prec);
    let f = model_fn(&gc, center);
    let fc = f64_coeffs(g);
    let zero = CBall::zero(prec);
    let mut out: Vec<FoundPoint> = vec![];
    let mut stack = vec![(*sub, 0u32)];
    while let Some((d, depth)) = stack.pop() {
        let n = winding_number(&f, &zero, d.center, d.radius, prec).or_else(|_| winding_number(&f, &zero, d.center, d.radius * 1.02, prec))?;
        if n <= 0 {
            continue;
        }
        let w0 = (d.center.0 - center.0, d.center.1 - center.1);
        if n == 1 {
            if let Some(wz) = newton_disc(g, &fc, w0, (0.0, 0.0), &CBall::zero(g.prec()), d.radius) {
                let (x, y) = c64(&wz);
                if (x - w0.0).hypot(y - w0.1) <= d.radius * 1.05 {
                    let t = (x + center.0, y + center.1);
                    if sub.contains(t.0, t.1) {
                        let vals: Vec<CBall> = models.iter().map(|m| m.eval(&wz, None)).collect();
                        if let Some(alg) = recognize_all(&vals, k, height) {
                            let p = make_point(wz.add(&CBall::from_f64(center.0, center.1, g.prec())), t, alg);
                            if !out.iter().any(|q| same_point(q, &p)) {
                                out.push(p);
                            }
                        }
                    }
                    continue;
                }
            }
        }
        if depth >= 12 {
            return Err(Error::IncreaseSubdivision("zero isolation depth cap".into()));
        }
        let q = d.radius * 0.5;
        for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            stack.push((Disc::new(d.center.0 + sx * q * 0.75, d.center.1 + sy * q * 0.75, q * 1.1), depth + 1));
        }
    }
    Ok(out)
}

/// (τ^{n_1}, …) on a Legendre cusp annulus at 0.
#[allow(clippy::too_many_arguments)]
fn legendre_annulus_chart(
    powers: &[u32],
    chart: &Chart,
    log_in: f64,
    log_out: f64,
    height: f64,
    epsilon: f64,
    k: u32,
    opts: &CountOptions,
) -> Result<ChartOutcome> {
    let r = mag_exp(-log_in);
    let ell = Mag::from_f64(log_out + std::f64::consts::PI);
    let tau = legendre_cusp_tau(&r, &ell, opts.digits)?;
    let pows: Vec<Model> = powers.iter().map(|&n| tau.pow(n)).collect();
    let label = chart.label();
    let mut cert = degenerate_interpolate(&pows, &label, opts.p.unwrap_or(1), height, epsilon, k)?;
    cert.seed = opts.seed;
    let h: Hypersurface = cert.hypersurfaces[0].clone();
    let mut points = sweep_legendre_annulus(&tau, powers, log_in, log_out, height, k, opts.sweep_cap)?;
    for p in points.iter_mut() {
        p.on_hypersurface = h.eval(&p.values.iter().map(|a| a.root.clone()).collect::<Vec<_>>()).contains_zero();
        p.chart = label.clone();
    }
    Ok(ChartOutcome { cert, points, unresolved: vec![] })
}

/// sup |τ − (i/π)(log 16 − L)| on the model's disc.
fn q_bound(tau: &Model) -> f64 {
    let mut row = tau.coeffs[0].clone();
    row[0] = CBall::zero(tau.prec());
    let q = Model::taylor(row, tau.r.clone(), tau.order, tau.err.clone());
    q.bound().to_f64()
}

/// Sweep of the cheapest coordinate over τ-rectangles covering the chart
/// (Re τ = arg t/π + O(δ), Im τ = (ℓ + log 16)/π + O(δ)), then Newton in
/// L = log t from L₀ = log 16 + iπτ.
pub fn sweep_legendre_annulus(tau: &Model, powers: &[u32], log_in: f64, log_out: f64, height: f64, k: u32, cap: f64) -> Result<Vec<FoundPoint>> {
    let pi = std::f64::consts::PI;
    let delta = q_bound(tau) * (1.0 + 1e-9) + 1e-12;
    let ln16 = 16f64.ln();
    let y_lo = (log_in + ln16) / pi - delta;
    // H(τ^m) = H(τ)^m ≤ H for every listed m, so H(τ^n) ≤ H^{n/max m}
    let pmax = *powers.iter().max().expect("nonempty powers") as f64;
    let heff = |n: u32| height.powf(n as f64 / pmax);
    // |τ| ≤ M(τ) ≤ H(τ)^k; a non-real τ has τ̄ among its conjugates, so
    // then |τ|² ≤ M(τ)
    let e = if y_lo > 0.0 { 0.5 } else { 1.0 };
    let top = height.powf(e * k as f64 / pmax);
    let y_hi = ((log_out + ln16) / pi + delta).min(top);
    if y_lo > y_hi {
        return Ok(vec![]);
    }
    let mut rects = vec![(-1.0 - delta, 1.0 + delta, y_lo, y_hi, 0u32)];
    let mut work = vec![];
    let mut total = 0.0;
    while let Some((x0, x1, y0, y1, depth)) = rects.pop() {
        let tb = CBox::new(x0, x1, y0, y1);
        let (s, est) = powers
            .iter()
            .enumerate()
            .map(|(s, &n)| (s, estimate_candidates(&tb.pow(n), heff(n), k)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        if est > 2e4 && depth < 24 {
            if (y1 - y0) > (x1 - x0) * y0.max(1.0) {
                let ym = 0.5 * (y0 + y1);
                rects.push((x0, x1, y0, ym, depth + 1));
                rects.push((x0, x1, ym, y1, depth + 1));
            } else {
                let xm = 0.5 * (x0 + x1);
                rects.push((x0, xm, y0, y1, depth + 1));
                rects.push((xm, x1, y0, y1, depth + 1));
            }
            continue;
        }
        total += est;
        if total > cap {
            return Err(Error::IncreaseSubdivision(format!("cusp sweep exceeds the cap {cap:.0e}")));
        }
        work.push((tb, s));
    }
    let prec = tau.prec();
    let mut out: Vec<FoundPoint> = vec![];
    for (tb, s) in work {
        let n = powers[s];
        for cand in candidates_in(&tb.pow(n), heff(n), k, cap)? {
            if !plausible_powers(cand.value, n, powers, &tb, k, height) {
                continue;
            }
            let xi = candidate_ball(&cand, prec)?;
            for root in nth_roots(&xi, n)? {
                let (x, y) = root.to_c64();
                if !tb.contains(x, y) {
                    continue;
                }
                // the coordinates are powers of τ: test them before solving for t
                let exact: Vec<CBall> = powers.iter().map(|&m| root.pow(m)).collect();
                if recognize_all(&exact, k, height).is_none() {
                    continue;
                }
                let Some((l, w)) = newton_log(tau, &root) else { continue };
                let (lre, lim) = l.to_c64();
                if -lre < log_in || -lre > log_out {
                    continue;
                }
                // t on the cut belongs to the upper side (arg = π)
                if lim <= -pi + 1e-12 || lim > pi + 1e-12 || (lim > pi - 1e-12 && x < 0.0) {
                    continue;
                }
                let tv = tau.eval(&w, Some(&l));
                let vals: Vec<CBall> = powers.iter().map(|&m| tv.pow(m)).collect();
                let Some(alg) = recognize_all(&vals, k, height) else { continue };
                let p = make_point(w, (lre, lim), alg);
                if !out.iter().any(|q| same_point(q, &p)) {
                    out.push(p);
                }
            }
        }
    }
    Ok(out)
}

/// f64 prefilter: some n-th root of ξ in the rectangle has all its
/// powers plausibly of low degree and height.
fn plausible_powers(xi: (f64, f64), n: u32, powers: &[u32], tb: &CBox, k: u32, height: f64) -> bool {
    let (r, th) = (xi.0.hypot(xi.1), xi.1.atan2(xi.0));
    (0..n).any(|j| {
        let a = (th + std::f64::consts::TAU * j as f64) / n as f64;
        let rr = r.powf(1.0 / n as f64);
        let (x, y) = (rr * a.cos(), rr * a.sin());
        let slack = 1e-9 * rr.max(1.0);
        let inside = CBox::new(tb.x0 - slack, tb.x1 + slack, tb.y0 - slack, tb.y1 + slack).contains(x, y);
        inside
            && powers.iter().all(|&m| {
                let (pr, pa) = (rr.powi(m as i32), a * m as f64);
                plausible_low((pr * pa.cos(), pr * pa.sin()), k, height)
            })
    })
}

fn nth_roots(x: &CBall, n: u32) -> Result<Vec<CBall>> {
    if n == 1 {
        return Ok(vec![x.clone()]);
    }
    if n == 2 {
        let r = x.sqrt()?;
        return Ok(vec![r.neg(), r]);
    }
    let prec = x.prec();
    let l = x.log()?.div_int(n as i64);
    let base = l.exp();
    let tau = CBall::pi(prec).mul_int(2).div_int(n as i64);
    Ok((0..n)
        .map(|j| {
            let th = tau.mul_int(j as i64).re_ball();
            base.mul(&CBall::cis(&th))
        })
        .collect())
}

/// Solve τ(e^L, L) = target; returns (L, e^L).
fn newton_log(tau: &Model, target: &CBall) -> Option<(CBall, CBall)> {
    let prec = tau.prec();
    let pi = CBall::pi(prec);
    let i_pi = CBall::i(prec).mul(&pi);
    let ln16 = CBall::from_int(16, prec).log().ok()?;
    let mut l = ln16.add(&i_pi.mul(target)).mid();
    let dl0 = CBall::i(prec).div(&pi).ok()?.neg();
    for _ in 0..40 {
        let w = l.exp().mid();
        if !w.abs_upper().le(&tau.r.mul_f64(1.0 + 1e-9)) {
            return None;
        }
        let v = tau.eval(&w, Some(&l)).mid().sub(target).mid();
        let d = dl0.add(&w.mul(&tau.derivative_mid(&w)));
        let step = v.div(&d).ok()?.mid();
        l = l.sub(&step).mid();
        if step.abs_upper().log10() < -(prec as f64) * 0.28 {
            let w = l.exp();
            return Some((l, w));
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_counts_match_enumeration() {
        let t = AnalyticTuple::parabola();
        let region = Region::Rect { x0: -0.6, x1: 0.6, y0: -0.3, y1: 0.3 };
        let opts = CountOptions { p: Some(2), digits: 40, ..Default::default() };
        let rep = count_points(&t, &region, &[], &[], 100.0, 0.5, 1, &opts).unwrap();
        assert!(rep.complete, "{:?}", rep.unresolved);
        // p/q with max(p², q²) ≤ 100, |p/q| ≤ 0.6
        let mut want = 0;
        for q in 1..=10i64 {
            for p in -10i64..=10 {
                if gcd(p, q) == 1 && (p as f64 / q as f64).abs() <= 0.6 {
                    want += 1;
                }
            }
        }
        assert_eq!(rep.n, want);
        assert!(rep.points.iter().all(|p| p.on_hypersurface));
    }

    #[test]
    fn legendre_cusp_window_points() {
        let cusps = crate::counting::cusp::legendre_cusps(25.0, 2).unwrap();
        let region = Region::Annulus { center: (0.0, 0.0), r_in: 0.0, r_out: 1e-4 };
        let rep = count_points(&AnalyticTuple::legendre(), &region, &[(0.0, 0.0), (1.0, 0.0)], &cusps, 25.0, 0.5, 2, &CountOptions::default()).unwrap();
        assert!(rep.complete);
        assert!(rep.points.iter().all(|p| p.on_hypersurface));
        // oracle: τ = (−b + i√(c·4a − b²))/2a with max(a, c) ≤ 25, Re τ ∈ (−1, 1],
        // |λ(τ)| < 1e-4 by the q-product
        let lambda_abs = |re: f64, im: f64| {
            let q = (-std::f64::consts::PI * im).exp();
            let arg = std::f64::consts::PI * re;
            let qn = |n: i32| (q.powi(n) * (n as f64 * arg).cos(), q.powi(n) * (n as f64 * arg).sin());
            let mut r = 16.0 * q;
            for n in 1..40 {
                let (a, b) = qn(2 * n);
                let (c, d) = qn(2 * n - 1);
                r *= ((1.0 + a).hypot(b) / (1.0 + c).hypot(d)).powi(8);
            }
            r
        };
        let mut want = 0;
        for a in 1..=25i64 {
            for c in 1..=25i64 {
                for b in -2 * a..=2 * a {
                    let d = 4 * a * c - b * b;
                    let (re, im) = (-b as f64 / (2 * a) as f64, (d as f64).sqrt() / (2 * a) as f64);
                    if d > 0 && gcd(gcd(a, b), c) == 1 && re > -1.0 && re <= 1.0 && lambda_abs(re, im) < 1e-4 {
                        want += 1;
                    }
                }
            }
        }
        assert_eq!(rep.n, want);
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a.abs() } else { gcd(b, a % b) }
    }

    #[test]
    fn no_low_points_nonempty_certificate() {
        // e^{iz} is non-real on the real segment: no rational points
        let t = AnalyticTuple::new(vec![Func::Poly(crate::poly::QPoly::x()), Func::Exp { re: 0.0, im: 1.0 }]);
        let region = Region::Rect { x0: 0.2, x1: 0.6, y0: -0.1, y1: 0.1 };
        let rep = count_points(&t, &region, &[], &[], 20.0, 0.5, 1, &CountOptions { p: Some(1), digits: 40, ..Default::default() }).unwrap();
        assert_eq!(rep.n, 0);
        assert!(!rep.certificate.provenance.is_empty());
    }
}
