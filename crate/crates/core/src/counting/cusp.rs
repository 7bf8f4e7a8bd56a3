//! Charts near singular points.  Around each s ∈ Σ a punctured disc is cut
//! into annuli, uniform in ℓ = log(1/|t − s|) on a doubling scale.  Annuli
//! on which some coordinate has a nonzero leading exponent are "dominant":
//! low-height points sit in a sub-annulus of log-width O(log H), covered by
//! ordinary discs.  When every exponent is zero the annulus is "degenerate"
//! and carries the relation among the leading log-polynomials.

use rug::{Integer, Rational};
use serde::Serialize;

use super::interpolate::{certify_on, ChartStatus, Constants, Hypersurface, InterpolationCertificate, Provenance};
use super::model::{mag_exp, Model};
use super::tuple::Disc;
use crate::arith::{bits_for_digits, CBall, Mag};
use crate::connection::Singularity;
use crate::error::{Error, Result};
use crate::periods::legendre_connection;

/// Radius of the punctured discs at 0 and 1 for Legendre.
pub const LEGENDRE_CUSP_RADIUS: f64 = 0.25;
/// Cap on the number of annuli around one point.
pub const MAX_ANNULI: usize = 64;
/// Cap on interior quadtree depth.
pub const MAX_DEPTH: u32 = 14;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Region {
    Rect { x0: f64, x1: f64, y0: f64, y1: f64 },
    /// r_in ≤ |t − center| ≤ r_out; r_in = 0 gives a disc.
    Annulus { center: (f64, f64), r_in: f64, r_out: f64 },
}

impl Region {
    pub fn contains(&self, x: f64, y: f64) -> bool {
        match *self {
            Region::Rect { x0, x1, y0, y1 } => x0 <= x && x <= x1 && y0 <= y && y <= y1,
            Region::Annulus { center, r_in, r_out } => {
                let d = (x - center.0).hypot(y - center.1);
                r_in <= d && d <= r_out
            }
        }
    }

    pub fn bbox(&self) -> (f64, f64, f64, f64) {
        match *self {
            Region::Rect { x0, x1, y0, y1 } => (x0, x1, y0, y1),
            Region::Annulus { center: (cx, cy), r_out, .. } => (cx - r_out, cx + r_out, cy - r_out, cy + r_out),
        }
    }

    /// Square cell of half-side h centred at c: entirely outside / inside?
    fn square_outside(&self, c: (f64, f64), h: f64) -> bool {
        match *self {
            Region::Rect { x0, x1, y0, y1 } => c.0 + h < x0 || c.0 - h > x1 || c.1 + h < y0 || c.1 - h > y1,
            Region::Annulus { center, r_in, r_out } => {
                let d = (c.0 - center.0).hypot(c.1 - center.1);
                d - h * std::f64::consts::SQRT_2 > r_out || d + h * std::f64::consts::SQRT_2 < r_in
            }
        }
    }
}

/// Local data at a singular point, per coordinate function.
#[derive(Clone, Debug, Serialize)]
pub struct CuspData {
    pub point: (f64, f64),
    /// Leading exponent λ of each coordinate.
    pub exponents: Vec<f64>,
    /// |leading coefficient| per coordinate (dominant case).
    pub leading_abs: Vec<f64>,
    pub log_degree: usize,
    /// Outer radius of the punctured disc.
    pub radius: f64,
    /// Radius inside which the leading term is certified to dominate
    /// (|f/(c w^λ) − 1| ≤ ½).
    pub domination_radius: f64,
    /// ℓ beyond which no point of height ≤ H lies on the chart, if known.
    pub cutoff_log: Option<f64>,
}

impl CuspData {
    pub fn all_exponents_zero(&self) -> bool {
        self.exponents.iter().all(|l| *l == 0.0)
    }

    /// ℓ-window [ℓ_in, ℓ_max] outside of which a dominant coordinate is too
    /// small or too large for a degree-≤k, height-≤H value:
    /// H^{−k} ≤ |ξ| ≤ H^k and ½|c||w|^λ ≤ |f| ≤ 3/2 |c||w|^λ.
    pub fn dominant_window(&self, height: f64, k: u32) -> Option<f64> {
        let lh = height.ln() * k as f64;
        self.exponents
            .iter()
            .zip(&self.leading_abs)
            .filter(|(l, _)| **l != 0.0)
            .map(|(l, c)| {
                let k0 = (1.5 * c).ln().abs().max((0.5 * c).ln().abs());
                (lh + k0) / l.abs()
            })
            .min_by(|a, b| a.total_cmp(b))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartTag {
    InteriorDisc,
    CuspDisc,
    CuspAnnulusDominant,
    CuspAnnulusDegenerate,
}

impl ChartTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChartTag::InteriorDisc => "interior-disc",
            ChartTag::CuspDisc => "cusp-disc",
            ChartTag::CuspAnnulusDominant => "cusp-annulus-dominant",
            ChartTag::CuspAnnulusDegenerate => "cusp-annulus-degenerate",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "shape", rename_all = "kebab-case")]
pub enum ChartShape {
    /// Certified disc; analytic data live on the doubled disc.
    Disc { disc: Disc },
    /// 0 < |t − s| ≤ e^{−ℓ}.
    PuncturedDisc { center: (f64, f64), log_radius: f64 },
    /// e^{−ℓ_out} ≤ |t − s| ≤ e^{−ℓ_in}, slit along the negative real
    /// direction (principal log; the cut belongs to the upper side).
    Annulus { center: (f64, f64), log_in: f64, log_out: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct Chart {
    pub shape: ChartShape,
    pub tag: ChartTag,
    /// Index of the singular point for cusp charts.
    pub singular: Option<usize>,
    /// Dominant case: log-width of the window holding low-height points.
    pub log_width: Option<f64>,
    pub note: String,
}

impl Chart {
    pub fn label(&self) -> String {
        match &self.shape {
            ChartShape::Disc { disc } => super::interpolate::disc_label(disc),
            ChartShape::PuncturedDisc { center, log_radius } => {
                format!("punctured({:.6e},{:.6e};log={:.6e})", center.0, center.1, log_radius)
            }
            ChartShape::Annulus { center, log_in, log_out } => {
                format!("annulus({:.6e},{:.6e};log={:.6e}..{:.6e})", center.0, center.1, log_in, log_out)
            }
        }
    }

    pub fn contains(&self, x: f64, y: f64) -> bool {
        match &self.shape {
            ChartShape::Disc { disc } => disc.contains(x, y),
            ChartShape::PuncturedDisc { center, log_radius } => {
                let d = (x - center.0).hypot(y - center.1);
                d > 0.0 && -d.ln() >= *log_radius
            }
            ChartShape::Annulus { center, log_in, log_out } => {
                let l = -(x - center.0).hypot(y - center.1).ln();
                *log_in <= l && l <= *log_out
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ChartCover {
    pub charts: Vec<Chart>,
    pub region: Region,
    pub height: f64,
    pub epsilon: f64,
    pub degree_k: u32,
    pub singular: Vec<(f64, f64)>,
}

impl ChartCover {
    pub fn covers(&self, x: f64, y: f64) -> bool {
        self.charts.iter().any(|c| c.contains(x, y))
    }

    pub fn cusp_charts(&self) -> usize {
        self.charts.iter().filter(|c| c.tag != ChartTag::InteriorDisc).count()
    }
}

/// Cover of `region` minus Σ.  Each s ∈ Σ gets a punctured disc (radius
/// from its CuspData, else a quarter of the distance to the rest of Σ);
/// the rest is a quadtree of squares whose circumscribed discs have doubles
/// disjoint from Σ.
pub fn cover_plan(sigma: &[(f64, f64)], region: &Region, height: f64, epsilon: f64, k: u32, cusps: &[CuspData]) -> Result<ChartCover> {
    if height < 1.0 || epsilon <= 0.0 || k == 0 {
        return Err(Error::InvalidInput("need H ≥ 1, ε > 0, k ≥ 1".into()));
    }
    let mut charts = vec![];
    let mut punctures = vec![];
    for (i, &s) in sigma.iter().enumerate() {
        let others = sigma.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, o)| (o.0 - s.0).hypot(o.1 - s.1));
        let sep = others.fold(f64::INFINITY, f64::min);
        let data = cusps.iter().find(|c| (c.point.0 - s.0).hypot(c.point.1 - s.1) < 1e-12);
        let mut rho = data.map_or(0.25 * sep.min(4.0), |d| d.radius).min(0.25 * sep);
        // a window centred at s smaller than the puncture is enough
        if let Region::Annulus { center, r_out, .. } = region {
            if (center.0 - s.0).hypot(center.1 - s.1) < 1e-15 {
                rho = rho.min(*r_out);
            }
        }
        if region_far(region, s, rho) {
            continue;
        }
        punctures.push((s, rho));
        let inner_limit = match region {
            Region::Annulus { center, r_in, .. } if *r_in > 0.0 && (center.0 - s.0).hypot(center.1 - s.1) < 1e-15 => Some(-r_in.ln()),
            _ => None,
        };
        cusp_charts(i, s, rho, data, height, k, inner_limit, &mut charts);
    }
    let (x0, x1, y0, y1) = region.bbox();
    let side = (x1 - x0).max(y1 - y0);
    let mut stack = vec![((0.5 * (x0 + x1), 0.5 * (y0 + y1)), 0.5 * side, 0u32)];
    while let Some((c, h, depth)) = stack.pop() {
        if region.square_outside(c, h) {
            continue;
        }
        let rcirc = h * std::f64::consts::SQRT_2;
        if punctures.iter().any(|(s, rho)| (c.0 - s.0).hypot(c.1 - s.1) + rcirc <= *rho || region_within(region, *s, *rho)) {
            continue;
        }
        let dist = sigma.iter().map(|s| (c.0 - s.0).hypot(c.1 - s.1)).fold(f64::INFINITY, f64::min);
        if 2.0 * rcirc < dist && depth > 0 {
            charts.push(Chart {
                shape: ChartShape::Disc { disc: Disc::new(c.0, c.1, rcirc) },
                tag: ChartTag::InteriorDisc,
                singular: None,
                log_width: None,
                note: String::new(),
            });
            continue;
        }
        if depth >= MAX_DEPTH {
            return Err(Error::IncreaseSubdivision("interior quadtree exceeded its depth cap".into()));
        }
        let q = 0.5 * h;
        for (sx, sy) in [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)] {
            stack.push(((c.0 + sx * q, c.1 + sy * q), q, depth + 1));
        }
    }
    Ok(ChartCover { charts, region: *region, height, epsilon, degree_k: k, singular: sigma.to_vec() })
}

fn region_within(region: &Region, s: (f64, f64), rho: f64) -> bool {
    match region {
        Region::Annulus { center, r_out, .. } => (center.0 - s.0).hypot(center.1 - s.1) + r_out <= rho * (1.0 + 1e-12),
        Region::Rect { x0, x1, y0, y1 } => [(x0, y0), (x0, y1), (x1, y0), (x1, y1)]
            .iter()
            .all(|(x, y)| (*x - s.0).hypot(*y - s.1) <= rho),
    }
}

fn region_far(region: &Region, s: (f64, f64), rho: f64) -> bool {
    let (x0, x1, y0, y1) = region.bbox();
    s.0 + rho < x0 || s.0 - rho > x1 || s.1 + rho < y0 || s.1 - rho > y1
}

#[allow(clippy::too_many_arguments)]
fn cusp_charts(i: usize, s: (f64, f64), rho: f64, data: Option<&CuspData>, height: f64, k: u32, inner_limit: Option<f64>, out: &mut Vec<Chart>) {
    let l0 = -rho.ln();
    let Some(d) = data else {
        out.push(Chart {
            shape: ChartShape::PuncturedDisc { center: s, log_radius: l0 },
            tag: ChartTag::CuspDisc,
            singular: Some(i),
            log_width: None,
            note: "no local expansion supplied".into(),
        });
        return;
    };
    if !d.all_exponents_zero() {
        let l_in = l0.max(-d.domination_radius.ln());
        let l_max = d.dominant_window(height, k).unwrap_or(l_in).max(l_in);
        if l_in > l0 {
            out.push(Chart {
                shape: ChartShape::Annulus { center: s, log_in: l0, log_out: l_in },
                tag: ChartTag::CuspDisc,
                singular: Some(i),
                log_width: None,
                note: "leading term not certified to dominate".into(),
            });
        }
        // rings e^{-ℓ-ln2} ≤ |w| ≤ e^{-ℓ}, sixteen discs each
        let mut l = l_in;
        while l < l_max {
            let rr = (-l).exp();
            let mid = 0.75 * rr;
            let rad = rr * 0.25f64.hypot(0.75 * (std::f64::consts::PI / 16.0).sin()) * 1.01;
            for j in 0..16 {
                let th = std::f64::consts::TAU * (j as f64 + 0.5) / 16.0;
                out.push(Chart {
                    shape: ChartShape::Disc { disc: Disc::new(s.0 + mid * th.cos(), s.1 + mid * th.sin(), rad) },
                    tag: ChartTag::CuspAnnulusDominant,
                    singular: Some(i),
                    log_width: Some(l_max - l_in),
                    note: String::new(),
                });
            }
            l += std::f64::consts::LN_2;
        }
        out.push(Chart {
            shape: ChartShape::PuncturedDisc { center: s, log_radius: l.max(l_max) },
            tag: ChartTag::CuspDisc,
            singular: Some(i),
            log_width: None,
            note: "no points: a dominant coordinate leaves [H^-k, H^k]".into(),
        });
        return;
    }
    let stop = match (d.cutoff_log, inner_limit) {
        (Some(c), Some(r)) => Some(c.min(r)),
        (c, r) => c.or(r),
    };
    let mut l = l0;
    let mut count = 0;
    let ell0 = l0.max(1.0);
    while stop.map_or(true, |c| l < c) && count < MAX_ANNULI {
        // next doubling point of ℓ on the scale ℓ0·2^j
        let mut next = ell0;
        while next <= l * (1.0 + 1e-12) {
            next *= 2.0;
        }
        let next = stop.map_or(next, |c| next.min(c));
        out.push(Chart {
            shape: ChartShape::Annulus { center: s, log_in: l, log_out: next },
            tag: ChartTag::CuspAnnulusDegenerate,
            singular: Some(i),
            log_width: None,
            note: String::new(),
        });
        l = next;
        count += 1;
    }
    if inner_limit.map_or(false, |r| l >= r) {
        return;
    }
    let note = if d.cutoff_log.map_or(false, |c| l >= c) {
        "no points: |coordinate| exceeds H^k".to_string()
    } else {
        format!("annulus cap of {MAX_ANNULI} reached")
    };
    out.push(Chart {
        shape: ChartShape::PuncturedDisc { center: s, log_radius: l },
        tag: ChartTag::CuspDisc,
        singular: Some(i),
        log_width: None,
        note,
    });
}

/// Coefficients a_n = ((1/2)_n / n!)² of F = ₂F₁(½,½;1;t), and a_n h_n with
/// h_n = Σ_{j≤n} (1/(2j−1) − 1/(2j)).
fn legendre_series(n: usize) -> (Vec<Rational>, Vec<Rational>) {
    let mut a = vec![Rational::from(1)];
    let mut h = vec![Rational::new()];
    for j in 1..=n {
        let f = Rational::from((2 * j as i64 - 1, 2 * j as i64));
        let next = Rational::from(&a[j - 1] * &f) * &f;
        a.push(next);
        let hj = Rational::from(&h[j - 1] + Rational::from((1, 2 * j as i64 - 1))) - Rational::from((1, 2 * j as i64));
        h.push(hj);
    }
    let ah = a.iter().zip(&h).map(|(x, y)| Rational::from(x * y)).collect();
    (a, ah)
}

/// τ near t = 0 on |t| ≤ r, |L| ≤ ℓ with L = log t:
/// τ = (i/π)(log 16 − L) − (4i/π) Φ(t)/F(t), where F = Σ a_n tⁿ and
/// Φ = Σ a_n h_n tⁿ.  Tails use a_n ≤ 1 and h_n < log 2.
pub fn legendre_cusp_tau(r: &Mag, ell: &Mag, digits: u32) -> Result<Model> {
    if !r.lt_f64(0.5) {
        return Err(Error::InvalidInput("cusp model needs |t| < 1/2".into()));
    }
    let prec = bits_for_digits(digits) + 32;
    let lr = -r.log10();
    let n = (((digits + 6) as f64 / lr).ceil() as usize).max(1);
    let (a, ah) = legendre_series(n);
    // r^{n+1}/(1 − r) ≤ 2 r^{n+1}
    let tail = r.pow(n as u32 + 1).mul_f64(2.0);
    let ball = |q: &Rational| CBall::from_rational(q, prec);
    let f = Model::taylor(a.iter().map(ball).collect(), r.clone(), n, tail.clone());
    let phi = Model::taylor(ah.iter().map(ball).collect(), r.clone(), n, tail.mul_f64(0.7));
    let pi = CBall::pi(prec);
    let i_over_pi = CBall::i(prec).div(&pi)?;
    let q = phi.div(&f)?.scale(&i_over_pi.mul_int(-4));
    let ln16 = CBall::from_int(16, prec).log()?;
    let mut row0 = q.coeffs[0].clone();
    row0[0] = row0[0].add(&i_over_pi.mul(&ln16));
    Ok(Model::with_log(vec![row0, vec![i_over_pi.neg()]], r.clone(), ell.clone(), q.order, q.err.clone()))
}

/// (τ, τ²) on the annulus ℓ_in ≤ log(1/|t|) ≤ ℓ_out.
pub fn legendre_annulus_models(log_in: f64, log_out: f64, digits: u32) -> Result<Vec<Model>> {
    let r = mag_exp(-log_in);
    let ell = Mag::from_f64(log_out + std::f64::consts::PI);
    let tau = legendre_cusp_tau(&r, &ell, digits)?;
    let sq = tau.mul(&tau);
    Ok(vec![tau, sq])
}

/// ℓ beyond which |τ| > H^k on the slit disc |t| ≤ e^{−ℓ}: there
/// Im τ ≥ (ℓ + log 16 − 4 sup|Φ/F|)/π, and |ξ| ≤ H^k for every coordinate
/// value of degree ≤ k and height ≤ H.
pub fn legendre_cutoff_log(height: f64, k: u32) -> Result<f64> {
    let r = Mag::from_f64(LEGENDRE_CUSP_RADIUS);
    let m = legendre_cusp_tau(&r, &Mag::zero(), 20)?;
    // the L-free part minus its constant term is −(4i/π)Φ/F
    let mut q = Model::with_log(vec![m.coeffs[0].clone()], r.clone(), Mag::zero(), m.order, m.err.clone());
    q.coeffs[0][0] = CBall::zero(m.prec());
    let sup = q.bound().to_f64();
    Ok(std::f64::consts::PI * height.powi(k as i32) - 16f64.ln() + std::f64::consts::PI * sup + 1.0)
}

/// Cusp data at 0 and 1 for (τ, τ²); exponents and log degree from the
/// Frobenius expansions.  Only the point 0 carries a series model.
pub fn legendre_cusps(height: f64, k: u32) -> Result<Vec<CuspData>> {
    let sys = legendre_connection();
    let mut out = vec![];
    for s in sys.singular_points(64)? {
        let Singularity::Finite { point, .. } = &s else { continue };
        let e = sys.local_expansion(&s, 40, std::f64::consts::PI, 20)?;
        let lam: Vec<f64> = e.exponents().iter().map(|q| q.to_f64()).collect();
        let lambda = lam.iter().cloned().fold(f64::INFINITY, f64::min);
        let (x, _) = point.to_c64();
        out.push(CuspData {
            point: (x, 0.0),
            exponents: vec![lambda, 2.0 * lambda],
            leading_abs: vec![1.0, 1.0],
            log_degree: e.log_degree(),
            radius: LEGENDRE_CUSP_RADIUS,
            domination_radius: LEGENDRE_CUSP_RADIUS,
            cutoff_log: Some(legendre_cutoff_log(height, k)?),
        });
    }
    Ok(out)
}

/// A rational p/q (q ≤ qmax) inside a real-axis ball.
pub fn recognize_rational(b: &CBall, qmax: u64) -> Option<Rational> {
    if !b.im_ball().contains_zero() {
        return None;
    }
    (1..=qmax).find_map(|q| {
        let n = b.mul_int(q as i64).unique_real_integer()?;
        let v = CBall::from_rational(&Rational::from((n.clone(), Integer::from(q))), b.prec());
        b.overlaps(&v).then(|| Rational::from((n, Integer::from(q))))
    })
}

/// Annulus certificate when every exponent is zero: with leading parts
/// R_i(L) (the w⁰ coefficients), L is eliminated through the linear R₁,
/// x₂ = R₂((x₁ − a₀)/a₁); the integer form P of this relation is then
/// certified by sup |P∘f| < Θ(P) on the chart.
pub fn degenerate_interpolate(models: &[Model], chart: &str, p: u32, height: f64, epsilon: f64, k: u32) -> Result<InterpolationCertificate> {
    if models.len() < 2 {
        return Err(Error::InvalidInput("need two coordinates".into()));
    }
    let lead = |m: &Model| -> Vec<CBall> {
        m.coeffs.iter().map(|row| row.first().cloned().unwrap_or_else(|| CBall::zero(m.prec()))).collect()
    };
    let r1 = lead(&models[0]);
    let r2 = lead(&models[1]);
    if r1.len() != 2 || r1[1].contains_zero() {
        return Err(Error::InvalidInput("first leading term must be linear in log".into()));
    }
    let prec = models[0].prec();
    let (a0, a1) = (&r1[0], &r1[1]);
    // u = (x − a0)/a1 as a polynomial in x
    let u = vec![a0.neg().div(a1)?, CBall::one(prec).div(a1)?];
    let mut rel = vec![CBall::zero(prec)];
    let mut upow = vec![CBall::one(prec)];
    for b in &r2 {
        if rel.len() < upow.len() {
            rel.resize(upow.len(), CBall::zero(prec));
        }
        for (j, c) in upow.iter().enumerate() {
            rel[j] = rel[j].add(&c.mul(b));
        }
        upow = poly_mul(&upow, &u, prec);
    }
    let rats: Option<Vec<Rational>> = rel.iter().map(|c| recognize_rational(c, 1000)).collect();
    let rats = rats.ok_or_else(|| Error::IncreaseSubdivision("leading relation has unrecognized coefficients".into()))?;
    let den = rats.iter().fold(Integer::from(1), |l, q| l.lcm(q.denom()));
    let m = models.len();
    let mono = |j: usize, y: u32| -> Vec<u32> {
        let mut e = vec![0; m];
        e[0] = j as u32;
        e[1] = y;
        e
    };
    let mut terms = vec![(mono(0, 1), den.clone())];
    for (j, q) in rats.iter().enumerate() {
        let c = Integer::from(q.numer() * Integer::from(&den / q.denom()));
        terms.push((mono(j, 0), -c));
    }
    let h = Hypersurface::new(terms).ok_or_else(|| Error::InvalidInput("trivial relation".into()))?;
    let consts = Constants::new(m, p, epsilon, height, k);
    let claim = format!("low-height points over {chart} lie on the limit relation");
    let mut cert = InterpolationCertificate::empty(consts, 0, claim);
    let Some(c) = certify_on(&h, models, k, height) else {
        return Err(Error::IncreaseSubdivision(format!("remainder too large on {chart}")));
    };
    cert.add(
        Provenance {
            chart: chart.into(),
            tag: ChartTag::CuspAnnulusDegenerate.as_str().into(),
            disc: None,
            status: ChartStatus::Certified,
            hypersurface: None,
            log10_sup: Some(c.log10_sup),
            log10_threshold: Some(c.log10_threshold),
            note: "relation eliminated from the leading log-polynomials".into(),
        },
        Some(h),
    );
    Ok(cert)
}

fn poly_mul(a: &[CBall], b: &[CBall], prec: u32) -> Vec<CBall> {
    let mut out = vec![CBall::zero(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::periods::LegendreTau;

    #[test]
    fn cusp_series_matches_connection() {
        let m = legendre_cusp_tau(&Mag::from_f64(0.05), &Mag::from_f64(8.0), 40).unwrap();
        for (x, y) in [(0.01, 0.005), (-0.02, 0.01), (0.015, -0.03)] {
            let t = CBall::from_f64(x, y, 200);
            let v = LegendreTau::at(&t, 40).unwrap().v;
            let direct = CBall::i(200).mul(&v[(0, 1)]).div(&v[(0, 0)]).unwrap();
            let got = m.eval(&t, Some(&t.log().unwrap()));
            assert!(got.overlaps(&direct), "{got:?} vs {direct:?}");
            assert!(got.rad.lt_f64(1e-30));
        }
    }

    #[test]
    fn legendre_exponents_zero_degenerate_annuli() {
        let cusps = legendre_cusps(100.0, 2).unwrap();
        assert_eq!(cusps.len(), 2);
        assert!(cusps.iter().all(|c| c.all_exponents_zero() && c.log_degree == 1));
        let region = Region::Annulus { center: (0.0, 0.0), r_in: 0.0, r_out: 0.1 };
        let cover = cover_plan(&[(0.0, 0.0), (1.0, 0.0)], &region, 100.0, 0.5, 2, &cusps).unwrap();
        let annuli: Vec<_> = cover.charts.iter().filter(|c| c.singular == Some(0) && c.tag != ChartTag::CuspDisc).collect();
        assert!(!annuli.is_empty());
        assert!(annuli.iter().all(|c| c.tag == ChartTag::CuspAnnulusDegenerate));
    }

    #[test]
    fn plan_covers_disc_of_radius_four() {
        let sigma = [(0.0, 0.0), (1.0, 0.0)];
        let cusps = legendre_cusps(10.0, 1).unwrap();
        let region = Region::Annulus { center: (0.0, 0.0), r_in: 0.0, r_out: 4.0 };
        let cover = cover_plan(&sigma, &region, 10.0, 0.5, 1, &cusps).unwrap();
        assert!(cover.charts.iter().any(|c| c.singular == Some(0)));
        assert!(cover.charts.iter().any(|c| c.singular == Some(1)));
        for c in &cover.charts {
            if let (ChartTag::InteriorDisc, ChartShape::Disc { disc }) = (&c.tag, &c.shape) {
                for s in sigma {
                    assert!((disc.center.0 - s.0).hypot(disc.center.1 - s.1) > 2.0 * disc.radius);
                }
            }
        }
        let mut x: u64 = 12345;
        for _ in 0..4000 {
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let a = ((x >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let b = ((x >> 11) as f64 / (1u64 << 53) as f64) * 8.0 - 4.0;
            if region.contains(a, b) {
                assert!(cover.covers(a, b), "({a}, {b}) uncovered");
            }
        }
    }

    #[test]
    fn square_root_cusp_window() {
        // f = w^{1/2}(1 + …): λ = ½, |c| = 1
        let d = CuspData {
            point: (0.0, 0.0),
            exponents: vec![0.5, 0.5],
            leading_abs: vec![1.0, 1.0],
            log_degree: 0,
            radius: 0.25,
            domination_radius: 0.25,
            cutoff_log: None,
        };
        let mut widths = vec![];
        for h in [10.0, 100.0, 1000.0] {
            let cover = cover_plan(&[(0.0, 0.0)], &Region::Annulus { center: (0.0, 0.0), r_in: 0.0, r_out: 1.0 }, h, 0.5, 1, &[d.clone()]).unwrap();
            let dom: Vec<_> = cover.charts.iter().filter(|c| c.tag == ChartTag::CuspAnnulusDominant).collect();
            assert!(!dom.is_empty());
            let w = dom[0].log_width.unwrap();
            assert!(w <= 2.0 * f64::ln(h) + 2.0 * 1.5f64.ln().abs().max(0.5f64.ln().abs()));
            widths.push(w);
        }
        assert!((widths[2] - widths[1] - 2.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn log_relation_eliminated() {
        let p = 128;
        let r = Mag::from_f64(0.1);
        let ell = Mag::from_f64(10.0);
        let mk = |c: i64, err: f64| Model::with_log(vec![vec![CBall::zero(p)], vec![CBall::from_int(c, p)]], r.clone(), ell.clone(), 4, Mag::from_f64(err));
        let cert = degenerate_interpolate(&[mk(1, 1e-12), mk(2, 1e-12)], "test", 1, 100.0, 0.5, 1).unwrap();
        assert_eq!(cert.hypersurfaces[0].display(&["x", "y"]), "2*x - y");
        let r = degenerate_interpolate(&[mk(1, 1e-2), mk(2, 1e-2)], "test", 1, 100.0, 0.5, 1);
        assert!(matches!(r, Err(Error::IncreaseSubdivision(_))));
    }

    #[test]
    fn legendre_annulus_certificate() {
        let models = legendre_annulus_models(3.0, 6.0, 40).unwrap();
        let cert = degenerate_interpolate(&models, "annulus", 1, 50.0, 0.5, 2).unwrap();
        let h = &cert.hypersurfaces[0];
        assert_eq!(h.display(&["x", "y"]), "x^2 - y");
        // CM points i·√n with τ(t) in the annulus lie on it
        for n in [5i64, 7, 9] {
            let tau = CBall::from_int(n, 128).sqrt().unwrap().mul_i();
            assert!(h.eval(&[tau.clone(), tau.sqr()]).contains_zero());
        }
        // remainder 10⁻³⁰ passes; the same inflated 10¹⁰× is refused
        let with_err = |f: f64| -> Vec<Model> {
            models.iter().cloned().map(|mut m| {
                m.err = m.err.add(&Mag::from_f64(1e-30)).mul_f64(f);
                m
            }).collect()
        };
        assert!(degenerate_interpolate(&with_err(1.0), "annulus", 1, 50.0, 0.5, 2).is_ok());
        let r = degenerate_interpolate(&with_err(1e10), "annulus", 1, 50.0, 0.5, 2);
        assert!(matches!(r, Err(Error::IncreaseSubdivision(_))));
    }
}
