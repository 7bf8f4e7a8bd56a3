//! Interpolation certificates: integer hypersurfaces that every low-height
//! point of a tuple's image on a disc must lie on.
//!
//! On a sub-disc, an integer polynomial P with sup |P∘f| below the Liouville
//! bound Θ(P) vanishes at every point of degree ≤ k and height ≤ H there:
//! a nonzero value P(ξ) would be at least Θ(P) in modulus.  P is searched
//! by LLL on the Taylor coefficients of the monomials in f, scaled by the
//! sub-disc radius, and certified with the model's remainder bound.

use rug::{Float, Integer};
use serde::Serialize;
use std::collections::BTreeMap;

use super::model::Model;
use super::tuple::{AnalyticTuple, Disc};
use super::valency::{model_fn, spot_check, valency_bound, VALENCY_PREC};
use crate::arith::{CBall, Mag};
use crate::error::{Error, Result};
use crate::lattice::integer_relations;

/// Quadtree levels below the half-disc before a cell is left unresolved.
pub const MAX_DEPTH: u32 = 7;

#[derive(Clone, Debug, Serialize)]
pub struct Constants {
    pub m: usize,
    pub p: u32,
    pub epsilon: f64,
    pub height: f64,
    pub degree_k: u32,
    /// Monomial degree C(ε) = ⌈2m/ε⌉.
    pub big_c: usize,
    /// Sub-disc budget c_impl(p, ε) = (p+1)²·⌈H^ε⌉.
    pub c_impl: u64,
}

impl Constants {
    pub fn new(m: usize, p: u32, epsilon: f64, height: f64, degree_k: u32) -> Constants {
        let big_c = (2.0 * m as f64 / epsilon).ceil() as usize;
        let c_impl = (p as u64 + 1).pow(2) * height.powf(epsilon).ceil() as u64;
        Constants { m, p, epsilon, height, degree_k, big_c, c_impl }
    }
}

/// Σ c_e x^e with integer coefficients; terms sorted by exponent.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Hypersurface {
    pub terms: Vec<(Vec<u32>, String)>,
}

impl Hypersurface {
    /// Primitive, with a positive leading (last) term.
    pub fn new(terms: Vec<(Vec<u32>, Integer)>) -> Option<Hypersurface> {
        let mut map: BTreeMap<Vec<u32>, Integer> = BTreeMap::new();
        for (e, c) in terms {
            *map.entry(e).or_default() += c;
        }
        map.retain(|_, c| *c != 0);
        let g = map.values().fold(Integer::new(), |g, c| g.gcd(c));
        if g == 0 {
            return None;
        }
        let sign = if map.values().last().map_or(false, |c| *c < 0) { -1 } else { 1 };
        let terms = map.into_iter().map(|(e, c)| (e, Integer::from(Integer::from(c / &g) * sign).to_string())).collect();
        Some(Hypersurface { terms })
    }

    pub fn coeffs(&self) -> Vec<(Vec<u32>, Integer)> {
        self.terms.iter().map(|(e, c)| (e.clone(), c.parse().expect("integer"))).collect()
    }

    pub fn degree(&self) -> u32 {
        self.terms.iter().map(|(e, _)| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn partial_degrees(&self) -> Vec<u32> {
        let m = self.terms.first().map_or(0, |t| t.0.len());
        (0..m).map(|i| self.terms.iter().map(|(e, _)| e[i]).max().unwrap_or(0)).collect()
    }

    /// log of the sum of |coefficients|.
    pub fn log_length(&self) -> f64 {
        self.coeffs().iter().map(|(_, c)| c.to_f64().abs()).sum::<f64>().ln()
    }

    /// log Θ(P): a nonzero P(ξ), ξ of degree ≤ k and height ≤ H, has
    /// modulus at least Θ.  k = 1: denominators give H^{−Σ deg_i}.
    /// k ≥ 2: Liouville, exp(−k^m (log L(P) + Σ deg_i log H)).
    pub fn log_threshold(&self, k: u32, height: f64) -> f64 {
        let dsum: u32 = self.partial_degrees().iter().sum();
        let lh = height.ln();
        if k == 1 {
            -(dsum as f64) * lh
        } else {
            let m = self.partial_degrees().len() as i32;
            -(k as f64).powi(m) * (self.log_length() + dsum as f64 * lh)
        }
    }

    pub fn eval(&self, x: &[CBall]) -> CBall {
        let prec = x[0].prec();
        let mut acc = CBall::zero(prec);
        for (e, c) in self.coeffs() {
            let mut t = CBall::from_floats(Float::with_val(prec, &c), Float::new(prec));
            for (xi, ei) in x.iter().zip(&e) {
                t = t.mul(&xi.pow(*ei));
            }
            acc = acc.add(&t);
        }
        acc
    }

    pub fn eval_models(&self, f: &[Model]) -> Model {
        let mut pows = PowerCache::new(f);
        let mut acc: Option<Model> = None;
        for (e, c) in self.coeffs() {
            let prec = f[0].prec();
            let t = pows.monomial(&e).scale(&CBall::from_floats(Float::with_val(prec, &c), Float::new(prec)));
            acc = Some(match acc {
                Some(a) => a.add(&t),
                None => t,
            });
        }
        acc.expect("nonempty hypersurface")
    }

    pub fn display(&self, vars: &[&str]) -> String {
        let mut s = String::new();
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.to_string() } else { format!("{v}^{k}") })
                .collect();
            let sign = if c.starts_with('-') { "-" } else { "+" };
            let abs = c.trim_start_matches('-');
            let body = match (abs, mono.is_empty()) {
                (a, true) => a.to_string(),
                ("1", false) => mono.join("*"),
                (a, false) => format!("{a}*{}", mono.join("*")),
            };
            s.push_str(&format!(" {sign} {body}"));
        }
        s.trim_start_matches(" + ").trim().to_string()
    }
}

struct PowerCache<'a> {
    f: &'a [Model],
    pows: Vec<Vec<Model>>,
}

impl<'a> PowerCache<'a> {
    fn new(f: &'a [Model]) -> Self {
        PowerCache { f, pows: f.iter().map(|m| vec![Model::constant(CBall::one(m.prec()), m.r.clone(), m.ell.clone(), m.order)]).collect() }
    }

    fn power(&mut self, i: usize, e: u32) -> Model {
        while self.pows[i].len() <= e as usize {
            let next = self.pows[i].last().unwrap().mul(&self.f[i]);
            self.pows[i].push(next);
        }
        self.pows[i][e as usize].clone()
    }

    fn monomial(&mut self, e: &[u32]) -> Model {
        let mut acc = self.power(0, e[0]);
        for (i, &k) in e.iter().enumerate().skip(1) {
            if k > 0 {
                acc = acc.mul(&self.power(i, k));
            }
        }
        acc
    }
}

/// Exponent vectors of total degree ≤ d in m variables (graded order).
pub fn monomials(m: usize, d: u32) -> Vec<Vec<u32>> {
    fn rec(m: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == m {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur.push(k);
            rec(m, left - k, cur, out);
            cur.pop();
        }
    }
    let mut out = vec![];
    rec(m, d, &mut vec![], &mut out);
    out.sort_by_key(|e| (e.iter().sum::<u32>(), e.iter().rev().cloned().collect::<Vec<_>>()));
    out
}

#[derive(Clone, Debug)]
pub struct Certified {
    pub hypersurface: Hypersurface,
    pub log10_sup: f64,
    pub log10_threshold: f64,
}

/// Certify a candidate on the models' domain: sup |P∘f| < Θ(P).
pub fn certify_on(p: &Hypersurface, f: &[Model], k: u32, height: f64) -> Option<Certified> {
    let sup = p.eval_models(f).bound();
    let lt = p.log_threshold(k, height) / std::f64::consts::LN_10;
    let ls = sup.log10();
    (ls < lt).then(|| Certified { hypersurface: p.clone(), log10_sup: ls, log10_threshold: lt })
}

/// LLL search for an integer P of total degree ≤ d, certified on the domain
/// of the models.
pub fn find_relation(f: &[Model], d: u32, k: u32, height: f64) -> Result<Option<Certified>> {
    let m = f.len();
    let prec = f[0].prec();
    let monos = monomials(m, d);
    let mut cache = PowerCache::new(f);
    let models: Vec<Model> = monos.iter().map(|e| cache.monomial(e)).collect();
    let cols = models.iter().map(|x| x.coeffs[0].len()).max().unwrap_or(1);
    let vals: Vec<Vec<Float>> = models
        .iter()
        .map(|x| {
            let sc = x.scaled_coeffs();
            let mut v = vec![];
            for j in 0..cols {
                let c = sc.get(j).cloned().unwrap_or_else(|| CBall::zero(prec));
                v.push(c.re.clone());
                v.push(c.im.clone());
            }
            v
        })
        .collect();
    // weight ≈ the threshold for a degree-d candidate, plus headroom
    let dsum = (m as u32 * d) as f64;
    let log2_theta = if k == 1 {
        dsum * height.log2()
    } else {
        (k as f64).powi(m as i32) * (dsum * height.log2() + 8.0 * d as f64)
    };
    // Σ partial degrees ≥ d, so a certificate would need sup below H^{-d}
    if d as f64 * height.log2() * (k as f64).powi(m as i32) > prec.saturating_sub(24) as f64 {
        return Ok(None);
    }
    let weight = ((log2_theta + 40.0) as u32).min(prec.saturating_sub(24));
    for rel in integer_relations(&vals, weight)?.into_iter().take(4) {
        let terms = monos.iter().cloned().zip(rel).collect();
        let Some(p) = Hypersurface::new(terms) else { continue };
        if p.degree() == 0 {
            continue;
        }
        if let Some(c) = certify_on(&p, f, k, height) {
            return Ok(Some(c));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChartStatus {
    Certified,
    NoPoints,
    Unresolved,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub chart: String,
    pub tag: String,
    /// Geometry of disc charts.
    pub disc: Option<Disc>,
    pub status: ChartStatus,
    /// Index into the certificate's hypersurface list.
    pub hypersurface: Option<usize>,
    pub log10_sup: Option<f64>,
    pub log10_threshold: Option<f64>,
    pub note: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct InterpolationCertificate {
    pub claim: String,
    pub hypersurfaces: Vec<Hypersurface>,
    pub count: usize,
    pub provenance: Vec<Provenance>,
    pub constants: Constants,
    pub seed: u64,
    pub complete: bool,
    /// count ≤ c_impl.
    pub within_bound: bool,
}

impl InterpolationCertificate {
    pub fn empty(constants: Constants, seed: u64, claim: String) -> Self {
        InterpolationCertificate {
            claim,
            hypersurfaces: vec![],
            count: 0,
            provenance: vec![],
            constants,
            seed,
            complete: true,
            within_bound: true,
        }
    }

    pub fn add(&mut self, mut prov: Provenance, h: Option<Hypersurface>) {
        if let Some(h) = h {
            let idx = match self.hypersurfaces.iter().position(|x| *x == h) {
                Some(i) => i,
                None => {
                    self.hypersurfaces.push(h);
                    self.hypersurfaces.len() - 1
                }
            };
            prov.hypersurface = Some(idx);
        }
        if prov.status == ChartStatus::Unresolved {
            self.complete = false;
        }
        self.provenance.push(prov);
        self.count = self.hypersurfaces.len();
        self.within_bound = self.count as u64 <= self.constants.c_impl;
    }

    /// Associative merge (hypersurfaces deduplicated, provenance concatenated).
    pub fn merge(&mut self, other: &InterpolationCertificate) {
        for p in &other.provenance {
            let h = p.hypersurface.map(|i| other.hypersurfaces[i].clone());
            let mut p = p.clone();
            p.hypersurface = None;
            self.add(p, h);
        }
        self.complete &= other.complete;
    }

    /// Hypersurfaces attached to charts whose description matches.
    pub fn for_chart(&self, chart: &str) -> Vec<&Hypersurface> {
        self.provenance
            .iter()
            .filter(|p| p.chart == chart)
            .filter_map(|p| p.hypersurface.map(|i| &self.hypersurfaces[i]))
            .collect()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

pub fn disc_label(d: &Disc) -> String {
    format!("disc({:.6e},{:.6e};{:.6e})", d.center.0, d.center.1, d.radius)
}

/// No point with a rational coordinate can come from a disc on which that
/// coordinate's enclosure misses the real line.
fn misses_real_line(models: &[Model]) -> bool {
    models.iter().any(|m| {
        let w = CBall::zero(m.prec()).with_rad(m.r.clone());
        let v = m.eval_ball(&w);
        !v.im_ball().contains_zero()
    })
}

#[derive(Clone, Debug)]
pub struct InterpolateOptions {
    pub digits: u32,
    pub seed: u64,
    pub tag: String,
}

impl Default for InterpolateOptions {
    fn default() -> Self {
        InterpolateOptions { digits: 60, seed: 1, tag: "interior-disc".into() }
    }
}

fn claim_text(k: u32, h: f64, where_: &str) -> String {
    let kind = if k == 1 { "rational".to_string() } else { format!("degree-<={k} algebraic") };
    format!("every image point with {kind} coordinates of height <= {h} over {where_} lies on a listed hypersurface")
}

/// Certificate on the half-radius concentric disc of `disc`.
pub fn pvalent_interpolate(
    tuple: &AnalyticTuple,
    disc: &Disc,
    p: Option<u32>,
    height: f64,
    epsilon: f64,
    k: u32,
    opts: &InterpolateOptions,
) -> Result<InterpolationCertificate> {
    if epsilon <= 0.0 || height < 1.0 || k == 0 || tuple.dim() < 2 {
        return Err(Error::InvalidInput("need m ≥ 2, ε > 0, H ≥ 1, k ≥ 1".into()));
    }
    let full = tuple.disc_models(disc, opts.digits.min(30))?;
    let p = match (p, &tuple.valency) {
        (Some(p), _) => {
            spot_check(&full, disc, &vec![p; full.len()], opts.seed)?;
            p
        }
        (None, Some(ps)) => {
            spot_check(&full, disc, ps, opts.seed)?;
            ps.iter().copied().max().unwrap_or(1)
        }
        (None, None) => {
            let mut best = 0;
            for m in &full {
                let m = m.coarsen(VALENCY_PREC);
                let f = model_fn(&m, disc.center);
                best = best.max(valency_bound(&f, &disc.scaled(0.9), opts.seed, VALENCY_PREC)?.p);
            }
            best
        }
    };
    let consts = Constants::new(tuple.dim(), p, epsilon, height, k);
    let half = disc.scaled(0.5);
    let mut cert = InterpolationCertificate::empty(consts.clone(), opts.seed, claim_text(k, height, &disc_label(&half)));

    let root = Cell { center: half.center, side: 2.0 * half.radius, depth: 0 };
    interpolate_cell(tuple, &half, &root, &consts, opts, &mut cert)?;
    Ok(cert)
}

/// Quadtree square; its chart is the circumscribed disc (the half-disc
/// itself at the root).
#[derive(Clone, Copy)]
struct Cell {
    center: (f64, f64),
    side: f64,
    depth: u32,
}

impl Cell {
    fn children(&self) -> [Cell; 4] {
        let q = self.side / 4.0;
        [(-1.0, -1.0), (1.0, -1.0), (-1.0, 1.0), (1.0, 1.0)]
            .map(|(sx, sy)| Cell { center: (self.center.0 + sx * q, self.center.1 + sy * q), side: self.side / 2.0, depth: self.depth + 1 })
    }

    fn meets(&self, d: &Disc) -> bool {
        let h = self.side / 2.0;
        let dx = ((d.center.0 - self.center.0).abs() - h).max(0.0);
        let dy = ((d.center.1 - self.center.1).abs() - h).max(0.0);
        dx.hypot(dy) <= d.radius
    }
}

fn provenance(d: &Disc, tag: &str, c: &Certified) -> Provenance {
    Provenance {
        chart: disc_label(d),
        tag: tag.into(),
        disc: Some(*d),
        status: ChartStatus::Certified,
        hypersurface: None,
        log10_sup: Some(c.log10_sup),
        log10_threshold: Some(c.log10_threshold),
        note: String::new(),
    }
}

fn interpolate_cell(
    tuple: &AnalyticTuple,
    half: &Disc,
    cell: &Cell,
    consts: &Constants,
    opts: &InterpolateOptions,
    cert: &mut InterpolationCertificate,
) -> Result<()> {
    if !cell.meets(half) {
        return Ok(());
    }
    let sub = if cell.depth == 0 { *half } else { Disc::new(cell.center.0, cell.center.1, cell.side * std::f64::consts::FRAC_1_SQRT_2) };
    let models = tuple.disc_models(&sub, opts.digits)?;
    if consts.degree_k == 1 && misses_real_line(&models) {
        cert.add(
            Provenance {
                chart: disc_label(&sub),
                tag: opts.tag.clone(),
                disc: Some(sub),
                status: ChartStatus::NoPoints,
                hypersurface: None,
                log10_sup: None,
                log10_threshold: None,
                note: "a coordinate's enclosure misses the real line".into(),
            },
            None,
        );
        return Ok(());
    }
    let top = consts.big_c as u32;
    for d in 1..=top {
        if let Some(c) = find_relation(&models, d, consts.degree_k, consts.height)? {
            cert.add(provenance(&sub, &opts.tag, &c), Some(c.hypersurface));
            return Ok(());
        }
    }
    if cell.depth < MAX_DEPTH {
        for child in cell.children() {
            interpolate_cell(tuple, half, &child, consts, opts, cert)?;
        }
        return Ok(());
    }
    cert.add(
        Provenance {
            chart: disc_label(&sub),
            tag: opts.tag.clone(),
            disc: Some(sub),
            status: ChartStatus::Unresolved,
            hypersurface: None,
            log10_sup: None,
            log10_threshold: None,
            note: format!("no certified polynomial of degree <= {top} at quadtree depth {MAX_DEPTH}"),
        },
        None,
    );
    Ok(())
}

/// Sup-norm of a certificate's hypersurface on a model domain, for reports.
pub fn sup_on(h: &Hypersurface, f: &[Model]) -> Mag {
    h.eval_models(f).bound()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::tuple::Func;
    use crate::poly::QPoly;

    #[test]
    fn implemented_constants() {
        let c = Constants::new(2, 2, 0.5, 100.0, 1);
        assert_eq!((c.big_c, c.c_impl), (8, 90));
        let c = Constants::new(2, 1, 0.5, 1000.0, 2);
        assert_eq!(c.c_impl, 128);
    }

    #[test]
    fn parabola_single_curve() {
        let t = AnalyticTuple::parabola();
        let cert = pvalent_interpolate(&t, &Disc::new(0.0, 0.0, 1.0), Some(2), 1000.0, 0.5, 1, &Default::default()).unwrap();
        assert_eq!(cert.count, 1);
        assert_eq!(cert.hypersurfaces[0].display(&["x", "y"]), "x^2 - y");
        assert!(cert.complete && cert.within_bound);
    }

    #[test]
    fn sine_with_false_valency_rejected() {
        let t = AnalyticTuple::new(vec![Func::Poly(QPoly::x()), Func::Sin(12.0)]);
        let r = pvalent_interpolate(&t, &Disc::new(0.0, 0.0, 1.0), Some(1), 100.0, 0.5, 1, &Default::default());
        assert!(matches!(r, Err(Error::ValencyViolated(_))));
    }

    #[test]
    fn exponential_certificate_sound() {
        let t = AnalyticTuple::new(vec![Func::Poly(QPoly::x()), Func::Exp { re: 1.0, im: 0.0 }]);
        let disc = Disc::new(0.0, 0.0, 0.5);
        let opts = InterpolateOptions { digits: 40, ..Default::default() };
        let cert = pvalent_interpolate(&t, &disc, Some(1), 100.0, 0.5, 1, &opts).unwrap();
        assert!(cert.complete, "{}", cert.to_json());
        // (0, 1) is the only rational image point; every chart holding it
        // must put it on its hypersurface
        let one = [CBall::zero(128), CBall::one(128)];
        let holders: Vec<_> = cert
            .provenance
            .iter()
            .filter(|p| chart_contains(&p.chart, 0.0, 0.0))
            .collect();
        assert!(!holders.is_empty());
        for p in holders {
            assert_eq!(p.status, ChartStatus::Certified);
            let h = &cert.hypersurfaces[p.hypersurface.unwrap()];
            assert!(h.eval(&one).contains_zero(), "{}", h.display(&["x", "y"]));
        }
    }

    #[test]
    fn exponential_size_within_budget_for_each_epsilon() {
        let t = AnalyticTuple::new(vec![Func::Poly(QPoly::x()), Func::Exp { re: 1.0, im: 0.0 }]);
        let disc = Disc::new(0.0, 0.0, 0.5);
        let opts = InterpolateOptions { digits: 40, ..Default::default() };
        let sizes: Vec<usize> = [0.25, 0.5, 1.0]
            .iter()
            .map(|&eps| {
                let c = pvalent_interpolate(&t, &disc, Some(1), 100.0, eps, 1, &opts).unwrap();
                assert!(c.complete && c.within_bound, "eps {eps}: {} of {}", c.count, c.constants.c_impl);
                c.count
            })
            .collect();
        // C(1) = 4 is too small for a single curve on the whole half-disc
        assert_eq!(&sizes[..2], &[1, 1]);
        assert!(sizes[2] > 1);
    }

    #[test]
    fn parabola_size_nonincreasing_in_epsilon() {
        let t = AnalyticTuple::parabola();
        let sizes: Vec<usize> = [0.25, 0.5, 1.0]
            .iter()
            .map(|&eps| pvalent_interpolate(&t, &Disc::new(0.0, 0.0, 1.0), Some(2), 1000.0, eps, 1, &Default::default()).unwrap().count)
            .collect();
        assert!(sizes.windows(2).all(|w| w[1] <= w[0]), "{sizes:?}");
    }

    fn chart_contains(label: &str, x: f64, y: f64) -> bool {
        let body = label.trim_start_matches("disc(").trim_end_matches(')');
        let (c, r) = body.split_once(';').unwrap();
        let (cx, cy) = c.split_once(',').unwrap();
        let d = Disc::new(cx.parse().unwrap(), cy.parse().unwrap(), r.parse().unwrap());
        d.contains(x, y)
    }

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials(2, 2).len(), 6);
        assert_eq!(monomials(3, 8).len(), 165);
        let h = Hypersurface::new(vec![(vec![0, 1], Integer::from(-2)), (vec![2, 0], Integer::from(2))]).unwrap();
        assert_eq!(h.display(&["x", "y"]), "x^2 - y");
        assert_eq!(h.log_threshold(1, 10.0), -3.0 * 10f64.ln());
    }
}
