//! Valency by the argument principle: winding numbers of f − c around a
//! circle, certified arc by arc with ball enclosures.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::model::Model;
use super::tuple::Disc;
use crate::arith::{CBall, Mag};
use crate::error::{Error, Result};

/// Arcs narrower than 2π/2^MAX_SPLIT are not subdivided further.
const MAX_SPLIT: u32 = 14;
const SAFETY_MARGIN: u32 = 2;
/// Working precision for contour evaluations.
pub const VALENCY_PREC: u32 = 64;

pub type BallFn<'a> = dyn Fn(&CBall) -> Result<CBall> + 'a;

fn point_on(center: (f64, f64), r: f64, th: f64, prec: u32) -> CBall {
    CBall::from_f64(center.0 + r * th.cos(), center.1 + r * th.sin(), prec)
}

fn arg_of(v: &CBall) -> f64 {
    let (x, y) = v.to_c64();
    y.atan2(x)
}

fn principal(d: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    d - tau * (d / tau).round()
}

/// Number of zeros of f − c inside the circle.  Each arc is accepted only
/// when the enclosure of f − c over the whole arc excludes 0, so the
/// argument varies by less than π along it.
pub fn winding_number(f: &BallFn, c: &CBall, center: (f64, f64), r: f64, prec: u32) -> Result<i64> {
    let n0 = 64;
    let step = std::f64::consts::TAU / n0 as f64;
    let mut total = 0.0;
    let mut stack: Vec<(f64, f64, u32)> = (0..n0).rev().map(|j| (j as f64 * step, (j + 1) as f64 * step, 0)).collect();
    // endpoint values are reused by the neighbouring arc
    let mut last: Option<(f64, CBall)> = None;
    while let Some((a, b, depth)) = stack.pop() {
        let m = 0.5 * (a + b);
        let half = r * (b - a) * 0.5 * 1.001;
        let enc = point_on(center, r, m, prec).with_rad(Mag::from_f64(half));
        let v = f(&enc)?.sub(c);
        if v.contains_zero() {
            if depth >= MAX_SPLIT {
                return Err(Error::IncreaseSubdivision("value attained too close to the contour".into()));
            }
            stack.push((m, b, depth + 1));
            stack.push((a, m, depth + 1));
            continue;
        }
        let fa = match &last {
            Some((x, v)) if *x == a => v.clone(),
            _ => f(&point_on(center, r, a, prec))?.sub(c),
        };
        let fb = f(&point_on(center, r, b, prec))?.sub(c);
        last = Some((b, fb.clone()));
        total += principal(arg_of(&fb) - arg_of(&fa));
    }
    let w = total / std::f64::consts::TAU;
    if (w - w.round()).abs() > 0.1 {
        return Err(Error::InsufficientPrecision(format!("winding sum {w} not near an integer")));
    }
    Ok(w.round() as i64)
}

#[derive(Clone, Debug, Serialize)]
pub struct ValencyReport {
    pub p: u32,
    pub max_count: u32,
    pub counts: Vec<u32>,
    pub radius: f64,
    pub seed: u64,
    /// Rigorous for each tested target; the maximum over targets is empirical.
    pub kind: &'static str,
}

fn random_inside(rng: &mut ChaCha8Rng, d: &Disc) -> (f64, f64) {
    let rho = d.radius * 0.9 * rng.gen::<f64>().sqrt();
    let th = rng.gen::<f64>() * std::f64::consts::TAU;
    (d.center.0 + rho * th.cos(), d.center.1 + rho * th.sin())
}

fn counts_for(f: &BallFn, d: &Disc, r: f64, targets: usize, rng: &mut ChaCha8Rng, prec: u32) -> Result<Vec<u32>> {
    let mut out = vec![];
    for _ in 0..targets {
        let z = random_inside(rng, d);
        let c = f(&CBall::from_f64(z.0, z.1, prec))?.mid();
        out.push(winding_number(f, &c, d.center, r, prec)?.max(0) as u32);
    }
    Ok(out)
}

/// p = (max over 20 targets c = f(z_j), z_j random in the disc, of the zero
/// count of f − c) + 2.  A contour too close to a zero is moved out by 1%,
/// at most five times.
pub fn valency_bound(f: &BallFn, disc: &Disc, seed: u64, prec: u32) -> Result<ValencyReport> {
    let mut r = disc.radius;
    let mut last = None;
    for _ in 0..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        match counts_for(f, disc, r, 20, &mut rng, prec) {
            Ok(counts) => {
                let max_count = counts.iter().copied().max().unwrap_or(0);
                return Ok(ValencyReport {
                    p: max_count + SAFETY_MARGIN,
                    max_count,
                    counts,
                    radius: r,
                    seed,
                    kind: "empirical-certified",
                });
            }
            Err(e) => last = Some(e),
        }
        r *= 1.01;
    }
    Err(last.unwrap())
}

/// Evaluation of a pure Taylor model at z (Taylor variable w = z − centre).
pub fn model_fn<'a>(m: &'a Model, center: (f64, f64)) -> impl Fn(&CBall) -> Result<CBall> + 'a {
    move |z: &CBall| {
        let w = z.sub(&CBall::from_f64(center.0, center.1, z.prec()));
        if !w.abs_upper().le(&m.r) {
            return Err(Error::InvalidInput("point outside the model disc".into()));
        }
        Ok(m.eval_ball(&w))
    }
}

/// Reject a claimed valency when some of 5 random targets per function has
/// more than p preimages in the disc.
pub fn spot_check(models: &[Model], disc: &Disc, p: &[u32], seed: u64) -> Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    for (i, m) in models.iter().enumerate() {
        let prec = VALENCY_PREC;
        let m = m.coarsen(prec);
        let f = model_fn(&m, disc.center);
        let mut r = disc.radius;
        let mut counts = None;
        for _ in 0..=5 {
            let mut local = rng.clone();
            // stay strictly inside the model disc
            if let Ok(c) = counts_for(&f, disc, r * 0.95, 5, &mut local, prec) {
                counts = Some(c);
                rng = local;
                break;
            }
            r *= 0.99;
        }
        let counts = counts.ok_or_else(|| Error::IncreaseSubdivision("valency spot check not certifiable".into()))?;
        let worst = counts.iter().copied().max().unwrap_or(0);
        let claimed = p.get(i).or(p.last()).copied().unwrap_or(1);
        if worst > claimed {
            return Err(Error::ValencyViolated(format!(
                "function {i} takes a value {worst} times, claimed valency {claimed}"
            )));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::tuple::{AnalyticTuple, Func};
    use crate::poly::QPoly;

    const P: u32 = 96;

    #[test]
    fn powers_of_z() {
        let d = Disc::new(0.0, 0.0, 1.0);
        let id = |z: &CBall| Ok(z.clone());
        assert_eq!(valency_bound(&id, &d, 1, P).unwrap().p, 3);
        let sq = |z: &CBall| Ok(z.sqr());
        let rep = valency_bound(&sq, &d, 1, P).unwrap();
        assert_eq!((rep.max_count, rep.p), (2, 4));
    }

    #[test]
    fn winding_counts_zeros() {
        let f = |z: &CBall| Ok(QPoly::from_ints(&[0, -1, 0, 1]).eval(z));
        let c = CBall::zero(P);
        assert_eq!(winding_number(&f, &c, (0.0, 0.0), 2.0, P).unwrap(), 3);
        assert_eq!(winding_number(&f, &c, (0.0, 0.0), 0.5, P).unwrap(), 1);
    }

    #[test]
    fn oscillating_sine_rejected() {
        let d = Disc::new(0.0, 0.0, 1.0);
        let t = AnalyticTuple::new(vec![Func::Poly(QPoly::x()), Func::Sin(12.0)]);
        let ms = t.disc_models(&d, 20).unwrap();
        let r = spot_check(&ms, &d, &[1, 1], 7);
        assert!(matches!(r, Err(Error::ValencyViolated(_))), "{r:?}");
        assert!(spot_check(&ms[..1], &d, &[1], 7).is_ok());
    }

    #[test]
    fn legendre_tau_valency_stable() {
        let d = Disc::new(0.5, 0.3, 0.15);
        let mut ps = vec![];
        for digits in [20, 30] {
            let m = AnalyticTuple::legendre().disc_models(&d.scaled(1.05), digits).unwrap().remove(0);
            let m = m.coarsen(VALENCY_PREC + digits);
            let f = model_fn(&m, d.center);
            ps.push(valency_bound(&f, &d, 3, m.prec()).unwrap().p);
        }
        assert_eq!(ps[0], ps[1]);
        assert_eq!(ps[0], 3);
    }
}
