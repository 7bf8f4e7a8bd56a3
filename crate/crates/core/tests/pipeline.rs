use ao_core::arith::CBall;
use ao_core::cm::{certify_cm, legendre_parameter};
use ao_core::counting::{count_points, AnalyticTuple, CountOptions, Region};
use ao_core::periods::catalog;
use ao_core::poly::ZPoly;

#[test]
fn t_equal_two_is_gaussian() {
    // t = 2 is λ of the square lattice, D = −4
    let f = catalog("legendre").unwrap();
    let t = legendre_parameter(&CBall::from_f64(2.0, 0.0, 256), -4).unwrap();
    assert_eq!(t.minpoly, ZPoly::from_ints(&[-2, 1]));
    let c = certify_cm(&f, &t, 50, 40).unwrap();
    assert_eq!(c.disc_center, -4);
    assert_eq!(c.d, 1);
}

#[test]
fn parabola_rationals_counted() {
    // (z, z²) on [0.11, 0.39]: rationals p/q with max(|p|, q)² ≤ 100
    let region = Region::Rect { x0: 0.11, x1: 0.39, y0: -0.05, y1: 0.05 };
    let opts = CountOptions { p: Some(2), digits: 40, ..Default::default() };
    let rep = count_points(&AnalyticTuple::parabola(), &region, &[], &[], 100.0, 0.5, 1, &opts).unwrap();
    let want = (1..=10i64)
        .flat_map(|q| (1..q).map(move |p| (p, q)))
        .filter(|&(p, q)| gcd(p, q) == 1 && (0.11..=0.39).contains(&(p as f64 / q as f64)))
        .count();
    assert!(rep.complete);
    assert_eq!(rep.n, want);
    assert!(rep.points.iter().all(|p| p.on_hypersurface));
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}
