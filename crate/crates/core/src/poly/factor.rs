//! Factorization over ℤ: modular factorization, Hensel lifting and
//! subset recombination.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rug::Integer;

use super::modp::{self, Fp};
use super::zpoly::ZPoly;

type IPoly = Vec<Integer>;

fn red(a: &[Integer], m: &Integer) -> IPoly {
    let mut v: IPoly = a
        .iter()
        .map(|c| {
            let mut r = Integer::from(c % m);
            if r < 0 {
                r += m;
            }
            r
        })
        .collect();
    while v.last().is_some_and(|c| *c == 0) {
        v.pop();
    }
    v
}

fn imul(a: &[Integer], b: &[Integer], m: &Integer) -> IPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![Integer::new(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Integer::from(x * y);
        }
    }
    red(&out, m)
}

fn iadd(a: &[Integer], b: &[Integer], m: &Integer) -> IPoly {
    let n = a.len().max(b.len());
    let v: IPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() + b.get(i).cloned().unwrap_or_default())
        .collect();
    red(&v, m)
}

fn isub(a: &[Integer], b: &[Integer], m: &Integer) -> IPoly {
    let n = a.len().max(b.len());
    let v: IPoly = (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_default() - b.get(i).cloned().unwrap_or_default())
        .collect();
    red(&v, m)
}

/// Division by a monic polynomial modulo m.
fn idivrem_monic(a: &[Integer], b: &[Integer], m: &Integer) -> (IPoly, IPoly) {
    let mut r = red(a, m);
    if r.len() < b.len() {
        return (vec![], r);
    }
    let db = b.len() - 1;
    let mut q = vec![Integer::new(); r.len() - db];
    for i in (0..q.len()).rev() {
        let c = r[i + db].clone();
        if c != 0 {
            for (j, bj) in b.iter().enumerate() {
                r[i + j] -= Integer::from(&c * bj);
            }
        }
        q[i] = c;
    }
    r.truncate(db);
    (red(&q, m), red(&r, m))
}

fn to_fp(a: &[Integer], p: u64) -> Fp {
    modp::trim(a.iter().map(|c| c.mod_u(p as u32) as u64).collect())
}

fn from_fp(a: &Fp) -> IPoly {
    a.iter().map(|&c| Integer::from(c)).collect()
}

/// Lift f ≡ g·h (mod p) to modulus ≥ target; h monic and g, h coprime mod p.
fn hensel_pair(f: &[Integer], g: &Fp, h: &Fp, p: u64, target: &Integer) -> (IPoly, IPoly) {
    let (one, s, t) = modp::xgcd(g, h, p);
    debug_assert_eq!(one, vec![1]);
    let (mut g, mut h, mut s, mut t) = (from_fp(g), from_fp(h), from_fp(&s), from_fp(&t));
    let mut m = Integer::from(p);
    while m < *target {
        let m2 = Integer::from(&m * &m);
        let e = isub(f, &imul(&g, &h, &m2), &m2);
        let (q, r) = idivrem_monic(&imul(&s, &e, &m2), &h, &m2);
        let gs = iadd(&iadd(&g, &imul(&t, &e, &m2), &m2), &imul(&q, &g, &m2), &m2);
        let hs = iadd(&h, &r, &m2);
        let mut b = iadd(&imul(&s, &gs, &m2), &imul(&t, &hs, &m2), &m2);
        b = isub(&b, &[Integer::from(1)], &m2);
        let (c, d) = idivrem_monic(&imul(&s, &b, &m2), &hs, &m2);
        s = isub(&s, &d, &m2);
        t = isub(&isub(&t, &imul(&t, &b, &m2), &m2), &imul(&c, &gs, &m2), &m2);
        g = gs;
        h = hs;
        m = m2;
    }
    (red(&g, target), red(&h, target))
}

/// Lift the monic modular factors of f (with f ≡ lc(f)·Π F_i mod p) to
/// monic factors modulo `target`.
fn hensel_multi(f: &[Integer], fs: &[Fp], p: u64, target: &Integer) -> Vec<IPoly> {
    if fs.len() == 1 {
        let lc = f.last().cloned().unwrap_or_default();
        let inv = lc.invert(target).expect("leading coefficient is a unit");
        let v: IPoly = f.iter().map(|c| Integer::from(c * &inv)).collect();
        return vec![red(&v, target)];
    }
    let k = fs.len() / 2;
    let lc = f.last().unwrap().mod_u(p as u32) as u64;
    let g = fs[..k].iter().fold(vec![lc], |acc, x| modp::mul(&acc, x, p));
    let h = fs[k..].iter().fold(vec![1u64], |acc, x| modp::mul(&acc, x, p));
    let (gl, hl) = hensel_pair(f, &g, &h, p, target);
    let mut out = hensel_multi(&gl, &fs[..k], p, target);
    out.extend(hensel_multi(&hl, &fs[k..], p, target));
    out
}

const PRIMES: [u64; 24] = [
    3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

fn more_primes() -> impl Iterator<Item = u64> {
    PRIMES.iter().copied().chain((101u64..).step_by(2).filter(|&n| (3..).step_by(2).take_while(|d| d * d <= n).all(|d| n % d != 0)))
}

/// Factor a primitive squarefree polynomial of positive degree.
fn factor_squarefree(f: &ZPoly) -> Vec<ZPoly> {
    if f.degree() <= 1 {
        return vec![f.clone()];
    }
    let fc = f.coeffs();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    // pick the admissible prime with the fewest modular factors among a few
    let mut best: Option<(u64, Vec<Fp>)> = None;
    let mut tried = 0;
    for p in more_primes() {
        if f.lc().mod_u(p as u32) == 0 {
            continue;
        }
        let fp = modp::monic(&to_fp(fc, p), p);
        if modp::gcd(&fp, &modp::derivative(&fp, p), p).len() != 1 {
            continue;
        }
        let facs = modp::factor_squarefree(&fp, p, &mut rng);
        if facs.len() == 1 {
            return vec![f.clone()];
        }
        if best.as_ref().map_or(true, |(_, b)| facs.len() < b.len()) {
            best = Some((p, facs));
        }
        tried += 1;
        if tried >= 8 {
            break;
        }
    }
    let (p, facs) = best.expect("some prime is admissible for a squarefree polynomial");

    // Mignotte-type bound on coefficients of lc·(factor)
    let n = f.degree() as u32;
    let bound = Integer::from(f.l2_norm_ceil() << n) * f.lc().abs() * 2u32 + 1u32;
    let mut target = Integer::from(p);
    while target <= bound {
        target *= p;
    }
    let mut lifted = hensel_multi(fc, &facs, p, &target);

    let mut out = vec![];
    let mut g = f.clone();
    let mut s = 1;
    while 2 * s <= lifted.len() {
        let mut found = false;
        for subset in subsets(lifted.len(), s) {
            let lc = g.lc();
            // constant-term screen
            let c0 = subset.iter().fold(lc.clone(), |acc, &i| Integer::from(acc * &lifted[i][0]) % &target);
            let c0 = ZPoly::new(vec![c0]).symmetric_mod(&target).coeff(0);
            let g0 = Integer::from(&g.coeff(0) * &lc);
            if g0 != 0 && (c0 == 0 || !g0.is_divisible(&c0)) {
                continue;
            }
            let prod = subset.iter().fold(vec![lc.clone()], |acc, &i| imul(&acc, &lifted[i], &target));
            let cand = ZPoly::new(prod).symmetric_mod(&target).primitive();
            if let Some(q) = g.div_exact(&cand) {
                out.push(cand);
                g = q.primitive();
                let mut keep = vec![];
                for (i, x) in lifted.into_iter().enumerate() {
                    if !subset.contains(&i) {
                        keep.push(x);
                    }
                }
                lifted = keep;
                found = true;
                break;
            }
        }
        if !found {
            s += 1;
        }
    }
    if g.degree() > 0 {
        out.push(g);
    }
    out
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![];
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Irreducible factorization over ℤ: content (with sign) and primitive
/// irreducible factors with multiplicities, sorted by degree then coefficients.
pub fn factor(f: &ZPoly) -> (Integer, Vec<(ZPoly, u32)>) {
    if f.is_zero() {
        return (Integer::new(), vec![]);
    }
    let mut c = f.content();
    if f.lc() < 0 {
        c = -c;
    }
    let mut out = vec![];
    for (g, m) in f.primitive().squarefree_decomposition() {
        for h in factor_squarefree(&g) {
            out.push((h, m));
        }
    }
    out.sort_by(|a, b| a.0.degree().cmp(&b.0.degree()).then_with(|| a.0.coeffs().cmp(b.0.coeffs())));
    (c, out)
}

/// True if f is irreducible over ℚ (and of positive degree).
pub fn is_irreducible(f: &ZPoly) -> bool {
    let (_, fs) = factor(f);
    fs.len() == 1 && fs[0].1 == 1
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(c: &[i64]) -> ZPoly {
        ZPoly::from_ints(c)
    }

    #[test]
    fn swinnerton_dyer_like_product() {
        // (x^2 - 2)(x^2 - 3)(x + 5)^2 (3x - 1)
        let f = z(&[-2, 0, 1]).mul(&z(&[-3, 0, 1])).mul(&z(&[5, 1])).mul(&z(&[5, 1])).mul(&z(&[-1, 3]));
        let (c, fs) = factor(&f.scale(&Integer::from(-6)));
        assert_eq!(c, -6);
        let got: Vec<_> = fs.iter().map(|(g, m)| (g.clone(), *m)).collect();
        assert_eq!(got.len(), 4);
        assert!(got.contains(&(z(&[5, 1]), 2)));
        assert!(got.contains(&(z(&[-1, 3]), 1)));
        assert!(got.contains(&(z(&[-2, 0, 1]), 1)));
        assert!(got.contains(&(z(&[-3, 0, 1]), 1)));
    }

    #[test]
    fn irreducible_with_many_modular_factors() {
        // x^4 + 1 splits modulo every prime
        assert!(is_irreducible(&z(&[1, 0, 0, 0, 1])));
        // x^4 - 10x^2 + 1 as well
        assert!(is_irreducible(&z(&[1, 0, -10, 0, 1])));
    }

    #[test]
    fn product_of_large_factors() {
        let a = z(&[123456789, -987654, 1, 17]);
        let b = z(&[-31, 0, 0, 0, 5, 2]);
        let (_, fs) = factor(&a.mul(&b));
        assert_eq!(fs.len(), 2);
        let prod = fs.iter().fold(ZPoly::one(), |acc, (g, _)| acc.mul(g));
        assert_eq!(prod, a.mul(&b));
    }
}
