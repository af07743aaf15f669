//! Multivariate gcd by recursion on the main variable with primitive
//! pseudo-remainder sequences.

use super::coeff::{Coeff, Fp};
use super::poly::Poly;

/// Greatest common divisor, returned as its canonical associate.
pub fn gcd<F: Coeff>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    gcd_raw(a, b).normalized().0
}

fn gcd_raw<F: Coeff>(a: &Poly<F>, b: &Poly<F>) -> Poly<F> {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.is_constant() || b.is_constant() {
        return Poly::one();
    }
    if a == b {
        return a.clone();
    }
    if a.len() == 1 || b.len() == 1 {
        let g = a.monomial_content().gcd(&b.monomial_content());
        return Poly::monomial(g, F::one());
    }
    let n = a.arity().max(b.arity());
    let Some(v) = (0..n).find(|&i| a.uses_var(i) && b.uses_var(i)) else {
        return Poly::one();
    };
    if coprime_by_images(a, b) {
        return Poly::one();
    }
    let ua = a.to_univariate(v);
    let ub = b.to_univariate(v);
    let ca = content(&ua);
    let cb = content(&ub);
    let c = gcd_raw(&ca, &cb);
    let pa: Vec<Poly<F>> = ua.iter().map(|p| p.div_exact(&ca).expect("content divides")).collect();
    let pb: Vec<Poly<F>> = ub.iter().map(|p| p.div_exact(&cb).expect("content divides")).collect();
    let g = prs(pa, pb);
    &c * &Poly::from_univariate(v, &g)
}

/// Sufficient test for `gcd(a, b) = 1`.
///
/// A common factor `g` survives specialisation of all variables but `v` at a
/// point mod p that keeps both leading coefficients in `v` nonzero, with its
/// degree in `v` intact. So a constant image gcd for every shared variable
/// rules out every nonconstant `g`.
fn coprime_by_images<F: Coeff>(a: &Poly<F>, b: &Poly<F>) -> bool {
    let n = a.arity().max(b.arity());
    let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ (a.len() as u64) << 32 ^ b.len() as u64;
    let mut next = || {
        state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        Fp::new(z ^ (z >> 31))
    };
    'vars: for v in (0..n).filter(|&i| a.uses_var(i) && b.uses_var(i)) {
        for _ in 0..3 {
            let point: Vec<Fp> = (0..n).map(|_| next()).collect();
            let (Some(ia), Some(ib)) = (image(a, v, &point), image(b, v, &point)) else {
                return false;
            };
            if ia.len() != a.degree_in(v) as usize + 1 || ib.len() != b.degree_in(v) as usize + 1 {
                continue;
            }
            if univariate_gcd_degree(ia, ib) == 0 {
                continue 'vars;
            }
            return false;
        }
        return false;
    }
    true
}

/// Coefficients in `v` after substituting `point` for the other variables, trimmed.
fn image<F: Coeff>(p: &Poly<F>, v: usize, point: &[Fp]) -> Option<Vec<Fp>> {
    let mut out = vec![Fp::default(); p.degree_in(v) as usize + 1];
    for (m, c) in p.terms() {
        let mut t = c.to_fp()?;
        for (i, &e) in m.exponents().iter().enumerate() {
            if i != v && e > 0 {
                t = t * point[i].pow(e as u64);
            }
        }
        let k = m.exp(v) as usize;
        out[k] = out[k] + t;
    }
    while out.last().is_some_and(|c| c.value() == 0) {
        out.pop();
    }
    Some(out)
}

fn univariate_gcd_degree(mut a: Vec<Fp>, mut b: Vec<Fp>) -> usize {
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    while !b.is_empty() {
        let inv = Fp::new(1) / *b.last().unwrap();
        while a.len() >= b.len() {
            let q = *a.last().unwrap() * inv;
            let shift = a.len() - b.len();
            for (k, &bk) in b.iter().enumerate() {
                a[k + shift] = a[k + shift] - q * bk;
            }
            while a.last().is_some_and(|c| c.value() == 0) {
                a.pop();
            }
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Gcd of univariate-coefficient lists.
fn content<F: Coeff>(coeffs: &[Poly<F>]) -> Poly<F> {
    let mut g = Poly::zero();
    for p in coeffs {
        if p.is_zero() {
            continue;
        }
        g = gcd_raw(&g, p).normalized().0;
        if g.is_constant() {
            return Poly::one();
        }
    }
    if g.is_zero() {
        Poly::one()
    } else {
        g
    }
}

fn degree<F: Coeff>(u: &[Poly<F>]) -> Option<usize> {
    u.iter().rposition(|p| !p.is_zero())
}

fn trim<F: Coeff>(mut u: Vec<Poly<F>>) -> Vec<Poly<F>> {
    while u.last().map(|p| p.is_zero()).unwrap_or(false) {
        u.pop();
    }
    u
}

fn primitive<F: Coeff>(u: Vec<Poly<F>>) -> Vec<Poly<F>> {
    let u = trim(u);
    let c = content(&u);
    let u: Vec<Poly<F>> = if c.is_constant() {
        u
    } else {
        u.iter().map(|p| p.div_exact(&c).expect("content divides")).collect()
    };
    let unit = F::normalizer(u.iter().rev().flat_map(|p| p.terms().iter().map(|(_, a)| a)));
    u.iter().map(|p| p.scale(&unit)).collect()
}

/// Pseudo-remainder of `a` by `b` in the main variable.
fn prem<F: Coeff>(a: &[Poly<F>], b: &[Poly<F>]) -> Vec<Poly<F>> {
    let db = degree(b).expect("nonzero divisor");
    let lb = &b[db];
    let mut r: Vec<Poly<F>> = trim(a.to_vec());
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<Poly<F>> = r.iter().map(|p| p * lb).collect();
        for (k, bk) in b.iter().enumerate() {
            let t = &lr * bk;
            next[k + shift] = &next[k + shift] - &t;
        }
        r = trim(next);
    }
    r
}

fn prs<F: Coeff>(a: Vec<Poly<F>>, b: Vec<Poly<F>>) -> Vec<Poly<F>> {
    let (mut a, mut b) = (trim(a), trim(b));
    if degree(&a) < degree(&b) {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        match degree(&b) {
            None => return primitive(a),
            Some(0) => return vec![Poly::one()],
            Some(_) => {}
        }
        let r = prem(&a, &b);
        a = b;
        if r.is_empty() {
            return primitive(a);
        }
        b = primitive(r);
    }
}

/// Squarefree part, valid in characteristic zero.
pub fn squarefree<F: Coeff>(p: &Poly<F>) -> Poly<F> {
    if p.is_constant() {
        return p.normalized().0;
    }
    let mut g = p.clone();
    for i in 0..p.arity() {
        let d = p.partial(i);
        if !d.is_zero() {
            g = gcd_raw(&g, &d).normalized().0;
        }
    }
    p.div_exact(&g).expect("gcd divides").normalized().0
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = Poly<BigRational>;

    fn c(n: i64) -> P {
        P::constant(BigRational::from_integer(n.into()))
    }

    #[test]
    fn shared_linear_factor() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&x + &y) * &(&x - &c(1));
        let g = &(&x + &y) * &(&y + &c(3));
        assert_eq!(gcd(&f, &g), &x + &y);
    }

    #[test]
    fn coprime_is_one() {
        let x = P::var(0);
        let y = P::var(1);
        assert_eq!(gcd(&(&x + &c(1)), &(&y - &c(1))), P::one());
    }

    #[test]
    fn squarefree_drops_multiplicity() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&(&x * &x) * &y).pow(1) * &(&y * &y);
        assert_eq!(squarefree(&f), &x * &y);
    }

    #[test]
    fn three_variable_factor() {
        let x = P::var(0);
        let y = P::var(1);
        let z = P::var(2);
        let h = &(&x * &z) + &(&y * &y);
        let f = &h * &(&x + &z);
        let g = &h * &(&(&y * &z) - &c(2));
        assert_eq!(gcd(&f, &g), h);
    }

    #[test]
    fn images_certify_coprime_pairs_only() {
        let x = P::var(0);
        let y = P::var(1);
        let a = &(&(&x * &x) * &y) + &c(7);
        let b = &(&x * &y) - &(&y * &y);
        assert!(coprime_by_images(&a, &b));
        let h = &x + &(&y * &y);
        assert!(!coprime_by_images(&(&a * &h), &(&b * &h)));
        assert_eq!(gcd(&(&a * &h), &(&b * &h)), h);
    }

    #[test]
    fn image_gcd_degree() {
        let f = |v: &[i64]| v.iter().map(|&k| Fp::from_i64(k)).collect::<Vec<_>>();
        // (t - 1)(t + 2) and (t - 1)(t - 5)
        assert_eq!(univariate_gcd_degree(f(&[-2, 1, 1]), f(&[5, -6, 1])), 1);
        assert_eq!(univariate_gcd_degree(f(&[-2, 1, 1]), f(&[1, 1])), 0);
    }
}
