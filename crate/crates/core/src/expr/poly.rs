use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::coeff::Coeff;
use super::monomial::Monomial;

/// Sparse multivariate polynomial, terms in descending graded-lex order.
#[derive(Clone, PartialEq, Debug)]
pub struct Poly<F> {
    terms: Vec<(Monomial, F)>,
}

impl<F: Coeff> Default for Poly<F> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<F: Coeff> Poly<F> {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(Monomial::one(), c)] }
        }
    }

    pub fn var(i: usize) -> Self {
        Poly { terms: vec![(Monomial::var(i), F::one())] }
    }

    pub fn monomial(m: Monomial, c: F) -> Self {
        if c.is_zero() {
            Self::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, F)>) -> Self {
        let mut acc: BTreeMap<Monomial, F> = BTreeMap::new();
        for (m, c) in terms {
            if c.is_zero() {
                continue;
            }
            match acc.get_mut(&m) {
                Some(v) => *v = v.clone() + c,
                None => {
                    acc.insert(m, c);
                }
            }
        }
        Self::from_map(acc)
    }

    fn from_map(acc: BTreeMap<Monomial, F>) -> Self {
        let terms = acc.into_iter().rev().filter(|(_, c)| !c.is_zero()).collect();
        Poly { terms }
    }

    pub fn terms(&self) -> &[(Monomial, F)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.iter().all(|(m, _)| m.is_one())
    }

    pub fn constant_value(&self) -> Option<F> {
        match self.terms.as_slice() {
            [] => Some(F::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    /// Coefficient of the constant monomial.
    pub fn constant_term(&self) -> F {
        match self.terms.last() {
            Some((m, c)) if m.is_one() => c.clone(),
            _ => F::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, F)> {
        self.terms.first()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.first().map(|(m, _)| m.degree()).unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u16 {
        self.terms.iter().map(|(m, _)| m.exp(i)).max().unwrap_or(0)
    }

    /// One more than the largest variable index in use.
    pub fn arity(&self) -> usize {
        self.terms.iter().map(|(m, _)| m.arity()).max().unwrap_or(0)
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.terms.iter().any(|(m, _)| m.exp(i) > 0)
    }

    pub fn scale(&self, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, a)| (m.clone(), a.clone() * c.clone())).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &F) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, a)| (n.mul(m), a.clone() * c.clone()))
                .collect(),
        }
    }

    /// Product with all terms of total degree above `max_degree` dropped.
    pub fn mul_truncated(&self, o: &Self, max_degree: u32) -> Self {
        let mut acc: BTreeMap<Monomial, F> = BTreeMap::new();
        for (m, a) in &self.terms {
            let dm = m.degree();
            if dm > max_degree {
                continue;
            }
            for (n, b) in o.terms.iter().rev() {
                if dm + n.degree() > max_degree {
                    break;
                }
                let k = m.mul(n);
                let v = a.clone() * b.clone();
                match acc.get_mut(&k) {
                    Some(x) => *x = x.clone() + v,
                    None => {
                        acc.insert(k, v);
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    pub fn truncate(&self, max_degree: u32) -> Self {
        Poly {
            terms: self.terms.iter().filter(|(m, _)| m.degree() <= max_degree).cloned().collect(),
        }
    }

    pub fn partial(&self, i: usize) -> Self {
        let terms = self.terms.iter().filter_map(|(m, c)| {
            let e = m.exp(i);
            if e == 0 {
                None
            } else {
                Some((m.with_exp(i, e - 1), c.clone() * F::from_i64(e as i64)))
            }
        });
        Self::from_terms(terms)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    pub fn eval(&self, point: &[F]) -> F {
        self.eval_with(point, |c| c.clone())
    }

    /// Evaluates in any ring `T` that receives the coefficients through `lift`.
    pub fn eval_with<T>(&self, args: &[T], lift: impl Fn(&F) -> T) -> T
    where
        T: Clone + Add<Output = T> + Mul<Output = T> + num_traits::Zero + num_traits::One,
    {
        let mut powers: Vec<Vec<T>> = vec![Vec::new(); args.len()];
        let mut acc = T::zero();
        for (m, c) in &self.terms {
            let mut t = lift(c);
            for (i, &e) in m.exponents().iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let table = &mut powers[i];
                if table.is_empty() {
                    table.push(T::one());
                }
                while table.len() <= e as usize {
                    let next = table.last().cloned().unwrap() * args[i].clone();
                    table.push(next);
                }
                t = t * table[e as usize].clone();
            }
            acc = acc + t;
        }
        acc
    }

    pub fn reindex(&self, map: &[Option<usize>]) -> Option<Self> {
        let mut out = Vec::with_capacity(self.terms.len());
        for (m, c) in &self.terms {
            out.push((m.reindex(map)?, c.clone()));
        }
        Some(Self::from_terms(out))
    }

    /// Drops every term that involves a variable mapped to `None`.
    pub fn reindex_dropping(&self, map: &[Option<usize>]) -> Self {
        Self::from_terms(self.terms.iter().filter_map(|(m, c)| Some((m.reindex(map)?, c.clone()))))
    }

    /// Coefficients in powers of variable `v`; entry `k` multiplies `v^k`.
    pub fn to_univariate(&self, v: usize) -> Vec<Self> {
        let deg = self.degree_in(v) as usize;
        let mut buckets: Vec<Vec<(Monomial, F)>> = vec![Vec::new(); deg + 1];
        for (m, c) in &self.terms {
            let e = m.exp(v) as usize;
            buckets[e].push((m.with_exp(v, 0), c.clone()));
        }
        buckets.into_iter().map(Self::from_terms).collect()
    }

    pub fn from_univariate(v: usize, coeffs: &[Self]) -> Self {
        let mut out = Vec::new();
        for (k, p) in coeffs.iter().enumerate() {
            for (m, c) in &p.terms {
                out.push((m.with_exp(v, m.exp(v) + k as u16), c.clone()));
            }
        }
        Self::from_terms(out)
    }

    /// `self / d` when the division is exact.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (ld, lc) = d.leading()?.clone();
        if d.len() == 1 {
            let inv = lc.inv()?;
            let mut out = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                if !ld.divides(m) {
                    return None;
                }
                out.push((ld.quotient_of(m), c.clone() * inv.clone()));
            }
            return Some(Poly { terms: out });
        }
        let inv = lc.inv()?;
        let mut rem = self.clone();
        let mut quot = Vec::new();
        while let Some((m, c)) = rem.leading().cloned() {
            if !ld.divides(&m) {
                return None;
            }
            let qm = ld.quotient_of(&m);
            let qc = c * inv.clone();
            rem = &rem - &d.mul_monomial(&qm, &qc);
            quot.push((qm, qc));
        }
        Some(Self::from_terms(quot))
    }

    /// Canonical associate and the unit that produced it.
    pub fn normalized(&self) -> (Self, F) {
        let u = F::normalizer(self.terms.iter().map(|(_, c)| c));
        (self.scale(&u), u)
    }

    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        it.fold(first.clone(), |g, (m, _)| g.gcd(m))
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            let mag = if neg { -c.clone() } else { c.clone() };
            if idx == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            let mono = render_monomial(m, names);
            if mono.is_empty() {
                out.push_str(&mag.render());
            } else if mag.is_one() {
                out.push_str(&mono);
            } else {
                out.push_str(&mag.render());
                out.push('*');
                out.push_str(&mono);
            }
        }
        out
    }
}

fn render_monomial(m: &Monomial, names: &[String]) -> String {
    let mut parts = Vec::new();
    for (i, &e) in m.exponents().iter().enumerate() {
        if e == 0 {
            continue;
        }
        let name = names.get(i).cloned().unwrap_or_else(|| format!("x{i}"));
        if e == 1 {
            parts.push(name);
        } else {
            parts.push(format!("{name}^{e}"));
        }
    }
    parts.join("*")
}

fn merge<F: Coeff>(a: &[(Monomial, F)], b: &[(Monomial, F)], negate_b: bool) -> Vec<(Monomial, F)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let nb = |c: &F| if negate_b { -c.clone() } else { c.clone() };
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            std::cmp::Ordering::Less => {
                out.push((b[j].0.clone(), nb(&b[j].1)));
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                let c = a[i].1.clone() + nb(&b[j].1);
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().map(|(m, c)| (m.clone(), nb(c))));
    out
}

impl<F: Coeff> Add for &Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: &Poly<F>) -> Poly<F> {
        Poly { terms: merge(&self.terms, &o.terms, false) }
    }
}

impl<F: Coeff> Sub for &Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: &Poly<F>) -> Poly<F> {
        Poly { terms: merge(&self.terms, &o.terms, true) }
    }
}

impl<F: Coeff> Neg for &Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }
}

impl<F: Coeff> Mul for &Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: &Poly<F>) -> Poly<F> {
        if self.is_zero() || o.is_zero() {
            return Poly::zero();
        }
        if self.len() == 1 {
            let (m, c) = &self.terms[0];
            return o.mul_monomial(m, c);
        }
        if o.len() == 1 {
            let (m, c) = &o.terms[0];
            return self.mul_monomial(m, c);
        }
        let mut acc: BTreeMap<Monomial, F> = BTreeMap::new();
        for (m, a) in &self.terms {
            for (n, b) in &o.terms {
                let k = m.mul(n);
                let v = a.clone() * b.clone();
                match acc.get_mut(&k) {
                    Some(x) => *x = x.clone() + v,
                    None => {
                        acc.insert(k, v);
                    }
                }
            }
        }
        Poly::from_map(acc)
    }
}

impl<F: Coeff> Add for Poly<F> {
    type Output = Poly<F>;
    fn add(self, o: Poly<F>) -> Poly<F> {
        &self + &o
    }
}

impl<F: Coeff> Sub for Poly<F> {
    type Output = Poly<F>;
    fn sub(self, o: Poly<F>) -> Poly<F> {
        &self - &o
    }
}

impl<F: Coeff> Mul for Poly<F> {
    type Output = Poly<F>;
    fn mul(self, o: Poly<F>) -> Poly<F> {
        &self * &o
    }
}

impl<F: Coeff> Neg for Poly<F> {
    type Output = Poly<F>;
    fn neg(self) -> Poly<F> {
        -&self
    }
}

impl<F: Coeff> num_traits::Zero for Poly<F> {
    fn zero() -> Self {
        Poly::zero()
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

impl<F: Coeff> num_traits::One for Poly<F> {
    fn one() -> Self {
        Poly::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type P = Poly<BigRational>;

    fn c(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn difference_of_squares() {
        let x = P::var(0);
        let y = P::var(1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.render(&names()), "x^2 - y^2");
    }

    #[test]
    fn exact_division_recovers_factor() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&x + &y) * &(&x - &P::constant(c(2)));
        assert_eq!(f.div_exact(&(&x + &y)).unwrap(), &x - &P::constant(c(2)));
        assert!(f.div_exact(&(&x + &P::constant(c(5)))).is_none());
    }

    #[test]
    fn univariate_round_trip() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&(&x * &x) * &y) + &(&y + &P::constant(c(3)));
        let u = f.to_univariate(0);
        assert_eq!(u.len(), 3);
        assert_eq!(P::from_univariate(0, &u), f);
    }

    #[test]
    fn partial_derivative() {
        let x = P::var(0);
        let y = P::var(1);
        let f = &(&x * &x) * &y;
        assert_eq!(f.partial(0), &(&x * &y).scale(&c(2)) + &P::zero());
        assert_eq!(f.partial(1), &x * &x);
    }
}
