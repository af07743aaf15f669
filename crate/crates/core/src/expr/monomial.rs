use std::cmp::Ordering;

use smallvec::SmallVec;

/// Exponent vector with trailing zeros trimmed, so constants need no arity.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub struct Monomial(SmallVec<[u16; 8]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn var(i: usize) -> Self {
        let mut v: SmallVec<[u16; 8]> = SmallVec::from_elem(0, i + 1);
        v[i] = 1;
        Monomial(v)
    }

    pub fn from_exponents(exps: &[u16]) -> Self {
        let mut v: SmallVec<[u16; 8]> = exps.iter().copied().collect();
        trim(&mut v);
        Monomial(v)
    }

    pub fn exponents(&self) -> &[u16] {
        &self.0
    }

    pub fn exp(&self, i: usize) -> u16 {
        self.0.get(i).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|&e| e as u32).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    /// Number of leading positions that can be nonzero.
    pub fn arity(&self) -> usize {
        self.0.len()
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let n = self.0.len().max(o.0.len());
        let mut v: SmallVec<[u16; 8]> = SmallVec::with_capacity(n);
        for i in 0..n {
            let e = self.exp(i) as u32 + o.exp(i) as u32;
            v.push(u16::try_from(e).expect("exponent overflow"));
        }
        Monomial(v)
    }

    pub fn divides(&self, o: &Monomial) -> bool {
        self.0.len() <= o.0.len() && self.0.iter().zip(o.0.iter()).all(|(a, b)| a <= b)
    }

    /// `o / self`, assuming `self` divides `o`.
    pub fn quotient_of(&self, o: &Monomial) -> Monomial {
        let mut v: SmallVec<[u16; 8]> = o.0.clone();
        for (i, e) in self.0.iter().enumerate() {
            v[i] -= e;
        }
        trim(&mut v);
        Monomial(v)
    }

    pub fn gcd(&self, o: &Monomial) -> Monomial {
        let n = self.0.len().min(o.0.len());
        let mut v: SmallVec<[u16; 8]> = (0..n).map(|i| self.0[i].min(o.0[i])).collect();
        trim(&mut v);
        Monomial(v)
    }

    pub fn with_exp(&self, i: usize, e: u16) -> Monomial {
        let mut v = self.0.clone();
        if v.len() <= i {
            v.resize(i + 1, 0);
        }
        v[i] = e;
        trim(&mut v);
        Monomial(v)
    }

    pub fn reindex(&self, map: &[Option<usize>]) -> Option<Monomial> {
        let mut v: SmallVec<[u16; 8]> = SmallVec::new();
        for (i, &e) in self.0.iter().enumerate() {
            if e == 0 {
                continue;
            }
            let j = (*map.get(i)?)?;
            if v.len() <= j {
                v.resize(j + 1, 0);
            }
            v[j] += e;
        }
        trim(&mut v);
        Some(Monomial(v))
    }
}

fn trim(v: &mut SmallVec<[u16; 8]>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

impl Ord for Monomial {
    /// Graded lexicographic, with `x0 > x1 > ...`.
    fn cmp(&self, o: &Self) -> Ordering {
        self.degree().cmp(&o.degree()).then_with(|| {
            let n = self.0.len().max(o.0.len());
            for i in 0..n {
                match self.exp(i).cmp(&o.exp(i)) {
                    Ordering::Equal => continue,
                    c => return c,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grlex_order() {
        let x = Monomial::var(0);
        let y = Monomial::var(1);
        let xy = x.mul(&y);
        let x2 = x.mul(&x);
        assert!(x > y);
        assert!(xy > x);
        assert!(x2 > xy);
        assert!(Monomial::one() < y);
    }

    #[test]
    fn trimming_keeps_equality() {
        assert_eq!(Monomial::from_exponents(&[1, 0, 0]), Monomial::var(0));
        assert_eq!(Monomial::var(2).quotient_of(&Monomial::var(2)), Monomial::one());
    }
}
