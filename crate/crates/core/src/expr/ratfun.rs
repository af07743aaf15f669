use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::atomic::{AtomicU32, Ordering};

use super::coeff::Coeff;
use super::gcd::gcd;
use super::poly::Poly;

static DEGREE_CAP: AtomicU32 = AtomicU32::new(64);

pub fn degree_cap() -> u32 {
    DEGREE_CAP.load(Ordering::Relaxed)
}

/// Sets the global total-degree cap for numerators and denominators.
pub fn set_degree_cap(cap: u32) {
    DEGREE_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Panic payload raised when arithmetic exceeds the degree cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeCapExceeded {
    pub degree: u32,
    pub cap: u32,
}

impl fmt::Display for DegreeCapExceeded {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "degree {} exceeds cap {}", self.degree, self.cap)
    }
}

/// A reduced quotient of polynomials with a canonical denominator.
#[derive(Clone, PartialEq, Debug)]
pub struct RationalFunction<F> {
    num: Poly<F>,
    den: Poly<F>,
}

impl<F: Coeff> RationalFunction<F> {
    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den: Poly::one() }
    }

    pub fn one() -> Self {
        Self::constant(F::one())
    }

    pub fn constant(c: F) -> Self {
        RationalFunction { num: Poly::constant(c), den: Poly::one() }
    }

    pub fn var(i: usize) -> Self {
        RationalFunction { num: Poly::var(i), den: Poly::one() }
    }

    pub fn from_poly(p: Poly<F>) -> Self {
        Self::checked(RationalFunction { num: p, den: Poly::one() })
    }

    /// Reduces `num / den`, reporting a cap violation instead of panicking.
    pub fn try_new(num: Poly<F>, den: Poly<F>) -> Result<Self, DegreeCapExceeded> {
        assert!(!den.is_zero(), "zero denominator");
        let r = Self::reduce(num, den);
        r.cap_check().map(|_| r)
    }

    pub fn new(num: Poly<F>, den: Poly<F>) -> Self {
        Self::checked(Self::reduce(num, den))
    }

    fn checked(r: Self) -> Self {
        if let Err(e) = r.cap_check() {
            std::panic::panic_any(e);
        }
        r
    }

    fn cap_check(&self) -> Result<(), DegreeCapExceeded> {
        let cap = degree_cap();
        let degree = self.num.total_degree().max(self.den.total_degree());
        if degree > cap {
            Err(DegreeCapExceeded { degree, cap })
        } else {
            Ok(())
        }
    }

    fn reduce(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero constant");
            return RationalFunction { num: num.scale(&inv), den: Poly::one() };
        }
        let g = gcd(&num, &den);
        let (num, den) = if g.is_constant() {
            (num, den)
        } else {
            (num.div_exact(&g).expect("gcd divides"), den.div_exact(&g).expect("gcd divides"))
        };
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero constant");
            return RationalFunction { num: num.scale(&inv), den: Poly::one() };
        }
        let (den, unit) = den.normalized();
        RationalFunction { num: num.scale(&unit), den }
    }

    pub fn checked_add(&self, o: &Self) -> Result<Self, DegreeCapExceeded> {
        let r = self.add_reduced(o);
        r.cap_check().map(|_| r)
    }

    pub fn checked_sub(&self, o: &Self) -> Result<Self, DegreeCapExceeded> {
        self.checked_add(&-o)
    }

    pub fn checked_mul(&self, o: &Self) -> Result<Self, DegreeCapExceeded> {
        let r = self.mul_reduced(o);
        r.cap_check().map(|_| r)
    }

    pub fn checked_div(&self, o: &Self) -> Result<Self, DegreeCapExceeded> {
        assert!(!o.is_zero(), "division by the zero function");
        let r = self.mul_reduced(&o.recip());
        r.cap_check().map(|_| r)
    }

    /// `num / den` for coprime inputs: only the denominator is normalised.
    fn coprime(num: Poly<F>, den: Poly<F>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if let Some(c) = den.constant_value() {
            let inv = c.inv().expect("nonzero constant");
            return RationalFunction { num: num.scale(&inv), den: Poly::one() };
        }
        let (den, unit) = den.normalized();
        RationalFunction { num: num.scale(&unit), den }
    }

    fn recip(&self) -> Self {
        Self::coprime(self.den.clone(), self.num.clone())
    }

    /// Product of reduced fractions, cancelling crosswise before multiplying.
    fn mul_reduced(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero();
        }
        let g1 = gcd(&self.num, &o.den);
        let g2 = gcd(&o.num, &self.den);
        let q = |p: &Poly<F>, g: &Poly<F>| if g.is_constant() { p.clone() } else { p.div_exact(g).expect("gcd divides") };
        Self::coprime(&q(&self.num, &g1) * &q(&o.num, &g2), &q(&self.den, &g2) * &q(&o.den, &g1))
    }

    /// Sum of reduced fractions; only the common part of the denominators can cancel.
    fn add_reduced(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        if self.den == o.den {
            return Self::reduce(&self.num + &o.num, self.den.clone());
        }
        let g = gcd(&self.den, &o.den);
        if g.is_constant() {
            let num = &(&self.num * &o.den) + &(&o.num * &self.den);
            return Self::coprime(num, &self.den * &o.den);
        }
        let b1 = self.den.div_exact(&g).expect("gcd divides");
        let d1 = o.den.div_exact(&g).expect("gcd divides");
        let t = &(&self.num * &d1) + &(&o.num * &b1);
        if t.is_zero() {
            return Self::zero();
        }
        let h = gcd(&t, &g);
        if h.is_constant() {
            return Self::coprime(t, &b1 * &o.den);
        }
        let t = t.div_exact(&h).expect("gcd divides");
        Self::coprime(t, &b1 * &o.den.div_exact(&h).expect("gcd divides"))
    }

    pub fn checked_pow(&self, e: u32) -> Result<Self, DegreeCapExceeded> {
        let cap = degree_cap();
        let degree = self.total_degree().saturating_mul(e);
        if degree > cap {
            return Err(DegreeCapExceeded { degree, cap });
        }
        Ok(self.pow(e))
    }

    pub fn num(&self) -> &Poly<F> {
        &self.num
    }

    pub fn den(&self) -> &Poly<F> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_constant()
    }

    pub fn constant_value(&self) -> Option<F> {
        if self.den.is_constant() {
            self.num.constant_value()
        } else {
            None
        }
    }

    pub fn arity(&self) -> usize {
        self.num.arity().max(self.den.arity())
    }

    pub fn uses_var(&self, i: usize) -> bool {
        self.num.uses_var(i) || self.den.uses_var(i)
    }

    pub fn total_degree(&self) -> u32 {
        self.num.total_degree().max(self.den.total_degree())
    }

    pub fn partial(&self, i: usize) -> Self {
        if self.den.is_constant() {
            return RationalFunction { num: self.num.partial(i), den: Poly::one() };
        }
        let dn = self.num.partial(i);
        let dd = self.den.partial(i);
        if dd.is_zero() {
            return Self::new(dn, self.den.clone());
        }
        let num = &(&dn * &self.den) - &(&self.num * &dd);
        Self::new(num, &self.den * &self.den)
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::new(self.den.clone(), self.num.clone()))
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        Self::checked(RationalFunction { num: self.num.pow(e), den: self.den.pow(e) })
    }

    pub fn scale(&self, c: &F) -> Self {
        RationalFunction { num: self.num.scale(c), den: self.den.clone() }
    }

    /// `None` at a pole.
    pub fn eval(&self, point: &[F]) -> Option<F> {
        let d = self.den.eval(point);
        let d_inv = d.inv()?;
        Some(self.num.eval(point) * d_inv)
    }

    pub fn reindex(&self, map: &[Option<usize>]) -> Option<Self> {
        Some(RationalFunction { num: self.num.reindex(map)?, den: self.den.reindex(map)? })
    }

    /// Substitutes `args[i]` for variable `i`.
    pub fn compose(&self, args: &[Self]) -> Self {
        let num = self.num.eval_with(args, |c| Self::constant(c.clone()));
        if self.den.is_constant() {
            return num.scale(&self.den.constant_value().unwrap().inv().unwrap());
        }
        let den = self.den.eval_with(args, |c| Self::constant(c.clone()));
        num / den
    }

    pub fn render(&self, names: &[String]) -> String {
        if self.den.is_constant() {
            return self.num.render(names);
        }
        let n = self.num.render(names);
        let n = if self.num.len() > 1 { format!("({n})") } else { n };
        let d = self.den.render(names);
        let d = if self.den.len() > 1 || d.contains('*') || d.contains('/') {
            format!("({d})")
        } else {
            d
        };
        format!("{n}/{d}")
    }
}

impl<F: Coeff> Add for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn add(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        RationalFunction::checked(self.add_reduced(o))
    }
}

impl<F: Coeff> Sub for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn sub(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        self + &(-o)
    }
}

impl<F: Coeff> Neg for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn neg(self) -> RationalFunction<F> {
        RationalFunction { num: -&self.num, den: self.den.clone() }
    }
}

impl<F: Coeff> Mul for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn mul(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        RationalFunction::checked(self.mul_reduced(o))
    }
}

impl<F: Coeff> Div for &RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn div(self, o: &RationalFunction<F>) -> RationalFunction<F> {
        assert!(!o.is_zero(), "division by the zero function");
        RationalFunction::checked(self.mul_reduced(&o.recip()))
    }
}

macro_rules! owned_ops {
    ($($tr:ident $m:ident),*) => {$(
        impl<F: Coeff> $tr for RationalFunction<F> {
            type Output = RationalFunction<F>;
            fn $m(self, o: RationalFunction<F>) -> RationalFunction<F> {
                (&self).$m(&o)
            }
        }
        impl<'a, F: Coeff> $tr<&'a RationalFunction<F>> for RationalFunction<F> {
            type Output = RationalFunction<F>;
            fn $m(self, o: &'a RationalFunction<F>) -> RationalFunction<F> {
                (&self).$m(o)
            }
        }
    )*};
}
owned_ops!(Add add, Sub sub, Mul mul, Div div);

impl<F: Coeff> Neg for RationalFunction<F> {
    type Output = RationalFunction<F>;
    fn neg(self) -> RationalFunction<F> {
        -&self
    }
}

impl<F: Coeff> num_traits::Zero for RationalFunction<F> {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl<F: Coeff> num_traits::One for RationalFunction<F> {
    fn one() -> Self {
        RationalFunction::one()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    type R = RationalFunction<BigRational>;

    fn c(n: i64) -> R {
        R::constant(BigRational::from_integer(n.into()))
    }

    fn names() -> Vec<String> {
        vec!["x".into(), "y".into()]
    }

    #[test]
    fn cancellation_to_polynomial() {
        let x = R::var(0);
        let y = R::var(1);
        let f = &(&(&x * &x) - &(&y * &y)) / &(&x - &y);
        assert_eq!(f, &x + &y);
    }

    #[test]
    fn denominator_is_primitive_with_positive_lead() {
        let x = R::var(0);
        let f = &c(1) / &(&(&x * &c(-2)) + &c(1));
        assert_eq!(f.render(&names()), "-1/(2*x - 1)");
    }

    #[test]
    fn quotient_rule() {
        let x = R::var(0);
        let f = &c(1) / &x;
        assert_eq!(f.partial(0), &c(-1) / &(&x * &x));
    }

    #[test]
    fn cap_violation_panics_with_payload() {
        let x = R::var(0);
        let res = std::panic::catch_unwind(|| x.pow(1000));
        let payload = res.unwrap_err();
        assert!(payload.downcast_ref::<DegreeCapExceeded>().is_some());
    }

    #[test]
    fn crosswise_cancellation_matches_full_reduction() {
        let x = R::var(0);
        let y = R::var(1);
        let a = &(&x + &y) / &(&x - &c(1));
        let b = &(&x - &c(1)) / &(&(&x + &y) * &y);
        assert_eq!(&a * &b, &c(1) / &y);
        let p = &c(1) / &(&(&x - &c(1)) * &y);
        let q = &c(1) / &(&(&x - &c(1)) * &x);
        let sum = &p + &q;
        let naive = R::new(
            &(&p.num * &q.den) + &(&q.num * &p.den),
            &p.den * &q.den,
        );
        assert_eq!(sum, naive);
        let r = &c(1) / &(&x - &c(1));
        assert_eq!(&(&r - &r) + &r, r);
        assert!((&(&x / &(&x + &y)) - &(&x / &(&x + &y))).is_zero());
    }
}
