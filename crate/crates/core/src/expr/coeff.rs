use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// A field usable as polynomial coefficients.
///
/// `normalizer` picks the unit that turns a polynomial into its canonical
/// associate, given its coefficients in descending monomial order.
pub trait Coeff:
    Clone
    + fmt::Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    fn normalizer<'a>(coeffs: impl Iterator<Item = &'a Self>) -> Self;

    fn from_rational(q: &BigRational) -> Option<Self>;

    fn from_i64(n: i64) -> Self;

    /// Image modulo the prime of [`Fp`], when the denominator is a unit there.
    fn to_fp(&self) -> Option<Fp>;

    fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(Self::one() / self.clone())
        }
    }

    /// Text form that re-parses under the scalar grammar.
    fn render(&self) -> String;

    fn is_negative(&self) -> bool {
        false
    }
}

impl Coeff for BigRational {
    fn normalizer<'a>(coeffs: impl Iterator<Item = &'a Self>) -> Self {
        let mut lcm = BigInt::one();
        let mut gcd = BigInt::zero();
        let mut lead_negative = None;
        for c in coeffs {
            if lead_negative.is_none() {
                lead_negative = Some(Signed::is_negative(c));
            }
            lcm = lcm.lcm(c.denom());
            gcd = gcd.gcd(c.numer());
        }
        if gcd.is_zero() {
            return BigRational::one();
        }
        let unit = BigRational::new(lcm, gcd);
        if lead_negative == Some(true) {
            -unit
        } else {
            unit
        }
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        Some(q.clone())
    }

    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn to_fp(&self) -> Option<Fp> {
        Fp::from_rational(self)
    }

    fn render(&self) -> String {
        if self.is_integer() {
            self.numer().to_string()
        } else {
            format!("{}/{}", self.numer(), self.denom())
        }
    }

    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Integers modulo the Mersenne prime 2^61 - 1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Fp(u64);

impl Fp {
    pub const MODULUS: u64 = (1 << 61) - 1;

    pub fn new(v: u64) -> Self {
        Fp(v % Self::MODULUS)
    }

    pub fn value(self) -> u64 {
        self.0
    }

    fn reduce128(x: u128) -> u64 {
        let p = Self::MODULUS as u128;
        let lo = x & p;
        let hi = x >> 61;
        let mut s = lo + hi;
        while s >= p {
            s -= p;
        }
        s as u64
    }

    pub fn pow(self, mut e: u64) -> Fp {
        let mut base = self;
        let mut acc = Fp(1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            e >>= 1;
        }
        acc
    }

    fn from_bigint(n: &BigInt) -> Fp {
        let m = BigInt::from(Self::MODULUS);
        let r = n.mod_floor(&m);
        Fp(r.to_u64().expect("reduced residue fits in u64"))
    }
}

impl fmt::Debug for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Add for Fp {
    type Output = Fp;
    fn add(self, o: Fp) -> Fp {
        let s = self.0 + o.0;
        Fp(if s >= Self::MODULUS { s - Self::MODULUS } else { s })
    }
}

impl Sub for Fp {
    type Output = Fp;
    fn sub(self, o: Fp) -> Fp {
        if self.0 >= o.0 {
            Fp(self.0 - o.0)
        } else {
            Fp(self.0 + Self::MODULUS - o.0)
        }
    }
}

impl Neg for Fp {
    type Output = Fp;
    fn neg(self) -> Fp {
        if self.0 == 0 {
            self
        } else {
            Fp(Self::MODULUS - self.0)
        }
    }
}

impl Mul for Fp {
    type Output = Fp;
    fn mul(self, o: Fp) -> Fp {
        Fp(Self::reduce128(self.0 as u128 * o.0 as u128))
    }
}

impl Div for Fp {
    type Output = Fp;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Fp) -> Fp {
        assert!(o.0 != 0, "division by zero in Fp");
        self * o.pow(Self::MODULUS - 2)
    }
}

impl Zero for Fp {
    fn zero() -> Self {
        Fp(0)
    }
    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl One for Fp {
    fn one() -> Self {
        Fp(1)
    }
}

impl Coeff for Fp {
    fn normalizer<'a>(mut coeffs: impl Iterator<Item = &'a Self>) -> Self {
        match coeffs.next() {
            Some(lead) if !lead.is_zero() => Fp(1) / *lead,
            _ => Fp(1),
        }
    }

    fn from_rational(q: &BigRational) -> Option<Self> {
        let d = Fp::from_bigint(q.denom());
        if d.is_zero() {
            return None;
        }
        Some(Fp::from_bigint(q.numer()) / d)
    }

    fn from_i64(n: i64) -> Self {
        if n >= 0 {
            Fp::new(n as u64)
        } else {
            -Fp::new(n.unsigned_abs())
        }
    }

    fn to_fp(&self) -> Option<Fp> {
        Some(*self)
    }

    fn render(&self) -> String {
        self.0.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_normalizer_clears_denominators() {
        let cs = [q(-1, 2), q(3, 4)];
        let u = BigRational::normalizer(cs.iter());
        assert_eq!(u, q(-4, 1));
        assert_eq!(&cs[0] * &u, q(2, 1));
        assert_eq!(&cs[1] * &u, q(-3, 1));
    }

    #[test]
    fn fp_field_axioms_on_samples() {
        let a = Fp::from_i64(-7);
        let b = Fp::from_i64(12345);
        assert_eq!(a + (-a), Fp::zero());
        assert_eq!((a / b) * b, a);
        assert_eq!(Fp::from_rational(&q(1, 3)).unwrap() * Fp::from_i64(3), Fp::one());
    }
}
