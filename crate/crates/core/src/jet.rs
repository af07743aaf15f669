//! Truncated Taylor expansions at a sample point.
//!
//! A `Jet` stores the Taylor coefficients of a function in the offsets from
//! the current sample point, correct up to total degree `order`. Running the
//! geometry layer on jets evaluates every check at that point without going
//! through rational-function canonicalization.

use std::cell::{Cell, RefCell};
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::expr::coeff::Coeff;
use crate::expr::monomial::Monomial;
use crate::expr::poly::Poly;
use crate::expr::Chart;
use crate::scalar::Scalar;
use crate::{Rational, ScalarExpr};

const EXACT: i32 = i32::MAX;

thread_local! {
    static POINT: RefCell<Option<SamplePoint>> = const { RefCell::new(None) };
    static DEGENERATE: Cell<bool> = const { Cell::new(false) };
    static MAX_ORDER: Cell<i32> = const { Cell::new(5) };
}

/// Coordinate values keyed by `chart.coord` or by the bare coordinate name,
/// plus a seed for coordinates that were never sampled.
#[derive(Clone, Debug, Default)]
pub struct SamplePoint {
    pub values: HashMap<String, Rational>,
    pub seed: u64,
}

impl SamplePoint {
    pub fn key(chart: &Chart, i: usize) -> String {
        format!("{}.{}", chart.name(), chart.coords()[i])
    }

    fn value_of(&self, chart: &Chart, i: usize) -> Rational {
        let name = &chart.coords()[i];
        if let Some(v) = self.values.get(&Self::key(chart, i)).or_else(|| self.values.get(name)) {
            return v.clone();
        }
        let mut h = std::collections::hash_map::DefaultHasher::new();
        name.hash(&mut h);
        self.seed.hash(&mut h);
        let bits = h.finish();
        let num = (bits % 2001) as i64 - 1000;
        let den = ((bits >> 20) % 97) as i64 + 3;
        Rational::new(num.into(), den.into())
    }
}

/// Runs `f` with `point` installed; returns the result and whether the
/// computation touched a pole or a vanishing divisor.
pub fn at_point<T>(point: SamplePoint, f: impl FnOnce() -> T) -> (T, bool) {
    let previous = POINT.with(|p| p.borrow_mut().replace(point));
    let was = DEGENERATE.with(|d| d.replace(false));
    let out = f();
    let degenerate = DEGENERATE.with(|d| d.replace(was));
    POINT.with(|p| *p.borrow_mut() = previous);
    (out, degenerate)
}

/// Truncation degree for newly created expansions on this thread.
pub fn set_jet_order(order: u32) {
    MAX_ORDER.with(|m| m.set(order.min(64) as i32));
}

fn max_order() -> i32 {
    MAX_ORDER.with(|m| m.get())
}

fn flag_degenerate() {
    DEGENERATE.with(|d| d.set(true));
}

fn coordinate_value(chart: &Chart, i: usize) -> Rational {
    POINT.with(|p| match p.borrow().as_ref() {
        Some(pt) => pt.value_of(chart, i),
        None => SamplePoint::default().value_of(chart, i),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Jet<F> {
    poly: Poly<F>,
    order: i32,
}

impl<F: Coeff> Jet<F> {
    fn exact(poly: Poly<F>) -> Self {
        Self::bounded(poly, EXACT)
    }

    fn bounded(poly: Poly<F>, order: i32) -> Self {
        let cap = max_order();
        if order == EXACT && poly.total_degree() as i32 <= cap {
            return Jet { poly, order };
        }
        let order = order.min(cap);
        if order < 0 {
            return Jet { poly: Poly::zero(), order };
        }
        Jet { poly: poly.truncate(order as u32), order }
    }

    pub fn constant(c: F) -> Self {
        Jet { poly: Poly::constant(c), order: EXACT }
    }

    /// Value at the sample point.
    pub fn value(&self) -> F {
        assert!(self.order >= 0, "jet order exhausted; raise the jet order");
        self.poly.constant_term()
    }

    pub fn order(&self) -> Option<u32> {
        (self.order != EXACT).then_some(self.order.max(-1) as u32)
    }

    fn shifted(&self) -> Self {
        let c = self.poly.constant_term();
        Jet { poly: &self.poly - &Poly::constant(c), order: self.order }
    }

    fn mul_jet(&self, o: &Self) -> Self {
        let t = self.order.min(o.order);
        if t == EXACT {
            return Self::exact(&self.poly * &o.poly);
        }
        if t < 0 {
            return Jet { poly: Poly::zero(), order: t };
        }
        let t = t.min(max_order());
        Jet { poly: self.poly.mul_truncated(&o.poly, t as u32), order: t }
    }
}

impl<F: Coeff> Add<&Jet<F>> for Jet<F> {
    type Output = Jet<F>;
    fn add(self, o: &Jet<F>) -> Jet<F> {
        Jet::bounded(&self.poly + &o.poly, self.order.min(o.order))
    }
}

impl<F: Coeff> Sub<&Jet<F>> for Jet<F> {
    type Output = Jet<F>;
    fn sub(self, o: &Jet<F>) -> Jet<F> {
        Jet::bounded(&self.poly - &o.poly, self.order.min(o.order))
    }
}

impl<F: Coeff> Mul<&Jet<F>> for Jet<F> {
    type Output = Jet<F>;
    fn mul(self, o: &Jet<F>) -> Jet<F> {
        self.mul_jet(o)
    }
}

impl<F: Coeff> Add for Jet<F> {
    type Output = Jet<F>;
    fn add(self, o: Jet<F>) -> Jet<F> {
        self + &o
    }
}

impl<F: Coeff> Sub for Jet<F> {
    type Output = Jet<F>;
    fn sub(self, o: Jet<F>) -> Jet<F> {
        self - &o
    }
}

impl<F: Coeff> Mul for Jet<F> {
    type Output = Jet<F>;
    fn mul(self, o: Jet<F>) -> Jet<F> {
        self.mul_jet(&o)
    }
}

impl<F: Coeff> Neg for Jet<F> {
    type Output = Jet<F>;
    fn neg(self) -> Jet<F> {
        Jet { poly: -&self.poly, order: self.order }
    }
}

impl<F: Coeff> Zero for Jet<F> {
    fn zero() -> Self {
        Jet { poly: Poly::zero(), order: EXACT }
    }
    /// Every carried coefficient vanishes, so the germ is zero up to the tracked order.
    fn is_zero(&self) -> bool {
        self.poly.is_zero()
    }
}

impl<F: Coeff> One for Jet<F> {
    fn one() -> Self {
        Jet::constant(F::one())
    }
}

impl<F: Coeff> Scalar for Jet<F> {
    fn from_rational(q: &Rational) -> Self {
        match F::from_rational(q) {
            Some(c) => Jet::constant(c),
            None => {
                flag_degenerate();
                Jet::zero()
            }
        }
    }

    fn coordinate(chart: &Chart, i: usize) -> Self {
        let v = Self::from_rational(&coordinate_value(chart, i));
        Jet::exact(&v.poly + &Poly::var(i))
    }

    fn from_expr(f: &ScalarExpr, chart: &Chart) -> Self {
        let coords: Vec<Self> = (0..chart.dim()).map(|i| Self::coordinate(chart, i)).collect();
        let lift = |q: &Rational| Self::from_rational(q);
        let num = f.num().eval_with(&coords, lift);
        if f.den().is_constant() {
            let d = Self::from_rational(&f.den().constant_term());
            return num * &d.inv().unwrap_or_else(Jet::zero);
        }
        let den = f.den().eval_with(&coords, lift);
        match den.inv() {
            Some(d) => num * &d,
            None => Jet::zero(),
        }
    }

    fn partial(&self, i: usize) -> Self {
        let order = if self.order == EXACT { EXACT } else { self.order - 1 };
        Jet { poly: self.poly.partial(i), order }
    }

    fn inv(&self) -> Option<Self> {
        let c0 = self.poly.constant_term();
        let Some(c0_inv) = c0.inv() else {
            flag_degenerate();
            return None;
        };
        if self.poly.is_constant() {
            return Some(Jet { poly: Poly::constant(c0_inv), order: self.order });
        }
        let order = self.order.min(max_order());
        if order < 0 {
            return Some(Jet { poly: Poly::zero(), order });
        }
        // 1/(c0 (1 + t)) = c0^{-1} sum (-t)^k
        let t = Jet { poly: self.shifted().poly.scale(&c0_inv), order };
        let neg_t = -t;
        let mut acc = Jet { poly: Poly::one(), order };
        let mut power = Jet { poly: Poly::one(), order };
        for _ in 0..order {
            power = power.mul_jet(&neg_t);
            acc = acc + &power;
        }
        Some(Jet { poly: acc.poly.scale(&c0_inv), order })
    }

    fn compose(&self, args: &[Self]) -> Self {
        let offsets: Vec<Self> = args.iter().map(|a| a.shifted()).collect();
        let out = self.poly.eval_with(&offsets, |c| Jet::constant(c.clone()));
        let order = out.order.min(self.order);
        Jet::bounded(out.poly, order)
    }

    fn reindex(&self, map: &[Option<usize>]) -> Self {
        Jet { poly: self.poly.reindex_dropping(map), order: self.order }
    }

    fn render(&self, _chart: &Chart) -> String {
        format!("<sample value {}>", self.value().render())
    }

    fn is_unit(&self) -> bool {
        self.order >= 0 && !self.poly.constant_term().is_zero()
    }

    fn note_vanishing_pivot(&self) {
        flag_degenerate();
    }

    fn independent_of(&self, i: usize) -> bool {
        Scalar::partial(self, i).is_zero()
    }
}

impl<F: Coeff> Jet<F> {
    /// Monomials currently carried, for tests.
    pub fn support(&self) -> Vec<Monomial> {
        self.poly.terms().iter().map(|(m, _)| m.clone()).collect()
    }
}
