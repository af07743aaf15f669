//! The scalar interface the geometry layer is written against.

use std::cell::RefCell;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Zero};

use crate::expr::gcd::{gcd, squarefree};
use crate::expr::poly::Poly;
use crate::expr::Chart;
use crate::{Rational, ScalarExpr};

/// Smooth functions on a chart, as far as the engine needs them.
///
/// Variables are chart positions; charts themselves live on the containers.
pub trait Scalar:
    Clone
    + Debug
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
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// The `i`-th coordinate function of `chart`.
    fn coordinate(chart: &Chart, i: usize) -> Self;

    /// Brings an exact expression over `chart` into this representation.
    fn from_expr(f: &ScalarExpr, chart: &Chart) -> Self;

    fn partial(&self, i: usize) -> Self;

    fn inv(&self) -> Option<Self>;

    fn div(&self, o: &Self) -> Option<Self> {
        Some(self.clone() * &o.inv()?)
    }

    /// Substitutes `args[i]` for variable `i`.
    fn compose(&self, args: &[Self]) -> Self;

    /// Moves variable `i` to position `map[i]`. Variables mapped to `None`
    /// must not occur.
    fn reindex(&self, map: &[Option<usize>]) -> Self;

    /// Lower is a better elimination pivot. Only called on nonzero values.
    fn pivot_weight(&self) -> u32 {
        0
    }

    fn render(&self, chart: &Chart) -> String;

    /// Hook called on every pivot and divisor used by elimination.
    fn note_divisor(&self) {}

    /// Usable as an elimination pivot.
    fn is_unit(&self) -> bool {
        !self.is_zero()
    }

    /// Hook called when a column is nonzero but has no usable pivot.
    fn note_vanishing_pivot(&self) {}

    /// Printable description of the common zero set of `minors`.
    fn degeneracy_locus(_minors: &[Self], _chart: &Chart) -> Vec<String> {
        Vec::new()
    }

    /// Whether the value is known not to depend on variable `i`.
    fn independent_of(&self, i: usize) -> bool {
        self.partial(i).is_zero()
    }
}

thread_local! {
    static DIVISORS: RefCell<Option<Vec<Poly<Rational>>>> = const { RefCell::new(None) };
}

/// Runs `f` and returns every nonconstant polynomial that exact elimination
/// divided by while it ran.
pub fn collect_divisors<T>(f: impl FnOnce() -> T) -> (T, Vec<Poly<Rational>>) {
    let previous = DIVISORS.with(|d| d.borrow_mut().replace(Vec::new()));
    let out = f();
    let got = DIVISORS.with(|d| std::mem::replace(&mut *d.borrow_mut(), previous));
    (out, got.unwrap_or_default())
}

fn record_divisor(p: &Poly<Rational>) {
    if p.is_constant() {
        return;
    }
    DIVISORS.with(|d| {
        if let Some(v) = d.borrow_mut().as_mut() {
            if !v.contains(p) {
                v.push(p.clone());
            }
        }
    });
}

impl Scalar for ScalarExpr {
    fn from_rational(q: &Rational) -> Self {
        ScalarExpr::constant(q.clone())
    }

    fn coordinate(_chart: &Chart, i: usize) -> Self {
        ScalarExpr::var(i)
    }

    fn from_expr(f: &ScalarExpr, _chart: &Chart) -> Self {
        f.clone()
    }

    fn partial(&self, i: usize) -> Self {
        ScalarExpr::partial(self, i)
    }

    fn inv(&self) -> Option<Self> {
        let r = ScalarExpr::inv(self)?;
        record_divisor(self.num());
        Some(r)
    }

    fn compose(&self, args: &[Self]) -> Self {
        ScalarExpr::compose(self, args)
    }

    fn reindex(&self, map: &[Option<usize>]) -> Self {
        ScalarExpr::reindex(self, map).expect("reindexed function depends on a dropped variable")
    }

    fn pivot_weight(&self) -> u32 {
        if self.constant_value().is_some() {
            0
        } else {
            1 + self.total_degree() * 4 + (self.num().len() as u32).min(3)
        }
    }

    fn render(&self, chart: &Chart) -> String {
        ScalarExpr::render(self, chart.coords())
    }

    fn note_divisor(&self) {
        record_divisor(self.num());
    }

    fn degeneracy_locus(minors: &[Self], chart: &Chart) -> Vec<String> {
        let mut g = Poly::zero();
        for m in minors {
            if m.is_zero() {
                continue;
            }
            g = gcd(&g, m.num());
        }
        if g.is_zero() || g.is_constant() {
            return Vec::new();
        }
        let s = squarefree(&g);
        vec![format!("det = {}", s.render(chart.coords()))]
    }

    fn independent_of(&self, i: usize) -> bool {
        !self.uses_var(i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;

    #[test]
    fn locus_is_squarefree_gcd() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let a = parse_scalar("x^2*y", &c).unwrap();
        let b = parse_scalar("x^3", &c).unwrap();
        assert_eq!(ScalarExpr::degeneracy_locus(&[a, b], &c), vec!["det = x".to_string()]);
    }

    #[test]
    fn divisor_collection_is_scoped() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let f = parse_scalar("x + y", &c).unwrap();
        let (_, got) = collect_divisors(|| Scalar::inv(&f));
        assert_eq!(got.len(), 1);
        let (_, none) = collect_divisors(|| ());
        assert!(none.is_empty());
    }
}
