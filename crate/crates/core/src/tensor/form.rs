use itertools::Itertools;

use crate::expr::Chart;
use crate::scalar::Scalar;
use crate::tensor::field::VectorField;
use crate::tensor::{same_chart, TensorError};

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// Strictly increasing index tuples of length `k` in lexicographic order.
pub(crate) fn increasing(n: usize, k: usize) -> Vec<Vec<usize>> {
    (0..n).combinations(k).collect()
}

/// Lexicographic rank of a strictly increasing tuple.
pub(crate) fn rank_of(n: usize, idx: &[usize]) -> usize {
    let k = idx.len();
    let mut r = 0;
    let mut prev: isize = -1;
    for (i, &c) in idx.iter().enumerate() {
        for j in (prev + 1) as usize..c {
            r += binomial(n - 1 - j, k - 1 - i);
        }
        prev = c as isize;
    }
    r
}

/// Sorts an index tuple, returning the permutation sign, or `None` on repeats.
pub(crate) fn sort_with_sign(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            } else if v[j] == v[j + 1] {
                return None;
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

/// Components of an alternating tensor on increasing index tuples.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Alternating<S> {
    pub chart: Chart,
    pub degree: usize,
    pub comps: Vec<S>,
}

impl<S: Scalar> Alternating<S> {
    fn zero(chart: &Chart, degree: usize) -> Self {
        Alternating { chart: chart.clone(), degree, comps: vec![S::zero(); binomial(chart.dim(), degree)] }
    }

    fn get(&self, idx: &[usize]) -> S {
        match sort_with_sign(idx) {
            None => S::zero(),
            Some((sign, sorted)) => {
                let c = self.comps[rank_of(self.chart.dim(), &sorted)].clone();
                if sign < 0 {
                    -c
                } else {
                    c
                }
            }
        }
    }

    fn add_at(&mut self, idx: &[usize], v: S) {
        if let Some((sign, sorted)) = sort_with_sign(idx) {
            let r = rank_of(self.chart.dim(), &sorted);
            let cur = self.comps[r].clone();
            self.comps[r] = if sign < 0 { cur - &v } else { cur + &v };
        }
    }

    fn map(&self, f: impl Fn(&S) -> S) -> Self {
        Alternating { chart: self.chart.clone(), degree: self.degree, comps: self.comps.iter().map(f).collect() }
    }

    fn zip(&self, o: &Self, f: impl Fn(&S, &S) -> S) -> Self {
        Alternating {
            chart: self.chart.clone(),
            degree: self.degree,
            comps: self.comps.iter().zip(&o.comps).map(|(a, b)| f(a, b)).collect(),
        }
    }

    fn render(&self, prefix: &str, sep: &str) -> String {
        let n = self.chart.dim();
        let names = self.chart.coords();
        let parts: Vec<String> = increasing(n, self.degree)
            .into_iter()
            .zip(&self.comps)
            .filter(|(_, c)| !c.is_zero())
            .map(|(idx, c)| {
                let basis: Vec<String> = idx.iter().map(|&i| format!("{prefix}{}", names[i])).collect();
                if basis.is_empty() {
                    c.render(&self.chart)
                } else {
                    format!("({}){}", c.render(&self.chart), basis.join(sep))
                }
            })
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

/// A differential form of fixed degree. Degrees above the chart dimension
/// are allowed and are identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffForm<S>(pub(crate) Alternating<S>);

impl<S: Scalar> DiffForm<S> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        DiffForm(Alternating::zero(chart, degree))
    }

    /// Components on increasing index tuples in lexicographic order.
    pub fn new(chart: &Chart, degree: usize, comps: Vec<S>) -> Result<Self, TensorError> {
        if degree > chart.dim() {
            return Err(TensorError::DegreeOverflow { degree, dim: chart.dim() });
        }
        let expected = binomial(chart.dim(), degree);
        if comps.len() != expected {
            return Err(TensorError::Dimension { what: format!("{degree}-form"), expected, found: comps.len() });
        }
        Ok(DiffForm(Alternating { chart: chart.clone(), degree, comps }))
    }

    /// Sum of `coeff dx^{i1} ^ ... ^ dx^{ik}` over arbitrary index tuples.
    pub fn from_terms(chart: &Chart, degree: usize, terms: Vec<(Vec<usize>, S)>) -> Result<Self, TensorError> {
        if degree > chart.dim() {
            return Err(TensorError::DegreeOverflow { degree, dim: chart.dim() });
        }
        let mut a = Alternating::zero(chart, degree);
        for (idx, c) in terms {
            if idx.len() != degree || idx.iter().any(|&i| i >= chart.dim()) {
                return Err(TensorError::Invalid(format!("bad index tuple {idx:?} for a {degree}-form")));
            }
            a.add_at(&idx, c);
        }
        Ok(DiffForm(a))
    }

    pub fn function(chart: &Chart, f: S) -> Self {
        DiffForm(Alternating { chart: chart.clone(), degree: 0, comps: vec![f] })
    }

    pub fn one_form(chart: &Chart, comps: Vec<S>) -> Result<Self, TensorError> {
        Self::new(chart, 1, comps)
    }

    /// `dx^i`.
    pub fn differential(chart: &Chart, i: usize) -> Self {
        let mut a = Alternating::zero(chart, 1);
        a.comps[i] = S::one();
        DiffForm(a)
    }

    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn comps(&self) -> &[S] {
        &self.0.comps
    }

    /// Component on an arbitrary index tuple, with the alternating sign.
    pub fn get(&self, idx: &[usize]) -> S {
        self.0.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.0.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, o: &Self) -> Self {
        DiffForm(self.0.zip(&o.0, |a, b| a.clone() + b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        DiffForm(self.0.zip(&o.0, |a, b| a.clone() - b))
    }

    pub fn scale(&self, f: &S) -> Self {
        DiffForm(self.0.map(|c| c.clone() * f))
    }

    pub fn neg(&self) -> Self {
        DiffForm(self.0.map(|c| -c.clone()))
    }

    pub fn exterior_derivative(&self) -> Self {
        let n = self.chart().dim();
        let k = self.degree();
        let mut out = Alternating::zero(self.chart(), k + 1);
        if k + 1 > n {
            return DiffForm(out);
        }
        for (r, idx) in increasing(n, k + 1).into_iter().enumerate() {
            let mut acc = S::zero();
            for m in 0..idx.len() {
                let mut rest = idx.clone();
                let j = rest.remove(m);
                let d = self.get(&rest).partial(j);
                if d.is_zero() {
                    continue;
                }
                acc = if m % 2 == 0 { acc + &d } else { acc - &d };
            }
            out.comps[r] = acc;
        }
        DiffForm(out)
    }

    /// `i_v`, contracting the first slot.
    pub fn interior(&self, v: &VectorField<S>) -> Self {
        let n = self.chart().dim();
        let k = self.degree();
        if k == 0 {
            return DiffForm::zero(self.chart(), 0);
        }
        let mut out = Alternating::zero(self.chart(), k - 1);
        for (r, idx) in increasing(n, k - 1).into_iter().enumerate() {
            let mut acc = S::zero();
            for (i, vi) in v.comps().iter().enumerate() {
                if vi.is_zero() {
                    continue;
                }
                let mut full = vec![i];
                full.extend(idx.iter().copied());
                let c = self.get(&full);
                if c.is_zero() {
                    continue;
                }
                acc = acc + &(vi.clone() * &c);
            }
            out.comps[r] = acc;
        }
        DiffForm(out)
    }

    pub fn lie_derivative(&self, v: &VectorField<S>) -> Self {
        let a = self.exterior_derivative().interior(v);
        if self.degree() == 0 {
            return a;
        }
        a.add(&self.interior(v).exterior_derivative())
    }

    /// Value on `k` vector fields.
    pub fn eval(&self, vs: &[&VectorField<S>]) -> S {
        assert_eq!(vs.len(), self.degree(), "wrong number of arguments");
        let mut f = self.clone();
        for v in vs {
            f = f.interior(v);
        }
        f.0.comps[0].clone()
    }

    pub fn wedge(&self, o: &Self) -> Self {
        let n = self.chart().dim();
        let (p, q) = (self.degree(), o.degree());
        let mut out = Alternating::zero(self.chart(), p + q);
        if p + q > n {
            return DiffForm(out);
        }
        for (i, a) in increasing(n, p).into_iter().zip(&self.0.comps) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in increasing(n, q).into_iter().zip(&o.0.comps) {
                if b.is_zero() {
                    continue;
                }
                let mut idx = i.clone();
                idx.extend(j.iter().copied());
                out.add_at(&idx, a.clone() * b);
            }
        }
        DiffForm(out)
    }

    /// Matrix of `v -> i_v omega` for a 2-form: entry `[j][i] = omega_{ij}`.
    pub fn flat_matrix(&self) -> Vec<Vec<S>> {
        assert_eq!(self.degree(), 2, "flat needs a 2-form");
        let n = self.chart().dim();
        (0..n).map(|j| (0..n).map(|i| self.get(&[i, j])).collect()).collect()
    }

    /// Pairing of a 1-form with a vector field.
    pub fn pair(&self, v: &VectorField<S>) -> S {
        assert_eq!(self.degree(), 1);
        let mut acc = S::zero();
        for (a, b) in self.0.comps.iter().zip(v.comps()) {
            if a.is_zero() || b.is_zero() {
                continue;
            }
            acc = acc + &(a.clone() * b);
        }
        acc
    }

    pub fn render(&self) -> String {
        self.0.render("d", "^")
    }
}

pub fn exterior_derivative<S: Scalar>(a: &DiffForm<S>) -> DiffForm<S> {
    a.exterior_derivative()
}

pub fn interior<S: Scalar>(v: &VectorField<S>, a: &DiffForm<S>) -> Result<DiffForm<S>, TensorError> {
    same_chart(v.chart(), a.chart())?;
    Ok(a.interior(v))
}

pub fn lie_derivative<S: Scalar>(v: &VectorField<S>, a: &DiffForm<S>) -> Result<DiffForm<S>, TensorError> {
    same_chart(v.chart(), a.chart())?;
    Ok(a.lie_derivative(v))
}

/// An alternating multivector field.
#[derive(Clone, Debug, PartialEq)]
pub struct Multivector<S>(pub(crate) Alternating<S>);

impl<S: Scalar> Multivector<S> {
    pub fn zero(chart: &Chart, degree: usize) -> Self {
        Multivector(Alternating::zero(chart, degree))
    }

    pub fn new(chart: &Chart, degree: usize, comps: Vec<S>) -> Result<Self, TensorError> {
        if degree > chart.dim() {
            return Err(TensorError::DegreeOverflow { degree, dim: chart.dim() });
        }
        let expected = binomial(chart.dim(), degree);
        if comps.len() != expected {
            return Err(TensorError::Dimension {
                what: format!("{degree}-vector"),
                expected,
                found: comps.len(),
            });
        }
        Ok(Multivector(Alternating { chart: chart.clone(), degree, comps }))
    }

    pub fn from_terms(chart: &Chart, degree: usize, terms: Vec<(Vec<usize>, S)>) -> Result<Self, TensorError> {
        let f = DiffForm::from_terms(chart, degree, terms)?;
        Ok(Multivector(f.0))
    }

    /// Bivector with `pi^{ij}` read off an antisymmetric matrix.
    pub fn bivector_from_matrix(chart: &Chart, m: &[Vec<S>]) -> Result<Self, TensorError> {
        let n = chart.dim();
        let mut terms = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                terms.push((vec![i, j], m[i][j].clone()));
                if !(m[i][j].clone() + &m[j][i]).is_zero() || !m[i][i].is_zero() {
                    return Err(TensorError::NotAntisymmetric(format!(
                        "entries ({i},{j}) and ({j},{i}) are not opposite"
                    )));
                }
            }
        }
        Self::from_terms(chart, 2, terms)
    }

    pub fn chart(&self) -> &Chart {
        &self.0.chart
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn comps(&self) -> &[S] {
        &self.0.comps
    }

    pub fn get(&self, idx: &[usize]) -> S {
        self.0.get(idx)
    }

    pub fn is_zero(&self) -> bool {
        self.0.comps.iter().all(|c| c.is_zero())
    }

    pub fn scale(&self, f: &S) -> Self {
        Multivector(self.0.map(|c| c.clone() * f))
    }

    pub fn add(&self, o: &Self) -> Self {
        Multivector(self.0.zip(&o.0, |a, b| a.clone() + b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Multivector(self.0.zip(&o.0, |a, b| a.clone() - b))
    }

    pub fn neg(&self) -> Self {
        Multivector(self.0.map(|c| -c.clone()))
    }

    /// `pi^sharp(alpha) = pi(alpha, .)` for a bivector.
    pub fn sharp(&self, alpha: &DiffForm<S>) -> VectorField<S> {
        assert_eq!(self.degree(), 2, "sharp needs a bivector");
        let n = self.chart().dim();
        let comps = (0..n)
            .map(|j| {
                let mut acc = S::zero();
                for (i, a) in alpha.comps().iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let p = self.get(&[i, j]);
                    if p.is_zero() {
                        continue;
                    }
                    acc = acc + &(a.clone() * &p);
                }
                acc
            })
            .collect();
        VectorField::raw(self.chart(), comps)
    }

    /// Matrix of `pi^sharp`: column `i` holds `pi^sharp(dx^i)`.
    pub fn sharp_matrix(&self) -> Vec<Vec<S>> {
        let n = self.chart().dim();
        (0..n).map(|j| (0..n).map(|i| self.get(&[i, j])).collect()).collect()
    }

    pub fn render(&self) -> String {
        self.0.render("d/d", "^")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    fn chart3() -> Chart {
        Chart::new("R3", &["x", "y", "z"]).unwrap()
    }

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    #[test]
    fn ranks_are_lexicographic() {
        for (r, idx) in increasing(5, 3).iter().enumerate() {
            assert_eq!(rank_of(5, idx), r);
        }
    }

    #[test]
    fn d_squared_vanishes() {
        let c = chart3();
        let a = DiffForm::one_form(&c, vec![s(&c, "x*y^2"), s(&c, "z^3 - x"), s(&c, "x*y*z")]).unwrap();
        assert!(a.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn d_of_top_form_on_plane_is_empty() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let w: DiffForm<ScalarExpr> = DiffForm::differential(&c, 0).wedge(&DiffForm::differential(&c, 1));
        let dw = w.exterior_derivative();
        assert_eq!(dw.degree(), 3);
        assert!(dw.is_zero());
    }

    #[test]
    fn cartan_formula_on_functions() {
        let c = chart3();
        let f = DiffForm::function(&c, s(&c, "x^2*z"));
        let v = VectorField::new(&c, vec![s(&c, "1"), s(&c, "y"), s(&c, "x")]).unwrap();
        let l = f.lie_derivative(&v);
        assert_eq!(l.comps()[0], v.apply(&s(&c, "x^2*z")));
    }

    #[test]
    fn sharp_of_standard_bivector() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let pi = Multivector::from_terms(&c, 2, vec![(vec![0, 1], s(&c, "1"))]).unwrap();
        let dx: DiffForm<ScalarExpr> = DiffForm::differential(&c, 0);
        let dy: DiffForm<ScalarExpr> = DiffForm::differential(&c, 1);
        assert_eq!(pi.sharp(&dx), VectorField::coordinate(&c, 1));
        assert_eq!(pi.sharp(&dy), VectorField::coordinate(&c, 0).neg());
    }
}
