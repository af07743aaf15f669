//! Split Courant calculus on `TM + T*M` and Dirac structures.

pub mod modular;
pub mod pn;

use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::{nabla_r, nabla_r_star, OneOneTensor};
use crate::tensor::field::{bracket, VectorField};
use crate::tensor::form::{DiffForm, Multivector};
use crate::tensor::map::SmoothMap;
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

pub use modular::{modular_field, pn_modular_field};
pub use pn::{dirac_hierarchy, is_poisson_nijenhuis, magri_morosi, poisson_hierarchy, Side};

/// A section `(v, alpha)` of `TM + T*M`.
#[derive(Clone, Debug, PartialEq)]
pub struct CourantSection<S> {
    pub v: VectorField<S>,
    pub alpha: DiffForm<S>,
}

impl<S: Scalar> CourantSection<S> {
    pub fn new(v: VectorField<S>, alpha: DiffForm<S>) -> Result<Self, TensorError> {
        same_chart(v.chart(), alpha.chart())?;
        if alpha.degree() != 1 {
            return Err(TensorError::Invalid("the form part of a section must be a 1-form".into()));
        }
        Ok(CourantSection { v, alpha })
    }

    pub fn zero(chart: &Chart) -> Self {
        CourantSection { v: VectorField::zero(chart), alpha: DiffForm::zero(chart, 1) }
    }

    pub fn chart(&self) -> &Chart {
        self.v.chart()
    }

    /// Vector components followed by form components.
    pub fn to_vec(&self) -> Vec<S> {
        let mut out = self.v.comps().to_vec();
        out.extend(self.alpha.comps().iter().cloned());
        out
    }

    pub fn from_vec(chart: &Chart, comps: &[S]) -> Self {
        let n = chart.dim();
        CourantSection {
            v: VectorField::raw(chart, comps[..n].to_vec()),
            alpha: DiffForm::one_form(chart, comps[n..].to_vec()).expect("n components"),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        CourantSection { v: self.v.add(&o.v), alpha: self.alpha.add(&o.alpha) }
    }

    pub fn scale(&self, f: &S) -> Self {
        CourantSection { v: self.v.scale(f), alpha: self.alpha.scale(f) }
    }

    pub fn is_zero(&self) -> bool {
        self.v.is_zero() && self.alpha.is_zero()
    }

    /// `<(u, alpha), (v, beta)> = alpha(v) + beta(u)`.
    pub fn pairing(&self, o: &Self) -> S {
        self.alpha.pair(&o.v) + o.alpha.pair(&self.v)
    }

    pub fn render(&self) -> String {
        format!("({}, {})", self.v.render(), self.alpha.render())
    }
}

/// `([u,v], L_u beta - i_v d alpha + i_u i_v eta)`.
pub fn courant_bracket<S: Scalar>(
    s1: &CourantSection<S>,
    s2: &CourantSection<S>,
    eta: &DiffForm<S>,
) -> Result<CourantSection<S>, TensorError> {
    same_chart(s1.chart(), s2.chart())?;
    same_chart(s1.chart(), eta.chart())?;
    if eta.degree() != 3 {
        return Err(TensorError::Invalid("the twist must be a 3-form".into()));
    }
    if !eta.exterior_derivative().is_zero() {
        return Err(TensorError::Invalid("the twist is not closed".into()));
    }
    Ok(bracket_unchecked(s1, s2, eta))
}

fn bracket_unchecked<S: Scalar>(s1: &CourantSection<S>, s2: &CourantSection<S>, eta: &DiffForm<S>) -> CourantSection<S> {
    let (u, alpha) = (&s1.v, &s1.alpha);
    let (v, beta) = (&s2.v, &s2.alpha);
    let form = beta
        .lie_derivative(u)
        .sub(&alpha.exterior_derivative().interior(v))
        .add(&eta.interior(v).interior(u));
    CourantSection { v: bracket(u, v), alpha: form }
}

/// A maximal isotropic subbundle spanned by `dim` sections.
#[derive(Clone, Debug, PartialEq)]
pub struct DiracStructure<S> {
    chart: Chart,
    generators: Vec<CourantSection<S>>,
    twist: DiffForm<S>,
}

impl<S: Scalar> DiracStructure<S> {
    /// Validates rank, the Lagrangian condition and closedness of the twist.
    pub fn new(chart: &Chart, generators: Vec<CourantSection<S>>, twist: DiffForm<S>) -> Result<Self, TensorError> {
        let n = chart.dim();
        if generators.len() != n {
            return Err(TensorError::Dimension { what: "Dirac generators".into(), expected: n, found: generators.len() });
        }
        for g in &generators {
            same_chart(chart, g.chart())?;
        }
        same_chart(chart, twist.chart())?;
        if twist.degree() != 3 {
            return Err(TensorError::Invalid("the twist must be a 3-form".into()));
        }
        if !twist.exterior_derivative().is_zero() {
            return Err(TensorError::Invalid("the twist is not closed".into()));
        }
        let l = DiracStructure { chart: chart.clone(), generators, twist };
        if linalg::rank(&l.generator_matrix()) < n {
            return Err(TensorError::Singular("generators are linearly dependent".into()));
        }
        if let Some(w) = l.lagrangian_witnesses().into_iter().next() {
            return Err(TensorError::Invalid(format!("not Lagrangian: {w}")));
        }
        Ok(l)
    }

    pub fn graph_of_bivector(pi: &Multivector<S>) -> Result<Self, TensorError> {
        if pi.degree() != 2 {
            return Err(TensorError::Invalid("graph of a bivector needs degree 2".into()));
        }
        let chart = pi.chart();
        let gens = (0..chart.dim())
            .map(|i| {
                let dx = DiffForm::differential(chart, i);
                CourantSection { v: pi.sharp(&dx), alpha: dx }
            })
            .collect();
        Self::new(chart, gens, DiffForm::zero(chart, 3))
    }

    /// Graph of a 2-form, twisted by its own differential.
    pub fn graph_of_two_form(omega: &DiffForm<S>) -> Result<Self, TensorError> {
        Self::graph_of_two_form_twisted(omega, &omega.exterior_derivative())
    }

    pub fn graph_of_two_form_twisted(omega: &DiffForm<S>, eta: &DiffForm<S>) -> Result<Self, TensorError> {
        if omega.degree() != 2 {
            return Err(TensorError::Invalid("graph of a form needs degree 2".into()));
        }
        let chart = omega.chart();
        let gens = (0..chart.dim())
            .map(|i| {
                let e = VectorField::coordinate(chart, i);
                let a = omega.interior(&e);
                CourantSection { v: e, alpha: a }
            })
            .collect();
        Self::new(chart, gens, eta.clone())
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn generators(&self) -> &[CourantSection<S>] {
        &self.generators
    }

    pub fn twist(&self) -> &DiffForm<S> {
        &self.twist
    }

    /// Same generators with another closed twist.
    pub fn with_twist(&self, eta: DiffForm<S>) -> Result<Self, TensorError> {
        Self::new(&self.chart, self.generators.clone(), eta)
    }

    /// `2n x n`; column `a` is generator `a`.
    pub fn generator_matrix(&self) -> Matrix<S> {
        linalg::transpose(&self.generators.iter().map(|g| g.to_vec()).collect())
    }

    pub fn lagrangian_witnesses(&self) -> Vec<String> {
        let mut out = Vec::new();
        for a in 0..self.generators.len() {
            for b in a..self.generators.len() {
                let p = self.generators[a].pairing(&self.generators[b]);
                if !p.is_zero() {
                    out.push(format!("<s{a}, s{b}> = {}", p.render(&self.chart)));
                }
            }
        }
        out
    }

    /// Nonzero pairings of `s` with the generators. Empty iff `s` lies in `L`.
    pub fn membership_witnesses(&self, s: &CourantSection<S>) -> Vec<String> {
        self.generators
            .iter()
            .enumerate()
            .filter_map(|(a, g)| {
                let p = g.pairing(s);
                (!p.is_zero()).then(|| format!("<s{a}, .> = {}", p.render(&self.chart)))
            })
            .collect()
    }

    pub fn contains(&self, s: &CourantSection<S>) -> bool {
        self.membership_witnesses(s).is_empty()
    }

    /// Coefficients of `s` in the generator frame.
    pub fn expand(&self, s: &CourantSection<S>) -> Option<Vec<S>> {
        linalg::solve(&self.generator_matrix(), &s.to_vec())
    }

    /// Printable zero set of the maximal minors of the generator matrix.
    pub fn rank_locus(&self) -> Vec<String> {
        S::degeneracy_locus(&linalg::minors(&self.generator_matrix(), self.chart.dim()), &self.chart)
    }

    /// The opposite structure `{(v, -alpha)}`, twisted by `-eta`.
    pub fn opposite(&self) -> Self {
        DiracStructure {
            chart: self.chart.clone(),
            generators: self
                .generators
                .iter()
                .map(|g| CourantSection { v: g.v.clone(), alpha: g.alpha.neg() })
                .collect(),
            twist: self.twist.neg(),
        }
    }
}

/// Closure of the generators under the twisted Courant bracket.
pub fn is_involutive<S: Scalar>(l: &DiracStructure<S>) -> Verdict {
    let g = l.generators();
    let mut witness = Vec::new();
    for a in 0..g.len() {
        for b in a + 1..g.len() {
            let br = bracket_unchecked(&g[a], &g[b], l.twist());
            if !l.contains(&br) {
                witness.push(format!("[s{a}, s{b}] = {} is not in L", br.render()));
            }
        }
    }
    Verdict::from_witnesses(witness)
}

fn render_on<S: Scalar>(basis: &Chart, scalars: &Chart, comps: &[S], prefix: &str) -> String {
    let parts: Vec<String> = comps
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| format!("({}){}{}", c.render(scalars), prefix, basis.coords()[i]))
        .collect();
    if parts.is_empty() {
        "0".into()
    } else {
        parts.join(" + ")
    }
}

/// Whether `phi` pushes `L_P` forward onto `L_M`, decided over the function field of `P`.
pub fn is_forward_dirac<S: Scalar>(
    phi: &SmoothMap<S>,
    l_p: &DiracStructure<S>,
    l_m: &DiracStructure<S>,
) -> Result<Verdict, TensorError> {
    same_chart(phi.source(), l_p.chart())?;
    same_chart(phi.target(), l_m.chart())?;
    let proj = phi.require_projection()?.clone();
    let p = phi.source();
    let m = phi.target().dim();
    let g = l_p.generators();
    // (v, beta) with beta in the image of phi^*: the fiber components of beta vanish
    let fiber_rows: Matrix<S> = proj
        .fiber
        .iter()
        .map(|&f| g.iter().map(|s| s.alpha.comps()[f].clone()).collect())
        .collect();
    let null = linalg::nullspace(&fiber_rows, g.len());
    let jac = phi.jacobian();
    let pushed: Vec<Vec<S>> = null
        .iter()
        .map(|c| {
            let mut v = vec![S::zero(); p.dim()];
            let mut beta = vec![S::zero(); p.dim()];
            for (k, ck) in c.iter().enumerate() {
                if ck.is_zero() {
                    continue;
                }
                for i in 0..p.dim() {
                    v[i] = v[i].clone() + &(ck.clone() * g[k].v.comp(i));
                    beta[i] = beta[i].clone() + &(ck.clone() * &g[k].alpha.comps()[i]);
                }
            }
            let mut out = linalg::mul_vec(&jac, &v);
            out.extend(proj.base.iter().map(|&b| beta[b].clone()));
            out
        })
        .collect();
    let pulled: Vec<Vec<S>> = l_m.generators().iter().map(|s| s.to_vec().iter().map(|x| phi.pull(x)).collect()).collect();
    let w = linalg::transpose(&pushed);
    if pushed.is_empty() || linalg::rank(&w) < m {
        return Ok(Verdict::fail(format!(
            "pushforward of L_P has rank {} < {m}",
            if pushed.is_empty() { 0 } else { linalg::rank(&w) }
        )));
    }
    let pair = |x: &[S], y: &[S]| {
        let mut acc = S::zero();
        for i in 0..m {
            acc = acc + &(x[m + i].clone() * &y[i]) + &(y[m + i].clone() * &x[i]);
        }
        acc
    };
    for x in &pushed {
        for (k, y) in pulled.iter().enumerate() {
            let q = pair(x, y);
            if !q.is_zero() {
                return Ok(Verdict::fail(format!(
                    "pushed element ({}, {}) pairs to {} with generator {k} of L_M",
                    render_on(phi.target(), p, &x[..m], "d/d"),
                    render_on(phi.target(), p, &x[m..], "d"),
                    q.render(p)
                )));
            }
        }
    }
    let locus = S::degeneracy_locus(&linalg::minors(&w, m), p);
    Ok(Verdict::generic(locus))
}

/// Clauses `(r, r^*) L in L` and `D^r_{d_i} L in L`.
pub fn is_compatible_tensor<S: Scalar>(l: &DiracStructure<S>, r: &OneOneTensor<S>) -> Result<CheckReport, TensorError> {
    same_chart(l.chart(), r.chart())?;
    let chart = l.chart();
    let mut report = CheckReport::new();
    let mut w = Vec::new();
    for (a, g) in l.generators().iter().enumerate() {
        let s = CourantSection { v: r.apply(&g.v), alpha: r.transpose_apply(&g.alpha) };
        if !l.contains(&s) {
            w.push(format!("(r, r^*) s{a} = {}", s.render()));
        }
    }
    report.push("(r, r^*) preserves L", Verdict::from_witnesses(w));
    let mut w = Vec::new();
    for i in 0..chart.dim() {
        let e = VectorField::coordinate(chart, i);
        for (a, g) in l.generators().iter().enumerate() {
            let s = CourantSection { v: nabla_r(r, &e, &g.v)?, alpha: nabla_r_star(r, &e, &g.alpha)? };
            if !l.contains(&s) {
                w.push(format!("D^r_(d/d{}) s{a} = {}", chart.coords()[i], s.render()));
            }
        }
    }
    report.push("D^r preserves L", Verdict::from_witnesses(w));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    fn r2() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    fn pi_std(c: &Chart, f: &str) -> Multivector<ScalarExpr> {
        Multivector::from_terms(c, 2, vec![(vec![0, 1], s(c, f))]).unwrap()
    }

    #[test]
    fn graph_of_standard_bivector() {
        let c = r2();
        let l = DiracStructure::graph_of_bivector(&pi_std(&c, "1")).unwrap();
        assert_eq!(l.generators()[0].v, VectorField::coordinate(&c, 1));
        assert_eq!(l.generators()[1].v, VectorField::coordinate(&c, 0).neg());
        assert_eq!(is_involutive(&l), Verdict::Pass);
    }

    #[test]
    fn graph_of_area_form() {
        let c = r2();
        let w: DiffForm<ScalarExpr> = DiffForm::differential(&c, 0).wedge(&DiffForm::differential(&c, 1));
        let l = DiracStructure::graph_of_two_form(&w).unwrap();
        assert_eq!(l.generators()[0].alpha, DiffForm::differential(&c, 1));
        assert_eq!(l.generators()[1].alpha, DiffForm::differential(&c, 0).neg());
    }

    #[test]
    fn twisted_closure_on_three_chart() {
        let c = Chart::new("R3", &["x", "y", "z"]).unwrap();
        let w = DiffForm::from_terms(&c, 2, vec![(vec![1, 2], s(&c, "x"))]).unwrap();
        let untwisted = DiracStructure::graph_of_two_form_twisted(&w, &DiffForm::zero(&c, 3)).unwrap();
        assert!(is_involutive(&untwisted).is_fail());
        let twisted = DiracStructure::graph_of_two_form(&w).unwrap();
        assert_eq!(is_involutive(&twisted), Verdict::Pass);
    }

    #[test]
    fn courant_bracket_twist_term() {
        let c = Chart::new("R3", &["x", "y", "z"]).unwrap();
        let eta = DiffForm::from_terms(&c, 3, vec![(vec![0, 1, 2], s(&c, "y"))]).unwrap();
        let s1 = CourantSection { v: VectorField::coordinate(&c, 0), alpha: DiffForm::zero(&c, 1) };
        let s2 = CourantSection { v: VectorField::coordinate(&c, 1), alpha: DiffForm::zero(&c, 1) };
        let b = courant_bracket(&s1, &s2, &eta).unwrap();
        assert!(b.v.is_zero());
        assert_eq!(b.alpha.comps(), &[s(&c, "0"), s(&c, "0"), s(&c, "-y")]);
    }

    #[test]
    fn forward_dirac_standard_realization() {
        let p = Chart::new("P", &["x", "y", "u", "v"]).unwrap();
        let m = r2();
        let varpi = DiffForm::from_terms(&p, 2, vec![(vec![0, 1], s(&p, "1")), (vec![2, 3], s(&p, "-1"))]).unwrap();
        let lp = DiracStructure::graph_of_two_form(&varpi).unwrap();
        let pr = SmoothMap::projection("mu1", &p, &m, &[0, 1]).unwrap();
        let area = DiffForm::from_terms(&m, 2, vec![(vec![0, 1], s(&m, "1"))]).unwrap();
        let lm = DiracStructure::graph_of_two_form(&area).unwrap();
        assert!(is_forward_dirac(&pr, &lp, &lm).unwrap().is_ok());
        let lm2 = DiracStructure::graph_of_bivector(&pi_std(&m, "2")).unwrap();
        assert!(is_forward_dirac(&pr, &lp, &lm2).unwrap().is_fail());
    }

    #[test]
    fn compatible_tensor_examples() {
        let c = r2();
        let l = DiracStructure::graph_of_bivector(&pi_std(&c, "1")).unwrap();
        for f in ["1", "5", "x"] {
            let r = OneOneTensor::scalar(&c, s(&c, f));
            assert!(is_compatible_tensor(&l, &r).unwrap().holds(), "r = {f} Id");
        }
    }
}
