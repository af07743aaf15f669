//! Infinitesimal Morita bibundles and the Morita checks built on them.

pub mod derivation;
pub mod dirac;
pub mod hierarchy;

use crate::derivations::{LieAlgebroidData, TrivialBundle};
use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::field::{bracket, VectorField};
use crate::tensor::form::DiffForm;
use crate::tensor::map::SmoothMap;
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

pub use derivation::{check_derivation_morita, check_im_tensor_morita};
pub use dirac::{check_dirac_morita, check_dirac_nijenhuis_morita, check_pn_morita, dirac_action_table, pi_varpi_sharp};
pub use hierarchy::{hierarchy_bibundle, Hierarchy, HierarchyInput, HierarchyStructures};

/// Clause-by-clause Morita verdicts.
pub type MoritaReport = CheckReport;

/// `a: Gamma(A) -> X(P)` over the moment map `mu: P -> M`.
#[derive(Clone, Debug, PartialEq)]
pub struct InfAction<S> {
    algebroid: LieAlgebroidData<S>,
    moment: SmoothMap<S>,
    table: Vec<VectorField<S>>,
}

impl<S: Scalar> InfAction<S> {
    /// Refuses tables that are not anchor compatible or not bracket preserving.
    pub fn new(algebroid: LieAlgebroidData<S>, moment: SmoothMap<S>, table: Vec<VectorField<S>>) -> Result<Self, TensorError> {
        same_chart(moment.target(), algebroid.bundle().base())?;
        let k = algebroid.bundle().rank();
        if table.len() != k {
            return Err(TensorError::Dimension { what: "action table".into(), expected: k, found: table.len() });
        }
        for v in &table {
            same_chart(moment.source(), v.chart())?;
        }
        let act = InfAction { algebroid, moment, table };
        if let Some(w) = act.violations().into_iter().next() {
            return Err(TensorError::Invalid(format!("not an infinitesimal action: {w}")));
        }
        Ok(act)
    }

    /// A right action of `A`, i.e. a left action of the opposite algebroid.
    pub fn right(algebroid: &LieAlgebroidData<S>, moment: SmoothMap<S>, table: Vec<VectorField<S>>) -> Result<Self, TensorError> {
        Self::new(algebroid.opposite(), moment, table)
    }

    pub fn algebroid(&self) -> &LieAlgebroidData<S> {
        &self.algebroid
    }

    pub fn moment(&self) -> &SmoothMap<S> {
        &self.moment
    }

    pub fn table(&self) -> &[VectorField<S>] {
        &self.table
    }

    pub fn space(&self) -> &Chart {
        self.moment.source()
    }

    /// `a(s) = sum mu^*(s^a) a(e_a)`.
    pub fn apply(&self, s: &[S]) -> VectorField<S> {
        let mut out = VectorField::zero(self.space());
        for (a, f) in s.iter().enumerate() {
            if !f.is_zero() {
                out = out.add(&self.table[a].scale(&self.moment.pull(f)));
            }
        }
        out
    }

    /// `dim P x rank`, column `a` is `a(e_a)`.
    pub fn matrix(&self) -> Matrix<S> {
        let n = self.space().dim();
        (0..n).map(|i| self.table.iter().map(|v| v.comp(i).clone()).collect()).collect()
    }

    fn violations(&self) -> Vec<String> {
        let frame = self.algebroid.bundle().frame();
        let mut out = Vec::new();
        for (a, v) in self.table.iter().enumerate() {
            let pushed = self.moment.push_vector(v);
            let rho = self.algebroid.anchor()[a].comps().iter().map(|f| self.moment.pull(f));
            if pushed.iter().zip(rho).any(|(x, y)| *x != y) {
                out.push(format!("d{}(a({})) differs from the anchor", self.moment.name(), frame[a]));
            }
        }
        let k = self.table.len();
        for a in 0..k {
            for b in a + 1..k {
                let lhs = self.apply(&self.algebroid.structure()[a][b]);
                let rhs = bracket(&self.table[a], &self.table[b]);
                if lhs != rhs {
                    out.push(format!("a([{0}, {1}]) != [a({0}), a({1})]", frame[a], frame[b]));
                }
            }
        }
        out
    }
}

/// `M1 <- P -> M2` with a left `A1`-action and a left `A2^op`-action.
#[derive(Clone, Debug, PartialEq)]
pub struct InfBibundle<S> {
    left: InfAction<S>,
    right: InfAction<S>,
    varpi: Option<DiffForm<S>>,
    j: Option<crate::tensor::endo::OneOneTensor<S>>,
}

impl<S: Scalar> InfBibundle<S> {
    pub fn new(left: InfAction<S>, right: InfAction<S>) -> Result<Self, TensorError> {
        same_chart(left.space(), right.space())?;
        left.moment.require_projection()?;
        right.moment.require_projection()?;
        Ok(InfBibundle { left, right, varpi: None, j: None })
    }

    pub fn with_varpi(mut self, varpi: DiffForm<S>) -> Result<Self, TensorError> {
        same_chart(self.space(), varpi.chart())?;
        if varpi.degree() != 2 {
            return Err(TensorError::Invalid("varpi must be a 2-form".into()));
        }
        self.varpi = Some(varpi);
        Ok(self)
    }

    pub fn with_j(mut self, j: crate::tensor::endo::OneOneTensor<S>) -> Result<Self, TensorError> {
        same_chart(self.space(), j.chart())?;
        self.j = Some(j);
        Ok(self)
    }

    pub fn left(&self) -> &InfAction<S> {
        &self.left
    }

    pub fn right(&self) -> &InfAction<S> {
        &self.right
    }

    pub fn varpi(&self) -> Option<&DiffForm<S>> {
        self.varpi.as_ref()
    }

    pub fn j(&self) -> Option<&crate::tensor::endo::OneOneTensor<S>> {
        self.j.as_ref()
    }

    pub fn space(&self) -> &Chart {
        self.left.space()
    }

    pub fn mu1(&self) -> &SmoothMap<S> {
        &self.left.moment
    }

    pub fn mu2(&self) -> &SmoothMap<S> {
        &self.right.moment
    }
}

fn disjoint_names(a: &[String], b: &[String], la: &str, lb: &str) -> (Vec<String>, Vec<String>) {
    if a.iter().any(|x| b.contains(x)) {
        (a.iter().map(|x| format!("{x}_{la}")).collect(), b.iter().map(|x| format!("{x}_{lb}")).collect())
    } else {
        (a.to_vec(), b.to_vec())
    }
}

/// `M1 x M2`, renaming coordinates with the chart names when they collide.
pub fn product_chart(m1: &Chart, m2: &Chart) -> Result<Chart, TensorError> {
    let (c1, c2) = disjoint_names(m1.coords(), m2.coords(), m1.name(), m2.name());
    let mut coords = c1;
    coords.extend(c2);
    Ok(Chart::new(&format!("{}x{}", m1.name(), m2.name()), &coords)?)
}

fn shift<S: Scalar>(f: &S, offset: usize, dim: usize) -> S {
    let map: Vec<Option<usize>> = (0..dim).map(|i| Some(i + offset)).collect();
    f.reindex(&map)
}

/// `(xi_1, xi_2) -> a_1(xi_1) + a_2(xi_2)` on `A_1 x A_2^op` over `M1 x M2`.
pub fn sum_of_actions<S: Scalar>(b: &InfBibundle<S>) -> Result<InfAction<S>, TensorError> {
    let (a1, a2) = (b.left.algebroid(), b.right.algebroid());
    let (m1, m2) = (a1.bundle().base(), a2.bundle().base());
    let base = product_chart(m1, m2)?;
    let (n1, n2) = (m1.dim(), m2.dim());
    let (k1, k2) = (a1.bundle().rank(), a2.bundle().rank());
    let (f1, f2) = disjoint_names(a1.bundle().frame(), a2.bundle().frame(), a1.bundle().name(), a2.bundle().name());
    let mut frame = f1;
    frame.extend(f2);
    let bundle = TrivialBundle::new(&format!("{}x{}", a1.bundle().name(), a2.bundle().name()), &base, &frame)?;

    let mut anchor = Vec::with_capacity(k1 + k2);
    for v in a1.anchor() {
        let mut comps: Vec<S> = v.comps().iter().map(|f| shift(f, 0, n1)).collect();
        comps.extend((0..n2).map(|_| S::zero()));
        anchor.push(VectorField::new(&base, comps)?);
    }
    for v in a2.anchor() {
        let mut comps: Vec<S> = (0..n1).map(|_| S::zero()).collect();
        comps.extend(v.comps().iter().map(|f| shift(f, n1, n2)));
        anchor.push(VectorField::new(&base, comps)?);
    }
    let k = k1 + k2;
    let mut structure = vec![vec![vec![S::zero(); k]; k]; k];
    for a in 0..k1 {
        for c in 0..k1 {
            for e in 0..k1 {
                structure[a][c][e] = shift(&a1.structure()[a][c][e], 0, n1);
            }
        }
    }
    for a in 0..k2 {
        for c in 0..k2 {
            for e in 0..k2 {
                structure[k1 + a][k1 + c][k1 + e] = shift(&a2.structure()[a][c][e], n1, n2);
            }
        }
    }
    let algebroid = LieAlgebroidData::new(bundle, anchor, structure)?;
    let mut formulas = b.mu1().formulas().to_vec();
    formulas.extend(b.mu2().formulas().iter().cloned());
    let moment = SmoothMap::new("mu", b.space(), &base, formulas)?;
    let mut table = b.left.table().to_vec();
    table.extend(b.right.table().iter().cloned());
    InfAction::new(algebroid, moment, table)
}

/// Printable loci of the maximal minors, or a failure if the rank is short.
pub(crate) fn rank_clause<S: Scalar>(m: &Matrix<S>, rank: usize, chart: &Chart, what: &str) -> Verdict {
    if rank == 0 {
        return Verdict::generic(Vec::new());
    }
    let got = if m.is_empty() { 0 } else { linalg::rank(m) };
    if got < rank {
        return Verdict::fail(format!("{what} has rank {got} < {rank}"));
    }
    Verdict::generic(S::degeneracy_locus(&linalg::minors(m, rank), chart))
}

fn image_is_kernel<S: Scalar>(act: &InfAction<S>, other: &SmoothMap<S>, la: &str, lm: &str) -> Verdict {
    let p = act.space();
    let a = act.matrix();
    let jac = other.jacobian();
    let k = act.table().len();
    let mut w = Vec::new();
    for (c, v) in act.table().iter().enumerate() {
        let pushed = other.push_vector(v);
        if pushed.iter().any(|x| !x.is_zero()) {
            w.push(format!("d{lm}({la}({})) != 0", act.algebroid().bundle().frame()[c]));
        }
    }
    if !w.is_empty() {
        return Verdict::Fail { witness: w };
    }
    let jrank = if jac.is_empty() { 0 } else { linalg::rank(&jac) };
    let kernel = p.dim() - jrank;
    if k != kernel {
        return Verdict::fail(format!("rank of {la} is {k} but ker d{lm} has rank {kernel}"));
    }
    let mut locus = match rank_clause(&a, k, p, la) {
        Verdict::GenericPass { locus } => locus,
        v => return v,
    };
    if let Verdict::GenericPass { locus: l } = rank_clause(&jac, jrank, p, &format!("d{lm}")) {
        locus.extend(l);
    }
    Verdict::generic(locus)
}

pub(crate) fn assumed_clauses(report: &mut CheckReport) {
    report.push("actions are complete", Verdict::assumed("global property, not decidable from chart data"));
    report.push(
        "fibers of the moment maps are connected and simply connected",
        Verdict::assumed("global property, not decidable from chart data"),
    );
}

pub fn check_algebroid_morita<S: Scalar>(b: &InfBibundle<S>) -> MoritaReport {
    let mut report = CheckReport::new();
    let mut w = Vec::new();
    let (f1, f2) = (b.left.algebroid().bundle().frame(), b.right.algebroid().bundle().frame());
    for (a, u) in b.left.table().iter().enumerate() {
        for (c, v) in b.right.table().iter().enumerate() {
            let br = bracket(u, v);
            if !br.is_zero() {
                w.push(format!("[a1({}), a2({})] = {}", f1[a], f2[c], br.render()));
            }
        }
    }
    report.push("actions commute", Verdict::from_witnesses(w));
    let p = b.space();
    report.push("a1 is injective", rank_clause(&b.left.matrix(), b.left.table().len(), p, "a1"));
    report.push("a2 is injective", rank_clause(&b.right.matrix(), b.right.table().len(), p, "a2"));
    report.push("im a1 = ker d mu2", image_is_kernel(&b.left, b.mu2(), "a1", "mu2"));
    report.push("im a2 = ker d mu1", image_is_kernel(&b.right, b.mu1(), "a2", "mu1"));
    assumed_clauses(&mut report);
    report
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;
    use crate::derivations::dirac_algebroid;
    use crate::dirac::DiracStructure;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    pub fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    pub fn vf(c: &Chart, comps: &[&str]) -> VectorField<ScalarExpr> {
        VectorField::new(c, comps.iter().map(|e| s(c, e)).collect()).unwrap()
    }

    pub fn area(c: &Chart, sign: i64) -> DiffForm<ScalarExpr> {
        DiffForm::differential(c, 0).wedge(&DiffForm::differential(c, 1)).scale(&ScalarExpr::from_int(sign))
    }

    pub struct Standard {
        pub p: Chart,
        pub m1: Chart,
        pub m2: Chart,
        pub l1: DiracStructure<ScalarExpr>,
        pub l2: DiracStructure<ScalarExpr>,
        pub varpi: DiffForm<ScalarExpr>,
        pub b: InfBibundle<ScalarExpr>,
    }

    /// `P = R^4`, `varpi = dx^dy - du^dv`, `L_i = graph(dx^dy)`.
    pub fn standard() -> Standard {
        let p = Chart::new("P", &["x", "y", "u", "v"]).unwrap();
        let m1 = Chart::new("M1", &["x", "y"]).unwrap();
        let m2 = Chart::new("M2", &["u", "v"]).unwrap();
        let l1 = DiracStructure::graph_of_two_form(&area(&m1, 1)).unwrap();
        let l2 = DiracStructure::graph_of_two_form(&area(&m2, 1)).unwrap();
        let mu1 = SmoothMap::projection("mu1", &p, &m1, &[0, 1]).unwrap();
        let mu2 = SmoothMap::projection("mu2", &p, &m2, &[2, 3]).unwrap();
        let left = InfAction::new(dirac_algebroid(&l1).unwrap(), mu1, vec![vf(&p, &["1", "0", "0", "0"]), vf(&p, &["0", "1", "0", "0"])])
            .unwrap();
        let right =
            InfAction::right(&dirac_algebroid(&l2).unwrap(), mu2, vec![vf(&p, &["0", "0", "-1", "0"]), vf(&p, &["0", "0", "0", "-1"])])
                .unwrap();
        let dx = DiffForm::differential(&p, 0).wedge(&DiffForm::differential(&p, 1));
        let du = DiffForm::differential(&p, 2).wedge(&DiffForm::differential(&p, 3));
        let varpi = dx.sub(&du);
        let b = InfBibundle::new(left, right).unwrap().with_varpi(varpi.clone()).unwrap();
        Standard { p, m1, m2, l1, l2, varpi, b }
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn standard_pair_is_algebroid_morita() {
        let f = standard();
        let rep = check_algebroid_morita(&f.b);
        assert!(rep.holds(), "{rep}");
        assert_eq!(rep.overall(), Verdict::generic(Vec::new()));
    }

    #[test]
    fn overlapping_right_action_fails() {
        let f = standard();
        let alg = f.b.right().algebroid().clone();
        let m2 = f.m2.clone();
        let mu2 = SmoothMap::projection("mu2", &f.p, &m2, &[2, 3]).unwrap();
        let table = vec![vf(&f.p, &["1", "0", "-1", "0"]), vf(&f.p, &["0", "0", "0", "-1"])];
        let right = InfAction::new(alg, mu2, table).unwrap();
        let b = InfBibundle::new(f.b.left().clone(), right).unwrap();
        let rep = check_algebroid_morita(&b);
        assert!(rep.clause("im a2 = ker d mu1").unwrap().verdict.is_fail());
    }

    #[test]
    fn sum_of_actions_is_an_action() {
        let f = standard();
        let sum = sum_of_actions(&f.b).unwrap();
        assert_eq!(sum.table().len(), 4);
        assert_eq!(sum.algebroid().bundle().base().dim(), 4);
        let _ = &f.m1;
    }

    #[test]
    fn action_validation_rejects_wrong_anchor() {
        let f = standard();
        let mu1 = SmoothMap::projection("mu1", &f.p, &f.m1, &[0, 1]).unwrap();
        let table = vec![vf(&f.p, &["0", "1", "0", "0"]), vf(&f.p, &["1", "0", "0", "0"])];
        assert!(InfAction::new(f.b.left().algebroid().clone(), mu1, table).is_err());
    }
}
