use super::dirac::{check_dirac_nijenhuis_morita, check_pn_morita};
use super::{check_algebroid_morita, InfAction, InfBibundle, MoritaReport};
use crate::derivations::{dirac_algebroid, LieAlgebroidData};
use crate::dirac::pn::{dirac_hierarchy, poisson_hierarchy, Side};
use crate::dirac::DiracStructure;
use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::form::{DiffForm, Multivector};
use crate::tensor::TensorError;
use crate::verdict::{CheckReport, Verdict};

pub enum HierarchyInput<'a, S> {
    /// `varpi^n-flat = varpi-flat J^{-n}`, `pi_i^n`, actions `J^n a`.
    Pn {
        pi1: &'a Multivector<S>,
        r1: &'a OneOneTensor<S>,
        pi2: &'a Multivector<S>,
        r2: &'a OneOneTensor<S>,
    },
    /// `varpi_n-flat = varpi-flat J^n`, `L_i^(0,n)`, actions unchanged.
    Cotangent {
        l1: &'a DiracStructure<S>,
        r1: &'a OneOneTensor<S>,
        l2: &'a DiracStructure<S>,
        r2: &'a OneOneTensor<S>,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub enum HierarchyStructures<S> {
    Poisson(Multivector<S>, Multivector<S>),
    Dirac(DiracStructure<S>, DiracStructure<S>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hierarchy<S> {
    pub varpi: DiffForm<S>,
    pub bibundle: InfBibundle<S>,
    pub structures: HierarchyStructures<S>,
    pub report: MoritaReport,
}

/// The 2-form whose flat map is `m` (entry `[j][i] = omega_ij`).
pub fn two_form_from_flat<S: Scalar>(chart: &Chart, m: &Matrix<S>) -> Result<DiffForm<S>, TensorError> {
    let n = chart.dim();
    let mut terms = Vec::new();
    for i in 0..n {
        if !m[i][i].is_zero() {
            return Err(TensorError::NotAntisymmetric("flat matrix".into()));
        }
        for j in i + 1..n {
            if m[j][i].clone() + &m[i][j] != S::zero() {
                return Err(TensorError::NotAntisymmetric("flat matrix".into()));
            }
            terms.push((vec![i, j], m[j][i].clone()));
        }
    }
    DiffForm::from_terms(chart, 2, terms)
}

pub fn hierarchy_bibundle<S: Scalar>(b: &InfBibundle<S>, n: u32, input: HierarchyInput<'_, S>) -> Result<Hierarchy<S>, TensorError> {
    let varpi = b.varpi().ok_or_else(|| TensorError::Invalid("the bibundle carries no varpi".into()))?;
    let j = b.j().ok_or_else(|| TensorError::Invalid("the bibundle carries no J".into()))?;
    let p = b.space();
    let mut report = CheckReport::new();
    match input {
        HierarchyInput::Pn { pi1, r1, pi2, r2 } => {
            let det = j.det();
            if det.is_zero() {
                return Err(TensorError::Singular("J is not invertible".into()));
            }
            report.push("J is invertible", Verdict::generic(S::degeneracy_locus(&[det], p)));
            let jinv = j.inverse().ok_or_else(|| TensorError::Singular("J is not invertible".into()))?;
            let flat = linalg::mul(&varpi.flat_matrix(), jinv.pow(n).matrix());
            let new_varpi = two_form_from_flat(p, &flat)
                .map_err(|_| TensorError::Invalid("varpi-flat J^{-n} is not antisymmetric; (varpi, J) is not a compatible pair".into()))?;
            let (q1, q2) = (poisson_hierarchy(pi1, r1, n)?, poisson_hierarchy(pi2, r2, n)?);
            let jn = j.pow(n);
            let deform = |act: &InfAction<S>| act.table().iter().map(|v| jn.apply(v)).collect::<Vec<_>>();
            let left = InfAction::new(LieAlgebroidData::cotangent(&q1)?, b.mu1().clone(), deform(b.left()))?;
            let right = InfAction::right(&LieAlgebroidData::cotangent(&q2)?, b.mu2().clone(), deform(b.right()))?;
            let nb = InfBibundle::new(left, right)?.with_varpi(new_varpi.clone())?.with_j(j.clone())?;
            report.extend_prefixed("algebroid: ", check_algebroid_morita(&nb));
            report.extend_prefixed("PN: ", check_pn_morita(&nb, (&q1, r1), (&q2, r2), &new_varpi, j)?);
            report.push("deformed actions are complete", Verdict::assumed("deformed actions need not be complete"));
            Ok(Hierarchy { varpi: new_varpi, bibundle: nb, structures: HierarchyStructures::Poisson(q1, q2), report })
        }
        HierarchyInput::Cotangent { l1, r1, l2, r2 } => {
            let (m1, v1) = dirac_hierarchy(l1, r1, n, Side::Cotangent)?;
            let (m2, v2) = dirac_hierarchy(l2, r2, n, Side::Cotangent)?;
            report.push("kernel condition on L1", v1);
            report.push("kernel condition on L2", v2);
            let flat = linalg::mul(&varpi.flat_matrix(), j.pow(n).matrix());
            let new_varpi = two_form_from_flat(p, &flat)
                .map_err(|_| TensorError::Invalid("varpi-flat J^n is not antisymmetric; (varpi, J) is not a compatible pair".into()))?;
            let left = InfAction::new(dirac_algebroid(&m1)?, b.mu1().clone(), b.left().table().to_vec())?;
            let right = InfAction::right(&dirac_algebroid(&m2)?, b.mu2().clone(), b.right().table().to_vec())?;
            let nb = InfBibundle::new(left, right)?.with_varpi(new_varpi.clone())?.with_j(j.clone())?;
            report.extend_prefixed("algebroid: ", check_algebroid_morita(&nb));
            report.extend_prefixed("Dirac-Nijenhuis: ", check_dirac_nijenhuis_morita(&nb, (&m1, r1), (&m2, r2), &new_varpi, j)?);
            Ok(Hierarchy { varpi: new_varpi, bibundle: nb, structures: HierarchyStructures::Dirac(m1, m2), report })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::dirac::pi_varpi_sharp;
    use crate::morita::fixtures::*;
    use crate::tensor::field::VectorField;
    use crate::ScalarExpr;

    fn pn_fixture(c: &str) -> (Standard, InfBibundle<ScalarExpr>, Multivector<ScalarExpr>, Multivector<ScalarExpr>) {
        let f = standard();
        let pi1 = Multivector::from_terms(&f.m1, 2, vec![(vec![0, 1], s(&f.m1, "-1"))]).unwrap();
        let pi2 = Multivector::from_terms(&f.m2, 2, vec![(vec![0, 1], s(&f.m2, "-1"))]).unwrap();
        let sharp = pi_varpi_sharp(&f.varpi).unwrap();
        let table = |mu: &crate::tensor::map::SmoothMap<ScalarExpr>| {
            (0..2)
                .map(|i| {
                    let a = mu.pullback_form(&DiffForm::differential(mu.target(), i)).unwrap();
                    VectorField::new(&f.p, linalg::mul_vec(&sharp, a.comps())).unwrap()
                })
                .collect::<Vec<_>>()
        };
        let left = InfAction::new(LieAlgebroidData::cotangent(&pi1).unwrap(), f.b.mu1().clone(), table(f.b.mu1())).unwrap();
        let right = InfAction::right(&LieAlgebroidData::cotangent(&pi2).unwrap(), f.b.mu2().clone(), table(f.b.mu2())).unwrap();
        let j = OneOneTensor::scalar(&f.p, s(&f.p, c));
        let b = InfBibundle::new(left, right).unwrap().with_varpi(f.varpi.clone()).unwrap().with_j(j).unwrap();
        (f, b, pi1, pi2)
    }

    #[test]
    fn pn_hierarchy_scales() {
        let (f, b, pi1, pi2) = pn_fixture("2");
        let r1 = OneOneTensor::scalar(&f.m1, s(&f.m1, "2"));
        let r2 = OneOneTensor::scalar(&f.m2, s(&f.m2, "2"));
        for n in 1..=3u32 {
            let h = hierarchy_bibundle(&b, n, HierarchyInput::Pn { pi1: &pi1, r1: &r1, pi2: &pi2, r2: &r2 }).unwrap();
            let c = ScalarExpr::from_int(1 << n);
            assert_eq!(h.varpi, f.varpi.scale(&c.inv().unwrap()));
            assert_eq!(h.structures, HierarchyStructures::Poisson(pi1.scale(&c), pi2.scale(&c)));
            assert!(h.report.holds(), "{}", h.report);
        }
    }

    #[test]
    fn identity_is_a_fixed_point() {
        let (f, b, pi1, pi2) = pn_fixture("1");
        let id1 = OneOneTensor::identity(&f.m1);
        let id2 = OneOneTensor::identity(&f.m2);
        let h = hierarchy_bibundle(&b, 2, HierarchyInput::Pn { pi1: &pi1, r1: &id1, pi2: &pi2, r2: &id2 }).unwrap();
        assert_eq!(h.varpi, f.varpi);
        assert!(h.report.holds());
        let b = f.b.clone().with_j(OneOneTensor::identity(&f.p)).unwrap();
        let h = hierarchy_bibundle(&b, 2, HierarchyInput::Cotangent { l1: &f.l1, r1: &id1, l2: &f.l2, r2: &id2 }).unwrap();
        assert_eq!(h.varpi, f.varpi);
        assert!(h.report.holds(), "{}", h.report);
    }

    #[test]
    fn cotangent_hierarchy_scales() {
        let f = standard();
        let b = f.b.clone().with_j(OneOneTensor::scalar(&f.p, s(&f.p, "3"))).unwrap();
        let r1 = OneOneTensor::scalar(&f.m1, s(&f.m1, "3"));
        let r2 = OneOneTensor::scalar(&f.m2, s(&f.m2, "3"));
        let h = hierarchy_bibundle(&b, 2, HierarchyInput::Cotangent { l1: &f.l1, r1: &r1, l2: &f.l2, r2: &r2 }).unwrap();
        assert_eq!(h.varpi, f.varpi.scale(&ScalarExpr::from_int(9)));
        assert!(h.report.holds(), "{}", h.report);
    }

    #[test]
    fn singular_j_is_rejected() {
        let (f, b, pi1, pi2) = pn_fixture("0");
        let id1 = OneOneTensor::identity(&f.m1);
        let id2 = OneOneTensor::identity(&f.m2);
        assert!(hierarchy_bibundle(&b, 1, HierarchyInput::Pn { pi1: &pi1, r1: &id1, pi2: &pi2, r2: &id2 }).is_err());
    }
}
