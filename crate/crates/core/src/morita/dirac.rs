use super::{assumed_clauses, rank_clause, InfAction, InfBibundle, MoritaReport};
use crate::derivations::{dirac_algebroid, dirac_derivation, tensor_of_derivation, LieAlgebroidData};
use crate::dirac::pn::is_poisson_nijenhuis;
use crate::dirac::{is_compatible_tensor, is_forward_dirac, DiracStructure};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::compat::compatible_pair;
use crate::tensor::endo::{nabla_r, nabla_r_star, OneOneTensor};
use crate::tensor::field::VectorField;
use crate::tensor::form::{DiffForm, Multivector};
use crate::tensor::map::{relatedness_witnesses, SmoothMap};
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

use super::derivation::check_im_tensor_morita;

/// `(varpi-flat)^{-1}`, column `i` is `pi_varpi-sharp(dx^i)`.
pub fn pi_varpi_sharp<S: Scalar>(varpi: &DiffForm<S>) -> Result<Matrix<S>, TensorError> {
    linalg::inverse(&varpi.flat_matrix()).ok_or_else(|| TensorError::Singular("varpi is degenerate everywhere".into()))
}

fn sharp_of<S: Scalar>(sharp: &Matrix<S>, alpha: &DiffForm<S>) -> Result<VectorField<S>, TensorError> {
    VectorField::new(alpha.chart(), linalg::mul_vec(sharp, alpha.comps()))
}

/// Which moment map a Dirac structure sits over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Vector fields `X` on `P` with `d mu_1 X = v`, `d mu_2 X = 0`, `varpi-flat X = mu_1^* alpha`
/// on the generators of `L_1` (left), or `d mu_1 X = 0`, `d mu_2 X = -v`,
/// `varpi-flat X = mu_2^* alpha` on those of `L_2` (right, acting through the opposite).
pub fn dirac_action_table<S: Scalar>(
    mu1: &SmoothMap<S>,
    mu2: &SmoothMap<S>,
    varpi: &DiffForm<S>,
    l: &DiracStructure<S>,
    side: Side,
) -> Result<Vec<VectorField<S>>, TensorError> {
    let p = mu1.source();
    same_chart(p, mu2.source())?;
    same_chart(p, varpi.chart())?;
    let (mu, sign) = match side {
        Side::Left => (mu1, S::one()),
        Side::Right => (mu2, -S::one()),
    };
    same_chart(mu.target(), l.chart())?;
    let mut system = mu1.jacobian();
    system.extend(mu2.jacobian());
    system.extend(varpi.flat_matrix());
    let (n1, n2) = (mu1.target().dim(), mu2.target().dim());
    let mut out = Vec::with_capacity(l.generators().len());
    for (a, g) in l.generators().iter().enumerate() {
        let v: Vec<S> = g.v.comps().iter().map(|f| mu.pull(f) * &sign).collect();
        let mut rhs = match side {
            Side::Left => {
                let mut r = v;
                r.extend((0..n2).map(|_| S::zero()));
                r
            }
            Side::Right => {
                let mut r: Vec<S> = (0..n1).map(|_| S::zero()).collect();
                r.extend(v);
                r
            }
        };
        rhs.extend(mu.pullback_form(&g.alpha)?.comps().iter().cloned());
        let x = linalg::solve(&system, &rhs)
            .ok_or_else(|| TensorError::Singular(format!("no vector field on P induces generator s{}", a + 1)))?;
        out.push(VectorField::new(p, x)?);
    }
    Ok(out)
}

fn induced_action_clause<S: Scalar>(
    act: &InfAction<S>,
    expected_alg: &LieAlgebroidData<S>,
    b: &InfBibundle<S>,
    varpi: &DiffForm<S>,
    l: &DiracStructure<S>,
    side: Side,
) -> Verdict {
    if act.algebroid() != expected_alg {
        return Verdict::fail("the declared algebroid is not the algebroid of the Dirac structure");
    }
    match dirac_action_table(b.mu1(), b.mu2(), varpi, l, side) {
        Err(e) => Verdict::fail(e.to_string()),
        Ok(table) => {
            let frame = act.algebroid().bundle().frame();
            let w = table
                .iter()
                .zip(act.table())
                .enumerate()
                .filter(|(_, (x, y))| x != y)
                .map(|(a, (x, y))| format!("declared a({}) = {}, induced {}", frame[a], y.render(), x.render()))
                .collect();
            Verdict::from_witnesses(w)
        }
    }
}

pub fn check_dirac_morita<S: Scalar>(
    b: &InfBibundle<S>,
    l1: &DiracStructure<S>,
    l2: &DiracStructure<S>,
    varpi: &DiffForm<S>,
) -> Result<MoritaReport, TensorError> {
    let p = b.space();
    same_chart(p, varpi.chart())?;
    let (mu1, mu2) = (b.mu1(), b.mu2());
    let eta = mu2.pullback_form(l2.twist())?.sub(&mu1.pullback_form(l1.twist())?);
    let l2bar = l2.opposite();
    let mut report = CheckReport::new();

    let l_varpi = DiracStructure::graph_of_two_form_twisted(varpi, &eta)?;
    report.push("(a) mu1 is forward Dirac onto L1", is_forward_dirac(mu1, &l_varpi, l1)?);
    report.push("(a) mu2 is forward Dirac onto the opposite of L2", is_forward_dirac(mu2, &l_varpi, &l2bar)?);
    assumed_clauses(&mut report);

    let mut stack = varpi.flat_matrix();
    stack.extend(mu1.jacobian());
    stack.extend(mu2.jacobian());
    report.push("(c) ker varpi, ker d mu1, ker d mu2 meet trivially", rank_clause(&stack, p.dim(), p, "[varpi; d mu1; d mu2]"));

    let k1 = linalg::nullspace(&mu1.jacobian(), p.dim());
    let k2 = linalg::nullspace(&mu2.jacobian(), p.dim());
    let flat = varpi.flat_matrix();
    let mut w = Vec::new();
    for (a, x) in k1.iter().enumerate() {
        let fx = linalg::mul_vec(&flat, x);
        for (c, y) in k2.iter().enumerate() {
            let mut acc = S::zero();
            for (fi, yi) in fx.iter().zip(y) {
                acc = acc + &(fi.clone() * yi);
            }
            if !acc.is_zero() {
                w.push(format!("varpi(k1_{a}, k2_{c}) = {}", acc.render(p)));
            }
        }
    }
    report.push("(d) varpi(ker d mu1, ker d mu2) = 0", Verdict::from_witnesses(w));

    let residual = varpi.exterior_derivative().sub(&eta);
    let e = if residual.is_zero() {
        Verdict::Pass
    } else {
        Verdict::fail(format!("d varpi - (mu2^* eta2 - mu1^* eta1) = {}", residual.render()))
    };
    report.push("(e) d varpi = mu2^* eta2 - mu1^* eta1", e);

    let alg1 = dirac_algebroid(l1)?;
    let alg2 = dirac_algebroid(l2)?.opposite();
    report.push("left action is induced by varpi", induced_action_clause(b.left(), &alg1, b, varpi, l1, Side::Left));
    report.push("right action is induced by varpi", induced_action_clause(b.right(), &alg2, b, varpi, l2, Side::Right));
    Ok(report)
}

/// `sum_i (d mu / d p^k)^i mu^*(nabla^{r,*}_{d_i} alpha)`.
fn pulled_nabla_star<S: Scalar>(
    mu: &SmoothMap<S>,
    r: &OneOneTensor<S>,
    k: usize,
    alpha: &DiffForm<S>,
) -> Result<DiffForm<S>, TensorError> {
    let jac = mu.jacobian();
    let m = mu.target();
    let mut out = DiffForm::zero(mu.source(), 1);
    for (i, row) in jac.iter().enumerate() {
        if row[k].is_zero() {
            continue;
        }
        let n = nabla_r_star(r, &VectorField::coordinate(m, i), alpha)?;
        out = out.add(&mu.pullback_form(&n)?.scale(&row[k]));
    }
    Ok(out)
}

fn pn_side<S: Scalar>(
    report: &mut CheckReport,
    act: &InfAction<S>,
    pi: &Multivector<S>,
    r: &OneOneTensor<S>,
    sharp: &Matrix<S>,
    j: &OneOneTensor<S>,
    tag: &str,
) -> Result<(), TensorError> {
    let mu = act.moment();
    let (p, m) = (mu.source(), mu.target());
    same_chart(m, pi.chart())?;
    let pn = is_poisson_nijenhuis(pi, r)?;
    report.push(format!("pi{tag}, r{tag} is Poisson-Nijenhuis"), pn.overall());

    let expected = LieAlgebroidData::cotangent(pi).map(|a| if tag == "2" { a.opposite() } else { a });
    let mut w = Vec::new();
    match expected {
        Ok(a) if &a == act.algebroid() => {
            for jx in 0..m.dim() {
                let x = sharp_of(sharp, &mu.pullback_form(&DiffForm::differential(m, jx))?)?;
                if x != act.table()[jx] {
                    w.push(format!("a{tag}(d{}) = {}, expected {}", m.coords()[jx], act.table()[jx].render(), x.render()));
                }
            }
        }
        _ => w.push(format!("the declared algebroid is not the cotangent algebroid of pi{tag}")),
    }
    report.push(format!("a{tag} = pi_varpi-sharp mu{tag}^*"), Verdict::from_witnesses(w));

    let w = relatedness_witnesses(mu, j, r)?;
    report.push(format!("d mu{tag} J = r{tag} d mu{tag}"), Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for jx in 0..m.dim() {
        let a = DiffForm::differential(m, jx);
        let lhs = j.apply(&sharp_of(sharp, &mu.pullback_form(&a)?)?);
        let rhs = sharp_of(sharp, &mu.pullback_form(&r.transpose_apply(&a))?)?;
        let diff = lhs.sub(&rhs);
        if !diff.is_zero() {
            w.push(format!("at d{}: {}", m.coords()[jx], diff.render()));
        }
    }
    report.push(format!("J pi_varpi-sharp mu{tag}^* = pi_varpi-sharp mu{tag}^* r{tag}^*"), Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for k in 0..p.dim() {
        let e = VectorField::coordinate(p, k);
        for jx in 0..m.dim() {
            let a = DiffForm::differential(m, jx);
            let u = sharp_of(sharp, &mu.pullback_form(&a)?)?;
            let lhs = nabla_r(j, &e, &u)?;
            let rhs = sharp_of(sharp, &pulled_nabla_star(mu, r, k, &a)?)?;
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                w.push(format!("v = d/d{}, alpha = d{}: {}", p.coords()[k], m.coords()[jx], diff.render()));
            }
        }
    }
    report.push(
        format!("nabla^J pi_varpi-sharp mu{tag}^* = pi_varpi-sharp mu{tag}^* nabla^(r{tag},*)"),
        Verdict::from_witnesses(w),
    );
    Ok(())
}

pub fn check_pn_morita<S: Scalar>(
    b: &InfBibundle<S>,
    side1: (&Multivector<S>, &OneOneTensor<S>),
    side2: (&Multivector<S>, &OneOneTensor<S>),
    varpi: &DiffForm<S>,
    j: &OneOneTensor<S>,
) -> Result<MoritaReport, TensorError> {
    let p = b.space();
    same_chart(p, varpi.chart())?;
    same_chart(p, j.chart())?;
    let det = linalg::det(&varpi.flat_matrix());
    if det.is_zero() {
        return Err(TensorError::Singular("varpi is degenerate everywhere".into()));
    }
    let sharp = pi_varpi_sharp(varpi)?;
    let mut report = CheckReport::new();
    report.push("varpi is nondegenerate", Verdict::generic(S::degeneracy_locus(&[det], p)));
    pn_side(&mut report, b.left(), side1.0, side1.1, &sharp, j, "1")?;
    pn_side(&mut report, b.right(), side2.0, side2.1, &sharp, j, "2")?;
    report.extend_prefixed("varpi, J: ", compatible_pair(varpi, j)?);
    Ok(report)
}

pub fn check_dirac_nijenhuis_morita<S: Scalar>(
    b: &InfBibundle<S>,
    side1: (&DiracStructure<S>, &OneOneTensor<S>),
    side2: (&DiracStructure<S>, &OneOneTensor<S>),
    varpi: &DiffForm<S>,
    j: &OneOneTensor<S>,
) -> Result<MoritaReport, TensorError> {
    let (l1, r1) = side1;
    let (l2, r2) = side2;
    let mut report = CheckReport::new();
    report.extend_prefixed("Dirac: ", check_dirac_morita(b, l1, l2, varpi)?);
    let c1 = is_compatible_tensor(l1, r1)?;
    let c2 = is_compatible_tensor(l2, r2)?;
    let compatible = c1.holds() && c2.holds();
    report.extend_prefixed("L1, r1: ", c1);
    report.extend_prefixed("L2, r2: ", c2);
    if compatible {
        let t1 = tensor_of_derivation(&dirac_derivation(l1, r1)?)?;
        let t2 = tensor_of_derivation(&dirac_derivation(l2, r2)?)?;
        match check_im_tensor_morita(b, &t1, &t2, j, false) {
            Ok(rep) => report.extend_prefixed("IM tensors: ", rep),
            Err(e) => report.push("IM tensors", Verdict::fail(e.to_string())),
        }
    } else {
        report.push("IM tensors", Verdict::fail("not evaluated: r_i is not compatible with L_i"));
    }
    report.extend_prefixed("varpi, J: ", compatible_pair(varpi, j)?);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morita::fixtures::*;
    use crate::morita::InfBibundle;
    use crate::ScalarExpr;

    #[test]
    fn standard_pair_is_dirac_morita() {
        let f = standard();
        let rep = check_dirac_morita(&f.b, &f.l1, &f.l2, &f.varpi).unwrap();
        assert!(rep.holds(), "{rep}");
    }

    #[test]
    fn flipped_sign_fails_forward_dirac() {
        let f = standard();
        let du = DiffForm::differential(&f.p, 2).wedge(&DiffForm::differential(&f.p, 3));
        let plus = area(&f.p, 1).add(&du);
        let rep = check_dirac_morita(&f.b, &f.l1, &f.l2, &plus).unwrap();
        assert!(rep.clause("(a) mu2 is forward Dirac onto the opposite of L2").unwrap().verdict.is_fail());
        assert!(rep.clause("(a) mu1 is forward Dirac onto L1").unwrap().verdict.is_ok());
    }

    #[test]
    fn non_closed_varpi_fails_e() {
        let f = standard();
        let bumped = f.varpi.add(&DiffForm::from_terms(&f.p, 2, vec![(vec![0, 2], s(&f.p, "y"))]).unwrap());
        let rep = check_dirac_morita(&f.b, &f.l1, &f.l2, &bumped).unwrap();
        assert!(rep.clause("(e) d varpi = mu2^* eta2 - mu1^* eta1").unwrap().verdict.is_fail());
    }

    fn pn_bibundle(f: &Standard, pi1: &Multivector<ScalarExpr>, pi2: &Multivector<ScalarExpr>) -> InfBibundle<ScalarExpr> {
        let sharp = pi_varpi_sharp(&f.varpi).unwrap();
        let table = |mu: &SmoothMap<ScalarExpr>| {
            (0..2)
                .map(|i| sharp_of(&sharp, &mu.pullback_form(&DiffForm::differential(mu.target(), i)).unwrap()).unwrap())
                .collect::<Vec<_>>()
        };
        let (mu1, mu2) = (f.b.mu1().clone(), f.b.mu2().clone());
        let left = InfAction::new(LieAlgebroidData::cotangent(pi1).unwrap(), mu1.clone(), table(&mu1)).unwrap();
        let right = InfAction::right(&LieAlgebroidData::cotangent(pi2).unwrap(), mu2.clone(), table(&mu2)).unwrap();
        InfBibundle::new(left, right).unwrap()
    }

    #[test]
    fn pn_morita_examples() {
        let f = standard();
        let pi1 = Multivector::from_terms(&f.m1, 2, vec![(vec![0, 1], s(&f.m1, "-1"))]).unwrap();
        let pi2 = Multivector::from_terms(&f.m2, 2, vec![(vec![0, 1], s(&f.m2, "-1"))]).unwrap();
        let b = pn_bibundle(&f, &pi1, &pi2);
        let id = |c| OneOneTensor::identity(c);
        let rep = check_pn_morita(&b, (&pi1, &id(&f.m1)), (&pi2, &id(&f.m2)), &f.varpi, &id(&f.p)).unwrap();
        assert!(rep.holds(), "{rep}");
        let r1 = OneOneTensor::scalar(&f.m1, s(&f.m1, "x"));
        let r2 = OneOneTensor::scalar(&f.m2, s(&f.m2, "u"));
        let j = OneOneTensor::diagonal(&f.p, ["x", "x", "u", "u"].iter().map(|e| s(&f.p, e)).collect()).unwrap();
        let rep = check_pn_morita(&b, (&pi1, &r1), (&pi2, &r2), &f.varpi, &j).unwrap();
        assert!(rep.holds(), "{rep}");
    }

    #[test]
    fn dirac_nijenhuis_identity_and_nilpotent() {
        let f = standard();
        let id = |c| OneOneTensor::identity(c);
        let rep = check_dirac_nijenhuis_morita(&f.b, (&f.l1, &id(&f.m1)), (&f.l2, &id(&f.m2)), &f.varpi, &id(&f.p)).unwrap();
        assert!(rep.holds(), "{rep}");
        let mut m = linalg::identity::<ScalarExpr>(4);
        m[0][0] = ScalarExpr::zero();
        m[1][1] = ScalarExpr::zero();
        m[0][1] = ScalarExpr::one();
        let nil = OneOneTensor::new(&f.p, m).unwrap();
        let rep = check_dirac_nijenhuis_morita(&f.b, (&f.l1, &id(&f.m1)), (&f.l2, &id(&f.m2)), &f.varpi, &nil).unwrap();
        assert!(rep.clause("varpi, J: omega-flat o K = K^* o omega-flat").unwrap().verdict.is_fail());
    }

    #[test]
    fn dirac_and_pn_paths_agree_on_linear_fixture() {
        let f = standard();
        let r1 = OneOneTensor::scalar(&f.m1, s(&f.m1, "x"));
        let r2 = OneOneTensor::scalar(&f.m2, s(&f.m2, "u"));
        let j = OneOneTensor::diagonal(&f.p, ["x", "x", "u", "u"].iter().map(|e| s(&f.p, e)).collect()).unwrap();
        let rep = check_dirac_nijenhuis_morita(&f.b, (&f.l1, &r1), (&f.l2, &r2), &f.varpi, &j).unwrap();
        assert!(rep.holds(), "{rep}");
    }
}
