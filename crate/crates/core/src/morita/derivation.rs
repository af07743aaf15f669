use super::{InfAction, InfBibundle, MoritaReport};
use crate::derivations::{check_nijenhuis_equations, derivation_of_tensor, OneDerivation};
use crate::scalar::Scalar;
use crate::tensor::endo::{nabla_r, nijenhuis_torsion, OneOneTensor};
use crate::tensor::field::VectorField;
use crate::tensor::map::relatedness_witnesses;
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

/// `nabla_{d mu (d/dp^k)} e_a`, with coefficients pulled back to `P`.
fn pulled_connection<S: Scalar>(act: &InfAction<S>, d: &OneDerivation<S>, k: usize, a: usize) -> Vec<S> {
    let jac = act.moment().jacobian();
    let rank = d.bundle().rank();
    let mut out = vec![S::zero(); rank];
    for (i, g) in d.conn().iter().enumerate() {
        let c = &jac[i][k];
        if c.is_zero() {
            continue;
        }
        for (b, o) in out.iter_mut().enumerate() {
            if !g[b][a].is_zero() {
                *o = o.clone() + &(c.clone() * &act.moment().pull(&g[b][a]));
            }
        }
    }
    out
}

/// `a(s)` for a section whose coefficients already live on `P`.
fn apply_pulled<S: Scalar>(act: &InfAction<S>, s: &[S]) -> VectorField<S> {
    let mut out = VectorField::zero(act.space());
    for (a, f) in s.iter().enumerate() {
        if !f.is_zero() {
            out = out.add(&act.table()[a].scale(f));
        }
    }
    out
}

fn side_clauses<S: Scalar>(
    report: &mut CheckReport,
    act: &InfAction<S>,
    d: &OneDerivation<S>,
    j: &OneOneTensor<S>,
    tag: &str,
) -> Result<(), TensorError> {
    if act.algebroid().bundle() != d.bundle() {
        return Err(TensorError::Invalid(format!("derivation {tag} does not live on the acting algebroid")));
    }
    let p = act.space();
    let frame = d.bundle().frame();
    let w = relatedness_witnesses(act.moment(), j, d.r())?;
    report.push(format!("(i) d mu{tag} J = r{tag} d mu{tag}"), Verdict::from_witnesses(w));

    let ell = act.moment().pull_matrix(d.ell());
    let mut w = Vec::new();
    for (a, v) in act.table().iter().enumerate() {
        let col: Vec<S> = ell.iter().map(|r| r[a].clone()).collect();
        let diff = j.apply(v).sub(&apply_pulled(act, &col));
        if !diff.is_zero() {
            w.push(format!("J a{tag}({0}) - a{tag}(l{tag} {0}) = {1}", frame[a], diff.render()));
        }
    }
    report.push(format!("(ii) J a{tag} = a{tag} l{tag}"), Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for k in 0..p.dim() {
        let e = VectorField::coordinate(p, k);
        for (a, v) in act.table().iter().enumerate() {
            let lhs = nabla_r(j, &e, v)?;
            let rhs = apply_pulled(act, &pulled_connection(act, d, k, a));
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                w.push(format!(
                    "nabla^J_d/d{0} a{tag}({1}) - a{tag}(nabla{tag} {1}) = {2}",
                    p.coords()[k],
                    frame[a],
                    diff.render()
                ));
            }
        }
    }
    report.push(format!("(iii) nabla^J a{tag} = a{tag} nabla{tag}"), Verdict::from_witnesses(w));
    Ok(())
}

pub fn check_derivation_morita<S: Scalar>(
    b: &InfBibundle<S>,
    d1: &OneDerivation<S>,
    d2: &OneDerivation<S>,
    j: &OneOneTensor<S>,
) -> Result<MoritaReport, TensorError> {
    same_chart(b.space(), j.chart())?;
    let mut report = CheckReport::new();
    side_clauses(&mut report, b.left(), d1, j, "1")?;
    side_clauses(&mut report, b.right(), d2, j, "2")?;
    Ok(report)
}

/// Reads the 1-derivations off linear tensors on the acting algebroids' total spaces.
pub fn check_im_tensor_morita<S: Scalar>(
    b: &InfBibundle<S>,
    r1: &OneOneTensor<S>,
    r2: &OneOneTensor<S>,
    j: &OneOneTensor<S>,
    nijenhuis: bool,
) -> Result<MoritaReport, TensorError> {
    let d1 = derivation_of_tensor(r1, b.left().algebroid().bundle())?;
    let d2 = derivation_of_tensor(r2, b.right().algebroid().bundle())?;
    let mut report = check_derivation_morita(b, &d1, &d2, j)?;
    if nijenhuis {
        let mut w = Vec::new();
        for (tag, d) in [("R1", &d1), ("R2", &d2)] {
            if let Some(c) = check_nijenhuis_equations(d).first_failure() {
                w.push(format!("{tag}: {} ({})", c.name, c.verdict));
            }
        }
        w.extend(nijenhuis_torsion(j).witnesses().into_iter().map(|x| format!("J: {x}")));
        report.push("Nijenhuis IM tensor fields", Verdict::from_witnesses(w));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::tensor_of_derivation;
    use crate::morita::fixtures::*;
    use crate::ScalarExpr;

    fn flat(d: &InfAction<ScalarExpr>, c: &str) -> OneDerivation<ScalarExpr> {
        let base = d.algebroid().bundle().base();
        let k = d.algebroid().bundle().rank();
        let ell = (0..k).map(|i| (0..k).map(|j| if i == j { s(base, c) } else { s(base, "0") }).collect()).collect();
        OneDerivation::flat(d.algebroid().bundle().clone(), ell, OneOneTensor::scalar(base, s(base, c))).unwrap()
    }

    #[test]
    fn scalar_derivations() {
        let f = standard();
        let (l, r) = (f.b.left(), f.b.right());
        let id = OneOneTensor::identity(&f.p);
        assert!(check_derivation_morita(&f.b, &flat(l, "1"), &flat(r, "1"), &id).unwrap().holds());
        let c = OneOneTensor::scalar(&f.p, s(&f.p, "3"));
        assert!(check_derivation_morita(&f.b, &flat(l, "3"), &flat(r, "3"), &c).unwrap().holds());
        let rep = check_derivation_morita(&f.b, &flat(l, "3"), &flat(r, "1"), &c).unwrap();
        assert!(rep.clause("(i) d mu2 J = r2 d mu2").unwrap().verdict.is_fail());
        assert!(rep.clause("(i) d mu1 J = r1 d mu1").unwrap().verdict.is_ok());
    }

    #[test]
    fn tensor_path_agrees() {
        let f = standard();
        let (l, r) = (f.b.left(), f.b.right());
        let (d1, d2) = (flat(l, "1"), flat(r, "1"));
        let (t1, t2) = (tensor_of_derivation(&d1).unwrap(), tensor_of_derivation(&d2).unwrap());
        let id = OneOneTensor::identity(&f.p);
        let rep = check_im_tensor_morita(&f.b, &t1, &t2, &id, true).unwrap();
        assert!(rep.holds(), "{rep}");
        let nd = OneOneTensor::diagonal(&f.p, ["y", "x", "1", "1"].iter().map(|e| s(&f.p, e)).collect()).unwrap();
        let rep = check_im_tensor_morita(&f.b, &t1, &t2, &nd, true).unwrap();
        assert!(rep.clause("Nijenhuis IM tensor fields").unwrap().verdict.is_fail());
    }
}
