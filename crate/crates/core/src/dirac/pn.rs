use crate::dirac::{is_involutive, CourantSection, DiracStructure};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::{nijenhuis_torsion, OneOneTensor};
use crate::tensor::field::VectorField;
use crate::tensor::form::{DiffForm, Multivector};
use crate::tensor::map::matrix_witnesses;
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

/// Entries of `pi-sharp r^* - r pi-sharp`.
fn pn1_residual<S: Scalar>(pi: &Multivector<S>, r: &OneOneTensor<S>) -> Matrix<S> {
    let p = pi.sharp_matrix();
    let lhs = linalg::mul(&p, &linalg::transpose(r.matrix()));
    let rhs = linalg::mul(r.matrix(), &p);
    linalg::sub(&lhs, &rhs)
}

/// `R(d_i, dx^j) = pi-sharp(L_{d_i} r^* dx^j - L_{r d_i} dx^j) - (L_{pi-sharp dx^j} r)(d_i)`,
/// indexed `[i][j]`.
pub fn magri_morosi<S: Scalar>(
    pi: &Multivector<S>,
    r: &OneOneTensor<S>,
) -> Result<Vec<Vec<VectorField<S>>>, TensorError> {
    same_chart(pi.chart(), r.chart())?;
    let chart = pi.chart();
    let res = pn1_residual(pi, r);
    if !linalg::is_zero_matrix(&res) {
        return Err(TensorError::Invalid("non-tensorial: pi-sharp r^* = r pi-sharp fails".into()));
    }
    let n = chart.dim();
    let mut table = Vec::with_capacity(n);
    for i in 0..n {
        let v = VectorField::coordinate(chart, i);
        let rv = r.apply(&v);
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            let a: DiffForm<S> = DiffForm::differential(chart, j);
            let inner = r.transpose_apply(&a).lie_derivative(&v).sub(&a.lie_derivative(&rv));
            let lie_r = r.lie_derivative(&pi.sharp(&a));
            row.push(pi.sharp(&inner).sub(&lie_r.apply(&v)));
        }
        table.push(row);
    }
    Ok(table)
}

pub fn is_poisson_nijenhuis<S: Scalar>(pi: &Multivector<S>, r: &OneOneTensor<S>) -> Result<CheckReport, TensorError> {
    same_chart(pi.chart(), r.chart())?;
    let chart = pi.chart();
    let mut report = CheckReport::new();
    let l = DiracStructure::graph_of_bivector(pi)?;
    report.push("pi is Poisson", is_involutive(&l));
    report.push("torsion of r vanishes", Verdict::from_witnesses(nijenhuis_torsion(r).witnesses()));
    let res = pn1_residual(pi, r);
    let pn1 = matrix_witnesses("pi-sharp r^* - r pi-sharp", &res, chart);
    let pn1_ok = pn1.is_empty();
    report.push("pi-sharp r^* = r pi-sharp", Verdict::from_witnesses(pn1));
    let mm = if pn1_ok {
        let table = magri_morosi(pi, r)?;
        let mut w = Vec::new();
        for (i, row) in table.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                if !x.is_zero() {
                    w.push(format!("R(d/d{}, d{}) = {}", chart.coords()[i], chart.coords()[j], x.render()));
                }
            }
        }
        Verdict::from_witnesses(w)
    } else {
        Verdict::fail("non-tensorial: pi-sharp r^* = r pi-sharp fails")
    };
    report.push("Magri-Morosi concomitant vanishes", mm);
    Ok(report)
}

/// The bivector with sharp map `r^n pi-sharp`.
pub fn poisson_hierarchy<S: Scalar>(
    pi: &Multivector<S>,
    r: &OneOneTensor<S>,
    n: u32,
) -> Result<Multivector<S>, TensorError> {
    same_chart(pi.chart(), r.chart())?;
    let sharp = linalg::mul(r.pow(n).matrix(), &pi.sharp_matrix());
    // sharp[j][i] = pi_n(dx^i, dx^j)
    Multivector::bivector_from_matrix(pi.chart(), &linalg::transpose(&sharp))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// `(r^n, id)`.
    Tangent,
    /// `(id, (r^*)^n)`.
    Cotangent,
}

/// Transformed structure and the verdict of its kernel condition.
pub fn dirac_hierarchy<S: Scalar>(
    l: &DiracStructure<S>,
    r: &OneOneTensor<S>,
    n: u32,
    side: Side,
) -> Result<(DiracStructure<S>, Verdict), TensorError> {
    same_chart(l.chart(), r.chart())?;
    let chart = l.chart();
    let rn = r.pow(n);
    let gens: Vec<CourantSection<S>> = l
        .generators()
        .iter()
        .map(|g| match side {
            Side::Tangent => CourantSection { v: rn.apply(&g.v), alpha: g.alpha.clone() },
            Side::Cotangent => CourantSection { v: g.v.clone(), alpha: rn.transpose_apply(&g.alpha) },
        })
        .collect();
    let m: Matrix<S> = linalg::transpose(&gens.iter().map(|g| g.to_vec()).collect());
    if linalg::rank(&m) < chart.dim() {
        let which = match side {
            Side::Tangent => "ker(r^n, id) meets L",
            Side::Cotangent => "ker(id, (r^*)^n) meets L",
        };
        return Err(TensorError::Singular(format!("kernel condition fails: {which} at every point")));
    }
    // The deformed component must keep the rank of the original one.
    let part = |g: &CourantSection<S>| match side {
        Side::Tangent => g.v.comps().to_vec(),
        Side::Cotangent => g.alpha.comps().to_vec(),
    };
    let before: Matrix<S> = linalg::transpose(&l.generators().iter().map(part).collect());
    let after: Matrix<S> = linalg::transpose(&gens.iter().map(part).collect());
    let k = linalg::rank(&before);
    if linalg::rank(&after) < k {
        let which = match side {
            Side::Tangent => "r^n drops rank on the tangent part of L",
            Side::Cotangent => "(r^*)^n drops rank on the cotangent part of L",
        };
        return Err(TensorError::Singular(format!("kernel condition fails: {which} at every point")));
    }
    let mut locus = S::degeneracy_locus(&linalg::minors(&m, chart.dim()), chart);
    for d in S::degeneracy_locus(&linalg::minors(&after, k), chart) {
        if !locus.contains(&d) {
            locus.push(d);
        }
    }
    let out = DiracStructure::new(chart, gens, l.twist().clone())?;
    let verdict = if locus.is_empty() { Verdict::Pass } else { Verdict::generic(locus) };
    Ok((out, verdict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, Chart};
    use crate::ScalarExpr;

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    fn r2() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    fn pi(c: &Chart, f: &str) -> Multivector<ScalarExpr> {
        Multivector::from_terms(c, 2, vec![(vec![0, 1], s(c, f))]).unwrap()
    }

    #[test]
    fn pn_examples() {
        let c = r2();
        assert!(is_poisson_nijenhuis(&pi(&c, "1"), &OneOneTensor::identity(&c)).unwrap().holds());
        let rx = OneOneTensor::scalar(&c, s(&c, "x"));
        assert!(is_poisson_nijenhuis(&pi(&c, "1"), &rx).unwrap().holds());
        let nd = OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap();
        let rep = is_poisson_nijenhuis(&pi(&c, "1"), &nd).unwrap();
        assert!(rep.clause("torsion of r vanishes").unwrap().verdict.is_fail());
    }

    #[test]
    fn hierarchy_scales() {
        let c = r2();
        let two = OneOneTensor::scalar(&c, s(&c, "2"));
        assert_eq!(poisson_hierarchy(&pi(&c, "1"), &two, 3).unwrap(), pi(&c, "8"));
        let rx = OneOneTensor::scalar(&c, s(&c, "x"));
        assert_eq!(poisson_hierarchy(&pi(&c, "1"), &rx, 2).unwrap(), pi(&c, "x^2"));
        assert_eq!(poisson_hierarchy(&pi(&c, "1"), &rx, 0).unwrap(), pi(&c, "1"));
    }

    #[test]
    fn cotangent_hierarchy_degenerates_on_cotangent_structure() {
        let c = r2();
        let l = DiracStructure::graph_of_bivector(&Multivector::zero(&c, 2)).unwrap();
        let rx = OneOneTensor::scalar(&c, s(&c, "x"));
        let (_, v) = dirac_hierarchy(&l, &rx, 1, Side::Cotangent).unwrap();
        assert_eq!(v, Verdict::generic(vec!["det = x".into()]));
        let (_, v) = dirac_hierarchy(&l, &rx, 1, Side::Tangent).unwrap();
        assert_eq!(v, Verdict::Pass);
    }
}
