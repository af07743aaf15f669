use super::{is_zero_section, sub_sections, OneDerivation, TrivialBundle};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::field::VectorField;
use crate::tensor::map::{matrix_witnesses, relatedness_witnesses, SmoothMap};
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

/// Bundle morphism over the identity; `matrix[b][a]` is the `f_b` component of `Phi(e_a)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BundleMap<S> {
    source: TrivialBundle,
    target: TrivialBundle,
    matrix: Matrix<S>,
}

impl<S: Scalar> BundleMap<S> {
    pub fn new(source: TrivialBundle, target: TrivialBundle, matrix: Matrix<S>) -> Result<Self, TensorError> {
        same_chart(source.base(), target.base())?;
        if matrix.len() != target.rank() || matrix.iter().any(|r| r.len() != source.rank()) {
            return Err(TensorError::Invalid(format!(
                "bundle map must be {} x {}",
                target.rank(),
                source.rank()
            )));
        }
        Ok(BundleMap { source, target, matrix })
    }

    pub fn identity(bundle: &TrivialBundle) -> Self {
        BundleMap { source: bundle.clone(), target: bundle.clone(), matrix: linalg::identity(bundle.rank()) }
    }

    pub fn source(&self) -> &TrivialBundle {
        &self.source
    }

    pub fn target(&self) -> &TrivialBundle {
        &self.target
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn apply(&self, s: &[S]) -> Vec<S> {
        linalg::mul_vec(&self.matrix, s)
    }
}

/// `(mu^* nabla, mu^* l, J)` on `mu^* E`, framed by the pulled-back frame.
pub fn pullback_derivation<S: Scalar>(
    mu: &SmoothMap<S>,
    d: &OneDerivation<S>,
    j: &OneOneTensor<S>,
) -> Result<OneDerivation<S>, TensorError> {
    same_chart(mu.target(), d.bundle().base())?;
    same_chart(mu.source(), j.chart())?;
    mu.require_projection()?;
    let w = relatedness_witnesses(mu, j, d.r())?;
    if let Some(first) = w.first() {
        return Err(TensorError::Invalid(format!("J is not {}-related to r: {first}", mu.name())));
    }
    let k = d.bundle().rank();
    let jac = mu.jacobian();
    let pulled: Vec<Matrix<S>> = d.conn().iter().map(|g: &Matrix<S>| mu.pull_matrix(g)).collect();
    let conn = (0..mu.source().dim())
        .map(|p| {
            let mut m: Matrix<S> = linalg::zeros(k, k);
            for (i, g) in pulled.iter().enumerate() {
                let c = &jac[i][p];
                if c.is_zero() {
                    continue;
                }
                for b in 0..k {
                    for a in 0..k {
                        m[b][a] = m[b][a].clone() + &(c.clone() * &g[b][a]);
                    }
                }
            }
            m
        })
        .collect();
    let name = format!("{}_{}", mu.name(), d.bundle().name());
    let bundle = d.bundle().over(mu.source(), &name)?;
    OneDerivation::new(bundle, conn, mu.pull_matrix(d.ell()), j.clone())
}

/// Clauses `Phi nabla^1 = nabla^2 Phi`, `Phi l_1 = l_2 Phi`, `r_1 = r_2`.
pub fn are_related_derivations<S: Scalar>(
    phi: &BundleMap<S>,
    d1: &OneDerivation<S>,
    d2: &OneDerivation<S>,
) -> Result<CheckReport, TensorError> {
    same_chart(d1.bundle().base(), d2.bundle().base())?;
    if phi.source() != d1.bundle() || phi.target() != d2.bundle() {
        return Err(TensorError::Invalid("bundle map does not connect the two bundles".into()));
    }
    let base = d1.bundle().base();
    let mut report = CheckReport::new();
    let mut w = Vec::new();
    for i in 0..base.dim() {
        let v = VectorField::coordinate(base, i);
        for a in 0..d1.bundle().rank() {
            let e = d1.bundle().frame_section::<S>(a);
            let res = sub_sections(&phi.apply(&d1.apply(&v, &e)), &d2.apply(&v, &phi.apply(&e)));
            if !is_zero_section(&res) {
                w.push(format!(
                    "Phi(nabla_d/d{0} {1}) - nabla_d/d{0}(Phi {1}) = {2}",
                    base.coords()[i],
                    d1.bundle().frame()[a],
                    d2.bundle().render_section(&res)
                ));
            }
        }
    }
    report.push("Phi intertwines the connections", Verdict::from_witnesses(w));
    let res = linalg::sub(&linalg::mul(phi.matrix(), d1.ell()), &linalg::mul(d2.ell(), phi.matrix()));
    report.push("Phi l_1 = l_2 Phi", Verdict::from_witnesses(matrix_witnesses("Phi l_1 - l_2 Phi", &res, base)));
    let res = d1.r().sub(d2.r());
    report.push("r_1 = r_2", Verdict::from_witnesses(matrix_witnesses("r_1 - r_2", res.matrix(), base)));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::linear::{derivation_of_tensor, tensor_of_derivation};
    use crate::expr::{parse_scalar, Chart};
    use crate::ScalarExpr;

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    #[test]
    fn pullback_along_projection() {
        let m = Chart::new("M", &["x"]).unwrap();
        let p = Chart::new("P", &["x", "t"]).unwrap();
        let mu = SmoothMap::projection("pr1", &p, &m, &[0]).unwrap();
        let b = TrivialBundle::new("E", &m, &["e"]).unwrap();
        let d = OneDerivation::new(b, vec![vec![vec![s(&m, "x^2")]]], vec![vec![s(&m, "x")]], OneOneTensor::scalar(&m, s(&m, "x")))
            .unwrap();
        let j = OneOneTensor::diagonal(&p, vec![s(&p, "x"), s(&p, "t")]).unwrap();
        let pd = pullback_derivation(&mu, &d, &j).unwrap();
        assert_eq!(pd.conn()[0], vec![vec![s(&p, "x^2")]]);
        assert!(pd.conn()[1][0][0].is_zero());
        assert_eq!(pd.ell(), &vec![vec![s(&p, "x")]]);
        // same data through the total-space tensor
        let again = derivation_of_tensor(&tensor_of_derivation(&pd).unwrap(), pd.bundle()).unwrap();
        assert_eq!(again, pd);
        let bad = OneOneTensor::identity(&p);
        assert!(pullback_derivation(&mu, &d, &bad).is_err());
    }

    #[test]
    fn related_derivation_examples() {
        let c = Chart::new("R1", &["x"]).unwrap();
        let b = TrivialBundle::new("E", &c, &["e"]).unwrap();
        let one = vec![vec![s(&c, "1")]];
        let d1 = OneDerivation::flat(b.clone(), one.clone(), OneOneTensor::identity(&c)).unwrap();
        let d2 = OneDerivation::flat(b.clone(), one.clone(), OneOneTensor::scalar(&c, s(&c, "2"))).unwrap();
        assert!(are_related_derivations(&BundleMap::identity(&b), &d1, &d1).unwrap().holds());
        let zero = BundleMap::new(b.clone(), b.clone(), vec![vec![s(&c, "0")]]).unwrap();
        assert!(are_related_derivations(&zero, &d1, &d1).unwrap().holds());
        assert!(!are_related_derivations(&zero, &d1, &d2).unwrap().holds());
        let two = BundleMap::new(b.clone(), b, vec![vec![s(&c, "2")]]).unwrap();
        assert!(!are_related_derivations(&two, &d1, &d2).unwrap().holds());
    }
}
