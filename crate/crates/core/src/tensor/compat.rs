use crate::expr::Chart;
use crate::linalg;
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::form::{increasing, sort_with_sign, DiffForm};
use crate::tensor::map::matrix_witnesses;
use crate::tensor::{same_chart, TensorError};
use crate::verdict::{CheckReport, Verdict};

/// A covariant `p`-tensor stored as a full `n^p` array, first index slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct CovariantTensor<S> {
    chart: Chart,
    degree: usize,
    comps: Vec<S>,
}

impl<S: Scalar> CovariantTensor<S> {
    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    fn offset(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.chart.dim() + i)
    }

    pub fn get(&self, idx: &[usize]) -> &S {
        &self.comps[self.offset(idx)]
    }

    fn indices(n: usize, p: usize) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for _ in 0..p {
            out = out.into_iter().flat_map(|v| (0..n).map(move |i| [v.clone(), vec![i]].concat())).collect();
        }
        out
    }

    /// Full array of a form.
    pub fn from_form(a: &DiffForm<S>) -> Self {
        let n = a.chart().dim();
        let comps = Self::indices(n, a.degree()).iter().map(|idx| a.get(idx)).collect();
        CovariantTensor { chart: a.chart().clone(), degree: a.degree(), comps }
    }

    /// The form with these components, when the array is alternating.
    pub fn as_form(&self) -> Option<DiffForm<S>> {
        let n = self.chart.dim();
        for idx in Self::indices(n, self.degree) {
            let c = self.get(&idx);
            let expected = match sort_with_sign(&idx) {
                None => S::zero(),
                Some((sign, sorted)) => {
                    let v = self.get(&sorted).clone();
                    if sign < 0 {
                        -v
                    } else {
                        v
                    }
                }
            };
            if *c != expected {
                return None;
            }
        }
        let comps = increasing(n, self.degree).iter().map(|idx| self.get(idx).clone()).collect();
        DiffForm::new(&self.chart, self.degree, comps).ok()
    }

    /// Nonzero entries of `self - other`.
    pub fn difference_witnesses(&self, other: &Self, label: &str) -> Vec<String> {
        let n = self.chart.dim();
        let names = self.chart.coords();
        Self::indices(n, self.degree)
            .into_iter()
            .filter_map(|idx| {
                let d = self.get(&idx).clone() - other.get(&idx);
                if d.is_zero() {
                    return None;
                }
                let slots: Vec<String> = idx.iter().map(|&i| format!("d/d{}", names[i])).collect();
                Some(format!("{label}({}) = {}", slots.join(", "), d.render(&self.chart)))
            })
            .collect()
    }
}

/// `alpha_K(u_1, ..., u_p) = alpha(K u_1, u_2, ..., u_p)`.
pub fn contract_form_with_tensor<S: Scalar>(
    alpha: &DiffForm<S>,
    k: &OneOneTensor<S>,
) -> Result<CovariantTensor<S>, TensorError> {
    same_chart(alpha.chart(), k.chart())?;
    if alpha.degree() == 0 {
        return Err(TensorError::Invalid("contraction needs a form of degree at least 1".into()));
    }
    Ok(contract_full(&CovariantTensor::from_form(alpha), k))
}

fn contract_full<S: Scalar>(a: &CovariantTensor<S>, k: &OneOneTensor<S>) -> CovariantTensor<S> {
    let n = a.chart.dim();
    let comps = CovariantTensor::<S>::indices(n, a.degree)
        .into_iter()
        .map(|idx| {
            let mut acc = S::zero();
            for l in 0..n {
                let kl = k.entry(l, idx[0]);
                if kl.is_zero() {
                    continue;
                }
                let mut moved = idx.clone();
                moved[0] = l;
                let c = a.get(&moved);
                if c.is_zero() {
                    continue;
                }
                acc = acc + &(kl.clone() * c);
            }
            acc
        })
        .collect();
    CovariantTensor { chart: a.chart.clone(), degree: a.degree, comps }
}

/// `omega-flat o K = K^* o omega-flat` and `d(omega_K) = (d omega)_K`.
pub fn compatible_pair<S: Scalar>(omega: &DiffForm<S>, k: &OneOneTensor<S>) -> Result<CheckReport, TensorError> {
    same_chart(omega.chart(), k.chart())?;
    if omega.degree() != 2 {
        return Err(TensorError::Invalid("compatible pair needs a 2-form".into()));
    }
    let mut report = CheckReport::new();
    let flat = omega.flat_matrix();
    let lhs = linalg::mul(&flat, k.matrix());
    let rhs = linalg::mul(&linalg::transpose(k.matrix()), &flat);
    let w = matrix_witnesses("omega-flat K - K^* omega-flat", &linalg::sub(&lhs, &rhs), omega.chart());
    report.push("omega-flat o K = K^* o omega-flat", Verdict::from_witnesses(w));
    let contracted = contract_full(&CovariantTensor::from_form(omega), k);
    let verdict = match contracted.as_form() {
        None => Verdict::fail("not evaluated: omega_K is not antisymmetric"),
        Some(ok) => {
            let left = CovariantTensor::from_form(&ok.exterior_derivative());
            let right = contract_full(&CovariantTensor::from_form(&omega.exterior_derivative()), k);
            Verdict::from_witnesses(left.difference_witnesses(&right, "d(omega_K) - (d omega)_K"))
        }
    };
    report.push("d(omega_K) = (d omega)_K", verdict);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    fn r2() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    fn area(c: &Chart) -> DiffForm<ScalarExpr> {
        DiffForm::differential(c, 0).wedge(&DiffForm::differential(c, 1))
    }

    fn j0(c: &Chart) -> OneOneTensor<ScalarExpr> {
        OneOneTensor::new(c, vec![vec![s(c, "0"), s(c, "-1")], vec![s(c, "1"), s(c, "0")]]).unwrap()
    }

    #[test]
    fn contraction_examples() {
        let c = r2();
        let id = OneOneTensor::identity(&c);
        assert_eq!(contract_form_with_tensor(&area(&c), &id).unwrap().as_form(), Some(area(&c)));
        let z = contract_form_with_tensor(&area(&c), &j0(&c)).unwrap();
        assert!(z.as_form().is_none());
        assert_eq!(z.get(&[0, 0]), &s(&c, "-1"));
        assert_eq!(z.get(&[1, 1]), &s(&c, "-1"));
        assert!(z.get(&[0, 1]).is_zero() && z.get(&[1, 0]).is_zero());
        let dx: DiffForm<ScalarExpr> = DiffForm::differential(&c, 0);
        let got = contract_form_with_tensor(&dx, &j0(&c)).unwrap().as_form().unwrap();
        assert_eq!(got, DiffForm::differential(&c, 1).neg());
    }

    #[test]
    fn compatible_pair_examples() {
        let c = r2();
        assert!(compatible_pair(&area(&c), &OneOneTensor::identity(&c)).unwrap().holds());
        assert!(compatible_pair(&area(&c), &OneOneTensor::scalar(&c, s(&c, "3"))).unwrap().holds());
        let nil = OneOneTensor::new(&c, vec![vec![s(&c, "0"), s(&c, "1")], vec![s(&c, "0"), s(&c, "0")]]).unwrap();
        let rep = compatible_pair(&area(&c), &nil).unwrap();
        assert_eq!(rep.first_failure().unwrap().name, "omega-flat o K = K^* o omega-flat");
    }
}
