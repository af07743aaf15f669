use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::field::{bracket, render_components, VectorField};
use crate::tensor::form::DiffForm;
use crate::tensor::{same_chart, TensorError};

/// A (1,1)-tensor. `matrix[i][j]` is the `i`-th component of `N(d/dx^j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneOneTensor<S> {
    chart: Chart,
    matrix: Matrix<S>,
}

impl<S: Scalar> OneOneTensor<S> {
    pub fn new(chart: &Chart, matrix: Matrix<S>) -> Result<Self, TensorError> {
        let n = chart.dim();
        if matrix.len() != n {
            return Err(TensorError::Dimension { what: "(1,1)-tensor rows".into(), expected: n, found: matrix.len() });
        }
        for row in &matrix {
            if row.len() != n {
                return Err(TensorError::Dimension {
                    what: "(1,1)-tensor columns".into(),
                    expected: n,
                    found: row.len(),
                });
            }
        }
        Ok(OneOneTensor { chart: chart.clone(), matrix })
    }

    pub(crate) fn raw(chart: &Chart, matrix: Matrix<S>) -> Self {
        OneOneTensor { chart: chart.clone(), matrix }
    }

    pub fn identity(chart: &Chart) -> Self {
        Self::raw(chart, linalg::identity(chart.dim()))
    }

    pub fn zero(chart: &Chart) -> Self {
        Self::raw(chart, linalg::zeros(chart.dim(), chart.dim()))
    }

    /// `f Id`.
    pub fn scalar(chart: &Chart, f: S) -> Self {
        Self::identity(chart).scale(&f)
    }

    pub fn diagonal(chart: &Chart, d: Vec<S>) -> Result<Self, TensorError> {
        let n = chart.dim();
        if d.len() != n {
            return Err(TensorError::Dimension { what: "diagonal".into(), expected: n, found: d.len() });
        }
        let mut m = linalg::zeros(n, n);
        for (i, x) in d.into_iter().enumerate() {
            m[i][i] = x;
        }
        Ok(Self::raw(chart, m))
    }

    /// Builds the tensor from the images of the coordinate fields.
    pub fn from_columns(chart: &Chart, cols: &[VectorField<S>]) -> Result<Self, TensorError> {
        let n = chart.dim();
        if cols.len() != n {
            return Err(TensorError::Dimension { what: "columns".into(), expected: n, found: cols.len() });
        }
        for c in cols {
            same_chart(chart, c.chart())?;
        }
        Ok(Self::raw(chart, (0..n).map(|i| (0..n).map(|j| cols[j].comp(i).clone()).collect()).collect()))
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn matrix(&self) -> &Matrix<S> {
        &self.matrix
    }

    pub fn entry(&self, i: usize, j: usize) -> &S {
        &self.matrix[i][j]
    }

    pub fn apply(&self, v: &VectorField<S>) -> VectorField<S> {
        VectorField::raw(&self.chart, linalg::mul_vec(&self.matrix, v.comps()))
    }

    /// Image of `d/dx^j`.
    pub fn column(&self, j: usize) -> VectorField<S> {
        VectorField::raw(&self.chart, self.matrix.iter().map(|r| r[j].clone()).collect())
    }

    /// `(N^* alpha)(u) = alpha(N u)`.
    pub fn transpose_apply(&self, alpha: &DiffForm<S>) -> DiffForm<S> {
        let t = linalg::transpose(&self.matrix);
        DiffForm::one_form(&self.chart, linalg::mul_vec(&t, alpha.comps())).expect("1-form on its own chart")
    }

    /// `self o other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::raw(&self.chart, linalg::mul(&self.matrix, &other.matrix))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::identity(&self.chart);
        for _ in 0..n {
            acc = acc.compose(self);
        }
        acc
    }

    pub fn transpose(&self) -> Self {
        Self::raw(&self.chart, linalg::transpose(&self.matrix))
    }

    pub fn inverse(&self) -> Option<Self> {
        linalg::inverse(&self.matrix).map(|m| Self::raw(&self.chart, m))
    }

    pub fn det(&self) -> S {
        linalg::det(&self.matrix)
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::raw(&self.chart, zip(&self.matrix, &o.matrix, |a, b| a.clone() + b))
    }

    pub fn sub(&self, o: &Self) -> Self {
        Self::raw(&self.chart, linalg::sub(&self.matrix, &o.matrix))
    }

    pub fn scale(&self, f: &S) -> Self {
        Self::raw(&self.chart, self.matrix.iter().map(|r| r.iter().map(|x| x.clone() * f).collect()).collect())
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_matrix(&self.matrix)
    }

    /// `(L_u N)(v) = [u, N v] - N [u, v]`, returned as a tensor.
    pub fn lie_derivative(&self, u: &VectorField<S>) -> Self {
        let n = self.chart.dim();
        let cols: Vec<VectorField<S>> = (0..n)
            .map(|j| {
                let e = VectorField::coordinate(&self.chart, j);
                bracket(u, &self.column(j)).sub(&self.apply(&bracket(u, &e)))
            })
            .collect();
        Self::from_columns(&self.chart, &cols).expect("columns on own chart")
    }

    pub fn render(&self) -> String {
        let rows: Vec<String> = self
            .matrix
            .iter()
            .map(|r| r.iter().map(|x| x.render(&self.chart)).collect::<Vec<_>>().join(", "))
            .collect();
        format!("[{}]", rows.join("; "))
    }
}

fn zip<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>, f: impl Fn(&S, &S) -> S) -> Matrix<S> {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| f(x, y)).collect()).collect()
}

/// A vector-valued 2-form. `comps[k][i][j]` is the `k`-th component of `T(d_i, d_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct OneTwoTensor<S> {
    chart: Chart,
    comps: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> OneTwoTensor<S> {
    /// Builds the tensor from its values on pairs of coordinate fields.
    /// Only `i < j` is evaluated; the rest follows by antisymmetry.
    pub fn from_pairs(chart: &Chart, f: impl Fn(usize, usize) -> VectorField<S>) -> Self {
        let n = chart.dim();
        let mut comps = vec![vec![vec![S::zero(); n]; n]; n];
        for i in 0..n {
            for j in i + 1..n {
                let v = f(i, j);
                for k in 0..n {
                    comps[k][j][i] = -v.comp(k).clone();
                    comps[k][i][j] = v.comp(k).clone();
                }
            }
        }
        OneTwoTensor { chart: chart.clone(), comps }
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn component(&self, k: usize, i: usize, j: usize) -> &S {
        &self.comps[k][i][j]
    }

    pub fn eval(&self, i: usize, j: usize) -> VectorField<S> {
        VectorField::raw(&self.chart, (0..self.chart.dim()).map(|k| self.comps[k][i][j].clone()).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|m| linalg::is_zero_matrix(m))
    }

    /// Nonzero values on coordinate pairs, printed.
    pub fn witnesses(&self) -> Vec<String> {
        let n = self.chart.dim();
        let names = self.chart.coords();
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let v = self.eval(i, j);
                if !v.is_zero() {
                    out.push(format!(
                        "T(d/d{}, d/d{}) = {}",
                        names[i],
                        names[j],
                        render_components(&self.chart, v.comps(), "d/d")
                    ));
                }
            }
        }
        out
    }
}

/// `N_N(u,v) = [Nu,Nv] - N([Nu,v] + [u,Nv] - N[u,v])` on coordinate fields.
pub fn nijenhuis_torsion<S: Scalar>(n: &OneOneTensor<S>) -> OneTwoTensor<S> {
    let chart = n.chart().clone();
    let cols: Vec<VectorField<S>> = (0..chart.dim()).map(|j| n.column(j)).collect();
    OneTwoTensor::from_pairs(&chart, |i, j| {
        let ei = VectorField::coordinate(&chart, i);
        let ej = VectorField::coordinate(&chart, j);
        let inner = bracket(&cols[i], &ej).add(&bracket(&ei, &cols[j]));
        bracket(&cols[i], &cols[j]).sub(&n.apply(&inner))
    })
}

pub fn is_nijenhuis<S: Scalar>(n: &OneOneTensor<S>) -> bool {
    nijenhuis_torsion(n).is_zero()
}

/// `[u,v]_r = [r u, v] + [u, r v] - r[u,v]`.
pub fn deformed_bracket<S: Scalar>(
    r: &OneOneTensor<S>,
    u: &VectorField<S>,
    v: &VectorField<S>,
) -> Result<VectorField<S>, TensorError> {
    same_chart(r.chart(), u.chart())?;
    same_chart(r.chart(), v.chart())?;
    Ok(bracket(&r.apply(u), v).add(&bracket(u, &r.apply(v))).sub(&r.apply(&bracket(u, v))))
}

/// `nabla^r_v(u) = [u, r v] - r[u, v]`.
pub fn nabla_r<S: Scalar>(
    r: &OneOneTensor<S>,
    v: &VectorField<S>,
    u: &VectorField<S>,
) -> Result<VectorField<S>, TensorError> {
    same_chart(r.chart(), u.chart())?;
    same_chart(r.chart(), v.chart())?;
    Ok(bracket(u, &r.apply(v)).sub(&r.apply(&bracket(u, v))))
}

/// `nabla^{r,*}_v(alpha) = i_v d(r^* alpha) - i_{r v} d alpha`.
pub fn nabla_r_star<S: Scalar>(
    r: &OneOneTensor<S>,
    v: &VectorField<S>,
    alpha: &DiffForm<S>,
) -> Result<DiffForm<S>, TensorError> {
    same_chart(r.chart(), v.chart())?;
    same_chart(r.chart(), alpha.chart())?;
    if alpha.degree() != 1 {
        return Err(TensorError::Invalid("nabla^{r,*} acts on 1-forms".into()));
    }
    let a = r.transpose_apply(alpha).exterior_derivative().interior(v);
    let b = alpha.exterior_derivative().interior(&r.apply(v));
    Ok(a.sub(&b))
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

    fn ndiag(c: &Chart) -> OneOneTensor<ScalarExpr> {
        OneOneTensor::diagonal(c, vec![s(c, "y"), s(c, "x")]).unwrap()
    }

    #[test]
    fn torsion_of_diag_y_x() {
        let c = r2();
        let t = nijenhuis_torsion(&ndiag(&c));
        let w = t.eval(0, 1);
        assert_eq!(w.comps(), &[s(&c, "y - x"), s(&c, "y - x")]);
        assert_eq!(t.eval(1, 0), w.neg());
    }

    #[test]
    fn deformed_bracket_of_coordinate_fields() {
        let c = r2();
        let dx = VectorField::coordinate(&c, 0);
        let dy = VectorField::coordinate(&c, 1);
        let b = deformed_bracket(&ndiag(&c), &dx, &dy).unwrap();
        assert_eq!(b.comps(), &[s(&c, "-1"), s(&c, "1")]);
    }

    #[test]
    fn nabla_examples() {
        let c = r2();
        let dx = VectorField::coordinate(&c, 0);
        let dy = VectorField::coordinate(&c, 1);
        assert_eq!(nabla_r(&ndiag(&c), &dx, &dy).unwrap(), dx);
        let alpha = DiffForm::differential(&c, 0);
        let out = nabla_r_star(&ndiag(&c), &dy, &alpha).unwrap();
        assert_eq!(out.comps(), &[s(&c, "1"), s(&c, "0")]);
    }

    #[test]
    fn lie_derivative_of_tensor_matches_definition() {
        let c = r2();
        let u = VectorField::new(&c, vec![s(&c, "x*y"), s(&c, "1")]).unwrap();
        let n = ndiag(&c);
        let l = n.lie_derivative(&u);
        let v = VectorField::new(&c, vec![s(&c, "y^2"), s(&c, "x")]).unwrap();
        let direct = bracket(&u, &n.apply(&v)).sub(&n.apply(&bracket(&u, &v)));
        assert_eq!(l.apply(&v), direct);
    }
}
