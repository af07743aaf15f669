use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::{nijenhuis_torsion, OneOneTensor};
use crate::tensor::field::{render_components, VectorField};
use crate::tensor::form::DiffForm;
use crate::tensor::{same_chart, TensorError};

/// Target coordinate `a` is source coordinate `base[a]`; `fiber` lists the rest.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Projection {
    pub base: Vec<usize>,
    pub fiber: Vec<usize>,
}

/// A smooth map given by one formula per target coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct SmoothMap<S> {
    name: String,
    source: Chart,
    target: Chart,
    formulas: Vec<S>,
    projection: Option<Projection>,
}

impl<S: Scalar> SmoothMap<S> {
    pub fn new(name: &str, source: &Chart, target: &Chart, formulas: Vec<S>) -> Result<Self, TensorError> {
        if formulas.len() != target.dim() {
            return Err(TensorError::Dimension {
                what: format!("map '{name}'"),
                expected: target.dim(),
                found: formulas.len(),
            });
        }
        let projection = detect_projection(source, &formulas);
        Ok(SmoothMap { name: name.to_string(), source: source.clone(), target: target.clone(), formulas, projection })
    }

    pub fn identity(chart: &Chart) -> Self {
        let formulas = (0..chart.dim()).map(|i| S::coordinate(chart, i)).collect();
        Self::new("id", chart, chart, formulas).expect("identity has matching dimensions")
    }

    /// The projection onto the listed source coordinates.
    pub fn projection(name: &str, source: &Chart, target: &Chart, base: &[usize]) -> Result<Self, TensorError> {
        let formulas = base.iter().map(|&i| S::coordinate(source, i)).collect();
        Self::new(name, source, target, formulas)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Chart {
        &self.source
    }

    pub fn target(&self) -> &Chart {
        &self.target
    }

    pub fn formulas(&self) -> &[S] {
        &self.formulas
    }

    pub fn as_projection(&self) -> Option<&Projection> {
        self.projection.as_ref()
    }

    pub fn require_projection(&self) -> Result<&Projection, TensorError> {
        self.projection.as_ref().ok_or_else(|| TensorError::NotProjection(self.name.clone()))
    }

    /// `J[a][i] = d phi^a / d x^i`.
    pub fn jacobian(&self) -> Matrix<S> {
        self.formulas.iter().map(|f| (0..self.source.dim()).map(|i| f.partial(i)).collect()).collect()
    }

    /// `f o phi` for a function on the target.
    pub fn pull(&self, f: &S) -> S {
        match &self.projection {
            Some(p) => f.reindex(&p.base.iter().map(|&i| Some(i)).collect::<Vec<_>>()),
            None => f.compose(&self.formulas),
        }
    }

    pub fn pull_matrix(&self, m: &Matrix<S>) -> Matrix<S> {
        m.iter().map(|r| r.iter().map(|x| self.pull(x)).collect()).collect()
    }

    /// `d phi (v)` with components pulled back to the source.
    pub fn push_vector(&self, v: &VectorField<S>) -> Vec<S> {
        linalg::mul_vec(&self.jacobian(), v.comps())
    }

    /// `phi^* alpha` for a form of any degree.
    pub fn pullback_form(&self, alpha: &DiffForm<S>) -> Result<DiffForm<S>, TensorError> {
        same_chart(&self.target, alpha.chart())?;
        let k = alpha.degree();
        let jac = self.jacobian();
        let n = self.source.dim();
        let m = self.target.dim();
        if k > n {
            return Ok(DiffForm::zero(&self.source, k));
        }
        let mut terms = Vec::new();
        for (idx, c) in crate::tensor::form::increasing(m, k).into_iter().zip(alpha.comps()) {
            if c.is_zero() {
                continue;
            }
            let pc = self.pull(c);
            // phi^* (dy^{a1} ^ ... ^ dy^{ak}) = sum over source tuples of the minors
            for src in crate::tensor::form::increasing(n, k) {
                let sub: Matrix<S> =
                    idx.iter().map(|&a| src.iter().map(|&i| jac[a][i].clone()).collect()).collect();
                let d = if k == 0 { S::one() } else { linalg::det(&sub) };
                if d.is_zero() {
                    continue;
                }
                terms.push((src, pc.clone() * &d));
            }
        }
        DiffForm::from_terms(&self.source, k, terms)
    }
}

fn detect_projection<S: Scalar>(source: &Chart, formulas: &[S]) -> Option<Projection> {
    let mut base = Vec::new();
    for f in formulas {
        let hit = (0..source.dim()).find(|&i| *f == S::coordinate(source, i))?;
        if base.contains(&hit) {
            return None;
        }
        base.push(hit);
    }
    let fiber = (0..source.dim()).filter(|i| !base.contains(i)).collect();
    Some(Projection { base, fiber })
}

/// Nonzero entries of `m`, printed as `label[i][j] = f`.
pub fn matrix_witnesses<S: Scalar>(label: &str, m: &Matrix<S>, chart: &Chart) -> Vec<String> {
    let mut out = Vec::new();
    for (i, r) in m.iter().enumerate() {
        for (j, x) in r.iter().enumerate() {
            if !x.is_zero() {
                out.push(format!("{label}[{i}][{j}] = {}", x.render(chart)));
            }
        }
    }
    out
}

/// Entries of `d phi o N - phi^*(N_B) o d phi` that do not vanish.
pub fn relatedness_witnesses<S: Scalar>(
    phi: &SmoothMap<S>,
    n: &OneOneTensor<S>,
    n_b: &OneOneTensor<S>,
) -> Result<Vec<String>, TensorError> {
    same_chart(phi.source(), n.chart())?;
    same_chart(phi.target(), n_b.chart())?;
    let jac = phi.jacobian();
    let lhs = linalg::mul(&jac, n.matrix());
    let rhs = linalg::mul(&phi.pull_matrix(n_b.matrix()), &jac);
    Ok(matrix_witnesses("dphi N - N_B dphi", &linalg::sub(&lhs, &rhs), phi.source()))
}

pub fn is_related<S: Scalar>(
    phi: &SmoothMap<S>,
    n: &OneOneTensor<S>,
    n_b: &OneOneTensor<S>,
) -> Result<bool, TensorError> {
    Ok(relatedness_witnesses(phi, n, n_b)?.is_empty())
}

#[derive(Clone, Debug, PartialEq)]
pub enum Projectability<S> {
    Projectable(OneOneTensor<S>),
    NotProjectable(String),
}

/// The pushed-down tensor along a coordinate projection, if there is one.
pub fn project_tensor<S: Scalar>(
    phi: &SmoothMap<S>,
    n: &OneOneTensor<S>,
) -> Result<Projectability<S>, TensorError> {
    same_chart(phi.source(), n.chart())?;
    let p = phi.require_projection()?;
    let src = phi.source();
    let names = src.coords();
    for &b in &p.base {
        for &f in &p.fiber {
            let x = n.entry(b, f);
            if !x.is_zero() {
                return Ok(Projectability::NotProjectable(format!(
                    "N(d/d{}) has d/d{} component {}, so ker dphi is not preserved",
                    names[f],
                    names[b],
                    x.render(src)
                )));
            }
        }
    }
    let mut back = vec![None; src.dim()];
    for (a, &b) in p.base.iter().enumerate() {
        back[b] = Some(a);
    }
    let mut m = Vec::new();
    for &b in &p.base {
        let mut row = Vec::new();
        for &b2 in &p.base {
            let x = n.entry(b, b2);
            if let Some(&f) = p.fiber.iter().find(|&&f| !x.independent_of(f)) {
                return Ok(Projectability::NotProjectable(format!(
                    "candidate component {} depends on fiber coordinate {}",
                    x.render(src),
                    names[f]
                )));
            }
            row.push(x.reindex(&back));
        }
        m.push(row);
    }
    Ok(Projectability::Projectable(OneOneTensor::new(phi.target(), m)?))
}

/// Components of `d phi(N_N(d_i, d_j)) - N_{N_B}(d phi d_i, d phi d_j)` that do not vanish.
pub fn torsion_naturality<S: Scalar>(
    phi: &SmoothMap<S>,
    n: &OneOneTensor<S>,
    n_b: &OneOneTensor<S>,
) -> Result<Vec<String>, TensorError> {
    same_chart(phi.source(), n.chart())?;
    same_chart(phi.target(), n_b.chart())?;
    let t = nijenhuis_torsion(n);
    let tb = nijenhuis_torsion(n_b);
    let jac = phi.jacobian();
    let (ns, nt) = (phi.source().dim(), phi.target().dim());
    let pulled: Vec<Vec<Vec<S>>> = (0..nt)
        .map(|c| (0..nt).map(|a| (0..nt).map(|b| phi.pull(tb.component(c, a, b))).collect()).collect())
        .collect();
    let mut out = Vec::new();
    for i in 0..ns {
        for j in i + 1..ns {
            let up = linalg::mul_vec(&jac, t.eval(i, j).comps());
            let down: Vec<S> = (0..nt)
                .map(|c| {
                    let mut acc = S::zero();
                    for a in 0..nt {
                        if jac[a][i].is_zero() {
                            continue;
                        }
                        for b in 0..nt {
                            if jac[b][j].is_zero() || pulled[c][a][b].is_zero() {
                                continue;
                            }
                            acc = acc + &(jac[a][i].clone() * &jac[b][j] * &pulled[c][a][b]);
                        }
                    }
                    acc
                })
                .collect();
            let diff: Vec<S> = up.into_iter().zip(down).map(|(a, b)| a - &b).collect();
            if diff.iter().any(|x| !x.is_zero()) {
                out.push(format!(
                    "pair ({}, {}): {}",
                    phi.source().coords()[i],
                    phi.source().coords()[j],
                    render_components(phi.source(), &diff, "d/d")
                ));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    fn setup() -> (Chart, Chart, SmoothMap<ScalarExpr>) {
        let p = Chart::new("R2", &["x", "y"]).unwrap();
        let b = Chart::new("R1", &["x"]).unwrap();
        let pr = SmoothMap::projection("pr1", &p, &b, &[0]).unwrap();
        (p, b, pr)
    }

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    #[test]
    fn projection_is_detected() {
        let (_, _, pr) = setup();
        assert_eq!(pr.as_projection().unwrap().fiber, vec![1]);
    }

    #[test]
    fn relatedness_examples() {
        let (p, b, pr) = setup();
        let n = OneOneTensor::diagonal(&p, vec![s(&p, "x"), s(&p, "1")]).unwrap();
        assert!(is_related(&pr, &n, &OneOneTensor::scalar(&b, s(&b, "x"))).unwrap());
        let nil = OneOneTensor::new(&p, vec![vec![s(&p, "0"), s(&p, "1")], vec![s(&p, "0"), s(&p, "0")]]).unwrap();
        assert!(!is_related(&pr, &nil, &OneOneTensor::zero(&b)).unwrap());
    }

    #[test]
    fn projection_examples() {
        let (p, b, pr) = setup();
        let n = OneOneTensor::diagonal(&p, vec![s(&p, "x"), s(&p, "y")]).unwrap();
        assert_eq!(project_tensor(&pr, &n).unwrap(), Projectability::Projectable(OneOneTensor::scalar(&b, s(&b, "x"))));
        let bad = OneOneTensor::diagonal(&p, vec![s(&p, "y"), s(&p, "1")]).unwrap();
        assert!(matches!(project_tensor(&pr, &bad).unwrap(), Projectability::NotProjectable(_)));
    }

    #[test]
    fn pullback_of_area_form_along_polar_like_map() {
        let src = Chart::new("S", &["r", "t"]).unwrap();
        let tgt = Chart::new("T", &["x", "y"]).unwrap();
        let phi = SmoothMap::new("f", &src, &tgt, vec![s(&src, "r*t"), s(&src, "r + t")]).unwrap();
        let area: DiffForm<ScalarExpr> = DiffForm::differential(&tgt, 0).wedge(&DiffForm::differential(&tgt, 1));
        let pulled = phi.pullback_form(&area).unwrap();
        assert_eq!(pulled.comps(), &[s(&src, "t - r")]);
    }
}
