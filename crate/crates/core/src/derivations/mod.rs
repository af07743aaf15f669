//! 1-derivations `(nabla, l, r)` on globally framed vector bundles.

pub mod equations;
pub mod from_dirac;
pub mod linear;
pub mod pullback;

use crate::expr::Chart;
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::field::{bracket, VectorField};
use crate::tensor::form::Multivector;
use crate::tensor::lift::{cotangent_chart, tangent_chart};
use crate::tensor::{same_chart, TensorError};

pub use equations::{check_holomorphic, check_im_equations, check_nijenhuis_equations};
pub use from_dirac::{dirac_algebroid, dirac_bundle, dirac_derivation};
pub use linear::{derivation_of_tensor, tensor_of_derivation};
pub use pullback::{are_related_derivations, pullback_derivation, BundleMap};

/// Components in the frame.
pub type Section<S> = Vec<S>;

/// `base x R^k` with a named frame; the total space chart is `(base coords, frame names)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialBundle {
    name: String,
    base: Chart,
    frame: Vec<String>,
    total: Chart,
}

impl TrivialBundle {
    pub fn new<T: AsRef<str>>(name: &str, base: &Chart, frame: &[T]) -> Result<Self, TensorError> {
        let frame: Vec<String> = frame.iter().map(|f| f.as_ref().to_string()).collect();
        let mut coords = base.coords().to_vec();
        coords.extend(frame.iter().cloned());
        let total = Chart::new(name, &coords)?;
        Ok(TrivialBundle { name: name.to_string(), base: base.clone(), frame, total })
    }

    /// `TM` framed by `x_dot`.
    pub fn tangent(base: &Chart) -> Self {
        let t = tangent_chart(base);
        Self::new(t.name(), base, &t.coords()[base.dim()..]).expect("tangent chart is valid")
    }

    /// `T*M` framed by `p_x`.
    pub fn cotangent(base: &Chart) -> Self {
        let t = cotangent_chart(base);
        Self::new(t.name(), base, &t.coords()[base.dim()..]).expect("cotangent chart is valid")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn base(&self) -> &Chart {
        &self.base
    }

    pub fn frame(&self) -> &[String] {
        &self.frame
    }

    pub fn rank(&self) -> usize {
        self.frame.len()
    }

    pub fn total_chart(&self) -> &Chart {
        &self.total
    }

    /// The same frame over another base.
    pub fn over(&self, base: &Chart, name: &str) -> Result<Self, TensorError> {
        Self::new(name, base, &self.frame)
    }

    pub fn frame_section<S: Scalar>(&self, a: usize) -> Section<S> {
        (0..self.rank()).map(|b| if a == b { S::one() } else { S::zero() }).collect()
    }

    pub fn render_section<S: Scalar>(&self, s: &[S]) -> String {
        let parts: Vec<String> = s
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(a, c)| format!("({}){}", c.render(&self.base), self.frame[a]))
            .collect();
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }
}

pub(crate) fn add_sections<S: Scalar>(a: &[S], b: &[S]) -> Section<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y).collect()
}

pub(crate) fn sub_sections<S: Scalar>(a: &[S], b: &[S]) -> Section<S> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y).collect()
}

pub(crate) fn is_zero_section<S: Scalar>(a: &[S]) -> bool {
    a.iter().all(|x| x.is_zero())
}

/// Anchor and structure functions of a Lie algebroid on a framed bundle.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebroidData<S> {
    bundle: TrivialBundle,
    anchor: Vec<VectorField<S>>,
    /// `structure[a][b][c]`: coefficient of `e_c` in `[e_a, e_b]`.
    structure: Vec<Vec<Vec<S>>>,
}

impl<S: Scalar> LieAlgebroidData<S> {
    /// Refuses data that is not antisymmetric, whose anchor is not a
    /// bracket morphism, or that violates Jacobi on frame triples.
    pub fn new(bundle: TrivialBundle, anchor: Vec<VectorField<S>>, structure: Vec<Vec<Vec<S>>>) -> Result<Self, TensorError> {
        let k = bundle.rank();
        if anchor.len() != k {
            return Err(TensorError::Dimension { what: "anchor".into(), expected: k, found: anchor.len() });
        }
        for v in &anchor {
            same_chart(bundle.base(), v.chart())?;
        }
        if structure.len() != k || structure.iter().any(|r| r.len() != k || r.iter().any(|c| c.len() != k)) {
            return Err(TensorError::Invalid(format!("structure table must be {k} x {k} x {k}")));
        }
        let alg = LieAlgebroidData { bundle, anchor, structure };
        if let Some(w) = alg.violations().into_iter().next() {
            return Err(TensorError::Invalid(format!("not a Lie algebroid: {w}")));
        }
        Ok(alg)
    }

    pub fn tangent(base: &Chart) -> Self {
        let n = base.dim();
        let anchor = (0..n).map(|i| VectorField::coordinate(base, i)).collect();
        let structure = vec![vec![vec![S::zero(); n]; n]; n];
        LieAlgebroidData { bundle: TrivialBundle::tangent(base), anchor, structure }
    }

    /// `T*M` of a Poisson bivector: anchor `pi-sharp`, `[dx^i, dx^j] = d pi^{ij}`.
    pub fn cotangent(pi: &Multivector<S>) -> Result<Self, TensorError> {
        let base = pi.chart();
        let n = base.dim();
        let anchor = (0..n).map(|i| pi.sharp(&crate::tensor::form::DiffForm::differential(base, i))).collect();
        let structure = (0..n)
            .map(|i| (0..n).map(|j| (0..n).map(|c| pi.get(&[i, j]).partial(c)).collect()).collect())
            .collect();
        Self::new(TrivialBundle::cotangent(base), anchor, structure)
    }

    /// Zero anchor and bracket.
    pub fn abelian(bundle: TrivialBundle) -> Self {
        let k = bundle.rank();
        let anchor = (0..k).map(|_| VectorField::zero(bundle.base())).collect();
        LieAlgebroidData { bundle, anchor, structure: vec![vec![vec![S::zero(); k]; k]; k] }
    }

    /// Anchor `-rho`, bracket `-[,]`.
    pub fn opposite(&self) -> Self {
        LieAlgebroidData {
            bundle: self.bundle.clone(),
            anchor: self.anchor.iter().map(|v| v.neg()).collect(),
            structure: self
                .structure
                .iter()
                .map(|r| r.iter().map(|c| c.iter().map(|x| -x.clone()).collect()).collect())
                .collect(),
        }
    }

    pub fn bundle(&self) -> &TrivialBundle {
        &self.bundle
    }

    pub fn anchor(&self) -> &[VectorField<S>] {
        &self.anchor
    }

    pub fn structure(&self) -> &Vec<Vec<Vec<S>>> {
        &self.structure
    }

    pub fn anchor_of(&self, s: &[S]) -> VectorField<S> {
        let mut v = VectorField::zero(self.bundle.base());
        for (a, f) in s.iter().enumerate() {
            if !f.is_zero() {
                v = v.add(&self.anchor[a].scale(f));
            }
        }
        v
    }

    /// `[s, t] = s^a t^b [e_a, e_b] + rho(s)(t^c) e_c - rho(t)(s^c) e_c`.
    pub fn bracket(&self, s: &[S], t: &[S]) -> Section<S> {
        let k = self.bundle.rank();
        let rs = self.anchor_of(s);
        let rt = self.anchor_of(t);
        let mut out: Section<S> = (0..k).map(|c| rs.apply(&t[c]) - &rt.apply(&s[c])).collect();
        for a in 0..k {
            if s[a].is_zero() {
                continue;
            }
            for b in 0..k {
                if t[b].is_zero() {
                    continue;
                }
                let f = s[a].clone() * &t[b];
                for (c, o) in out.iter_mut().enumerate() {
                    if !self.structure[a][b][c].is_zero() {
                        *o = o.clone() + &(f.clone() * &self.structure[a][b][c]);
                    }
                }
            }
        }
        out
    }

    fn violations(&self) -> Vec<String> {
        let k = self.bundle.rank();
        let frame = self.bundle.frame();
        let e = |a: usize| self.bundle.frame_section::<S>(a);
        let mut out = Vec::new();
        for a in 0..k {
            for b in a..k {
                let s = add_sections(&self.structure[a][b], &self.structure[b][a]);
                if !is_zero_section(&s) {
                    out.push(format!("[{0}, {1}] + [{1}, {0}] != 0", frame[a], frame[b]));
                }
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                let lhs = self.anchor_of(&self.structure[a][b]);
                let rhs = bracket(&self.anchor[a], &self.anchor[b]);
                if lhs != rhs {
                    out.push(format!("anchor is not a bracket morphism on ({}, {})", frame[a], frame[b]));
                }
            }
        }
        for a in 0..k {
            for b in a + 1..k {
                for c in b + 1..k {
                    let t1 = self.bracket(&self.bracket(&e(a), &e(b)), &e(c));
                    let t2 = self.bracket(&self.bracket(&e(b), &e(c)), &e(a));
                    let t3 = self.bracket(&self.bracket(&e(c), &e(a)), &e(b));
                    if !is_zero_section(&add_sections(&add_sections(&t1, &t2), &t3)) {
                        out.push(format!("Jacobi fails on ({}, {}, {})", frame[a], frame[b], frame[c]));
                    }
                }
            }
        }
        out
    }
}

/// `(nabla, l, r)`. `conn[i]` is the matrix of `nabla_{d_i}` on the frame
/// (column `a` is `nabla_{d_i} e_a`); `ell` uses the same column convention.
#[derive(Clone, Debug, PartialEq)]
pub struct OneDerivation<S> {
    bundle: TrivialBundle,
    conn: Vec<Matrix<S>>,
    ell: Matrix<S>,
    r: OneOneTensor<S>,
}

impl<S: Scalar> OneDerivation<S> {
    pub fn new(bundle: TrivialBundle, conn: Vec<Matrix<S>>, ell: Matrix<S>, r: OneOneTensor<S>) -> Result<Self, TensorError> {
        let (n, k) = (bundle.base().dim(), bundle.rank());
        same_chart(bundle.base(), r.chart())?;
        if conn.len() != n {
            return Err(TensorError::Dimension { what: "connection blocks".into(), expected: n, found: conn.len() });
        }
        for m in conn.iter().chain(std::iter::once(&ell)) {
            if m.len() != k || m.iter().any(|r| r.len() != k) {
                return Err(TensorError::Invalid(format!("connection and endomorphism blocks must be {k} x {k}")));
            }
        }
        Ok(OneDerivation { bundle, conn, ell, r })
    }

    /// `(0, l, r)`.
    pub fn flat(bundle: TrivialBundle, ell: Matrix<S>, r: OneOneTensor<S>) -> Result<Self, TensorError> {
        let k = bundle.rank();
        let conn = vec![linalg::zeros(k, k); bundle.base().dim()];
        Self::new(bundle, conn, ell, r)
    }

    pub fn bundle(&self) -> &TrivialBundle {
        &self.bundle
    }

    pub fn conn(&self) -> &[Matrix<S>] {
        &self.conn
    }

    pub fn ell(&self) -> &Matrix<S> {
        &self.ell
    }

    pub fn r(&self) -> &OneOneTensor<S> {
        &self.r
    }

    pub fn ell_apply(&self, s: &[S]) -> Section<S> {
        linalg::mul_vec(&self.ell, s)
    }

    /// `nabla_v e_a`, extended `C^inf`-linearly in `v`.
    fn on_frame(&self, v: &VectorField<S>, a: usize) -> Section<S> {
        let k = self.bundle.rank();
        let mut out = vec![S::zero(); k];
        for (i, vi) in v.comps().iter().enumerate() {
            if vi.is_zero() {
                continue;
            }
            for (b, o) in out.iter_mut().enumerate() {
                let g = &self.conn[i][b][a];
                if !g.is_zero() {
                    *o = o.clone() + &(vi.clone() * g);
                }
            }
        }
        out
    }

    /// `nabla_v(f e_a) = f nabla_v e_a + (L_v f) l(e_a) - (L_{r v} f) e_a`, summed over `a`.
    pub fn apply(&self, v: &VectorField<S>, s: &[S]) -> Section<S> {
        let k = self.bundle.rank();
        let rv = self.r.apply(v);
        let mut out = vec![S::zero(); k];
        for (a, f) in s.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            let vf = v.apply(f);
            let rvf = rv.apply(f);
            let na = self.on_frame(v, a);
            for b in 0..k {
                let mut term = na[b].clone() * f;
                if !vf.is_zero() && !self.ell[b][a].is_zero() {
                    term = term + &(vf.clone() * &self.ell[b][a]);
                }
                if b == a && !rvf.is_zero() {
                    term = term - &rvf;
                }
                out[b] = out[b].clone() + &term;
            }
        }
        out
    }
}

pub fn connection_apply<S: Scalar>(d: &OneDerivation<S>, v: &VectorField<S>, s: &[S]) -> Result<Section<S>, TensorError> {
    same_chart(d.bundle().base(), v.chart())?;
    if s.len() != d.bundle().rank() {
        return Err(TensorError::Dimension { what: "section".into(), expected: d.bundle().rank(), found: s.len() });
    }
    Ok(d.apply(v, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_scalar;
    use crate::ScalarExpr;

    #[test]
    fn leibniz_examples() {
        let c = Chart::new("R1", &["x"]).unwrap();
        let b = TrivialBundle::new("E", &c, &["e"]).unwrap();
        let x = parse_scalar("x", &c).unwrap();
        let one = ScalarExpr::one();
        let dx = VectorField::coordinate(&c, 0);
        let d = OneDerivation::flat(b.clone(), vec![vec![one.clone()]], OneOneTensor::identity(&c)).unwrap();
        assert!(is_zero_section(&connection_apply(&d, &dx, &[x.clone()]).unwrap()));
        let d2 = OneDerivation::flat(b, vec![vec![ScalarExpr::from_int(2)]], OneOneTensor::identity(&c)).unwrap();
        assert_eq!(connection_apply(&d2, &dx, &[x]).unwrap(), vec![one]);
    }

    #[test]
    fn algebroid_validation_rejects_bad_anchor() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let b = TrivialBundle::new("E", &c, &["a", "b"]).unwrap();
        let x = parse_scalar("x", &c).unwrap();
        let anchor = vec![VectorField::coordinate(&c, 0), VectorField::new(&c, vec![ScalarExpr::zero(), x]).unwrap()];
        let zero = vec![vec![vec![ScalarExpr::zero(); 2]; 2]; 2];
        assert!(LieAlgebroidData::new(b, anchor, zero).is_err());
    }

    #[test]
    fn cotangent_algebroid_of_linear_poisson() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let pi = Multivector::from_terms(&c, 2, vec![(vec![0, 1], parse_scalar("x", &c).unwrap())]).unwrap();
        assert!(LieAlgebroidData::cotangent(&pi).is_ok());
    }
}
