//! Linear (1,1)-tensors on the total space of a framed bundle and their
//! 1-derivations.

use super::{OneDerivation, TrivialBundle};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::{same_chart, TensorError};

/// Coordinates past `n` are dropped.
fn to_base<S: Scalar>(f: &S, total: usize, n: usize) -> S {
    let map: Vec<Option<usize>> = (0..total).map(|i| if i < n { Some(i) } else { None }).collect();
    f.reindex(&map)
}

fn to_total<S: Scalar>(f: &S, n: usize) -> S {
    let map: Vec<Option<usize>> = (0..n).map(Some).collect();
    f.reindex(&map)
}

fn fiber_free<S: Scalar>(f: &S, n: usize, total: usize) -> bool {
    (n..total).all(|i| f.independent_of(i))
}

/// Recover `(nabla, l, r)` from a linear tensor `R` on the total chart of `bundle`.
pub fn derivation_of_tensor<S: Scalar>(big_r: &OneOneTensor<S>, bundle: &TrivialBundle) -> Result<OneDerivation<S>, TensorError> {
    same_chart(bundle.total_chart(), big_r.chart())?;
    let n = bundle.base().dim();
    let k = bundle.rank();
    let t = n + k;
    let m = big_r.matrix();
    let coords = bundle.total_chart().coords();
    let not_linear = |what: String| TensorError::Invalid(format!("tensor is not linear: {what}"));

    let mut r = vec![vec![S::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if !fiber_free(&m[i][j], n, t) {
                return Err(not_linear(format!("base block entry ({}, {}) depends on the fiber", coords[i], coords[j])));
            }
            r[i][j] = to_base(&m[i][j], t, n);
        }
        for a in 0..k {
            if !m[i][n + a].is_zero() {
                return Err(not_linear(format!("R(d/d{}) has a d/d{} component", coords[n + a], coords[i])));
            }
        }
    }
    let mut ell = vec![vec![S::zero(); k]; k];
    for b in 0..k {
        for a in 0..k {
            if !fiber_free(&m[n + b][n + a], n, t) {
                return Err(not_linear(format!("fiber block entry ({}, {}) depends on the fiber", coords[n + b], coords[n + a])));
            }
            ell[b][a] = to_base(&m[n + b][n + a], t, n);
        }
    }
    let mut conn: Vec<Matrix<S>> = vec![vec![vec![S::zero(); k]; k]; n];
    for j in 0..n {
        for b in 0..k {
            let f = &m[n + b][j];
            let mut euler = S::zero();
            for a in 0..k {
                let g = f.partial(n + a);
                if !fiber_free(&g, n, t) {
                    return Err(not_linear(format!("mixed block entry ({}, {}) is not linear in the fiber", coords[n + b], coords[j])));
                }
                euler = euler + &(S::coordinate(bundle.total_chart(), n + a) * &g);
                conn[j][b][a] = to_base(&g, t, n);
            }
            if euler != *f {
                return Err(not_linear(format!("mixed block entry ({}, {}) is not homogeneous in the fiber", coords[n + b], coords[j])));
            }
        }
    }
    OneDerivation::new(bundle.clone(), conn, ell, OneOneTensor::new(bundle.base(), r)?)
}

/// `R(d/dx^j) = r(d/dx^j) + Gamma^b_{ja} y^a d/dy^b`, `R(d/dy^a) = l(e_a)`.
pub fn tensor_of_derivation<S: Scalar>(d: &OneDerivation<S>) -> Result<OneOneTensor<S>, TensorError> {
    let bundle = d.bundle();
    let total = bundle.total_chart();
    let n = bundle.base().dim();
    let k = bundle.rank();
    let t = n + k;
    let mut m = vec![vec![S::zero(); t]; t];
    for i in 0..n {
        for j in 0..n {
            m[i][j] = to_total(&d.r().matrix()[i][j], n);
        }
    }
    for b in 0..k {
        for a in 0..k {
            m[n + b][n + a] = to_total(&d.ell()[b][a], n);
        }
        for j in 0..n {
            let mut f = S::zero();
            for a in 0..k {
                let g = &d.conn()[j][b][a];
                if !g.is_zero() {
                    f = f + &(S::coordinate(total, n + a) * &to_total(g, n));
                }
            }
            m[n + b][j] = f;
        }
    }
    OneOneTensor::new(total, m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{parse_scalar, Chart};
    use crate::tensor::lift::tangent_lift;
    use crate::ScalarExpr;

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    #[test]
    fn tangent_lift_round_trip() {
        let c = Chart::new("R2", &["x", "y"]).unwrap();
        let r = OneOneTensor::new(&c, vec![vec![s(&c, "x*y"), s(&c, "y^2")], vec![s(&c, "1"), s(&c, "x")]]).unwrap();
        let big = tangent_lift(&r);
        let b = TrivialBundle::tangent(&c);
        let d = derivation_of_tensor(&big, &b).unwrap();
        assert_eq!(d.r(), &r);
        assert_eq!(d.ell(), r.matrix());
        assert_eq!(tensor_of_derivation(&d).unwrap(), big);
    }

    #[test]
    fn rejects_non_linear() {
        let c = Chart::new("R1", &["x"]).unwrap();
        let b = TrivialBundle::new("E", &c, &["y"]).unwrap();
        let t = b.total_chart().clone();
        let bad = OneOneTensor::new(&t, vec![vec![s(&t, "1"), s(&t, "0")], vec![s(&t, "y^2"), s(&t, "1")]]).unwrap();
        assert!(derivation_of_tensor(&bad, &b).is_err());
        let bad = OneOneTensor::new(&t, vec![vec![s(&t, "1"), s(&t, "0")], vec![s(&t, "1"), s(&t, "1")]]).unwrap();
        assert!(derivation_of_tensor(&bad, &b).is_err());
        let bad = OneOneTensor::new(&t, vec![vec![s(&t, "y"), s(&t, "0")], vec![s(&t, "0"), s(&t, "1")]]).unwrap();
        assert!(derivation_of_tensor(&bad, &b).is_err());
    }
}
