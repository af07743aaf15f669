use std::sync::Once;

use crate::expr::{parse_scalar, Chart};
use crate::linalg::{self, Matrix};
use crate::scalar::Scalar;
use crate::tensor::endo::OneOneTensor;
use crate::tensor::form::DiffForm;
use crate::tensor::map::{matrix_witnesses, SmoothMap};
use crate::tensor::TensorError;
use crate::ScalarExpr;

/// Chart `(x^1..x^n, x^1_dot..x^n_dot)` of the tangent bundle.
pub fn tangent_chart(base: &Chart) -> Chart {
    let mut coords: Vec<String> = base.coords().to_vec();
    coords.extend(base.coords().iter().map(|c| format!("{c}_dot")));
    Chart::new(&format!("T{}", base.name()), &coords).expect("dotted names are fresh identifiers")
}

/// Chart `(x^1..x^n, p_x1..p_xn)` of the cotangent bundle.
pub fn cotangent_chart(base: &Chart) -> Chart {
    let mut coords: Vec<String> = base.coords().to_vec();
    coords.extend(base.coords().iter().map(|c| format!("p_{c}")));
    Chart::new(&format!("Tstar{}", base.name()), &coords).expect("momentum names are fresh identifiers")
}

fn lift_entry<S: Scalar>(f: &S, n: usize) -> S {
    f.reindex(&(0..n).map(Some).collect::<Vec<_>>())
}

fn lift_matrix<S: Scalar>(m: &Matrix<S>, n: usize) -> Matrix<S> {
    m.iter().map(|r| r.iter().map(|x| lift_entry(x, n)).collect()).collect()
}

/// The tangent lift on the doubled chart.
pub fn tangent_lift<S: Scalar>(j: &OneOneTensor<S>) -> OneOneTensor<S> {
    SELF_TEST.call_once(|| assert!(tangent_lift_self_test(), "tangent lift coordinate formula is wrong"));
    lift_formula(j)
}

fn lift_formula<S: Scalar>(j: &OneOneTensor<S>) -> OneOneTensor<S> {
    let n = j.chart().dim();
    let chart = tangent_chart(j.chart());
    let up = lift_matrix(j.matrix(), n);
    let mut m = linalg::zeros(2 * n, 2 * n);
    for i in 0..n {
        for r in 0..n {
            m[r][i] = up[r][i].clone();
            m[n + r][n + i] = up[r][i].clone();
            let mut acc = S::zero();
            for k in 0..n {
                let d = up[r][i].partial(k);
                if !d.is_zero() {
                    acc = acc + &(S::coordinate(&chart, n + k) * &d);
                }
            }
            m[n + r][i] = acc;
        }
    }
    OneOneTensor::raw(&chart, m)
}

static SELF_TEST: Once = Once::new();

/// Rederives the lift from `kappa o dJ o kappa` on a fixed symbolic tensor
/// and compares it with [`tangent_lift`].
pub fn tangent_lift_self_test() -> bool {
    let base = Chart::new("B", &["x", "y"]).expect("chart");
    let entries = [["x*y", "y^2 - x"], ["x^3", "x + 2*y"]];
    let jm: Matrix<ScalarExpr> =
        entries.iter().map(|r| r.iter().map(|e| parse_scalar(e, &base).expect("fixture")).collect()).collect();
    let n = 2;
    // F(x, w) = (x, J(x) w); its differential in direction (a, c) has fiber
    // part sum_k a^k d_k(J w) + J c. The involution swaps w and a.
    let big = Chart::new("TTB", &["x", "y", "w1", "w2", "a1", "a2"]).expect("chart");
    let lifted: Matrix<ScalarExpr> = lift_matrix(&jm, n);
    let jw: Vec<ScalarExpr> = (0..n)
        .map(|r| {
            let mut acc = ScalarExpr::zero();
            for i in 0..n {
                acc = acc + &(lifted[r][i].clone() * &ScalarExpr::coordinate(&big, n + i));
            }
            acc
        })
        .collect();
    let g: Vec<ScalarExpr> = jw
        .iter()
        .map(|f| {
            let mut acc = ScalarExpr::zero();
            for k in 0..n {
                acc = acc + &(ScalarExpr::coordinate(&big, 2 * n + k) * &Scalar::partial(f, k));
            }
            acc
        })
        .collect();
    let lift = lift_formula(&OneOneTensor::raw(&base, jm.clone())).matrix().clone();
    // a-variables sit at 2n.. in `big` and at n.. in the tangent chart
    let to_tangent: Vec<Option<usize>> = (0..3 * n)
        .map(|v| if v < n { Some(v) } else if v >= 2 * n { Some(v - n) } else { None })
        .collect();
    for r in 0..n {
        for i in 0..n {
            let derived = Scalar::partial(&g[r], n + i);
            let Some(derived) = derived.reindex(&to_tangent) else { return false };
            if derived != lift[n + r][i] || lift[r][i] != jm[r][i] || lift[n + r][n + i] != jm[r][i] {
                return false;
            }
            if !lift[r][n + i].is_zero() {
                return false;
            }
        }
    }
    true
}

/// The linear tensor on `T*M` defined by `i_{R v} omega_can = i_v phi_r^* omega_can`.
pub fn cotangent_lift<S: Scalar>(r: &OneOneTensor<S>) -> Result<OneOneTensor<S>, TensorError> {
    let n = r.chart().dim();
    let chart = cotangent_chart(r.chart());
    let can = canonical_form::<S>(&chart, n);
    let phi = momentum_map(r, &chart)?;
    let pulled = phi.pullback_form(&can)?;
    let f_can = can.flat_matrix();
    let inv = linalg::inverse(&f_can).ok_or_else(|| TensorError::Singular("canonical form".into()))?;
    Ok(OneOneTensor::raw(&chart, linalg::mul(&inv, &pulled.flat_matrix())))
}

fn canonical_form<S: Scalar>(chart: &Chart, n: usize) -> DiffForm<S> {
    DiffForm::from_terms(chart, 2, (0..n).map(|i| (vec![i, n + i], S::one())).collect()).expect("indices in range")
}

/// `(x, p) -> (x, r^* p)`.
fn momentum_map<S: Scalar>(r: &OneOneTensor<S>, chart: &Chart) -> Result<SmoothMap<S>, TensorError> {
    let n = r.chart().dim();
    let up = lift_matrix(r.matrix(), n);
    let mut formulas: Vec<S> = (0..n).map(|i| S::coordinate(chart, i)).collect();
    for jj in 0..n {
        let mut acc = S::zero();
        for i in 0..n {
            acc = acc + &(up[i][jj].clone() * &S::coordinate(chart, n + i));
        }
        formulas.push(acc);
    }
    SmoothMap::new("phi_r", chart, chart, formulas)
}

/// Nonzero entries of `omega_can-flat o R - (phi_r^* omega_can)-flat`.
pub fn cotangent_lift_residual<S: Scalar>(
    r: &OneOneTensor<S>,
    lifted: &OneOneTensor<S>,
) -> Result<Vec<String>, TensorError> {
    let n = r.chart().dim();
    let chart = cotangent_chart(r.chart());
    crate::tensor::same_chart(&chart, lifted.chart())?;
    let can = canonical_form::<S>(&chart, n);
    let pulled = momentum_map(r, &chart)?.pullback_form(&can)?;
    let lhs = linalg::mul(&can.flat_matrix(), lifted.matrix());
    Ok(matrix_witnesses("residual", &linalg::sub(&lhs, &pulled.flat_matrix()), &chart))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    #[test]
    fn self_test_passes() {
        assert!(tangent_lift_self_test());
    }

    #[test]
    fn tangent_lift_of_diag() {
        let c = r2();
        let t = tangent_lift(&OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap());
        let tc = t.chart().clone();
        let col = |j: usize| t.column(j).comps().to_vec();
        assert_eq!(col(0), vec![s(&tc, "y"), s(&tc, "0"), s(&tc, "y_dot"), s(&tc, "0")]);
        assert_eq!(col(1), vec![s(&tc, "0"), s(&tc, "x"), s(&tc, "0"), s(&tc, "x_dot")]);
        assert_eq!(col(2), vec![s(&tc, "0"), s(&tc, "0"), s(&tc, "y"), s(&tc, "0")]);
        assert_eq!(col(3), vec![s(&tc, "0"), s(&tc, "0"), s(&tc, "0"), s(&tc, "x")]);
    }

    #[test]
    fn cotangent_lift_of_constant_is_block_transpose() {
        let c = r2();
        let r = OneOneTensor::new(&c, vec![vec![s(&c, "1"), s(&c, "2")], vec![s(&c, "3"), s(&c, "4")]]).unwrap();
        let l = cotangent_lift(&r).unwrap();
        let tc = l.chart().clone();
        let m: Vec<Vec<ScalarExpr>> = ["1 2 0 0", "3 4 0 0", "0 0 1 3", "0 0 2 4"]
            .iter()
            .map(|row| row.split(' ').map(|e| s(&tc, e)).collect())
            .collect();
        assert_eq!(l.matrix(), &m);
        assert!(cotangent_lift_residual(&r, &l).unwrap().is_empty());
    }

    #[test]
    fn cotangent_lift_of_diag_satisfies_relation() {
        let c = r2();
        let r = OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap();
        let l = cotangent_lift(&r).unwrap();
        assert!(cotangent_lift_residual(&r, &l).unwrap().is_empty());
    }
}
