use super::{add_sections, is_zero_section, sub_sections, LieAlgebroidData, OneDerivation, Section};
use crate::linalg;
use crate::scalar::Scalar;
use crate::tensor::endo::{nabla_r, nijenhuis_torsion, OneOneTensor};
use crate::tensor::field::{bracket, VectorField};
use crate::tensor::map::matrix_witnesses;
use crate::tensor::TensorError;
use crate::verdict::{CheckReport, Verdict};

fn coord_name<S: Scalar>(d: &OneDerivation<S>, i: usize) -> String {
    format!("d/d{}", d.bundle().base().coords()[i])
}

fn section_witness<S: Scalar>(d: &OneDerivation<S>, label: String, s: &[S]) -> Option<String> {
    if is_zero_section(s) {
        None
    } else {
        Some(format!("{label} = {}", d.bundle().render_section(s)))
    }
}

/// `[u, v]_r = [ru, v] + [u, rv] - r[u, v]`.
pub fn r_bracket<S: Scalar>(r: &OneOneTensor<S>, u: &VectorField<S>, v: &VectorField<S>) -> VectorField<S> {
    bracket(&r.apply(u), v).add(&bracket(u, &r.apply(v))).sub(&r.apply(&bracket(u, v)))
}

/// `l(nabla_{[u,v]} xi) - [nabla_u, nabla_v] xi - nabla_{[u,v]_r} xi`.
pub fn nabla_squared<S: Scalar>(d: &OneDerivation<S>, u: &VectorField<S>, v: &VectorField<S>, xi: &[S]) -> Section<S> {
    let uv = bracket(u, v);
    let first = d.ell_apply(&d.apply(&uv, xi));
    let comm = sub_sections(&d.apply(u, &d.apply(v, xi)), &d.apply(v, &d.apply(u, xi)));
    let last = d.apply(&r_bracket(d.r(), u, v), xi);
    sub_sections(&sub_sections(&first, &comm), &last)
}

pub fn check_nijenhuis_equations<S: Scalar>(d: &OneDerivation<S>) -> CheckReport {
    let base = d.bundle().base();
    let n = base.dim();
    let k = d.bundle().rank();
    let frame = d.bundle().frame();
    let mut report = CheckReport::new();
    report.push("torsion of r vanishes", Verdict::from_witnesses(nijenhuis_torsion(d.r()).witnesses()));

    let mut w = Vec::new();
    for i in 0..n {
        let v = VectorField::coordinate(base, i);
        for a in 0..k {
            let e = d.bundle().frame_section::<S>(a);
            let lhs = d.ell_apply(&d.apply(&v, &e));
            let rhs = d.apply(&v, &d.ell_apply(&e));
            let label = format!("l(nabla_{0} {1}) - nabla_{0}(l {1})", coord_name(d, i), frame[a]);
            w.extend(section_witness(d, label, &sub_sections(&lhs, &rhs)));
        }
    }
    report.push("l commutes with nabla", Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let u = VectorField::coordinate(base, i);
            let v = VectorField::coordinate(base, j);
            for a in 0..k {
                let res = nabla_squared(d, &u, &v, &d.bundle().frame_section(a));
                let label = format!("nabla^2_({}, {}) {}", coord_name(d, i), coord_name(d, j), frame[a]);
                w.extend(section_witness(d, label, &res));
            }
        }
    }
    report.push("nabla^2 vanishes", Verdict::from_witnesses(w));
    report
}

pub fn check_im_equations<S: Scalar>(d: &OneDerivation<S>, alg: &LieAlgebroidData<S>) -> Result<CheckReport, TensorError> {
    if d.bundle() != alg.bundle() {
        return Err(TensorError::Invalid(format!(
            "bundle mismatch: derivation on {}, algebroid on {}",
            d.bundle().name(),
            alg.bundle().name()
        )));
    }
    let base = d.bundle().base();
    let n = base.dim();
    let k = d.bundle().rank();
    let frame = d.bundle().frame();
    let e = |a: usize| d.bundle().frame_section::<S>(a);
    let mut report = CheckReport::new();

    let mut w = Vec::new();
    for i in 0..n {
        let v = VectorField::coordinate(base, i);
        for a in 0..k {
            for b in a + 1..k {
                let (xi, zeta) = (e(a), e(b));
                let lhs = d.apply(&v, &alg.bracket(&xi, &zeta));
                let rho_xi = alg.anchor_of(&xi);
                let rho_zeta = alg.anchor_of(&zeta);
                let rhs = add_sections(
                    &add_sections(&alg.bracket(&d.apply(&v, &xi), &zeta), &alg.bracket(&xi, &d.apply(&v, &zeta))),
                    &sub_sections(&d.apply(&bracket(&rho_zeta, &v), &xi), &d.apply(&bracket(&rho_xi, &v), &zeta)),
                );
                let label = format!("bracket identity at ({}, {}, {})", coord_name(d, i), frame[a], frame[b]);
                w.extend(section_witness(d, format!("{label}: lhs - rhs"), &sub_sections(&lhs, &rhs)));
            }
        }
    }
    report.push("nabla is a derivation of the bracket", Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for a in 0..k {
        for b in 0..k {
            let (xi, zeta) = (e(a), e(b));
            let lhs = d.ell_apply(&alg.bracket(&xi, &zeta));
            let rhs = sub_sections(&alg.bracket(&xi, &d.ell_apply(&zeta)), &d.apply(&alg.anchor_of(&zeta), &xi));
            let label = format!("l[{0}, {1}] - [{0}, l {1}] + nabla_rho({1}) {0}", frame[a], frame[b]);
            w.extend(section_witness(d, label, &sub_sections(&lhs, &rhs)));
        }
    }
    report.push("l and the bracket", Verdict::from_witnesses(w));

    let mut w = Vec::new();
    for i in 0..n {
        let v = VectorField::coordinate(base, i);
        for a in 0..k {
            let lhs = alg.anchor_of(&d.apply(&v, &e(a)));
            let rhs = nabla_r(d.r(), &v, &alg.anchor()[a])?;
            let diff = lhs.sub(&rhs);
            if !diff.is_zero() {
                w.push(format!("rho(nabla_{0} {1}) - nabla^r_{0} rho({1}) = {2}", coord_name(d, i), frame[a], diff.render()));
            }
        }
    }
    report.push("rho intertwines nabla and nabla^r", Verdict::from_witnesses(w));

    let anchor_m: linalg::Matrix<S> = linalg::transpose(&alg.anchor().iter().map(|v| v.comps().to_vec()).collect());
    let anchor_m = if k == 0 { vec![Vec::new(); n] } else { anchor_m };
    let res = linalg::sub(&linalg::mul(d.r().matrix(), &anchor_m), &linalg::mul(&anchor_m, d.ell()));
    report.push("r o rho = rho o l", Verdict::from_witnesses(matrix_witnesses("r rho - rho l", &res, base)));
    Ok(report)
}

pub fn check_holomorphic<S: Scalar>(d: &OneDerivation<S>) -> CheckReport {
    let base = d.bundle().base();
    let n = base.dim();
    let k = d.bundle().rank();
    let mut report = CheckReport::new();
    if n % 2 == 1 || k % 2 == 1 {
        let why = format!("odd dimension or rank (base {n}, rank {k}): no complex structure exists");
        report.push("dimensions are even", Verdict::fail(why));
        return report;
    }
    let r2 = d.r().compose(d.r()).add(&OneOneTensor::identity(base));
    report.push("r^2 = -id", Verdict::from_witnesses(matrix_witnesses("r^2 + id", r2.matrix(), base)));
    let l2 = linalg::mul(d.ell(), d.ell());
    let l2: linalg::Matrix<S> = l2
        .into_iter()
        .enumerate()
        .map(|(i, row)| row.into_iter().enumerate().map(|(j, x)| if i == j { x + &S::one() } else { x }).collect())
        .collect();
    report.push("l^2 = -id", Verdict::from_witnesses(matrix_witnesses("l^2 + id", &l2, base)));
    let mut w = Vec::new();
    for i in 0..n {
        let v = VectorField::coordinate(base, i);
        let rv = d.r().apply(&v);
        for a in 0..k {
            let u = d.bundle().frame_section::<S>(a);
            let res = add_sections(&d.ell_apply(&d.apply(&v, &u)), &d.apply(&rv, &u));
            let label = format!("l(nabla_{0} {1}) + nabla_r({0}) {1}", coord_name(d, i), d.bundle().frame()[a]);
            w.extend(section_witness(d, label, &res));
        }
    }
    report.push("l(nabla_v u) + nabla_{r v} u = 0", Verdict::from_witnesses(w));
    report.extend_prefixed("Nijenhuis equations: ", check_nijenhuis_equations(d));
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derivations::linear::{derivation_of_tensor, tensor_of_derivation};
    use crate::derivations::TrivialBundle;
    use crate::expr::{parse_scalar, Chart};
    use crate::tensor::lift::tangent_lift;
    use crate::ScalarExpr;

    fn s(c: &Chart, e: &str) -> ScalarExpr {
        parse_scalar(e, c).unwrap()
    }

    fn m(c: &Chart, rows: &[&[&str]]) -> linalg::Matrix<ScalarExpr> {
        rows.iter().map(|r| r.iter().map(|e| s(c, e)).collect()).collect()
    }

    fn r2() -> Chart {
        Chart::new("R2", &["x", "y"]).unwrap()
    }

    #[test]
    fn nijenhuis_examples() {
        let c = r2();
        let b = TrivialBundle::new("E", &c, &["e1", "e2"]).unwrap();
        let id: OneOneTensor<ScalarExpr> = OneOneTensor::identity(&c);
        let d = OneDerivation::flat(b.clone(), linalg::identity(2), id).unwrap();
        assert!(check_nijenhuis_equations(&d).holds());
        let nd = OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap();
        let d = OneDerivation::flat(b, linalg::identity(2), nd).unwrap();
        let rep = check_nijenhuis_equations(&d);
        assert!(rep.clause("torsion of r vanishes").unwrap().verdict.is_fail());
    }

    #[test]
    fn suite_agrees_with_total_torsion() {
        let c = r2();
        let b = TrivialBundle::new("E", &c, &["e1", "e2"]).unwrap();
        let fixtures = [
            (vec![m(&c, &[&["0", "0"], &["0", "0"]]), m(&c, &[&["0", "0"], &["0", "0"]])], m(&c, &[&["1", "0"], &["0", "1"]]), "x"),
            (vec![m(&c, &[&["x", "0"], &["0", "1"]]), m(&c, &[&["0", "y"], &["0", "0"]])], m(&c, &[&["2", "0"], &["0", "3"]]), "1"),
            (vec![m(&c, &[&["1", "0"], &["0", "1"]]), m(&c, &[&["0", "0"], &["0", "0"]])], m(&c, &[&["x", "0"], &["0", "x"]]), "x"),
            (vec![m(&c, &[&["y", "1"], &["0", "y"]]), m(&c, &[&["x", "0"], &["1", "x"]])], m(&c, &[&["0", "-1"], &["1", "0"]]), "2"),
        ];
        let mut seen = [false; 2];
        for (conn, ell, f) in fixtures {
            let r = OneOneTensor::scalar(&c, s(&c, f));
            let d = OneDerivation::new(b.clone(), conn, ell, r).unwrap();
            let total = tensor_of_derivation(&d).unwrap();
            let holds = check_nijenhuis_equations(&d).holds();
            assert_eq!(holds, nijenhuis_torsion(&total).is_zero());
            seen[holds as usize] = true;
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn tangent_lifts_are_im() {
        let c = r2();
        let alg = LieAlgebroidData::tangent(&c);
        for r in [OneOneTensor::identity(&c), OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap()] {
            let d = derivation_of_tensor(&tangent_lift(&r), alg.bundle()).unwrap();
            let rep = check_im_equations(&d, &alg).unwrap();
            assert!(rep.holds(), "{:?}", rep.first_failure());
        }
    }

    #[test]
    fn corrupted_connection_fails_im() {
        let c = r2();
        let alg = LieAlgebroidData::tangent(&c);
        let r = OneOneTensor::diagonal(&c, vec![s(&c, "y"), s(&c, "x")]).unwrap();
        let d = derivation_of_tensor(&tangent_lift(&r), alg.bundle()).unwrap();
        let mut conn = d.conn().to_vec();
        conn[0][1][0] = conn[0][1][0].clone() + &s(&c, "x");
        let bad = OneDerivation::new(d.bundle().clone(), conn, d.ell().clone(), d.r().clone()).unwrap();
        assert!(!check_im_equations(&bad, &alg).unwrap().holds());
    }

    #[test]
    fn abelian_algebroid_accepts_constant_ell() {
        let c = r2();
        let b = TrivialBundle::new("E", &c, &["e1", "e2"]).unwrap();
        let alg = LieAlgebroidData::abelian(b.clone());
        let d = OneDerivation::flat(b, m(&c, &[&["1", "2"], &["3", "4"]]), OneOneTensor::zero(&c)).unwrap();
        assert!(check_im_equations(&d, &alg).unwrap().holds());
    }

    #[test]
    fn holomorphic_examples() {
        let c = r2();
        let b = TrivialBundle::new("E", &c, &["e1", "e2"]).unwrap();
        let j0m = m(&c, &[&["0", "-1"], &["1", "0"]]);
        let j0 = OneOneTensor::new(&c, j0m.clone()).unwrap();
        let d = OneDerivation::flat(b.clone(), j0m.clone(), j0.clone()).unwrap();
        assert!(check_holomorphic(&d).holds());
        let d = OneDerivation::flat(b.clone(), j0m.clone(), OneOneTensor::identity(&c)).unwrap();
        assert!(check_holomorphic(&d).clause("r^2 = -id").unwrap().verdict.is_fail());
        let g1 = m(&c, &[&["2", "-5"], &["5", "2"]]);
        let g2 = linalg::mul(&j0m, &g1).into_iter().map(|r| r.into_iter().map(|x| -x).collect()).collect();
        let d = OneDerivation::new(b, vec![g1, g2], j0m, j0).unwrap();
        assert!(check_holomorphic(&d).holds());
    }
}
