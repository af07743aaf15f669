use nijenhuis_core::derivations::equations::nabla_squared;
use nijenhuis_core::derivations::{
    check_nijenhuis_equations, derivation_of_tensor, tensor_of_derivation, OneDerivation, TrivialBundle,
};
use nijenhuis_core::dirac::pn::{is_poisson_nijenhuis, poisson_hierarchy};
use nijenhuis_core::dirac::{is_involutive, modular::modular_field, DiracStructure};
use nijenhuis_core::expr::parse::parse_expr;
use nijenhuis_core::tensor::endo::{is_nijenhuis, nijenhuis_torsion, OneOneTensor};
use nijenhuis_core::tensor::field::{lie_bracket, VectorField};
use nijenhuis_core::tensor::form::{DiffForm, Multivector};
use nijenhuis_core::tensor::lift::{cotangent_lift, cotangent_lift_residual, tangent_lift};
use nijenhuis_core::tensor::VolumeDensity;
use nijenhuis_core::{Chart, Rational, Scalar, ScalarExpr};
use proptest::prelude::*;

type Terms = Vec<(i64, [u32; 3])>;

fn chart(n: usize) -> Chart {
    Chart::new("M", &["x", "y", "z"][..n]).unwrap()
}

fn poly(terms: &Terms, n: usize) -> ScalarExpr {
    let mut acc = ScalarExpr::zero();
    for (c, e) in terms {
        let mut m = ScalarExpr::from_int(*c);
        for (i, k) in e.iter().enumerate().take(n) {
            m = m * &ScalarExpr::var(i).pow(*k);
        }
        acc = acc + m;
    }
    acc
}

/// Polynomials of total degree at most `deg` in three variables.
fn terms(deg: u32) -> impl Strategy<Value = Terms> {
    prop::collection::vec((-3i64..=3, [0..=deg, 0..=deg, 0..=deg]), 0..4)
        .prop_map(move |v| v.into_iter().filter(|(_, e)| e.iter().sum::<u32>() <= deg).collect())
}

fn field(ts: &[Terms], c: &Chart) -> VectorField<ScalarExpr> {
    VectorField::new(c, ts.iter().map(|t| poly(t, c.dim())).collect()).unwrap()
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-10i64..=10, 1i64..=7).prop_map(|(a, b)| Rational::new(a.into(), b.into()))
}

fn expr_src() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        (-5i64..=5).prop_map(|c| c.to_string()),
        prop::sample::select(vec!["x", "y", "z"]).prop_map(String::from),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        (inner.clone(), prop::sample::select(vec!["+", "-", "*", "/"]), inner)
            .prop_map(|(a, op, b)| format!("({a} {op} {b})"))
    })
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig { cases, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn canonical_form_evaluates_like_the_tree(src in expr_src(), pts in prop::collection::vec([small_rational(), small_rational(), small_rational()], 4)) {
        let c = chart(3);
        let tree = parse_expr(&src, &c).unwrap();
        let Ok(f) = tree.to_scalar() else { return Ok(()) };
        for p in pts {
            if let Ok(v) = tree.eval(&p) {
                prop_assert_eq!(f.eval(&p), Some(v));
            }
        }
    }

    #[test]
    fn derivative_is_linear_and_leibniz(a in terms(3), b in terms(3), i in 0usize..3) {
        let (f, g) = (poly(&a, 3), poly(&b, 3));
        prop_assert_eq!((f.clone() + &g).partial(i), f.partial(i) + g.partial(i));
        prop_assert_eq!((f.clone() * &g).partial(i), f.clone() * &g.partial(i) + g.clone() * &f.partial(i));
    }

    #[test]
    fn nonzero_functions_have_a_nonzero_sample(a in terms(3), b in terms(2)) {
        let f = poly(&a, 3) * &poly(&b, 3);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0);
        let c = chart(3);
        let hits = (0..32)
            .map(|_| nijenhuis_core::expr::random_point(&c, &mut rng))
            .filter(|p| f.eval(p.values()).is_some_and(|v| v != Rational::from_integer(0.into())))
            .count();
        prop_assert_eq!(hits > 0, !f.is_zero());
    }

    #[test]
    fn bracket_is_antisymmetric(u in prop::collection::vec(terms(3), 3), v in prop::collection::vec(terms(3), 3)) {
        let c = chart(3);
        let (u, v) = (field(&u, &c), field(&v, &c));
        prop_assert_eq!(lie_bracket(&u, &v).unwrap(), lie_bracket(&v, &u).unwrap().neg());
    }

    #[test]
    fn f_times_identity_is_nijenhuis(a in terms(3)) {
        let c = chart(3);
        prop_assert!(nijenhuis_torsion(&OneOneTensor::scalar(&c, poly(&a, 3))).is_zero());
    }

    #[test]
    fn d_squared_vanishes(a in prop::collection::vec(terms(3), 3), k in 0usize..3) {
        let c = chart(3);
        let comps: Vec<ScalarExpr> = a.iter().map(|t| poly(t, 3)).collect();
        let w = match k {
            0 => DiffForm::function(&c, comps[0].clone()),
            1 => DiffForm::one_form(&c, comps).unwrap(),
            _ => DiffForm::new(&c, 2, comps).unwrap(),
        };
        prop_assert!(w.exterior_derivative().exterior_derivative().is_zero());
    }

    #[test]
    fn graphs_are_lagrangian(a in prop::collection::vec(terms(3), 3)) {
        let c = chart(3);
        let comps: Vec<ScalarExpr> = a.iter().map(|t| poly(t, 3)).collect();
        let w = DiffForm::new(&c, 2, comps.clone()).unwrap();
        let pi = Multivector::new(&c, 2, comps).unwrap();
        prop_assert!(DiracStructure::graph_of_two_form(&w).unwrap().lagrangian_witnesses().is_empty());
        prop_assert!(DiracStructure::graph_of_bivector(&pi).unwrap().lagrangian_witnesses().is_empty());
    }

    #[test]
    fn twisted_graph_involutive_iff_closed(a in prop::collection::vec(terms(2), 3), shift in -3i64..=3) {
        let c = chart(3);
        let w = DiffForm::new(&c, 2, a.iter().map(|t| poly(t, 3)).collect()).unwrap();
        let vol = DiffForm::new(&c, 3, vec![ScalarExpr::from_int(shift)]).unwrap();
        let eta = w.exterior_derivative().add(&vol);
        let l = DiracStructure::graph_of_two_form_twisted(&w, &eta).unwrap();
        prop_assert_eq!(is_involutive(&l).is_ok(), shift == 0);
    }

    #[test]
    fn planar_bivectors_are_poisson(a in terms(3)) {
        let c = chart(2);
        let pi = Multivector::new(&c, 2, vec![poly(&a, 2)]).unwrap();
        prop_assert!(is_involutive(&DiracStructure::graph_of_bivector(&pi).unwrap()).is_ok());
    }

    #[test]
    fn modular_field_gauge(a in terms(2), b in terms(2), k in 1i64..=4) {
        let c = chart(2);
        let pi = Multivector::new(&c, 2, vec![poly(&a, 2)]).unwrap();
        // g has no zeros on the chart's real points but is nonconstant
        let g = poly(&b, 2) * &poly(&b, 2) + ScalarExpr::from_int(k);
        let nu = VolumeDensity::standard(&c);
        let lhs = modular_field(&pi, &nu.times(&g).unwrap()).unwrap().sub(&modular_field(&pi, &nu).unwrap());
        let dg = DiffForm::function(&c, g.clone()).exterior_derivative();
        let rhs = pi.sharp(&dg).scale(&g.inv().unwrap()).neg();
        prop_assert_eq!(lhs, rhs);
    }
}

proptest! {
    #![proptest_config(config(16))]

    #[test]
    fn bracket_satisfies_jacobi(u in prop::collection::vec(terms(2), 3), v in prop::collection::vec(terms(2), 3), w in prop::collection::vec(terms(2), 3)) {
        let c = chart(3);
        let (u, v, w) = (field(&u, &c), field(&v, &c), field(&w, &c));
        let br = |a: &VectorField<ScalarExpr>, b: &VectorField<ScalarExpr>| lie_bracket(a, b).unwrap();
        let sum = br(&br(&u, &v), &w).add(&br(&br(&v, &w), &u)).add(&br(&br(&w, &u), &v));
        prop_assert!(sum.is_zero());
    }

    #[test]
    fn derivation_tensor_round_trip(
        conn in prop::collection::vec(prop::collection::vec(terms(2), 4), 2),
        ell in prop::collection::vec(terms(2), 4),
        r in prop::collection::vec(terms(2), 4),
    ) {
        let c = chart(2);
        let block = |t: &[Terms]| vec![vec![poly(&t[0], 2), poly(&t[1], 2)], vec![poly(&t[2], 2), poly(&t[3], 2)]];
        let e = TrivialBundle::new("E", &c, &["e1", "e2"]).unwrap();
        let r = OneOneTensor::new(&c, block(&r)).unwrap();
        let d = OneDerivation::new(e.clone(), conn.iter().map(|m| block(m)).collect(), block(&ell), r).unwrap();
        let big_r = tensor_of_derivation(&d).unwrap();
        prop_assert_eq!(&derivation_of_tensor(&big_r, &e).unwrap(), &d);
        prop_assert_eq!(check_nijenhuis_equations(&d).holds(), is_nijenhuis(&big_r));
    }

    #[test]
    fn tangent_lift_reads_back(r in prop::collection::vec(terms(2), 4)) {
        let c = chart(2);
        let m = vec![vec![poly(&r[0], 2), poly(&r[1], 2)], vec![poly(&r[2], 2), poly(&r[3], 2)]];
        let r = OneOneTensor::new(&c, m).unwrap();
        let d = derivation_of_tensor(&tangent_lift(&r), &TrivialBundle::tangent(&c)).unwrap();
        prop_assert_eq!(d.r(), &r);
        prop_assert_eq!(d.ell(), r.matrix());
    }

    #[test]
    fn cotangent_lift_residual_vanishes(r in prop::collection::vec(terms(2), 4)) {
        let c = chart(2);
        let m = vec![vec![poly(&r[0], 2), poly(&r[1], 2)], vec![poly(&r[2], 2), poly(&r[3], 2)]];
        let r = OneOneTensor::new(&c, m).unwrap();
        let lifted = cotangent_lift(&r).unwrap();
        prop_assert!(cotangent_lift_residual(&r, &lifted).unwrap().is_empty());
    }

    #[test]
    fn nabla_squared_is_function_bilinear(
        a in terms(2), b in terms(2),
        u in prop::collection::vec(terms(2), 2), v in prop::collection::vec(terms(2), 2), xi in prop::collection::vec(terms(2), 2),
        f in terms(2),
    ) {
        let c = chart(2);
        let r = OneOneTensor::diagonal(&c, vec![poly(&a, 1), poly(&b, 1).compose(&[ScalarExpr::var(1)])]).unwrap();
        prop_assert!(is_nijenhuis(&r));
        let d = derivation_of_tensor(&tangent_lift(&r), &TrivialBundle::tangent(&c)).unwrap();
        prop_assert!(check_nijenhuis_equations(&d).holds());
        let (u, v) = (field(&u, &c), field(&v, &c));
        let xi: Vec<ScalarExpr> = xi.iter().map(|t| poly(t, 2)).collect();
        let f = poly(&f, 2);
        let base = nabla_squared(&d, &u, &v, &xi);
        let scaled = nabla_squared(&d, &u.scale(&f), &v, &xi);
        let expected: Vec<ScalarExpr> = base.iter().map(|s| s.clone() * &f).collect();
        prop_assert_eq!(scaled, expected);
        prop_assert!(base.iter().all(|s| s.is_zero()));
    }

    #[test]
    fn pn_hierarchy_stays_poisson(a in terms(1), n in 1u32..=3) {
        let c = chart(2);
        let pi = Multivector::new(&c, 2, vec![ScalarExpr::one()]).unwrap();
        let r = OneOneTensor::scalar(&c, poly(&a, 2));
        prop_assert!(is_poisson_nijenhuis(&pi, &r).unwrap().holds());
        let pin = poisson_hierarchy(&pi, &r, n).unwrap();
        prop_assert!(is_involutive(&DiracStructure::graph_of_bivector(&pin).unwrap()).is_ok());
    }
}
