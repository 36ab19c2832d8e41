mod common;

use common::*;
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use wavereduce::expr::{parse, Assignment, Expr, Func, Node};
use wavereduce::lemma::hamilton_cayley_check;
use wavereduce::minkowski::{dalembertian, minor_sums, mixed_hessian, random_frame, validate_frame, MixedHessian};

fn leaf() -> impl Strategy<Value = Expr> {
    prop_oneof![
        (0usize..4).prop_map(Expr::var),
        (-3i64..=3).prop_map(Expr::int),
        (1i64..=4, 2i64..=5).prop_map(|(a, b)| Expr::rational(a, b)),
    ]
}

fn tree() -> impl Strategy<Value = Expr> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Add(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Sub(a, b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::new(Node::Mul(a, b))),
            (inner.clone(), inner.clone())
                .prop_map(|(a, b)| Expr::new(Node::Div(a, Expr::int(2) + b.powi(2)))),
            (inner.clone(), 0i64..=3).prop_map(|(a, k)| a.powi(k)),
            inner.clone().prop_map(|a| Expr::new(Node::Neg(a))),
            inner.clone().prop_map(|a| a.sin()),
            inner.clone().prop_map(|a| a.cos()),
            inner.clone().prop_map(|a| (a / Expr::int(4)).exp()),
            inner.clone().prop_map(|a| (Expr::one() + a.powi(2)).sqrt()),
            inner.clone().prop_map(|a| (Expr::one() + a.powi(2)).ln()),
            inner.prop_map(|a| Expr::call(Func::Arctan, a)),
        ]
    })
}

fn point() -> impl Strategy<Value = Assignment> {
    prop::array::uniform4(-1.5f64..1.5).prop_map(|v| Assignment::real(&v))
}

fn moderate(v: f64) -> bool {
    v.is_finite() && v.abs() < 1e4
}

fn complex_matrix(dim: usize) -> impl Strategy<Value = DMatrix<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -1.0f64..1.0), dim * dim)
        .prop_map(move |v| DMatrix::from_fn(dim, dim, |i, j| Complex64::new(v[i * dim + j].0, v[i * dim + j].1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn derivative_matches_central_difference(e in tree(), p in point(), mu in 0usize..4) {
        let value = e.evaluate_real(&p);
        prop_assume!(value.as_ref().is_ok_and(|v| moderate(*v)));
        let exact = e.differentiate(mu).evaluate_real(&p).unwrap();
        prop_assume!(moderate(exact));
        let h = 1e-5;
        let fd = central_first(&e, &p, mu, h);
        prop_assert!(rel_diff(exact, fd) < 1e-4, "{e}: exact {exact}, fd {fd}");
    }

    #[test]
    fn simplify_preserves_value_and_is_idempotent(e in tree(), p in point()) {
        let s = e.simplify();
        prop_assert_eq!(s.simplify(), s.clone());
        if let Ok(v) = e.evaluate_real(&p) {
            prop_assume!(moderate(v));
            let w = s.evaluate_real(&p).unwrap();
            prop_assert!(rel_diff(v, w) < 1e-9, "{e} -> {s}: {v} vs {w}");
        }
    }

    #[test]
    fn parse_print_round_trip(e in tree(), p in point()) {
        let text = e.to_string();
        let back = parse(&text, 3).unwrap();
        prop_assert_eq!(back.to_string(), text.clone());
        if let Ok(v) = e.evaluate_real(&p) {
            prop_assume!(moderate(v));
            prop_assert!(rel_diff(v, back.evaluate_real(&p).unwrap()) < 1e-12, "{text}");
        }
    }

    #[test]
    fn hessian_trace_is_dalembertian(e in tree(), p in point()) {
        prop_assume!(e.evaluate_real(&p).is_ok_and(moderate));
        let m = mixed_hessian(&e, &p).unwrap();
        let tr = m.trace();
        let b = dalembertian(&e, 3).evaluate(&p).unwrap();
        prop_assume!(moderate(b.re));
        prop_assert!((tr - b).norm() <= 1e-9 * (1.0 + b.norm()));
        let fd = central_box(&e, &p, 1e-4);
        prop_assert!(rel_diff(b.re, fd) < 1e-3, "{e}: □ {b}, fd {fd}");
    }

    #[test]
    fn minor_sums_match_brute_force(m in complex_matrix(4)) {
        let fast = minor_sums(&MixedHessian { matrix: m.clone() });
        let slow = brute_force_minor_sums(&m);
        let scale = 1.0 + m.iter().map(|z| z.norm()).fold(0.0, f64::max).powi(4);
        for k in 1..=4 {
            prop_assert!((fast.get(k) - slow[k - 1]).norm() < 1e-10 * scale);
        }
        prop_assert!((fast.det - slow[3]).norm() < 1e-10 * scale);
    }

    #[test]
    fn hamilton_cayley_holds(m in complex_matrix(4)) {
        let r = hamilton_cayley_check(&MixedHessian { matrix: m });
        prop_assert!(r.pass, "residual {}", r.residual);
    }

    #[test]
    fn random_frames_are_pseudo_orthonormal(seed in any::<u64>()) {
        let f = random_frame(3, seed).unwrap();
        prop_assert!(validate_frame(&f).pass);
    }
}

#[test]
fn brute_force_oracle_on_known_matrix() {
    let m = MixedHessian::from_real(&[&[2.0, 0.0, 0.0], &[0.0, 3.0, 0.0], &[0.0, 0.0, 5.0]]);
    let sums = brute_force_minor_sums(&m.matrix);
    let re: Vec<f64> = sums.iter().map(|z| z.re).collect();
    assert_eq!(re, vec![10.0, 31.0, 30.0]);
    let swap = MixedHessian::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]);
    assert_eq!(permutation_det(&swap.matrix, &[0, 1]).re, -1.0);
}
