mod common;

use std::collections::BTreeMap;

use common::*;
use wavereduce::expr::{parse_with, Assignment, Expr, Symbols};
use wavereduce::reduction::{
    assemble_reduced_equation, classify_profile, sample_points, substitute_ansatz, verify_reduction_conditions,
    AnsatzPair, Case, ReducedEquation, ReductionProfile, SampleConfig,
};

fn points(a: &AnsatzPair, loci: &[&str]) -> Vec<Assignment> {
    let loci: Vec<Expr> = loci.iter().map(|l| wavereduce::expr::parse(l, a.n).unwrap()).collect();
    let config = SampleConfig { count: 200, ..SampleConfig::default() };
    let (pts, _) = sample_points(a, None, &loci, &BTreeMap::new(), &config);
    pts.into_iter()
        .filter(|p| loci.iter().all(|l| l.evaluate_real(p).unwrap().abs() > 0.3))
        .take(20)
        .collect()
}

/// Raw coefficients from central differences: gradient squares (with
/// polarization for the cross term) and second differences.
fn fd_profile(a: &AnsatzPair, p: &Assignment) -> [f64; 5] {
    let h = 1e-5;
    let plus = &a.y + &a.z;
    let minus = &a.y - &a.z;
    [
        central_gradient_square(&a.y, p, h),
        (central_gradient_square(&plus, p, h) - central_gradient_square(&minus, p, h)) / 4.0,
        central_gradient_square(&a.z, p, h),
        central_box(&a.y, p, 1e-4),
        central_box(&a.z, p, 1e-4),
    ]
}

fn check_profile(a: &AnsatzPair, expected: [&str; 5], loci: &[&str]) {
    let profile = ReductionProfile::parse(expected).unwrap();
    let raw = substitute_ansatz(a);
    let in_x = profile.in_x(a);
    for p in points(a, loci) {
        let fd = fd_profile(a, &p);
        for k in 0..5 {
            let symbolic = raw.as_array()[k].evaluate_real(&p).unwrap();
            let want = in_x[k].evaluate_real(&p).unwrap();
            assert!((symbolic - want).abs() < 1e-9, "condition {k}: {symbolic} vs {want}");
            assert!(rel_diff(fd[k], want) < 1e-5, "condition {k} fd: {} vs {want}", fd[k]);
        }
    }
}

#[test]
fn substitution_profiles() {
    let ex1 = AnsatzPair::parse("x0", "x3", 3).unwrap();
    check_profile(&ex1, ["1", "0", "-1", "0", "0"], &[]);
    let ex2 = AnsatzPair::parse("x0", "sqrt(x1^2 + x2^2 + x3^2)", 3).unwrap();
    check_profile(&ex2, ["1", "0", "-1", "0", "-2/z"], &["sqrt(x1^2 + x2^2 + x3^2)"]);
    let ex4 = AnsatzPair::parse("sqrt(x1^2 + x2^2)", "x0 + x3", 3).unwrap();
    check_profile(&ex4, ["-1", "0", "0", "-1/y", "0"], &["sqrt(x1^2 + x2^2)"]);
}

#[test]
fn verification_outcomes() {
    let ex1 = AnsatzPair::parse("x0", "x3", 3).unwrap();
    let good = ReductionProfile::constant([1, 0, -1, 0, 0]);
    let pts = points(&ex1, &[]);
    let r = verify_reduction_conditions(&ex1, &good, &pts);
    assert!(r.pass);
    assert!(r.conditions.iter().all(|c| c.max_residual == 0.0));

    let wrong = ReductionProfile::constant([2, 0, -1, 0, 0]);
    let r = verify_reduction_conditions(&ex1, &wrong, &pts);
    assert!(!r.pass);
    assert_eq!(r.residual("r"), Some(1.0));
    assert!(r.conditions.iter().filter(|c| c.condition != "r").all(|c| c.pass));

    let ex2 = AnsatzPair::parse("x0", "sqrt(x1^2 + x2^2 + x3^2)", 3).unwrap();
    let p2 = ReductionProfile::parse(["1", "0", "-1", "0", "-2/z"]).unwrap();
    let r = verify_reduction_conditions(&ex2, &p2, &points(&ex2, &["sqrt(x1^2 + x2^2 + x3^2)"]));
    assert!(r.pass && r.points_used == 20);
}

#[test]
fn classification_examples() {
    let yz: Vec<Assignment> = (0..5).map(|i| Assignment::real(&[0.5 + i as f64, 1.0 + 0.3 * i as f64])).collect();
    let case = |v: [i64; 5]| classify_profile(&ReductionProfile::constant(v), &yz).case;
    assert_eq!(case([1, 0, -1, 0, 0]), Case::Hyperbolic);
    assert_eq!(case([-1, 0, 0, 0, 0]), Case::Parabolic { lambda: -1 });
    assert_eq!(case([0, 0, 0, 1, 0]), Case::FirstOrder);
}

#[test]
fn assembled_forms() {
    let sin = parse_with("sin(phi)", &Symbols::phi()).unwrap();
    let wave = assemble_reduced_equation(&ReductionProfile::constant([1, 0, -1, 0, 0]), Some(sin));
    assert_eq!(wave.to_string(), "φ_yy − φ_zz = sin(φ)");
    let radial = assemble_reduced_equation(&ReductionProfile::parse(["1", "0", "-1", "0", "-2/z"]).unwrap(), None);
    assert_eq!(radial.to_string(), "φ_yy − φ_zz − (2/z)φ_z = F(φ)");
    let laplace = assemble_reduced_equation(&ReductionProfile::constant([-1, 0, -1, 0, 0]), None);
    let printed = ReducedEquation::from_printed("−φ_zz − φ_yy = F(φ)").unwrap();
    let yz: Vec<Assignment> = (0..5).map(|i| Assignment::real(&[0.5 + i as f64, 1.0])).collect();
    assert!(laplace.same_operator(&printed, &yz));
}
