//! Acceptance criteria, one PASS/FAIL line each.

mod common;

use std::collections::BTreeMap;

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wavereduce::catalog::{ansatz_entry, null_cone_pair, pair_entry, stmt2_witness};
use wavereduce::compatibility::{
    first_order_check, h_power, statement2_check, theorem3_check, HyperbolicCompatData, Statement2Outcome,
};
use wavereduce::expr::{parse, parse_with, Assignment, Expr, Symbols};
use wavereduce::lemma::{hamilton_cayley_pair, lemma2_check, lemma3_check};
use wavereduce::minkowski::{minor_sums, mixed_hessian, random_frame, Frame};
use wavereduce::reduction::{
    classify_profile, reconstruction_residual, sample_points, verify_reduction_conditions, AnsatzPair, Case,
    ReducedEquation, ReductionProfile, SampleConfig,
};
use wavereduce::sample::Sampler;
use wavereduce::solutions::{
    compose, convergence_factor, liouville_solution, radial_free_wave, residual_verify, sine_gordon_kink,
    ComposedSolution, FdConfig,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const ANSATZ_IDS: [&str; 4] = ["s3_ex1", "s3_ex2", "s3_ex3", "s3_ex4"];

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn yz(text: &str) -> Expr {
    parse_with(text, &Symbols::yz()).unwrap()
}

fn vw(text: &str) -> Expr {
    parse_with(text, &Symbols::vw()).unwrap()
}

/// Points with every locus at least `margin` from zero, so FD stencils stay
/// clear of singularities.
fn points_away_from(pair: &AnsatzPair, profile: &ReductionProfile, loci: &[Expr], count: usize, margin: f64) -> Vec<Assignment> {
    let config = SampleConfig { count: count * 20, ..SampleConfig::default() };
    let (points, _) = sample_points(pair, Some(profile), loci, &BTreeMap::new(), &config);
    points
        .into_iter()
        .filter(|p| loci.iter().all(|l| l.evaluate_real(p).is_ok_and(|v| v.abs() > margin)))
        .take(count)
        .collect()
}

fn criterion_1() -> Outcome {
    let mut worst: f64 = 0.0;
    for id in ANSATZ_IDS {
        let standard = ansatz_entry(id, Some(&Frame::standard(3)), None).map_err(err)?;
        let (points, _) = sample_points(&standard.pair, Some(&standard.profile), &standard.loci, &BTreeMap::new(), &SampleConfig::default());
        let report = verify_reduction_conditions(&standard.pair, &standard.profile, &points);
        ensure(report.pass && report.points_used == 20, || format!("{id} standard frame: {report:?}"))?;
        if id == "s3_ex1" {
            ensure(report.conditions.iter().all(|c| c.max_residual == 0.0), || format!("s3_ex1 not exactly 0: {report:?}"))?;
        }
        for seed in 0..5 {
            let frame = random_frame(3, 1000 + seed).map_err(err)?;
            let e = ansatz_entry(id, Some(&frame), None).map_err(err)?;
            let config = SampleConfig { seed, ..SampleConfig::default() };
            let (points, _) = sample_points(&e.pair, Some(&e.profile), &e.loci, &BTreeMap::new(), &config);
            let r = verify_reduction_conditions(&e.pair, &e.profile, &points);
            ensure(r.pass && r.points_used == 20, || format!("{id} frame {seed}: {r:?}"))?;
            worst = worst.max(r.conditions.iter().map(|c| c.max_residual).fold(0.0, f64::max));
        }
        let assembled = standard.reduced_equation(None);
        let printed = assembled.to_string();
        if printed != standard.expected_form {
            let expected = ReducedEquation::from_printed(standard.expected_form).map_err(err)?;
            let probe: Vec<Assignment> = (0..10).map(|i| Assignment::real(&[0.3 + 0.2 * i as f64, 0.7 - 0.15 * i as f64])).collect();
            ensure(assembled.same_operator(&expected, &probe), || format!("{id}: {printed} vs {}", standard.expected_form))?;
        }
    }
    Ok(format!("4 entries x 5 frames x 20 points, max residual {worst:.1e}; printed forms match"))
}

fn criterion_2() -> Outcome {
    let tests = ["sin(y)*cos(z/2)", "exp((y - z)/3)", "y^2*z + z^3/5"];
    let mut worst: f64 = 0.0;
    for id in ANSATZ_IDS {
        let e = ansatz_entry(id, None, None).map_err(err)?;
        let points = points_away_from(&e.pair, &e.profile, &e.loci, 20, 0.5);
        ensure(points.len() == 20, || format!("{id}: only {} guarded points", points.len()))?;
        let eq = e.reduced_equation(None);
        for phi in tests {
            let phi = yz(phi);
            let lib = reconstruction_residual(&e.pair, &eq, &phi, &points, 1e-3).map_err(err)?;
            // Second-order oracle, independent of the library stencils.
            let composed = e.pair.compose(&phi);
            let op = eq.apply(&phi);
            for p in &points {
                let fd = central_box(&composed, p, 1e-4);
                let exact = op.evaluate_real(&e.pair.project(p).map_err(err)?).map_err(err)?;
                worst = worst.max(rel_diff(fd, exact));
            }
            worst = worst.max(lib);
        }
    }
    ensure(worst < 1e-5, || format!("max relative difference {worst:.2e}"))?;
    Ok(format!("4 entries x 3 test functions x 20 points, max relative difference {worst:.1e}"))
}

fn criterion_3() -> Outcome {
    let points: Vec<Assignment> = (0..12)
        .map(|i| Assignment::real(&[-1.5 + 0.27 * i as f64, 0.4 + 0.1 * i as f64]))
        .collect();
    let cases: [([&str; 5], Case); 8] = [
        (["1", "0", "1", "0", "0"], Case::Elliptic),
        (["-1", "0", "-1", "0", "1/y"], Case::Elliptic),
        (["1", "0", "-1", "0", "-2/z"], Case::Hyperbolic),
        (["0", "1", "0", "1", "0"], Case::Hyperbolic),
        (["1", "0", "0", "0", "1"], Case::Parabolic { lambda: 1 }),
        (["-1", "0", "0", "0", "1"], Case::Parabolic { lambda: -1 }),
        (["0", "0", "0", "1", "z"], Case::FirstOrder),
        (["1", "0", "y", "0", "0"], Case::Mixed),
    ];
    for (texts, expected) in cases {
        let p = ReductionProfile::parse(texts).map_err(err)?;
        let got = classify_profile(&p, &points).case;
        ensure(got == expected, || format!("{texts:?}: got {got}, expected {expected}"))?;
    }
    Ok("8 profiles classified".into())
}

fn criterion_4() -> Outcome {
    let pair = null_cone_pair();
    let (points, _) = pair.sample(&SampleConfig::default());
    let report = pair.system_report(&points);
    let worst = report.conditions.iter().map(|c| c.max_residual).fold(0.0, f64::max);
    ensure(report.pass && worst < 1e-9, || format!("system residual {worst:.2e}"))?;

    let data = HyperbolicCompatData::new(vw("2"), vw("(w - v)^2"), vw("(w - v)^2"), 3).map_err(err)?;
    let (sample, _) = data.sample(0);
    let expected_v = vw("4/(w - v)");
    let expected_w = vw("-4/(w - v)");
    for p in &sample {
        let dv = (data.v.evaluate_real(p).map_err(err)? - expected_v.evaluate_real(p).map_err(err)?).abs();
        let dw = (data.w.evaluate_real(p).map_err(err)? - expected_w.evaluate_real(p).map_err(err)?).abs();
        ensure(dv < 1e-12 && dw < 1e-12, || format!("V, W mismatch {dv:.2e} {dw:.2e}"))?;
    }
    ensure(h_power(&data.h, &data.phi, 1, 4).is_zero(), || "(2∂_w)^4 Φ is not the zero tree".into())?;
    ensure(h_power(&data.h, &data.psi, 0, 4).is_zero(), || "(2∂_v)^4 Ψ is not the zero tree".into())?;
    let check = data.check(0);
    ensure(check.verdict.passed(), || format!("{:?}", check.diagnostics))?;
    Ok(format!("system residual {worst:.1e}; V = 4/(w - v), W = -4/(w - v); nilpotency exact"))
}

fn criterion_5() -> Outcome {
    let pair = null_cone_pair();
    let (points, _) = pair.sample(&SampleConfig::default());
    let l2 = lemma2_check(&pair, &points).map_err(err)?;
    ensure(l2.pass && l2.max_scaled < 1e-7, || format!("lemma 2 scaled det {:.2e}", l2.max_scaled))?;
    let l3 = lemma3_check(&pair, &points).map_err(err)?;
    ensure(l3.pass && l3.max_rel_error < 1e-6, || format!("lemma 3 rel error {:.2e}", l3.max_rel_error))?;

    let spot = Assignment::real(&[0.0, 3.0, 0.0, 0.0]);
    let m = mixed_hessian(&pair.pair.y, &spot).map_err(err)?;
    let oracle = brute_force_minor_sums(&m.matrix);
    ensure((oracle[0].re - 2.0 / 3.0).abs() < 1e-12 && (oracle[1].re - 1.0 / 9.0).abs() < 1e-12, || {
        format!("oracle minors {oracle:?}")
    })?;
    let lib = minor_sums(&m);
    ensure((lib.get(1) - oracle[0]).norm() < 1e-12 && (lib.get(2) - oracle[1]).norm() < 1e-12, || "library minors differ".into())?;
    let l3_spot = lemma3_check(&pair, std::slice::from_ref(&spot)).map_err(err)?;
    ensure(l3_spot.pass, || format!("lemma 3 at (0,3,0,0): {:?}", l3_spot.rows))?;

    let mut hc_worst: f64 = 0.0;
    for id in ["null_cone_pair", "linear_pair", "elliptic_linear_pair", "parabolic_linear_pair"] {
        let p = pair_entry(id).map_err(err)?;
        let (pts, _) = p.sample(&SampleConfig::default());
        let hc = hamilton_cayley_pair(&p, &pts).map_err(err)?;
        ensure(hc.pass && hc.max_residual < 1e-10, || format!("{id}: Hamilton-Cayley {:.2e}", hc.max_residual))?;
        hc_worst = hc_worst.max(hc.max_residual);
    }
    Ok(format!(
        "scaled det {:.1e}, minor rel error {:.1e}, M_1 = 2/3, M_2 = 1/9, Hamilton-Cayley {hc_worst:.1e}",
        l2.max_scaled, l3.max_rel_error
    ))
}

fn criterion_6() -> Outcome {
    let parabolic = theorem3_check(&vw("2/v"), &vw("v"), &vw("v^2"), 1, 3, 0);
    ensure(!parabolic.verdict.passed() && parabolic.diagnostics.iter().any(|d| d.contains("W ≡ 0")), || {
        format!("parabolic: {:?}", parabolic.diagnostics)
    })?;
    let first = first_order_check(&vw("1/(1 + w^2)"), &vw("0"), 0);
    ensure(!first.verdict.passed() && first.diagnostics.iter().any(|d| d.contains("V = W ≡ 0")), || {
        format!("first order: {:?}", first.diagnostics)
    })?;
    let good_parabolic = theorem3_check(&vw("2/v"), &vw("0"), &vw("v^2"), 1, 3, 0);
    let good_first = first_order_check(&vw("0"), &vw("0"), 0);
    ensure(good_parabolic.verdict.passed() && good_first.verdict.passed(), || "positive controls rejected".into())?;
    Ok("W ≠ 0 and V ≠ 0 rejected with the expected diagnostics; controls accepted".into())
}

fn criterion_7() -> Outcome {
    let mut worst: f64 = 0.0;
    for big_n in 1..=3 {
        let w = stmt2_witness(big_n);
        let report = residual_verify(&ComposedSolution::from_witness(&w), &FdConfig::default()).map_err(err)?;
        ensure(report.points_used > 0 && report.max_residual < 1e-6, || format!("N = {big_n}: □ residual {:.2e}", report.max_residual))?;
        worst = worst.max(report.max_residual);
        let mut sampler = Sampler::new(big_n as u64, 4, (-1.0, 1.0));
        for _ in 0..20 {
            let mut x = sampler.point();
            x[0] = 2.5 + 0.5 * x[0];
            let p = Assignment::real(&x);
            let u = w.u.evaluate_real(&p).map_err(err)?;
            let box_fd = central_box(&w.u, &p, 1e-4);
            let grad = central_gradient_square(&w.u, &p, 1e-5);
            let r_box = (box_fd - big_n as f64 / u).abs();
            let r_grad = (grad - 1.0).abs();
            ensure(r_box < 1e-6 && r_grad < 1e-6, || format!("N = {big_n}: oracle residuals {r_box:.2e} {r_grad:.2e}"))?;
            worst = worst.max(r_box).max(r_grad);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..10 {
        let big_n: u8 = rng.gen_range(1..=3);
        let c: f64 = rng.gen_range(-5.0..5.0);
        let lambda: f64 = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let f = Expr::real(lambda) / (Expr::int(big_n as i64) * (Expr::var(0) + Expr::real(c)));
        match statement2_check(&f, lambda, 3) {
            Statement2Outcome::Accept { n, c: Some(got) } if n == big_n && (got - c).abs() < 1e-6 => {}
            other => return Err(format!("N = {big_n}, C = {c}, λ = {lambda}: {other:?}")),
        }
    }
    let square = parse_with("u^2", &Symbols::u()).unwrap();
    ensure(matches!(statement2_check(&square, 1.0, 0), Statement2Outcome::Reject { .. }), || "u² accepted".into())?;
    Ok(format!("witnesses N = 1..3 residual {worst:.1e}; 10 random (N, C) recovered; u² rejected"))
}

fn criterion_8() -> Outcome {
    let ex1 = ansatz_entry("s3_ex1", None, None).map_err(err)?;
    let ex2 = ansatz_entry("s3_ex2", None, None).map_err(err)?;
    let t = |s: &str| parse_with(s, &Symbols::t()).unwrap();
    let runs = [
        compose(&ex1, &sine_gordon_kink(0.0).map_err(err)?).map_err(err)?,
        compose(&ex1, &sine_gordon_kink(0.5).map_err(err)?).map_err(err)?,
        compose(&ex1, &liouville_solution(&t("exp(t)"), &t("t^3 + 3*t")).map_err(err)?).map_err(err)?,
        compose(&ex2, &radial_free_wave(&t("sin(t)"), &t("exp(-t^2)")).map_err(err)?).map_err(err)?,
    ];
    let mut lines = Vec::new();
    for c in &runs {
        let r = residual_verify(c, &FdConfig::default()).map_err(err)?;
        ensure(r.points_used >= 10 && r.max_residual < 1e-6, || format!("{}: residual {:.2e}", c.name, r.max_residual))?;
        lines.push(format!("{:.0e}", r.max_residual));
    }
    let bogus = ComposedSolution::new("x0^2", parse("x0^2", 3).unwrap(), Expr::zero(), 3);
    let r = residual_verify(&bogus, &FdConfig::default()).map_err(err)?;
    ensure((r.max_residual - 2.0).abs() < 1e-6, || format!("x0² residual {}", r.max_residual))?;
    Ok(format!("kink c = 0, 0.5, Liouville, radial residuals {}; x0² reports {:.9}", lines.join(", "), r.max_residual))
}

fn criterion_9() -> Outcome {
    let u = parse("exp(x0/2)*sin(x1 + 2*x2)*cos(x3) + x0^3*x1", 3).unwrap();
    let mut factors = Vec::new();
    for p in [[0.3, -0.4, 0.8, 0.1], [-0.7, 0.2, 0.5, -1.1]] {
        let f = convergence_factor(&u, &Assignment::real(&p), 0.1).map_err(err)?;
        ensure((12.0..=20.0).contains(&f), || format!("factor {f:.3} at {p:?}"))?;
        factors.push(format!("{f:.2}"));
    }
    Ok(format!("convergence factors {}", factors.join(", ")))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("catalog fidelity", criterion_1),
        ("substitution reconstruction", criterion_2),
        ("classification", criterion_3),
        ("null-cone witness", criterion_4),
        ("Hessian lemmas", criterion_5),
        ("parabolic and first-order negatives", criterion_6),
        ("single-function witnesses", criterion_7),
        ("end-to-end solutions", criterion_8),
        ("verifier self-check", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = std::time::Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail} ({secs:.2}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("acceptance: {}/9 passed", 9 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
