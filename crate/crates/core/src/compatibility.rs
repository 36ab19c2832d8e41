//! Necessary compatibility conditions for the d'Alembert–Hamilton systems.
//!
//! Single function: `□u = F(u)`, `u_μu_μ = 1`. Two functions, in the
//! variables `(v, w)` (hyperbolic, parabolic, first-order) or `(v, v*)`
//! (elliptic). All checks sample their inputs and report residuals; a
//! passing verdict means the necessary conditions hold, never more.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Assignment, Expr, Symbols};
use crate::reduction::{assemble_reduced_equation, ReducedEquation, ReductionProfile};
use crate::sample::{max_abs, Guard, Sampler, DEFAULT_BOX, SINGULAR_MARGIN, ZERO_TOL};

/// Points with `|Φ|` below this are resampled.
pub const PHI_MARGIN: f64 = 1e-8;
/// Tolerance for the affine fit in [`statement2_check`].
pub const FIT_TOL: f64 = 1e-9;
const SAMPLES: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    NecessaryConditionsPass,
    Reject,
}

impl Verdict {
    pub fn passed(self) -> bool {
        self == Verdict::NecessaryConditionsPass
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NecessaryConditionsPass => "necessary-conditions-pass",
            Verdict::Reject => "reject",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_residual: f64,
    /// Residual vanished as an expression tree, not just numerically.
    pub exact: bool,
    pub pass: bool,
}

impl Check {
    fn zero(name: impl Into<String>, e: &Expr, points: &[Assignment], tol: f64) -> Check {
        let simplified = e.simplify();
        let exact = simplified.is_zero();
        let max_residual = if exact {
            0.0
        } else {
            max_abs(&simplified, points).unwrap_or(f64::INFINITY)
        };
        Check {
            name: name.into(),
            max_residual,
            exact,
            pass: max_residual < tol,
        }
    }
}

/// Informational comparison that does not enter the verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Comparison {
    pub name: String,
    pub max_abs_difference: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompatReport {
    pub case: String,
    pub verdict: Verdict,
    pub diagnostics: Vec<String>,
    pub checks: Vec<Check>,
    pub comparisons: Vec<Comparison>,
    /// Constructed expressions (`h`, `Φ`, `Ψ`, `V`, `W`, ...) as strings.
    pub expressions: BTreeMap<String, String>,
    pub points_used: usize,
    pub points_rejected: usize,
}

impl CompatReport {
    fn new(case: &str) -> CompatReport {
        CompatReport {
            case: case.to_string(),
            verdict: Verdict::NecessaryConditionsPass,
            diagnostics: Vec::new(),
            checks: Vec::new(),
            comparisons: Vec::new(),
            expressions: BTreeMap::new(),
            points_used: 0,
            points_rejected: 0,
        }
    }

    fn push(&mut self, check: Check, diagnostic: &str) {
        if !check.pass {
            self.verdict = Verdict::Reject;
            self.diagnostics.push(diagnostic.to_string());
        }
        self.checks.push(check);
    }

    fn expr(&mut self, name: &str, e: &Expr, syms: &Symbols) {
        self.expressions
            .insert(name.to_string(), e.simplify().display(syms).to_string());
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// `(h·∂_var)^k e`, by repeated differentiate-and-multiply with
/// simplification after every step.
pub fn h_power(h: &Expr, e: &Expr, var: usize, k: usize) -> Expr {
    let mut acc = e.simplify();
    for _ in 0..k {
        if acc.is_zero() {
            break;
        }
        acc = (h * acc.differentiate(var)).simplify();
    }
    acc
}

/// `∂_var^k e`.
pub fn derivative_power(e: &Expr, var: usize, k: usize) -> Expr {
    (0..k).fold(e.simplify(), |acc, _| acc.differentiate(var))
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

fn sample_plane(seed: u64, count: usize, guard: &Guard, complex_pair: bool) -> (Vec<Assignment>, usize) {
    let mut sampler = Sampler::new(seed, 2, DEFAULT_BOX);
    let to_point = |a: &Assignment| {
        if complex_pair {
            // (ω, θ) ↦ (v, v*) = (ω + iθ, ω − iθ)
            let (w, t) = (a.vars[0].re, a.vars[1].re);
            Assignment::new(vec![Complex64::new(w, t), Complex64::new(w, -t)])
        } else {
            a.clone()
        }
    };
    let (pts, rejected) = sampler.guarded_with(count, |a| guard.admits(&to_point(a)));
    (pts.iter().map(to_point).collect(), rejected)
}

// ---------------------------------------------------------------------------
// Single function

/// `F = λΦ′/Φ` with `Φ` a polynomial of degree at most `n` in `u`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibleF {
    pub lambda: i8,
    pub n: usize,
    /// Polynomial in variable 0 (`u`).
    pub phi: Expr,
    pub f: Expr,
}

pub fn statement1_family(n: usize, lambda: i8, coefficients: &[f64]) -> Result<AdmissibleF> {
    if ![-1, 0, 1].contains(&lambda) {
        return Err(Error::InvalidInput(format!("lambda must be 0 or ±1, got {lambda}")));
    }
    if coefficients.len() > n + 1 {
        return Err(Error::InvalidInput(format!(
            "{} coefficients exceed degree bound n = {n}",
            coefficients.len()
        )));
    }
    if coefficients.iter().all(|&c| c == 0.0) {
        return Err(Error::Precondition("Φ ≡ 0 is not admissible".into()));
    }
    let u = Expr::var(0);
    let mut phi = Expr::zero();
    for (k, &c) in coefficients.iter().enumerate() {
        if c != 0.0 {
            phi = phi + Expr::real(c) * u.powi(k as i64);
        }
    }
    let phi = phi.simplify();
    let f = (Expr::int(lambda as i64) * phi.differentiate(0) / &phi).simplify();
    Ok(AdmissibleF { lambda, n, phi, f })
}

impl AdmissibleF {
    /// `∂_u^{n+1}Φ` reduces to the zero tree.
    pub fn degree_bound_exact(&self) -> bool {
        derivative_power(&self.phi, 0, self.n + 1).is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
pub enum Statement2Outcome {
    /// `F = λ/(N(u + C))`; `N = 0` stands for `F ≡ 0` and carries no `C`.
    Accept { n: u8, c: Option<f64> },
    Reject { diagnostic: String },
}

/// Decides whether `F(u)` has the form `λ/(N(u + C))`, `N ∈ {1, 2, 3}`, or
/// vanishes identically, by fitting `λ/F` as an affine function of `u`.
pub fn statement2_check(f: &Expr, lambda: f64, seed: u64) -> Statement2Outcome {
    let guard = Guard::new(SINGULAR_MARGIN).watch(f.clone());
    let mut sampler = Sampler::new(seed, 1, DEFAULT_BOX);
    let (points, _) = sampler.guarded(SAMPLES, &guard);
    if points.is_empty() {
        return Statement2Outcome::Reject {
            diagnostic: "F cannot be evaluated on the sample box".into(),
        };
    }
    let mut samples = Vec::new();
    for p in &points {
        match f.evaluate_real(p) {
            Ok(v) => samples.push((p.vars[0].re, v)),
            Err(e) => {
                return Statement2Outcome::Reject {
                    diagnostic: format!("F is not real on the sample box: {e}"),
                }
            }
        }
    }
    if samples.iter().all(|(_, v)| v.abs() < ZERO_TOL) {
        return Statement2Outcome::Accept { n: 0, c: None };
    }
    if lambda == 0.0 {
        return Statement2Outcome::Reject {
            diagnostic: "λ = 0 admits only F ≡ 0".into(),
        };
    }
    if samples.iter().any(|(_, v)| v.abs() < ZERO_TOL) {
        return Statement2Outcome::Reject {
            diagnostic: "F vanishes at isolated points; λ/F is not affine".into(),
        };
    }
    let xs: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let ys: Vec<f64> = samples.iter().map(|s| lambda / s.1).collect();
    let (slope, intercept) = affine_fit(&xs, &ys);
    let misfit = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).abs() / (1.0 + y.abs()))
        .fold(0.0, f64::max);
    if misfit > FIT_TOL {
        return Statement2Outcome::Reject {
            diagnostic: format!("λ/F is not affine in u (misfit {misfit:.3e})"),
        };
    }
    let n = slope.round();
    if !(1.0..=3.0).contains(&n) || (slope - n).abs() > FIT_TOL * (1.0 + slope.abs()) {
        let inverse = (1.0 / slope).round();
        if (1.0..=3.0).contains(&inverse) && (slope * inverse - 1.0).abs() < FIT_TOL {
            return Statement2Outcome::Reject {
                diagnostic: format!(
                    "slope of λ/F is 1/{inverse}: F = λ·{inverse}/(u + C) rather than λ/({inverse}(u + C)) (wrong λ scaling)"
                ),
            };
        }
        return Statement2Outcome::Reject {
            diagnostic: format!("slope of λ/F is {slope}, expected N ∈ {{1, 2, 3}} (wrong λ scaling)"),
        };
    }
    Statement2Outcome::Accept {
        n: n as u8,
        c: Some(intercept / n),
    }
}

fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / m;
    let my = ys.iter().sum::<f64>() / m;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

// ---------------------------------------------------------------------------
// Hyperbolic system: v·v = 0, w·w = 0, v·w = h, □v = V, □w = W

#[derive(Clone, Debug, PartialEq)]
pub struct HyperbolicCompatData {
    /// Expressions in `(v, w)` = variables `(0, 1)`.
    pub h: Expr,
    pub phi: Expr,
    pub psi: Expr,
    pub v: Expr,
    pub w: Expr,
    pub n: usize,
    /// Literal ratio forms `Σ k f_k R_v^k / Σ f_k R_v^k` and the `g` analogue,
    /// present when built from `R`, `f_k`, `g_k`.
    pub ratio_forms: Option<(Expr, Expr)>,
}

fn nonzero(name: &str, e: &Expr) -> Result<()> {
    if e.simplify().is_zero() {
        return Err(Error::Precondition(format!("{name} ≡ 0 is not admissible")));
    }
    Ok(())
}

impl HyperbolicCompatData {
    /// `V = hΦ_w/Φ`, `W = hΨ_v/Ψ`.
    pub fn new(h: Expr, phi: Expr, psi: Expr, n: usize) -> Result<HyperbolicCompatData> {
        nonzero("Φ", &phi)?;
        nonzero("Ψ", &psi)?;
        let v = (&h * phi.differentiate(1) / &phi).simplify();
        let w = (&h * psi.differentiate(0) / &psi).simplify();
        Ok(HyperbolicCompatData {
            h: h.simplify(),
            phi: phi.simplify(),
            psi: psi.simplify(),
            v,
            w,
            n,
            ratio_forms: None,
        })
    }

    pub fn guard(&self) -> Guard {
        Guard::new(SINGULAR_MARGIN)
            .locus(self.phi.clone())
            .locus(self.psi.clone())
            .watch_all([self.h.clone(), self.v.clone(), self.w.clone()])
    }

    pub fn sample(&self, seed: u64) -> (Vec<Assignment>, usize) {
        sample_plane(seed, SAMPLES, &self.guard(), false)
    }

    /// Reduced equation `2hφ_vw + Vφ_v + Wφ_w = F(φ)` in `(v, w)`.
    pub fn reduced_equation(&self, rhs: Option<Expr>) -> ReducedEquation {
        let p = ReductionProfile {
            r: Expr::zero(),
            q: self.h.clone(),
            s: Expr::zero(),
            box_y: self.v.clone(),
            box_z: self.w.clone(),
        };
        assemble_reduced_equation(&p, rhs)
    }

    pub fn check(&self, seed: u64) -> CompatReport {
        let (points, rejected) = self.sample(seed);
        let mut rep = CompatReport::new("hyperbolic");
        rep.points_used = points.len();
        rep.points_rejected = rejected;
        let syms = Symbols::vw();
        for (name, e) in [("h", &self.h), ("Phi", &self.phi), ("Psi", &self.psi), ("V", &self.v), ("W", &self.w)] {
            rep.expr(name, e, &syms);
        }
        if points.is_empty() {
            rep.verdict = Verdict::Reject;
            rep.diagnostics.push("no admissible (v, w) sample points".into());
            return rep;
        }
        let k = self.n + 1;
        rep.push(
            Check::zero("(h∂_w)^(n+1)Φ", &h_power(&self.h, &self.phi, 1, k), &points, ZERO_TOL),
            "(h∂_w)^(n+1)Φ = 0 fails",
        );
        rep.push(
            Check::zero("(h∂_v)^(n+1)Ψ", &h_power(&self.h, &self.psi, 0, k), &points, ZERO_TOL),
            "(h∂_v)^(n+1)Ψ = 0 fails",
        );
        if let Some((rv, rw)) = &self.ratio_forms {
            rep.expr("V_ratio_form", rv, &syms);
            rep.expr("W_ratio_form", rw, &syms);
            for (name, ratio, canonical) in [("V", rv, &self.v), ("W", rw, &self.w)] {
                rep.comparisons.push(Comparison {
                    name: format!("{name} (hΦ-form) vs ratio form"),
                    max_abs_difference: max_abs(&(canonical - ratio), &points).unwrap_or(f64::NAN),
                });
            }
        }
        rep
    }
}

/// Builds hyperbolic data from `R(v, w)`, `f_k(v)` and `g_k(w)`:
/// `h = 1/R_vw`, `Φ = Σ f_k R_v^k`, `Ψ = Σ g_k R_w^k`.
pub fn theorem2_build(r: &Expr, f: &[Expr], g: &[Expr], n: usize, seed: u64) -> Result<HyperbolicCompatData> {
    if f.len() > n + 2 || g.len() > n + 2 {
        return Err(Error::InvalidInput(format!(
            "f_k and g_k take at most n + 2 = {} entries",
            n + 2
        )));
    }
    let r_vw = r.differentiate(0).differentiate(1);
    check_h(&r_vw, seed, false)?;
    let h = (Expr::one() / &r_vw).simplify();
    let r_v = r.differentiate(0);
    let r_w = r.differentiate(1);
    let (phi, v_ratio) = series(f, &r_v);
    let (psi, w_ratio) = series(g, &r_w);
    let mut data = HyperbolicCompatData::new(h, phi, psi, n)?;
    data.ratio_forms = Some((v_ratio, w_ratio));
    Ok(data)
}

/// `(Σ c_k X^k, Σ k c_k X^k / Σ c_k X^k)`.
fn series(c: &[Expr], x: &Expr) -> (Expr, Expr) {
    let mut sum = Expr::zero();
    let mut weighted = Expr::zero();
    for (k, ck) in c.iter().enumerate() {
        if ck.simplify().is_zero() {
            continue;
        }
        let term = ck * x.powi(k as i64);
        weighted = weighted + Expr::int(k as i64) * &term;
        sum = sum + term;
    }
    let sum = sum.simplify();
    let ratio = (weighted / &sum).simplify();
    (sum, ratio)
}

fn check_h(r_mixed: &Expr, seed: u64, complex_pair: bool) -> Result<()> {
    let simplified = r_mixed.simplify();
    if simplified.is_zero() {
        return Err(Error::SingularH("mixed second derivative of R vanishes identically".into()));
    }
    let guard = Guard::new(SINGULAR_MARGIN).watch(simplified.clone());
    let (points, _) = sample_plane(seed, SAMPLES, &guard, complex_pair);
    let vanishing = points
        .iter()
        .filter(|p| simplified.evaluate(p).map_or(true, |v| v.norm() < SINGULAR_MARGIN))
        .count();
    if points.is_empty() || vanishing > 0 {
        return Err(Error::SingularH(format!(
            "mixed second derivative of R vanishes at {vanishing} sample points"
        )));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Elliptic system: v·v = 0, v*·v* = 0, v·v* = h, □v = V

#[derive(Clone, Debug, PartialEq)]
pub struct EllipticCompatData {
    /// Expressions in `(v, v*)` = variables `(0, 1)`.
    pub h: Expr,
    pub phi: Expr,
    /// `V = h∂_{v*}Φ/Φ`.
    pub v: Expr,
    /// `V* = h∂_vΦ*/Φ*` with `Φ*` the conjugate function.
    pub v_conj: Expr,
    pub n: usize,
    pub ratio_form: Option<Expr>,
}

/// Conjugate function: `e*(v, v*) = conj(e(conj v*, conj v))`, taking
/// parameters as real.
pub fn conjugate_function(e: &Expr) -> Expr {
    e.substitute(&[Expr::var(1), Expr::var(0)]).conjugate_constants()
}

/// Coefficients of the real form `2h̃(φ_ωω + φ_θθ) + Ωφ_ω + Θφ_θ = F(φ)`
/// under `v = ω + iθ`, normalized so the left side equals `□u`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealForm {
    pub h_tilde: f64,
    pub omega: f64,
    pub theta: f64,
}

impl EllipticCompatData {
    pub fn new(h: Expr, phi: Expr, n: usize) -> Result<EllipticCompatData> {
        nonzero("Φ", &phi)?;
        let v = (&h * phi.differentiate(1) / &phi).simplify();
        let v_conj = conjugate_function(&v).simplify();
        Ok(EllipticCompatData {
            h: h.simplify(),
            phi: phi.simplify(),
            v,
            v_conj,
            n,
            ratio_form: None,
        })
    }

    pub fn guard(&self) -> Guard {
        Guard::new(SINGULAR_MARGIN)
            .locus(self.phi.clone())
            .watch_all([self.h.clone(), self.v.clone()])
    }

    pub fn sample(&self, seed: u64) -> (Vec<Assignment>, usize) {
        sample_plane(seed, SAMPLES, &self.guard(), true)
    }

    /// `□u = 2hφ_{vv*} + Vφ_v + V*φ_{v*}` rewritten with
    /// `φ_{vv*} = ¼(φ_ωω + φ_θθ)`: `h̃ = h/4`, `Ω = Re V`, `Θ = Im V`.
    pub fn real_form_at(&self, omega: f64, theta: f64) -> Result<RealForm> {
        let p = Assignment::new(vec![Complex64::new(omega, theta), Complex64::new(omega, -theta)]);
        let h = self.h.evaluate_real(&p)?;
        let v = self.v.evaluate(&p)?;
        let v_conj = self.v_conj.evaluate(&p)?;
        let box_omega = 0.5 * (v + v_conj);
        let box_theta = (v - v_conj) / Complex64::new(0.0, 2.0);
        Ok(RealForm {
            h_tilde: h / 4.0,
            omega: box_omega.re,
            theta: box_theta.re,
        })
    }

    pub fn check(&self, seed: u64) -> CompatReport {
        let (points, rejected) = self.sample(seed);
        let mut rep = CompatReport::new("elliptic");
        rep.points_used = points.len();
        rep.points_rejected = rejected;
        let syms = Symbols::v_vstar();
        for (name, e) in [("h", &self.h), ("Phi", &self.phi), ("V", &self.v), ("V*", &self.v_conj)] {
            rep.expr(name, e, &syms);
        }
        if points.is_empty() {
            rep.verdict = Verdict::Reject;
            rep.diagnostics.push("no admissible (v, v*) sample points".into());
            return rep;
        }
        rep.push(
            Check::zero("(h∂_v*)^(n+1)Φ", &h_power(&self.h, &self.phi, 1, self.n + 1), &points, ZERO_TOL),
            "(h∂_v*)^(n+1)Φ = 0 fails",
        );
        if let Some(ratio) = &self.ratio_form {
            rep.expr("V_ratio_form", ratio, &syms);
            rep.comparisons.push(Comparison {
                name: "V (hΦ-form) vs ratio form".into(),
                max_abs_difference: max_abs(&(&self.v - ratio), &points).unwrap_or(f64::NAN),
            });
        }
        rep
    }
}

/// Elliptic analogue of [`theorem2_build`] with `h = 1/R_{vv*}`.
pub fn theorem1_build(r: &Expr, f: &[Expr], n: usize, seed: u64) -> Result<EllipticCompatData> {
    if f.len() > n + 2 {
        return Err(Error::InvalidInput(format!("f_k takes at most n + 2 = {} entries", n + 2)));
    }
    let r_mixed = r.differentiate(0).differentiate(1);
    check_h(&r_mixed, seed, true)?;
    let h = (Expr::one() / &r_mixed).simplify();
    let (phi, ratio) = series(f, &r.differentiate(0));
    let mut data = EllipticCompatData::new(h, phi, n)?;
    data.ratio_form = Some(ratio);
    Ok(data)
}

// ---------------------------------------------------------------------------
// Parabolic and first-order systems

/// Parabolic system `v·w = 0`, `v·v = λ`, `w·w = 0`: requires `W ≡ 0`,
/// `∂_v^{n+1}Φ = 0` and `V = λΦ_v/Φ`.
pub fn theorem3_check(v: &Expr, w: &Expr, phi: &Expr, lambda: i8, n: usize, seed: u64) -> CompatReport {
    let mut rep = CompatReport::new("parabolic");
    let syms = Symbols::vw();
    if phi.simplify().is_zero() {
        rep.verdict = Verdict::Reject;
        rep.diagnostics.push("Φ ≡ 0 is not admissible".into());
        return rep;
    }
    let expected_v = (Expr::int(lambda as i64) * phi.differentiate(0) / phi).simplify();
    for (name, e) in [("V", v), ("W", w), ("Phi", phi), ("lambda*Phi_v/Phi", &expected_v)] {
        rep.expr(name, e, &syms);
    }
    let guard = Guard::new(SINGULAR_MARGIN)
        .locus(phi.clone())
        .watch_all([v.clone(), w.clone(), expected_v.clone()]);
    let (points, rejected) = sample_plane(seed, SAMPLES, &guard, false);
    rep.points_used = points.len();
    rep.points_rejected = rejected;
    if points.is_empty() {
        rep.verdict = Verdict::Reject;
        rep.diagnostics.push("no admissible (v, w) sample points".into());
        return rep;
    }
    rep.push(Check::zero("W", w, &points, ZERO_TOL), "W ≡ 0 violated");
    rep.push(
        Check::zero("∂_v^(n+1)Φ", &derivative_power(phi, 0, n + 1), &points, ZERO_TOL),
        "∂_v^(n+1)Φ = 0 violated (degree bound)",
    );
    rep.push(
        Check::zero("V - λΦ_v/Φ", &(v - &expected_v), &points, ZERO_TOL),
        "V = λΦ_v/Φ violated",
    );
    rep
}

/// First-order system: compatible only when `V = W ≡ 0`.
pub fn first_order_check(v: &Expr, w: &Expr, seed: u64) -> CompatReport {
    let mut rep = CompatReport::new("first-order");
    let syms = Symbols::vw();
    rep.expr("V", v, &syms);
    rep.expr("W", w, &syms);
    let guard = Guard::new(SINGULAR_MARGIN).watch_all([v.clone(), w.clone()]);
    let (points, rejected) = sample_plane(seed, SAMPLES, &guard, false);
    rep.points_used = points.len();
    rep.points_rejected = rejected;
    let v_check = Check::zero("V", v, &points, ZERO_TOL);
    let w_check = Check::zero("W", w, &points, ZERO_TOL);
    if !(v_check.pass && w_check.pass) {
        rep.verdict = Verdict::Reject;
        rep.diagnostics.push("V = W ≡ 0 violated".into());
    }
    rep.checks.extend([v_check, w_check]);
    rep
}

/// `((−1)^k/(k−1)!)·(h∂)^{k+1}X` for the dual trace reading.
pub fn lemma1_rhs(h: &Expr, x: &Expr, var: usize, k: usize) -> Expr {
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    (Expr::real(sign / factorial(k - 1)) * h_power(h, x, var, k + 1)).simplify()
}

/// `(h∂)^kΦ / (k!Φ)`.
pub fn lemma3_rhs(h: &Expr, phi: &Expr, var: usize, k: usize) -> Expr {
    (h_power(h, phi, var, k) / (Expr::real(factorial(k)) * phi)).simplify()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_with;

    fn vw(t: &str) -> Expr {
        parse_with(t, &Symbols::vw()).unwrap()
    }

    fn close(a: &Expr, b: &Expr, points: &[Assignment]) -> bool {
        crate::sample::numerically_zero(&(a - b), points, 1e-9)
    }

    #[test]
    fn statement1_cube() {
        let a = statement1_family(3, 1, &[0.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(a.degree_bound_exact());
        let p = Assignment::real(&[1.5]);
        assert!((a.f.evaluate_real(&p).unwrap() - 2.0).abs() < 1e-12);
        let zero = statement1_family(3, 0, &[1.0, 2.0]).unwrap();
        assert!(zero.f.is_zero());
        assert!(statement1_family(3, 1, &[0.0; 4]).is_err());
        assert!(statement1_family(1, 1, &[0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn statement2_examples() {
        let f = parse_with("1/(2*(u + 5))", &Symbols::u()).unwrap();
        match statement2_check(&f, 1.0, 0) {
            Statement2Outcome::Accept { n: 2, c: Some(c) } => assert!((c - 5.0).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
        assert_eq!(statement2_check(&Expr::zero(), 1.0, 0), Statement2Outcome::Accept { n: 0, c: None });
        let sq = parse_with("u^2", &Symbols::u()).unwrap();
        assert!(matches!(statement2_check(&sq, 1.0, 0), Statement2Outcome::Reject { .. }));
        let wrong = parse_with("1/(5*u)", &Symbols::u()).unwrap();
        assert!(matches!(statement2_check(&wrong, 1.0, 0), Statement2Outcome::Reject { .. }));
    }

    #[test]
    fn theorem2_simple() {
        let d = theorem2_build(&vw("v*w"), &[Expr::zero(), Expr::zero(), Expr::one()], &[Expr::one()], 3, 0).unwrap();
        let (pts, _) = d.sample(1);
        assert!(close(&d.phi, &vw("w^2"), &pts));
        assert!(close(&d.v, &vw("2/w"), &pts));
        assert!(d.w.is_zero());
        assert!(d.check(0).verdict.passed());
    }

    #[test]
    fn theorem2_null_cone() {
        let r = vw("v*w/2");
        let f = ["v^2", "-4*v", "4"].map(vw);
        let g = ["w^2", "-4*w", "4"].map(vw);
        let d = theorem2_build(&r, &f, &g, 3, 0).unwrap();
        assert_eq!(d.h, Expr::int(2));
        let (pts, _) = d.sample(2);
        assert!(close(&d.phi, &vw("(w - v)^2"), &pts));
        assert!(close(&d.v, &vw("4/(w - v)"), &pts));
        assert!(close(&d.w, &vw("-4/(w - v)"), &pts));
        let rep = d.check(0);
        assert!(rep.verdict.passed());
        assert!(rep.checks.iter().all(|c| c.exact));
        // The literal ratio form differs from hΦ_w/Φ by a factor R_v.
        assert!(rep.comparisons[0].max_abs_difference > 1e-3);
    }

    #[test]
    fn theorem2_errors() {
        assert!(matches!(
            theorem2_build(&vw("v*w"), &vec![Expr::zero(); 5], &[Expr::one()], 3, 0),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            theorem2_build(&vw("v + w"), &[Expr::one()], &[Expr::one()], 3, 0),
            Err(Error::SingularH(_))
        ));
    }

    #[test]
    fn theorem1_examples() {
        let syms = Symbols::v_vstar();
        let phi = parse_with("vstar^2", &syms).unwrap();
        let d = EllipticCompatData::new(Expr::int(3), phi.clone(), 3).unwrap();
        let (pts, _) = d.sample(0);
        assert!(close(&d.v, &parse_with("6/vstar", &syms).unwrap(), &pts));
        assert!(d.check(0).verdict.passed());
        // (h∂)²(v*)² = 2h² ≠ 0: nilpotency needs n ≥ 2.
        assert!(!EllipticCompatData::new(Expr::int(3), phi, 1).unwrap().check(0).verdict.passed());
        let free = EllipticCompatData::new(Expr::int(1), parse_with("v^3 + 1", &syms).unwrap(), 3).unwrap();
        assert!(free.v.is_zero());
        let e = EllipticCompatData::new(Expr::int(1), parse_with("exp(vstar)", &syms).unwrap(), 3).unwrap();
        assert!(!e.check(0).verdict.passed());
    }

    #[test]
    fn real_form_matches_conjugate_structure() {
        let syms = Symbols::v_vstar();
        let d = EllipticCompatData::new(Expr::int(2), parse_with("vstar^2", &syms).unwrap(), 3).unwrap();
        let rf = d.real_form_at(0.7, 0.4).unwrap();
        // V = 4/v*, v* = 0.7 − 0.4i, so V = 4(0.7 + 0.4i)/0.65.
        assert!((rf.omega - 4.0 * 0.7 / 0.65).abs() < 1e-12);
        assert!((rf.theta - 4.0 * 0.4 / 0.65).abs() < 1e-12);
        assert_eq!(rf.h_tilde, 0.5);
    }

    #[test]
    fn theorem3_examples() {
        let ok = theorem3_check(&vw("2/v"), &Expr::zero(), &vw("v^2"), 1, 3, 0);
        assert!(ok.verdict.passed(), "{:?}", ok.diagnostics);
        let w = theorem3_check(&vw("2/v"), &vw("v"), &vw("v^2"), 1, 3, 0);
        assert_eq!(w.diagnostics, vec!["W ≡ 0 violated".to_string()]);
        let deg = theorem3_check(&vw("5/v"), &Expr::zero(), &vw("v^5"), 1, 3, 0);
        assert!(!deg.verdict.passed());
        assert!(deg.diagnostics[0].contains("degree bound"));
    }

    #[test]
    fn first_order_examples() {
        assert!(first_order_check(&Expr::zero(), &Expr::zero(), 0).verdict.passed());
        let r = first_order_check(&Expr::one(), &Expr::zero(), 0);
        assert_eq!(r.diagnostics, vec!["V = W ≡ 0 violated".to_string()]);
        assert!(first_order_check(&vw("sin(v)*0"), &Expr::zero(), 0).verdict.passed());
    }

    #[test]
    fn nilpotency_is_exact_for_polynomials() {
        let phi = vw("(w - v)^2");
        assert!(h_power(&Expr::int(2), &phi, 1, 4).is_zero());
        assert!(h_power(&Expr::int(2), &phi, 1, 3).is_zero());
        assert!(!h_power(&Expr::int(2), &phi, 1, 2).is_zero());
    }
}
