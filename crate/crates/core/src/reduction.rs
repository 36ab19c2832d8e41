//! Substitution of a two-variable ansatz `u = φ(y, z)` into `□u = F(u)`.
//!
//! Substitution gives
//! `r·φ_yy + 2q·φ_yz + s·φ_zz + R·φ_y + S·φ_z = F(φ)` with
//! `r = y·y`, `q = y·z`, `s = z·z`, `R = □y`, `S = □z` (Minkowski products of
//! gradients). The reduction closes when these five quantities depend on
//! `x` only through `(y, z)`; a candidate profile is supplied and verified
//! by sampling.

use std::fmt;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{parse, parse_with, Assignment, Expr, Node, Symbols};
use crate::fd;
use crate::minkowski::{dalembertian, gradient, minkowski_dot};
use crate::sample::{Guard, Sampler, SINGULAR_MARGIN, ZERO_TOL};

/// The ansatz variables `y(x)`, `z(x)` over `x0..xn`.
#[derive(Clone, Debug, PartialEq)]
pub struct AnsatzPair {
    pub y: Expr,
    pub z: Expr,
    pub n: usize,
}

impl AnsatzPair {
    pub fn new(y: Expr, z: Expr, n: usize) -> Result<AnsatzPair> {
        for (name, e) in [("y", &y), ("z", &z)] {
            if let Some(i) = e.max_var() {
                if i > n {
                    return Err(Error::InvalidInput(format!(
                        "{name} uses x{i} but n = {n}"
                    )));
                }
            }
        }
        Ok(AnsatzPair { y, z, n })
    }

    pub fn parse(y: &str, z: &str, n: usize) -> Result<AnsatzPair> {
        let y = parse(y, n).map_err(|e| Error::parse(y, e))?;
        let z = parse(z, n).map_err(|e| Error::parse(z, e))?;
        AnsatzPair::new(y, z, n)
    }

    /// Value of `(y, z)` at a point of `x`-space, carrying its parameters.
    pub fn project(&self, point: &Assignment) -> Result<Assignment> {
        let y = self.y.evaluate(point)?;
        let z = self.z.evaluate(point)?;
        Ok(Assignment::new(vec![y, z]).with_params(&point.params))
    }

    /// `φ(y(x), z(x))` without simplification.
    pub fn compose(&self, phi: &Expr) -> Expr {
        phi.substitute(&[self.y.clone(), self.z.clone()])
    }

    /// Smallest singular value of the 2×(n+1) Jacobian of `(y, z)` at a point.
    pub fn jacobian_min_singular_value(&self, point: &Assignment) -> Result<f64> {
        let gy = gradient(&self.y, self.n);
        let gz = gradient(&self.z, self.n);
        let (mut a, mut b, mut c) = (0.0, 0.0, 0.0);
        for mu in 0..=self.n {
            let u = gy[mu].evaluate(point)?;
            let v = gz[mu].evaluate(point)?;
            a += u.norm_sqr();
            b += (u.conj() * v).re;
            c += v.norm_sqr();
        }
        // Eigenvalues of the Gram matrix [[a, b], [b, c]].
        let mean = 0.5 * (a + c);
        let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
        Ok((mean - disc).max(0.0).sqrt())
    }
}

/// The five left-hand sides of the reduction conditions as expressions in `x`.
#[derive(Clone, Debug, PartialEq)]
pub struct RawCoefficients {
    pub yy: Expr,
    pub yz: Expr,
    pub zz: Expr,
    pub box_y: Expr,
    pub box_z: Expr,
}

impl RawCoefficients {
    pub fn as_array(&self) -> [&Expr; 5] {
        [&self.yy, &self.yz, &self.zz, &self.box_y, &self.box_z]
    }
}

pub fn substitute_ansatz(a: &AnsatzPair) -> RawCoefficients {
    RawCoefficients {
        yy: minkowski_dot(&a.y, &a.y, a.n),
        yz: minkowski_dot(&a.y, &a.z, a.n),
        zz: minkowski_dot(&a.z, &a.z, a.n),
        box_y: dalembertian(&a.y, a.n),
        box_z: dalembertian(&a.z, a.n),
    }
}

/// Names of the five conditions in report order.
pub const CONDITION_NAMES: [&str; 5] = ["r", "q", "s", "R", "S"];

/// `r, q, s, R, S` as functions of `(y, z)` (variables 0 and 1).
#[derive(Clone, Debug, PartialEq)]
pub struct ReductionProfile {
    pub r: Expr,
    pub q: Expr,
    pub s: Expr,
    /// `R = □y`.
    pub box_y: Expr,
    /// `S = □z`.
    pub box_z: Expr,
}

impl ReductionProfile {
    pub fn new(r: Expr, q: Expr, s: Expr, box_y: Expr, box_z: Expr) -> Result<ReductionProfile> {
        let p = ReductionProfile {
            r,
            q,
            s,
            box_y,
            box_z,
        };
        for (name, e) in CONDITION_NAMES.iter().zip(p.as_array()) {
            if e.max_var().is_some_and(|i| i > 1) {
                return Err(Error::InvalidInput(format!(
                    "profile entry {name} must depend on (y, z) only"
                )));
            }
        }
        Ok(p)
    }

    /// Parses `[r, q, s, R, S]` written in the variables `y`, `z`.
    pub fn parse(texts: [&str; 5]) -> Result<ReductionProfile> {
        let syms = Symbols::yz();
        let mut parsed = Vec::with_capacity(5);
        for t in texts {
            parsed.push(parse_with(t, &syms).map_err(|e| Error::parse(t, e))?);
        }
        let mut it = parsed.into_iter();
        let mut next = || it.next().expect("five entries");
        ReductionProfile::new(next(), next(), next(), next(), next())
    }

    pub fn constant(values: [i64; 5]) -> ReductionProfile {
        let [r, q, s, rr, ss] = values.map(Expr::int);
        ReductionProfile {
            r,
            q,
            s,
            box_y: rr,
            box_z: ss,
        }
    }

    pub fn as_array(&self) -> [&Expr; 5] {
        [&self.r, &self.q, &self.s, &self.box_y, &self.box_z]
    }

    /// Entries printed in `y`, `z`.
    pub fn strings(&self) -> [String; 5] {
        let syms = Symbols::yz();
        self.as_array()
            .map(|e| e.simplify().display(&syms).to_string())
    }

    /// Profile composed with the ansatz, as expressions in `x`.
    pub fn in_x(&self, a: &AnsatzPair) -> [Expr; 5] {
        self.as_array().map(|e| a.compose(e))
    }
}

/// Sampling settings shared by the verifiers.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleConfig {
    pub count: usize,
    pub seed: u64,
    pub bounds: (f64, f64),
}

impl Default for SampleConfig {
    fn default() -> Self {
        SampleConfig {
            count: crate::sample::DEFAULT_SAMPLES,
            seed: 0,
            bounds: crate::sample::DEFAULT_BOX,
        }
    }
}

/// Draws points in `x`-space away from the singular loci of the ansatz,
/// its raw coefficients, the composed profile and any extra loci.
pub fn sample_points(
    a: &AnsatzPair,
    profile: Option<&ReductionProfile>,
    loci: &[Expr],
    params: &std::collections::BTreeMap<String, Complex64>,
    config: &SampleConfig,
) -> (Vec<Assignment>, usize) {
    let raw = substitute_ansatz(a);
    let mut guard = Guard::new(SINGULAR_MARGIN)
        .loci(loci.iter().cloned())
        .watch(a.y.clone())
        .watch(a.z.clone())
        .watch_all(raw.as_array().into_iter().cloned());
    if let Some(p) = profile {
        guard = guard.watch_all(p.in_x(a));
    }
    let mut sampler = Sampler::new(config.seed, a.n + 1, config.bounds);
    let (points, rejected) =
        sampler.guarded_with(config.count, |pt| guard.admits(&pt.clone().with_params(params)));
    let points = points.into_iter().map(|p| p.with_params(params)).collect();
    (points, rejected)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConditionResidual {
    pub condition: String,
    pub max_residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub conditions: Vec<ConditionResidual>,
    pub points_used: usize,
    pub points_skipped: usize,
    pub skipped_reasons: Vec<String>,
    pub min_jacobian_singular_value: f64,
    pub functionally_independent: bool,
    pub pass: bool,
}

impl VerificationReport {
    pub fn residual(&self, condition: &str) -> Option<f64> {
        self.conditions
            .iter()
            .find(|c| c.condition == condition)
            .map(|c| c.max_residual)
    }
}

/// Threshold on the smallest Jacobian singular value for `(y, z)` to count
/// as functionally independent.
pub const INDEPENDENCE_TOL: f64 = 1e-8;
const INDEPENDENCE_POINTS: usize = 5;

/// Compares the raw coefficients with the profile evaluated at
/// `(y(x), z(x))` over the given points. Passes when every residual is below
/// `tol` (default `ZERO_TOL`) and `(y, z)` are independent.
pub fn verify_reduction_conditions(
    a: &AnsatzPair,
    p: &ReductionProfile,
    points: &[Assignment],
) -> VerificationReport {
    verify_with_tolerance(a, p, points, ZERO_TOL)
}

pub fn verify_with_tolerance(
    a: &AnsatzPair,
    p: &ReductionProfile,
    points: &[Assignment],
    tol: f64,
) -> VerificationReport {
    let raw = substitute_ansatz(a);
    let lhs = raw.as_array();
    let rhs = p.as_array();
    let mut max = [0.0f64; 5];
    let mut used = 0;
    let mut skipped_reasons = Vec::new();
    'points: for pt in points {
        let yz = match a.project(pt) {
            Ok(v) => v,
            Err(e) => {
                skipped_reasons.push(e.to_string());
                continue;
            }
        };
        let mut local = [0.0f64; 5];
        for k in 0..5 {
            let l = lhs[k].evaluate(pt);
            let r = rhs[k].evaluate(&yz);
            match (l, r) {
                (Ok(l), Ok(r)) => local[k] = (l - r).norm(),
                (Err(e), _) | (_, Err(e)) => {
                    skipped_reasons.push(e.to_string());
                    continue 'points;
                }
            }
        }
        used += 1;
        for k in 0..5 {
            max[k] = max[k].max(local[k]);
        }
    }
    let conditions: Vec<ConditionResidual> = CONDITION_NAMES
        .iter()
        .zip(max)
        .map(|(name, m)| ConditionResidual {
            condition: name.to_string(),
            max_residual: m,
            pass: m < tol,
        })
        .collect();
    let min_sv = points
        .iter()
        .take(INDEPENDENCE_POINTS)
        .filter_map(|pt| a.jacobian_min_singular_value(pt).ok())
        .fold(f64::INFINITY, f64::min);
    let independent = min_sv.is_finite() && min_sv > INDEPENDENCE_TOL;
    let pass = used > 0 && independent && conditions.iter().all(|c| c.pass);
    VerificationReport {
        conditions,
        points_used: used,
        points_skipped: points.len() - used,
        skipped_reasons,
        min_jacobian_singular_value: if min_sv.is_finite() { min_sv } else { 0.0 },
        functionally_independent: independent,
        pass,
    }
}

/// Type of the reduced two-dimensional equation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "case")]
pub enum Case {
    /// `rs − q² > 0`.
    Elliptic,
    /// `rs − q² < 0`.
    Hyperbolic,
    /// `rs − q² = 0` with `r² + q² + s² ≠ 0`; `lambda` is the sign of the
    /// nonvanishing square.
    Parabolic { lambda: i8 },
    /// `r = q = s = 0`.
    FirstOrder,
    /// The sign of `rs − q²` changes across samples.
    Mixed,
}

impl fmt::Display for Case {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Case::Elliptic => f.write_str("elliptic"),
            Case::Hyperbolic => f.write_str("hyperbolic"),
            Case::Parabolic { lambda } => write!(f, "parabolic (lambda = {lambda})"),
            Case::FirstOrder => f.write_str("first-order"),
            Case::Mixed => f.write_str("mixed"),
        }
    }
}

/// Sample counts behind a classification.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SignEvidence {
    pub positive: usize,
    pub negative: usize,
    /// `rs − q² = 0` with a nonzero square.
    pub zero: usize,
    /// `r = q = s = 0`.
    pub degenerate: usize,
    pub parabolic_positive: usize,
    pub parabolic_negative: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub case: Case,
    pub evidence: SignEvidence,
}

/// Classifies from `(y, z)` sample points directly.
pub fn classify_profile(p: &ReductionProfile, yz_points: &[Assignment]) -> Classification {
    let mut ev = SignEvidence::default();
    for pt in yz_points {
        let vals: Result<Vec<f64>, _> = [&p.r, &p.q, &p.s]
            .iter()
            .map(|e| e.evaluate_real(pt))
            .collect();
        let Ok(vals) = vals else {
            ev.failed += 1;
            continue;
        };
        let (r, q, s) = (vals[0], vals[1], vals[2]);
        let disc = r * s - q * q;
        if r.abs() < ZERO_TOL && q.abs() < ZERO_TOL && s.abs() < ZERO_TOL {
            ev.degenerate += 1;
        } else if disc > ZERO_TOL {
            ev.positive += 1;
        } else if disc < -ZERO_TOL {
            ev.negative += 1;
        } else {
            ev.zero += 1;
            if r + s > 0.0 {
                ev.parabolic_positive += 1;
            } else {
                ev.parabolic_negative += 1;
            }
        }
    }
    let kinds = [ev.positive, ev.negative, ev.zero, ev.degenerate]
        .iter()
        .filter(|&&c| c > 0)
        .count();
    let case = if kinds != 1 {
        Case::Mixed
    } else if ev.positive > 0 {
        Case::Elliptic
    } else if ev.negative > 0 {
        Case::Hyperbolic
    } else if ev.degenerate > 0 {
        Case::FirstOrder
    } else if ev.parabolic_positive > 0 && ev.parabolic_negative > 0 {
        Case::Mixed
    } else {
        Case::Parabolic {
            lambda: if ev.parabolic_positive > 0 { 1 } else { -1 },
        }
    };
    Classification { case, evidence: ev }
}

/// Classifies over `x`-space sample points mapped through the ansatz.
pub fn classify(a: &AnsatzPair, p: &ReductionProfile, points: &[Assignment]) -> Classification {
    let mut failed = 0;
    let yz: Vec<Assignment> = points
        .iter()
        .filter_map(|pt| {
            let r = a.project(pt).ok();
            if r.is_none() {
                failed += 1;
            }
            r
        })
        .collect();
    let mut c = classify_profile(p, &yz);
    c.evidence.failed += failed;
    c
}

/// Derivative slots of the reduced equation, in canonical order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Derivative {
    YY,
    YZ,
    ZZ,
    Y,
    Z,
}

impl Derivative {
    pub const ALL: [Derivative; 5] = [
        Derivative::YY,
        Derivative::YZ,
        Derivative::ZZ,
        Derivative::Y,
        Derivative::Z,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Derivative::YY => "φ_yy",
            Derivative::YZ => "φ_yz",
            Derivative::ZZ => "φ_zz",
            Derivative::Y => "φ_y",
            Derivative::Z => "φ_z",
        }
    }

    /// Applies the derivative to an expression in `(y, z)`.
    pub fn apply(self, phi: &Expr) -> Expr {
        match self {
            Derivative::YY => phi.differentiate(0).differentiate(0),
            Derivative::YZ => phi.differentiate(0).differentiate(1),
            Derivative::ZZ => phi.differentiate(1).differentiate(1),
            Derivative::Y => phi.differentiate(0),
            Derivative::Z => phi.differentiate(1),
        }
    }
}

/// `Σ coefficient · derivative = F(φ)` in the variables `(y, z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedEquation {
    /// Coefficients of `φ_yy, φ_yz, φ_zz, φ_y, φ_z`.
    pub coefficients: [Expr; 5],
    /// Right-hand side in the variable `φ`; `None` prints as `F(φ)`.
    pub rhs: Option<Expr>,
    pub case: Option<Case>,
}

pub fn assemble_reduced_equation(p: &ReductionProfile, rhs: Option<Expr>) -> ReducedEquation {
    ReducedEquation {
        coefficients: [
            p.r.simplify(),
            (Expr::int(2) * &p.q).simplify(),
            p.s.simplify(),
            p.box_y.simplify(),
            p.box_z.simplify(),
        ],
        rhs: rhs.map(|f| f.simplify()),
        case: None,
    }
}

impl ReducedEquation {
    pub fn with_case(mut self, case: Case) -> ReducedEquation {
        self.case = Some(case);
        self
    }

    pub fn coefficient(&self, d: Derivative) -> &Expr {
        &self.coefficients[d as usize]
    }

    /// Builds an equation from `(derivative, coefficient text)` terms;
    /// absent derivatives get coefficient zero.
    pub fn from_terms(terms: &[(Derivative, &str)], rhs: Option<Expr>) -> Result<ReducedEquation> {
        let syms = Symbols::yz();
        let mut coefficients: [Expr; 5] = std::array::from_fn(|_| Expr::zero());
        for (d, text) in terms {
            let c = parse_with(text, &syms).map_err(|e| Error::parse(text, e))?;
            coefficients[*d as usize] = (&coefficients[*d as usize] + c).simplify();
        }
        Ok(ReducedEquation {
            coefficients,
            rhs,
            case: None,
        })
    }

    /// Reads the printed form `c₁·φ_yy − (c₂)φ_z ... = F(φ)` back into
    /// coefficients, in any term order. The right-hand side is `None` for
    /// `F(φ)`.
    pub fn from_printed(text: &str) -> Result<ReducedEquation> {
        let bad = |why: &str| Error::InvalidInput(format!("cannot read `{text}`: {why}"));
        let (lhs, rhs) = text.split_once(" = ").ok_or_else(|| bad("missing ` = `"))?;
        let rhs = match rhs.trim() {
            "F(φ)" => None,
            other => Some(
                parse_with(other, &Symbols::phi()).map_err(|e| Error::parse(other, e))?,
            ),
        };
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut depth = 0i32;
        for ch in lhs.trim().chars() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (ch == '−' || ch == '-' || ch == '+') {
                if !current.trim().is_empty() {
                    terms.push((negative, current.trim().to_string()));
                }
                current.clear();
                negative = ch != '+';
                continue;
            }
            current.push(ch);
        }
        if !current.trim().is_empty() {
            terms.push((negative, current.trim().to_string()));
        }
        let syms = Symbols::yz();
        let mut coefficients: [Expr; 5] = std::array::from_fn(|_| Expr::zero());
        for (negative, term) in terms {
            let d = Derivative::ALL
                .into_iter()
                .filter(|d| term.ends_with(d.label()))
                .max_by_key(|d| d.label().len())
                .ok_or_else(|| bad("term without a derivative"))?;
            let prefix = term[..term.len() - d.label().len()].trim();
            let c = if prefix.is_empty() {
                Expr::one()
            } else {
                parse_with(prefix, &syms).map_err(|e| Error::parse(prefix, e))?
            };
            let c = if negative { -c } else { c };
            let slot = &mut coefficients[d as usize];
            *slot = (slot.clone() + c).simplify();
        }
        Ok(ReducedEquation {
            coefficients,
            rhs,
            case: None,
        })
    }

    /// True when no second derivative survives.
    pub fn is_first_order(&self) -> bool {
        self.coefficients[..3].iter().all(Expr::is_zero)
    }

    /// Left-hand side applied to `φ(y, z)` as an expression in `(y, z)`.
    pub fn apply(&self, phi: &Expr) -> Expr {
        let mut acc = Expr::zero();
        for d in Derivative::ALL {
            let c = self.coefficient(d);
            if !c.is_zero() {
                acc = acc + c * d.apply(phi);
            }
        }
        acc.simplify()
    }

    /// `LHS[φ] − F(φ)`; requires a right-hand side (zero when absent).
    pub fn residual_expr(&self, phi: &Expr) -> Expr {
        let f = self
            .rhs
            .as_ref()
            .map(|f| f.substitute(std::slice::from_ref(phi)))
            .unwrap_or_else(Expr::zero);
        (self.apply(phi) - f).simplify()
    }

    /// Numerical comparison of all coefficients at `(y, z)` points.
    pub fn same_operator(&self, other: &ReducedEquation, yz_points: &[Assignment]) -> bool {
        self.coefficients
            .iter()
            .zip(&other.coefficients)
            .all(|(a, b)| crate::sample::numerically_zero(&(a - b), yz_points, ZERO_TOL))
    }
}

/// `(negative, magnitude)` split of a coefficient for printing.
fn split_sign(e: &Expr) -> (bool, Expr) {
    match e.node() {
        Node::Neg(x) => (true, x.clone()),
        Node::Num(n) if n.is_negative_real() => (true, Expr::num(-*n)),
        Node::Mul(c, x) | Node::Div(c, x) if c.as_number().is_some_and(|n| n.is_negative_real()) => {
            let pos = Expr::num(-*c.as_number().unwrap());
            let rebuilt = match e.node() {
                Node::Mul(..) => pos * x,
                _ => pos / x,
            };
            (true, rebuilt)
        }
        _ => (false, e.clone()),
    }
}

impl fmt::Display for ReducedEquation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let syms = Symbols::yz();
        let mut first = true;
        for d in Derivative::ALL {
            let c = self.coefficient(d);
            if c.is_zero() {
                continue;
            }
            let (negative, magnitude) = split_sign(c);
            match (first, negative) {
                (true, true) => f.write_str("−")?,
                (true, false) => {}
                (false, true) => f.write_str(" − ")?,
                (false, false) => f.write_str(" + ")?,
            }
            first = false;
            if !magnitude.is_one() {
                if magnitude.as_number().and_then(|n| n.as_integer()).is_some() {
                    write!(f, "{}", magnitude.display(&syms))?;
                } else {
                    write!(f, "({})", magnitude.display(&syms))?;
                }
            }
            f.write_str(d.label())?;
        }
        if first {
            f.write_str("0")?;
        }
        match &self.rhs {
            None => f.write_str(" = F(φ)"),
            Some(rhs) => {
                let phi = Symbols::phi().display_alias(1);
                write!(f, " = {}", rhs.display(&phi))
            }
        }
    }
}

/// Finite-difference check of the substitution identity: `□[φ(y(x), z(x))]`
/// against the assembled operator applied to `φ`. Returns the largest
/// relative difference `|fd − op| / (1 + |op|)` over the points.
pub fn reconstruction_residual(
    a: &AnsatzPair,
    eq: &ReducedEquation,
    phi: &Expr,
    points: &[Assignment],
    step: f64,
) -> Result<f64> {
    let composed = a.compose(phi);
    let operator = eq.apply(phi);
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for pt in points {
        let yz = a.project(pt)?;
        let fd_value = fd::dalembertian(&composed, pt, step)?;
        let op_value = operator.evaluate(&yz)?;
        worst = worst.max((fd_value - op_value).norm() / (1.0 + op_value.norm()));
        used += 1;
    }
    if used == 0 {
        return Err(Error::NoSamples("reconstruction check".into()));
    }
    Ok(worst)
}
