//! Closed-form solutions of reduced equations, their composition with an
//! ansatz, and a finite-difference check of `□u = F(u)`.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::catalog::{AnsatzEntry, ReducedId, WitnessEntry};
use crate::error::{Error, Result};
use crate::expr::{Assignment, Expr, Symbols};
use crate::fd;
use crate::minkowski::dalembertian;
use crate::reduction::{assemble_reduced_equation, ReducedEquation, ReductionProfile};
use crate::sample::{Guard, Sampler, DEFAULT_BOX, DEFAULT_SAMPLES, SINGULAR_MARGIN};

/// Relative tolerance of [`residual_verify`]: `residual < 1e-5·(1 + |F(u)|)`.
pub const RESIDUAL_TOL: f64 = 1e-5;
/// Default distance kept from singular loci by the verifier.
pub const DEFAULT_LOCUS_MARGIN: f64 = 0.5;

impl ReducedId {
    pub fn profile(self) -> ReductionProfile {
        let texts = match self {
            ReducedId::Wave => ["1", "0", "-1", "0", "0"],
            ReducedId::RadialWave => ["1", "0", "-1", "0", "-2/z"],
            ReducedId::NegativeLaplace => ["-1", "0", "-1", "0", "0"],
            ReducedId::AxialParabolic => ["-1", "0", "0", "-1/y", "0"],
        };
        ReductionProfile::parse(texts).expect("built-in profile")
    }

    pub fn equation(self, rhs: Option<Expr>) -> ReducedEquation {
        assemble_reduced_equation(&self.profile(), rhs)
    }
}

/// `φ(y, z)` solving a reduced equation with right-hand side `F(φ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ReducedSolution {
    pub name: String,
    /// Expression in `(y, z)`.
    pub phi: Expr,
    /// Right-hand side in the variable `φ`.
    pub f: Expr,
    pub equation: ReducedId,
    pub params: BTreeMap<String, f64>,
    /// Expressions in `(y, z)` that must stay away from zero.
    pub loci: Vec<Expr>,
}

impl ReducedSolution {
    /// Symbolic residual `LHS[φ] − F(φ)` in `(y, z)`.
    pub fn residual_expr(&self) -> Expr {
        self.equation.equation(Some(self.f.clone())).residual_expr(&self.phi)
    }

    /// Largest `|LHS[φ] − F(φ)|` over guarded points of the `(y, z)` plane.
    pub fn max_residual(&self, count: usize, seed: u64) -> Result<f64> {
        let residual = self.residual_expr();
        let guard = Guard::new(SINGULAR_MARGIN)
            .loci(self.loci.iter().cloned())
            .watch(self.phi.clone())
            .watch(residual.clone());
        let (points, _) = Sampler::new(seed, 2, DEFAULT_BOX).guarded(count, &guard);
        if points.is_empty() {
            return Err(Error::NoSamples(format!("{} in the (y, z) plane", self.name)));
        }
        let mut worst: f64 = 0.0;
        for p in &points {
            worst = worst.max(residual.evaluate(p)?.norm());
        }
        Ok(worst)
    }
}

fn one_variable(name: &str, e: &Expr) -> Result<()> {
    if e.max_var().is_some_and(|i| i > 0) {
        return Err(Error::InvalidInput(format!("{name} must be a function of t only")));
    }
    Ok(())
}

fn phi_symbols() -> Symbols {
    Symbols::phi()
}

fn rhs(text: &str) -> Expr {
    crate::expr::parse_with(text, &phi_symbols()).expect("built-in right-hand side")
}

/// `φ = 4·arctan(exp((y − c·z)/sqrt(1 − c²)))` for `φ_yy − φ_zz = sin φ`.
pub fn sine_gordon_kink(velocity: f64) -> Result<ReducedSolution> {
    if velocity.is_nan() || velocity.abs() >= 1.0 {
        return Err(Error::InvalidInput(format!("kink velocity must satisfy |c| < 1, got {velocity}")));
    }
    let gamma = Expr::real(1.0 - velocity * velocity).sqrt();
    let argument = (Expr::var(0) - Expr::real(velocity) * Expr::var(1)) / gamma;
    let phi = (Expr::int(4) * argument.exp().arctan()).simplify();
    Ok(ReducedSolution {
        name: format!("sine_gordon_kink(c = {velocity})"),
        phi,
        f: rhs("sin(phi)"),
        equation: ReducedId::Wave,
        params: BTreeMap::from([("velocity".to_string(), velocity)]),
        loci: vec![],
    })
}

/// `φ = ln(8 f′(ξ) g′(η) / (f(ξ) + g(η))²)`, `ξ = y + z`, `η = y − z`,
/// solves `φ_yy − φ_zz = exp φ` where `f′g′ > 0` and `f + g ≠ 0`.
pub fn liouville_solution(f: &Expr, g: &Expr) -> Result<ReducedSolution> {
    one_variable("f", f)?;
    one_variable("g", g)?;
    let (df, dg) = (f.differentiate(0), g.differentiate(0));
    for (name, d) in [("f", &df), ("g", &dg)] {
        if vanishes_on_box(d) {
            return Err(Error::Precondition(format!("{name}′ vanishes on the sample box")));
        }
    }
    let xi = Expr::var(0) + Expr::var(1);
    let eta = Expr::var(0) - Expr::var(1);
    let sum = f.substitute(std::slice::from_ref(&xi)) + g.substitute(std::slice::from_ref(&eta));
    let product = df.substitute(&[xi]) * dg.substitute(&[eta]);
    let phi = (Expr::int(8) * &product / sum.powi(2)).ln().simplify();
    let syms = Symbols::t();
    Ok(ReducedSolution {
        name: format!("liouville(f = {}, g = {})", f.display(&syms), g.display(&syms)),
        phi,
        f: rhs("exp(phi)"),
        equation: ReducedId::Wave,
        params: BTreeMap::new(),
        loci: vec![sum.simplify(), product.simplify()],
    })
}

fn vanishes_on_box(d: &Expr) -> bool {
    if d.simplify().is_zero() {
        return true;
    }
    let mut sampler = Sampler::new(0, 1, DEFAULT_BOX);
    (0..DEFAULT_SAMPLES).any(|_| {
        let p = Assignment::real(&sampler.point());
        d.evaluate(&p).is_ok_and(|v| v.norm() < SINGULAR_MARGIN)
    })
}

/// `φ = g(y − z) + h(y + z)` for `φ_yy − φ_zz = 0`.
pub fn free_wave_solution(g: &Expr, h: &Expr) -> Result<ReducedSolution> {
    let psi = wave_sum(g, h)?;
    Ok(ReducedSolution {
        name: "free_wave".into(),
        phi: psi.simplify(),
        f: Expr::zero(),
        equation: ReducedId::Wave,
        params: BTreeMap::new(),
        loci: vec![],
    })
}

/// `φ = (g(y − z) + h(y + z))/z` for `φ_yy − φ_zz − (2/z)φ_z = 0`.
pub fn radial_free_wave(g: &Expr, h: &Expr) -> Result<ReducedSolution> {
    let psi = wave_sum(g, h)?;
    Ok(ReducedSolution {
        name: "radial_free_wave".into(),
        phi: (psi / Expr::var(1)).simplify(),
        f: Expr::zero(),
        equation: ReducedId::RadialWave,
        params: BTreeMap::new(),
        loci: vec![Expr::var(1)],
    })
}

fn wave_sum(g: &Expr, h: &Expr) -> Result<Expr> {
    one_variable("g", g)?;
    one_variable("h", h)?;
    let minus = Expr::var(0) - Expr::var(1);
    let plus = Expr::var(0) + Expr::var(1);
    Ok(g.substitute(&[minus]) + h.substitute(&[plus]))
}

/// Candidate `u(x)` for `□u = F(u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComposedSolution {
    pub name: String,
    pub u: Expr,
    /// Right-hand side in the variable `u`.
    pub f: Expr,
    pub n: usize,
    /// Expressions in `x` that must stay away from zero.
    pub loci: Vec<Expr>,
}

impl ComposedSolution {
    pub fn new(name: impl Into<String>, u: Expr, f: Expr, n: usize) -> ComposedSolution {
        ComposedSolution {
            name: name.into(),
            u,
            f,
            n,
            loci: vec![],
        }
    }

    pub fn from_witness(w: &WitnessEntry) -> ComposedSolution {
        ComposedSolution {
            name: w.id.clone(),
            u: w.u.clone(),
            f: w.f.clone(),
            n: w.n,
            loci: w.loci.clone(),
        }
    }

    /// `F(u(x))`.
    pub fn rhs_in_x(&self) -> Expr {
        self.f.substitute(std::slice::from_ref(&self.u))
    }

    /// Symbolic residual `□u − F(u)` in `x`.
    pub fn symbolic_residual(&self) -> Expr {
        (dalembertian(&self.u, self.n) - self.rhs_in_x()).simplify()
    }
}

/// Substitutes the ansatz into `φ`; the reduced equations must agree.
pub fn compose(entry: &AnsatzEntry, rs: &ReducedSolution) -> Result<ComposedSolution> {
    if entry.equation != rs.equation {
        return Err(Error::ReducedEquationMismatch {
            ansatz: entry.equation.to_string(),
            solution: rs.equation.to_string(),
        });
    }
    let mut loci = entry.loci.clone();
    loci.extend(rs.loci.iter().map(|l| entry.pair.compose(l)));
    Ok(ComposedSolution {
        name: format!("{} ∘ {}", entry.id, rs.name),
        u: entry.pair.compose(&rs.phi),
        f: rs.f.clone(),
        n: entry.pair.n,
        loci,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdConfig {
    pub step: f64,
    pub samples: usize,
    pub seed: u64,
    pub bounds: (f64, f64),
    /// Points keep at least `max(locus_margin, 10·step)` from every locus
    /// and singular subexpression.
    pub locus_margin: f64,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig {
            step: fd::DEFAULT_STEP,
            samples: DEFAULT_SAMPLES,
            seed: 0,
            bounds: DEFAULT_BOX,
            locus_margin: DEFAULT_LOCUS_MARGIN,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualRow {
    pub point: Vec<f64>,
    pub box_u: f64,
    pub f_u: f64,
    pub residual: f64,
    pub richardson_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResidualReport {
    pub name: String,
    pub points_used: usize,
    pub points_rejected: usize,
    /// Largest `|□u − F(u)|` with `□u` from the fourth-order stencil.
    pub max_residual: f64,
    /// Largest `|□u − F(u)| / (1 + |F(u)|)`.
    pub max_scaled_residual: f64,
    /// Same with the Richardson-extrapolated `□u` (steps `h`, `h/2`).
    pub max_richardson_residual: f64,
    /// Largest `|□u(h) − □u(h/2)|`.
    pub max_step_gap: f64,
    /// Largest `|□u − F(u)|` with the symbolic `□u`, when it evaluates.
    pub symbolic_residual: Option<f64>,
    pub pass: bool,
    pub rows: Vec<ResidualRow>,
}

/// Finite-difference residual of `□u = F(u)` at guarded random points.
pub fn residual_verify(c: &ComposedSolution, config: &FdConfig) -> Result<ResidualReport> {
    let margin = config.locus_margin.max(10.0 * config.step);
    let guard = Guard::new(margin)
        .loci(c.loci.iter().cloned())
        .watch(c.u.clone());
    let f_x = c.rhs_in_x();
    let row_at = |p: &Assignment| -> Option<ResidualRow> {
        let rich = fd::dalembertian_richardson(&c.u, p, config.step).ok()?;
        let f_u = f_x.evaluate(p).ok()?;
        Some(ResidualRow {
            point: p.vars.iter().map(|z| z.re).collect(),
            box_u: rich.coarse.re,
            f_u: f_u.re,
            residual: (rich.coarse - f_u).norm(),
            richardson_residual: (rich.extrapolated - f_u).norm(),
        })
    };
    let mut sampler = Sampler::new(config.seed, c.n + 1, config.bounds);
    let (points, rejected) =
        sampler.guarded_with(config.samples, |p| guard.admits(p) && row_at(p).is_some());
    if points.is_empty() {
        return Err(Error::NoSamples(format!("all points rejected for {}", c.name)));
    }
    let rows: Vec<ResidualRow> = points.iter().filter_map(&row_at).collect();
    let gap = points
        .iter()
        .filter_map(|p| fd::dalembertian_richardson(&c.u, p, config.step).ok())
        .map(|r| r.error_estimate)
        .fold(0.0, f64::max);
    let symbolic = c.symbolic_residual();
    let symbolic_residual = points
        .iter()
        .map(|p| symbolic.evaluate(p).map(|v| v.norm()))
        .collect::<std::result::Result<Vec<f64>, _>>()
        .ok()
        .map(|v| v.into_iter().fold(0.0, f64::max));
    let max = |f: fn(&ResidualRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    let max_scaled_residual = max(|r| r.residual / (1.0 + r.f_u.abs()));
    Ok(ResidualReport {
        name: c.name.clone(),
        points_used: rows.len(),
        points_rejected: rejected,
        max_residual: max(|r| r.residual),
        max_scaled_residual,
        max_richardson_residual: max(|r| r.richardson_residual),
        max_step_gap: gap,
        symbolic_residual,
        pass: max_scaled_residual < RESIDUAL_TOL,
        rows,
    })
}

/// `|□_h u − □u| / |□_{h/2} u − □u|` against the symbolic `□u`; close to 16
/// for a fourth-order stencil in the truncation-dominated regime.
pub fn convergence_factor(u: &Expr, point: &Assignment, step: f64) -> Result<f64> {
    let exact = dalembertian(u, point.dimension()).evaluate(point)?;
    let coarse = fd::dalembertian(u, point, step)?;
    let fine = fd::dalembertian(u, point, step / 2.0)?;
    Ok((coarse - exact).norm() / (fine - exact).norm())
}
