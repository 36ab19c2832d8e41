//! Numerical checks of the trace, determinant and minor-sum identities for
//! mixed Hessians of solution pairs, plus the Hamilton–Cayley residual.

use num_complex::Complex64;
use serde::Serialize;

use crate::compatibility::{h_power, lemma1_rhs, lemma3_rhs};
use crate::error::{Error, Result};
use crate::expr::{Assignment, Expr};
use crate::minkowski::{characteristic_residual, minor_sums, HessianExprs, MixedHessian};
use crate::reduction::{
    sample_points, verify_reduction_conditions, AnsatzPair, ReductionProfile, SampleConfig,
    VerificationReport,
};

/// Threshold on `|det M| / (1 + ‖M‖^N)`.
pub const DET_TOL: f64 = 1e-7;
/// Relative threshold for the minor-sum formulas.
pub const MINOR_TOL: f64 = 1e-6;
/// Threshold on the scaled Hamilton–Cayley residual.
pub const HAMILTON_CAYLEY_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "system")]
pub enum PairSystem {
    /// `v·v = w·w = 0`, `v·w = h`.
    Hyperbolic,
    /// As hyperbolic with `w = v*`.
    Elliptic,
    /// `v·v = λ`, `v·w = w·w = 0`.
    Parabolic { lambda: i8 },
}

/// Functions `v(x)`, `w(x)` solving one of the two-function systems, with
/// the system data as expressions in `(v, w)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SolutionPair {
    pub name: String,
    pub pair: AnsatzPair,
    pub system: PairSystem,
    pub h: Expr,
    pub big_v: Expr,
    pub big_w: Expr,
    pub phi: Option<Expr>,
    pub psi: Option<Expr>,
    /// Expressions in `x` that must stay away from zero.
    pub loci: Vec<Expr>,
}

impl SolutionPair {
    /// The system as a reduction profile in `(v, w)`.
    pub fn profile(&self) -> ReductionProfile {
        let (r, q) = match self.system {
            PairSystem::Parabolic { lambda } => (Expr::int(lambda as i64), Expr::zero()),
            _ => (Expr::zero(), self.h.clone()),
        };
        ReductionProfile {
            r,
            q,
            s: Expr::zero(),
            box_y: self.big_v.clone(),
            box_z: self.big_w.clone(),
        }
    }

    /// Guarded points in `x`, away from the loci and from zeros of `Φ`, `Ψ`.
    pub fn sample(&self, config: &SampleConfig) -> (Vec<Assignment>, usize) {
        let mut loci = self.loci.clone();
        for f in [&self.phi, &self.psi].into_iter().flatten() {
            loci.push(self.pair.compose(f));
        }
        sample_points(&self.pair, Some(&self.profile()), &loci, &Default::default(), config)
    }

    pub fn system_report(&self, points: &[Assignment]) -> VerificationReport {
        verify_reduction_conditions(&self.pair, &self.profile(), points)
    }

    /// Runs the system check and fails with a diagnostic when it does not
    /// hold, so no lemma is evaluated on a non-solution.
    pub fn require_solution(&self, points: &[Assignment]) -> Result<VerificationReport> {
        let rep = self.system_report(points);
        if !rep.pass {
            let failing: Vec<String> = rep
                .conditions
                .iter()
                .filter(|c| !c.pass)
                .map(|c| format!("{} (residual {:.3e})", c.condition, c.max_residual))
                .collect();
            let detail = if failing.is_empty() {
                "functions are not independent or no point evaluated".to_string()
            } else {
                failing.join(", ")
            };
            return Err(Error::Precondition(format!(
                "{} does not solve its system: {detail}",
                self.name
            )));
        }
        Ok(rep)
    }

    fn hessians(&self) -> (HessianExprs, HessianExprs) {
        (
            HessianExprs::new(&self.pair.y, self.pair.n),
            HessianExprs::new(&self.pair.z, self.pair.n),
        )
    }

    fn require_two_null(&self) -> Result<()> {
        if matches!(self.system, PairSystem::Parabolic { .. }) {
            return Err(Error::Precondition(
                "the trace and minor identities are stated for the hyperbolic and elliptic systems".into(),
            ));
        }
        Ok(())
    }
}

fn coords(p: &Assignment) -> Vec<f64> {
    p.vars.iter().map(|z| z.re).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetRow {
    pub point: Vec<f64>,
    pub det_v: f64,
    pub det_w: f64,
    pub scaled: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma2Report {
    pub rows: Vec<DetRow>,
    pub max_abs_det: f64,
    pub max_scaled: f64,
    pub pass: bool,
}

fn scaled_det(m: &MixedHessian) -> (f64, f64) {
    let det = minor_sums(m).det.norm();
    (det, det / (1.0 + m.norm_inf().powi(m.dim() as i32)))
}

/// `det V̂ = det Ŵ = 0`.
pub fn lemma2_check(s: &SolutionPair, points: &[Assignment]) -> Result<Lemma2Report> {
    s.require_solution(points)?;
    let (hv, hw) = s.hessians();
    let mut rows = Vec::new();
    for p in points {
        let (dv, sv) = scaled_det(&hv.at(p)?);
        let (dw, sw) = scaled_det(&hw.at(p)?);
        rows.push(DetRow {
            point: coords(p),
            det_v: dv,
            det_w: dw,
            scaled: sv.max(sw),
        });
    }
    let max_abs_det = rows.iter().map(|r| r.det_v.max(r.det_w)).fold(0.0, f64::max);
    let max_scaled = rows.iter().map(|r| r.scaled).fold(0.0, f64::max);
    Ok(Lemma2Report {
        rows,
        max_abs_det,
        max_scaled,
        pass: max_scaled < DET_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MinorRow {
    pub point: Vec<f64>,
    /// `"v"` or `"w"`.
    pub function: String,
    pub k: usize,
    pub minor_sum: f64,
    pub formula: f64,
    pub rel_error: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma3Report {
    pub rows: Vec<MinorRow>,
    pub max_rel_error: f64,
    pub pass: bool,
}

fn rel_error(a: Complex64, b: Complex64, scale: f64) -> f64 {
    let diff = (a - b).norm();
    let scale = scale.max(b.norm());
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

/// `M_k(V̂) = (h∂_w)^kΦ/(k!Φ)` and `M_k(Ŵ) = (h∂_v)^kΨ/(k!Ψ)` for
/// `k = 1..n+1`, relative to `max(|formula|, ‖M‖^k)`.
pub fn lemma3_check(s: &SolutionPair, points: &[Assignment]) -> Result<Lemma3Report> {
    s.require_two_null()?;
    let (phi, psi) = match (&s.phi, &s.psi) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::Precondition(format!("{} carries no Φ, Ψ", s.name))),
    };
    s.require_solution(points)?;
    let (hv, hw) = s.hessians();
    let dim = s.pair.n + 1;
    let formulas: Vec<(&str, &HessianExprs, Vec<Expr>)> = vec![
        ("v", &hv, (1..=dim).map(|k| lemma3_rhs(&s.h, phi, 1, k)).collect()),
        ("w", &hw, (1..=dim).map(|k| lemma3_rhs(&s.h, psi, 0, k)).collect()),
    ];
    let mut rows = Vec::new();
    for p in points {
        let vw = s.pair.project(p)?;
        for (name, hess, rhs) in &formulas {
            let m = hess.at(p)?;
            let sums = minor_sums(&m);
            let norm = m.norm_inf();
            for k in 1..=dim {
                let formula = rhs[k - 1].evaluate(&vw)?;
                let lhs = sums.get(k);
                rows.push(MinorRow {
                    point: coords(p),
                    function: name.to_string(),
                    k,
                    minor_sum: lhs.re,
                    formula: formula.re,
                    rel_error: rel_error(lhs, formula, norm.powi(k as i32)),
                });
            }
        }
    }
    let max_rel_error = rows.iter().map(|r| r.rel_error).fold(0.0, f64::max);
    Ok(Lemma3Report {
        rows,
        max_rel_error,
        pass: max_rel_error < MINOR_TOL,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub point: Vec<f64>,
    pub function: String,
    pub k: usize,
    pub trace: f64,
    pub trace_of_power: f64,
    /// `((−1)^k/(k−1)!)(h∂)^{k+1}V`, the literal reading.
    pub printed_rhs: f64,
    pub delta_trace: f64,
    pub delta_trace_of_power: f64,
    /// `((−1)^{k−1}/(k−1)!)(h∂)^{k−1}V`, an index-shifted variant.
    pub shifted_rhs: f64,
    pub delta_shifted: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Lemma1Report {
    pub rows: Vec<TraceRow>,
    pub max_delta_trace: f64,
    pub max_delta_trace_of_power: f64,
    pub max_delta_shifted: f64,
}

/// `(−1)^{k−1}/(k−1)! · (h∂)^{k−1}X`.
pub fn lemma1_shifted_rhs(h: &Expr, x: &Expr, var: usize, k: usize) -> Expr {
    let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
    let fact: f64 = (1..k).map(|i| i as f64).product();
    (Expr::real(sign / fact) * h_power(h, x, var, k - 1)).simplify()
}

/// Evaluates both readings of the trace relation (`tr M` and `tr M^k`
/// against the literal right-hand side) for `k = 1..=max_k`, along with an
/// index-shifted right-hand side. No reading is declared canonical.
pub fn lemma1_check(s: &SolutionPair, points: &[Assignment], max_k: usize) -> Result<Lemma1Report> {
    s.require_two_null()?;
    if max_k == 0 {
        return Err(Error::InvalidInput("k starts at 1".into()));
    }
    s.require_solution(points)?;
    let (hv, hw) = s.hessians();
    let sides: [(&str, &HessianExprs, &Expr, usize); 2] =
        [("v", &hv, &s.big_v, 1), ("w", &hw, &s.big_w, 0)];
    let mut rhs = Vec::new();
    for (_, _, x, var) in &sides {
        rhs.push(
            (1..=max_k)
                .map(|k| (lemma1_rhs(&s.h, x, *var, k), lemma1_shifted_rhs(&s.h, x, *var, k)))
                .collect::<Vec<_>>(),
        );
    }
    let mut rows = Vec::new();
    for p in points {
        let vw = s.pair.project(p)?;
        for (side, (name, hess, _, _)) in sides.iter().enumerate() {
            let m = hess.at(p)?;
            let trace = m.trace();
            for k in 1..=max_k {
                let trace_k = m.power(k as u32).trace();
                let printed = rhs[side][k - 1].0.evaluate(&vw)?;
                let shifted = rhs[side][k - 1].1.evaluate(&vw)?;
                rows.push(TraceRow {
                    point: coords(p),
                    function: name.to_string(),
                    k,
                    trace: trace.re,
                    trace_of_power: trace_k.re,
                    printed_rhs: printed.re,
                    delta_trace: (trace - printed).norm(),
                    delta_trace_of_power: (trace_k - printed).norm(),
                    shifted_rhs: shifted.re,
                    delta_shifted: (trace_k - shifted).norm(),
                });
            }
        }
    }
    let max = |f: fn(&TraceRow) -> f64| rows.iter().map(f).fold(0.0, f64::max);
    Ok(Lemma1Report {
        max_delta_trace: max(|r| r.delta_trace),
        max_delta_trace_of_power: max(|r| r.delta_trace_of_power),
        max_delta_shifted: max(|r| r.delta_shifted),
        rows,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct HamiltonCayleyResult {
    pub residual: f64,
    pub pass: bool,
}

/// Scaled residual of the characteristic polynomial evaluated at `M`.
pub fn hamilton_cayley_check(m: &MixedHessian) -> HamiltonCayleyResult {
    let residual = characteristic_residual(m, &minor_sums(m));
    HamiltonCayleyResult {
        residual,
        pass: residual < HAMILTON_CAYLEY_TOL,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HamiltonCayleyReport {
    pub matrices: usize,
    pub max_residual: f64,
    pub pass: bool,
}

/// Hamilton–Cayley over the Hessians of both functions at every point.
pub fn hamilton_cayley_pair(s: &SolutionPair, points: &[Assignment]) -> Result<HamiltonCayleyReport> {
    let (hv, hw) = s.hessians();
    let mut max_residual: f64 = 0.0;
    let mut matrices = 0;
    for p in points {
        for h in [&hv, &hw] {
            max_residual = max_residual.max(hamilton_cayley_check(&h.at(p)?).residual);
            matrices += 1;
        }
    }
    Ok(HamiltonCayleyReport {
        matrices,
        max_residual,
        pass: max_residual < HAMILTON_CAYLEY_TOL,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn hamilton_cayley_on_diagonal() {
        let m = MixedHessian::from_real(&[
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let r = hamilton_cayley_check(&m);
        assert!(r.pass && r.residual < 1e-15);
    }

    #[test]
    fn non_solution_is_skipped() {
        let pair = AnsatzPair::new(parse("x0^2 - x1^2", 3).unwrap(), parse("x0 - x1", 3).unwrap(), 3).unwrap();
        let s = SolutionPair {
            name: "not-null".into(),
            pair,
            system: PairSystem::Hyperbolic,
            h: Expr::int(2),
            big_v: Expr::zero(),
            big_w: Expr::zero(),
            phi: None,
            psi: None,
            loci: vec![],
        };
        let (pts, _) = s.sample(&SampleConfig::default());
        assert!(matches!(lemma2_check(&s, &pts), Err(Error::Precondition(_))));
    }
}
