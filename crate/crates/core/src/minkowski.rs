//! Minkowski-space operators on expressions in `x0..xn` with metric
//! `g = diag(1, -1, ..., -1)`.
//!
//! Matrix quantities use the real mixed Hessian `M = g·H` (`H` the ordinary
//! Hessian). Its trace is the d'Alembertian, and its powers, principal
//! minors and characteristic polynomial carry the same contracted
//! invariants as the complexified-coordinate convention.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::expr::{Assignment, EvalError, Expr};

/// Metric signature entry `g^{μμ}`.
pub fn metric(mu: usize) -> f64 {
    if mu == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn gradient(e: &Expr, n: usize) -> Vec<Expr> {
    (0..=n).map(|mu| e.differentiate(mu)).collect()
}

/// `∂₀e1·∂₀e2 − Σ_a ∂_a e1·∂_a e2`.
pub fn minkowski_dot(e1: &Expr, e2: &Expr, n: usize) -> Expr {
    let g1 = gradient(e1, n);
    let g2 = gradient(e2, n);
    let mut acc = &g1[0] * &g2[0];
    for mu in 1..=n {
        acc = acc - &g1[mu] * &g2[mu];
    }
    acc.simplify()
}

/// `□e = ∂²₀e − Σ_a ∂²_a e`.
pub fn dalembertian(e: &Expr, n: usize) -> Expr {
    let mut acc = e.differentiate(0).differentiate(0);
    for a in 1..=n {
        acc = acc - e.differentiate(a).differentiate(a);
    }
    acc.simplify()
}

/// Symbolic second derivatives of one expression, reusable across points.
#[derive(Clone, Debug)]
pub struct HessianExprs {
    n: usize,
    second: Vec<Vec<Expr>>,
}

impl HessianExprs {
    pub fn new(e: &Expr, n: usize) -> HessianExprs {
        let first = gradient(e, n);
        let second = (0..=n)
            .map(|rho| (0..=n).map(|nu| first[nu].differentiate(rho)).collect())
            .collect();
        HessianExprs { n, second }
    }

    /// `M^μ_ν = g^{μμ} ∂_μ∂_ν e` at the point.
    pub fn at(&self, point: &Assignment) -> Result<MixedHessian, EvalError> {
        let dim = self.n + 1;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for mu in 0..dim {
            for nu in 0..dim {
                m[(mu, nu)] = self.second[mu][nu].evaluate(point)? * metric(mu);
            }
        }
        Ok(MixedHessian { matrix: m })
    }
}

/// Metric-raised Hessian `g·H` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedHessian {
    pub matrix: DMatrix<Complex64>,
}

pub fn mixed_hessian(e: &Expr, point: &Assignment) -> Result<MixedHessian, EvalError> {
    HessianExprs::new(e, point.dimension()).at(point)
}

impl MixedHessian {
    pub fn from_real(rows: &[&[f64]]) -> MixedHessian {
        let dim = rows.len();
        MixedHessian {
            matrix: DMatrix::from_fn(dim, dim, |i, j| Complex64::new(rows[i][j], 0.0)),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    pub fn is_real(&self) -> bool {
        self.matrix.iter().all(|z| z.im == 0.0)
    }

    /// Maximum absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        norm_inf(&self.matrix)
    }

    pub fn power(&self, k: u32) -> DMatrix<Complex64> {
        let dim = self.dim();
        let mut acc = DMatrix::<Complex64>::identity(dim, dim);
        for _ in 0..k {
            acc = &acc * &self.matrix;
        }
        acc
    }

    /// Eigenvalues of a real matrix (`None` for genuinely complex input).
    pub fn eigenvalues(&self) -> Option<Vec<Complex64>> {
        if !self.is_real() {
            return None;
        }
        let real = self.matrix.map(|z| z.re);
        Some(
            real.complex_eigenvalues()
                .iter()
                .map(|z| Complex64::new(z.re, z.im))
                .collect(),
        )
    }
}

pub(crate) fn norm_inf(m: &DMatrix<Complex64>) -> f64 {
    m.row_iter()
        .map(|row| row.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Sums of principal minors `M_1..M_N` (`N` the matrix size) and the
/// determinant `M_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct MinorSums {
    /// `sums[k-1] = M_k`.
    pub sums: Vec<Complex64>,
    pub det: Complex64,
}

impl MinorSums {
    /// `M_k` with `M_0 = 1` and `M_k = 0` beyond the matrix size.
    pub fn get(&self, k: usize) -> Complex64 {
        match k {
            0 => Complex64::new(1.0, 0.0),
            k if k <= self.sums.len() => self.sums[k - 1],
            _ => Complex64::new(0.0, 0.0),
        }
    }

    /// Largest deviation from the elementary symmetric polynomials of the
    /// eigenvalues, scaled by `max(1, ‖M‖^k)`. `None` for complex matrices.
    pub fn eigen_discrepancy(&self, m: &MixedHessian) -> Option<f64> {
        let eig = m.eigenvalues()?;
        let sym = elementary_symmetric(&eig);
        let norm = m.norm_inf();
        Some(
            (1..=self.sums.len())
                .map(|k| {
                    let scale = norm.powi(k as i32).max(1.0);
                    (self.get(k) - sym[k]).norm() / scale
                })
                .fold(0.0, f64::max),
        )
    }
}

/// `e_0..e_N` of the given values.
pub fn elementary_symmetric(values: &[Complex64]) -> Vec<Complex64> {
    let mut e = vec![Complex64::new(0.0, 0.0); values.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, &v) in values.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            e[k] = e[k] + e[k - 1] * v;
        }
    }
    e
}

/// Principal-minor sums by the Faddeev–LeVerrier recurrence.
pub fn minor_sums(m: &MixedHessian) -> MinorSums {
    let a = &m.matrix;
    let dim = a.nrows();
    let identity = DMatrix::<Complex64>::identity(dim, dim);
    // Characteristic polynomial det(λI − A) = Σ c_j λ^j with c_dim = 1.
    let mut coeffs = vec![Complex64::new(0.0, 0.0); dim + 1];
    coeffs[dim] = Complex64::new(1.0, 0.0);
    let mut aux = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 1..=dim {
        aux = a * &aux + &identity * coeffs[dim - k + 1];
        coeffs[dim - k] = -(a * &aux).trace() / k as f64;
    }
    // M_k = (−1)^k c_{dim−k}.
    let sums: Vec<Complex64> = (1..=dim)
        .map(|k| coeffs[dim - k] * if k % 2 == 0 { 1.0 } else { -1.0 })
        .collect();
    let det = *sums.last().unwrap_or(&Complex64::new(1.0, 0.0));
    MinorSums { sums, det }
}

/// `‖Σ_{k=0}^{N} (−1)^k M_k A^{N−k}‖_∞ / (1 + ‖A‖_∞^N)`: the scaled
/// residual of the characteristic polynomial evaluated at the matrix.
pub fn characteristic_residual(m: &MixedHessian, sums: &MinorSums) -> f64 {
    let dim = m.dim();
    let mut acc = DMatrix::<Complex64>::zeros(dim, dim);
    for k in 0..=dim {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        acc += m.power((dim - k) as u32) * (sums.get(k) * sign);
    }
    norm_inf(&acc) / (1.0 + m.norm_inf().powi(dim as i32))
}

/// Four vectors `a, b, c, d` in `R^{n+1}` parameterising linear forms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    pub n: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

/// Outcome of one frame condition.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameCheck {
    pub condition: String,
    pub expected: f64,
    pub actual: f64,
    pub residual: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub checks: Vec<FrameCheck>,
    pub pass: bool,
}

pub const FRAME_TOL: f64 = 1e-12;

/// Minkowski inner product of two numeric vectors.
pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter()
        .zip(v)
        .enumerate()
        .map(|(mu, (x, y))| metric(mu) * x * y)
        .sum()
}

impl Frame {
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: Vec<f64>) -> Result<Frame> {
        let n = a.len().checked_sub(1).ok_or_else(|| {
            Error::InvalidFrame("frame vectors must be non-empty".into())
        })?;
        if [&b, &c, &d].iter().any(|v| v.len() != n + 1) {
            return Err(Error::InvalidFrame(
                "frame vectors must have equal length".into(),
            ));
        }
        Ok(Frame { n, a, b, c, d })
    }

    /// `a = e0, b = e1, c = e2, d = e3` in dimension `n >= 3`.
    pub fn standard(n: usize) -> Frame {
        assert!(n >= 3, "a frame needs at least three space dimensions");
        let unit = |i: usize| (0..=n).map(|j| if i == j { 1.0 } else { 0.0 }).collect();
        Frame {
            n,
            a: unit(0),
            b: unit(1),
            c: unit(2),
            d: unit(3),
        }
    }

    /// Boost of the standard frame in the `x0–x1` plane with rapidity `t`.
    pub fn boosted(t: f64) -> Frame {
        let mut f = Frame::standard(3);
        f.a = vec![t.cosh(), t.sinh(), 0.0, 0.0];
        f.b = vec![t.sinh(), t.cosh(), 0.0, 0.0];
        f
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Frame> {
        if rows.len() != 4 {
            return Err(Error::InvalidFrame(format!(
                "expected 4 rows, found {}",
                rows.len()
            )));
        }
        Frame::new(
            rows[0].clone(),
            rows[1].clone(),
            rows[2].clone(),
            rows[3].clone(),
        )
    }

    pub fn rows(&self) -> [&[f64]; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    /// Four lines of whitespace-separated decimals.
    pub fn to_text(&self) -> String {
        self.rows()
            .iter()
            .map(|r| {
                r.iter()
                    .map(|v| format!("{v:?}"))
                    .collect::<Vec<_>>()
                    .join(" ")
            })
            .collect::<Vec<_>>()
            .join("\n")
    }

    pub fn from_text(text: &str) -> Result<Frame> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| {
                        t.parse::<f64>()
                            .map_err(|_| Error::InvalidFrame(format!("bad number `{t}`")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Frame::from_rows(&rows)
    }

    /// Linear form `Σ v_μ x_μ` with the row's components as coefficients.
    pub fn form(v: &[f64]) -> Expr {
        let mut acc: Option<Expr> = None;
        for (mu, &c) in v.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let term = if c == 1.0 {
                Expr::var(mu)
            } else {
                Expr::real(c) * Expr::var(mu)
            };
            acc = Some(match acc {
                None => term,
                Some(a) => a + term,
            });
        }
        acc.unwrap_or_else(Expr::zero)
    }

    /// Parameter bindings `a0..an, b0.., c0.., d0..` for spec files that
    /// reference frame components by name.
    pub fn bindings(&self) -> Vec<(String, Expr)> {
        let mut out = Vec::new();
        for (name, row) in ["a", "b", "c", "d"].iter().zip(self.rows()) {
            for (mu, &v) in row.iter().enumerate() {
                out.push((format!("{name}{mu}"), Expr::real(v)));
            }
        }
        out
    }

    pub fn validate(&self) -> FrameReport {
        validate_frame(self)
    }
}

/// Checks the ten conditions `a² = 1, b² = c² = d² = −1` and pairwise
/// orthogonality, each to `FRAME_TOL`.
pub fn validate_frame(f: &Frame) -> FrameReport {
    let named = [("a", &f.a), ("b", &f.b), ("c", &f.c), ("d", &f.d)];
    let mut checks = Vec::new();
    for (i, (name, v)) in named.iter().enumerate() {
        let expected = if i == 0 { 1.0 } else { -1.0 };
        checks.push(check(format!("{name}{name}"), expected, dot(v, v)));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            let (ni, vi) = named[i];
            let (nj, vj) = named[j];
            checks.push(check(format!("{ni}{nj}"), 0.0, dot(vi, vj)));
        }
    }
    let pass = checks.iter().all(|c| c.pass);
    FrameReport { checks, pass }
}

fn check(condition: String, expected: f64, actual: f64) -> FrameCheck {
    let residual = (actual - expected).abs();
    FrameCheck {
        condition,
        expected,
        actual,
        residual,
        pass: residual <= FRAME_TOL,
    }
}

const FRAME_ATTEMPTS: usize = 1000;
/// Minimum |u·u| accepted for a Gram–Schmidt pivot.
const PIVOT_MIN: f64 = 0.05;

/// Random Minkowski-orthonormal frame for `n = 3`, deterministic per seed.
pub fn random_frame(n: usize, seed: u64) -> Result<Frame> {
    if n != 3 {
        return Err(Error::InvalidInput(format!(
            "random frames are generated for n = 3 only (got n = {n})"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..FRAME_ATTEMPTS {
        if let Some(f) = try_frame(&mut rng) {
            if validate_frame(&f).pass {
                return Ok(f);
            }
        }
    }
    Err(Error::FrameGeneration {
        attempts: FRAME_ATTEMPTS,
    })
}

fn try_frame(rng: &mut ChaCha8Rng) -> Option<Frame> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(4);
    for i in 0..4 {
        let mut u: Vec<f64> = (0..4).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for e in &basis {
            let coef = dot(&u, e) / dot(e, e);
            for (x, y) in u.iter_mut().zip(e) {
                *x -= coef * y;
            }
        }
        let sq = dot(&u, &u);
        let want_timelike = i == 0;
        if (want_timelike && sq < PIVOT_MIN) || (!want_timelike && sq > -PIVOT_MIN) {
            return None;
        }
        let scale = sq.abs().sqrt();
        u.iter_mut().for_each(|x| *x /= scale);
        basis.push(u);
    }
    // One re-orthogonalisation pass tightens rounding to the 1e-12 gate.
    for i in 1..4 {
        for j in 0..i {
            let coef = dot(&basis[i], &basis[j]) / dot(&basis[j], &basis[j]);
            let e = basis[j].clone();
            for (x, y) in basis[i].iter_mut().zip(&e) {
                *x -= coef * y;
            }
        }
        let scale = dot(&basis[i], &basis[i]).abs().sqrt();
        basis[i].iter_mut().for_each(|x| *x /= scale);
    }
    let mut it = basis.into_iter();
    Some(Frame {
        n: 3,
        a: it.next()?,
        b: it.next()?,
        c: it.next()?,
        d: it.next()?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn p(text: &str) -> Expr {
        parse(text, 3).unwrap()
    }

    #[test]
    fn dot_of_timelike_form_is_one() {
        let f = Frame::standard(3);
        let ax = Frame::form(&f.a);
        assert!(minkowski_dot(&ax, &ax, 3).is_one());
    }

    #[test]
    fn null_pair_cross_term() {
        let e = minkowski_dot(&p("x0 + x1"), &p("x0 - x1"), 3);
        assert_eq!(e, Expr::int(2));
    }

    #[test]
    fn outgoing_null_coordinate() {
        let v = p("x0 - sqrt(x1^2 + x2^2 + x3^2)");
        let e = minkowski_dot(&v, &v, 3);
        let mut s = crate::sample::Sampler::new(3, 4, (-2.0, 2.0));
        for _ in 0..20 {
            let a = Assignment::real(&s.point());
            assert!(e.evaluate(&a).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn dalembertian_examples() {
        assert_eq!(dalembertian(&p("x0^2 - x1^2"), 3), Expr::int(4));
        assert!(dalembertian(&p("3*x0 - 2*x1 + x3"), 3).is_zero());
        let root = dalembertian(&p("sqrt(x0^2 - x1^2 - x2^2 - x3^2)"), 3);
        let v = root.evaluate(&Assignment::real(&[2.0, 1.0, 1.0, 1.0])).unwrap();
        assert!((v.re - 3.0).abs() < 1e-12);
    }

    #[test]
    fn hessian_of_quadratic() {
        let m = mixed_hessian(&p("x0^2 - x1^2"), &Assignment::real(&[0.3, 0.1, 0.0, 0.0])).unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m.matrix[(i, i)].re).collect();
        assert_eq!(diag, vec![2.0, 2.0, 0.0, 0.0]);
        assert_eq!(m.trace().re, 4.0);
    }

    #[test]
    fn hessian_of_linear_is_zero() {
        let m = mixed_hessian(&p("x0 + 2*x2"), &Assignment::real(&[0.3, 0.1, 0.0, 0.0])).unwrap();
        assert!(m.matrix.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn null_cone_hessian_spectrum() {
        let m = mixed_hessian(
            &p("x0 - sqrt(x1^2 + x2^2 + x3^2)"),
            &Assignment::real(&[0.0, 3.0, 0.0, 0.0]),
        )
        .unwrap();
        let mut eig: Vec<f64> = m.eigenvalues().unwrap().iter().map(|z| z.re).collect();
        eig.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [0.0, 0.0, 1.0 / 3.0, 1.0 / 3.0];
        for (a, b) in eig.iter().zip(expected) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn minor_sums_of_diagonal() {
        let m = MixedHessian::from_real(&[
            &[2.0, 0.0, 0.0, 0.0],
            &[0.0, 2.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
            &[0.0, 0.0, 0.0, 0.0],
        ]);
        let s = minor_sums(&m);
        let re: Vec<f64> = s.sums.iter().map(|z| z.re).collect();
        assert_eq!(re, vec![4.0, 4.0, 0.0, 0.0]);
        assert_eq!(s.det.re, 0.0);
        assert!(characteristic_residual(&m, &s) < 1e-15);
        assert!(s.eigen_discrepancy(&m).unwrap() < 1e-12);
    }

    #[test]
    fn minor_sums_of_zero_matrix() {
        let m = MixedHessian::from_real(&[&[0.0; 3], &[0.0; 3], &[0.0; 3]]);
        let s = minor_sums(&m);
        assert!(s.sums.iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn standard_and_boosted_frames_validate() {
        assert!(validate_frame(&Frame::standard(3)).pass);
        assert!(validate_frame(&Frame::boosted(0.7)).pass);
    }

    #[test]
    fn broken_frame_reports_condition() {
        let f = Frame::new(
            vec![1.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let r = validate_frame(&f);
        assert!(!r.pass);
        let ad = r.checks.iter().find(|c| c.condition == "ad").unwrap();
        assert!(!ad.pass);
        assert_eq!(ad.actual, 1.0);
    }

    #[test]
    fn random_frames_are_valid_and_seeded() {
        let f1 = random_frame(3, 1).unwrap();
        assert!(validate_frame(&f1).pass);
        assert_eq!(f1, random_frame(3, 1).unwrap());
        let f2 = random_frame(3, 2).unwrap();
        assert_ne!(f1.a[0], f2.a[0]);
        assert!(random_frame(4, 1).is_err());
    }

    #[test]
    fn frame_text_round_trip() {
        let f = random_frame(3, 5).unwrap();
        assert_eq!(Frame::from_text(&f.to_text()).unwrap(), f);
    }
}
