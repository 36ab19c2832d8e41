//! Fourth-order central finite differences, used as an oracle independent
//! of the symbolic differentiator.

use num_complex::Complex64;

use crate::expr::{Assignment, EvalError, Expr};
use crate::minkowski::metric;

pub const DEFAULT_STEP: f64 = 1e-3;

/// `∂²f/∂x_μ²` by the five-point stencil
/// `(−f₊₂ + 16f₊₁ − 30f₀ + 16f₋₁ − f₋₂) / 12h²`.
pub fn second_derivative(
    e: &Expr,
    point: &Assignment,
    mu: usize,
    step: f64,
) -> Result<Complex64, EvalError> {
    let f = |k: f64| e.evaluate(&point.shifted(mu, k * step));
    let sum = -f(2.0)? + f(1.0)? * 16.0 - f(0.0)? * 30.0 + f(-1.0)? * 16.0 - f(-2.0)?;
    Ok(sum / (12.0 * step * step))
}

/// `∂f/∂x_μ` by the four-point stencil `(−f₊₂ + 8f₊₁ − 8f₋₁ + f₋₂) / 12h`.
pub fn first_derivative(
    e: &Expr,
    point: &Assignment,
    mu: usize,
    step: f64,
) -> Result<Complex64, EvalError> {
    let f = |k: f64| e.evaluate(&point.shifted(mu, k * step));
    let sum = -f(2.0)? + f(1.0)? * 8.0 - f(-1.0)? * 8.0 + f(-2.0)?;
    Ok(sum / (12.0 * step))
}

/// `□f` at a point over all coordinates of the assignment.
pub fn dalembertian(e: &Expr, point: &Assignment, step: f64) -> Result<Complex64, EvalError> {
    let mut acc = Complex64::new(0.0, 0.0);
    for mu in 0..point.vars.len() {
        acc += second_derivative(e, point, mu, step)? * metric(mu);
    }
    Ok(acc)
}

/// `□f` at steps `h` and `h/2` with the Richardson-extrapolated value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Richardson {
    pub coarse: Complex64,
    pub fine: Complex64,
    pub extrapolated: Complex64,
    /// `|coarse − fine|`: estimate of the truncation error at the coarse step.
    pub error_estimate: f64,
}

pub fn dalembertian_richardson(
    e: &Expr,
    point: &Assignment,
    step: f64,
) -> Result<Richardson, EvalError> {
    let coarse = dalembertian(e, point, step)?;
    let fine = dalembertian(e, point, step / 2.0)?;
    Ok(Richardson {
        coarse,
        fine,
        extrapolated: (fine * 16.0 - coarse) / 15.0,
        error_estimate: (coarse - fine).norm(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    #[test]
    fn quadratic_is_exact() {
        let e = parse("x0^2 - 3*x1^2", 1).unwrap();
        let v = dalembertian(&e, &Assignment::real(&[0.4, -0.2]), 1e-3).unwrap();
        assert!((v.re - 8.0).abs() < 1e-6);
    }

    #[test]
    fn first_derivative_of_sine() {
        let e = parse("sin(x0)", 0).unwrap();
        let v = first_derivative(&e, &Assignment::real(&[0.3]), 0, 1e-3).unwrap();
        assert!((v.re - 0.3f64.cos()).abs() < 1e-11);
    }
}
