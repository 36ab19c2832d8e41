//! Independent oracles shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use wavereduce::expr::{Assignment, Expr};

/// Determinant by permutation expansion.
pub fn permutation_det(m: &DMatrix<Complex64>, idx: &[usize]) -> Complex64 {
    fn go(m: &DMatrix<Complex64>, idx: &[usize], row: usize, used: &mut Vec<bool>, sign: f64) -> Complex64 {
        if row == idx.len() {
            return Complex64::new(sign, 0.0);
        }
        let mut acc = Complex64::new(0.0, 0.0);
        let mut inversions_seen = 0;
        for c in 0..idx.len() {
            if used[c] {
                continue;
            }
            // Sign flips once per unused column skipped.
            let s = if inversions_seen % 2 == 0 { sign } else { -sign };
            inversions_seen += 1;
            let entry = m[(idx[row], idx[c])];
            if entry == Complex64::new(0.0, 0.0) {
                continue;
            }
            used[c] = true;
            acc += entry * go(m, idx, row + 1, used, s);
            used[c] = false;
        }
        acc
    }
    go(m, idx, 0, &mut vec![false; idx.len()], 1.0)
}

/// Sums of all k×k principal minors, k = 1..=dim, by enumerating subsets.
pub fn brute_force_minor_sums(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let dim = m.nrows();
    let mut sums = vec![Complex64::new(0.0, 0.0); dim];
    for mask in 1u32..(1 << dim) {
        let idx: Vec<usize> = (0..dim).filter(|i| mask & (1 << i) != 0).collect();
        sums[idx.len() - 1] += permutation_det(m, &idx);
    }
    sums
}

/// Second-order central difference of a first derivative.
pub fn central_first(e: &Expr, p: &Assignment, mu: usize, h: f64) -> f64 {
    let f = |d: f64| e.evaluate_real(&p.shifted(mu, d)).unwrap();
    (f(h) - f(-h)) / (2.0 * h)
}

/// Second-order central difference of `∂_μ∂_ν e`.
pub fn central_second(e: &Expr, p: &Assignment, mu: usize, nu: usize, h: f64) -> f64 {
    let f = |a: f64, b: f64| e.evaluate_real(&p.shifted(mu, a).shifted(nu, b)).unwrap();
    (f(h, h) - f(h, -h) - f(-h, h) + f(-h, -h)) / (4.0 * h * h)
}

/// `□e` from second-order central differences.
pub fn central_box(e: &Expr, p: &Assignment, h: f64) -> f64 {
    (0..p.vars.len())
        .map(|mu| {
            let g = if mu == 0 { 1.0 } else { -1.0 };
            g * central_second(e, p, mu, mu, h)
        })
        .sum()
}

/// `∂u·∂u` with the Minkowski metric, by central differences.
pub fn central_gradient_square(e: &Expr, p: &Assignment, h: f64) -> f64 {
    (0..p.vars.len())
        .map(|mu| {
            let g = if mu == 0 { 1.0 } else { -1.0 };
            g * central_first(e, p, mu, h).powi(2)
        })
        .sum()
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}
