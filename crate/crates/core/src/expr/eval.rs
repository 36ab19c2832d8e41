use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use super::number::powi_complex;
use super::{Expr, Func, Node};

/// Numeric values for the variables and named parameters of an expression.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Assignment {
    pub vars: Vec<Complex64>,
    pub params: BTreeMap<String, Complex64>,
}

impl Assignment {
    pub fn new(vars: Vec<Complex64>) -> Assignment {
        Assignment {
            vars,
            params: BTreeMap::new(),
        }
    }

    pub fn real(vars: &[f64]) -> Assignment {
        Assignment::new(vars.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn with_param(mut self, name: impl Into<String>, value: f64) -> Assignment {
        self.params.insert(name.into(), Complex64::new(value, 0.0));
        self
    }

    pub fn with_params(mut self, params: &BTreeMap<String, Complex64>) -> Assignment {
        self.params
            .extend(params.iter().map(|(k, v)| (k.clone(), *v)));
        self
    }

    /// Dimension `n` for an assignment over `x0..xn`.
    pub fn dimension(&self) -> usize {
        self.vars.len().saturating_sub(1)
    }

    /// Copy with variable `index` shifted by `delta`.
    pub fn shifted(&self, index: usize, delta: f64) -> Assignment {
        let mut out = self.clone();
        out.vars[index] += delta;
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    Domain(&'static str),
    UnboundVariable(usize),
    UnboundParameter(String),
    NonReal,
    NonFinite,
}

/// Evaluation failure together with the offending subtree.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subtree: String,
}

impl EvalError {
    pub(crate) fn new(kind: EvalErrorKind, at: &Expr) -> EvalError {
        EvalError {
            kind,
            subtree: at.to_string(),
        }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            EvalErrorKind::DivisionByZero => write!(f, "division by zero in `{}`", self.subtree),
            EvalErrorKind::Domain(func) => {
                write!(f, "{func} outside its real domain in `{}`", self.subtree)
            }
            EvalErrorKind::UnboundVariable(i) => {
                write!(f, "no value for variable #{i} in `{}`", self.subtree)
            }
            EvalErrorKind::UnboundParameter(p) => {
                write!(f, "no value for parameter `{p}` in `{}`", self.subtree)
            }
            EvalErrorKind::NonReal => write!(f, "non-real value of `{}`", self.subtree),
            EvalErrorKind::NonFinite => write!(f, "non-finite value of `{}`", self.subtree),
        }
    }
}

fn is_real(z: Complex64) -> bool {
    z.im == 0.0
}

pub(crate) fn evaluate(e: &Expr, a: &Assignment) -> Result<Complex64, EvalError> {
    let v = eval_node(e, a)?;
    if !(v.re.is_finite() && v.im.is_finite()) {
        return Err(EvalError::new(EvalErrorKind::NonFinite, e));
    }
    Ok(v)
}

fn eval_node(e: &Expr, a: &Assignment) -> Result<Complex64, EvalError> {
    Ok(match e.node() {
        Node::Num(n) => n.to_complex(),
        Node::Var(i) => *a
            .vars
            .get(*i)
            .ok_or_else(|| EvalError::new(EvalErrorKind::UnboundVariable(*i), e))?,
        Node::Param(p) => match p.as_str() {
            "pi" if !a.params.contains_key("pi") => Complex64::new(std::f64::consts::PI, 0.0),
            _ => *a
                .params
                .get(p)
                .ok_or_else(|| EvalError::new(EvalErrorKind::UnboundParameter(p.clone()), e))?,
        },
        Node::Neg(x) => -eval_node(x, a)?,
        Node::Add(x, y) => eval_node(x, a)? + eval_node(y, a)?,
        Node::Sub(x, y) => eval_node(x, a)? - eval_node(y, a)?,
        Node::Mul(x, y) => eval_node(x, a)? * eval_node(y, a)?,
        Node::Div(x, y) => {
            let num = eval_node(x, a)?;
            let den = eval_node(y, a)?;
            if den.re == 0.0 && den.im == 0.0 {
                return Err(EvalError::new(EvalErrorKind::DivisionByZero, e));
            }
            if is_real(num) && is_real(den) {
                Complex64::new(num.re / den.re, 0.0)
            } else {
                num / den
            }
        }
        Node::Pow(base, exponent) => {
            let b = eval_node(base, a)?;
            let p = match exponent.node() {
                Node::Num(n) => n.to_complex(),
                _ => eval_node(exponent, a)?,
            };
            if p.im == 0.0 && p.re.fract() == 0.0 && p.re.abs() < 1e9 {
                let k = p.re as i64;
                if k < 0 && b.re == 0.0 && b.im == 0.0 {
                    return Err(EvalError::new(EvalErrorKind::DivisionByZero, e));
                }
                powi_complex(b, k)
            } else {
                general_pow(e, b, p)?
            }
        }
        Node::Call(f, x) => {
            let z = eval_node(x, a)?;
            apply(*f, z, e)?
        }
    })
}

fn general_pow(e: &Expr, b: Complex64, p: Complex64) -> Result<Complex64, EvalError> {
    if b.re == 0.0 && b.im == 0.0 {
        return if p.re > 0.0 {
            Ok(Complex64::new(0.0, 0.0))
        } else {
            Err(EvalError::new(EvalErrorKind::DivisionByZero, e))
        };
    }
    if is_real(b) && b.re < 0.0 {
        return Err(EvalError::new(EvalErrorKind::Domain("power"), e));
    }
    if is_real(b) && is_real(p) {
        return Ok(Complex64::new(b.re.powf(p.re), 0.0));
    }
    Ok((p * b.ln()).exp())
}

fn apply(f: Func, z: Complex64, at: &Expr) -> Result<Complex64, EvalError> {
    let real = is_real(z);
    Ok(match f {
        Func::Sqrt => {
            if real {
                if z.re < 0.0 {
                    return Err(EvalError::new(EvalErrorKind::Domain("sqrt"), at));
                }
                Complex64::new(z.re.sqrt(), 0.0)
            } else {
                z.sqrt()
            }
        }
        Func::Exp => {
            if real {
                Complex64::new(z.re.exp(), 0.0)
            } else {
                z.exp()
            }
        }
        Func::Ln => {
            if real {
                if z.re <= 0.0 {
                    return Err(EvalError::new(EvalErrorKind::Domain("ln"), at));
                }
                Complex64::new(z.re.ln(), 0.0)
            } else {
                z.ln()
            }
        }
        Func::Sin => {
            if real {
                Complex64::new(z.re.sin(), 0.0)
            } else {
                z.sin()
            }
        }
        Func::Cos => {
            if real {
                Complex64::new(z.re.cos(), 0.0)
            } else {
                z.cos()
            }
        }
        Func::Arctan => {
            if real {
                Complex64::new(z.re.atan(), 0.0)
            } else {
                z.atan()
            }
        }
    })
}

pub(crate) fn singular_margin(e: &Expr, a: &Assignment) -> f64 {
    let mut margin = f64::INFINITY;
    if collect_margin(e, a, &mut margin).is_err() {
        return 0.0;
    }
    margin
}

fn collect_margin(e: &Expr, a: &Assignment, margin: &mut f64) -> Result<(), EvalError> {
    let mut watch = |x: &Expr| -> Result<(), EvalError> {
        let v = eval_node(x, a)?;
        *margin = margin.min(v.norm());
        Ok(())
    };
    match e.node() {
        Node::Div(_, den) => watch(den)?,
        Node::Call(Func::Ln | Func::Sqrt, arg) => watch(arg)?,
        Node::Pow(base, exponent) => {
            let nonnegative_integer = match exponent.node() {
                Node::Num(n) => n.as_integer().is_some_and(|k| k >= 0),
                _ => false,
            };
            if !nonnegative_integer {
                watch(base)?;
            }
        }
        _ => {}
    }
    for c in e.children() {
        collect_margin(c, a, margin)?;
    }
    evaluate(e, a).map(|_| ())
}
