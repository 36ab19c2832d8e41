//! Immutable scalar expression trees.
//!
//! Constants are kept as exact rationals whenever possible so that repeated
//! differentiation of polynomials folds to a literal zero. Floating point
//! only enters at evaluation time (or through constants that cannot be
//! represented exactly, such as frame components produced numerically).

mod diff;
mod eval;
mod number;
mod parse;
mod print;
mod simplify;
mod symbols;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

pub use eval::{Assignment, EvalError, EvalErrorKind};
pub use number::Number;
pub use parse::{parse, parse_with, ParseError, ParseErrorKind};
pub use print::Display;
pub use symbols::Symbols;

use num_complex::Complex64;
use num_rational::Rational64;

/// Elementary functions understood by the parser, evaluator and
/// differentiator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Func {
    Sqrt,
    Exp,
    Ln,
    Sin,
    Cos,
    Arctan,
}

impl Func {
    pub const ALL: [Func; 6] = [
        Func::Sqrt,
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Arctan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Arctan => "arctan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Node {
    Num(Number),
    Var(usize),
    Param(String),
    Neg(Expr),
    Add(Expr, Expr),
    Sub(Expr, Expr),
    Mul(Expr, Expr),
    Div(Expr, Expr),
    Pow(Expr, Expr),
    Call(Func, Expr),
}

/// Shared, immutable expression tree.
#[derive(Clone)]
pub struct Expr(Arc<Node>);

impl PartialEq for Expr {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

impl fmt::Debug for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(&*self.0, f)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_expr(f, self, &Symbols::Coordinates)
    }
}

impl Expr {
    pub fn new(node: Node) -> Expr {
        Expr(Arc::new(node))
    }

    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn num(n: Number) -> Expr {
        Expr::new(Node::Num(n))
    }

    pub fn int(v: i64) -> Expr {
        Expr::num(Number::Exact(Rational64::from_integer(v)))
    }

    pub fn rational(numer: i64, denom: i64) -> Expr {
        Expr::num(Number::Exact(Rational64::new(numer, denom)))
    }

    /// A real constant; kept exact when the value is a small integer or a
    /// dyadic fraction that fits a 64-bit rational.
    pub fn real(v: f64) -> Expr {
        Expr::num(Number::from_f64(v))
    }

    pub fn complex(re: f64, im: f64) -> Expr {
        Expr::num(Number::Inexact(Complex64::new(re, im)))
    }

    pub fn zero() -> Expr {
        Expr::int(0)
    }

    pub fn one() -> Expr {
        Expr::int(1)
    }

    pub fn var(index: usize) -> Expr {
        Expr::new(Node::Var(index))
    }

    pub fn param(name: impl Into<String>) -> Expr {
        Expr::new(Node::Param(name.into()))
    }

    pub fn call(f: Func, arg: Expr) -> Expr {
        Expr::new(Node::Call(f, arg))
    }

    pub fn pow(&self, exponent: Expr) -> Expr {
        Expr::new(Node::Pow(self.clone(), exponent))
    }

    pub fn powi(&self, k: i64) -> Expr {
        self.pow(Expr::int(k))
    }

    pub fn sqrt(&self) -> Expr {
        Expr::call(Func::Sqrt, self.clone())
    }

    pub fn exp(&self) -> Expr {
        Expr::call(Func::Exp, self.clone())
    }

    pub fn ln(&self) -> Expr {
        Expr::call(Func::Ln, self.clone())
    }

    pub fn sin(&self) -> Expr {
        Expr::call(Func::Sin, self.clone())
    }

    pub fn cos(&self) -> Expr {
        Expr::call(Func::Cos, self.clone())
    }

    pub fn arctan(&self) -> Expr {
        Expr::call(Func::Arctan, self.clone())
    }

    pub fn as_number(&self) -> Option<&Number> {
        match self.node() {
            Node::Num(n) => Some(n),
            _ => None,
        }
    }

    /// True only for a literal zero constant (tree-level zero).
    pub fn is_zero(&self) -> bool {
        self.as_number().is_some_and(Number::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.as_number().is_some_and(Number::is_one)
    }

    pub fn children(&self) -> Vec<&Expr> {
        match self.node() {
            Node::Num(_) | Node::Var(_) | Node::Param(_) => vec![],
            Node::Neg(a) | Node::Call(_, a) => vec![a],
            Node::Add(a, b)
            | Node::Sub(a, b)
            | Node::Mul(a, b)
            | Node::Div(a, b)
            | Node::Pow(a, b) => vec![a, b],
        }
    }

    pub fn contains_var(&self, index: usize) -> bool {
        match self.node() {
            Node::Var(i) => *i == index,
            _ => self.children().into_iter().any(|c| c.contains_var(index)),
        }
    }

    /// Largest variable index appearing in the tree.
    pub fn max_var(&self) -> Option<usize> {
        match self.node() {
            Node::Var(i) => Some(*i),
            _ => self.children().into_iter().filter_map(Expr::max_var).max(),
        }
    }

    pub fn params(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        if let Node::Param(p) = self.node() {
            out.insert(p.clone());
        }
        for c in self.children() {
            c.collect_params(out);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self
            .children()
            .into_iter()
            .map(Expr::node_count)
            .sum::<usize>()
    }

    /// Replaces variable `i` by `vars[i]`. Variables without a replacement
    /// are kept. No simplification is performed.
    pub fn substitute(&self, vars: &[Expr]) -> Expr {
        self.map_leaves(&|node| match node {
            Node::Var(i) => vars.get(*i).cloned(),
            _ => None,
        })
    }

    /// Replaces named parameters by expressions.
    pub fn bind_params(&self, values: &[(&str, Expr)]) -> Expr {
        self.map_leaves(&|node| match node {
            Node::Param(p) => values
                .iter()
                .find(|(name, _)| name == p)
                .map(|(_, e)| e.clone()),
            _ => None,
        })
    }

    /// Complex-conjugates every constant. Parameters are taken as real.
    pub fn conjugate_constants(&self) -> Expr {
        self.map_leaves(&|node| match node {
            Node::Num(Number::Inexact(c)) if c.im != 0.0 => {
                Some(Expr::num(Number::Inexact(c.conj())))
            }
            _ => None,
        })
    }

    fn map_leaves(&self, f: &dyn Fn(&Node) -> Option<Expr>) -> Expr {
        if let Some(e) = f(self.node()) {
            return e;
        }
        let rebuild = |n: Node| Expr::new(n);
        match self.node() {
            Node::Num(_) | Node::Var(_) | Node::Param(_) => self.clone(),
            Node::Neg(a) => rebuild(Node::Neg(a.map_leaves(f))),
            Node::Call(func, a) => rebuild(Node::Call(*func, a.map_leaves(f))),
            Node::Add(a, b) => rebuild(Node::Add(a.map_leaves(f), b.map_leaves(f))),
            Node::Sub(a, b) => rebuild(Node::Sub(a.map_leaves(f), b.map_leaves(f))),
            Node::Mul(a, b) => rebuild(Node::Mul(a.map_leaves(f), b.map_leaves(f))),
            Node::Div(a, b) => rebuild(Node::Div(a.map_leaves(f), b.map_leaves(f))),
            Node::Pow(a, b) => rebuild(Node::Pow(a.map_leaves(f), b.map_leaves(f))),
        }
    }

    pub fn differentiate(&self, var: usize) -> Expr {
        diff::differentiate(self, var)
    }

    pub fn simplify(&self) -> Expr {
        simplify::simplify(self)
    }

    pub fn evaluate(&self, a: &Assignment) -> Result<Complex64, EvalError> {
        eval::evaluate(self, a)
    }

    /// Evaluates and requires a real result (imaginary part within 1e-12 of
    /// the magnitude).
    pub fn evaluate_real(&self, a: &Assignment) -> Result<f64, EvalError> {
        let z = self.evaluate(a)?;
        if z.im.abs() > 1e-12 * (1.0 + z.re.abs()) {
            return Err(EvalError::new(EvalErrorKind::NonReal, self));
        }
        Ok(z.re)
    }

    /// Smallest magnitude among the quantities that make this tree singular
    /// (denominators, bases raised to negative powers, logarithm and square
    /// root arguments). Infinite when the tree has none; zero when
    /// evaluation fails.
    pub fn singular_margin(&self, a: &Assignment) -> f64 {
        eval::singular_margin(self, a)
    }

    pub fn display<'a>(&'a self, symbols: &'a Symbols) -> Display<'a> {
        Display::new(self, symbols)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $variant:ident) => {
        impl std::ops::$trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::new(Node::$variant(self, rhs))
            }
        }
        impl std::ops::$trait<&Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::new(Node::$variant(self.clone(), rhs.clone()))
            }
        }
        impl std::ops::$trait<&Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &Expr) -> Expr {
                Expr::new(Node::$variant(self, rhs.clone()))
            }
        }
        impl std::ops::$trait<Expr> for &Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::new(Node::$variant(self.clone(), rhs))
            }
        }
    };
}

binop!(Add, add, Add);
binop!(Sub, sub, Sub);
binop!(Mul, mul, Mul);
binop!(Div, div, Div);

impl std::ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::new(Node::Neg(self))
    }
}

impl std::ops::Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::new(Node::Neg(self.clone()))
    }
}

impl From<i64> for Expr {
    fn from(v: i64) -> Expr {
        Expr::int(v)
    }
}
