use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Node, Number, Symbols};

/// Precedence levels: sums 1, products 2, powers 4, atoms 5. Unary minus
/// binds like a sum when printed as a child but takes a factor operand.
const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const FACTOR: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

/// Display adapter printing an expression with custom variable names.
pub struct Display<'a> {
    expr: &'a Expr,
    symbols: &'a Symbols,
}

impl<'a> Display<'a> {
    pub(crate) fn new(expr: &'a Expr, symbols: &'a Symbols) -> Self {
        Display { expr, symbols }
    }
}

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_expr(f, self.expr, self.symbols)
    }
}

pub(crate) fn write_expr(f: &mut fmt::Formatter<'_>, e: &Expr, symbols: &Symbols) -> fmt::Result {
    write_prec(f, e, symbols, 0)
}

fn precedence(e: &Expr) -> u8 {
    match e.node() {
        Node::Add(..) | Node::Sub(..) | Node::Neg(_) => SUM,
        Node::Mul(..) | Node::Div(..) => PRODUCT,
        Node::Pow(..) => POWER,
        Node::Num(n) => number_precedence(n),
        Node::Var(_) | Node::Param(_) | Node::Call(..) => ATOM,
    }
}

fn number_precedence(n: &Number) -> u8 {
    match n {
        Number::Exact(r) if r.is_negative() => SUM,
        Number::Exact(r) if !r.denom().is_one() => PRODUCT,
        Number::Exact(_) => ATOM,
        Number::Inexact(c) if c.im != 0.0 => ATOM,
        Number::Inexact(c) if c.re < 0.0 || c.re.is_sign_negative() => SUM,
        Number::Inexact(_) => ATOM,
    }
}

fn write_prec(f: &mut fmt::Formatter<'_>, e: &Expr, symbols: &Symbols, min: u8) -> fmt::Result {
    let own = precedence(e);
    if own < min {
        f.write_str("(")?;
        write_node(f, e, symbols)?;
        return f.write_str(")");
    }
    write_node(f, e, symbols)
}

fn write_node(f: &mut fmt::Formatter<'_>, e: &Expr, symbols: &Symbols) -> fmt::Result {
    match e.node() {
        Node::Num(n) => write_number(f, n),
        Node::Var(i) => f.write_str(&symbols.name(*i)),
        Node::Param(p) => f.write_str(p),
        Node::Neg(a) => {
            f.write_str("-")?;
            write_prec(f, a, symbols, FACTOR)
        }
        Node::Add(a, b) | Node::Sub(a, b) => {
            let minus = matches!(e.node(), Node::Sub(..));
            write_prec(f, a, symbols, SUM)?;
            match negated_term(b) {
                Some(t) => {
                    f.write_str(if minus { " + " } else { " - " })?;
                    write_prec(f, &t, symbols, PRODUCT)
                }
                None => {
                    f.write_str(if minus { " - " } else { " + " })?;
                    write_prec(f, b, symbols, PRODUCT)
                }
            }
        }
        Node::Mul(a, b) => {
            write_left_factor(f, a, symbols)?;
            f.write_str("*")?;
            write_prec(f, b, symbols, FACTOR)
        }
        Node::Div(a, b) => {
            write_left_factor(f, a, symbols)?;
            f.write_str("/")?;
            write_prec(f, b, symbols, FACTOR)
        }
        Node::Pow(a, b) => {
            write_prec(f, a, symbols, ATOM)?;
            f.write_str("^")?;
            write_prec(f, b, symbols, FACTOR)
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_expr(f, a, symbols)?;
            f.write_str(")")
        }
    }
}

/// `-t` for a term printed with a leading minus, so `a + -2*x` reads `a - 2*x`.
fn negated_term(b: &Expr) -> Option<Expr> {
    strip_minus(b).filter(|t| strip_minus(t).is_none())
}

fn strip_minus(b: &Expr) -> Option<Expr> {
    match b.node() {
        Node::Neg(t) => Some(t.clone()),
        Node::Num(n) if n.is_negative_real() => Some(Expr::num(-*n)),
        Node::Mul(l, r) | Node::Div(l, r) => {
            let l = strip_minus(l)?;
            let rebuilt = match b.node() {
                Node::Mul(..) if l.is_one() => return Some(r.clone()),
                Node::Mul(..) => Node::Mul(l, r.clone()),
                _ => Node::Div(l, r.clone()),
            };
            Some(Expr::new(rebuilt))
        }
        _ => None,
    }
}

/// Left operand of `*` or `/`. A leading minus needs no parentheses there:
/// `-a*b` reads back as `(-a)*b`.
fn write_left_factor(f: &mut fmt::Formatter<'_>, a: &Expr, symbols: &Symbols) -> fmt::Result {
    let negative_leaf = match a.node() {
        Node::Neg(_) => true,
        Node::Num(n) => n.is_negative_real(),
        _ => false,
    };
    if negative_leaf {
        write_node(f, a, symbols)
    } else {
        write_prec(f, a, symbols, PRODUCT)
    }
}

fn write_number(f: &mut fmt::Formatter<'_>, n: &Number) -> fmt::Result {
    match n {
        Number::Exact(r) => {
            if r.denom().is_one() {
                write!(f, "{}", r.numer())
            } else {
                write!(f, "{}/{}", r.numer(), r.denom())
            }
        }
        Number::Inexact(c) if c.im == 0.0 => write!(f, "{:?}", c.re),
        Number::Inexact(c) => write!(f, "({:?} + {:?}*i)", c.re, c.im),
    }
}
