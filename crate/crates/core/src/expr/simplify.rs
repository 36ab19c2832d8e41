//! Local rewriting: constant folding and the 0/1 identities.
//!
//! Every rule is a semantics-preserving local rewrite applied by the smart
//! constructors below; `simplify` rebuilds the tree bottom-up until nothing
//! changes, which makes it idempotent. Rules may drop a singular factor
//! (`0*(1/x) -> 0`) but never introduce one.

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use super::{Expr, Func, Node, Number};

const MAX_PASSES: usize = 64;

pub(crate) fn simplify(e: &Expr) -> Expr {
    let mut current = e.clone();
    for _ in 0..MAX_PASSES {
        let next = pass(&current);
        if next == current {
            return next;
        }
        current = next;
    }
    current
}

fn pass(e: &Expr) -> Expr {
    match e.node() {
        Node::Num(_) | Node::Var(_) | Node::Param(_) => e.clone(),
        Node::Neg(a) => neg(pass(a)),
        Node::Add(a, b) => add(pass(a), pass(b)),
        Node::Sub(a, b) => sub(pass(a), pass(b)),
        Node::Mul(a, b) => mul(pass(a), pass(b)),
        Node::Div(a, b) => div(pass(a), pass(b)),
        Node::Pow(a, b) => pow(pass(a), pass(b)),
        Node::Call(f, a) => call(*f, pass(a)),
    }
}

fn num(e: &Expr) -> Option<Number> {
    e.as_number().copied()
}

pub(crate) fn neg(a: Expr) -> Expr {
    if let Some(x) = num(&a) {
        return Expr::num(-x);
    }
    match a.node() {
        Node::Neg(x) => x.clone(),
        Node::Mul(c, x) if c.as_number().is_some() => mul(Expr::num(-num(c).unwrap()), x.clone()),
        Node::Sub(x, y) => sub(y.clone(), x.clone()),
        _ => Expr::new(Node::Neg(a)),
    }
}

pub(crate) fn add(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => return Expr::num(x + y),
        (Some(x), _) if x.is_zero() => return b,
        (_, Some(y)) if y.is_zero() => return a,
        (_, Some(y)) if y.is_negative_real() => return sub(a, Expr::num(-y)),
        _ => {}
    }
    if let Node::Neg(y) = b.node() {
        return sub(a, y.clone());
    }
    if let Node::Neg(x) = a.node() {
        return sub(b, x.clone());
    }
    Expr::new(Node::Add(a, b))
}

pub(crate) fn sub(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => return Expr::num(x - y),
        (_, Some(y)) if y.is_zero() => return a,
        (Some(x), _) if x.is_zero() => return neg(b),
        _ => {}
    }
    if a == b {
        return Expr::zero();
    }
    if let Node::Neg(y) = b.node() {
        return add(a, y.clone());
    }
    Expr::new(Node::Sub(a, b))
}

pub(crate) fn mul(a: Expr, b: Expr) -> Expr {
    match (num(&a), num(&b)) {
        (Some(x), Some(y)) => return Expr::num(x * y),
        (Some(x), _) if x.is_zero() => return Expr::zero(),
        (_, Some(y)) if y.is_zero() => return Expr::zero(),
        (Some(x), _) if x.is_one() => return b,
        (_, Some(y)) if y.is_one() => return a,
        (None, Some(_)) => return mul(b, a),
        _ => {}
    }
    if let Some(c) = num(&a) {
        if c == Number::Exact(Rational64::from_integer(-1)) {
            return neg(b);
        }
        match b.node() {
            Node::Mul(c2, x) if c2.as_number().is_some() => {
                return mul(Expr::num(c * num(c2).unwrap()), x.clone());
            }
            Node::Div(p, q) if p.as_number().is_some() => {
                return div(Expr::num(c * num(p).unwrap()), q.clone());
            }
            _ => {}
        }
    }
    if let Node::Neg(x) = a.node() {
        return neg(mul(x.clone(), b));
    }
    if let Node::Neg(y) = b.node() {
        return neg(mul(a, y.clone()));
    }
    // Pull a constant factor of the right operand to the front.
    if let Node::Mul(c2, y) = b.node() {
        if let Some(c2) = num(c2) {
            return mul(Expr::num(c2), mul(a, y.clone()));
        }
    }
    Expr::new(Node::Mul(a, b))
}

pub(crate) fn div(a: Expr, b: Expr) -> Expr {
    if let Some(y) = num(&b) {
        if y.is_zero() {
            return Expr::new(Node::Div(a, b));
        }
        if y.is_one() {
            return a;
        }
        if let Some(x) = num(&a) {
            return Expr::num(x.try_div(y).expect("nonzero divisor"));
        }
        let inv = Number::Exact(Rational64::from_integer(1)).try_div(y).expect("nonzero divisor");
        return mul(Expr::num(inv), a);
    }
    if a.is_zero() {
        return Expr::zero();
    }
    if let Node::Neg(x) = a.node() {
        return neg(div(x.clone(), b));
    }
    if let Node::Neg(y) = b.node() {
        return neg(div(a, y.clone()));
    }
    Expr::new(Node::Div(a, b))
}

pub(crate) fn pow(a: Expr, b: Expr) -> Expr {
    if b.is_zero() {
        return Expr::one();
    }
    if b.is_one() {
        return a;
    }
    if a.is_one() {
        return Expr::one();
    }
    if let (Some(x), Some(k)) = (num(&a), num(&b).and_then(|n| n.as_integer())) {
        if let Some(v) = x.powi(k) {
            if v.is_exact() || !x.is_exact() {
                return Expr::num(v);
            }
        }
    }
    if a.is_zero() && num(&b).is_some_and(|k| !k.is_negative_real() && !k.is_zero() && k.to_complex().im == 0.0) {
        return Expr::zero();
    }
    if let (Node::Pow(x, p), Some(q)) = (a.node(), num(&b)) {
        if let (Some(p), Some(_)) = (num(p), q.as_integer()) {
            return pow(x.clone(), Expr::num(p * q));
        }
    }
    Expr::new(Node::Pow(a, b))
}

pub(crate) fn call(f: Func, a: Expr) -> Expr {
    match num(&a) {
        Some(Number::Exact(r)) => {
            if let Some(folded) = fold_exact(f, r) {
                return folded;
            }
        }
        Some(Number::Inexact(_)) => {
            // Already floating point; folding cannot lose exactness.
            let probe = Expr::new(Node::Call(f, a.clone()));
            if let Ok(v) = probe.evaluate(&Default::default()) {
                return Expr::num(Number::Inexact(v));
            }
        }
        None => {}
    }
    Expr::new(Node::Call(f, a))
}

fn fold_exact(f: Func, r: Rational64) -> Option<Expr> {
    match f {
        Func::Exp if r.is_zero() => Some(Expr::one()),
        Func::Ln if r == Rational64::from_integer(1) => Some(Expr::zero()),
        Func::Sin | Func::Arctan if r.is_zero() => Some(Expr::zero()),
        Func::Cos if r.is_zero() => Some(Expr::one()),
        Func::Sqrt => {
            let n = exact_sqrt(*r.numer())?;
            let d = exact_sqrt(*r.denom())?;
            Some(Expr::num(Number::Exact(Rational64::new(n, d))))
        }
        _ => None,
    }
}

fn exact_sqrt(v: i64) -> Option<i64> {
    if v < 0 {
        return None;
    }
    let guess = (v.to_f64()?).sqrt().round() as i64;
    (guess.checked_mul(guess) == Some(v)).then_some(guess)
}
