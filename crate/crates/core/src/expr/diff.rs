use super::simplify::{add, call, div, mul, neg, pow, sub};
use super::{Expr, Func, Node};

/// Symbolic partial derivative with respect to variable `var`, built with
/// the simplifying constructors and then simplified to a fixpoint.
pub(crate) fn differentiate(e: &Expr, var: usize) -> Expr {
    d(e, var).simplify()
}

fn d(e: &Expr, var: usize) -> Expr {
    if !e.contains_var(var) {
        return Expr::zero();
    }
    match e.node() {
        Node::Num(_) | Node::Param(_) => Expr::zero(),
        Node::Var(i) => {
            if *i == var {
                Expr::one()
            } else {
                Expr::zero()
            }
        }
        Node::Neg(a) => neg(d(a, var)),
        Node::Add(a, b) => add(d(a, var), d(b, var)),
        Node::Sub(a, b) => sub(d(a, var), d(b, var)),
        Node::Mul(a, b) => add(mul(d(a, var), b.clone()), mul(a.clone(), d(b, var))),
        Node::Div(a, b) => {
            let numer = sub(mul(d(a, var), b.clone()), mul(a.clone(), d(b, var)));
            div(numer, pow(b.clone(), Expr::int(2)))
        }
        Node::Pow(a, b) => {
            if !b.contains_var(var) {
                // b * a^(b-1) * a'
                let lowered = sub(b.clone(), Expr::one());
                mul(mul(b.clone(), pow(a.clone(), lowered)), d(a, var))
            } else if !a.contains_var(var) {
                // a^b * ln(a) * b'
                mul(mul(e.clone(), call(Func::Ln, a.clone())), d(b, var))
            } else {
                let log_term = mul(d(b, var), call(Func::Ln, a.clone()));
                let base_term = div(mul(b.clone(), d(a, var)), a.clone());
                mul(e.clone(), add(log_term, base_term))
            }
        }
        Node::Call(f, a) => {
            let inner = d(a, var);
            let outer = match f {
                Func::Sqrt => div(Expr::one(), mul(Expr::int(2), e.clone())),
                Func::Exp => e.clone(),
                Func::Ln => div(Expr::one(), a.clone()),
                Func::Sin => call(Func::Cos, a.clone()),
                Func::Cos => neg(call(Func::Sin, a.clone())),
                Func::Arctan => div(
                    Expr::one(),
                    add(Expr::one(), pow(a.clone(), Expr::int(2))),
                ),
            };
            mul(outer, inner)
        }
    }
}
