//! Symbolic differentiation with constant folding.
//!
//! Folding is limited to literal arithmetic and the identities `x + 0`,
//! `x * 1`, `x * 0`, `x / 1` and `x ^ 0`, `x ^ 1`; no other rewriting is
//! attempted.

use super::{BinOp, Func, Node};

pub(super) fn derivative(node: &Node) -> Node {
    match node {
        Node::Num(_) | Node::Pi | Node::Param(_) => Node::Num(0.0),
        Node::Var => Node::Num(1.0),
        Node::Neg(a) => neg(derivative(a)),
        Node::Binary(op, a, b) => {
            let (da, db) = (derivative(a), derivative(b));
            match op {
                BinOp::Add => add(da, db),
                BinOp::Sub => sub(da, db),
                BinOp::Mul => add(mul(da, (**b).clone()), mul((**a).clone(), db)),
                BinOp::Div => div(
                    sub(mul(da, (**b).clone()), mul((**a).clone(), db)),
                    pow((**b).clone(), 2.0),
                ),
            }
        }
        Node::Pow(a, e) => {
            let e = *e;
            let da = derivative(a);
            if e == 0.0 {
                Node::Num(0.0)
            } else if e >= 1.0 {
                mul(mul(Node::num(e), pow((**a).clone(), e - 1.0)), da)
            } else {
                // Keep exponents non-negative: e a^(e-1) a' = e a' / a^(1-e).
                div(mul(Node::num(e), da), pow((**a).clone(), 1.0 - e))
            }
        }
        Node::Call(f, a) => {
            let da = derivative(a);
            let arg = (**a).clone();
            match f {
                Func::Exp => mul(da, Node::Call(Func::Exp, Box::new(arg))),
                Func::Ln => div(da, arg),
                Func::Sin => mul(da, Node::Call(Func::Cos, Box::new(arg))),
                Func::Cos => neg(mul(da, Node::Call(Func::Sin, Box::new(arg)))),
                Func::Arctan => div(da, add(Node::Num(1.0), pow(arg, 2.0))),
            }
        }
    }
}

fn fold(x: f64) -> Option<Node> {
    x.is_finite().then(|| Node::num(x))
}

fn is(node: &Node, value: f64) -> bool {
    node.as_const() == Some(value)
}

fn neg(a: Node) -> Node {
    match a {
        Node::Neg(inner) => *inner,
        Node::Num(x) if x == 0.0 => Node::Num(0.0),
        other => Node::Neg(Box::new(other)),
    }
}

fn add(a: Node, b: Node) -> Node {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if let Some(n) = fold(x + y) {
            return n;
        }
    }
    if is(&a, 0.0) {
        return b;
    }
    if is(&b, 0.0) {
        return a;
    }
    Node::Binary(BinOp::Add, Box::new(a), Box::new(b))
}

fn sub(a: Node, b: Node) -> Node {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if let Some(n) = fold(x - y) {
            return n;
        }
    }
    if is(&b, 0.0) {
        return a;
    }
    if is(&a, 0.0) {
        return neg(b);
    }
    Node::Binary(BinOp::Sub, Box::new(a), Box::new(b))
}

fn mul(a: Node, b: Node) -> Node {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if let Some(n) = fold(x * y) {
            return n;
        }
    }
    if is(&a, 0.0) || is(&b, 0.0) {
        return Node::Num(0.0);
    }
    if is(&a, 1.0) {
        return b;
    }
    if is(&b, 1.0) {
        return a;
    }
    Node::Binary(BinOp::Mul, Box::new(a), Box::new(b))
}

fn div(a: Node, b: Node) -> Node {
    if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
        if y != 0.0 {
            if let Some(n) = fold(x / y) {
                return n;
            }
        }
    }
    if is(&a, 0.0) {
        return Node::Num(0.0);
    }
    if is(&b, 1.0) {
        return a;
    }
    Node::Binary(BinOp::Div, Box::new(a), Box::new(b))
}

fn pow(a: Node, e: f64) -> Node {
    if e == 0.0 {
        return Node::Num(1.0);
    }
    if e == 1.0 {
        return a;
    }
    if let Some(x) = a.as_const() {
        if let Some(n) = fold(super::pow_literal(x, e)) {
            return n;
        }
    }
    Node::Pow(Box::new(a), e)
}
