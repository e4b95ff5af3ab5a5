//! Node constructors with light simplification: identities for 0 and 1,
//! double negation, and folding of constant subtrees.

use super::{BinOp, Func, Node};

fn bin(op: BinOp, a: Node, b: Node) -> Node {
    Node::Binary(op, Box::new(a), Box::new(b))
}

fn fold(v: f64) -> Option<Node> {
    v.is_finite().then_some(Node::Num(v))
}

pub fn num(v: f64) -> Node {
    Node::Num(v)
}

pub fn add(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => fold(x + y).unwrap_or_else(|| bin(BinOp::Add, a, b)),
        _ if a.is_zero() => b,
        _ if b.is_zero() => a,
        _ => bin(BinOp::Add, a, b),
    }
}

pub fn sub(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => fold(x - y).unwrap_or_else(|| bin(BinOp::Sub, a, b)),
        _ if b.is_zero() => a,
        _ if a.is_zero() => neg(b),
        _ => bin(BinOp::Sub, a, b),
    }
}

pub fn mul(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => fold(x * y).unwrap_or_else(|| bin(BinOp::Mul, a, b)),
        _ if a.is_zero() || b.is_zero() => Node::Num(0.0),
        (Node::Num(x), _) if *x == 1.0 => b,
        (_, Node::Num(y)) if *y == 1.0 => a,
        (Node::Num(x), _) if *x == -1.0 => neg(b),
        (_, Node::Num(y)) if *y == -1.0 => neg(a),
        _ => bin(BinOp::Mul, a, b),
    }
}

pub fn div(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) if *y != 0.0 => fold(x / y).unwrap_or_else(|| bin(BinOp::Div, a, b)),
        (_, Node::Num(y)) if *y == 1.0 => a,
        _ if a.is_zero() && !b.is_zero() => Node::Num(0.0),
        _ => bin(BinOp::Div, a, b),
    }
}

pub fn pow(a: Node, b: Node) -> Node {
    match (&a, &b) {
        (Node::Num(x), Node::Num(y)) => fold(x.powf(*y)).unwrap_or_else(|| bin(BinOp::Pow, a, b)),
        (_, Node::Num(y)) if *y == 0.0 => Node::Num(1.0),
        (_, Node::Num(y)) if *y == 1.0 => a,
        _ => bin(BinOp::Pow, a, b),
    }
}

pub fn neg(a: Node) -> Node {
    match a {
        Node::Num(x) => Node::Num(-x),
        Node::Neg(inner) => *inner,
        other => Node::Neg(Box::new(other)),
    }
}

pub fn call(f: Func, a: Node) -> Node {
    if let Node::Num(x) = a {
        if let Some(v) = super::eval::apply_func(f, x).ok().and_then(fold) {
            return v;
        }
    }
    Node::Call(f, Box::new(a))
}

pub fn atan2(y: Node, x: Node) -> Node {
    Node::Atan2(Box::new(y), Box::new(x))
}
