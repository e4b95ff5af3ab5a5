//! Unparsing. The output re-parses to a structurally identical tree for any
//! tree produced by the parser.

use std::fmt;

use super::{BinOp, Node};

/// Display adapter binding a node to the variable names it indexes.
pub struct NodeDisplay<'a> {
    node: &'a Node,
    vars: &'a [String],
}

impl<'a> NodeDisplay<'a> {
    pub fn new(node: &'a Node, vars: &'a [String]) -> Self {
        NodeDisplay { node, vars }
    }

    fn child(&self, node: &'a Node) -> NodeDisplay<'a> {
        NodeDisplay { node, vars: self.vars }
    }

    fn wrapped(&self, f: &mut fmt::Formatter<'_>, node: &Node, parens: bool) -> fmt::Result {
        if parens {
            write!(f, "({})", self.child(node))
        } else {
            write!(f, "{}", self.child(node))
        }
    }
}

const ADD: u8 = 1;
const MUL: u8 = 2;
const NEG: u8 = 3;
const POW: u8 = 4;
const ATOM: u8 = 5;

fn precedence(node: &Node) -> u8 {
    match node {
        Node::Binary(BinOp::Add | BinOp::Sub, ..) => ADD,
        Node::Binary(BinOp::Mul | BinOp::Div, ..) => MUL,
        Node::Neg(_) => NEG,
        Node::Binary(BinOp::Pow, ..) => POW,
        Node::Num(_) | Node::Var(_) | Node::Call(..) | Node::Atan2(..) => ATOM,
    }
}

impl fmt::Display for NodeDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.node {
            Node::Num(v) if v.is_sign_negative() => write!(f, "(-{})", -v),
            Node::Num(v) => write!(f, "{v}"),
            Node::Var(i) => f.write_str(&self.vars[*i]),
            Node::Neg(a) => {
                f.write_str("-")?;
                self.wrapped(f, a, precedence(a) < NEG)
            }
            Node::Binary(BinOp::Pow, a, b) => {
                self.wrapped(f, a, precedence(a) <= POW)?;
                f.write_str("^")?;
                self.wrapped(f, b, precedence(b) < NEG)
            }
            Node::Binary(op, a, b) => {
                let p = precedence(self.node);
                self.wrapped(f, a, precedence(a) < p)?;
                match op {
                    BinOp::Add | BinOp::Sub => write!(f, " {} ", op.symbol())?,
                    _ => f.write_str(op.symbol())?,
                }
                self.wrapped(f, b, precedence(b) <= p)
            }
            Node::Call(func, a) => write!(f, "{}({})", func.name(), self.child(a)),
            Node::Atan2(y, x) => write!(f, "atan2({}, {})", self.child(y), self.child(x)),
        }
    }
}
