use super::build::{add, call, div, mul, neg, num, pow, sub};
use super::{BinOp, Func, Node};

/// First derivative of `node` with respect to variable index `var`.
pub fn derive(node: &Node, var: usize) -> Node {
    if !node.depends_on(var) {
        return num(0.0);
    }
    match node {
        Node::Num(_) => num(0.0),
        Node::Var(i) => num(if *i == var { 1.0 } else { 0.0 }),
        Node::Neg(a) => neg(derive(a, var)),
        Node::Binary(op, a, b) => {
            let (a, b) = (a.as_ref(), b.as_ref());
            match op {
                BinOp::Add => add(derive(a, var), derive(b, var)),
                BinOp::Sub => sub(derive(a, var), derive(b, var)),
                BinOp::Mul => add(mul(derive(a, var), b.clone()), mul(a.clone(), derive(b, var))),
                BinOp::Div => {
                    let da = derive(a, var);
                    if !b.depends_on(var) {
                        return div(da, b.clone());
                    }
                    let db = derive(b, var);
                    div(sub(mul(da, b.clone()), mul(a.clone(), db)), pow(b.clone(), num(2.0)))
                }
                BinOp::Pow => derive_pow(a, b, var),
            }
        }
        Node::Call(f, a) => {
            let a = a.as_ref();
            let da = derive(a, var);
            let outer = match f {
                Func::Sin => call(Func::Cos, a.clone()),
                Func::Cos => neg(call(Func::Sin, a.clone())),
                Func::Tan => div(num(1.0), pow(call(Func::Cos, a.clone()), num(2.0))),
                Func::Exp => call(Func::Exp, a.clone()),
                Func::Log => return div(da, a.clone()),
                Func::Sqrt => return div(da, mul(num(2.0), call(Func::Sqrt, a.clone()))),
                Func::Atan => {
                    return div(da, add(num(1.0), pow(a.clone(), num(2.0))));
                }
            };
            mul(outer, da)
        }
        Node::Atan2(y, x) => {
            let (y, x) = (y.as_ref(), x.as_ref());
            let num_ = sub(mul(x.clone(), derive(y, var)), mul(y.clone(), derive(x, var)));
            let den = add(pow(x.clone(), num(2.0)), pow(y.clone(), num(2.0)));
            div(num_, den)
        }
    }
}

fn derive_pow(base: &Node, exponent: &Node, var: usize) -> Node {
    let db = derive(base, var);
    if !exponent.depends_on(var) {
        // c * f^(c-1) * f'
        let reduced = sub(exponent.clone(), num(1.0));
        return mul(mul(exponent.clone(), pow(base.clone(), reduced)), db);
    }
    let de = derive(exponent, var);
    let whole = pow(base.clone(), exponent.clone());
    if !base.depends_on(var) {
        return mul(mul(whole, call(Func::Log, base.clone())), de);
    }
    // f^g * (g' log f + g f'/f)
    mul(
        whole,
        add(
            mul(de, call(Func::Log, base.clone())),
            div(mul(exponent.clone(), db), base.clone()),
        ),
    )
}
