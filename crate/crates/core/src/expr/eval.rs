use super::display::NodeDisplay;
use super::{BinOp, ExprError, Func, Node};

pub(super) fn apply_func(f: Func, x: f64) -> Result<f64, &'static str> {
    match f {
        Func::Sin => Ok(x.sin()),
        Func::Cos => Ok(x.cos()),
        Func::Tan => Ok(x.tan()),
        Func::Exp => Ok(x.exp()),
        Func::Log if x <= 0.0 => Err("logarithm of a non-positive value"),
        Func::Log => Ok(x.ln()),
        Func::Sqrt if x < 0.0 => Err("square root of a negative value"),
        Func::Sqrt => Ok(x.sqrt()),
        Func::Atan => Ok(x.atan()),
    }
}

fn domain(node: &Node, vars: &[String], reason: &'static str) -> ExprError {
    ExprError::Domain {
        subexpr: NodeDisplay::new(node, vars).to_string(),
        reason,
    }
}

pub fn eval(node: &Node, values: &[f64], vars: &[String]) -> Result<f64, ExprError> {
    let v = match node {
        Node::Num(v) => return Ok(*v),
        Node::Var(i) => return Ok(values[*i]),
        Node::Neg(a) => -eval(a, values, vars)?,
        Node::Binary(op, a, b) => {
            let x = eval(a, values, vars)?;
            let y = eval(b, values, vars)?;
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div if y == 0.0 => return Err(domain(node, vars, "division by zero")),
                BinOp::Div => x / y,
                BinOp::Pow if x == 0.0 && y < 0.0 => return Err(domain(node, vars, "zero raised to a negative power")),
                BinOp::Pow => x.powf(y),
            }
        }
        Node::Call(f, a) => {
            let x = eval(a, values, vars)?;
            apply_func(*f, x).map_err(|reason| domain(node, vars, reason))?
        }
        Node::Atan2(y, x) => {
            let yv = eval(y, values, vars)?;
            let xv = eval(x, values, vars)?;
            yv.atan2(xv)
        }
    };
    if v.is_nan() {
        return Err(domain(node, vars, "undefined result"));
    }
    if v.is_infinite() {
        return Err(domain(node, vars, "overflow"));
    }
    Ok(v)
}
