//! Scalar expressions over named real variables.
//!
//! Expressions are parsed from text, evaluated in double precision and
//! differentiated symbolically by rewriting the syntax tree. The grammar and
//! the accepted function list are documented in `docs/expression-grammar.md`.
//!
//! ```
//! use lielorentz::expr::Expression;
//!
//! let e = Expression::parse("2*t + sin(t)", &["t"]).unwrap();
//! let de = e.derive("t", 1).unwrap();
//! assert_eq!(de.eval(&[0.0]).unwrap(), 3.0);
//! ```

mod build;
mod derive;
mod display;
mod eval;
mod parse;

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

pub use display::NodeDisplay;

/// Version of the accepted function list. Bumped whenever a function is
/// added to or removed from the grammar.
pub const FUNCTION_SET_VERSION: u32 = 1;

/// Highest derivative order accepted by [`Expression::derive`].
pub const MAX_DERIVATIVE_ORDER: u32 = 3;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("undeclared identifier '{name}' at byte {offset}")]
    UndeclaredIdentifier { name: String, offset: usize },
    #[error("unknown function '{name}' at byte {offset}")]
    UnknownFunction { name: String, offset: usize },
    #[error("invalid variable list: {0}")]
    InvalidVariables(String),
    #[error("unknown variable '{0}'")]
    UnknownVariable(String),
    #[error("derivative order {0} outside 1..={max}", max = MAX_DERIVATIVE_ORDER)]
    InvalidOrder(u32),
    #[error("expected {expected} values, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("no binding for variable '{0}'")]
    MissingBinding(String),
    #[error("domain error in '{subexpr}': {reason}")]
    Domain { subexpr: String, reason: &'static str },
}

/// One-argument functions of the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Atan,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Atan => "atan",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Syntax tree node. Variables are indices into the owning expression's
/// variable list.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var(usize),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
    /// `atan2(y, x)`
    Atan2(Box<Node>, Box<Node>),
}

impl Node {
    pub fn is_zero(&self) -> bool {
        matches!(self, Node::Num(v) if *v == 0.0)
    }

    pub fn as_num(&self) -> Option<f64> {
        match self {
            Node::Num(v) => Some(*v),
            _ => None,
        }
    }

    /// True when the subtree references variable `var`.
    pub fn depends_on(&self, var: usize) -> bool {
        match self {
            Node::Num(_) => false,
            Node::Var(i) => *i == var,
            Node::Neg(a) | Node::Call(_, a) => a.depends_on(var),
            Node::Binary(_, a, b) | Node::Atan2(a, b) => a.depends_on(var) || b.depends_on(var),
        }
    }

    /// Number of nodes in the subtree.
    pub fn size(&self) -> usize {
        match self {
            Node::Num(_) | Node::Var(_) => 1,
            Node::Neg(a) | Node::Call(_, a) => 1 + a.size(),
            Node::Binary(_, a, b) | Node::Atan2(a, b) => 1 + a.size() + b.size(),
        }
    }
}

/// An immutable parsed expression together with its ordered variable list.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    vars: Arc<[String]>,
}

fn check_varnames(varnames: &[&str]) -> Result<(), ExprError> {
    if varnames.is_empty() {
        return Err(ExprError::InvalidVariables("no variables declared".into()));
    }
    for (i, name) in varnames.iter().enumerate() {
        let mut chars = name.chars();
        let valid = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !valid {
            return Err(ExprError::InvalidVariables(format!("'{name}' is not an identifier")));
        }
        if Func::from_name(name).is_some() || *name == "atan2" || *name == "pi" {
            return Err(ExprError::InvalidVariables(format!("'{name}' is a reserved name")));
        }
        if varnames[..i].contains(name) {
            return Err(ExprError::InvalidVariables(format!("duplicate '{name}'")));
        }
    }
    Ok(())
}

impl Expression {
    /// Parses `src` over the declared variables.
    pub fn parse(src: &str, varnames: &[&str]) -> Result<Expression, ExprError> {
        check_varnames(varnames)?;
        let root = parse::Parser::new(src, varnames).parse()?;
        Ok(Expression {
            root,
            vars: varnames.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Constant expression over the given variable list.
    pub fn constant(value: f64, varnames: &[&str]) -> Result<Expression, ExprError> {
        check_varnames(varnames)?;
        Ok(Expression {
            root: Node::Num(value),
            vars: varnames.iter().map(|s| s.to_string()).collect(),
        })
    }

    /// Expression consisting of the single variable `name`.
    pub fn variable(name: &str, varnames: &[&str]) -> Result<Expression, ExprError> {
        check_varnames(varnames)?;
        let idx = varnames
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| ExprError::UnknownVariable(name.to_string()))?;
        Ok(Expression {
            root: Node::Var(idx),
            vars: varnames.iter().map(|s| s.to_string()).collect(),
        })
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn is_zero(&self) -> bool {
        self.root.is_zero()
    }

    /// Value of the expression when it contains no variable references.
    pub fn as_constant(&self) -> Option<f64> {
        self.root.as_num()
    }

    /// True when the expression references the named variable.
    pub fn depends_on(&self, name: &str) -> bool {
        self.var_index(name).is_some_and(|i| self.root.depends_on(i))
    }

    fn with_root(&self, root: Node) -> Expression {
        Expression {
            root,
            vars: Arc::clone(&self.vars),
        }
    }

    /// Symbolic derivative of the given order with respect to `var`.
    pub fn derive(&self, var: &str, order: u32) -> Result<Expression, ExprError> {
        if order == 0 || order > MAX_DERIVATIVE_ORDER {
            return Err(ExprError::InvalidOrder(order));
        }
        let idx = self
            .var_index(var)
            .ok_or_else(|| ExprError::UnknownVariable(var.to_string()))?;
        let mut node = self.root.clone();
        for _ in 0..order {
            node = derive::derive(&node, idx);
        }
        Ok(self.with_root(node))
    }

    /// Evaluates with positional values in variable-list order.
    pub fn eval(&self, values: &[f64]) -> Result<f64, ExprError> {
        if values.len() != self.vars.len() {
            return Err(ExprError::Arity {
                expected: self.vars.len(),
                got: values.len(),
            });
        }
        eval::eval(&self.root, values, &self.vars)
    }

    /// Evaluates with named bindings. Every declared variable must be bound;
    /// extra bindings are ignored.
    pub fn eval_with(&self, bindings: &HashMap<&str, f64>) -> Result<f64, ExprError> {
        let values = self
            .vars
            .iter()
            .map(|v| {
                bindings
                    .get(v.as_str())
                    .copied()
                    .ok_or_else(|| ExprError::MissingBinding(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        eval::eval(&self.root, &values, &self.vars)
    }

    fn combine(&self, other: &Expression, f: impl FnOnce(Node, Node) -> Node) -> Expression {
        assert_eq!(
            self.vars, other.vars,
            "cannot combine expressions over different variable lists"
        );
        self.with_root(f(self.root.clone(), other.root.clone()))
    }

    pub fn add(&self, other: &Expression) -> Expression {
        self.combine(other, build::add)
    }

    pub fn sub(&self, other: &Expression) -> Expression {
        self.combine(other, build::sub)
    }

    pub fn mul(&self, other: &Expression) -> Expression {
        self.combine(other, build::mul)
    }

    pub fn div(&self, other: &Expression) -> Expression {
        self.combine(other, build::div)
    }

    pub fn neg(&self) -> Expression {
        self.with_root(build::neg(self.root.clone()))
    }

    pub fn scale(&self, c: f64) -> Expression {
        self.with_root(build::mul(Node::Num(c), self.root.clone()))
    }

    pub fn offset(&self, c: f64) -> Expression {
        self.with_root(build::add(self.root.clone(), Node::Num(c)))
    }

    pub fn powi(&self, n: i32) -> Expression {
        self.with_root(build::pow(self.root.clone(), Node::Num(n as f64)))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        NodeDisplay::new(&self.root, &self.vars).fmt(f)
    }
}

/// Parses `src` over `varnames`.
pub fn parse(src: &str, varnames: &[&str]) -> Result<Expression, ExprError> {
    Expression::parse(src, varnames)
}

/// Symbolic derivative of order `order` with respect to `var`.
pub fn derive(e: &Expression, var: &str, order: u32) -> Result<Expression, ExprError> {
    e.derive(var, order)
}

/// Evaluates `e` with named bindings.
pub fn eval(e: &Expression, bindings: &HashMap<&str, f64>) -> Result<f64, ExprError> {
    e.eval_with(bindings)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, vars: &[&str]) -> Expression {
        Expression::parse(src, vars).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("t^2", &["t"]).eval(&[3.0]).unwrap(), 9.0);
        assert_eq!(p("sin(t)+2*t", &["t"]).eval(&[0.0]).unwrap(), 0.0);
        assert_eq!(p("exp(t)", &["t"]).eval(&[0.0]).unwrap(), 1.0);
        let e = p("atan(y/x)", &["x", "y"]);
        let mut b = HashMap::new();
        b.insert("x", 1.0);
        b.insert("y", 1.0);
        assert_eq!(e.eval_with(&b).unwrap(), std::f64::consts::FRAC_PI_4);
    }

    #[test]
    fn syntax_error_offset() {
        let err = Expression::parse("x*+y", &["x", "y"]).unwrap_err();
        assert!(matches!(err, ExprError::Syntax { offset: 2, .. }), "{err:?}");
    }

    #[test]
    fn undeclared_identifier_is_named() {
        let err = Expression::parse("x + z", &["x", "y"]).unwrap_err();
        assert_eq!(
            err,
            ExprError::UndeclaredIdentifier {
                name: "z".into(),
                offset: 4
            }
        );
    }

    #[test]
    fn domain_errors() {
        let err = p("1/t", &["t"]).eval(&[0.0]).unwrap_err();
        match err {
            ExprError::Domain { subexpr, .. } => assert_eq!(subexpr, "1/t"),
            other => panic!("unexpected {other:?}"),
        }
        let err = p("2 + log(t - 1)", &["t"]).eval(&[0.5]).unwrap_err();
        match err {
            ExprError::Domain { subexpr, .. } => assert_eq!(subexpr, "log(t - 1)"),
            other => panic!("unexpected {other:?}"),
        }
        assert!(p("sqrt(t)", &["t"]).eval(&[-1.0]).is_err());
    }

    #[test]
    fn derivative_examples() {
        let d = p("2*t + sin(t)", &["t"]).derive("t", 1).unwrap();
        assert_eq!(d.eval(&[0.0]).unwrap(), 3.0);
        let d = p("7", &["t"]).derive("t", 1).unwrap();
        assert!(d.is_zero());
        let d = p("t^3", &["t"]).derive("t", 3).unwrap();
        assert_eq!(d.as_constant(), Some(6.0));
    }

    #[test]
    fn third_derivative_matches_finite_difference() {
        // central third-difference stencil on t^3 at 1.7, step 1e-3
        let f = |t: f64| t * t * t;
        let (t, h) = (1.7, 1e-3);
        let fd = (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h * h * h);
        let d = p("t^3", &["t"]).derive("t", 3).unwrap();
        assert!((d.eval(&[t]).unwrap() - fd).abs() < 1e-5);
    }

    #[test]
    fn derive_rejects_bad_requests() {
        let e = p("x*y", &["x", "y"]);
        assert_eq!(e.derive("z", 1).unwrap_err(), ExprError::UnknownVariable("z".into()));
        assert_eq!(e.derive("x", 0).unwrap_err(), ExprError::InvalidOrder(0));
        assert_eq!(e.derive("x", 4).unwrap_err(), ExprError::InvalidOrder(4));
    }

    #[test]
    fn atan2_and_pi() {
        let e = p("atan2(y, x)", &["x", "y"]);
        assert!((e.eval(&[-1.0, 0.0]).unwrap() - std::f64::consts::PI).abs() < 1e-15);
        let e = p("pi/2", &["t"]);
        assert_eq!(e.eval(&[0.0]).unwrap(), std::f64::consts::FRAC_PI_2);
        let d = p("atan2(y, x)", &["x", "y"]).derive("x", 1).unwrap();
        // d/dx atan2(y,x) = -y/(x^2+y^2)
        assert!((d.eval(&[1.0, 2.0]).unwrap() + 0.4).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(p("2^3^2", &["t"]).eval(&[0.0]).unwrap(), 512.0);
        assert_eq!(p("-2^2", &["t"]).eval(&[0.0]).unwrap(), -4.0);
        assert_eq!(p("8/4/2", &["t"]).eval(&[0.0]).unwrap(), 1.0);
        assert_eq!(p("1 - 2 - 3", &["t"]).eval(&[0.0]).unwrap(), -4.0);
        assert_eq!(p("2*t^-1", &["t"]).eval(&[4.0]).unwrap(), 0.5);
        assert_eq!(p("1.5e1 + .5", &["t"]).eval(&[0.0]).unwrap(), 15.5);
    }

    #[test]
    fn reserved_and_duplicate_names_rejected() {
        assert!(Expression::parse("1", &[]).is_err());
        assert!(Expression::parse("1", &["x", "x"]).is_err());
        assert!(Expression::parse("1", &["sin"]).is_err());
        assert!(Expression::parse("1", &["2x"]).is_err());
    }

    #[test]
    fn evaluation_is_deterministic() {
        let e = p("exp(sin(x)*y) / (1 + x^2) - atan2(y, x)", &["x", "y"]);
        let a = e.eval(&[0.3, -1.7]).unwrap();
        let b = e.eval(&[0.3, -1.7]).unwrap();
        assert_eq!(a.to_bits(), b.to_bits());
    }
}
