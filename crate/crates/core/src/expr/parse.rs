//! Recursive-descent parser.
//!
//! ```text
//! expr    = term { ("+" | "-") term }
//! term    = unary { ("*" | "/") unary }
//! unary   = "-" unary | power
//! power   = primary [ "^" unary ]
//! primary = number | ident | ident "(" args ")" | "(" expr ")"
//! ```

use super::build;
use super::{BinOp, ExprError, Func, Node};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(u8),
    LParen,
    RParen,
    Comma,
    End,
}

pub struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    pub fn new(src: &'a str, vars: &'a [&'a str]) -> Self {
        Parser {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
            vars,
        }
    }

    pub fn parse(mut self) -> Result<Node, ExprError> {
        self.advance()?;
        let node = self.expr()?;
        if self.tok != Tok::End {
            return Err(self.syntax("unexpected trailing input"));
        }
        Ok(node)
    }

    fn syntax(&self, message: &str) -> ExprError {
        ExprError::Syntax {
            offset: self.tok_start,
            message: message.to_string(),
        }
    }

    fn advance(&mut self) -> Result<(), ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Tok::End;
            return Ok(());
        };
        self.tok = match c {
            b'0'..=b'9' | b'.' => self.number()?,
            b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                let start = self.pos;
                while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c)
            }
            b'(' => {
                self.pos += 1;
                Tok::LParen
            }
            b')' => {
                self.pos += 1;
                Tok::RParen
            }
            b',' => {
                self.pos += 1;
                Tok::Comma
            }
            _ => return Err(self.syntax("unexpected character")),
        };
        Ok(())
    }

    fn number(&mut self) -> Result<Tok, ExprError> {
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let digits = |p: &mut usize| {
            let s = *p;
            while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                *p += 1;
            }
            *p - s
        };
        let mut n = digits(&mut self.pos);
        if self.pos < bytes.len() && bytes[self.pos] == b'.' {
            self.pos += 1;
            n += digits(&mut self.pos);
        }
        if n == 0 {
            return Err(self.syntax("malformed number"));
        }
        if self.pos < bytes.len() && (bytes[self.pos] == b'e' || bytes[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < bytes.len() && (bytes[p] == b'+' || bytes[p] == b'-') {
                p += 1;
            }
            if digits(&mut p) == 0 {
                return Err(self.syntax("malformed exponent"));
            }
            self.pos = p;
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map(Tok::Num)
            .map_err(|_| self.syntax("malformed number"))
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ (b'+' | b'-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == b'+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ (b'*' | b'/')) = self.tok {
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == b'*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.tok == Tok::Op(b'-') {
            self.advance()?;
            let inner = self.unary()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ExprError> {
        let base = self.primary()?;
        if self.tok == Tok::Op(b'^') {
            self.advance()?;
            let exponent = self.unary()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn expect(&mut self, tok: Tok, message: &str) -> Result<(), ExprError> {
        if self.tok != tok {
            return Err(self.syntax(message));
        }
        self.advance()
    }

    fn primary(&mut self) -> Result<Node, ExprError> {
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Node::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let inner = self.expr()?;
                self.expect(Tok::RParen, "expected ')'")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let offset = self.tok_start;
                self.advance()?;
                if self.tok == Tok::LParen {
                    return self.call(&name, offset);
                }
                if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    return Ok(Node::Var(i));
                }
                if name == "pi" {
                    return Ok(Node::Num(std::f64::consts::PI));
                }
                if Func::from_name(&name).is_some() || name == "atan2" {
                    return Err(ExprError::Syntax {
                        offset,
                        message: format!("function '{name}' requires an argument list"),
                    });
                }
                Err(ExprError::UndeclaredIdentifier { name, offset })
            }
            _ => Err(self.syntax("expected operand")),
        }
    }

    fn call(&mut self, name: &str, offset: usize) -> Result<Node, ExprError> {
        self.advance()?; // '('
        if name == "atan2" {
            let y = self.expr()?;
            self.expect(Tok::Comma, "atan2 takes two arguments")?;
            let x = self.expr()?;
            self.expect(Tok::RParen, "expected ')'")?;
            return Ok(build::atan2(y, x));
        }
        let func = Func::from_name(name).ok_or_else(|| ExprError::UnknownFunction {
            name: name.to_string(),
            offset,
        })?;
        let arg = self.expr()?;
        self.expect(Tok::RParen, "expected ')'")?;
        Ok(Node::Call(func, Box::new(arg)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> Result<Node, ExprError> {
        Parser::new(src, &["x", "y"]).parse()
    }

    #[test]
    fn error_offsets() {
        let off = |s: &str| match parse(s).unwrap_err() {
            ExprError::Syntax { offset, .. } => offset,
            e => panic!("{e:?}"),
        };
        assert_eq!(off("x*+y"), 2);
        assert_eq!(off("(x"), 2);
        assert_eq!(off("x y"), 2);
        assert_eq!(off("x # y"), 2);
        assert_eq!(off("atan2(x)"), 7);
        assert_eq!(off("sin"), 0);
        assert_eq!(off("1e+"), 0);
    }

    #[test]
    fn unknown_function() {
        assert_eq!(
            parse("1 + foo(x)").unwrap_err(),
            ExprError::UnknownFunction {
                name: "foo".into(),
                offset: 4
            }
        );
    }

    #[test]
    fn no_constant_folding_at_parse_time() {
        assert_eq!(parse("-2").unwrap(), Node::Neg(Box::new(Node::Num(2.0))));
    }
}
