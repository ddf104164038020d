//! A small arithmetic-expression evaluator for boundary traces.
//!
//! Variables are the real coordinates `x1, y1, ..., xn, yn`; supported
//! operators and functions: `+ - * / ^ exp abs min max`, plus `re(zj)` /
//! `im(zj)` as sugar for `xj` / `yj`. Evaluation is deterministic.

use std::fmt;
use std::sync::Arc;

use crate::field::TraceFn;
use crate::{Error, Point, Result};

#[derive(Clone, Debug, PartialEq)]
enum Ast {
    Const(f64),
    /// Coordinate index into the point layout `[x1, y1, x2, y2]`.
    Var(usize),
    Neg(Box<Ast>),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Pow(Box<Ast>, Box<Ast>),
    Exp(Box<Ast>),
    Abs(Box<Ast>),
    Min(Box<Ast>, Box<Ast>),
    Max(Box<Ast>, Box<Ast>),
}

impl Ast {
    fn eval(&self, p: &Point) -> f64 {
        match self {
            Ast::Const(c) => *c,
            Ast::Var(k) => p[*k],
            Ast::Neg(a) => -a.eval(p),
            Ast::Add(a, b) => a.eval(p) + b.eval(p),
            Ast::Sub(a, b) => a.eval(p) - b.eval(p),
            Ast::Mul(a, b) => a.eval(p) * b.eval(p),
            Ast::Div(a, b) => a.eval(p) / b.eval(p),
            Ast::Pow(a, b) => {
                let (x, y) = (a.eval(p), b.eval(p));
                if y.fract() == 0.0 && y.abs() < 64.0 {
                    x.powi(y as i32)
                } else {
                    x.powf(y)
                }
            }
            Ast::Exp(a) => a.eval(p).exp(),
            Ast::Abs(a) => a.eval(p).abs(),
            Ast::Min(a, b) => a.eval(p).min(b.eval(p)),
            Ast::Max(a, b) => a.eval(p).max(b.eval(p)),
        }
    }
}

/// A parsed trace expression; evaluates at points of R^{2n}.
#[derive(Clone, Debug)]
pub struct TraceExpr {
    ast: Arc<Ast>,
    src: String,
}

impl fmt::Display for TraceExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.src)
    }
}

impl TraceExpr {
    pub fn eval(&self, p: &Point) -> f64 {
        self.ast.eval(p)
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn to_trace_fn(&self) -> TraceFn {
        let ast = self.ast.clone();
        Arc::new(move |p: &Point| ast.eval(p))
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    n: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: impl Into<String>) -> Error {
        let before = &self.src[..self.pos.min(self.src.len())];
        let line = before.matches('\n').count() + 1;
        let col = before.rsplit('\n').next().map_or(0, |l| l.len()) + 1;
        Error::ExprParse {
            msg: msg.into(),
            line,
            col,
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(format!("expected '{}'", c as char)))
        }
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_alphanumeric() || self.bytes[self.pos] == b'_')
        {
            self.pos += 1;
        }
        if self.pos > start && self.bytes[start].is_ascii_alphabetic() {
            Some(self.src[start..self.pos].to_string())
        } else {
            self.pos = start;
            None
        }
    }

    fn number(&mut self) -> Result<f64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len()
            && (self.bytes[self.pos].is_ascii_digit()
                || self.bytes[self.pos] == b'.'
                || (matches!(self.bytes[self.pos], b'e' | b'E')
                    && self.pos > start
                    && self.src[start..self.pos].chars().any(|c| c.is_ascii_digit()))
                || (matches!(self.bytes[self.pos], b'+' | b'-')
                    && self.pos > start
                    && matches!(self.bytes[self.pos - 1], b'e' | b'E')))
        {
            self.pos += 1;
        }
        self.src[start..self.pos]
            .parse::<f64>()
            .map_err(|_| self.err("malformed number"))
    }

    fn coordinate(&mut self, name: &str) -> Result<usize> {
        let (axis, rest) = name.split_at(1);
        let j: usize = rest
            .parse()
            .map_err(|_| self.err(format!("unknown variable '{name}'")))?;
        if j < 1 || j > self.n {
            return Err(self.err(format!(
                "variable '{name}' out of range for n = {}",
                self.n
            )));
        }
        Ok(match axis {
            "x" => 2 * (j - 1),
            "y" => 2 * (j - 1) + 1,
            _ => return Err(self.err(format!("unknown variable '{name}'"))),
        })
    }

    fn complex_arg(&mut self) -> Result<usize> {
        self.expect(b'(')?;
        let name = self.ident().ok_or_else(|| self.err("expected z1 or z2"))?;
        let j: usize = name
            .strip_prefix('z')
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err(format!("expected z1..z{}, got '{name}'", self.n)))?;
        if j < 1 || j > self.n {
            return Err(self.err(format!("'{name}' out of range for n = {}", self.n)));
        }
        self.expect(b')')?;
        Ok(j - 1)
    }

    fn atom(&mut self) -> Result<Ast> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => Ok(Ast::Const(self.number()?)),
            Some(c) if c.is_ascii_alphabetic() => {
                let name = self.ident().expect("alphabetic start");
                match name.as_str() {
                    "exp" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b')')?;
                        Ok(Ast::Exp(Box::new(a)))
                    }
                    "abs" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b')')?;
                        Ok(Ast::Abs(Box::new(a)))
                    }
                    "min" | "max" => {
                        self.expect(b'(')?;
                        let a = self.expr()?;
                        self.expect(b',')?;
                        let b = self.expr()?;
                        self.expect(b')')?;
                        Ok(if name == "min" {
                            Ast::Min(Box::new(a), Box::new(b))
                        } else {
                            Ast::Max(Box::new(a), Box::new(b))
                        })
                    }
                    "re" => Ok(Ast::Var(2 * self.complex_arg()?)),
                    "im" => Ok(Ast::Var(2 * self.complex_arg()? + 1)),
                    _ => Ok(Ast::Var(self.coordinate(&name)?)),
                }
            }
            _ => Err(self.err("expected a number, variable or '('")),
        }
    }

    fn power(&mut self) -> Result<Ast> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.factor()?;
            Ok(Ast::Pow(Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn factor(&mut self) -> Result<Ast> {
        if self.eat(b'-') {
            Ok(Ast::Neg(Box::new(self.factor()?)))
        } else if self.eat(b'+') {
            self.factor()
        } else {
            self.power()
        }
    }

    fn term(&mut self) -> Result<Ast> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat(b'*') {
                lhs = Ast::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat(b'/') {
                lhs = Ast::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn expr(&mut self) -> Result<Ast> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }
}

/// Parse a trace expression over the coordinates of C^n.
pub fn parse_trace_expr(src: &str, n: usize) -> Result<TraceExpr> {
    let mut p = Parser {
        src,
        bytes: src.as_bytes(),
        pos: 0,
        n,
    };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(TraceExpr {
        ast: Arc::new(ast),
        src: src.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_one() {
        let e = parse_trace_expr("1", 1).unwrap();
        assert_eq!(e.eval(&[3.0, 4.0, 0.0, 0.0]), 1.0);
    }

    #[test]
    fn clipped_coordinate() {
        let e = parse_trace_expr("max(x1, 0)", 1).unwrap();
        assert_eq!(e.eval(&[2.5, 0.0, 0.0, 0.0]), 2.5);
        assert_eq!(e.eval(&[-2.5, 0.0, 0.0, 0.0]), 0.0);
    }

    #[test]
    fn norm_square_is_constant_on_the_unit_circle() {
        let e = parse_trace_expr("x1*x1 + y1*y1", 1).unwrap();
        for k in 0..32 {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 32.0;
            let v = e.eval(&[t.cos(), t.sin(), 0.0, 0.0]);
            assert!((v - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sugar_and_precedence() {
        let e = parse_trace_expr("re(z2) + 2*im(z1)^2", 2).unwrap();
        assert_eq!(e.eval(&[0.0, 3.0, 5.0, 0.0]), 5.0 + 2.0 * 9.0);
        let e = parse_trace_expr("2^3^1 - exp(0) - abs(-3)/3", 1).unwrap();
        assert_eq!(e.eval(&[0.0; 4]), 8.0 - 1.0 - 1.0);
    }

    #[test]
    fn errors_carry_position() {
        let err = parse_trace_expr("x1 + ", 1).unwrap_err();
        match err {
            Error::ExprParse { line, col, .. } => {
                assert_eq!(line, 1);
                assert!(col >= 5);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_trace_expr("x3", 2).is_err());
        assert!(parse_trace_expr("re(z3)", 2).is_err());
        assert!(parse_trace_expr("x1 x1", 1).is_err());
    }
}
