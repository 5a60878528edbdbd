//! The text grammar shared by every module and the CLI.
//!
//! Expressions use integer literals, named variables, `+ - * / ^` and
//! parentheses. Exponents are integer literals, optionally negative. The
//! parser only builds a syntax tree; each algebra decides how to evaluate
//! it (see [`Algebra`]).

use num_bigint::BigInt;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// Target of expression evaluation.
pub trait Algebra {
    type Elem: Clone;

    fn int(&self, n: &BigInt) -> Result<Self::Elem>;
    fn var(&self, name: &str) -> Result<Self::Elem>;
    fn add(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn sub(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn mul(&self, a: Self::Elem, b: Self::Elem) -> Self::Elem;
    fn div(&self, a: Self::Elem, b: Self::Elem) -> Result<Self::Elem>;
    fn pow(&self, a: Self::Elem, e: i64) -> Result<Self::Elem>;
    fn neg(&self, a: Self::Elem) -> Self::Elem;
}

impl Expr {
    pub fn eval<A: Algebra>(&self, alg: &A) -> Result<A::Elem> {
        Ok(match self {
            Expr::Int(n) => alg.int(n)?,
            Expr::Var(v) => alg.var(v)?,
            Expr::Neg(a) => alg.neg(a.eval(alg)?),
            Expr::Add(a, b) => alg.add(a.eval(alg)?, b.eval(alg)?),
            Expr::Sub(a, b) => alg.sub(a.eval(alg)?, b.eval(alg)?),
            Expr::Mul(a, b) => alg.mul(a.eval(alg)?, b.eval(alg)?),
            Expr::Div(a, b) => alg.div(a.eval(alg)?, b.eval(alg)?)?,
            Expr::Pow(a, e) => alg.pow(a.eval(alg)?, *e)?,
        })
    }
}

pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src: src.as_bytes(), pos: 0 };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { pos: self.pos, msg: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut lhs = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.product()?;
            lhs = if op == b'+' {
                Expr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == b'*' {
                Expr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Expr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let digits = self.digits();
            if digits.is_empty() {
                return Err(self.err("expected integer exponent"));
            }
            let e: i64 = digits.parse().map_err(|_| self.err("exponent out of range"))?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn digits(&mut self) -> String {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => {
                let d = self.digits();
                Ok(Expr::Int(d.parse().expect("digit string")))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                Ok(Expr::Var(String::from_utf8_lossy(&self.src[start..self.pos]).into_owned()))
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_associativity() {
        let e = parse_expr("1-2-3").unwrap();
        assert!(matches!(e, Expr::Sub(ref a, _) if matches!(**a, Expr::Sub(..))));
        let e = parse_expr("3/2*t").unwrap();
        assert!(matches!(e, Expr::Mul(ref a, _) if matches!(**a, Expr::Div(..))));
        let e = parse_expr("-t^2").unwrap();
        assert!(matches!(e, Expr::Neg(ref a) if matches!(**a, Expr::Pow(_, 2))));
        assert!(matches!(parse_expr("t^-1").unwrap(), Expr::Pow(_, -1)));
    }

    #[test]
    fn errors_carry_positions() {
        match parse_expr("(t+1").unwrap_err() {
            Error::Parse { pos, .. } => assert_eq!(pos, 4),
            e => panic!("{e:?}"),
        }
        assert!(parse_expr("t +").is_err());
        assert!(parse_expr("t^x").is_err());
        assert!(parse_expr("t $").is_err());
    }
}
