//! Arithmetic expressions in `x` and `y`.
//!
//! Grammar (see `docs/expression-grammar.md`):
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = primary [ "^" unary ] ;
//! primary = number | "x" | "y" | "pi" | ident "(" expr { "," expr } ")" | "(" expr ")" ;
//! ```
//!
//! `^` binds tighter than unary minus and is right-associative, so `-x^2` is
//! `-(x^2)` and `2^3^2` is `2^(3^2)`.

use std::fmt;

use thiserror::Error;

use crate::error::Result as CrateResult;
use crate::field::ScalarField;
use crate::grid::{DomainMask, NodeKind};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: expected {}", expected.join(", "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
    },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdent { offset: usize, name: String },

    #[error("function `{name}` takes {expected} argument(s), got {got} (offset {offset})")]
    Arity {
        offset: usize,
        name: String,
        expected: usize,
        got: usize,
    },

    #[error("domain fault: {0}")]
    Fault(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
    Atan2,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "atan2" => Func::Atan2,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Atan2 | Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan2 => "atan2",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Y,
    Pi,
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

fn fault(msg: impl Into<String>) -> ExprError {
    ExprError::Fault(msg.into())
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ExprError> {
        parse(src)
    }

    pub fn eval(&self, x: f64, y: f64) -> Result<f64, ExprError> {
        let v = match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Y => y,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(x, y)?,
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x, y)?, b.eval(x, y)?);
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(fault("division by zero"));
                        }
                        a / b
                    }
                    BinOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(fault(format!(
                                "negative base {a} with non-integer exponent {b}"
                            )));
                        }
                        if a == 0.0 && b < 0.0 {
                            return Err(fault("zero raised to a negative power"));
                        }
                        a.powf(b)
                    }
                }
            }
            Expr::Call(f, args) => {
                let a = args[0].eval(x, y)?;
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(fault(format!("sqrt of negative value {a}")));
                        }
                        a.sqrt()
                    }
                    Func::Abs => a.abs(),
                    Func::Atan2 => a.atan2(args[1].eval(x, y)?),
                    Func::Min => a.min(args[1].eval(x, y)?),
                    Func::Max => a.max(args[1].eval(x, y)?),
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(fault("non-finite result"))
        }
    }

    /// Samples the expression on every non-exterior node of `mask`.
    pub fn sample(&self, mask: &DomainMask) -> CrateResult<ScalarField> {
        let g = *mask.grid();
        let mut values = vec![0.0; g.len()];
        for (k, v) in values.iter_mut().enumerate() {
            if mask.kinds()[k] == NodeKind::Exterior {
                continue;
            }
            let (i, j) = g.ij(k);
            *v = self
                .eval(g.x(i), g.y(j))
                .map_err(|source| crate::Error::Sample { i, j, source })?;
        }
        ScalarField::new(mask.clone(), values)
    }
}

/// Fully parenthesised rendering; parsing it back yields an equivalent tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => {
                if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) {
                    write!(f, "(-{:?})", -v)
                } else {
                    write!(f, "{v:?}")
                }
            }
            Expr::X => f.write_str("x"),
            Expr::Y => f.write_str("y"),
            Expr::Pi => f.write_str("pi"),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (n, a) in args.iter().enumerate() {
                    if n > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
    End,
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Tok,
    tok_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Result<Self, ExprError> {
        let mut p = Parser {
            src,
            pos: 0,
            tok: Tok::End,
            tok_start: 0,
        };
        p.advance()?;
        Ok(p)
    }

    fn syntax(&self, expected: &[&str]) -> ExprError {
        ExprError::Syntax {
            offset: self.tok_start,
            expected: expected.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn advance(&mut self) -> Result<(), ExprError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        if self.pos == bytes.len() {
            self.tok = Tok::End;
            return Ok(());
        }
        let c = bytes[self.pos];
        self.tok = match c {
            b'0'..=b'9' | b'.' => {
                let start = self.pos;
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_digit() || bytes[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                if self.pos < bytes.len() && matches!(bytes[self.pos], b'e' | b'E') {
                    let mut k = self.pos + 1;
                    if k < bytes.len() && matches!(bytes[k], b'+' | b'-') {
                        k += 1;
                    }
                    if k < bytes.len() && bytes[k].is_ascii_digit() {
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                        self.pos = k;
                    }
                }
                let text = &self.src[start..self.pos];
                let v = text.parse::<f64>().map_err(|_| ExprError::Syntax {
                    offset: start,
                    expected: vec!["number".into()],
                })?;
                Tok::Num(v)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < bytes.len()
                    && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                Tok::Ident(self.src[start..self.pos].to_string())
            }
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                self.pos += 1;
                Tok::Op(c as char)
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
            _ => {
                return Err(ExprError::Syntax {
                    offset: self.pos,
                    expected: vec![
                        "number".into(),
                        "identifier".into(),
                        "operator".into(),
                        "`(`".into(),
                    ],
                })
            }
        };
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Tok::Op(c @ ('+' | '-')) = self.tok {
            self.advance()?;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Tok::Op(c @ ('*' | '/')) = self.tok {
            self.advance()?;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.tok == Tok::Op('-') {
            self.advance()?;
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if self.tok == Tok::Op('^') {
            self.advance()?;
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        const EXPECTED: &[&str] = &["number", "`x`", "`y`", "`pi`", "function", "`(`", "`-`"];
        match self.tok.clone() {
            Tok::Num(v) => {
                self.advance()?;
                Ok(Expr::Num(v))
            }
            Tok::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Tok::Ident(name) => {
                let start = self.tok_start;
                self.advance()?;
                match name.as_str() {
                    "x" => return Ok(Expr::X),
                    "y" => return Ok(Expr::Y),
                    "pi" => return Ok(Expr::Pi),
                    _ => {}
                }
                let func = Func::lookup(&name).ok_or(ExprError::UnknownIdent {
                    offset: start,
                    name: name.clone(),
                })?;
                if self.tok != Tok::LParen {
                    return Err(self.syntax(&["`(`"]));
                }
                self.advance()?;
                let mut args = vec![self.expr()?];
                while self.tok == Tok::Comma {
                    self.advance()?;
                    args.push(self.expr()?);
                }
                self.expect_rparen()?;
                if args.len() != func.arity() {
                    return Err(ExprError::Arity {
                        offset: start,
                        name,
                        expected: func.arity(),
                        got: args.len(),
                    });
                }
                Ok(Expr::Call(func, args))
            }
            _ => Err(self.syntax(EXPECTED)),
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ExprError> {
        if self.tok != Tok::RParen {
            return Err(self.syntax(&["`)`", "`,`", "operator"]));
        }
        self.advance()
    }
}

pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Tok::End {
        return Err(p.syntax(&["operator", "end of input"]));
    }
    Ok(e)
}

/// Parses and evaluates in one step.
pub fn evaluate(src: &str, x: f64, y: f64) -> Result<f64, ExprError> {
    parse(src)?.eval(x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn saddle_value() {
        assert_eq!(evaluate("x^2 - y^2", 1.0, 2.0).unwrap(), -3.0);
    }

    #[test]
    fn atan2_quarter_turn() {
        assert_eq!(
            evaluate("atan2(y, x)", 0.0, 1.0).unwrap(),
            std::f64::consts::FRAC_PI_2
        );
    }

    #[test]
    fn dangling_operator_reports_offset() {
        match parse("x +").unwrap_err() {
            ExprError::Syntax { offset, expected } => {
                assert_eq!(offset, 3);
                assert!(expected.iter().any(|e| e == "number"));
            }
            e => panic!("{e}"),
        }
    }

    #[test]
    fn constant_expression() {
        assert_eq!(evaluate("0*x + 7", 3.5, -2.0).unwrap(), 7.0);
    }

    #[test]
    fn sqrt_of_negative_faults() {
        assert!(matches!(
            evaluate("sqrt(x-2)", 1.0, 0.0),
            Err(ExprError::Fault(_))
        ));
        assert!(matches!(
            evaluate("1/x", 0.0, 0.0),
            Err(ExprError::Fault(_))
        ));
        assert!(matches!(
            evaluate("(0-2)^0.5", 0.0, 0.0),
            Err(ExprError::Fault(_))
        ));
        assert_eq!(evaluate("(0-2)^3", 0.0, 0.0).unwrap(), -8.0);
    }

    #[test]
    fn unknown_identifier() {
        assert!(matches!(
            parse("z + 1"),
            Err(ExprError::UnknownIdent { offset: 0, .. })
        ));
        assert!(matches!(
            parse("x + tan(y)"),
            Err(ExprError::UnknownIdent { offset: 4, .. })
        ));
    }

    #[test]
    fn precedence() {
        assert_eq!(evaluate("-2^2", 0.0, 0.0).unwrap(), -4.0);
        assert_eq!(evaluate("2^3^2", 0.0, 0.0).unwrap(), 512.0);
        assert_eq!(evaluate("2^-1", 0.0, 0.0).unwrap(), 0.5);
        assert_eq!(evaluate("8 - 3 - 2", 0.0, 0.0).unwrap(), 3.0);
        assert_eq!(evaluate("1 + 2 * 3", 0.0, 0.0).unwrap(), 7.0);
        assert_eq!(evaluate(" min( x , y ) + max(x,y)", 1.0, 4.0).unwrap(), 5.0);
    }

    #[test]
    fn arity_checked() {
        assert!(matches!(parse("atan2(x)"), Err(ExprError::Arity { .. })));
        assert!(matches!(parse("sin(x, y)"), Err(ExprError::Arity { .. })));
    }

    #[test]
    fn print_round_trip() {
        let e = parse("-x^2*1e-3 + atan2(y, -0.1) / (pi - exp(-y))").unwrap();
        let again = parse(&e.to_string()).unwrap();
        assert_eq!(
            e.eval(0.3, 0.7).unwrap().to_bits(),
            again.eval(0.3, 0.7).unwrap().to_bits()
        );
    }
}
