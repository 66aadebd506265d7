//! Scalar expressions over coordinates `x1..xn`, `y1..yn`.
//!
//! Grammar (precedence from loosest to tightest):
//!
//! ```text
//! expr     := term (("+"|"-") term)*
//! term     := unary (("*"|"/") unary)*
//! unary    := "-" unary | factor
//! factor   := base ("^" exponent)?
//! exponent := "-" exponent | factor          // must not mention a coordinate
//! base     := number | coord | "(" expr ")" | func "(" expr ")"
//! coord    := ("x"|"y") digit+
//! func     := "sqrt" | "exp" | "log" | "sin" | "cos" | "atan"
//! number   := digit+ ("." digit+)? | digit+ "/" digit+
//! ```
//!
//! `digit+ "/" digit+` lexes as a single rational literal, so `x2^2/3` is
//! `x2^(2/3)`; write `(x2^2)/3` for the quotient.

use std::fmt;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedDiv, CheckedMul, CheckedSub};

use crate::jet::{Jet, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub enum Axis {
    X,
    Y,
}

/// A coordinate reference; `index` is zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Coord {
    pub axis: Axis,
    pub index: usize,
}

impl Coord {
    pub fn x(index: usize) -> Self {
        Coord { axis: Axis::X, index }
    }
    pub fn y(index: usize) -> Self {
        Coord { axis: Axis::Y, index }
    }
}

impl fmt::Display for Coord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = match self.axis {
            Axis::X => 'x',
            Axis::Y => 'y',
        };
        write!(f, "{a}{}", self.index + 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Literal {
    Rational(Ratio<i64>),
    Float(f64),
}

impl Literal {
    pub fn to_f64(self) -> f64 {
        match self {
            Literal::Rational(r) => *r.numer() as f64 / *r.denom() as f64,
            Literal::Float(v) => v,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Sqrt,
    Exp,
    Log,
    Sin,
    Cos,
    Atan,
}

impl UnaryOp {
    fn name(self) -> &'static str {
        match self {
            UnaryOp::Neg => "-",
            UnaryOp::Sqrt => "sqrt",
            UnaryOp::Exp => "exp",
            UnaryOp::Log => "log",
            UnaryOp::Sin => "sin",
            UnaryOp::Cos => "cos",
            UnaryOp::Atan => "atan",
        }
    }

    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "sqrt" => UnaryOp::Sqrt,
            "exp" => UnaryOp::Exp,
            "log" => UnaryOp::Log,
            "sin" => UnaryOp::Sin,
            "cos" => UnaryOp::Cos,
            "atan" => UnaryOp::Atan,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    /// Right operand is always a coordinate-free subexpression.
    Pow,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(Literal),
    Coord(Coord),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("syntax error at {pos}: {message}")]
    Syntax { pos: usize, message: String },
    #[error("coordinate {name} at {pos} is out of range for dimension {dim}")]
    CoordOutOfRange { pos: usize, name: String, dim: usize },
    #[error("exponent at {pos} depends on a coordinate; use exp(e*log(b)) instead")]
    NonConstantExponent { pos: usize },
    #[error("dimension must be at least 2, got {0}")]
    Dimension(usize),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("domain violation in {op}: argument value {value} in `{subexpr}`")]
    Domain {
        op: &'static str,
        value: f64,
        subexpr: String,
    },
    #[error("division by zero in `{subexpr}`")]
    DivisionByZero { subexpr: String },
    #[error("coordinate {0} has no assigned value")]
    Unassigned(Coord),
}

/// Coordinate values handed to [`Expr::eval`].
#[derive(Debug, Clone)]
pub struct Coords<S> {
    pub x: Vec<S>,
    pub y: Vec<S>,
}

impl<S: Copy> Coords<S> {
    fn get(&self, c: Coord) -> Option<S> {
        match c.axis {
            Axis::X => self.x.get(c.index).copied(),
            Axis::Y => self.y.get(c.index).copied(),
        }
    }
}

impl Coords<f64> {
    pub fn new(x: &[f64], y: &[f64]) -> Self {
        Coords { x: x.to_vec(), y: y.to_vec() }
    }
}

/// Seed coordinate jets: generator `i` carries a unit derivative along
/// `directions[i]`.
pub fn seed(x: &[f64], y: &[f64], directions: &[Coord]) -> Result<Coords<Jet>, crate::jet::TooManyGenerators> {
    let order = directions.len();
    let mask_for = |c: Coord| {
        directions
            .iter()
            .enumerate()
            .filter(|(_, d)| **d == c)
            .fold(0u32, |m, (i, _)| m | (1 << i))
    };
    let mut xs = Vec::with_capacity(x.len());
    for (i, v) in x.iter().enumerate() {
        xs.push(Jet::seeded(*v, order, mask_for(Coord::x(i)))?);
    }
    let mut ys = Vec::with_capacity(y.len());
    for (i, v) in y.iter().enumerate() {
        ys.push(Jet::seeded(*v, order, mask_for(Coord::y(i)))?);
    }
    Ok(Coords { x: xs, y: ys })
}

impl Expr {
    pub fn parse(text: &str, dim: usize) -> Result<Expr, ParseError> {
        if dim < 2 {
            return Err(ParseError::Dimension(dim));
        }
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0, dim };
        let expr = parser.expr()?;
        match parser.peek() {
            (Tok::End, _) => Ok(expr),
            (tok, pos) => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected {tok:?}"),
            }),
        }
    }

    pub fn constant(value: f64) -> Expr {
        Expr::Const(Literal::Float(value))
    }

    pub fn mentions(&self, axis: Axis) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Coord(c) => c.axis == axis,
            Expr::Unary(_, a) => a.mentions(axis),
            Expr::Binary(_, a, b) => a.mentions(axis) || b.mentions(axis),
        }
    }

    pub fn has_coord(&self) -> bool {
        self.mentions(Axis::X) || self.mentions(Axis::Y)
    }

    /// Largest zero-based coordinate index mentioned, if any.
    pub fn max_index(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Coord(c) => Some(c.index),
            Expr::Unary(_, a) => a.max_index(),
            Expr::Binary(_, a, b) => a.max_index().max(b.max_index()),
        }
    }

    /// Exact value of a coordinate-free subexpression when it stays within
    /// rational arithmetic.
    fn const_literal(&self) -> Option<Literal> {
        match self {
            Expr::Const(l) => Some(*l),
            Expr::Coord(_) => None,
            Expr::Unary(UnaryOp::Neg, a) => match a.const_literal()? {
                Literal::Rational(r) => Some(Literal::Rational(-r)),
                Literal::Float(v) => Some(Literal::Float(-v)),
            },
            Expr::Unary(..) => Some(Literal::Float(self.eval_constant()?)),
            Expr::Binary(op, a, b) => {
                if let (Some(Literal::Rational(p)), Some(Literal::Rational(q))) =
                    (a.const_literal(), b.const_literal())
                {
                    let exact = match op {
                        BinaryOp::Add => p.checked_add(&q),
                        BinaryOp::Sub => p.checked_sub(&q),
                        BinaryOp::Mul => p.checked_mul(&q),
                        BinaryOp::Div => p.checked_div(&q),
                        BinaryOp::Pow => (q.is_integer() && q.numer().abs() <= 16 && *p.numer() != 0)
                            .then(|| checked_pow(p, *q.numer() as i32))
                            .flatten(),
                    };
                    if let Some(r) = exact {
                        return Some(Literal::Rational(r));
                    }
                }
                Some(Literal::Float(self.eval_constant()?))
            }
        }
    }

    fn eval_constant(&self) -> Option<f64> {
        let empty: Coords<f64> = Coords { x: vec![], y: vec![] };
        self.eval(&empty).ok()
    }

    /// Evaluate over any scalar type. Plain reals and jets go through the
    /// same code path.
    pub fn eval<S: Scalar>(&self, coords: &Coords<S>) -> Result<S, EvalError> {
        match self {
            Expr::Const(l) => Ok(S::constant(l.to_f64())),
            Expr::Coord(c) => coords.get(*c).ok_or(EvalError::Unassigned(*c)),
            Expr::Unary(op, a) => {
                let v = a.eval(coords)?;
                let bad = |op: &'static str| EvalError::Domain {
                    op,
                    value: v.value(),
                    subexpr: self.to_string(),
                };
                Ok(match op {
                    UnaryOp::Neg => -v,
                    UnaryOp::Sqrt => {
                        if v.value() < 0.0 || (v.value() == 0.0 && !v.is_constant()) {
                            return Err(bad("sqrt"));
                        }
                        v.sqrt()
                    }
                    UnaryOp::Log => {
                        if v.value() <= 0.0 {
                            return Err(bad("log"));
                        }
                        v.ln()
                    }
                    UnaryOp::Exp => v.exp(),
                    UnaryOp::Sin => v.sin(),
                    UnaryOp::Cos => v.cos(),
                    UnaryOp::Atan => v.atan(),
                })
            }
            Expr::Binary(op, a, b) => {
                if *op == BinaryOp::Pow {
                    return self.eval_pow(a, b, coords);
                }
                let l = a.eval(coords)?;
                let r = b.eval(coords)?;
                Ok(match op {
                    BinaryOp::Add => l + r,
                    BinaryOp::Sub => l - r,
                    BinaryOp::Mul => l * r,
                    BinaryOp::Div => {
                        if r.value() == 0.0 {
                            return Err(EvalError::DivisionByZero { subexpr: self.to_string() });
                        }
                        l / r
                    }
                    BinaryOp::Pow => unreachable!(),
                })
            }
        }
    }

    fn eval_pow<S: Scalar>(&self, base: &Expr, exponent: &Expr, coords: &Coords<S>) -> Result<S, EvalError> {
        let b = base.eval(coords)?;
        let lit = exponent.const_literal().ok_or_else(|| EvalError::Domain {
            op: "pow",
            value: f64::NAN,
            subexpr: self.to_string(),
        })?;
        let integer = match lit {
            Literal::Rational(r) if r.is_integer() && r.numer().abs() <= i32::MAX as i64 => Some(*r.numer() as i32),
            Literal::Float(v) if v.fract() == 0.0 && v.abs() <= 1024.0 => Some(v as i32),
            _ => None,
        };
        match integer {
            Some(k) => {
                if k < 0 && b.value() == 0.0 {
                    return Err(EvalError::DivisionByZero { subexpr: self.to_string() });
                }
                Ok(b.powi(k))
            }
            None => {
                let q = lit.to_f64();
                if b.value() < 0.0 || (b.value() == 0.0 && (!b.is_constant() || q < 0.0)) {
                    return Err(EvalError::Domain {
                        op: "pow",
                        value: b.value(),
                        subexpr: self.to_string(),
                    });
                }
                Ok(b.powf(q))
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary(BinaryOp::Add | BinaryOp::Sub, ..) => 1,
            Expr::Binary(BinaryOp::Mul | BinaryOp::Div, ..) => 2,
            Expr::Unary(UnaryOp::Neg, _) => 3,
            Expr::Binary(BinaryOp::Pow, ..) => 4,
            _ => 5,
        }
    }
}

fn checked_pow(base: Ratio<i64>, exp: i32) -> Option<Ratio<i64>> {
    let mut acc = Ratio::from_integer(1);
    let b = if exp < 0 { base.recip() } else { base };
    for _ in 0..exp.unsigned_abs() {
        acc = acc.checked_mul(&b)?;
    }
    Some(acc)
}

fn write_wrapped(f: &mut fmt::Formatter<'_>, e: &Expr, wrap: bool) -> fmt::Result {
    if wrap {
        write!(f, "({e})")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(Literal::Rational(r)) => {
                if r.is_integer() {
                    write!(f, "{}", r.numer())
                } else {
                    write!(f, "{}/{}", r.numer(), r.denom())
                }
            }
            Expr::Const(Literal::Float(v)) => {
                let s = format!("{v}");
                if s.contains('.') {
                    write!(f, "{s}")
                } else {
                    write!(f, "{s}.0")
                }
            }
            Expr::Coord(c) => write!(f, "{c}"),
            Expr::Unary(UnaryOp::Neg, a) => {
                write!(f, "-")?;
                write_wrapped(f, a, a.precedence() < 3)
            }
            Expr::Unary(op, a) => write!(f, "{}({a})", op.name()),
            Expr::Binary(BinaryOp::Pow, a, b) => {
                write_wrapped(f, a, a.precedence() < 5)?;
                write!(f, "^")?;
                write_wrapped(f, b, b.precedence() < 3)
            }
            Expr::Binary(op, a, b) => {
                let (level, sym) = match op {
                    BinaryOp::Add => (1, " + "),
                    BinaryOp::Sub => (1, " - "),
                    BinaryOp::Mul => (2, "*"),
                    BinaryOp::Div => (2, "/"),
                    BinaryOp::Pow => unreachable!(),
                };
                let left = if a.precedence() < level { format!("({a})") } else { a.to_string() };
                let right = b.to_string();
                // "2/3" would re-lex as a single fraction literal
                let glue = *op == BinaryOp::Div
                    && left.ends_with(|c: char| c.is_ascii_digit())
                    && right.starts_with(|c: char| c.is_ascii_digit());
                write!(f, "{left}{sym}")?;
                if b.precedence() <= level || glue {
                    write!(f, "({right})")
                } else {
                    write!(f, "{right}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(Literal),
    Coord(Axis, usize),
    Func(UnaryOp),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let digits = |mut j: usize| {
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        j
    };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b'0'..=b'9' => {
                let end = digits(i);
                let int_text = &text[i..end];
                if end + 1 < bytes.len() && bytes[end] == b'.' && bytes[end + 1].is_ascii_digit() {
                    let frac_end = digits(end + 1);
                    let v: f64 = text[i..frac_end].parse().map_err(|_| ParseError::Syntax {
                        pos: start,
                        message: "bad decimal literal".into(),
                    })?;
                    out.push((Tok::Num(Literal::Float(v)), start));
                    i = frac_end;
                    continue;
                }
                if end + 1 < bytes.len() && bytes[end] == b'/' && bytes[end + 1].is_ascii_digit() {
                    let den_end = digits(end + 1);
                    let lit = match (int_text.parse::<i64>(), text[end + 1..den_end].parse::<i64>()) {
                        (Ok(p), Ok(q)) if q != 0 => Literal::Rational(Ratio::new(p, q)),
                        (_, Ok(0)) => {
                            return Err(ParseError::Syntax {
                                pos: end + 1,
                                message: "zero denominator".into(),
                            })
                        }
                        _ => {
                            let p: f64 = int_text.parse().unwrap_or(f64::INFINITY);
                            let q: f64 = text[end + 1..den_end].parse().unwrap_or(f64::INFINITY);
                            Literal::Float(p / q)
                        }
                    };
                    out.push((Tok::Num(lit), start));
                    i = den_end;
                    continue;
                }
                let lit = match int_text.parse::<i64>() {
                    Ok(p) => Literal::Rational(Ratio::from_integer(p)),
                    Err(_) => Literal::Float(int_text.parse().unwrap_or(f64::INFINITY)),
                };
                out.push((Tok::Num(lit), start));
                i = end;
                continue;
            }
            b'a'..=b'z' | b'A'..=b'Z' => {
                let mut end = i;
                while end < bytes.len() && bytes[end].is_ascii_alphabetic() {
                    end += 1;
                }
                let word = &text[i..end];
                if word == "x" || word == "y" {
                    let dend = digits(end);
                    if dend == end {
                        return Err(ParseError::Syntax {
                            pos: start,
                            message: format!("coordinate `{word}` needs an index"),
                        });
                    }
                    let index: usize = text[end..dend].parse().unwrap_or(usize::MAX);
                    let axis = if word == "x" { Axis::X } else { Axis::Y };
                    out.push((Tok::Coord(axis, index), start));
                    i = dend;
                    continue;
                }
                match UnaryOp::from_name(word) {
                    Some(op) => out.push((Tok::Func(op), start)),
                    None => {
                        return Err(ParseError::Syntax {
                            pos: start,
                            message: format!("unknown identifier `{word}`"),
                        })
                    }
                }
                i = end;
                continue;
            }
            other => {
                return Err(ParseError::Syntax {
                    pos: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        }
        i += 1;
    }
    out.push((Tok::End, text.len()));
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    dim: usize,
}

impl Parser {
    fn peek(&self) -> (Tok, usize) {
        self.tokens[self.pos].clone()
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.peek();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        let (tok, pos) = self.bump();
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::Syntax {
                pos,
                message: format!("expected {want:?}, found {tok:?}"),
            })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().0 {
                Tok::Plus => BinaryOp::Add,
                Tok::Minus => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek().0 {
                Tok::Star => BinaryOp::Mul,
                Tok::Slash => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if self.peek().0 != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.peek().1;
        let exponent = self.exponent()?;
        if exponent.has_coord() {
            return Err(ParseError::NonConstantExponent { pos: at });
        }
        Ok(Expr::Binary(BinaryOp::Pow, Box::new(base), Box::new(exponent)))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            let inner = self.exponent()?;
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(inner)));
        }
        self.factor()
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let (tok, pos) = self.bump();
        match tok {
            Tok::Num(l) => Ok(Expr::Const(l)),
            Tok::Coord(axis, index) => {
                if index == 0 || index > self.dim {
                    let a = if axis == Axis::X { "x" } else { "y" };
                    return Err(ParseError::CoordOutOfRange {
                        pos,
                        name: format!("{a}{index}"),
                        dim: self.dim,
                    });
                }
                Ok(Expr::Coord(Coord { axis, index: index - 1 }))
            }
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Func(op) => {
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Unary(op, Box::new(e)))
            }
            other => Err(ParseError::Syntax {
                pos,
                message: format!("unexpected {other:?}"),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn y(i: usize) -> Box<Expr> {
        Box::new(Expr::Coord(Coord::y(i)))
    }
    fn int(v: i64) -> Box<Expr> {
        Box::new(Expr::Const(Literal::Rational(Ratio::from_integer(v))))
    }

    #[test]
    fn parses_euclidean_norm() {
        let e = Expr::parse("sqrt(y1^2 + y2^2)", 2).unwrap();
        let expected = Expr::Unary(
            UnaryOp::Sqrt,
            Box::new(Expr::Binary(
                BinaryOp::Add,
                Box::new(Expr::Binary(BinaryOp::Pow, y(0), int(2))),
                Box::new(Expr::Binary(BinaryOp::Pow, y(1), int(2))),
            )),
        );
        assert_eq!(e, expected);
    }

    #[test]
    fn parses_quartic_root_metric() {
        Expr::parse("((y1*y3 + y3*sqrt(y1^2+y3^2))*y2^2)^(1/4)", 3).unwrap();
    }

    #[test]
    fn rejects_variable_exponent() {
        assert!(matches!(
            Expr::parse("y1^x2", 2),
            Err(ParseError::NonConstantExponent { pos: 3 })
        ));
    }

    #[test]
    fn rejects_out_of_range_coordinate() {
        assert!(matches!(Expr::parse("y3 + y1", 2), Err(ParseError::CoordOutOfRange { pos: 0, .. })));
        assert!(matches!(Expr::parse("x0", 2), Err(ParseError::CoordOutOfRange { .. })));
    }

    #[test]
    fn syntax_errors_report_position() {
        match Expr::parse("y1 + * y2", 2) {
            Err(ParseError::Syntax { pos, .. }) => assert_eq!(pos, 5),
            other => panic!("{other:?}"),
        }
        assert!(Expr::parse("sqrt(y1", 2).is_err());
        assert!(Expr::parse("foo(y1)", 2).is_err());
        assert!(Expr::parse("y1 y2", 2).is_err());
    }

    #[test]
    fn precedence_of_unary_minus_and_power() {
        let e = Expr::parse("-y1^2", 2).unwrap();
        assert_eq!(e, Expr::Unary(UnaryOp::Neg, Box::new(Expr::Binary(BinaryOp::Pow, y(0), int(2)))));
        let e = Expr::parse("y1 - y2 - y1", 2).unwrap();
        assert_eq!(
            e,
            Expr::Binary(BinaryOp::Sub, Box::new(Expr::Binary(BinaryOp::Sub, y(0), y(1))), y(0))
        );
    }

    #[test]
    fn evaluates_simple_cases() {
        let e = Expr::parse("sqrt(y1^2+y2^2)", 2).unwrap();
        assert_eq!(e.eval(&Coords::new(&[0.0, 0.0], &[3.0, 4.0])).unwrap(), 5.0);
        let e = Expr::parse("exp(x1)*y1", 2).unwrap();
        assert_eq!(e.eval(&Coords::new(&[0.0, 0.0], &[7.0, 0.0])).unwrap(), 7.0);
    }

    #[test]
    fn quartic_example_at_unit_direction() {
        // ((1 + sqrt 2) * 1)^(1/4), computed independently: 2.414213562373095^0.25
        let e = Expr::parse("((y1*y3 + y3*sqrt(y1^2+y3^2))*y2^2)^(1/4)", 3).unwrap();
        let v = e.eval(&Coords::new(&[0.3, -1.0, 2.0], &[1.0, 1.0, 1.0])).unwrap();
        assert_relative_eq!(v, 1.246_504_702_770_927, max_relative = 1e-14);
    }

    #[test]
    fn domain_violations() {
        let e = Expr::parse("sqrt(y1)", 2).unwrap();
        assert!(matches!(
            e.eval(&Coords::new(&[0.0, 0.0], &[-1.0, 0.0])),
            Err(EvalError::Domain { op: "sqrt", .. })
        ));
        let e = Expr::parse("log(y1)", 2).unwrap();
        assert!(e.eval(&Coords::new(&[0.0, 0.0], &[0.0, 0.0])).is_err());
        let e = Expr::parse("y2/y1", 2).unwrap();
        assert!(matches!(
            e.eval(&Coords::new(&[0.0, 0.0], &[0.0, 1.0])),
            Err(EvalError::DivisionByZero { .. })
        ));
        let e = Expr::parse("y1^(1/3)", 2).unwrap();
        assert!(e.eval(&Coords::new(&[0.0, 0.0], &[-8.0, 0.0])).is_err());
        let e = Expr::parse("y1^3", 2).unwrap();
        assert_eq!(e.eval(&Coords::new(&[0.0, 0.0], &[-2.0, 0.0])).unwrap(), -8.0);
    }

    #[test]
    fn rational_literals_and_division() {
        assert_eq!(
            Expr::parse("3/4", 2).unwrap(),
            Expr::Const(Literal::Rational(Ratio::new(3, 4)))
        );
        let e = Expr::parse("y1/2", 2).unwrap();
        assert_eq!(e, Expr::Binary(BinaryOp::Div, y(0), int(2)));
        assert!(matches!(Expr::parse("0.25", 2).unwrap(), Expr::Const(Literal::Float(v)) if v == 0.25));
    }

    #[test]
    fn printing_round_trips() {
        for text in [
            "sqrt(y1^2 + y2^2)",
            "-y1^2 - -y2",
            "(y1 + y2)*(y1 - y2)/(y1*y2)",
            "y1^-2 + y2^(1/3) + y1^2^3",
            "6/(4/3) + 2/(3) + 0.5*exp(x1) + (y1^2)/3",
            "atan(2*y3/sqrt(3*y1*y2) + 1/sqrt(3))",
            "(-y1)^3 + -(y1 + y2)",
        ] {
            let e = Expr::parse(text, 3).unwrap();
            let printed = e.to_string();
            assert_eq!(Expr::parse(&printed, 3).unwrap(), e, "{text} -> {printed}");
        }
    }
}
