//! Expressions over `x1 … xL` and their sampling on uniform grids.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          right-associative
//! primary := number | 'x' digits | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | sqrt | abs
//! ```
//!
//! `^` binds tighter than unary minus, so `-x1^2` is `-(x1^2)`.

use std::fmt;

use crate::error::{Error, Result};
use crate::tensor::DenseTensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
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

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

impl Func {
    const ALL: [Func; 5] = [Func::Sin, Func::Cos, Func::Exp, Func::Sqrt, Func::Abs];

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
        }
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Exp => x.exp(),
            Func::Sqrt => x.sqrt(),
            Func::Abs => x.abs(),
        }
    }
}

/// Parse tree. Variables are 1-based (`Var(1)` is `x1`).
#[derive(Clone, Debug, PartialEq)]
pub enum ExpressionAst {
    Num(f64),
    Var(usize),
    Neg(Box<ExpressionAst>),
    Binary(BinOp, Box<ExpressionAst>, Box<ExpressionAst>),
    Call(Func, Box<ExpressionAst>),
}

impl ExpressionAst {
    /// Evaluates at `x`, where `x[0]` is the value of `x1`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            ExpressionAst::Num(v) => *v,
            ExpressionAst::Var(i) => x[i - 1],
            ExpressionAst::Neg(e) => -e.eval(x),
            ExpressionAst::Binary(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => a.powf(b),
                }
            }
            ExpressionAst::Call(f, e) => f.apply(e.eval(x)),
        }
    }

    /// Largest variable index used (0 for constant expressions).
    pub fn max_variable(&self) -> usize {
        match self {
            ExpressionAst::Num(_) => 0,
            ExpressionAst::Var(i) => *i,
            ExpressionAst::Neg(e) | ExpressionAst::Call(_, e) => e.max_variable(),
            ExpressionAst::Binary(_, a, b) => a.max_variable().max(b.max_variable()),
        }
    }

    /// Fully parenthesized text that parses back to the same tree.
    pub fn unparse(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ExpressionAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:?}` is the shortest round-tripping form
            ExpressionAst::Num(v) => write!(f, "{v:?}"),
            ExpressionAst::Var(i) => write!(f, "x{i}"),
            ExpressionAst::Neg(e) => write!(f, "(-{e})"),
            ExpressionAst::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            ExpressionAst::Call(func, e) => write!(f, "{}({e})", func.name()),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    End,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Num(v) => format!("number {v}"),
            Token::Ident(s) => format!("identifier `{s}`"),
            Token::Op(c) => format!("`{c}`"),
            Token::LParen => "`(`".into(),
            Token::RParen => "`)`".into(),
            Token::End => "end of input".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let token = match c {
            '+' | '-' | '*' | '/' | '^' => {
                i += 1;
                Token::Op(c)
            }
            '(' => {
                i += 1;
                Token::LParen
            }
            ')' => {
                i += 1;
                Token::RParen
            }
            _ if c.is_ascii_digit() || c == '.' => {
                while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                    i += 1;
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        while j < bytes.len() && bytes[j].is_ascii_digit() {
                            j += 1;
                        }
                        i = j;
                    }
                }
                let lexeme = &text[start..i];
                let value: f64 = lexeme.parse().map_err(|_| Error::Parse {
                    position: start,
                    expected: "a number".into(),
                    found: format!("`{lexeme}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Parse {
                        position: start,
                        expected: "a finite number".into(),
                        found: format!("`{lexeme}`"),
                    });
                }
                Token::Num(value)
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Token::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(Error::Parse {
                    position: start,
                    expected: "an operator, number, identifier or parenthesis".into(),
                    found: format!("`{ch}`"),
                });
            }
        };
        tokens.push((start, token));
    }
    tokens.push((text.len(), Token::End));
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos].1
    }

    fn position(&self) -> usize {
        self.tokens[self.pos].0
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].1.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            position: self.position(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expect(&mut self, token: Token, expected: &str) -> Result<()> {
        if *self.peek() == token {
            self.bump();
            Ok(())
        } else {
            Err(self.error(expected))
        }
    }

    fn expr(&mut self) -> Result<ExpressionAst> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Token::Op('+') => BinOp::Add,
                Token::Op('-') => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = ExpressionAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<ExpressionAst> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Token::Op('*') => BinOp::Mul,
                Token::Op('/') => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = ExpressionAst::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<ExpressionAst> {
        if *self.peek() == Token::Op('-') {
            self.bump();
            return Ok(ExpressionAst::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<ExpressionAst> {
        let base = self.primary()?;
        if *self.peek() == Token::Op('^') {
            self.bump();
            let exponent = self.unary()?;
            return Ok(ExpressionAst::Binary(
                BinOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<ExpressionAst> {
        let position = self.position();
        match self.peek().clone() {
            Token::Num(v) => {
                self.bump();
                Ok(ExpressionAst::Num(v))
            }
            Token::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                self.bump();
                if let Some(func) = Func::ALL.iter().find(|f| f.name() == name) {
                    self.expect(Token::LParen, "`(` after function name")?;
                    let arg = self.expr()?;
                    self.expect(Token::RParen, "`)`")?;
                    return Ok(ExpressionAst::Call(*func, Box::new(arg)));
                }
                match variable_index(&name) {
                    Some(i) => Ok(ExpressionAst::Var(i)),
                    None => Err(Error::UnknownIdentifier { name, position }),
                }
            }
            _ => Err(self.error("a number, variable, function or `(`")),
        }
    }
}

fn variable_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) || digits.starts_with('0') {
        return None;
    }
    digits.parse().ok()
}

pub fn parse_expression(text: &str) -> Result<ExpressionAst> {
    let mut parser = Parser {
        tokens: tokenize(text)?,
        pos: 0,
    };
    let ast = parser.expr()?;
    if *parser.peek() != Token::End {
        return Err(parser.error("an operator or end of input"));
    }
    Ok(ast)
}

/// Samples `ast` on the uniform grid with `points` nodes per variable,
/// endpoints included. `bounds[k]` is the interval of `x{k+1}`.
pub fn sample_grid(
    ast: &ExpressionAst,
    order: usize,
    points: usize,
    bounds: &[(f64, f64)],
) -> Result<DenseTensor> {
    if order == 0 {
        return Err(Error::out_of_range("order", order, "1.."));
    }
    if points < 2 {
        return Err(Error::out_of_range("grid points", points, "2.."));
    }
    if ast.max_variable() > order {
        return Err(Error::Structure(format!(
            "expression uses x{} but the grid has only {order} variables",
            ast.max_variable()
        )));
    }
    if bounds.len() != order {
        return Err(Error::DimMismatch(format!(
            "{} bounds given for {order} variables",
            bounds.len()
        )));
    }
    if let Some((lo, hi)) = bounds
        .iter()
        .find(|(lo, hi)| !lo.is_finite() || !hi.is_finite())
    {
        return Err(Error::NonFinite(format!("grid bounds [{lo}, {hi}]")));
    }
    let nodes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            (0..points)
                .map(|k| lo + (hi - lo) * k as f64 / (points - 1) as f64)
                .collect()
        })
        .collect();
    let mut x = vec![0.0; order];
    let mut bad = None;
    let t = DenseTensor::from_fn(vec![points; order], |idx| {
        for (k, &i) in idx.iter().enumerate() {
            x[k] = nodes[k][i];
        }
        let v = ast.eval(&x);
        if !v.is_finite() && bad.is_none() {
            bad = Some(x.clone());
        }
        v
    })?;
    if let Some(at) = bad {
        return Err(Error::NonFinite(format!(
            "expression `{ast}` is not finite at {at:?}"
        )));
    }
    Ok(t)
}
