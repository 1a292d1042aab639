//! A small arithmetic grammar over the parameter symbols.
//!
//! ```text
//! constraint := sum (cmp sum)+          cmp: < <= > >= ≤ ≥
//! sum        := product (("+" | "-") product)*
//! product    := unary (("*" | "/") unary)*
//! unary      := "-" unary | power
//! power      := atom ("^" unary)?       right associative
//! atom       := number | symbol | "abs" "(" sum ")" | "(" sum ")"
//! ```

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use super::Params;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },
    #[error("unknown symbol '{name}' at column {column}")]
    UnknownSymbol { name: String, column: usize },
    #[error("missing parameter {0}")]
    MissingParam(&'static str),
}

/// Parameter symbols usable in expressions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    N,
    Alpha,
    P,
    C,
    Q,
    S,
    R,
    FksC,
    Sn,
}

impl Symbol {
    pub const ALL: [Symbol; 9] = [
        Symbol::N,
        Symbol::Alpha,
        Symbol::P,
        Symbol::C,
        Symbol::Q,
        Symbol::S,
        Symbol::R,
        Symbol::FksC,
        Symbol::Sn,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Symbol::N => "n",
            Symbol::Alpha => "alpha",
            Symbol::P => "p",
            Symbol::C => "C",
            Symbol::Q => "q",
            Symbol::S => "s",
            Symbol::R => "R",
            Symbol::FksC => "c",
            Symbol::Sn => "Sn",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|s| s.name() == name)
    }

    fn index(&self) -> usize {
        *self as usize
    }

    pub fn value(&self, params: &Params) -> Result<f64, ExprError> {
        let need = |v: Option<f64>, name| v.ok_or(ExprError::MissingParam(name));
        match self {
            Symbol::N => Ok(f64::from(params.n)),
            Symbol::Alpha => need(params.alpha, "alpha"),
            Symbol::P => need(params.p, "p"),
            Symbol::C => Ok(params.geometric_c()),
            Symbol::Q => need(params.q, "q"),
            Symbol::S => need(params.s, "s"),
            Symbol::R => need(params.radius, "R"),
            Symbol::FksC => need(params.fks_c, "c"),
            Symbol::Sn => Ok(super::sphere_area(params.n)),
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
    fn precedence(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
            BinOp::Pow => 4,
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => " + ",
            BinOp::Sub => " - ",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(Symbol),
    Neg(Box<Expr>),
    Abs(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(src)?;
        let e = p.sum()?;
        p.expect_end()?;
        Ok(e)
    }

    pub fn num(v: f64) -> Self {
        Expr::Num(v)
    }

    pub fn eval(&self, params: &Params) -> Result<f64, ExprError> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Var(s) => s.value(params)?,
            Expr::Neg(e) => -e.eval(params)?,
            Expr::Abs(e) => e.eval(params)?.abs(),
            Expr::Bin(op, l, r) => {
                let a = l.eval(params)?;
                let b = r.eval(params)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => a / b,
                    BinOp::Pow => {
                        if b.fract() == 0.0 && b.abs() < 1024.0 {
                            a.powi(b as i32)
                        } else {
                            a.powf(b)
                        }
                    }
                }
            }
        })
    }

    /// Every symbol referenced, in first-occurrence order.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut Vec<Symbol>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(s) => {
                if !out.contains(s) {
                    out.push(*s);
                }
            }
            Expr::Neg(e) | Expr::Abs(e) => e.collect(out),
            Expr::Bin(_, l, r) => {
                l.collect(out);
                r.collect(out);
            }
        }
    }

    pub fn references(&self, symbol: Symbol) -> bool {
        self.symbols().contains(&symbol)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Bin(op, _, _) => op.precedence(),
            Expr::Neg(_) => 3,
            Expr::Num(_) | Expr::Var(_) | Expr::Abs(_) => 5,
        }
    }

    /// Expands into a polynomial when the expression is built from `+ − *`,
    /// division by constants and non-negative integer powers.
    pub fn to_polynomial(&self) -> Option<Polynomial> {
        Some(match self {
            Expr::Num(v) => Polynomial::constant(*v),
            Expr::Var(s) => Polynomial::variable(*s),
            Expr::Neg(e) => e.to_polynomial()?.scale(-1.0),
            Expr::Abs(_) => return None,
            Expr::Bin(op, l, r) => {
                let a = l.to_polynomial()?;
                let b = r.to_polynomial()?;
                match op {
                    BinOp::Add => a.add(&b),
                    BinOp::Sub => a.add(&b.scale(-1.0)),
                    BinOp::Mul => a.mul(&b),
                    BinOp::Div => {
                        let k = b.as_constant()?;
                        if k == 0.0 {
                            return None;
                        }
                        a.scale(1.0 / k)
                    }
                    BinOp::Pow => {
                        let k = b.as_constant()?;
                        if k < 0.0 || k.fract() != 0.0 || k > 64.0 {
                            return None;
                        }
                        (0..k as u32).fold(Polynomial::constant(1.0), |acc, _| acc.mul(&a))
                    }
                }
            }
        })
    }

    /// Symbolic equality of two polynomial expressions.
    pub fn equivalent(&self, other: &Expr) -> bool {
        match (self.to_polynomial(), other.to_polynomial()) {
            (Some(a), Some(b)) => a.add(&b.scale(-1.0)).is_zero(1e-12),
            _ => false,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Var(s) => f.write_str(s.name()),
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Neg(e) => {
                if e.precedence() < 3 {
                    write!(f, "-({e})")
                } else {
                    write!(f, "-{e}")
                }
            }
            Expr::Bin(op, l, r) => {
                let prec = op.precedence();
                let left_parens = if *op == BinOp::Pow {
                    l.precedence() <= prec
                } else {
                    l.precedence() < prec
                };
                let right_parens = if *op == BinOp::Pow {
                    r.precedence() < 3
                } else {
                    r.precedence() <= prec
                };
                if left_parens {
                    write!(f, "({l})")?;
                } else {
                    write!(f, "{l}")?;
                }
                f.write_str(op.symbol())?;
                if right_parens {
                    write!(f, "({r})")
                } else {
                    write!(f, "{r}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn holds(&self, a: f64, b: f64) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
        }
    }
}

/// A chained comparison such as `(8 - n)/3 < alpha < 2`.
#[derive(Debug, Clone)]
pub struct Constraint {
    source: String,
    operands: Vec<Expr>,
    ops: Vec<CmpOp>,
}

impl PartialEq for Constraint {
    fn eq(&self, other: &Self) -> bool {
        self.operands == other.operands && self.ops == other.ops
    }
}

impl Constraint {
    pub fn parse(src: &str) -> Result<Self, ExprError> {
        let mut p = Parser::new(src)?;
        let mut operands = vec![p.sum()?];
        let mut ops = Vec::new();
        while let Some(op) = p.comparison() {
            ops.push(op);
            operands.push(p.sum()?);
        }
        if ops.is_empty() {
            return Err(p.error("expected a comparison"));
        }
        p.expect_end()?;
        Ok(Self {
            source: src.trim().to_string(),
            operands,
            ops,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out = Vec::new();
        for e in &self.operands {
            e.collect(&mut out);
        }
        out
    }

    pub fn holds(&self, params: &Params) -> Result<bool, ExprError> {
        let values = self
            .operands
            .iter()
            .map(|e| e.eval(params))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self
            .ops
            .iter()
            .zip(values.windows(2))
            .all(|(op, w)| op.holds(w[0], w[1])))
    }
}

impl fmt::Display for Constraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    Cmp(CmpOp),
    LParen,
    RParen,
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    end_column: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ExprError> {
        let chars: Vec<char> = src.chars().collect();
        let mut tokens = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            let ch = chars[i];
            let column = i + 1;
            if ch.is_whitespace() {
                i += 1;
                continue;
            }
            if ch.is_ascii_digit() || ch == '.' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text: String = chars[start..i].iter().collect();
                let v = text.parse::<f64>().map_err(|_| ExprError::Parse {
                    column,
                    message: format!("invalid number '{text}'"),
                })?;
                tokens.push((Token::Num(v), column));
                continue;
            }
            if ch.is_alphabetic() || ch == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                tokens.push((Token::Ident(chars[start..i].iter().collect()), column));
                continue;
            }
            let next = chars.get(i + 1).copied();
            let (tok, width) = match (ch, next) {
                ('<', Some('=')) => (Token::Cmp(CmpOp::Le), 2),
                ('>', Some('=')) => (Token::Cmp(CmpOp::Ge), 2),
                ('<', _) => (Token::Cmp(CmpOp::Lt), 1),
                ('>', _) => (Token::Cmp(CmpOp::Gt), 1),
                ('≤', _) => (Token::Cmp(CmpOp::Le), 1),
                ('≥', _) => (Token::Cmp(CmpOp::Ge), 1),
                ('(', _) => (Token::LParen, 1),
                (')', _) => (Token::RParen, 1),
                ('+' | '-' | '*' | '/' | '^', _) => (Token::Op(ch), 1),
                ('−', _) => (Token::Op('-'), 1),
                _ => {
                    return Err(ExprError::Parse {
                        column,
                        message: format!("unexpected character '{ch}'"),
                    })
                }
            };
            tokens.push((tok, column));
            i += width;
        }
        Ok(Self {
            tokens,
            pos: 0,
            end_column: chars.len() + 1,
        })
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |(_, c)| *c)
    }

    fn error(&self, message: &str) -> ExprError {
        let found = match self.peek() {
            None => "end of input".to_string(),
            Some(t) => format!("{t:?}"),
        };
        ExprError::Parse {
            column: self.column(),
            message: format!("{message}, found {found}"),
        }
    }

    fn expect_end(&self) -> Result<(), ExprError> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token::Op(c)) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn comparison(&mut self) -> Option<CmpOp> {
        match self.peek() {
            Some(Token::Cmp(op)) => {
                let op = *op;
                self.pos += 1;
                Some(op)
            }
            _ => None,
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.product()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.product()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let column = self.column();
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Num(v))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let e = self.sum()?;
                self.close()?;
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                if name == "abs" {
                    if self.peek() != Some(&Token::LParen) {
                        return Err(self.error("expected '(' after abs"));
                    }
                    self.pos += 1;
                    let e = self.sum()?;
                    self.close()?;
                    return Ok(Expr::Abs(Box::new(e)));
                }
                Symbol::from_name(&name)
                    .map(Expr::Var)
                    .ok_or(ExprError::UnknownSymbol { name, column })
            }
            _ => Err(self.error("expected a number, symbol or '('")),
        }
    }

    fn close(&mut self) -> Result<(), ExprError> {
        if self.peek() == Some(&Token::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error("expected ')'"))
        }
    }
}

/// Multivariate polynomial keyed by exponent vectors over [`Symbol::ALL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    terms: BTreeMap<[u32; 9], f64>,
}

impl Polynomial {
    fn constant(v: f64) -> Self {
        let mut terms = BTreeMap::new();
        if v != 0.0 {
            terms.insert([0; 9], v);
        }
        Self { terms }
    }

    fn variable(s: Symbol) -> Self {
        let mut key = [0; 9];
        key[s.index()] = 1;
        Self {
            terms: BTreeMap::from([(key, 1.0)]),
        }
    }

    fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&[0; 9]).copied(),
            _ => None,
        }
    }

    fn scale(&self, k: f64) -> Self {
        Self {
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            *terms.entry(*m).or_insert(0.0) += c;
        }
        Self { terms }
    }

    fn mul(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<[u32; 9], f64> = BTreeMap::new();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let mut m = *ma;
                for (x, y) in m.iter_mut().zip(mb) {
                    *x += y;
                }
                *terms.entry(m).or_insert(0.0) += ca * cb;
            }
        }
        Self { terms }
    }

    fn is_zero(&self, tol: f64) -> bool {
        self.terms.values().all(|c| c.abs() <= tol)
    }
}
