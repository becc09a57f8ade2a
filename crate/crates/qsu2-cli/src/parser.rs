//! Recursive-descent parser for algebra expressions.
//!
//! Grammar:
//!   expr   := term (('+'|'-') term)*
//!   term   := factor ('*' factor)*
//!   factor := atom ('^' uint)?
//!   atom   := 'a' | 'b' | 'a*' | 'b*' | 'u[' uint ',' uint ',' uint ']'
//!           | complexLiteral | '(' expr ')'
//!   complexLiteral := real ('+'|'-') real 'i' | real
//!
//! A '*' immediately attached to `a` or `b` (no whitespace) lexes as the
//! adjoint; the multiplication operator must stand apart. Inputs like "a*b"
//! are rejected with a disambiguation hint.

use num_complex::Complex64;
use qsu2::algebra::{AlgebraElement, Gen};
use qsu2::corep::matrix_coeff;

#[derive(Debug, Clone, PartialEq)]
pub enum Token {
    A,
    AStar,
    B,
    BStar,
    U(u64, u64, u64),
    Num(f64),
    ImagUnit,
    Plus,
    Minus,
    Star,
    Caret,
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl std::fmt::Display for ParseError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "parse error at position {}: {}", self.pos, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Atom(AtomKind),
    Lit(Complex64),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, u32),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AtomKind {
    A,
    AStar,
    B,
    BStar,
    U(u64, u64, u64),
}

fn lex(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0usize;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        match ch {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Token::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Token::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Token::Star));
                i += 1;
            }
            '^' => {
                out.push((i, Token::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Token::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Token::RParen));
                i += 1;
            }
            'i' => {
                out.push((i, Token::ImagUnit));
                i += 1;
            }
            'a' | 'b' => {
                // a '*' immediately attached is the adjoint
                if i + 1 < bytes.len() && bytes[i + 1] == b'*' {
                    out.push((i, if ch == 'a' { Token::AStar } else { Token::BStar }));
                    i += 2;
                } else {
                    out.push((i, if ch == 'a' { Token::A } else { Token::B }));
                    i += 1;
                }
            }
            'u' => {
                let start = i;
                i += 1;
                if i >= bytes.len() || bytes[i] != b'[' {
                    return Err(ParseError {
                        pos: start,
                        msg: "expected '[' after 'u'".into(),
                    });
                }
                i += 1;
                let mut nums = Vec::new();
                for slot in 0..3 {
                    let (v, ni) = lex_uint(bytes, i)?;
                    nums.push(v);
                    i = ni;
                    let want = if slot < 2 { b',' } else { b']' };
                    if i >= bytes.len() || bytes[i] != want {
                        return Err(ParseError {
                            pos: i,
                            msg: format!("expected '{}' in u[n,i,j]", want as char),
                        });
                    }
                    i += 1;
                }
                out.push((start, Token::U(nums[0], nums[1], nums[2])));
            }
            '0'..='9' | '.' => {
                let (v, ni) = lex_real(bytes, i)?;
                out.push((i, Token::Num(v)));
                i = ni;
            }
            other => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character '{other}'"),
                })
            }
        }
    }
    Ok(out)
}

fn lex_uint(bytes: &[u8], mut i: usize) -> Result<(u64, usize), ParseError> {
    let start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i == start {
        return Err(ParseError { pos: start, msg: "expected an unsigned integer".into() });
    }
    let text = std::str::from_utf8(&bytes[start..i]).unwrap();
    text.parse::<u64>()
        .map(|v| (v, i))
        .map_err(|e| ParseError { pos: start, msg: format!("bad integer: {e}") })
}

fn lex_real(bytes: &[u8], mut i: usize) -> Result<(f64, usize), ParseError> {
    let start = i;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
    }
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            j += 1;
        }
        if j < bytes.len() && bytes[j].is_ascii_digit() {
            i = j;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
        }
    }
    if i == start {
        return Err(ParseError { pos: start, msg: "expected a number".into() });
    }
    let text = std::str::from_utf8(&bytes[start..i]).unwrap();
    text.parse::<f64>()
        .map(|v| (v, i))
        .map_err(|e| ParseError { pos: start, msg: format!("bad number: {e}") })
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    cursor: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.tokens
            .get(self.cursor)
            .map(|(p, _)| *p)
            .unwrap_or(self.len)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).map(|(_, t)| t.clone());
        self.cursor += 1;
        t
    }

    fn expect(&mut self, want: &Token, what: &str) -> Result<(), ParseError> {
        if self.peek() == Some(want) {
            self.cursor += 1;
            Ok(())
        } else {
            Err(ParseError { pos: self.pos(), msg: format!("expected {what}") })
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.bump();
                    acc = Expr::Add(Box::new(acc), Box::new(self.term()?));
                }
                Some(Token::Minus) => {
                    self.bump();
                    acc = Expr::Sub(Box::new(acc), Box::new(self.term()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.bump();
                    acc = Expr::Mul(Box::new(acc), Box::new(self.factor()?));
                }
                // an atom directly following an atom means a missing operator;
                // reject with the disambiguation hint
                Some(Token::A) | Some(Token::B) | Some(Token::AStar) | Some(Token::BStar)
                | Some(Token::U(..)) | Some(Token::Num(_)) | Some(Token::LParen) => {
                    return Err(ParseError {
                        pos: self.pos(),
                        msg: "missing '*' between atoms; a trailing '*' binds as the adjoint, \
                              so write e.g. \"a* * b\" for adjoint-times-b or \"a * b\" for a product"
                            .into(),
                    });
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let atom = self.atom()?;
        if self.peek() == Some(&Token::Caret) {
            self.bump();
            let pos = self.pos();
            match self.bump() {
                Some(Token::Num(v)) if v.fract() == 0.0 && v >= 0.0 && v <= u32::MAX as f64 => {
                    Ok(Expr::Pow(Box::new(atom), v as u32))
                }
                _ => Err(ParseError { pos, msg: "expected an unsigned integer exponent".into() }),
            }
        } else {
            Ok(atom)
        }
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Token::A) => Ok(Expr::Atom(AtomKind::A)),
            Some(Token::AStar) => Ok(Expr::Atom(AtomKind::AStar)),
            Some(Token::B) => Ok(Expr::Atom(AtomKind::B)),
            Some(Token::BStar) => Ok(Expr::Atom(AtomKind::BStar)),
            Some(Token::U(n, i, j)) => Ok(Expr::Atom(AtomKind::U(n, i, j))),
            Some(Token::Num(re)) => {
                // complexLiteral := real ('+'|'-') real 'i' | real
                let save = self.cursor;
                let sign = match self.peek() {
                    Some(Token::Plus) => Some(1.0),
                    Some(Token::Minus) => Some(-1.0),
                    _ => None,
                };
                if let Some(s) = sign {
                    self.bump();
                    if let Some(Token::Num(im)) = self.peek().cloned() {
                        self.bump();
                        if self.peek() == Some(&Token::ImagUnit) {
                            self.bump();
                            return Ok(Expr::Lit(Complex64::new(re, s * im)));
                        }
                    }
                    self.cursor = save;
                }
                Ok(Expr::Lit(Complex64::new(re, 0.0)))
            }
            Some(Token::LParen) => {
                let inner = self.expr()?;
                self.expect(&Token::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(ParseError { pos, msg: "expected an atom".into() }),
        }
    }
}

/// Parse an expression source string.
pub fn parse(src: &str) -> Result<Expr, ParseError> {
    let tokens = lex(src)?;
    let mut p = Parser { tokens, cursor: 0, len: src.len() };
    let e = p.expr()?;
    if p.cursor != p.tokens.len() {
        return Err(ParseError { pos: p.pos(), msg: "trailing input".into() });
    }
    Ok(e)
}

#[derive(Debug)]
pub struct EvalError {
    pub msg: String,
}

impl std::fmt::Display for EvalError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "evaluation error: {}", self.msg)
    }
}

impl std::error::Error for EvalError {}

/// Evaluate an expression to an algebra element at the given q.
pub fn evaluate(expr: &Expr, q: f64) -> Result<AlgebraElement, EvalError> {
    match expr {
        Expr::Atom(AtomKind::A) => Ok(AlgebraElement::generator(Gen::A, q)),
        Expr::Atom(AtomKind::AStar) => Ok(AlgebraElement::generator(Gen::AStar, q)),
        Expr::Atom(AtomKind::B) => Ok(AlgebraElement::generator(Gen::B, q)),
        Expr::Atom(AtomKind::BStar) => Ok(AlgebraElement::generator(Gen::BStar, q)),
        Expr::Atom(AtomKind::U(n, i, j)) => {
            if *i > *n || *j > *n {
                return Err(EvalError {
                    msg: format!("u[{n},{i},{j}]: indices must satisfy i,j <= n"),
                });
            }
            Ok(matrix_coeff(*n as i64, *i as i64, *j as i64, q).expansion)
        }
        Expr::Lit(c) => Ok(AlgebraElement::unit(q).scale(*c)),
        Expr::Add(l, r) => Ok(&evaluate(l, q)? + &evaluate(r, q)?),
        Expr::Sub(l, r) => Ok(&evaluate(l, q)? - &evaluate(r, q)?),
        Expr::Mul(l, r) => Ok(&evaluate(l, q)? * &evaluate(r, q)?),
        Expr::Pow(base, e) => {
            let b = evaluate(base, q)?;
            let mut acc = AlgebraElement::unit(q);
            for _ in 0..*e {
                acc = &acc * &b;
            }
            Ok(acc)
        }
    }
}
