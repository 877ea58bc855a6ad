//! Expression parser for polynomials over a fixed variable registry.
//!
//! Grammar: `+ - * ^`, parentheses, unary minus, integer / decimal /
//! scientific literals, and division by constant subexpressions. The
//! identifier `I` is the imaginary unit unless it is a declared variable.

use super::{Polynomial, Vars, C64};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}, column {col}: {msg}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    End,
}

struct Lexer {
    toks: Vec<(Tok, usize)>,
}

fn lex(src: &str) -> Result<Lexer, (usize, String)> {
    let chars: Vec<char> = src.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let ch = chars[i];
        if ch.is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if ch.is_ascii_digit() || (ch == '.' && chars.get(i + 1).is_some_and(|c| c.is_ascii_digit())) {
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
            let v: f64 = text.parse().map_err(|_| (start, format!("malformed number `{text}`")))?;
            toks.push((Tok::Num(v), start));
        } else if ch.is_alphabetic() || ch == '_' {
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            toks.push((Tok::Ident(chars[start..i].iter().collect()), start));
        } else if "+-*/^()".contains(ch) {
            toks.push((Tok::Op(ch), start));
            i += 1;
        } else {
            return Err((start, format!("unexpected character `{ch}`")));
        }
    }
    toks.push((Tok::End, chars.len()));
    Ok(Lexer { toks })
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    vars: &'a Vars,
}

type PResult<T> = Result<T, (usize, String)>;

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn col(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expr(&mut self) -> PResult<Polynomial> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Tok::Op('+') => {
                    self.bump();
                    acc = &acc + &self.term()?;
                }
                Tok::Op('-') => {
                    self.bump();
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> PResult<Polynomial> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Tok::Op('*') => {
                    self.bump();
                    acc = &acc * &self.unary()?;
                }
                Tok::Op('/') => {
                    self.bump();
                    let col = self.col();
                    let d = self.unary()?;
                    if !d.is_constant() {
                        return Err((col, "division by a non-constant expression".into()));
                    }
                    let c = d.coeff(&vec![0; self.vars.len()]);
                    if c == C64::new(0.0, 0.0) {
                        return Err((col, "division by zero".into()));
                    }
                    acc = acc.scale(c.inv());
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> PResult<Polynomial> {
        match self.peek() {
            Tok::Op('-') => {
                self.bump();
                Ok(-&self.unary()?)
            }
            Tok::Op('+') => {
                self.bump();
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> PResult<Polynomial> {
        let base = self.atom()?;
        if let Tok::Op('^') = self.peek() {
            self.bump();
            let col = self.col();
            match self.bump() {
                Tok::Num(v) if v >= 0.0 && v.fract() == 0.0 && v <= u32::MAX as f64 => Ok(base.pow(v as u32)),
                _ => Err((col, "exponent must be a non-negative integer literal".into())),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> PResult<Polynomial> {
        let col = self.col();
        match self.bump() {
            Tok::Num(v) => Ok(Polynomial::constant(self.vars, v)),
            Tok::Ident(name) => match self.vars.index_of(&name) {
                Some(i) => Ok(Polynomial::var(self.vars, i)),
                None if name == "I" => Ok(Polynomial::constant(self.vars, C64::new(0.0, 1.0))),
                None => Err((col, format!("unknown variable `{name}`"))),
            },
            Tok::Op('(') => {
                let inner = self.expr()?;
                let col = self.col();
                match self.bump() {
                    Tok::Op(')') => Ok(inner),
                    _ => Err((col, "expected `)`".into())),
                }
            }
            Tok::End => Err((col, "unexpected end of expression".into())),
            Tok::Op(c) => Err((col, format!("unexpected `{c}`"))),
        }
    }
}

/// Parses `src` as a polynomial over `vars`. Reported positions are on line 1.
pub fn parse_polynomial(src: &str, vars: &Vars) -> Result<Polynomial, ParseError> {
    parse_polynomial_at(src, vars, 1, 1)
}

/// Like [`parse_polynomial`] with `src` located at `line`, starting at column `col0`.
pub fn parse_polynomial_at(src: &str, vars: &Vars, line: usize, col0: usize) -> Result<Polynomial, ParseError> {
    let err = |(col, msg): (usize, String)| ParseError { line, col: col0 + col, msg };
    let lexer = lex(src).map_err(err)?;
    let mut p = Parser { toks: lexer.toks, pos: 0, vars };
    let out = p.expr().map_err(err)?;
    if *p.peek() != Tok::End {
        let col = p.col();
        return Err(err((col, "unexpected trailing input".into())));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_literals() {
        let v = Vars::new(["x", "y"]);
        let a = parse_polynomial("-x^2 + 2*y - 1.5e1/3", &v).unwrap();
        let b = Polynomial::from_terms(
            &v,
            [(vec![2, 0], C64::new(-1.0, 0.0)), (vec![0, 1], C64::new(2.0, 0.0)), (vec![0, 0], C64::new(-5.0, 0.0))],
        );
        assert_eq!(a, b);
    }

    #[test]
    fn imaginary_unit() {
        let v = Vars::new(["x"]);
        let a = parse_polynomial("(1+2*I)*x", &v).unwrap();
        assert_eq!(a.coeff(&[1]), C64::new(1.0, 2.0));
    }

    #[test]
    fn errors_carry_position() {
        let v = Vars::new(["x", "y"]);
        let e = parse_polynomial("x + w", &v).unwrap_err();
        assert_eq!((e.line, e.col), (1, 5));
        let e = parse_polynomial("x / y", &v).unwrap_err();
        assert!(e.msg.contains("non-constant"));
        let e = parse_polynomial_at("x^y", &v, 3, 10).unwrap_err();
        assert_eq!((e.line, e.col), (3, 12));
        assert!(parse_polynomial("(x + 1", &v).is_err());
        assert!(parse_polynomial("x $ 1", &v).is_err());
        assert!(parse_polynomial("x y", &v).is_err());
    }
}
