//! Recursive-descent parser for method bodies and guards.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | power ;
//! power   = atom [ "^" unary ] ;
//! atom    = number | "(" expr ")" | func "(" expr ")" | "$" ident [ "[" int "]" ] | ident ;
//! func    = "sin" | "cos" | "sqrt" | "neg" ;
//! guard   = atom_g { ("&" | "&&" | "and" | "∧") atom_g } ;
//! atom_g  = ident "=" number ;
//! ```

use super::{BinOp, Expr, ExprError, Func, GuardAtom};
use crate::scalar::Scalar;

pub(crate) struct Parser<'a> {
    src: &'a str,
    pos: usize,
    expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    Eof,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(src: &'a str) -> Self {
        Self {
            src,
            pos: 0,
            expected: Vec::new(),
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn location(&self, at: usize) -> (usize, usize) {
        let before = &self.src[..at];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
        (line, column)
    }

    fn error(&self, at: usize) -> ExprError {
        let (line, column) = self.location(at);
        let found = match self.src[at..].chars().next() {
            Some(c) => format!("`{c}`"),
            None => "end of input".to_owned(),
        };
        let mut expected: Vec<String> = self.expected.iter().map(|s| (*s).to_owned()).collect();
        expected.sort();
        expected.dedup();
        ExprError::Parse {
            line,
            column,
            expected,
            found,
        }
    }

    /// Reads one token without consuming it. Returns the token and its end.
    fn peek(&mut self) -> (Tok, usize) {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let Some(c) = rest.chars().next() else {
            return (Tok::Eof, self.pos);
        };
        if c.is_ascii_digit() || c == '.' {
            let mut end = 0;
            let bytes = rest.as_bytes();
            while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
                end += 1;
            }
            if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
                let mut e = end + 1;
                if e < bytes.len() && (bytes[e] == b'+' || bytes[e] == b'-') {
                    e += 1;
                }
                if e < bytes.len() && bytes[e].is_ascii_digit() {
                    while e < bytes.len() && bytes[e].is_ascii_digit() {
                        e += 1;
                    }
                    end = e;
                }
            }
            return match rest[..end].parse::<f64>() {
                Ok(n) => (Tok::Num(n), self.pos + end),
                Err(_) => (Tok::Sym('.'), self.pos + 1),
            };
        }
        if c.is_alphabetic() || c == '_' {
            let end = rest
                .char_indices()
                .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_'))
                .map_or(rest.len(), |(i, _)| i);
            return (Tok::Ident(rest[..end].to_owned()), self.pos + end);
        }
        if rest.starts_with("&&") {
            return (Tok::Sym('&'), self.pos + 2);
        }
        (Tok::Sym(c), self.pos + c.len_utf8())
    }

    fn eat_sym(&mut self, sym: char, label: &'static str) -> bool {
        match self.peek() {
            (Tok::Sym(c), end) if c == sym => {
                self.pos = end;
                self.expected.clear();
                true
            }
            _ => {
                self.expected.push(label);
                false
            }
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        match self.peek() {
            (Tok::Ident(w), end) if w == word => {
                self.pos = end;
                true
            }
            _ => false,
        }
    }

    fn expect_sym(&mut self, sym: char, label: &'static str) -> Result<(), ExprError> {
        if self.eat_sym(sym, label) {
            Ok(())
        } else {
            Err(self.error(self.pos))
        }
    }

    fn expect_eof(&mut self) -> Result<(), ExprError> {
        match self.peek() {
            (Tok::Eof, _) => Ok(()),
            _ => {
                self.expected.push("end of input");
                Err(self.error(self.pos))
            }
        }
    }

    pub(crate) fn parse_expr<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        let e = self.expr()?;
        self.expect_eof()?;
        Ok(e)
    }

    fn expr<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat_sym('+', "`+`") {
                BinOp::Add
            } else if self.eat_sym('-', "`-`") {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.term()?);
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat_sym('*', "`*`") {
                BinOp::Mul
            } else if self.eat_sym('/', "`/`") {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        if self.eat_sym('-', "`-`") {
            return Ok(Expr::call(Func::Neg, self.unary()?));
        }
        self.power()
    }

    fn power<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        let base = self.atom()?;
        if self.eat_sym('^', "`^`") {
            return Ok(Expr::binary(BinOp::Pow, base, self.unary()?));
        }
        Ok(base)
    }

    fn atom<S: Scalar>(&mut self) -> Result<Expr<S>, ExprError> {
        let start = self.pos;
        match self.peek() {
            (Tok::Num(n), end) => {
                self.pos = end;
                self.expected.clear();
                Ok(Expr::Num(S::of(n)))
            }
            (Tok::Sym('('), end) => {
                self.pos = end;
                self.expected.clear();
                let e = self.expr()?;
                self.expect_sym(')', "`)`")?;
                Ok(e)
            }
            (Tok::Sym('$'), end) => {
                self.pos = end;
                self.expected.clear();
                let name = self.ident("property name")?;
                let index = if self.eat_sym('[', "`[`") {
                    let idx = self.index()?;
                    self.expect_sym(']', "`]`")?;
                    Some(idx)
                } else {
                    None
                };
                Ok(Expr::Prop { name, index })
            }
            (Tok::Ident(name), end) => {
                self.pos = end;
                self.expected.clear();
                if self.eat_sym('(', "`(`") {
                    let Some(func) = Func::from_name(&name) else {
                        self.expected = vec!["function name (sin, cos, sqrt, neg)"];
                        return Err(self.error(start_of_token(self.src, start)));
                    };
                    let arg = self.expr()?;
                    self.expect_sym(')', "`)`")?;
                    return Ok(Expr::call(func, arg));
                }
                self.expected.clear();
                Ok(Expr::Var(name))
            }
            _ => {
                self.expected.extend(["number", "identifier", "`(`", "`$`", "`-`"]);
                Err(self.error(start_of_token(self.src, start)))
            }
        }
    }

    fn ident(&mut self, label: &'static str) -> Result<String, ExprError> {
        match self.peek() {
            (Tok::Ident(name), end) => {
                self.pos = end;
                self.expected.clear();
                Ok(name)
            }
            _ => {
                self.expected.push(label);
                let at = start_of_token(self.src, self.pos);
                Err(self.error(at))
            }
        }
    }

    fn index(&mut self) -> Result<usize, ExprError> {
        match self.peek() {
            (Tok::Num(n), end) if n >= 0.0 && n.fract() == 0.0 => {
                self.pos = end;
                self.expected.clear();
                Ok(n as usize)
            }
            _ => {
                self.expected.push("tuple index");
                let at = start_of_token(self.src, self.pos);
                Err(self.error(at))
            }
        }
    }

    pub(crate) fn parse_guard<S: Scalar>(&mut self) -> Result<Vec<GuardAtom<S>>, ExprError> {
        let mut atoms = vec![self.guard_atom()?];
        loop {
            let conj = self.eat_sym('&', "`&`") || self.eat_sym('∧', "`∧`") || self.eat_word("and");
            if !conj {
                break;
            }
            atoms.push(self.guard_atom()?);
        }
        self.expect_eof()?;
        Ok(atoms)
    }

    fn guard_atom<S: Scalar>(&mut self) -> Result<GuardAtom<S>, ExprError> {
        let property = self.ident("property name")?;
        self.expect_sym('=', "`=`")?;
        match self.peek() {
            (Tok::Num(n), end) => {
                self.pos = end;
                self.expected.clear();
                Ok(GuardAtom {
                    property,
                    degree: S::of(n),
                })
            }
            _ => {
                self.expected.push("degree");
                let at = start_of_token(self.src, self.pos);
                Err(self.error(at))
            }
        }
    }
}

fn start_of_token(src: &str, from: usize) -> usize {
    let rest = &src[from..];
    from + (rest.len() - rest.trim_start().len())
}
