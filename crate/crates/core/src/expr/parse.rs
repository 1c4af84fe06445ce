//! Recursive-descent parser.
//!
//! ```text
//! expr  := term (('+'|'-') term)*
//! term  := unary (('*'|'/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | 'u' | 'v' | 'w' | ident ['(' 'x' ')'] | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-u^2` is `-(u^2)`.
//! A minus directly in front of a literal (not followed by `^`) becomes a negative literal.

use super::{Expr, Func, Var, BinOp};
use crate::error::ParseError;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
    End,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        if c == '\n' {
            line += 1;
            col = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
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
            let value: f64 = text.parse().map_err(|_| ParseError {
                line: tl,
                column: tc,
                message: format!("malformed number `{text}`"),
            })?;
            if !value.is_finite() {
                return Err(ParseError {
                    line: tl,
                    column: tc,
                    message: format!("number `{text}` is out of range"),
                });
            }
            col += i - start;
            out.push(Token { tok: Tok::Num(value), line: tl, column: tc });
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            col += i - start;
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                column: tc,
            });
            continue;
        }
        if "+-*/^()".contains(c) {
            out.push(Token { tok: Tok::Sym(c), line: tl, column: tc });
            i += 1;
            col += 1;
            continue;
        }
        return Err(ParseError {
            line: tl,
            column: tc,
            message: format!("unexpected character `{c}`"),
        });
    }
    out.push(Token { tok: Tok::End, line, column: col });
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Token>,
    pos: usize,
    known: Option<&'a [&'a str]>,
}

impl Parser<'_> {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        let t = self.peek();
        Err(ParseError {
            line: t.line,
            column: t.column,
            message: message.into(),
        })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek().tok == Tok::Sym(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            let found = describe(&self.peek().tok);
            self.error(format!("expected `{c}`, found {found}"))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                BinOp::Add
            } else if self.eat('-') {
                BinOp::Sub
            } else {
                return Ok(lhs);
            };
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                BinOp::Mul
            } else if self.eat('/') {
                BinOp::Div
            } else {
                return Ok(lhs);
            };
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            if let Tok::Num(c) = *self.peek_at(0) {
                if *self.peek_at(1) != Tok::Sym('^') {
                    self.bump();
                    return Ok(Expr::Num(-c));
                }
            }
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(Expr::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        let t = self.peek().clone();
        match t.tok {
            Tok::Num(c) => {
                self.bump();
                Ok(Expr::Num(c))
            }
            Tok::Sym('(') => {
                self.bump();
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => {
                match name.as_str() {
                    "u" => {
                        self.bump();
                        return Ok(Expr::Var(Var::U));
                    }
                    "v" => {
                        self.bump();
                        return Ok(Expr::Var(Var::V));
                    }
                    "w" => {
                        self.bump();
                        return Ok(Expr::Var(Var::W));
                    }
                    "x" => return self.error("`x` may only appear as the argument of a coefficient, e.g. `gamma(x)`"),
                    _ => {}
                }
                if let Some(f) = Func::from_name(&name) {
                    self.bump();
                    if self.peek().tok != Tok::Sym('(') {
                        return self.error(format!("function `{name}` needs a parenthesized argument"));
                    }
                    self.bump();
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Expr::Call(f, Box::new(arg)));
                }
                if let Some(known) = self.known {
                    if !known.contains(&name.as_str()) {
                        return self.error(format!("unknown identifier `{name}`"));
                    }
                }
                self.bump();
                if self.peek().tok == Tok::Sym('(') && *self.peek_at(1) == Tok::Ident("x".into()) {
                    self.bump();
                    self.bump();
                    self.expect(')')?;
                }
                Ok(Expr::Coef(name))
            }
            other => {
                let found = describe(&other);
                self.error(format!("expected an operand, found {found}"))
            }
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Num(c) => format!("number `{c}`"),
        Tok::Ident(s) => format!("`{s}`"),
        Tok::Sym(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

fn run(src: &str, known: Option<&[&str]>) -> Result<Expr, ParseError> {
    let mut p = Parser {
        toks: lex(src)?,
        pos: 0,
        known,
    };
    let e = p.expr()?;
    if p.peek().tok != Tok::End {
        let found = describe(&p.peek().tok);
        return p.error(format!("unexpected {found} after expression"));
    }
    Ok(e)
}

/// Parses an expression; any non-reserved identifier is taken as a coefficient name.
pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    run(src, None)
}

/// Parses an expression, rejecting coefficient names outside `known`.
pub fn parse_expr_with(src: &str, known: &[&str]) -> Result<Expr, ParseError> {
    run(src, Some(known))
}
