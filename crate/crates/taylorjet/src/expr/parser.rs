//! Recursive-descent parser for the expression grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' NAT)? | '-' factor
//! atom   := NUM | VAR | FUNC '(' expr ')' | '(' expr (',' expr)* ')'
//! VAR    := 'x' NAT      FUNC ∈ {sin, cos, exp, ln}
//! ```
//!
//! A parenthesized comma list at top level builds a map of coarity > 1.

use thiserror::Error;

use super::{Expr, SmoothMap};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("syntax error at {line}:{col}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub message: String,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
    line: usize,
    col: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Parser<'a, S> {
    lexer: Lexer<'a>,
    tok: Tok,
    tok_line: usize,
    tok_col: usize,
    _marker: std::marker::PhantomData<S>,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer {
            src: src.as_bytes(),
            pos: 0,
            line: 1,
            col: 1,
        }
    }

    fn bump(&mut self) -> Option<u8> {
        let b = self.src.get(self.pos).copied()?;
        self.pos += 1;
        if b == b'\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(b)
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn next_token(&mut self) -> Result<(Tok, usize, usize), ParseError> {
        while matches!(self.peek(), Some(b) if b.is_ascii_whitespace()) {
            self.bump();
        }
        let (line, col) = (self.line, self.col);
        let Some(b) = self.peek() else {
            return Ok((Tok::Eof, line, col));
        };
        let tok = match b {
            b'+' => {
                self.bump();
                Tok::Plus
            }
            b'-' => {
                self.bump();
                Tok::Minus
            }
            b'*' => {
                self.bump();
                Tok::Star
            }
            b'/' => {
                self.bump();
                Tok::Slash
            }
            b'^' => {
                self.bump();
                Tok::Caret
            }
            b'(' => {
                self.bump();
                Tok::LParen
            }
            b')' => {
                self.bump();
                Tok::RParen
            }
            b',' => {
                self.bump();
                Tok::Comma
            }
            b'0'..=b'9' | b'.' => {
                let mut text = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                    text.push(self.bump().unwrap() as char);
                }
                Tok::Num(text)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut text = String::new();
                while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'_') {
                    text.push(self.bump().unwrap() as char);
                }
                Tok::Ident(text)
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character {:?}", other as char),
                })
            }
        };
        Ok((tok, line, col))
    }
}

enum Parsed<S> {
    One(Expr<S>),
    Tuple(Vec<Expr<S>>),
}

impl<S: Scalar> Parsed<S> {
    fn scalar(self, line: usize, col: usize) -> Result<Expr<S>, ParseError> {
        match self {
            Parsed::One(e) => Ok(e),
            Parsed::Tuple(_) => Err(ParseError {
                line,
                col,
                message: "tuple used in scalar context".to_string(),
            }),
        }
    }
}

impl<'a, S: Scalar> Parser<'a, S> {
    fn new(src: &'a str) -> Result<Self, ParseError> {
        let mut lexer = Lexer::new(src);
        let (tok, tok_line, tok_col) = lexer.next_token()?;
        Ok(Parser {
            lexer,
            tok,
            tok_line,
            tok_col,
            _marker: std::marker::PhantomData,
        })
    }

    fn advance(&mut self) -> Result<(), ParseError> {
        let (tok, line, col) = self.lexer.next_token()?;
        self.tok = tok;
        self.tok_line = line;
        self.tok_col = col;
        Ok(())
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.tok_line,
            col: self.tok_col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<(), ParseError> {
        if self.tok == tok {
            self.advance()
        } else {
            Err(self.error(format!("expected {what}, found {}", describe(&self.tok))))
        }
    }

    fn parse_expr(&mut self) -> Result<Parsed<S>, ParseError> {
        let (line, col) = (self.tok_line, self.tok_col);
        let mut acc = self.parse_term()?;
        loop {
            match self.tok {
                Tok::Plus => {
                    self.advance()?;
                    let rhs = self.parse_term()?.scalar(self.tok_line, self.tok_col)?;
                    acc = Parsed::One(Expr::add(acc.scalar(line, col)?, rhs));
                }
                Tok::Minus => {
                    self.advance()?;
                    let rhs = self.parse_term()?.scalar(self.tok_line, self.tok_col)?;
                    acc = Parsed::One(Expr::sub(acc.scalar(line, col)?, rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<Parsed<S>, ParseError> {
        let (line, col) = (self.tok_line, self.tok_col);
        let mut acc = self.parse_factor()?;
        loop {
            match self.tok {
                Tok::Star => {
                    self.advance()?;
                    let rhs = self.parse_factor()?.scalar(self.tok_line, self.tok_col)?;
                    acc = Parsed::One(Expr::mul(acc.scalar(line, col)?, rhs));
                }
                Tok::Slash => {
                    self.advance()?;
                    let rhs = self.parse_factor()?.scalar(self.tok_line, self.tok_col)?;
                    acc = Parsed::One(Expr::div(acc.scalar(line, col)?, rhs));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<Parsed<S>, ParseError> {
        if self.tok == Tok::Minus {
            self.advance()?;
            let inner = self.parse_factor()?.scalar(self.tok_line, self.tok_col)?;
            return Ok(Parsed::One(Expr::neg(inner)));
        }
        let (line, col) = (self.tok_line, self.tok_col);
        let atom = self.parse_atom()?;
        if self.tok == Tok::Caret {
            self.advance()?;
            let Tok::Num(text) = self.tok.clone() else {
                return Err(self.error("expected a natural number exponent"));
            };
            let k: u32 = text
                .parse()
                .map_err(|_| self.error(format!("invalid exponent `{text}`")))?;
            self.advance()?;
            return Ok(Parsed::One(Expr::powi(atom.scalar(line, col)?, k)));
        }
        Ok(atom)
    }

    fn parse_atom(&mut self) -> Result<Parsed<S>, ParseError> {
        match self.tok.clone() {
            Tok::Num(text) => {
                let c = S::parse_literal(&text)
                    .map_err(|e| self.error(format!("invalid number `{text}`: {e}")))?;
                self.advance()?;
                Ok(Parsed::One(Expr::constant(c)))
            }
            Tok::Ident(name) => {
                if let Some(index) = name.strip_prefix('x') {
                    if let Ok(i) = index.parse::<usize>() {
                        self.advance()?;
                        return Ok(Parsed::One(Expr::var(i)));
                    }
                }
                match name.as_str() {
                    "sin" | "cos" | "exp" | "ln" => {
                        self.advance()?;
                        self.expect(Tok::LParen, "`(`")?;
                        let arg = self.parse_expr()?.scalar(self.tok_line, self.tok_col)?;
                        self.expect(Tok::RParen, "`)`")?;
                        Ok(Parsed::One(match name.as_str() {
                            "sin" => Expr::sin(arg),
                            "cos" => Expr::cos(arg),
                            "exp" => Expr::exp(arg),
                            _ => Expr::ln(arg),
                        }))
                    }
                    _ => Err(self.error(format!("unknown identifier `{name}`"))),
                }
            }
            Tok::LParen => {
                self.advance()?;
                let first = self.parse_expr()?.scalar(self.tok_line, self.tok_col)?;
                if self.tok == Tok::Comma {
                    let mut parts = vec![first];
                    while self.tok == Tok::Comma {
                        self.advance()?;
                        parts.push(self.parse_expr()?.scalar(self.tok_line, self.tok_col)?);
                    }
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Parsed::Tuple(parts))
                } else {
                    self.expect(Tok::RParen, "`)`")?;
                    Ok(Parsed::One(first))
                }
            }
            Tok::Eof => Err(self.error("unexpected end of input")),
            other => Err(self.error(format!("unexpected {}", describe(&other)))),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::Num(t) => format!("number `{t}`"),
        Tok::Ident(t) => format!("identifier `{t}`"),
        Tok::Plus => "`+`".into(),
        Tok::Minus => "`-`".into(),
        Tok::Star => "`*`".into(),
        Tok::Slash => "`/`".into(),
        Tok::Caret => "`^`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Comma => "`,`".into(),
        Tok::Eof => "end of input".into(),
    }
}

/// Parses a map; arity is inferred as the largest variable index plus one.
/// Use [`SmoothMap::with_arity`] to widen a map that skips trailing inputs.
pub fn parse<S: Scalar>(text: &str) -> Result<SmoothMap<S>, ParseError> {
    let mut parser = Parser::<S>::new(text)?;
    let parsed = parser.parse_expr()?;
    if parser.tok != Tok::Eof {
        return Err(parser.error(format!("unexpected {}", describe(&parser.tok))));
    }
    let body = match parsed {
        Parsed::One(e) => vec![e],
        Parsed::Tuple(parts) => parts,
    };
    let arity = body
        .iter()
        .filter_map(|e| e.max_var())
        .max()
        .map_or(0, |m| m + 1);
    Ok(SmoothMap::new(arity, body))
}

/// Parses a single scalar expression.
pub fn parse_expr<S: Scalar>(text: &str) -> Result<Expr<S>, ParseError> {
    let map = parse(text)?;
    if map.coarity() != 1 {
        return Err(ParseError {
            line: 1,
            col: 1,
            message: "expected a scalar expression, found a tuple".to_string(),
        });
    }
    Ok(map.body()[0].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;
    use num_rational::BigRational;

    type Q = BigRational;

    #[test]
    fn grammar_examples() {
        let m = parse::<Q>("x0^3").unwrap();
        assert_eq!(m.arity(), 1);
        assert_eq!(m.body()[0], Expr::powi(Expr::var(0), 3));

        let m = parse::<Q>("sin(x0)*x1 + 2").unwrap();
        assert_eq!(m.arity(), 2);
        assert_eq!(
            m.body()[0],
            Expr::add(
                Expr::mul(Expr::sin(Expr::var(0)), Expr::var(1)),
                Expr::constant(rat(2, 1)),
            )
        );
    }

    #[test]
    fn error_positions() {
        let err = parse::<Q>("x0 +").unwrap_err();
        assert_eq!((err.line, err.col), (1, 5));
        assert!(err.message.contains("end of input"));

        let err = parse::<Q>("foo(x0)").unwrap_err();
        assert!(err.message.contains("unknown identifier"));

        let err = parse::<Q>("x0 $ x1").unwrap_err();
        assert!(err.message.contains("unexpected character"));
    }

    #[test]
    fn tuples() {
        let m = parse::<Q>("(x0 + x1, x0*x1)").unwrap();
        assert_eq!(m.coarity(), 2);
        assert_eq!(m.arity(), 2);

        // grouping is not a tuple
        let m = parse::<Q>("(x0 + 1)*x0").unwrap();
        assert_eq!(m.coarity(), 1);

        // tuples cannot appear inside arithmetic
        assert!(parse::<Q>("(x0, x1) + 1").is_err());
    }

    #[test]
    fn precedence() {
        let m = parse::<Q>("2*x0^3 - -x0").unwrap();
        assert_eq!(
            m.eval(&[rat(2, 1)]).unwrap(),
            vec![rat(18, 1)]
        );
        // unary minus binds looser than `^`
        let m = parse::<Q>("-x0^2").unwrap();
        assert_eq!(m.eval(&[rat(3, 1)]).unwrap(), vec![rat(-9, 1)]);
    }

    #[test]
    fn decimals_are_exact_rationals() {
        let m = parse::<Q>("0.5*x0").unwrap();
        assert_eq!(m.eval(&[rat(1, 1)]).unwrap(), vec![rat(1, 2)]);
    }
}
