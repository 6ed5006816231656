//! Recursive-descent parser for kernel expressions.
//!
//! ```text
//! expr    = term { ("+" | "-") term } ;
//! term    = unary { ("*" | "/") unary } ;
//! unary   = "-" unary | primary ;
//! primary = number [ "i" ] | var | func "(" expr ")" | "(" expr ")" ;
//! var     = "x" | "tau" | "y" ;
//! func    = "sin" | "cos" | "exp" | "abs" | "re" | "im" | "conj" ;
//! number  = ( digits [ "." [ digits ] ] | "." digits ) [ exponent ] ;
//! exponent = ("e" | "E") [ "+" | "-" ] digits ;
//! ```

use std::fmt;

use thiserror::Error;

use super::ast::{BinOp, Func, KernelExpr, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the source where the unexpected token starts.
    pub offset: usize,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "parse error at offset {}: found {}, expected one of: {}",
            self.offset,
            self.found,
            self.expected.join(", ")
        )
    }
}

const OPERAND: &[&str] = &["number", "variable", "function", "'('", "'-'"];
const AFTER_OPERAND: &[&str] = &["'+'", "'-'", "'*'", "'/'", "end of input"];
const AFTER_OPERAND_IN_PARENS: &[&str] = &["'+'", "'-'", "'*'", "'/'", "')'"];

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Number { value: f64, imaginary: bool },
    Ident(&'a str),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
    Invalid(char),
    End,
}

impl Token<'_> {
    fn describe(&self, src: &str, span: (usize, usize)) -> String {
        match self {
            Token::End => "end of input".to_string(),
            Token::Invalid(c) => format!("invalid character {c:?}"),
            _ => format!("'{}'", &src[span.0..span.1]),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_char(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while let Some(b) = self.src.as_bytes().get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    /// Next token and its byte span, without consuming it.
    fn peek(&mut self) -> (Token<'a>, (usize, usize)) {
        self.skip_ws();
        let bytes = self.src.as_bytes();
        let start = self.pos;
        let Some(&b) = bytes.get(start) else {
            return (Token::End, (start, start));
        };
        let single = |t| (t, (start, start + 1));
        match b {
            b'+' => single(Token::Plus),
            b'-' => single(Token::Minus),
            b'*' => single(Token::Star),
            b'/' => single(Token::Slash),
            b'(' => single(Token::LParen),
            b')' => single(Token::RParen),
            b'0'..=b'9' | b'.' => self.lex_number(start),
            b if b.is_ascii_alphabetic() || b == b'_' => {
                let mut end = start;
                while end < bytes.len() && is_ident_char(bytes[end]) {
                    end += 1;
                }
                (Token::Ident(&self.src[start..end]), (start, end))
            }
            _ => {
                let c = self.src[start..].chars().next().expect("nonempty");
                (Token::Invalid(c), (start, start + c.len_utf8()))
            }
        }
    }

    fn lex_number(&self, start: usize) -> (Token<'a>, (usize, usize)) {
        let bytes = self.src.as_bytes();
        let digits = |mut i: usize| {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            i
        };
        let int_end = digits(start);
        let mut end = int_end;
        if bytes.get(end) == Some(&b'.') {
            let frac_end = digits(end + 1);
            if frac_end > end + 1 || int_end > start {
                end = frac_end;
            }
        }
        if end == start {
            // A lone '.'.
            return (Token::Invalid('.'), (start, start + 1));
        }
        if matches!(bytes.get(end), Some(b'e' | b'E')) {
            let mut i = end + 1;
            if matches!(bytes.get(i), Some(b'+' | b'-')) {
                i += 1;
            }
            let exp_end = digits(i);
            if exp_end > i {
                end = exp_end;
            }
        }
        let value: f64 = self.src[start..end].parse().expect("lexed a valid float");
        let imaginary = bytes.get(end) == Some(&b'i')
            && !bytes.get(end + 1).copied().is_some_and(is_ident_char);
        let span_end = if imaginary { end + 1 } else { end };
        (Token::Number { value, imaginary }, (start, span_end))
    }

    fn bump(&mut self, span: (usize, usize)) {
        self.pos = span.1;
    }

    fn error(
        &self,
        tok: &Token<'_>,
        span: (usize, usize),
        expected: &[&'static str],
    ) -> ParseError {
        ParseError {
            offset: span.0,
            expected: expected.to_vec(),
            found: tok.describe(self.src, span),
        }
    }

    fn expr(&mut self) -> Result<KernelExpr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let (tok, span) = self.peek();
            let op = match tok {
                Token::Plus => BinOp::Add,
                Token::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump(span);
            let rhs = self.term()?;
            lhs = KernelExpr::binary(op, lhs, rhs);
        }
    }

    fn term(&mut self) -> Result<KernelExpr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let (tok, span) = self.peek();
            let op = match tok {
                Token::Star => BinOp::Mul,
                Token::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump(span);
            let rhs = self.unary()?;
            lhs = KernelExpr::binary(op, lhs, rhs);
        }
    }

    fn unary(&mut self) -> Result<KernelExpr, ParseError> {
        let (tok, span) = self.peek();
        if tok == Token::Minus {
            self.bump(span);
            return Ok(KernelExpr::neg(self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<KernelExpr, ParseError> {
        let (tok, span) = self.peek();
        match tok {
            Token::Number { value, .. } if !value.is_finite() => {
                Err(self.error(&tok, span, &["finite number"]))
            }
            Token::Number { value, imaginary } => {
                self.bump(span);
                Ok(if imaginary {
                    KernelExpr::Imag(value)
                } else {
                    KernelExpr::Real(value)
                })
            }
            Token::Ident(name) => {
                if let Some(v) = Var::from_name(name) {
                    self.bump(span);
                    Ok(KernelExpr::Var(v))
                } else if let Some(func) = Func::from_name(name) {
                    self.bump(span);
                    let (open, open_span) = self.peek();
                    if open != Token::LParen {
                        return Err(self.error(&open, open_span, &["'('"]));
                    }
                    self.bump(open_span);
                    let arg = self.parenthesized_rest()?;
                    Ok(KernelExpr::call(func, arg))
                } else {
                    Err(self.error(&tok, span, OPERAND))
                }
            }
            Token::LParen => {
                self.bump(span);
                self.parenthesized_rest()
            }
            _ => Err(self.error(&tok, span, OPERAND)),
        }
    }

    /// Parses `expr ")"` after an opening parenthesis.
    fn parenthesized_rest(&mut self) -> Result<KernelExpr, ParseError> {
        let inner = self.expr()?;
        let (tok, span) = self.peek();
        if tok != Token::RParen {
            return Err(self.error(&tok, span, AFTER_OPERAND_IN_PARENS));
        }
        self.bump(span);
        Ok(inner)
    }
}

pub fn parse(src: &str) -> Result<KernelExpr, ParseError> {
    let mut parser = Parser { src, pos: 0 };
    let expr = parser.expr()?;
    let (tok, span) = parser.peek();
    if tok != Token::End {
        return Err(parser.error(&tok, span, AFTER_OPERAND));
    }
    Ok(expr)
}
