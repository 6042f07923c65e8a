//! Text syntax for polynomials.
//!
//! A polynomial is a `+`/`-` separated list of terms; a term is a `*`
//! separated product of factors; a factor is a rational (`3`, `-1/2` only via
//! the term sign), the imaginary unit `i`, a parenthesized complex
//! coefficient (`(1/2-3/4*i)`), or a generator with an optional power
//! (`x[1,2]`, `d[1,3]^2`, `p[1]`, `dv[2]`, `xa[1]`, `da[3]`).
//!
//! Factor products are evaluated with the genuine noncommutative product, so
//! `d[1,2]*x[1,2]` parses to `x[1,2]*d[1,2] + 1` rather than silently
//! reordering. Antisymmetric indices are normalized during parsing:
//! `x[2,1]` becomes `-x[1,2]` and `x[1,1]` collapses to zero.

use super::{Algebra, NCPoly};
use crate::exactnum::GaussianRational;
use crate::Error;

impl NCPoly {
    /// Parses the text syntax in the context of `algebra`.
    pub fn parse(algebra: Algebra, input: &str) -> Result<NCPoly, Error> {
        let tokens = tokenize(input)?;
        let mut parser = Parser { algebra, tokens: &tokens, pos: 0 };
        let poly = parser.parse_poly()?;
        parser.expect_end()?;
        Ok(poly)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Int(String),
    Ident(String),
    Sym(char),
}

impl Token {
    fn text(&self) -> String {
        match self {
            Token::Int(s) | Token::Ident(s) => s.clone(),
            Token::Sym(c) => c.to_string(),
        }
    }
}

fn tokenize(input: &str) -> Result<Vec<Token>, Error> {
    let mut out = Vec::new();
    let mut chars = input.chars().peekable();
    while let Some(&ch) = chars.peek() {
        if ch.is_whitespace() {
            chars.next();
        } else if ch.is_ascii_digit() {
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_digit() {
                    text.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Int(text));
        } else if ch.is_ascii_alphabetic() {
            let mut text = String::new();
            while let Some(&c) = chars.peek() {
                if c.is_ascii_alphabetic() {
                    text.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            out.push(Token::Ident(text));
        } else if "[],^*+-()/".contains(ch) {
            out.push(Token::Sym(ch));
            chars.next();
        } else {
            return Err(Error::Parse(format!("unexpected character {ch:?}")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    algebra: Algebra,
    tokens: &'a [Token],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<&Token> {
        let tok = self.tokens.get(self.pos);
        if tok.is_some() {
            self.pos += 1;
        }
        tok
    }

    fn expect_sym(&mut self, want: char) -> Result<(), Error> {
        match self.advance() {
            Some(Token::Sym(c)) if *c == want => Ok(()),
            other => Err(Error::Parse(format!(
                "expected {want:?}, found {}",
                other.map_or("end of input".into(), Token::text)
            ))),
        }
    }

    fn expect_end(&self) -> Result<(), Error> {
        match self.peek() {
            None => Ok(()),
            Some(tok) => Err(Error::Parse(format!("trailing input at {:?}", tok.text()))),
        }
    }

    fn parse_poly(&mut self) -> Result<NCPoly, Error> {
        if self.peek().is_none() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        let mut acc = NCPoly::zero(self.algebra);
        let mut first = true;
        loop {
            let negate = match self.peek() {
                Some(Token::Sym('+')) => {
                    self.pos += 1;
                    false
                }
                Some(Token::Sym('-')) => {
                    self.pos += 1;
                    true
                }
                Some(_) if first => false,
                Some(tok) => {
                    return Err(Error::Parse(format!(
                        "expected '+' or '-' between terms, found {:?}",
                        tok.text()
                    )))
                }
                None => break,
            };
            let term = self.parse_term()?;
            acc = if negate { acc.checked_sub(&term)? } else { acc.checked_add(&term)? };
            first = false;
        }
        Ok(acc)
    }

    fn parse_term(&mut self) -> Result<NCPoly, Error> {
        let mut acc = self.parse_factor()?;
        while matches!(self.peek(), Some(Token::Sym('*'))) {
            self.pos += 1;
            let factor = self.parse_factor()?;
            acc = acc.checked_mul(&factor)?;
        }
        Ok(acc)
    }

    fn parse_factor(&mut self) -> Result<NCPoly, Error> {
        let base = match self.advance().cloned() {
            Some(Token::Int(numer)) => {
                let mut text = numer;
                if matches!(self.peek(), Some(Token::Sym('/'))) {
                    self.pos += 1;
                    match self.advance() {
                        Some(Token::Int(denom)) => {
                            text.push('/');
                            text.push_str(denom);
                        }
                        other => {
                            return Err(Error::Parse(format!(
                                "expected denominator, found {}",
                                other.map_or("end of input".into(), Token::text)
                            )))
                        }
                    }
                }
                NCPoly::scalar(self.algebra, text.parse::<GaussianRational>()?)
            }
            Some(Token::Sym('(')) => {
                let mut text = String::new();
                loop {
                    match self.advance() {
                        Some(Token::Sym(')')) => break,
                        Some(tok) => text.push_str(&tok.text()),
                        None => return Err(Error::Parse("unterminated coefficient".into())),
                    }
                }
                NCPoly::scalar(self.algebra, text.parse::<GaussianRational>()?)
            }
            Some(Token::Ident(name)) if name == "i" => {
                NCPoly::scalar(self.algebra, GaussianRational::i())
            }
            Some(Token::Ident(name)) => self.parse_generator(&name)?,
            other => {
                return Err(Error::Parse(format!(
                    "expected a factor, found {}",
                    other.map_or("end of input".into(), |t| t.text())
                )))
            }
        };
        if matches!(self.peek(), Some(Token::Sym('^'))) {
            self.pos += 1;
            let exp = self.parse_index("exponent")? as u32;
            let mut acc = NCPoly::one(self.algebra);
            for _ in 0..exp {
                acc = acc.checked_mul(&base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn parse_generator(&mut self, name: &str) -> Result<NCPoly, Error> {
        self.expect_sym('[')?;
        let first = self.parse_index("index")?;
        let poly = match name {
            "x" | "d" => {
                self.expect_sym(',')?;
                let second = self.parse_index("index")?;
                self.expect_sym(']')?;
                if name == "x" {
                    NCPoly::x_pair(self.algebra, first, second)?
                } else {
                    NCPoly::d_pair(self.algebra, first, second)?
                }
            }
            "p" | "dv" | "xa" | "da" => {
                self.expect_sym(']')?;
                match name {
                    "p" => NCPoly::p_vec(self.algebra, first)?,
                    "dv" => NCPoly::d_vec(self.algebra, first)?,
                    "xa" => NCPoly::x_vec(self.algebra, first)?,
                    _ => NCPoly::da_vec(self.algebra, first)?,
                }
            }
            other => return Err(Error::Parse(format!("unknown generator name {other:?}"))),
        };
        Ok(poly)
    }

    fn parse_index(&mut self, what: &str) -> Result<u8, Error> {
        match self.advance() {
            Some(Token::Int(text)) => text
                .parse::<u8>()
                .map_err(|_| Error::Parse(format!("{what} {text:?} out of range"))),
            other => Err(Error::Parse(format!(
                "expected {what}, found {}",
                other.map_or("end of input".into(), Token::text)
            ))),
        }
    }
}
