//! Text syntax for twist words: `c1 c2^-1 {c3 c4}(c5) (c1 c2 c3)^4`.
//!
//! A letter is a curve name, optionally preceded by a conjugator in braces, with an
//! optional exponent `^e` or `^{e}`. Parenthesized groups repeat (negative powers invert).

use crate::error::{Error, Result};
use crate::word::{inverse_word, CurveExpr, TwistLetter, TwistWord};

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '\'' || c == '_'
}

/// `t^e` is written out as |e| unit letters.
fn push_power(out: &mut TwistWord, unit: TwistLetter, e: i32) {
    let unit = if e < 0 { TwistLetter { exp: -1, ..unit } } else { unit };
    out.extend(std::iter::repeat_n(unit, e.unsigned_abs() as usize));
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} at column {} in `{}`", self.pos + 1, self.src))
    }

    fn peek(&mut self) -> Option<char> {
        let rest = &self.src[self.pos..];
        let trimmed = rest.trim_start_matches(|c: char| c.is_whitespace() || c == '·' || c == '*');
        self.pos += rest.len() - trimmed.len();
        trimmed.chars().next()
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn name(&mut self) -> Result<String> {
        self.peek();
        let rest = &self.src[self.pos..];
        let len = rest.find(|c: char| !is_name_char(c)).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.err("expected a curve name"));
        }
        self.pos += len;
        Ok(rest[..len].to_string())
    }

    fn exponent(&mut self) -> Result<i32> {
        if self.peek() != Some('^') {
            return Ok(1);
        }
        self.pos += 1;
        let braced = self.peek() == Some('{');
        if braced {
            self.pos += 1;
        }
        self.peek();
        let rest = &self.src[self.pos..];
        let len = rest
            .char_indices()
            .find(|&(i, c)| !(c.is_ascii_digit() || (i == 0 && (c == '-' || c == '+'))))
            .map_or(rest.len(), |(i, _)| i);
        let e: i32 = rest[..len].parse().map_err(|_| self.err("bad exponent"))?;
        self.pos += len;
        if braced {
            self.expect('}')?;
        }
        Ok(e)
    }

    fn word_until(&mut self, close: Option<char>) -> Result<TwistWord> {
        let mut out = Vec::new();
        loop {
            match self.peek() {
                None if close.is_none() => return Ok(out),
                None => return Err(self.err("unexpected end")),
                Some(c) if Some(c) == close => {
                    self.pos += 1;
                    return Ok(out);
                }
                Some('(') => {
                    self.pos += 1;
                    let inner = self.word_until(Some(')'))?;
                    let e = self.exponent()?;
                    let unit = if e < 0 { inverse_word(&inner) } else { inner };
                    for _ in 0..e.unsigned_abs() {
                        out.extend(unit.iter().cloned());
                    }
                }
                Some('{') => {
                    self.pos += 1;
                    let conj = self.word_until(Some('}'))?;
                    self.expect('(')?;
                    let base = self.name()?;
                    self.expect(')')?;
                    let e = self.exponent()?;
                    push_power(&mut out, TwistLetter::new(CurveExpr { base, conjugator: conj }, 1), e);
                }
                Some(c) if is_name_char(c) => {
                    let base = self.name()?;
                    let e = self.exponent()?;
                    push_power(&mut out, TwistLetter::named(&base), e);
                }
                Some(_) => return Err(self.err("unexpected character")),
            }
        }
    }
}

pub fn parse_word(src: &str) -> Result<TwistWord> {
    Parser { src, pos: 0 }.word_until(None)
}

pub fn parse_curve(src: &str) -> Result<CurveExpr> {
    let w = parse_word(src)?;
    match w.as_slice() {
        [l] if l.exp == 1 => Ok(l.curve.clone()),
        _ => Err(Error::Parse(format!("`{src}` is not a single curve"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::DisplayWord;

    #[test]
    fn groups_and_conjugates() {
        let w = parse_word("c1 c2^-1 {c3 c4^{-1}}(x''1) (c1 c2 c3)^4").unwrap();
        assert_eq!(w.len(), 15);
        assert_eq!(parse_word("c1^3 c2^-2").unwrap().len(), 5);
        assert_eq!(w[1].exp, -1);
        assert_eq!(w[2].curve.base, "x''1");
        assert_eq!(w[2].curve.conjugator[1].exp, -1);
        assert_eq!(parse_word("(c1 c2)^-1").unwrap(), parse_word("c2^-1 c1^-1").unwrap());
    }

    #[test]
    fn display_round_trip() {
        let w = parse_word("c1 {c1^-1 c2^-1 c3^-1}(c4) delta'2^-1").unwrap();
        assert_eq!(parse_word(&DisplayWord(&w).to_string()).unwrap(), w);
    }

    #[test]
    fn errors() {
        assert!(parse_word("(c1 c2").is_err());
        assert!(parse_word("c1^x").is_err());
        assert!(parse_word("{c1}c2").is_err());
        assert!(parse_curve("c1 c2").is_err());
    }
}
