//! Parameter templates used by scripts.
//!
//! `[expr]` is replaced by the value of an integer expression over the parameters
//! (`+ - * / %`, comparisons and `&& ||` giving 0 or 1, parentheses, unary minus), and `<j=a..b: body>` repeats `body` for
//! j from a to b inclusive, counting down when a > b. `a up b` and `a down b` only
//! count in one direction and are empty otherwise.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

pub type Env = BTreeMap<String, i64>;

struct Expr<'a> {
    s: &'a [u8],
    pos: usize,
    env: &'a Env,
}

impl<'a> Expr<'a> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse(format!("{msg} in expression `{}`", String::from_utf8_lossy(self.s)))
    }

    fn skip(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip();
        self.s.get(self.pos).copied()
    }

    fn starts(&mut self, op: &str) -> bool {
        self.skip();
        if self.s[self.pos..].starts_with(op.as_bytes()) {
            self.pos += op.len();
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<i64> {
        let mut v = self.and()?;
        while self.starts("||") {
            let r = self.and()?;
            v = i64::from(v != 0 || r != 0);
        }
        Ok(v)
    }

    fn and(&mut self) -> Result<i64> {
        let mut v = self.compare()?;
        while self.starts("&&") {
            let r = self.compare()?;
            v = i64::from(v != 0 && r != 0);
        }
        Ok(v)
    }

    fn compare(&mut self) -> Result<i64> {
        let v = self.sum()?;
        for op in ["<=", ">=", "==", "!=", "<", ">"] {
            if self.starts(op) {
                let r = self.sum()?;
                return Ok(i64::from(match op {
                    "<=" => v <= r,
                    ">=" => v >= r,
                    "==" => v == r,
                    "!=" => v != r,
                    "<" => v < r,
                    _ => v > r,
                }));
            }
        }
        Ok(v)
    }

    fn sum(&mut self) -> Result<i64> {
        let mut v = self.product()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let r = self.product()?;
            v = if op == b'+' { v + r } else { v - r };
        }
        Ok(v)
    }

    fn product(&mut self) -> Result<i64> {
        let mut v = self.atom()?;
        while let Some(op @ (b'*' | b'/' | b'%')) = self.peek() {
            self.pos += 1;
            let r = self.atom()?;
            v = match op {
                b'*' => v * r,
                _ if r == 0 => return Err(self.err("division by zero")),
                b'/' => v.div_euclid(r),
                _ => v.rem_euclid(r),
            };
        }
        Ok(v)
    }

    fn atom(&mut self) -> Result<i64> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-self.atom()?)
            }
            Some(b'(') => {
                self.pos += 1;
                let v = self.or()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("missing `)`"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
                let t = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                t.parse().map_err(|_| self.err("bad number"))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap_or("");
                self.env.get(name).copied().ok_or_else(|| self.err(&format!("unbound parameter `{name}`")))
            }
            _ => Err(self.err("expected a value")),
        }
    }
}

pub fn eval(src: &str, env: &Env) -> Result<i64> {
    let mut e = Expr { s: src.as_bytes(), pos: 0, env };
    let v = e.or()?;
    if e.peek().is_some() {
        return Err(e.err("trailing input"));
    }
    Ok(v)
}

pub fn eval_usize(src: &str, env: &Env) -> Result<usize> {
    let v = eval(src, env)?;
    usize::try_from(v).map_err(|_| Error::Range(format!("`{src}` = {v} is negative")))
}

fn matching(s: &str, open: char, close: char) -> Option<usize> {
    let mut depth = 0;
    for (i, c) in s.char_indices() {
        if c == open {
            depth += 1;
        } else if c == close {
            depth -= 1;
            if depth == 0 {
                return Some(i);
            }
        }
    }
    None
}

/// Inclusive range: `a..b` in either direction, `a up b` or `a down b`.
pub fn range(spec: &str, env: &Env) -> Result<Vec<i64>> {
    let bad = || Error::Parse(format!("`{spec}` is not a range"));
    let (a, b, dir) = if let Some((a, b)) = spec.split_once("..") {
        (a, b, 0)
    } else if let Some((a, b)) = spec.split_once(" up ") {
        (a, b, 1)
    } else if let Some((a, b)) = spec.split_once(" down ") {
        (a, b, -1)
    } else {
        return Err(bad());
    };
    let (a, b) = (eval(a, env)?, eval(b, env)?);
    Ok(match dir {
        1 => (a..=b).collect(),
        -1 => (b..=a).rev().collect(),
        _ if a <= b => (a..=b).collect(),
        _ => (b..=a).rev().collect(),
    })
}

pub fn expand(src: &str, env: &Env) -> Result<String> {
    let mut out = String::new();
    let mut rest = src;
    while let Some(i) = rest.find(['[', '<']) {
        out.push_str(&rest[..i]);
        let tail = &rest[i..];
        if tail.starts_with('[') {
            let j = matching(tail, '[', ']').ok_or_else(|| Error::Parse(format!("unclosed `[` in `{src}`")))?;
            out.push_str(&eval(&tail[1..j], env)?.to_string());
            rest = &tail[j + 1..];
        } else {
            let j = matching(tail, '<', '>').ok_or_else(|| Error::Parse(format!("unclosed `<` in `{src}`")))?;
            let inner = &tail[1..j];
            let (head, body) = inner.split_once(':').ok_or_else(|| Error::Parse(format!("loop without `:` in `{src}`")))?;
            let (var, spec) = head.split_once('=').ok_or_else(|| Error::Parse(format!("loop without `=` in `{src}`")))?;
            let mut inner_env = env.clone();
            for v in range(spec, env)? {
                inner_env.insert(var.trim().to_string(), v);
                out.push(' ');
                out.push_str(&expand(body, &inner_env)?);
            }
            out.push(' ');
            rest = &tail[j + 1..];
        }
    }
    out.push_str(rest);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(g: i64) -> Env {
        [("g".to_string(), g)].into()
    }

    #[test]
    fn arithmetic() {
        assert_eq!(eval("2*g+1", &env(3)).unwrap(), 7);
        assert_eq!(eval("-(g-5) % 2", &env(4)).unwrap(), 1);
        assert_eq!(eval("g >= 3 && (g % 2 == 1 || g < 2)", &env(3)).unwrap(), 1);
        assert_eq!(eval("g != 3", &env(3)).unwrap(), 0);
        assert!(eval("h", &env(3)).is_err());
        assert!(eval("1 2", &env(3)).is_err());
    }

    #[test]
    fn loops() {
        let s = expand("<j=1..2*g+1: c[j]>", &env(2)).unwrap();
        assert_eq!(s.split_whitespace().collect::<Vec<_>>(), ["c1", "c2", "c3", "c4", "c5"]);
        let s = expand("<i=g..1: <j=i..i+1: c[j]>>", &env(2)).unwrap();
        assert_eq!(s.split_whitespace().collect::<Vec<_>>(), ["c2", "c3", "c1", "c2"]);
        assert_eq!(expand("<j=1 up g-1: x>", &env(1)).unwrap().trim(), "");
        assert_eq!(expand("<j=g down 1: x[j]>", &env(2)).unwrap().split_whitespace().count(), 2);
        assert_eq!(expand("{c1^-1}(c[g])", &env(4)).unwrap(), "{c1^-1}(c4)");
    }
}
