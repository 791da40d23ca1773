//! Canonical text form for polynomials: `3/2*x1^2*y3 - p*x2 + 1`.

use std::sync::Arc;

use num_traits::{One, Signed};

use super::{Exponents, MonomialOrder, MultiPoly, Ring};
use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};

/// Terms in descending grevlex order (parameters last).
pub fn sorted_terms(p: &MultiPoly) -> Vec<(&Exponents, &Rational)> {
    let n = p.ring().n_geometric();
    let mut v: Vec<_> = p.terms().iter().collect();
    v.sort_by(|a, b| MonomialOrder::Grevlex.compare(b.0, a.0, n));
    v
}

pub fn render_poly(p: &MultiPoly, name_of: &dyn Fn(usize) -> String) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let mut out = String::new();
    for (k, (e, c)) in sorted_terms(p).into_iter().enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        if k == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let factors: Vec<String> = e
            .iter()
            .enumerate()
            .filter(|(_, &x)| x > 0)
            .map(|(i, &x)| {
                if x == 1 {
                    name_of(i)
                } else {
                    format!("{}^{}", name_of(i), x)
                }
            })
            .collect();
        if factors.is_empty() {
            out.push_str(&abs.to_string());
        } else {
            if !abs.is_one() {
                out.push_str(&abs.to_string());
                out.push('*');
            }
            out.push_str(&factors.join("*"));
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i + 1 < chars.len() && chars[i] == '/' && chars[i + 1].is_ascii_digit() {
                i += 1;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let q = parse_rational(&text).ok_or_else(|| Error::Syntax {
                line: 1,
                column: col,
                message: format!("bad number `{text}`"),
            })?;
            out.push((Tok::Num(q), col));
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                i += 1;
            }
            out.push((Tok::Ident(chars[start..i].iter().collect()), col));
        } else if "+-*^()".contains(c) {
            out.push((Tok::Sym(c), col));
            i += 1;
        } else {
            return Err(Error::Syntax {
                line: 1,
                column: col,
                message: format!("unexpected character `{c}`"),
            });
        }
    }
    Ok(out)
}

/// Resolves identifiers (and `exp(name)` applications) to polynomials.
pub trait Resolver {
    fn ident(&self, name: &str) -> Option<MultiPoly>;
    fn exp(&self, _name: &str) -> Option<MultiPoly> {
        None
    }
}

struct RingResolver<'a>(&'a Arc<Ring>);

impl Resolver for RingResolver<'_> {
    fn ident(&self, name: &str) -> Option<MultiPoly> {
        MultiPoly::var(self.0, name).ok()
    }
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    ring: &'a Arc<Ring>,
    resolver: &'a dyn Resolver,
    end_col: usize,
}

impl Parser<'_> {
    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end_col, |t| t.1)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        Err(Error::Syntax {
            line: 1,
            column: self.col(),
            message: msg.into(),
        })
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some((Tok::Sym(s), _)) if *s == c)
    }

    fn expr(&mut self) -> Result<MultiPoly> {
        let mut acc = self.term()?;
        loop {
            if self.peek_sym('+') {
                self.pos += 1;
                acc = &acc + &self.term()?;
            } else if self.peek_sym('-') {
                self.pos += 1;
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<MultiPoly> {
        let mut acc = self.unary()?;
        while self.peek_sym('*') {
            self.pos += 1;
            acc = &acc * &self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MultiPoly> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek_sym('^') {
            self.pos += 1;
            match self.toks.get(self.pos) {
                Some((Tok::Num(q), _)) if q.is_integer() && !q.is_negative() => {
                    let k: u32 = q.to_integer().try_into().map_err(|_| Error::Syntax {
                        line: 1,
                        column: self.col(),
                        message: "exponent too large".into(),
                    })?;
                    self.pos += 1;
                    Ok(base.pow(k))
                }
                _ => self.err("expected a nonnegative integer exponent"),
            }
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<MultiPoly> {
        match self.toks.get(self.pos).cloned() {
            Some((Tok::Num(q), _)) => {
                self.pos += 1;
                Ok(MultiPoly::constant(self.ring, q))
            }
            Some((Tok::Ident(name), _)) => {
                self.pos += 1;
                if name == "exp" && self.peek_sym('(') {
                    self.pos += 1;
                    let arg = match self.toks.get(self.pos).cloned() {
                        Some((Tok::Ident(a), _)) => a,
                        _ => return self.err("exp(...) takes a single variable name"),
                    };
                    self.pos += 1;
                    if !self.peek_sym(')') {
                        return self.err("expected `)`");
                    }
                    let Some(p) = self.resolver.exp(&arg) else {
                        self.pos -= 1;
                        return self.err(format!("exp({arg}) is not available here"));
                    };
                    self.pos += 1;
                    return Ok(p);
                }
                match self.resolver.ident(&name) {
                    Some(p) => Ok(p),
                    None => {
                        self.pos -= 1;
                        self.err(format!("unknown variable `{name}`"))
                    }
                }
            }
            Some((Tok::Sym('('), _)) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.peek_sym(')') {
                    return self.err("expected `)`");
                }
                self.pos += 1;
                Ok(e)
            }
            _ => self.err("expected a number, variable or `(`"),
        }
    }
}

pub fn parse_poly(src: &str, ring: &Arc<Ring>) -> Result<MultiPoly> {
    parse_poly_with(src, ring, &RingResolver(ring))
}

pub fn parse_poly_with(src: &str, ring: &Arc<Ring>, resolver: &dyn Resolver) -> Result<MultiPoly> {
    let toks = lex(src)?;
    let mut p = Parser {
        toks,
        pos: 0,
        ring,
        resolver,
        end_col: src.chars().count() + 1,
    };
    let e = p.expr()?;
    if p.pos != p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_canonical_text() {
        let r = Ring::new(&["x1", "x2", "y3"], &["p"]).unwrap();
        let p = parse_poly("1 - p*x2 + 3/2*x1^2*y3", &r).unwrap();
        assert_eq!(p.to_string(), "3/2*x1^2*y3 - x2*p + 1");
        assert_eq!(parse_poly(&p.to_string(), &r).unwrap(), p);
        assert_eq!(MultiPoly::zero(&r).to_string(), "0");
        assert_eq!(parse_poly("-x1", &r).unwrap().to_string(), "-x1");
    }

    #[test]
    fn parse_errors_carry_columns() {
        let r = Ring::new(&["x"], &[] as &[&str]).unwrap();
        match parse_poly("x + z", &r) {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match parse_poly("x + ", &r) {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_poly("x $ 1", &r).is_err());
    }
}
