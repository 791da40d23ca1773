//! Parser for the concrete formula syntax (see `docs/formula-grammar.md`).

use num_traits::{Signed, ToPrimitive};

use super::formula::{Domain, Formula, Quantifier, Term};
use crate::arith::{parse_rational, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Rational),
    Ident(String),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

const SYMBOLS: [&str; 14] = ["->", "+", "-", "*", "^", "(", ")", ",", ".", "=", "&", "|", "~", "\\"];
const KEYWORDS: [&str; 9] = ["forall", "exists", "in", "span", "true", "false", "exp", "Z", "Q"];

fn lex(src: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (l, text) in src.lines().enumerate() {
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, column) = (l + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c.is_ascii_digit() {
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
                let s: String = chars[start..i].iter().collect();
                let q = parse_rational(&s).ok_or_else(|| Error::Syntax {
                    line,
                    column,
                    message: format!("bad number `{s}`"),
                })?;
                out.push(Spanned { tok: Tok::Num(q), line, column });
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line, column });
            } else if let Some(sym) = SYMBOLS.iter().find(|s| text[char_offset(text, i)..].starts_with(**s)) {
                i += sym.chars().count();
                out.push(Spanned { tok: Tok::Sym(sym), line, column });
            } else {
                return Err(Error::Syntax {
                    line,
                    column,
                    message: format!("unexpected character `{c}`"),
                });
            }
        }
    }
    Ok(out)
}

fn char_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(b, _)| b)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
}

impl Parser {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        let (line, column) = self.toks.get(self.pos).map_or(self.end, |t| (t.line, t.column));
        Err(Error::Syntax {
            line,
            column,
            message: message.into(),
        })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|t| &t.tok)
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn is_word(&self, w: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == w)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        let hit = self.is_sym(s);
        if hit {
            self.pos += 1;
        }
        hit
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_word(&mut self, w: &str) -> Result<()> {
        if self.is_word(w) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{w}`"))
        }
    }

    fn variable(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) if is_variable(s) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.err("expected a variable"),
        }
    }

    fn name_list(&mut self) -> Result<Vec<String>> {
        let mut names = vec![self.variable()?];
        while self.eat_sym(",") {
            names.push(self.variable()?);
        }
        Ok(names)
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.eat_sym("->") {
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.conjunction()?];
        while self.eat_sym("|") {
            parts.push(self.conjunction()?);
        }
        Ok(Formula::or(parts))
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let mut parts = vec![self.unary()?];
        while self.eat_sym("&") {
            parts.push(self.unary()?);
        }
        Ok(Formula::and(parts))
    }

    fn unary(&mut self) -> Result<Formula> {
        if self.eat_sym("~") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.is_word("forall") || self.is_word("exists") {
            let quantifier = if self.is_word("forall") {
                Quantifier::Forall
            } else {
                Quantifier::Exists
            };
            self.pos += 1;
            let vars = self.name_list()?;
            let domain = if self.is_word("in") {
                self.pos += 1;
                self.domain(vars.len())?
            } else {
                Domain::Field
            };
            self.expect_sym(".")?;
            let body = self.implication()?;
            return Ok(Formula::Quant {
                quantifier,
                vars,
                domain,
                body: Box::new(body),
            });
        }
        if self.is_sym("(") && matches!(self.peek_at(1), Some(Tok::Ident(q)) if q == "Q") {
            self.pos += 2;
            let v = self.variable()?;
            self.expect_sym(")")?;
            let body = self.implication()?;
            return Ok(Formula::Uncountable(v, Box::new(body)));
        }
        self.atom()
    }

    fn domain(&mut self, arity: usize) -> Result<Domain> {
        let rationals = if self.is_word("Z") {
            false
        } else if self.is_word("Q") {
            true
        } else {
            return self.err("expected `Z` or `Q`");
        };
        self.pos += 1;
        if self.eat_sym("^") {
            let k = self.natural()?;
            if k as usize != arity {
                self.pos -= 1;
                return self.err(format!("power {k} does not match {arity} variables"));
            }
        }
        let nonzero = if self.eat_sym("\\") {
            match self.peek() {
                Some(Tok::Num(q)) if q == &Rational::from_integer(0.into()) => {
                    self.pos += 1;
                    true
                }
                _ => return self.err("expected `0`"),
            }
        } else {
            false
        };
        Ok(if rationals {
            Domain::Rationals { nonzero }
        } else {
            Domain::Integers { nonzero }
        })
    }

    fn atom(&mut self) -> Result<Formula> {
        match self.peek().cloned() {
            Some(Tok::Ident(w)) if w == "true" => {
                self.pos += 1;
                Ok(Formula::True)
            }
            Some(Tok::Ident(w)) if w == "false" => {
                self.pos += 1;
                Ok(Formula::False)
            }
            Some(Tok::Ident(w)) if is_predicate(&w) => {
                self.pos += 1;
                let mut args = Vec::new();
                if self.eat_sym("(") {
                    args.push(self.sum()?);
                    while self.eat_sym(",") {
                        args.push(self.sum()?);
                    }
                    self.expect_sym(")")?;
                }
                Ok(Formula::Pred(w, args))
            }
            Some(Tok::Sym("(")) => {
                let start = self.pos;
                match self.comparison() {
                    Ok(f) => Ok(f),
                    Err(term_err) => {
                        let term_pos = self.pos;
                        self.pos = start + 1;
                        match self.implication().and_then(|f| self.expect_sym(")").map(|_| f)) {
                            Ok(f) => Ok(f),
                            // report whichever reading got further
                            Err(e) if self.pos >= term_pos => Err(e),
                            Err(_) => Err(term_err),
                        }
                    }
                }
            }
            Some(_) => self.comparison(),
            None => self.err("unexpected end of input"),
        }
    }

    fn comparison(&mut self) -> Result<Formula> {
        let lhs = self.sum()?;
        if self.eat_sym("=") {
            return Ok(Formula::Eq(lhs, self.sum()?));
        }
        if self.is_word("in") {
            self.pos += 1;
            self.expect_word("span")?;
            self.expect_sym("(")?;
            let mut consts = Vec::new();
            if !self.is_sym(")") {
                consts = self.name_list()?;
            }
            self.expect_sym(")")?;
            return Ok(Formula::InSpan(lhs, consts));
        }
        self.err("expected `=` or `in span(...)`")
    }

    fn sum(&mut self) -> Result<Term> {
        let mut acc = self.product()?;
        loop {
            if self.eat_sym("+") {
                acc = Term::add(acc, self.product()?);
            } else if self.eat_sym("-") {
                acc = Term::sub(acc, self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<Term> {
        let mut acc = self.negation()?;
        while self.eat_sym("*") {
            acc = Term::mul(acc, self.negation()?);
        }
        Ok(acc)
    }

    fn negation(&mut self) -> Result<Term> {
        if self.eat_sym("-") {
            return Ok(Term::Neg(Box::new(self.negation()?)));
        }
        let base = self.primary()?;
        if self.eat_sym("^") {
            return Ok(Term::pow(base, self.natural()?));
        }
        Ok(base)
    }

    fn natural(&mut self) -> Result<u32> {
        match self.peek() {
            Some(Tok::Num(q)) if q.is_integer() && !q.is_negative() => {
                let k = q.to_integer().to_u32();
                match k {
                    Some(k) => {
                        self.pos += 1;
                        Ok(k)
                    }
                    None => self.err("exponent too large"),
                }
            }
            _ => self.err("expected a natural number"),
        }
    }

    fn primary(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Num(q)) => {
                self.pos += 1;
                Ok(Term::Num(q))
            }
            Some(Tok::Ident(w)) if w == "exp" => {
                self.pos += 1;
                self.expect_sym("(")?;
                let t = self.sum()?;
                self.expect_sym(")")?;
                Ok(Term::exp(t))
            }
            Some(Tok::Ident(w)) if is_variable(&w) => {
                self.pos += 1;
                Ok(Term::Var(w))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.sum()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.err("expected a term"),
        }
    }
}

fn is_variable(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_lowercase() || c == '_') && !KEYWORDS.contains(&s)
}

fn is_predicate(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_uppercase()) && !KEYWORDS.contains(&s)
}

/// Parses a formula; errors carry the line and column of the offending token.
pub fn parse(src: &str) -> Result<Formula> {
    let toks = lex(src)?;
    let end = match toks.last() {
        Some(t) => (t.line, t.column + 1),
        None => (1, 1),
    };
    let mut p = Parser { toks, pos: 0, end };
    let f = p.implication()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(f)
}

/// Parses a single term.
pub fn parse_term(src: &str) -> Result<Term> {
    let toks = lex(src)?;
    let end = match toks.last() {
        Some(t) => (t.line, t.column + 1),
        None => (1, 1),
    };
    let mut p = Parser { toks, pos: 0, end };
    let t = p.sum()?;
    if p.pos < p.toks.len() {
        return p.err("unexpected trailing input");
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn round_trips_examples() {
        for s in [
            "forall x1. exp(x1) = 1 -> 2*x1 = 0",
            "(Q x1) x1 = x1",
            "forall z1. ~(Q x1) (x1 - z1 = 0 & ~(1 = 0))",
            "forall x1. exists m1 in Z \\ 0. (exp(x1) = 1 -> m1*x1 = 0)",
            "forall m1, m2 in Q^2 \\ 0. ~(m1*y1 + m2*y2 in span(tau))",
            "Rotund(p) & Dimension(2, p) -> true",
            "(a + b)*c = -d^2 | x in span()",
        ] {
            let f = parse(s).unwrap();
            assert_eq!(parse(&f.render()).unwrap(), f, "{s}");
        }
        assert_eq!(parse("forall x1. exp(x1) = 1 -> 2*x1 = 0").unwrap().render(), "forall x1. (exp(x1) = 1 -> 2*x1 = 0)");
    }

    #[test]
    fn uncountability_quantifier() {
        let f = parse("(Q x1) x1 = x1").unwrap();
        assert_eq!(
            f,
            Formula::Uncountable("x1".into(), Box::new(Formula::Eq(Term::var("x1"), Term::var("x1"))))
        );
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse("∃") {
            Err(Error::Syntax { line, column, .. }) => assert_eq!((line, column), (1, 1)),
            other => panic!("{other:?}"),
        }
        match parse("x1 = ") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match parse("forall x1, x2 in Z^3. true") {
            Err(Error::Syntax { column, .. }) => assert_eq!(column, 20),
            other => panic!("{other:?}"),
        }
    }

    fn arb_term() -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            prop::sample::select(vec!["x1", "x2", "z1", "m1"]).prop_map(Term::var),
            (0i64..5, 1i64..4).prop_map(|(n, d)| Term::Num(crate::arith::rat(n, d))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(Term::exp),
                inner.clone().prop_map(|t| Term::Neg(Box::new(t))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::add(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::sub(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Term::mul(a, b)),
                (inner, 0u32..4).prop_map(|(a, k)| Term::pow(a, k)),
            ]
        })
    }

    pub(crate) fn arb_formula() -> impl Strategy<Value = Formula> {
        let vars = || prop::collection::vec(prop::sample::select(vec!["x1", "x2", "m1", "p"]).prop_map(String::from), 1..3);
        let leaf = prop_oneof![
            Just(Formula::True),
            Just(Formula::False),
            (arb_term(), arb_term()).prop_map(|(a, b)| Formula::Eq(a, b)),
            (arb_term(), prop::collection::vec(Just("tau".to_string()), 0..2)).prop_map(|(t, c)| Formula::InSpan(t, c)),
            (prop::sample::select(vec!["Rotund", "AddFree"]), prop::collection::vec(arb_term(), 0..3))
                .prop_map(|(n, a)| Formula::Pred(n.to_string(), a)),
        ];
        leaf.prop_recursive(4, 32, 3, move |inner| {
            let domain = prop_oneof![
                Just(Domain::Field),
                any::<bool>().prop_map(|nonzero| Domain::Integers { nonzero }),
                any::<bool>().prop_map(|nonzero| Domain::Rationals { nonzero }),
            ];
            prop_oneof![
                inner.clone().prop_map(Formula::not),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::And),
                prop::collection::vec(inner.clone(), 2..4).prop_map(Formula::Or),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
                (any::<bool>(), vars(), domain, inner.clone()).prop_map(|(all, vars, domain, body)| Formula::Quant {
                    quantifier: if all { Quantifier::Forall } else { Quantifier::Exists },
                    vars,
                    domain,
                    body: Box::new(body),
                }),
                (prop::sample::select(vec!["x1", "x2"]), inner).prop_map(|(v, b)| Formula::Uncountable(v.into(), Box::new(b))),
            ]
        })
    }

    proptest! {
        #[test]
        fn term_round_trip(t in arb_term()) {
            prop_assert_eq!(parse_term(&t.render()).unwrap(), t);
        }

        #[test]
        fn formula_round_trip(f in arb_formula()) {
            let text = f.render();
            prop_assert_eq!(parse(&text).unwrap(), f, "{}", text);
        }
    }
}
