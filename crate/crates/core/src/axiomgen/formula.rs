//! Formula and term ASTs with a canonical ASCII rendering.
//!
//! Precedence, loosest first: `->` (right associative), `|`, `&`, `~`.
//! Quantifier bodies extend as far right as possible. Terms use `+ -`
//! (left associative), `*`, unary `-`, then `^` with a natural exponent.

use std::collections::BTreeSet;
use std::fmt;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::arith::Rational;

fn ser_rational<S: Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&q.to_string())
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Term {
    Var(String),
    /// Non-negative rational numeral; negation is [`Term::Neg`].
    Num(#[serde(serialize_with = "ser_rational")] Rational),
    Exp(Box<Term>),
    Neg(Box<Term>),
    Add(Box<Term>, Box<Term>),
    Sub(Box<Term>, Box<Term>),
    Mul(Box<Term>, Box<Term>),
    Pow(Box<Term>, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quantifier {
    Forall,
    Exists,
}

/// Range of a quantified tuple: field elements, or `Z^k` / `Q^k`,
/// optionally without the zero tuple.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Domain {
    Field,
    Integers { nonzero: bool },
    Rationals { nonzero: bool },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// `t in span(c1, ..., ck)`: `t` lies in the Q-span of the named constants.
    InSpan(Term, Vec<String>),
    /// Named placeholder predicate such as `Rotund(p)`.
    Pred(String, Vec<Term>),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Quant {
        quantifier: Quantifier,
        vars: Vec<String>,
        domain: Domain,
        body: Box<Formula>,
    },
    /// `(Q x) φ`: there exist uncountably many `x` with `φ`.
    Uncountable(String, Box<Formula>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn num(q: Rational) -> Term {
        if q.is_negative() {
            Term::Neg(Box::new(Term::Num(-q)))
        } else {
            Term::Num(q)
        }
    }

    pub fn exp(t: Term) -> Term {
        Term::Exp(Box::new(t))
    }

    pub fn add(a: Term, b: Term) -> Term {
        Term::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Term, b: Term) -> Term {
        Term::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Term, b: Term) -> Term {
        Term::Mul(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Term, k: u32) -> Term {
        Term::Pow(Box::new(a), k)
    }

    fn level(&self) -> u8 {
        match self {
            Term::Add(..) | Term::Sub(..) => 1,
            Term::Mul(..) => 2,
            Term::Neg(_) => 3,
            Term::Pow(..) => 4,
            Term::Var(_) | Term::Num(_) | Term::Exp(_) => 5,
        }
    }

    fn write(&self, out: &mut String, min: u8) {
        let wrap = self.level() < min;
        if wrap {
            out.push('(');
        }
        match self {
            Term::Var(v) => out.push_str(v),
            Term::Num(q) => out.push_str(&q.to_string()),
            Term::Exp(t) => {
                out.push_str("exp(");
                t.write(out, 1);
                out.push(')');
            }
            Term::Neg(t) => {
                out.push('-');
                t.write(out, 3);
            }
            Term::Add(a, b) | Term::Sub(a, b) => {
                a.write(out, 1);
                out.push_str(if matches!(self, Term::Add(..)) { " + " } else { " - " });
                b.write(out, 2);
            }
            Term::Mul(a, b) => {
                a.write(out, 2);
                out.push('*');
                b.write(out, 3);
            }
            Term::Pow(a, k) => {
                a.write(out, 5);
                out.push('^');
                out.push_str(&k.to_string());
            }
        }
        if wrap {
            out.push(')');
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s, 1);
        s
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                out.insert(v.clone());
            }
            Term::Num(_) => {}
            Term::Exp(t) | Term::Neg(t) | Term::Pow(t, _) => t.collect_vars(out),
            Term::Add(a, b) | Term::Sub(a, b) | Term::Mul(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Conjunction; a single conjunct is returned as is, none gives `true`.
    pub fn and(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::True,
            1 => parts.pop().unwrap(),
            _ => Formula::And(parts),
        }
    }

    /// Disjunction; a single disjunct is returned as is, none gives `false`.
    pub fn or(mut parts: Vec<Formula>) -> Formula {
        match parts.len() {
            0 => Formula::False,
            1 => parts.pop().unwrap(),
            _ => Formula::Or(parts),
        }
    }

    /// Quantifies over `vars`; an empty list leaves `body` unchanged.
    pub fn quant(quantifier: Quantifier, vars: Vec<String>, domain: Domain, body: Formula) -> Formula {
        if vars.is_empty() {
            return body;
        }
        Formula::Quant {
            quantifier,
            vars,
            domain,
            body: Box::new(body),
        }
    }

    pub fn forall(vars: Vec<String>, body: Formula) -> Formula {
        Formula::quant(Quantifier::Forall, vars, Domain::Field, body)
    }

    pub fn exists(vars: Vec<String>, body: Formula) -> Formula {
        Formula::quant(Quantifier::Exists, vars, Domain::Field, body)
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(_) => 2,
            Formula::And(_) => 3,
            Formula::Not(_) | Formula::Quant { .. } | Formula::Uncountable(..) => 4,
            _ => 5,
        }
    }

    /// True when the rendering ends in a quantifier scope that would
    /// swallow anything written after it.
    fn open_right(&self) -> bool {
        match self {
            Formula::Quant { .. } | Formula::Uncountable(..) => true,
            Formula::Not(f) => f.open_right(),
            Formula::And(fs) | Formula::Or(fs) => fs.last().is_some_and(Formula::open_right),
            Formula::Implies(_, b) => b.open_right(),
            _ => false,
        }
    }

    fn write_operand(&self, out: &mut String, min: u8, last: bool) {
        let wrap = self.level() < min || (!last && self.open_right());
        if wrap {
            out.push('(');
        }
        self.write(out);
        if wrap {
            out.push(')');
        }
    }

    fn write_body(&self, out: &mut String) {
        let wrap = self.level() < 4;
        if wrap {
            out.push('(');
        }
        self.write(out);
        if wrap {
            out.push(')');
        }
    }

    fn write(&self, out: &mut String) {
        match self {
            Formula::True => out.push_str("true"),
            Formula::False => out.push_str("false"),
            Formula::Eq(a, b) => {
                a.write(out, 1);
                out.push_str(" = ");
                b.write(out, 1);
            }
            Formula::InSpan(t, consts) => {
                t.write(out, 1);
                out.push_str(" in span(");
                out.push_str(&consts.join(", "));
                out.push(')');
            }
            Formula::Pred(name, args) => {
                out.push_str(name);
                if !args.is_empty() {
                    out.push('(');
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            out.push_str(", ");
                        }
                        a.write(out, 1);
                    }
                    out.push(')');
                }
            }
            Formula::Not(f) => {
                out.push('~');
                if matches!(
                    **f,
                    Formula::Not(_)
                        | Formula::Quant { .. }
                        | Formula::Uncountable(..)
                        | Formula::Pred(..)
                        | Formula::True
                        | Formula::False
                ) {
                    f.write(out);
                } else {
                    out.push('(');
                    f.write(out);
                    out.push(')');
                }
            }
            Formula::And(parts) | Formula::Or(parts) => {
                let (sep, min) = if matches!(self, Formula::And(_)) { (" & ", 4) } else { (" | ", 3) };
                for (k, p) in parts.iter().enumerate() {
                    if k > 0 {
                        out.push_str(sep);
                    }
                    p.write_operand(out, min, k + 1 == parts.len());
                }
            }
            Formula::Implies(a, b) => {
                a.write_operand(out, 2, false);
                out.push_str(" -> ");
                b.write_operand(out, 1, true);
            }
            Formula::Quant {
                quantifier,
                vars,
                domain,
                body,
            } => {
                out.push_str(match quantifier {
                    Quantifier::Forall => "forall ",
                    Quantifier::Exists => "exists ",
                });
                out.push_str(&vars.join(", "));
                let (set, nonzero) = match domain {
                    Domain::Field => ("", false),
                    Domain::Integers { nonzero } => ("Z", *nonzero),
                    Domain::Rationals { nonzero } => ("Q", *nonzero),
                };
                if !set.is_empty() {
                    out.push_str(" in ");
                    out.push_str(set);
                    if vars.len() > 1 {
                        out.push_str(&format!("^{}", vars.len()));
                    }
                    if nonzero {
                        out.push_str(" \\ 0");
                    }
                }
                out.push_str(". ");
                body.write_body(out);
            }
            Formula::Uncountable(v, body) => {
                out.push_str("(Q ");
                out.push_str(v);
                out.push_str(") ");
                body.write_body(out);
            }
        }
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        self.write(&mut s);
        s
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut terms = BTreeSet::new();
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                a.collect_vars(&mut terms);
                b.collect_vars(&mut terms);
            }
            Formula::InSpan(t, _) => t.collect_vars(&mut terms),
            Formula::Pred(_, args) => args.iter().for_each(|a| a.collect_vars(&mut terms)),
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(ps) | Formula::Or(ps) => ps.iter().for_each(|p| p.collect_free(bound, out)),
            Formula::Implies(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Quant { vars, body, .. } => {
                let depth = bound.len();
                bound.extend(vars.iter().cloned());
                body.collect_free(bound, out);
                bound.truncate(depth);
            }
            Formula::Uncountable(v, body) => {
                bound.push(v.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
        out.extend(terms.into_iter().filter(|v| !bound.contains(v)));
    }

    /// Variables occurring outside the scope of any binder for them.
    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_variables().is_empty()
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::rat;

    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn term_rendering_uses_minimal_parentheses() {
        let t = Term::sub(Term::add(v("a"), v("b")), Term::add(v("c"), v("d")));
        assert_eq!(t.render(), "a + b - (c + d)");
        let t = Term::mul(Term::num(rat(3, 2)), Term::pow(Term::exp(v("x1")), 2));
        assert_eq!(t.render(), "3/2*exp(x1)^2");
        assert_eq!(Term::pow(Term::num(rat(-2, 1)), 3).render(), "(-2)^3");
        assert_eq!(Term::mul(v("a"), Term::Neg(Box::new(v("b")))).render(), "a*-b");
    }

    #[test]
    fn formula_rendering() {
        let chi = Formula::and(vec![
            Formula::eq(v("x1"), Term::num(rat(0, 1))),
            Formula::not(Formula::eq(Term::num(rat(1, 1)), Term::num(rat(0, 1)))),
        ]);
        assert_eq!(chi.render(), "x1 = 0 & ~(1 = 0)");
        let q = Formula::forall(vec!["z1".into()], Formula::not(Formula::Uncountable("x1".into(), Box::new(chi))));
        assert_eq!(q.render(), "forall z1. ~(Q x1) (x1 = 0 & ~(1 = 0))");
        // a quantifier before a connective needs parentheses
        let f = Formula::and(vec![Formula::exists(vec!["x".into()], Formula::True), Formula::False]);
        assert_eq!(f.render(), "(exists x. true) & false");
    }

    #[test]
    fn free_variables_respect_binders() {
        let body = Formula::eq(Term::add(v("x"), v("z")), v("y"));
        let f = Formula::forall(vec!["x".into()], Formula::Uncountable("y".into(), Box::new(body)));
        assert_eq!(f.free_variables().into_iter().collect::<Vec<_>>(), vec!["z".to_string()]);
    }
}
