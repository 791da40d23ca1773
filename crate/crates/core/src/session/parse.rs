//! Recursive-descent parser for session files.

use std::collections::BTreeMap;

use super::{Axiom, Command, Item, Overrides, Session, Snippet, Statement};
use crate::arith::parse_rational;
use crate::error::{Error, Result};
use crate::exppoly::ExpPoly;
use crate::geometry::{coordinate_ring, parse_equation};
use crate::presentation::EFieldPresentation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Variety,
    Field,
    System,
}

impl Kind {
    fn noun(self) -> &'static str {
        match self {
            Kind::Variety => "a variety",
            Kind::Field => "an efield",
            Kind::System => "an exppolys list",
        }
    }
}

struct Cursor {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
}

impl Cursor {
    fn new(src: &str) -> Self {
        Self {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn at(&self) -> (usize, usize) {
        (self.line, self.column)
    }

    fn error_at(&self, (line, column): (usize, usize), message: impl Into<String>) -> Error {
        Error::Syntax {
            line,
            column,
            message: message.into(),
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        self.error_at(self.at(), message)
    }

    fn skip_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    /// Whitespace, newlines and comments.
    fn skip_space(&mut self) {
        while let Some(c) = self.peek() {
            if c == '#' {
                self.skip_comment();
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    /// Whitespace, newlines, comments and `;` separators.
    fn skip_separators(&mut self) {
        loop {
            self.skip_space();
            if self.peek() == Some(';') {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_space();
        if self.peek() == Some(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`{}", self.found())))
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(c) => format!(", found `{c}`"),
            None => ", found end of input".into(),
        }
    }

    /// A keyword: letters, digits, `_` and `-`.
    fn keyword(&mut self) -> Option<(String, (usize, usize))> {
        self.skip_space();
        let start = self.at();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let ok = if s.is_empty() {
                c.is_ascii_alphabetic()
            } else {
                c.is_ascii_alphanumeric() || c == '_' || c == '-'
            };
            if !ok {
                break;
            }
            s.push(c);
            self.bump();
        }
        (!s.is_empty()).then_some((s, start))
    }

    fn peek_keyword(&mut self, kw: &str) -> bool {
        self.skip_space();
        let save = (self.pos, self.line, self.column);
        let hit = matches!(self.keyword(), Some((w, _)) if w == kw);
        (self.pos, self.line, self.column) = save;
        hit
    }

    fn eat_keyword(&mut self, kw: &str) -> bool {
        if self.peek_keyword(kw) {
            self.keyword();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.eat_keyword(kw) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`{}", self.found())))
        }
    }

    fn name(&mut self) -> Result<(String, (usize, usize))> {
        self.skip_space();
        let start = self.at();
        let mut s = String::new();
        while let Some(c) = self.peek() {
            let ok = if s.is_empty() {
                c.is_ascii_alphabetic() || c == '_'
            } else {
                c.is_ascii_alphanumeric() || c == '_'
            };
            if !ok {
                break;
            }
            s.push(c);
            self.bump();
        }
        if s.is_empty() {
            Err(self.error(format!("expected a name{}", self.found())))
        } else {
            Ok((s, start))
        }
    }

    fn names(&mut self) -> Result<Vec<String>> {
        let mut out = vec![self.name()?.0];
        while self.eat(',') {
            out.push(self.name()?.0);
        }
        Ok(out)
    }

    fn number(&mut self) -> Result<usize> {
        self.skip_space();
        let start = self.at();
        let mut s = String::new();
        while let Some(c) = self.peek().filter(char::is_ascii_digit) {
            s.push(c);
            self.bump();
        }
        s.parse().map_err(|_| self.error_at(start, "expected a natural number"))
    }

    /// Raw text up to one of `stops` outside brackets, trimmed. Comments end
    /// the snippet.
    fn raw(&mut self, stops: &[char]) -> Snippet {
        while matches!(self.peek(), Some(' ' | '\t' | '\r')) {
            self.bump();
        }
        let (line, column) = self.at();
        let mut depth = 0usize;
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c == '#' || c == '\n' && stops.contains(&'\n') || depth == 0 && stops.contains(&c) {
                break;
            }
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth = depth.saturating_sub(1),
                _ => {}
            }
            text.push(c);
            self.bump();
        }
        Snippet {
            text: text.trim_end().to_string(),
            line,
            column,
        }
    }

    /// `{ a; b \n c }` as snippets.
    fn block(&mut self) -> Result<Vec<Snippet>> {
        self.expect('{')?;
        let mut out = Vec::new();
        loop {
            self.skip_separators();
            match self.peek() {
                Some('}') => {
                    self.bump();
                    return Ok(out);
                }
                None => return Err(self.error("unclosed `{`")),
                _ => out.push(self.raw(&[';', '\n', '}'])),
            }
        }
    }

    /// `[e1, e2, ...]`, possibly empty.
    fn list(&mut self) -> Result<Vec<Snippet>> {
        self.expect('[')?;
        let mut out = Vec::new();
        if self.eat(']') {
            return Ok(out);
        }
        loop {
            self.skip_space();
            let s = self.raw(&[',', ']']);
            if s.text.is_empty() {
                return Err(self.error("empty list entry"));
            }
            out.push(s);
            if self.eat(']') {
                return Ok(out);
            }
            self.expect(',')?;
        }
    }

    fn matrix(&mut self) -> Result<Vec<Vec<Snippet>>> {
        self.expect('[')?;
        let mut rows = vec![self.list()?];
        while self.eat(',') {
            rows.push(self.list()?);
        }
        self.expect(']')?;
        Ok(rows)
    }

    fn params(&mut self) -> Result<Vec<String>> {
        if !self.eat_keyword("params") {
            return Ok(Vec::new());
        }
        self.expect('{')?;
        let names = if self.eat('}') {
            Vec::new()
        } else {
            let names = self.names()?;
            self.expect('}')?;
            names
        };
        Ok(names)
    }

    fn source(&self, from: usize) -> String {
        let s: String = self.chars[from..self.pos].iter().collect();
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

/// Moves an error reported inside `s` (line 1) to its place in the file.
fn relocate(e: Error, s: &Snippet) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax {
            line: s.line,
            column: s.column + column - 1,
            message,
        },
        other => Error::Syntax {
            line: s.line,
            column: s.column,
            message: other.to_string(),
        },
    }
}

struct Parser {
    cur: Cursor,
    names: BTreeMap<String, Kind>,
    config: Overrides,
    items: Vec<Item>,
}

impl Parser {
    fn define(&mut self, name: &str, at: (usize, usize), kind: Kind) -> Result<()> {
        if self.names.contains_key(name) {
            return Err(self.cur.error_at(at, format!("duplicate: {name}")));
        }
        self.names.insert(name.to_string(), kind);
        Ok(())
    }

    fn reference(&mut self, kind: Kind) -> Result<String> {
        let (name, at) = self.cur.name()?;
        match self.names.get(&name) {
            None => Err(self.cur.error_at(at, format!("undefined: {name}"))),
            Some(k) if *k != kind => Err(self.cur.error_at(at, format!("{name} is {}, expected {}", k.noun(), kind.noun()))),
            Some(_) => Ok(name),
        }
    }

    fn config(&mut self) -> Result<()> {
        self.cur.expect('{')?;
        loop {
            self.cur.skip_separators();
            if self.cur.eat('}') {
                return Ok(());
            }
            let Some((key, at)) = self.cur.keyword() else {
                return Err(self.cur.error(format!("expected a setting{}", self.cur.found())));
            };
            self.cur.expect('=')?;
            let value = self.cur.number()?;
            let small = || u32::try_from(value).map_err(|_| self.cur.error_at(at, "value too large"));
            match key.as_str() {
                "bound-rotund" => self.config.rotund = Some(small()?),
                "bound-mult" => self.config.mult = Some(small()?),
                "bound-strong" => self.config.strong = Some(small()?),
                "m-max" => self.config.m_max = Some(small()?),
                "budget" => self.config.budget = Some(value as u64),
                _ => return Err(self.cur.error_at(at, format!("unknown setting `{key}`"))),
            }
        }
    }

    fn variety(&mut self) -> Result<Statement> {
        let (name, at) = self.cur.name()?;
        self.cur.expect_keyword("in")?;
        self.cur.expect_keyword("G")?;
        self.cur.expect('^')?;
        let n = self.cur.number()?;
        let equations = self.cur.block()?;
        let params = self.cur.params()?;
        let ring = coordinate_ring(n, &params).map_err(|e| self.cur.error_at(at, e.to_string()))?;
        for s in &equations {
            parse_equation(&s.text, &ring).map_err(|e| relocate(e, s))?;
        }
        self.define(&name, at, Kind::Variety)?;
        Ok(Statement::Variety {
            name,
            n,
            params,
            equations,
        })
    }

    fn efield(&mut self) -> Result<Statement> {
        let (name, at) = self.cur.name()?;
        self.cur.expect('{')?;
        let mut gens = Vec::new();
        let mut kernel = None;
        let mut relations = Vec::new();
        loop {
            self.cur.skip_separators();
            if self.cur.eat('}') {
                break;
            }
            let Some((kw, kw_at)) = self.cur.keyword() else {
                return Err(self.cur.error(format!("expected `gens`, `kernel` or `relations`{}", self.cur.found())));
            };
            match kw.as_str() {
                "gens" => gens = self.cur.names()?,
                "kernel" => kernel = Some(self.cur.name()?.0),
                "relations" => relations = self.cur.block()?,
                _ => return Err(self.cur.error_at(kw_at, format!("unknown clause `{kw}`"))),
            }
        }
        for s in &relations {
            EFieldPresentation::parse_relation(&gens, kernel.as_deref(), &s.text).map_err(|e| relocate(e, s))?;
        }
        self.define(&name, at, Kind::Field)?;
        Ok(Statement::EField {
            name,
            gens,
            kernel,
            relations,
        })
    }

    fn exppolys(&mut self) -> Result<Statement> {
        let (name, at) = self.cur.name()?;
        self.cur.expect_keyword("in")?;
        self.cur.expect_keyword("F")?;
        self.cur.expect('^')?;
        let n = self.cur.number()?;
        let polys = self.cur.block()?;
        let params = self.cur.params()?;
        for s in &polys {
            ExpPoly::parse(n, &params, &s.text).map_err(|e| relocate(e, s))?;
        }
        self.define(&name, at, Kind::System)?;
        Ok(Statement::ExpPolys { name, n, params, polys })
    }

    fn samples(&mut self) -> Result<Vec<Vec<(String, String)>>> {
        let block = self.cur.block()?;
        block
            .iter()
            .map(|s| {
                s.text
                    .split(',')
                    .map(|a| {
                        let (k, v) = a.split_once('=').ok_or_else(|| relocate(Error::Invalid(format!("expected `name = value`, found `{}`", a.trim())), s))?;
                        let v = v.trim();
                        parse_rational(v).ok_or_else(|| relocate(Error::Invalid(format!("`{v}` is not a rational number")), s))?;
                        Ok((k.trim().to_string(), v.to_string()))
                    })
                    .collect()
            })
            .collect()
    }

    fn axiom(&mut self) -> Result<Axiom> {
        let Some((kind, at)) = self.cur.keyword() else {
            return Err(self.cur.error("expected `schanuel`, `seac`, `ccp` or `isolating`"));
        };
        Ok(match kind.as_str() {
            "schanuel" => Axiom::Schanuel {
                variety: self.reference(Kind::Variety)?,
            },
            "seac" => {
                let variety = self.reference(Kind::Variety)?;
                let r = if self.cur.eat_keyword("r") {
                    self.cur.expect('=')?;
                    self.cur.number()?
                } else {
                    0
                };
                Axiom::Seac { variety, r }
            }
            "ccp" => Axiom::Ccp {
                system: self.reference(Kind::System)?,
            },
            "isolating" => {
                let field = self.reference(Kind::Field)?;
                let elements = self.cur.list()?;
                self.cur.expect_keyword("over")?;
                self.cur.expect('[')?;
                let over = if self.cur.eat(']') {
                    Vec::new()
                } else {
                    let names = self.cur.names()?;
                    self.cur.expect(']')?;
                    names
                };
                self.cur.expect_keyword("by")?;
                let variety = self.reference(Kind::Variety)?;
                self.cur.expect_keyword("matrix")?;
                let matrix = self.cur.matrix()?;
                Axiom::Isolating {
                    field,
                    elements,
                    over,
                    variety,
                    matrix,
                }
            }
            _ => return Err(self.cur.error_at(at, format!("unknown axiom scheme `{kind}`"))),
        })
    }

    fn command(&mut self, kw: &str, at: (usize, usize)) -> Result<Command> {
        Ok(match kw {
            "analyze" => Command::Analyze {
                variety: self.reference(Kind::Variety)?,
            },
            "family" => {
                let variety = self.reference(Kind::Variety)?;
                self.cur.expect_keyword("samples")?;
                Command::Family {
                    variety,
                    samples: self.samples()?,
                }
            }
            "extend" => {
                let field = self.reference(Kind::Field)?;
                self.cur.expect_keyword("by")?;
                let variety = self.reference(Kind::Variety)?;
                self.cur.expect_keyword("as")?;
                let symbols = self.cur.names()?;
                let into = if self.cur.eat_keyword("into") {
                    let (name, at) = self.cur.name()?;
                    self.define(&name, at, Kind::Field)?;
                    Some(name)
                } else {
                    None
                };
                Command::Extend {
                    field,
                    variety,
                    symbols,
                    into,
                }
            }
            "delta" => {
                let field = self.reference(Kind::Field)?;
                let elements = self.cur.list()?;
                let over = if self.cur.eat_keyword("over") { self.cur.list()? } else { Vec::new() };
                Command::Delta { field, elements, over }
            }
            "schanuel" => Command::Schanuel {
                field: self.reference(Kind::Field)?,
                elements: self.cur.list()?,
            },
            "strong" => Command::Strong {
                field: self.reference(Kind::Field)?,
                base: self.cur.list()?,
            },
            "hull" => Command::Hull {
                field: self.reference(Kind::Field)?,
                start: self.cur.list()?,
            },
            "isomorphic" => {
                let field = self.reference(Kind::Field)?;
                self.cur.expect_keyword("by")?;
                let first = self.reference(Kind::Variety)?;
                self.cur.expect(',')?;
                let second = self.reference(Kind::Variety)?;
                Command::Isomorphic { field, first, second }
            }
            "iterated" => {
                let depth = self.cur.number()?;
                let (mut field, mut variety) = (None, None);
                if self.cur.eat_keyword("into") {
                    let (f, at) = self.cur.name()?;
                    self.define(&f, at, Kind::Field)?;
                    field = Some(f);
                    if self.cur.eat(',') {
                        let (v, at) = self.cur.name()?;
                        self.define(&v, at, Kind::Variety)?;
                        variety = Some(v);
                    }
                }
                Command::Iterated { depth, field, variety }
            }
            "emit-axiom" => Command::EmitAxiom(self.axiom()?),
            "khovanskii" => Command::Khovanskii {
                system: self.reference(Kind::System)?,
            },
            "verify-witness" => {
                let system = self.reference(Kind::System)?;
                self.cur.expect_keyword("in")?;
                let field = self.reference(Kind::Field)?;
                self.cur.expect_keyword("at")?;
                Command::VerifyWitness {
                    system,
                    field,
                    point: self.cur.list()?,
                }
            }
            _ => return Err(self.cur.error_at(at, format!("unknown statement `{kw}`"))),
        })
    }

    fn statement(&mut self) -> Result<Option<()>> {
        self.cur.skip_separators();
        if self.cur.peek().is_none() {
            return Ok(None);
        }
        let from = self.cur.pos;
        let Some((kw, at)) = self.cur.keyword() else {
            return Err(self.cur.error(format!("expected a statement{}", self.cur.found())));
        };
        let statement = match kw.as_str() {
            "config" => {
                self.config()?;
                return Ok(Some(()));
            }
            "variety" => self.variety()?,
            "efield" => self.efield()?,
            "exppolys" => self.exppolys()?,
            _ => Statement::Command(self.command(&kw, at)?),
        };
        let text = self.cur.source(from);
        self.items.push(Item {
            line: at.0,
            column: at.1,
            text,
            statement,
        });
        self.cur.skip_space();
        match self.cur.peek() {
            Some(c) if c != ';' && !c.is_ascii_alphabetic() => Err(self.cur.error(format!("unexpected `{c}` after statement"))),
            _ => Ok(Some(())),
        }
    }
}

pub(super) fn parse_session(src: &str) -> Result<Session> {
    let mut p = Parser {
        cur: Cursor::new(src),
        names: BTreeMap::new(),
        config: Overrides::default(),
        items: Vec::new(),
    };
    while p.statement()?.is_some() {}
    Ok(Session {
        config: p.config,
        items: p.items,
    })
}
