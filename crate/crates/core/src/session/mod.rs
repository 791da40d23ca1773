//! The session language: declarations of varieties, presentations and
//! exponential-polynomial lists, followed by commands run in order. See
//! `docs/session-grammar.md` for the grammar and `docs/report-schema.md`
//! for the report format.

mod parse;

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;
use serde_json::{json, Value};

use crate::arith::{parse_rational, RatMatrix, Rational};
use crate::axiomgen::{ccp_axiom_instance, isolating_formula, schanuel_axiom_instance, seac_axiom_instance, Formula, PLACEHOLDERS};
use crate::error::{Error, Result};
use crate::exppoly::{khovanskii_system, verify_witness, ExpPoly};
use crate::geometry::{
    coordinate_ring, family_filter, is_additively_free, is_multiplicatively_free_up_to, is_rotund_up_to, parse_equation,
    recheck_counterexample, recheck_freeness_witness, GVariety,
};
use crate::presentation::{
    delta, extend_by_variety, extensions_isomorphic, hull_up_to, is_strong_up_to, iterated_exp_config, schanuel_check,
    EFieldPresentation, ExtensionDatum, SubPresentation,
};
use crate::Bounds;

pub const SCHEMA_VERSION: u32 = 1;

/// A piece of source text with its position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Snippet {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

/// Settings that replace the defaults when present.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Overrides {
    pub rotund: Option<u32>,
    pub mult: Option<u32>,
    pub strong: Option<u32>,
    pub m_max: Option<u32>,
    pub budget: Option<u64>,
}

impl Overrides {
    pub fn apply(&self, b: Bounds) -> Bounds {
        Bounds {
            rotund: self.rotund.unwrap_or(b.rotund),
            mult: self.mult.unwrap_or(b.mult),
            strong: self.strong.unwrap_or(b.strong),
            m_max: self.m_max.unwrap_or(b.m_max),
            budget: self.budget.unwrap_or(b.budget),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Axiom {
    Schanuel {
        variety: String,
    },
    Seac {
        variety: String,
        r: usize,
    },
    Ccp {
        system: String,
    },
    Isolating {
        field: String,
        elements: Vec<Snippet>,
        over: Vec<String>,
        variety: String,
        matrix: Vec<Vec<Snippet>>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Analyze { variety: String },
    Family { variety: String, samples: Vec<Vec<(String, String)>> },
    Extend { field: String, variety: String, symbols: Vec<String>, into: Option<String> },
    Delta { field: String, elements: Vec<Snippet>, over: Vec<Snippet> },
    Schanuel { field: String, elements: Vec<Snippet> },
    Strong { field: String, base: Vec<Snippet> },
    Hull { field: String, start: Vec<Snippet> },
    Isomorphic { field: String, first: String, second: String },
    Iterated { depth: usize, field: Option<String>, variety: Option<String> },
    EmitAxiom(Axiom),
    Khovanskii { system: String },
    VerifyWitness { system: String, field: String, point: Vec<Snippet> },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statement {
    Variety { name: String, n: usize, params: Vec<String>, equations: Vec<Snippet> },
    EField { name: String, gens: Vec<String>, kernel: Option<String>, relations: Vec<Snippet> },
    ExpPolys { name: String, n: usize, params: Vec<String>, polys: Vec<Snippet> },
    Command(Command),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Item {
    pub line: usize,
    pub column: usize,
    /// The statement's source with whitespace collapsed.
    pub text: String,
    pub statement: Statement,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Session {
    pub config: Overrides,
    pub items: Vec<Item>,
}

impl Session {
    /// Parses a session file. Syntax errors, unknown and duplicate names are
    /// reported with their line and column.
    pub fn parse(src: &str) -> Result<Session> {
        parse::parse_session(src)
    }

    /// Runs every statement in order. A failing statement is recorded in the
    /// report and the rest still run.
    pub fn run(&self, cli: &Overrides) -> Report {
        let start = Instant::now();
        let bounds = cli.apply(self.config.apply(Bounds::default()));
        let mut env = Env::default();
        let entries: Vec<Entry> = self
            .items
            .iter()
            .map(|item| {
                let (result, error) = match env.execute(&item.statement, &bounds) {
                    Ok(v) => (Some(v), None),
                    Err(Error::Precondition(pf)) => (
                        Some(json!({ "precondition_failed": pf.reason, "certificate": pf.certificate })),
                        Some(format!("precondition failed: {}", pf.reason)),
                    ),
                    Err(e) => (None, Some(e.to_string())),
                };
                Entry {
                    line: item.line,
                    statement: item.text.clone(),
                    status: if error.is_some() { Status::Error } else { Status::Ok },
                    result,
                    error,
                }
            })
            .collect();
        let errors = entries.iter().filter(|e| e.status == Status::Error).count();
        Report {
            schema: SCHEMA_VERSION,
            config: bounds,
            entries,
            errors,
            timing_ms: start.elapsed().as_millis() as u64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Entry {
    pub line: usize,
    pub statement: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema: u32,
    pub config: Bounds,
    pub entries: Vec<Entry>,
    pub errors: usize,
    /// Wall-clock time; the only field that varies between runs.
    pub timing_ms: u64,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        if self.errors > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let status = match e.status {
                Status::Ok => "ok",
                Status::Error => "error",
            };
            out.push_str(&format!("[line {}] {} -- {}\n", e.line, e.statement, status));
            if let Some(err) = &e.error {
                out.push_str(&format!("  error: {err}\n"));
            }
            if let Some(v) = &e.result {
                write_text(&mut out, v, 1);
            }
        }
        out.push_str(&format!(
            "{} statement(s), {} error(s), bounds: rotund {}, mult {}, strong {}, m-max {}, budget {}\n",
            self.entries.len(),
            self.errors,
            self.config.rotund,
            self.config.mult,
            self.config.strong,
            self.config.m_max,
            self.config.budget
        ));
        out
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("none".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        Value::Array(a) if a.iter().all(|x| x.is_array() && scalar(x).is_some()) => {
            Some(format!("[{}]", a.iter().filter_map(scalar).collect::<Vec<_>>().join(", ")))
        }
        _ => None,
    }
}

fn write_text(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if k == "ast" {
                    continue;
                }
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        write_text(out, x, depth + 1);
                    }
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                match scalar(x) {
                    Some(s) => out.push_str(&format!("{pad}- {s}\n")),
                    None => {
                        out.push_str(&format!("{pad}[{i}]\n"));
                        write_text(out, x, depth + 1);
                    }
                }
            }
        }
        other => out.push_str(&format!("{pad}{}\n", scalar(other).unwrap_or_default())),
    }
}

#[derive(Default)]
struct Env {
    varieties: BTreeMap<String, GVariety>,
    fields: BTreeMap<String, EFieldPresentation>,
    systems: BTreeMap<String, Vec<ExpPoly>>,
}

fn unavailable(name: &str) -> Error {
    Error::Invalid(format!("unavailable: {name} (its definition failed)"))
}

fn to_json<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report values serialize")
}

fn located(e: Error, s: &Snippet) -> Error {
    match e {
        Error::Syntax { column, message, .. } => Error::Syntax {
            line: s.line,
            column: s.column + column - 1,
            message,
        },
        other => other,
    }
}

fn texts(s: &[Snippet]) -> Vec<&str> {
    s.iter().map(|x| x.text.as_str()).collect()
}

fn variety_view(v: &GVariety) -> Result<Value> {
    let gb = v.ideal_basis()?;
    Ok(json!({
        "n": v.n(),
        "params": v.params(),
        "generators": v.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "ideal": gb.generators().iter().map(ToString::to_string).collect::<Vec<_>>(),
        "fingerprint": gb.fingerprint(),
        "dimension": v.dimension(),
        "irreducibility": v.irreducibility(),
    }))
}

fn formula_view(scheme: &str, f: &Formula) -> Value {
    json!({
        "scheme": scheme,
        "text": f.render(),
        "closed": f.is_closed(),
        "free_variables": f.free_variables(),
        "ast": f,
    })
}

impl Env {
    fn variety(&self, name: &str) -> Result<&GVariety> {
        self.varieties.get(name).ok_or_else(|| unavailable(name))
    }

    fn field(&self, name: &str) -> Result<&EFieldPresentation> {
        self.fields.get(name).ok_or_else(|| unavailable(name))
    }

    fn system(&self, name: &str) -> Result<&[ExpPoly]> {
        self.systems.get(name).map(Vec::as_slice).ok_or_else(|| unavailable(name))
    }

    fn rows(f: &EFieldPresentation, elements: &[Snippet]) -> Result<Vec<Vec<Rational>>> {
        elements
            .iter()
            .map(|s| f.parse_combination(&s.text).map_err(|e| located(e, s)))
            .collect()
    }

    fn sub(f: &EFieldPresentation, elements: &[Snippet]) -> Result<SubPresentation> {
        SubPresentation::from_rows(f.n(), &Self::rows(f, elements)?)
    }

    fn execute(&mut self, statement: &Statement, b: &Bounds) -> Result<Value> {
        match statement {
            Statement::Variety { name, n, params, equations } => {
                let ring = coordinate_ring(*n, params)?;
                let gens = equations
                    .iter()
                    .map(|s| parse_equation(&s.text, &ring).map_err(|e| located(e, s)))
                    .collect::<Result<Vec<_>>>()?;
                let v = GVariety::with_budget(*n, params, gens, b.budget)?;
                let view = variety_view(&v)?;
                self.varieties.insert(name.clone(), v);
                Ok(view)
            }
            Statement::EField { name, gens, kernel, relations } => {
                let f = EFieldPresentation::parse_with_budget(gens, kernel.as_deref(), &texts(relations), b.budget)?;
                let view = to_json(&f);
                self.fields.insert(name.clone(), f);
                Ok(view)
            }
            Statement::ExpPolys { name, n, params, polys } => {
                let fs = polys
                    .iter()
                    .map(|s| ExpPoly::parse(*n, params, &s.text).map_err(|e| located(e, s)))
                    .collect::<Result<Vec<_>>>()?;
                let view = json!({ "arity": n, "params": params, "polys": to_json(&fs) });
                self.systems.insert(name.clone(), fs);
                Ok(view)
            }
            Statement::Command(c) => self.command(c, b),
        }
    }

    fn command(&mut self, c: &Command, b: &Bounds) -> Result<Value> {
        match c {
            Command::Analyze { variety } => {
                let v = self.variety(variety)?;
                let additive = is_additively_free(v)?;
                let multiplicative = is_multiplicatively_free_up_to(v, b.mult)?;
                let rotundity = is_rotund_up_to(v, b.rotund)?;
                let recheck = json!({
                    "additive": additive.witness.as_ref().map(|_| recheck_freeness_witness(v, &additive)).transpose()?,
                    "multiplicative": multiplicative.witness.as_ref().map(|_| recheck_freeness_witness(v, &multiplicative)).transpose()?,
                    "rotundity": rotundity.counterexample.as_ref().map(|c| recheck_counterexample(v, c)).transpose()?,
                });
                Ok(json!({
                    "variety": variety_view(v)?,
                    "additive": additive,
                    "multiplicative": multiplicative,
                    "rotundity": rotundity,
                    "recheck": recheck,
                }))
            }
            Command::Family { variety, samples } => {
                let v = self.variety(variety)?;
                let samples: Vec<Vec<(String, Rational)>> = samples
                    .iter()
                    .map(|s| {
                        s.iter()
                            .map(|(k, x)| (k.clone(), parse_rational(x).expect("checked by the parser")))
                            .collect()
                    })
                    .collect();
                Ok(to_json(&family_filter(v, &samples, b.mult, b.rotund)?))
            }
            Command::Extend { field, variety, symbols, into } => {
                let datum = ExtensionDatum {
                    base: self.field(field)?.clone(),
                    variety: self.variety(variety)?.clone(),
                    symbols: symbols.clone(),
                };
                let e = extend_by_variety(&datum, b)?;
                let view = to_json(&e);
                if let Some(name) = into {
                    self.fields.insert(name.clone(), e.presentation);
                }
                Ok(view)
            }
            Command::Delta { field, elements, over } => {
                let f = self.field(field)?;
                let d = delta(f, &Self::rows(f, elements)?, &Self::sub(f, over)?)?;
                Ok(json!({ "elements": texts(elements), "over": texts(over), "delta": d }))
            }
            Command::Schanuel { field, elements } => {
                let f = self.field(field)?;
                let s = schanuel_check(f, &Self::rows(f, elements)?)?;
                Ok(json!({ "elements": texts(elements), "check": s }))
            }
            Command::Strong { field, base } => {
                let f = self.field(field)?;
                let r = is_strong_up_to(f, &Self::sub(f, base)?, b.strong)?;
                Ok(json!({ "base": texts(base), "strongness": r }))
            }
            Command::Hull { field, start } => {
                let f = self.field(field)?;
                let r = hull_up_to(f, &Self::sub(f, start)?, b.strong)?;
                Ok(json!({ "start": texts(start), "hull": r }))
            }
            Command::Isomorphic { field, first, second } => {
                let base = self.field(field)?.clone();
                let datum = |v: &GVariety| ExtensionDatum {
                    base: base.clone(),
                    variety: v.clone(),
                    symbols: (1..=v.n()).map(|j| format!("c{j}")).collect(),
                };
                let (e1, e2) = (datum(self.variety(first)?), datum(self.variety(second)?));
                Ok(to_json(&extensions_isomorphic(&e1, &e2, b.m_max)?))
            }
            Command::Iterated { depth, field, variety } => {
                let (f, v) = iterated_exp_config(*depth)?;
                let view = json!({
                    "depth": depth,
                    "presentation": to_json(&f),
                    "variety": variety_view(&v)?,
                });
                if let Some(name) = field {
                    self.fields.insert(name.clone(), f);
                }
                if let Some(name) = variety {
                    self.varieties.insert(name.clone(), v);
                }
                Ok(view)
            }
            Command::EmitAxiom(a) => self.axiom(a),
            Command::Khovanskii { system } => Ok(to_json(&khovanskii_system(self.system(system)?)?)),
            Command::VerifyWitness { system, field, point } => {
                let sys = khovanskii_system(self.system(system)?)?;
                let f = self.field(field)?;
                let point = point
                    .iter()
                    .map(|s| f.parse_element(&s.text).map_err(|e| located(e, s)))
                    .collect::<Result<Vec<_>>>()?;
                Ok(to_json(&verify_witness(&sys, f, &point)?))
            }
        }
    }

    fn axiom(&self, a: &Axiom) -> Result<Value> {
        match a {
            Axiom::Schanuel { variety } => Ok(formula_view("schanuel", &schanuel_axiom_instance(self.variety(variety)?)?)),
            Axiom::Seac { variety, r } => {
                let mut view = formula_view("seac", &seac_axiom_instance(self.variety(variety)?, *r)?);
                view["placeholders"] = PLACEHOLDERS.iter().map(|(k, d)| (k.to_string(), Value::from(*d))).collect();
                Ok(view)
            }
            Axiom::Ccp { system } => Ok(formula_view("ccp", &ccp_axiom_instance(self.system(system)?)?)),
            Axiom::Isolating {
                field,
                elements,
                over,
                variety,
                matrix,
            } => {
                let f = self.field(field)?;
                let rows = matrix
                    .iter()
                    .map(|row| {
                        row.iter()
                            .map(|s| parse_rational(&s.text).ok_or_else(|| located(Error::Invalid(format!("`{}` is not a rational number", s.text)), s)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let cols = rows.first().map_or(0, Vec::len);
                let m = RatMatrix::from_rows(rows, cols)?;
                let phi = isolating_formula(f, &Self::rows(f, elements)?, over, self.variety(variety)?, &m)?;
                Ok(formula_view("isolating", &phi))
            }
        }
    }
}
