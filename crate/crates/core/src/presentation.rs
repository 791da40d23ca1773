//! Finitely presented partial exponential fields.
//!
//! A presentation has a basis `b1..bn` of formal symbols, Q-linearly
//! independent, and a locus: a subvariety of `G^n` whose generic point is
//! `(b, exp(b))`. Elements handled here are Q-linear combinations of the
//! basis, written as coefficient rows.

use std::cell::RefCell;
use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::arith::{primitive_integer_vector, q_linear_dependencies, rat, IntMatrix, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::geometry::{
    additive_name, coordinate_ring, enumerate_row_spaces, is_additively_free, is_multiplicatively_free_up_to,
    is_rotund_up_to, multiplicative_name, shift_column, FreenessCertificate, GVariety, Irreducibility,
    RotundityReport,
};
use crate::poly::{text, MultiPoly, Ring, DEFAULT_BUDGET};
use crate::Bounds;

/// Why [`extend_by_variety`] refused a variety, with the evidence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PreconditionFailure {
    pub reason: String,
    pub certificate: Certificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Certificate {
    Dimension { found: usize, required: usize },
    Freeness(FreenessCertificate),
    Rotundity(RotundityReport),
}

impl fmt::Display for PreconditionFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.reason)
    }
}

#[derive(Clone, Debug)]
pub struct EFieldPresentation {
    basis: Vec<String>,
    kernel: Option<String>,
    locus: GVariety,
}

impl PartialEq for EFieldPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.basis == other.basis && self.kernel == other.kernel && self.locus == other.locus
    }
}

#[derive(Serialize)]
struct PresentationView<'a> {
    basis: &'a [String],
    kernel: &'a Option<String>,
    relations: Vec<String>,
    td: usize,
    ldim: usize,
    irreducibility: Irreducibility,
}

impl Serialize for EFieldPresentation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PresentationView {
            basis: &self.basis,
            kernel: &self.kernel,
            relations: self.relations(),
            td: self.td(),
            ldim: self.ldim(),
            irreducibility: self.locus.irreducibility(),
        }
        .serialize(s)
    }
}

/// Resolves basis symbols to `xk` and `exp(symbol)` to `yk`.
struct Symbols<'a> {
    basis: &'a [String],
    ring: &'a Arc<Ring>,
}

impl text::Resolver for Symbols<'_> {
    fn ident(&self, name: &str) -> Option<MultiPoly> {
        let k = self.basis.iter().position(|b| b == name)?;
        Some(MultiPoly::var_at(self.ring, k))
    }

    fn exp(&self, name: &str) -> Option<MultiPoly> {
        let k = self.basis.iter().position(|b| b == name)?;
        Some(MultiPoly::var_at(self.ring, self.basis.len() + k))
    }
}

fn check_symbol(s: &str) -> Result<()> {
    let ok = s.starts_with(|c: char| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "exp";
    if ok {
        Ok(())
    } else {
        Err(Error::Invalid(format!("`{s}` is not a valid symbol name")))
    }
}

impl EFieldPresentation {
    /// Builds a presentation from locus generators in `coordinate_ring(n)`,
    /// where `xk` is the k-th basis symbol. A kernel symbol not already in
    /// the basis is put first; its relation `exp(tau) = 1` is added.
    pub fn new(basis: &[String], kernel: Option<&str>, relations: Vec<MultiPoly>) -> Result<Self> {
        Self::with_budget(basis, kernel, relations, DEFAULT_BUDGET)
    }

    pub fn with_budget(basis: &[String], kernel: Option<&str>, relations: Vec<MultiPoly>, budget: u64) -> Result<Self> {
        let mut names = basis.to_vec();
        let mut relations = relations;
        if let Some(tau) = kernel {
            if !names.iter().any(|b| b == tau) {
                names.insert(0, tau.to_string());
                let ring = coordinate_ring(names.len(), &[])?;
                let old = coordinate_ring(basis.len(), &[])?;
                let shift: Vec<MultiPoly> = (0..basis.len())
                    .map(|k| MultiPoly::var_at(&ring, k + 1))
                    .chain((0..basis.len()).map(|k| MultiPoly::var_at(&ring, names.len() + k + 1)))
                    .collect();
                relations = relations
                    .iter()
                    .map(|r| r.with_ring(&old).and_then(|r| r.compose(&ring, &shift)))
                    .collect::<Result<_>>()?;
            }
        }
        for (k, s) in names.iter().enumerate() {
            check_symbol(s)?;
            if names[..k].contains(s) {
                return Err(Error::Invalid(format!("duplicate symbol `{s}`")));
            }
        }
        let n = names.len();
        let ring = coordinate_ring(n, &[])?;
        if let Some(tau) = kernel {
            let k = names.iter().position(|b| b == tau).expect("kernel symbol is in the basis");
            relations.push(&MultiPoly::var_at(&ring, n + k) - &MultiPoly::one(&ring));
        }
        let locus = GVariety::with_budget(n, &[], relations, budget)?;
        let p = Self {
            basis: names,
            kernel: kernel.map(str::to_string),
            locus,
        };
        p.check_independent()?;
        if let Some(tau) = &p.kernel {
            let k = p.index_of(tau).expect("kernel symbol is in the basis");
            let nf = p.locus.ideal_basis()?.normal_form(&MultiPoly::var_at(&ring, k))?;
            if nf.as_constant().is_some() {
                return Err(Error::Invalid(format!("kernel generator `{tau}` must be transcendental")));
            }
        }
        Ok(p)
    }

    /// Parses relations such as `exp(b2) = exp(b1)^2` over the basis symbols.
    pub fn parse(basis: &[String], kernel: Option<&str>, relations: &[&str]) -> Result<Self> {
        Self::parse_with_budget(basis, kernel, relations, DEFAULT_BUDGET)
    }

    pub fn parse_with_budget(basis: &[String], kernel: Option<&str>, relations: &[&str], budget: u64) -> Result<Self> {
        let names = with_kernel(basis, kernel);
        let gens = relations
            .iter()
            .map(|r| Self::parse_relation(basis, kernel, r))
            .collect::<Result<Vec<_>>>()?;
        Self::with_budget(&names, kernel, gens, budget)
    }

    /// One relation in the coordinate ring of the basis (kernel symbol first
    /// when it is not listed), without building the presentation.
    pub fn parse_relation(basis: &[String], kernel: Option<&str>, src: &str) -> Result<MultiPoly> {
        let names = with_kernel(basis, kernel);
        let ring = coordinate_ring(names.len(), &[])?;
        parse_over(&names, &ring, src)
    }

    /// No basis at all: the prime field with its trivial exponential.
    pub fn trivial() -> Self {
        Self::new(&[], None, Vec::new()).expect("the empty presentation is valid")
    }

    /// The standard kernel `tau` with `exp(tau) = 1` and nothing else.
    pub fn standard_kernel(tau: &str) -> Result<Self> {
        Self::new(&[], Some(tau), Vec::new())
    }

    fn check_independent(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Ok(());
        }
        let gb = self.locus.ideal_basis()?;
        let nfs: Vec<MultiPoly> = (0..n)
            .map(|k| gb.normal_form(&MultiPoly::var_at(self.locus.ring(), k)))
            .collect::<Result<_>>()?;
        let mut monomials: Vec<&Vec<u32>> = nfs.iter().flat_map(|p| p.terms().keys()).collect();
        monomials.sort();
        monomials.dedup();
        let vectors: Vec<Vec<Rational>> = nfs
            .iter()
            .map(|p| monomials.iter().map(|e| p.terms().get(*e).cloned().unwrap_or_else(Rational::zero)).collect())
            .collect();
        if let Some(dep) = q_linear_dependencies(&vectors)?.first() {
            return Err(Error::Invalid(format!(
                "basis symbols are Q-linearly dependent: {} = 0",
                self.render_combination(dep)
            )));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn kernel(&self) -> Option<&str> {
        self.kernel.as_deref()
    }

    pub fn locus(&self) -> &GVariety {
        &self.locus
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == symbol)
    }

    /// Transcendence degree of the whole presentation, `dim locus`.
    pub fn td(&self) -> usize {
        self.locus.dimension()
    }

    /// Linear dimension of the basis.
    pub fn ldim(&self) -> usize {
        self.n()
    }

    /// Reduced relations, rendered over the basis symbols.
    pub fn relations(&self) -> Vec<String> {
        match self.locus.ideal_basis() {
            Ok(gb) => gb.generators().iter().map(|g| self.render(g)).collect(),
            Err(_) => self.locus.generators().iter().map(|g| self.render(g)).collect(),
        }
    }

    /// Renders a polynomial of the coordinate or saturated ring with basis
    /// symbols and `exp(...)`.
    pub fn render(&self, p: &MultiPoly) -> String {
        let n = self.n();
        let name = |i: usize| {
            if i < n {
                self.basis[i].clone()
            } else if i < 2 * n {
                format!("exp({})", self.basis[i - n])
            } else if i < 3 * n {
                format!("exp(-{})", self.basis[i - 2 * n])
            } else {
                p.ring().name(i).to_string()
            }
        };
        text::render_poly(p, &name)
    }

    /// `2*b1 - b2` style rendering of a coefficient row.
    pub fn render_combination(&self, row: &[Rational]) -> String {
        let ring = self.locus.ring();
        let p = row
            .iter()
            .enumerate()
            .fold(MultiPoly::zero(ring), |acc, (k, c)| &acc + &MultiPoly::var_at(ring, k).scale(c));
        self.render(&p)
    }

    /// Parses an element: a polynomial in the basis symbols and their
    /// exponentials, e.g. `b1 + exp(b2)`.
    pub fn parse_element(&self, src: &str) -> Result<MultiPoly> {
        parse_over(&self.basis, self.locus.ring(), src)
    }

    /// Parses a Q-linear combination of basis symbols into a coefficient row.
    pub fn parse_combination(&self, src: &str) -> Result<Vec<Rational>> {
        let p = self.parse_element(src)?;
        self.combination_of(&p)
            .ok_or_else(|| Error::NotExpressible(format!("`{src}` is not a Q-linear combination of basis symbols")))
    }

    fn combination_of(&self, p: &MultiPoly) -> Option<Vec<Rational>> {
        let n = self.n();
        let mut row = vec![Rational::zero(); n];
        for (e, c) in p.terms() {
            let k = e.iter().position(|&d| d > 0)?;
            if k >= n || e[k] != 1 || e.iter().filter(|&&d| d > 0).count() != 1 {
                return None;
            }
            row[k] = c.clone();
        }
        Some(row)
    }

    /// `exp(a)` in the saturated ring, for `a` an integer combination of
    /// basis symbols.
    pub fn exponential(&self, a: &MultiPoly) -> Result<MultiPoly> {
        let n = self.n();
        let not_expressible = || Error::NotExpressible(format!("exp({}) is not in the presentation", self.render(a)));
        let a = a.embed(self.locus.ring()).map_err(|_| not_expressible())?;
        let row = self.combination_of(&a).ok_or_else(not_expressible)?;
        let ring = self.locus.saturated_basis().ring().clone();
        let mut e = vec![0u32; ring.len()];
        for (k, c) in row.iter().enumerate() {
            if !c.is_integer() {
                return Err(not_expressible());
            }
            let m: u32 = c.to_integer().magnitude().try_into().map_err(|_| not_expressible())?;
            if c.is_positive() {
                e[n + k] = m;
            } else {
                e[2 * n + k] = m;
            }
        }
        Ok(MultiPoly::monomial(&ring, e, rat(1, 1)))
    }
}

fn with_kernel(basis: &[String], kernel: Option<&str>) -> Vec<String> {
    let mut names = basis.to_vec();
    if let Some(tau) = kernel {
        if !names.iter().any(|b| b == tau) {
            names.insert(0, tau.to_string());
        }
    }
    names
}

fn parse_over(basis: &[String], ring: &Arc<Ring>, src: &str) -> Result<MultiPoly> {
    let resolver = Symbols { basis, ring };
    match src.split_once('=') {
        Some((l, r)) => {
            let lhs = text::parse_poly_with(l, ring, &resolver)?;
            let rhs = text::parse_poly_with(r, ring, &resolver).map_err(|e| shift_column(e, l.chars().count() + 1))?;
            Ok(&lhs - &rhs)
        }
        None => text::parse_poly_with(src, ring, &resolver),
    }
}

/// Nonzero rows of the reduced row echelon form of the span.
fn span(rows: &[Vec<Rational>], n: usize) -> Vec<Vec<Rational>> {
    if rows.is_empty() || n == 0 {
        return Vec::new();
    }
    let m = RatMatrix::from_rows(rows.to_vec(), n).expect("rows have length n");
    let r = m.rref();
    r.matrix.to_rows().into_iter().take(r.rank).collect()
}

/// A partial exponential subfield given by a Q-subspace of the basis span
/// (in reduced row echelon form). Sub-presentations generated by basis
/// symbols are the coordinate subspaces.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SubPresentation {
    n: usize,
    rows: Vec<Vec<Rational>>,
}

impl SubPresentation {
    pub fn from_rows(n: usize, rows: &[Vec<Rational>]) -> Result<Self> {
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("elements must have {n} coefficients")));
        }
        Ok(Self { n, rows: span(rows, n) })
    }

    pub fn trivial(f: &EFieldPresentation) -> Self {
        Self { n: f.n(), rows: Vec::new() }
    }

    pub fn full(f: &EFieldPresentation) -> Self {
        let rows = (0..f.n()).map(|k| unit(f.n(), k)).collect::<Vec<_>>();
        Self { n: f.n(), rows }
    }

    /// Generated by the named basis symbols.
    pub fn from_symbols(f: &EFieldPresentation, symbols: &[String]) -> Result<Self> {
        let rows = symbols
            .iter()
            .map(|s| {
                f.index_of(s)
                    .map(|k| unit(f.n(), k))
                    .ok_or_else(|| Error::NotExpressible(format!("`{s}` is not a basis symbol")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(f.n(), &rows)
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.rows
    }

    pub fn ldim(&self) -> usize {
        self.rows.len()
    }

    pub fn join(&self, more: &[Vec<Rational>]) -> Self {
        let mut rows = self.rows.clone();
        rows.extend(more.iter().cloned());
        Self { n: self.n, rows: span(&rows, self.n) }
    }

    pub fn contains(&self, other: &SubPresentation) -> bool {
        self.join(&other.rows).rows.len() == self.rows.len()
    }

    pub fn describe(&self, f: &EFieldPresentation) -> Vec<String> {
        self.rows.iter().map(|r| f.render_combination(r)).collect()
    }
}

fn unit(n: usize, k: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[k] = Rational::one();
    v
}

/// Memoized `td(a, exp(a))` for Q-subspaces of the basis span.
struct TdOracle<'a> {
    f: &'a EFieldPresentation,
    cache: RefCell<HashMap<Vec<Vec<Rational>>, usize>>,
}

impl<'a> TdOracle<'a> {
    fn new(f: &'a EFieldPresentation) -> Self {
        Self {
            f,
            cache: RefCell::new(HashMap::new()),
        }
    }

    fn integer_rows(&self, rows: &[Vec<Rational>]) -> IntMatrix {
        let rows: Vec<Vec<_>> = rows.iter().map(|r| primitive_integer_vector(r)).collect();
        IntMatrix::from_rows(rows, self.f.n()).expect("rows have length n")
    }

    /// `exp` of a rational multiple is algebraic over `exp` of the
    /// primitive integer row, so td only depends on the rational span.
    fn td(&self, rows: &[Vec<Rational>]) -> Result<usize> {
        let key = span(rows, self.f.n());
        if key.is_empty() {
            return Ok(0);
        }
        if let Some(&d) = self.cache.borrow().get(&key) {
            return Ok(d);
        }
        let d = self.f.locus.image_dimension(&self.integer_rows(&key))?;
        self.cache.borrow_mut().insert(key, d);
        Ok(d)
    }

    fn td_lower_bound(&self, rows: &[Vec<Rational>]) -> Result<usize> {
        let key = span(rows, self.f.n());
        if key.is_empty() {
            return Ok(0);
        }
        if let Some(&d) = self.cache.borrow().get(&key) {
            return Ok(d);
        }
        self.f.locus.image_dimension_lower_bound(&self.integer_rows(&key))
    }

    fn delta(&self, a: &[Vec<Rational>], base: &SubPresentation) -> Result<DeltaReport> {
        let mut joint = base.rows.clone();
        joint.extend(a.iter().cloned());
        let td = self.td(&joint)? - self.td(&base.rows)?;
        let ldim = span(&joint, self.f.n()).len() - base.rows.len();
        Ok(DeltaReport {
            td,
            ldim,
            delta: td as i64 - ldim as i64,
        })
    }

    /// True when `δ(a/base) ≥ 0` already follows from a lower bound on td.
    fn surely_nonnegative(&self, a: &[Vec<Rational>], base: &SubPresentation) -> Result<bool> {
        let mut joint = base.rows.clone();
        joint.extend(a.iter().cloned());
        let ldim = span(&joint, self.f.n()).len() - base.rows.len();
        let lb = self.td_lower_bound(&joint)?;
        Ok(lb >= self.td(&base.rows)? + ldim)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaReport {
    pub td: usize,
    pub ldim: usize,
    pub delta: i64,
}

fn check_rows(f: &EFieldPresentation, a: &[Vec<Rational>], base: &SubPresentation) -> Result<()> {
    if base.n != f.n() || a.iter().any(|r| r.len() != f.n()) {
        return Err(Error::NotExpressible(format!(
            "elements must be combinations of the {} basis symbols",
            f.n()
        )));
    }
    Ok(())
}

/// `δ(a/F0) = td(a, exp(a)/F0) - ldim_Q(a/F0)`.
pub fn delta(f: &EFieldPresentation, a: &[Vec<Rational>], base: &SubPresentation) -> Result<DeltaReport> {
    check_rows(f, a, base)?;
    TdOracle::new(f).delta(a, base)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchanuelVerdict {
    Holds,
    Violated,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SchanuelCheck {
    pub verdict: SchanuelVerdict,
    #[serde(flatten)]
    pub delta: DeltaReport,
}

/// `δ(a) ≥ 0` for one tuple.
pub fn schanuel_check(f: &EFieldPresentation, a: &[Vec<Rational>]) -> Result<SchanuelCheck> {
    let d = delta(f, a, &SubPresentation::trivial(f))?;
    Ok(SchanuelCheck {
        verdict: if d.delta >= 0 {
            SchanuelVerdict::Holds
        } else {
            SchanuelVerdict::Violated
        },
        delta: d,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum StrongnessVerdict {
    StrongUpTo { bound: u32 },
    NotStrong,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongnessWitness {
    pub elements: Vec<String>,
    #[serde(skip)]
    pub rows: Vec<Vec<Rational>>,
    pub delta: DeltaReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StrongnessReport {
    pub bound: u32,
    #[serde(flatten)]
    pub verdict: StrongnessVerdict,
    pub witness: Option<StrongnessWitness>,
    pub tuples_checked: usize,
}

impl StrongnessReport {
    pub fn is_strong(&self) -> bool {
        matches!(self.verdict, StrongnessVerdict::StrongUpTo { .. })
    }
}

fn strong_search(oracle: &TdOracle, base: &SubPresentation, bound: u32) -> Result<StrongnessReport> {
    let f = oracle.f;
    let n = f.n();
    let pivots: Vec<usize> = base
        .rows
        .iter()
        .map(|r| r.iter().position(|c| !c.is_zero()).expect("rows are nonzero"))
        .collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivots.contains(c)).collect();
    let mut checked = 0;
    if !free.is_empty() {
        // subspaces over the base correspond to subspaces of the free coordinates
        for (m, _) in enumerate_row_spaces(free.len(), bound) {
            checked += 1;
            let rows: Vec<Vec<Rational>> = m
                .to_rows()
                .into_iter()
                .map(|r| {
                    let mut full = vec![Rational::zero(); n];
                    for (j, c) in free.iter().zip(r) {
                        full[*j] = Rational::from_integer(c);
                    }
                    full
                })
                .collect();
            if oracle.surely_nonnegative(&rows, base)? {
                continue;
            }
            let d = oracle.delta(&rows, base)?;
            if d.delta < 0 {
                return Ok(StrongnessReport {
                    bound,
                    verdict: StrongnessVerdict::NotStrong,
                    witness: Some(StrongnessWitness {
                        elements: rows.iter().map(|r| f.render_combination(r)).collect(),
                        rows,
                        delta: d,
                    }),
                    tuples_checked: checked,
                });
            }
        }
    }
    Ok(StrongnessReport {
        bound,
        verdict: StrongnessVerdict::StrongUpTo { bound },
        witness: None,
        tuples_checked: checked,
    })
}

/// Searches tuples with integer coefficients bounded by `bound` (one per
/// subspace over `base`, in Hermite form) for `δ(a/base) < 0`.
pub fn is_strong_up_to(f: &EFieldPresentation, base: &SubPresentation, bound: u32) -> Result<StrongnessReport> {
    check_rows(f, &[], base)?;
    if bound == 0 {
        return Err(Error::Invalid("strongness bound must be at least 1".into()));
    }
    strong_search(&TdOracle::new(f), base, bound)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullStep {
    pub adjoined: Vec<String>,
    pub delta: DeltaReport,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HullReport {
    pub bound: u32,
    pub hull: Vec<String>,
    #[serde(skip)]
    pub sub: SubPresentation,
    pub trace: Vec<HullStep>,
}

/// Grows `start` by tuples with negative relative predimension until the
/// bounded search finds none.
pub fn hull_up_to(f: &EFieldPresentation, start: &SubPresentation, bound: u32) -> Result<HullReport> {
    check_rows(f, &[], start)?;
    if bound == 0 {
        return Err(Error::Invalid("strongness bound must be at least 1".into()));
    }
    let oracle = TdOracle::new(f);
    let mut current = start.clone();
    let mut trace = Vec::new();
    loop {
        let report = strong_search(&oracle, &current, bound)?;
        match report.witness {
            Some(w) => {
                current = current.join(&w.rows);
                trace.push(HullStep {
                    adjoined: w.elements,
                    delta: w.delta,
                });
            }
            None => break,
        }
    }
    Ok(HullReport {
        bound,
        hull: current.describe(f),
        sub: current,
        trace,
    })
}

/// A variety to adjoin to a base presentation under new symbols. Parameters
/// of the variety name basis symbols of the base.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionDatum {
    pub base: EFieldPresentation,
    pub variety: GVariety,
    pub symbols: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Extension {
    pub presentation: EFieldPresentation,
    pub new_symbols: Vec<String>,
    /// `dim V = n`.
    pub exponentially_algebraic: bool,
    pub variety_dimension: usize,
    pub additive: FreenessCertificate,
    pub multiplicative: FreenessCertificate,
    pub rotundity: RotundityReport,
    /// Strongness of the base in the extension.
    pub base_strong: StrongnessReport,
    /// `δ(c/F)` recomputed in the new presentation.
    pub delta_new: DeltaReport,
}

/// Locus of `base` plus the generators of `v` at the new coordinates.
fn instantiate(base: &EFieldPresentation, gens: &[MultiPoly], m: usize, symbols: &[String]) -> Result<EFieldPresentation> {
    let n = base.n();
    let total = n + m;
    let ring = coordinate_ring(total, &[])?;
    let old_images: Vec<MultiPoly> = (0..n)
        .map(|k| MultiPoly::var_at(&ring, k))
        .chain((0..n).map(|k| MultiPoly::var_at(&ring, total + k)))
        .collect();
    let mut relations = base
        .locus
        .generators()
        .iter()
        .map(|g| g.compose(&ring, &old_images))
        .collect::<Result<Vec<_>>>()?;
    for g in gens {
        let vr = g.ring();
        let mut images: Vec<MultiPoly> = (0..m)
            .map(|j| MultiPoly::var_at(&ring, n + j))
            .chain((0..m).map(|j| MultiPoly::var_at(&ring, total + n + j)))
            .collect();
        for p in vr.param_names() {
            let k = base
                .index_of(p)
                .ok_or_else(|| Error::NotExpressible(format!("parameter `{p}` is not a symbol of the base")))?;
            images.push(MultiPoly::var_at(&ring, k));
        }
        relations.push(g.compose(&ring, &images)?);
    }
    let mut basis = base.basis.clone();
    basis.extend(symbols.iter().cloned());
    EFieldPresentation::with_budget(&basis, base.kernel.as_deref(), relations, base.locus.budget())
}

fn failure(reason: String, certificate: Certificate) -> Error {
    Error::Precondition(Box::new(PreconditionFailure { reason, certificate }))
}

/// `F|V`: adjoins a generic point `(c, exp(c))` of `V` to `F`, after checking
/// that `V` is additively free, multiplicatively free and rotund up to the
/// bounds, and of dimension at least `n`.
pub fn extend_by_variety(datum: &ExtensionDatum, bounds: &Bounds) -> Result<Extension> {
    let ExtensionDatum { base, variety, symbols } = datum;
    let m = variety.n();
    if symbols.len() != m {
        return Err(Error::Dimension(format!("{} new symbols for a variety in G^{m}", symbols.len())));
    }
    let d = variety.dimension();
    if d < m {
        return Err(failure(
            format!("dimension {d} < {m}"),
            Certificate::Dimension { found: d, required: m },
        ));
    }
    let additive = is_additively_free(variety)?;
    if additive.is_not_free() {
        return Err(failure(additive.summary(), Certificate::Freeness(additive)));
    }
    let multiplicative = is_multiplicatively_free_up_to(variety, bounds.mult)?;
    if multiplicative.is_not_free() {
        return Err(failure(multiplicative.summary(), Certificate::Freeness(multiplicative)));
    }
    let rotundity = is_rotund_up_to(variety, bounds.rotund)?;
    if !rotundity.is_rotund() {
        return Err(failure(rotundity.summary(), Certificate::Rotundity(rotundity)));
    }
    let presentation = instantiate(base, variety.generators(), m, symbols)?;
    let old: Vec<Vec<Rational>> = (0..base.n()).map(|k| unit(presentation.n(), k)).collect();
    let old = SubPresentation::from_rows(presentation.n(), &old)?;
    let new_rows: Vec<Vec<Rational>> = (base.n()..presentation.n()).map(|k| unit(presentation.n(), k)).collect();
    let oracle = TdOracle::new(&presentation);
    let delta_new = oracle.delta(&new_rows, &old)?;
    let base_strong = strong_search(&oracle, &old, bounds.strong)?;
    drop(oracle);
    Ok(Extension {
        new_symbols: symbols.clone(),
        exponentially_algebraic: d == m,
        variety_dimension: d,
        additive,
        multiplicative,
        rotundity,
        base_strong,
        delta_new,
        presentation,
    })
}

/// Generators of `{(u, w) : (k·u, w^k) ∈ V}`.
fn divided(v: &GVariety, k: u32) -> Result<Vec<MultiPoly>> {
    let ring = v.ring();
    let m = v.n();
    let scale = rat(k as i64, 1);
    let images: Vec<MultiPoly> = (0..m)
        .map(|j| MultiPoly::var_at(ring, j).scale(&scale))
        .chain((0..m).map(|j| MultiPoly::var_at(ring, m + j).pow(k)))
        .chain((2 * m..ring.len()).map(|j| MultiPoly::var_at(ring, j)))
        .collect();
    v.generators().iter().map(|g| g.compose(ring, &images)).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsomorphismReport {
    pub isomorphic: bool,
    pub m_max: u32,
    /// Divisors `(m1, m2)` under which the loci of `(c/m, exp(c/m))` agree.
    pub divisors: Option<(u32, u32)>,
}

/// Compares the loci of `(c/m1, exp(c/m1))` and `(c'/m2, exp(c'/m2))` over
/// the common base, with `c ↔ c'`, for `m1, m2 ≤ m_max`.
pub fn extensions_isomorphic(e1: &ExtensionDatum, e2: &ExtensionDatum, m_max: u32) -> Result<IsomorphismReport> {
    if e1.base != e2.base {
        return Err(Error::Inconsistent("extensions have different bases".into()));
    }
    let m = e1.variety.n();
    if e2.variety.n() != m {
        return Err(Error::Inconsistent(format!(
            "extensions adjoin {} and {} elements",
            m,
            e2.variety.n()
        )));
    }
    let symbols: Vec<String> = (0..m).map(|j| format!("c{}", j + 1)).collect();
    let fresh: Vec<String> = symbols
        .iter()
        .map(|s| {
            let mut s = s.clone();
            while e1.base.index_of(&s).is_some() {
                s.insert(0, 'c');
            }
            s
        })
        .collect();
    let loci = |e: &ExtensionDatum| -> Result<Vec<EFieldPresentation>> {
        (1..=m_max)
            .map(|k| instantiate(&e.base, &divided(&e.variety, k)?, m, &fresh))
            .collect()
    };
    let (l1, l2) = (loci(e1)?, loci(e2)?);
    for (i, a) in l1.iter().enumerate() {
        for (j, b) in l2.iter().enumerate() {
            if a.locus == b.locus {
                return Ok(IsomorphismReport {
                    isomorphic: true,
                    m_max,
                    divisors: Some((i as u32 + 1, j as u32 + 1)),
                });
            }
        }
    }
    Ok(IsomorphismReport {
        isomorphic: false,
        m_max,
        divisors: None,
    })
}

/// Configuration `e_{N+1}(c) = c`: coordinates `c0..cN` with
/// `exp(c_i) = c_{i+1}` and `exp(c_N) = c_0`. Returns the presentation with
/// basis `c0..cN` and the variety in `G^{N+1}`.
pub fn iterated_exp_config(depth: usize) -> Result<(EFieldPresentation, GVariety)> {
    let n = depth + 1;
    let ring = coordinate_ring(n, &[])?;
    let gens: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let y = MultiPoly::var(&ring, &multiplicative_name(i)).expect("coordinate exists");
            let x = MultiPoly::var(&ring, &additive_name((i + 1) % n)).expect("coordinate exists");
            &y - &x
        })
        .collect();
    let v = GVariety::new(n, &[], gens.clone())?;
    let basis: Vec<String> = (0..n).map(|i| format!("c{i}")).collect();
    let f = EFieldPresentation::new(&basis, None, gens)?;
    Ok((f, v))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn row(f: &EFieldPresentation, s: &str) -> Vec<Rational> {
        f.parse_combination(s).unwrap()
    }

    fn generic_pair() -> EFieldPresentation {
        EFieldPresentation::parse(&names(&["b"]), None, &[]).unwrap()
    }

    fn collapse() -> EFieldPresentation {
        EFieldPresentation::parse(&names(&["b"]), None, &["exp(b) = b", "exp(b)^2 = b"]).unwrap()
    }

    /// `c = b^2`, `exp(c) = exp(b) + b`: `(c, exp(c))` is algebraic over `b`.
    fn tied() -> EFieldPresentation {
        EFieldPresentation::parse(&names(&["b", "c"]), None, &["c = b^2", "exp(c) = exp(b) + b"]).unwrap()
    }

    #[test]
    fn delta_examples() {
        let f = generic_pair();
        assert_eq!(delta(&f, &[row(&f, "b")], &SubPresentation::trivial(&f)).unwrap().delta, 1);
        let f = EFieldPresentation::parse(&names(&["b1", "b2"]), None, &["exp(b2) = exp(b1)^2"]).unwrap();
        let d = delta(&f, &[row(&f, "b1"), row(&f, "b2")], &SubPresentation::trivial(&f)).unwrap();
        assert_eq!((d.td, d.ldim, d.delta), (3, 2, 1));
        let k = EFieldPresentation::standard_kernel("tau").unwrap();
        let d = delta(&k, &[row(&k, "tau")], &SubPresentation::trivial(&k)).unwrap();
        assert_eq!((d.td, d.delta), (1, 0));
    }

    #[test]
    fn schanuel_examples() {
        let f = generic_pair();
        assert_eq!(schanuel_check(&f, &[row(&f, "b")]).unwrap().verdict, SchanuelVerdict::Holds);
        let c = collapse();
        let s = schanuel_check(&c, &[row(&c, "b")]).unwrap();
        assert_eq!((s.verdict, s.delta.delta), (SchanuelVerdict::Violated, -1));
        let k = EFieldPresentation::standard_kernel("tau").unwrap();
        assert_eq!(schanuel_check(&k, &[row(&k, "tau")]).unwrap().delta.delta, 0);
    }

    #[test]
    fn dependent_basis_rejected() {
        let r = EFieldPresentation::parse(&names(&["a", "b"]), None, &["b = 2*a"]);
        assert!(matches!(r, Err(Error::Invalid(_))));
    }

    #[test]
    fn strongness_examples() {
        let f = generic_pair();
        assert!(is_strong_up_to(&f, &SubPresentation::trivial(&f), 3).unwrap().is_strong());
        let c = collapse();
        let r = is_strong_up_to(&c, &SubPresentation::trivial(&c), 3).unwrap();
        assert_eq!(r.witness.unwrap().elements, vec!["b".to_string()]);
        let t = tied();
        assert!(is_strong_up_to(&t, &SubPresentation::full(&t), 3).unwrap().is_strong());
    }

    #[test]
    fn hull_examples() {
        let f = generic_pair();
        assert_eq!(hull_up_to(&f, &SubPresentation::trivial(&f), 3).unwrap().sub.ldim(), 0);
        let t = tied();
        let b = SubPresentation::from_symbols(&t, &names(&["b"])).unwrap();
        let h = hull_up_to(&t, &b, 3).unwrap();
        assert_eq!(h.hull, vec!["b".to_string(), "c".to_string()]);
        assert_eq!(h.trace[0].delta.delta, -1);
        let full = SubPresentation::full(&t);
        assert_eq!(hull_up_to(&t, &full, 3).unwrap().sub, full);
    }

    #[test]
    fn hull_is_idempotent_and_monotone() {
        for f in [generic_pair(), collapse(), tied()] {
            let subsets: Vec<SubPresentation> = (0..1u32 << f.n())
                .map(|mask| {
                    let syms: Vec<String> =
                        f.basis().iter().enumerate().filter(|(k, _)| mask >> k & 1 == 1).map(|(_, s)| s.clone()).collect();
                    SubPresentation::from_symbols(&f, &syms).unwrap()
                })
                .collect();
            let hulls: Vec<SubPresentation> = subsets.iter().map(|s| hull_up_to(&f, s, 2).unwrap().sub).collect();
            for (s, h) in subsets.iter().zip(&hulls) {
                assert!(h.contains(s));
                assert_eq!(hull_up_to(&f, h, 2).unwrap().sub, *h);
            }
            for (i, a) in subsets.iter().enumerate() {
                for (j, b) in subsets.iter().enumerate() {
                    if b.contains(a) {
                        assert!(hulls[j].contains(&hulls[i]));
                    }
                }
            }
        }
    }

    #[test]
    fn delta_is_additive() {
        for f in [tied(), EFieldPresentation::parse(&names(&["b1", "b2"]), None, &["exp(b2) = exp(b1)^2"]).unwrap()] {
            let base = SubPresentation::trivial(&f);
            let (a, b) = (vec![unit(2, 0)], vec![row(&f, &format!("{} + {}", f.basis()[0], f.basis()[1]))]);
            let ab: Vec<Vec<Rational>> = a.iter().chain(&b).cloned().collect();
            let whole = delta(&f, &ab, &base).unwrap().delta;
            let first = delta(&f, &a, &base).unwrap().delta;
            let second = delta(&f, &b, &base.join(&a)).unwrap().delta;
            assert_eq!(whole, first + second);
        }
    }

    fn fixed_point_datum() -> ExtensionDatum {
        ExtensionDatum {
            base: EFieldPresentation::standard_kernel("tau").unwrap(),
            variety: GVariety::parse(1, &[], &["y1 - x1"]).unwrap(),
            symbols: names(&["a"]),
        }
    }

    #[test]
    fn fixed_point_extension() {
        let e = extend_by_variety(&fixed_point_datum(), &Bounds::default()).unwrap();
        assert!(e.exponentially_algebraic);
        assert_eq!(e.delta_new.delta, 0);
        assert!(e.base_strong.is_strong());
        assert_eq!(e.presentation.relations(), vec!["a - exp(a)".to_string(), "exp(tau) - 1".to_string()]);
    }

    #[test]
    fn generic_extension() {
        let datum = ExtensionDatum {
            variety: GVariety::full(1, &[]).unwrap(),
            ..fixed_point_datum()
        };
        let e = extend_by_variety(&datum, &Bounds::default()).unwrap();
        assert!(!e.exponentially_algebraic);
        assert_eq!(e.presentation.td(), datum.base.td() + 2);
        assert_eq!(e.presentation.ldim(), datum.base.ldim() + 1);
        assert_eq!(e.delta_new.delta, 1);
    }

    #[test]
    fn extension_precondition_failure() {
        let datum = ExtensionDatum {
            variety: GVariety::parse(1, &[], &["x1"]).unwrap(),
            ..fixed_point_datum()
        };
        match extend_by_variety(&datum, &Bounds::default()) {
            Err(Error::Precondition(p)) => match &p.certificate {
                Certificate::Dimension { found, required } => assert_eq!((*found, *required), (1, 1)),
                Certificate::Freeness(c) => {
                    let w = c.witness.as_ref().unwrap();
                    assert_eq!((w.m.clone(), w.constant.as_str()), (vec![1], "0"));
                }
                other => panic!("{other:?}"),
            },
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn isomorphism_examples() {
        let e = fixed_point_datum();
        assert!(extensions_isomorphic(&e, &e, 1).unwrap().isomorphic);
        let swapped = ExtensionDatum {
            variety: GVariety::parse(1, &[], &["x1 - y1"]).unwrap(),
            ..fixed_point_datum()
        };
        assert!(extensions_isomorphic(&e, &swapped, 1).unwrap().isomorphic);
        let doubled = ExtensionDatum {
            variety: GVariety::parse(1, &[], &["x1 - 2*y1"]).unwrap(),
            ..fixed_point_datum()
        };
        let r = extensions_isomorphic(&e, &doubled, 1).unwrap();
        assert!(!r.isomorphic);
        assert!(!extensions_isomorphic(&doubled, &e, 4).unwrap().isomorphic);
    }

    #[test]
    fn iterated_configurations() {
        for depth in 0..=4 {
            let (f, v) = iterated_exp_config(depth).unwrap();
            assert_eq!(v.dimension(), depth + 1);
            assert_eq!(f.td(), depth + 1);
        }
        let (_, v0) = iterated_exp_config(0).unwrap();
        assert!(v0.same_ideal(&GVariety::parse(1, &[], &["y1 - x1"]).unwrap()));
        let (_, v1) = iterated_exp_config(1).unwrap();
        assert!(v1.same_ideal(&GVariety::parse(2, &[], &["y1 - x2", "y2 - x1"]).unwrap()));
    }
}
