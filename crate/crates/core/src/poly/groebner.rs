//! Buchberger's algorithm with the product and chain criteria, normal pair
//! selection, and a deterministic reduction budget.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use num_traits::{One, Zero};
use serde::{Serialize, Serializer};

use super::{Exponents, MonomialOrder, MultiPoly, Ring};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Default number of reduction steps before a computation gives up.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Terms in ascending order, so the leading term is the last one.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SPoly(Vec<(Exponents, Rational)>);

impl SPoly {
    fn lead(&self) -> Option<&(Exponents, Rational)> {
        self.0.last()
    }

    fn lm(&self) -> &Exponents {
        &self.0.last().expect("nonzero polynomial").0
    }

    fn make_monic(&mut self) {
        if let Some((_, lc)) = self.0.last() {
            if !lc.is_one() {
                let inv = lc.recip();
                for (_, c) in &mut self.0 {
                    *c = &*c * &inv;
                }
            }
        }
    }
}

struct Ctx {
    order: MonomialOrder,
    n_geometric: usize,
    budget: u64,
    steps: u64,
}

impl Ctx {
    fn cmp(&self, a: &[u32], b: &[u32]) -> Ordering {
        self.order.compare(a, b, self.n_geometric)
    }

    fn tick(&mut self) -> Result<()> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::Budget { limit: self.budget });
        }
        Ok(())
    }

    fn sorted(&self, p: &MultiPoly) -> SPoly {
        let mut v: Vec<(Exponents, Rational)> =
            p.terms().iter().map(|(e, c)| (e.clone(), c.clone())).collect();
        v.sort_by(|a, b| self.cmp(&a.0, &b.0));
        SPoly(v)
    }

    /// p - c * m * g
    fn sub_mul(&self, p: &SPoly, c: &Rational, m: &[u32], g: &SPoly) -> SPoly {
        let mut out = Vec::with_capacity(p.0.len() + g.0.len());
        let mut i = 0;
        let mut j = 0;
        let shifted = |k: usize| -> Exponents { g.0[k].0.iter().zip(m).map(|(a, b)| a + b).collect() };
        let mut gj = if g.0.is_empty() { None } else { Some(shifted(0)) };
        while i < p.0.len() || gj.is_some() {
            let ord = match (&gj, p.0.get(i)) {
                (None, Some(_)) => Ordering::Less,
                (Some(_), None) => Ordering::Greater,
                (Some(e), Some((pe, _))) => self.cmp(pe, e),
                (None, None) => unreachable!(),
            };
            match ord {
                Ordering::Less => {
                    out.push(p.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    let e = gj.take().unwrap();
                    out.push((e, -(c * &g.0[j].1)));
                    j += 1;
                    gj = (j < g.0.len()).then(|| shifted(j));
                }
                Ordering::Equal => {
                    let e = gj.take().unwrap();
                    let v = &p.0[i].1 - c * &g.0[j].1;
                    if !v.is_zero() {
                        out.push((e, v));
                    }
                    i += 1;
                    j += 1;
                    gj = (j < g.0.len()).then(|| shifted(j));
                }
            }
        }
        SPoly(out)
    }

    /// Reduces the head of `p` until it is not divisible by any leading
    /// monomial of `basis`; the tail is left alone.
    fn reduce_head(&mut self, p: SPoly, basis: &[SPoly]) -> Result<SPoly> {
        let mut p = p;
        while let Some((lm, lc)) = p.lead().cloned() {
            let Some(g) = basis.iter().find(|g| divides(g.lm(), &lm)) else {
                break;
            };
            self.tick()?;
            let (glm, glc) = g.lead().unwrap();
            let m = mono_div(&lm, glm);
            let c = &lc / glc;
            p = self.sub_mul(&p, &c, &m, g);
        }
        Ok(p)
    }

    /// Full reduction of `p` modulo `basis` (every term, not only the head).
    fn reduce(&mut self, p: SPoly, basis: &[SPoly]) -> Result<SPoly> {
        let mut p = p;
        let mut rem: Vec<(Exponents, Rational)> = Vec::new();
        while let Some((lm, lc)) = p.lead().cloned() {
            let deg: u32 = lm.iter().sum();
            let divisor = basis.iter().find(|g| {
                let glm = g.lm();
                glm.iter().sum::<u32>() <= deg && divides(glm, &lm)
            });
            match divisor {
                Some(g) => {
                    self.tick()?;
                    let (glm, glc) = g.lead().unwrap();
                    let m = mono_div(&lm, glm);
                    let c = &lc / glc;
                    p = self.sub_mul(&p, &c, &m, g);
                }
                None => {
                    let t = p.0.pop().unwrap();
                    rem.push(t);
                }
            }
        }
        rem.reverse();
        Ok(SPoly(rem))
    }

    fn spoly(&self, f: &SPoly, g: &SPoly) -> SPoly {
        let l = mono_lcm(f.lm(), g.lm());
        let mf = mono_div(&l, f.lm());
        let mg = mono_div(&l, g.lm());
        let zero = SPoly(Vec::new());
        let a = self.sub_mul(&zero, &-Rational::one(), &mf, f);
        self.sub_mul(&a, &Rational::one(), &mg, g)
    }
}

fn divides(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x <= y)
}

fn mono_div(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn mono_lcm(a: &[u32], b: &[u32]) -> Exponents {
    a.iter().zip(b).map(|(x, y)| *x.max(y)).collect()
}

fn coprime(a: &[u32], b: &[u32]) -> bool {
    a.iter().zip(b).all(|(x, y)| *x == 0 || *y == 0)
}

fn pair_key(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

fn degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

/// Pairs are selected by sugar degree (the degree the S-polynomial would
/// have if every input were homogenized), which keeps block orders sane.
fn buchberger(gens: Vec<SPoly>, ctx: &mut Ctx) -> Result<Vec<SPoly>> {
    struct State {
        basis: Vec<SPoly>,
        sugar: Vec<u32>,
        queue: BTreeSet<(u32, u32, usize, usize)>,
        pending: HashSet<(usize, usize)>,
    }

    impl State {
        fn push(&mut self, g: SPoly, sugar: u32) {
            let k = self.basis.len();
            for (i, b) in self.basis.iter().enumerate() {
                let l = mono_lcm(b.lm(), g.lm());
                let dl = degree(&l);
                let s = (self.sugar[i] + dl - degree(b.lm())).max(sugar + dl - degree(g.lm()));
                self.queue.insert((s, dl, i, k));
                self.pending.insert((i, k));
            }
            self.basis.push(g);
            self.sugar.push(sugar);
        }
    }

    let mut st = State {
        basis: Vec::new(),
        sugar: Vec::new(),
        queue: BTreeSet::new(),
        pending: HashSet::new(),
    };

    for g in gens {
        let sugar = g.0.iter().map(|(e, _)| degree(e)).max().unwrap_or(0);
        let mut r = ctx.reduce_head(g, &st.basis)?;
        if r.0.is_empty() {
            continue;
        }
        r.make_monic();
        st.push(r, sugar);
    }

    while let Some((sugar, _, i, j)) = st.queue.pop_first() {
        st.pending.remove(&(i, j));
        let (fi, fj) = (&st.basis[i], &st.basis[j]);
        if coprime(fi.lm(), fj.lm()) {
            continue;
        }
        let l = mono_lcm(fi.lm(), fj.lm());
        let chain = (0..st.basis.len()).any(|k| {
            k != i
                && k != j
                && divides(st.basis[k].lm(), &l)
                && !st.pending.contains(&pair_key(i, k))
                && !st.pending.contains(&pair_key(j, k))
        });
        if chain {
            continue;
        }
        let s = ctx.spoly(fi, fj);
        ctx.tick()?;
        let mut r = ctx.reduce_head(s, &st.basis)?;
        if r.0.is_empty() {
            continue;
        }
        r.make_monic();
        if r.lm().iter().all(|&e| e == 0) {
            return Ok(vec![r]);
        }
        st.push(r, sugar);
    }
    interreduce(st.basis, ctx)
}

fn interreduce(basis: Vec<SPoly>, ctx: &mut Ctx) -> Result<Vec<SPoly>> {
    let mut basis = basis;
    basis.sort_by(|a, b| ctx.cmp(a.lm(), b.lm()));
    let mut minimal: Vec<SPoly> = Vec::new();
    for g in basis {
        if minimal.iter().any(|h| divides(h.lm(), g.lm())) {
            continue;
        }
        minimal.push(g);
    }
    let mut out = Vec::with_capacity(minimal.len());
    for k in 0..minimal.len() {
        let others: Vec<SPoly> = minimal
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != k)
            .map(|(_, g)| g.clone())
            .collect();
        let (lm, lc) = minimal[k].lead().cloned().unwrap();
        let mut tail = minimal[k].clone();
        tail.0.pop();
        let mut r = ctx.reduce(tail, &others)?;
        r.0.push((lm, lc));
        r.make_monic();
        out.push(r);
    }
    out.sort_by(|a, b| ctx.cmp(b.lm(), a.lm()));
    Ok(out)
}

/// A reduced Gröbner basis, sorted by descending leading monomial.
#[derive(Clone, Debug)]
pub struct GroebnerBasis {
    ring: Arc<Ring>,
    order: MonomialOrder,
    generators: Vec<MultiPoly>,
    sorted: Vec<SPoly>,
}

impl PartialEq for GroebnerBasis {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.order == other.order && self.generators == other.generators
    }
}

impl Eq for GroebnerBasis {}

impl GroebnerBasis {
    fn from_sorted(ring: &Arc<Ring>, order: MonomialOrder, sorted: Vec<SPoly>) -> Self {
        let generators = sorted
            .iter()
            .map(|s| MultiPoly::from_terms(ring, s.0.iter().cloned()))
            .collect();
        Self {
            ring: ring.clone(),
            order,
            generators,
            sorted,
        }
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn order(&self) -> MonomialOrder {
        self.order
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn leading_monomials(&self) -> Vec<Exponents> {
        self.sorted.iter().map(|s| s.lm().clone()).collect()
    }

    /// Leading term of generator `i` under the basis order.
    pub fn leading_term(&self, i: usize) -> (&Exponents, &Rational) {
        let (e, c) = self.sorted[i].lead().unwrap();
        (e, c)
    }

    pub fn is_unit(&self) -> bool {
        self.sorted.len() == 1 && self.sorted[0].lm().iter().all(|&e| e == 0)
    }

    pub fn is_zero_ideal(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn normal_form(&self, f: &MultiPoly) -> Result<MultiPoly> {
        normal_form(f, self)
    }

    pub fn contains(&self, f: &MultiPoly) -> Result<bool> {
        Ok(normal_form(f, self)?.is_zero())
    }

    /// Stable textual fingerprint used in reports for recheck data.
    pub fn fingerprint(&self) -> String {
        let mut h: u64 = 0xcbf29ce484222325;
        for g in &self.generators {
            for b in g.to_string().bytes().chain(std::iter::once(b';')) {
                h ^= b as u64;
                h = h.wrapping_mul(0x100000001b3);
            }
        }
        format!("{h:016x}")
    }
}

pub fn groebner(gens: &[MultiPoly], order: MonomialOrder) -> Result<GroebnerBasis> {
    groebner_with_budget(gens, order, DEFAULT_BUDGET)
}

pub fn groebner_with_budget(gens: &[MultiPoly], order: MonomialOrder, budget: u64) -> Result<GroebnerBasis> {
    let Some(first) = gens.first() else {
        return Err(Error::Invalid("groebner needs a ring; pass at least one generator".into()));
    };
    let ring = first.ring().clone();
    if let Some(bad) = gens.iter().find(|g| *g.ring() != ring) {
        return Err(Error::RingMismatch(format!("generator {bad} is in a different ring")));
    }
    let mut ctx = Ctx {
        order,
        n_geometric: ring.n_geometric(),
        budget,
        steps: 0,
    };
    let mut input: Vec<SPoly> = gens.iter().filter(|g| !g.is_zero()).map(|g| ctx.sorted(g)).collect();
    // feed low leading monomials first; the reduced basis does not depend on this
    input.sort_by(|a, b| ctx.cmp(a.lm(), b.lm()));
    let sorted = buchberger(input, &mut ctx)?;
    Ok(GroebnerBasis::from_sorted(&ring, order, sorted))
}

pub fn normal_form(f: &MultiPoly, gb: &GroebnerBasis) -> Result<MultiPoly> {
    if *f.ring() != gb.ring {
        return Err(Error::RingMismatch("polynomial and basis rings differ".into()));
    }
    let mut ctx = Ctx {
        order: gb.order,
        n_geometric: gb.ring.n_geometric(),
        budget: DEFAULT_BUDGET,
        steps: 0,
    };
    let r = ctx.reduce(ctx.sorted(f), &gb.sorted)?;
    Ok(MultiPoly::from_terms(&gb.ring, r.0))
}

/// Gröbner basis of `ideal ∩ Q[kept variables, parameters]`, expressed in
/// the ring of the kept variables (grevlex).
pub fn eliminate(gens: &[MultiPoly], drop: &[&str]) -> Result<GroebnerBasis> {
    eliminate_with_budget(gens, drop, DEFAULT_BUDGET)
}

pub fn eliminate_with_budget(gens: &[MultiPoly], drop: &[&str], budget: u64) -> Result<GroebnerBasis> {
    let Some(first) = gens.first() else {
        return Err(Error::Invalid("eliminate needs at least one generator".into()));
    };
    let ring = first.ring().clone();
    for d in drop {
        let i = ring.index_of(d).ok_or_else(|| Error::UnknownVariable(d.to_string()))?;
        if ring.is_param(i) {
            return Err(Error::Invalid(format!("cannot eliminate parameter `{d}`")));
        }
    }
    let kept: Vec<&str> = ring.geometric_names().filter(|n| !drop.contains(n)).collect();
    let params: Vec<&str> = ring.param_names().collect();
    let dropped: Vec<&str> = ring.geometric_names().filter(|n| drop.contains(n)).collect();
    let mut all: Vec<&str> = dropped.clone();
    all.extend(kept.iter().copied());
    let big = Ring::new(&all, &params)?;
    let small = Ring::new(&kept, &params)?;
    let moved: Vec<MultiPoly> = gens.iter().map(|g| g.embed(&big)).collect::<Result<_>>()?;
    let gb = groebner_with_budget(&moved, MonomialOrder::Block { first: dropped.len() }, budget)?;
    let k = dropped.len();
    let mut sorted = Vec::new();
    for s in &gb.sorted {
        if s.0.iter().all(|(e, _)| e[..k].iter().all(|&x| x == 0)) {
            sorted.push(SPoly(s.0.iter().map(|(e, c)| (e[k..].to_vec(), c.clone())).collect()));
        }
    }
    Ok(GroebnerBasis::from_sorted(&small, MonomialOrder::Grevlex, sorted))
}

/// Krull dimension relative to the parameter field, or `Empty` for the unit
/// ideal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dimension {
    Empty,
    Dim(usize),
}

impl Dimension {
    pub fn value(self) -> Option<usize> {
        match self {
            Dimension::Empty => None,
            Dimension::Dim(d) => Some(d),
        }
    }
}

impl std::fmt::Display for Dimension {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Dimension::Empty => f.write_str("empty"),
            Dimension::Dim(d) => write!(f, "{d}"),
        }
    }
}

impl Serialize for Dimension {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Dimension::Empty => s.serialize_str("empty"),
            Dimension::Dim(d) => s.serialize_u64(*d as u64),
        }
    }
}

/// Largest set of geometric variables that, together with all parameters,
/// is independent modulo the leading-term ideal.
pub fn ideal_dimension(gb: &GroebnerBasis) -> Dimension {
    let n = gb.ring.n_geometric();
    let supports: Vec<Vec<usize>> = gb
        .leading_monomials()
        .iter()
        .map(|e| (0..n).filter(|&i| e[i] > 0).collect())
        .collect();
    if supports.iter().any(Vec::is_empty) {
        return Dimension::Empty;
    }
    Dimension::Dim(max_independent(n, &supports))
}

pub(crate) fn max_independent(n: usize, supports: &[Vec<usize>]) -> usize {
    fn independent(chosen: &[bool], supports: &[Vec<usize>]) -> bool {
        !supports.iter().any(|s| s.iter().all(|&i| chosen[i]))
    }
    fn go(i: usize, n: usize, size: usize, chosen: &mut Vec<bool>, supports: &[Vec<usize>], best: &mut usize) {
        if size + (n - i) <= *best {
            return;
        }
        if i == n {
            *best = size;
            return;
        }
        chosen[i] = true;
        if independent(chosen, supports) {
            go(i + 1, n, size + 1, chosen, supports, best);
        }
        chosen[i] = false;
        go(i + 1, n, size, chosen, supports, best);
    }
    let mut best = 0;
    let mut chosen = vec![false; n];
    go(0, n, 0, &mut chosen, supports, &mut best);
    best
}
