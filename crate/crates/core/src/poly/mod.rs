//! Sparse multivariate polynomials over `Q` with named parameters.
//!
//! A [`Ring`] lists geometric variables first and parameters last.
//! Parameters stand for algebraically independent transcendentals: every
//! monomial order compares them after the geometric block, so a Gröbner
//! basis over `Q[x, p]` is also one over `Q(p)[x]`.

mod groebner;
mod order;
pub mod text;

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{rat, Rational};
use crate::error::{Error, Result};

pub(crate) use groebner::max_independent;
pub use groebner::{eliminate, eliminate_with_budget, groebner, groebner_with_budget, ideal_dimension, normal_form, Dimension, GroebnerBasis, DEFAULT_BUDGET};
pub use order::MonomialOrder;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VarKind {
    Geometric,
    Parameter,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VarName {
    pub name: String,
    pub kind: VarKind,
}

/// Variable context shared by polynomials. Geometric variables come first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Ring {
    vars: Vec<VarName>,
    n_geometric: usize,
}

impl Ring {
    pub fn new<S: AsRef<str>, P: AsRef<str>>(geometric: &[S], params: &[P]) -> Result<Arc<Ring>> {
        let mut vars: Vec<VarName> = geometric
            .iter()
            .map(|s| VarName {
                name: s.as_ref().to_string(),
                kind: VarKind::Geometric,
            })
            .collect();
        vars.extend(params.iter().map(|s| VarName {
            name: s.as_ref().to_string(),
            kind: VarKind::Parameter,
        }));
        for (i, v) in vars.iter().enumerate() {
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(Error::Invalid(format!("duplicate variable `{}`", v.name)));
            }
        }
        Ok(Arc::new(Ring {
            vars,
            n_geometric: geometric.len(),
        }))
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn n_geometric(&self) -> usize {
        self.n_geometric
    }

    pub fn n_params(&self) -> usize {
        self.vars.len() - self.n_geometric
    }

    pub fn vars(&self) -> &[VarName] {
        &self.vars
    }

    pub fn geometric_names(&self) -> impl Iterator<Item = &str> {
        self.vars[..self.n_geometric].iter().map(|v| v.name.as_str())
    }

    pub fn param_names(&self) -> impl Iterator<Item = &str> {
        self.vars[self.n_geometric..].iter().map(|v| v.name.as_str())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v.name == name)
    }

    pub fn name(&self, i: usize) -> &str {
        &self.vars[i].name
    }

    pub fn is_param(&self, i: usize) -> bool {
        i >= self.n_geometric
    }
}

pub type Exponents = Vec<u32>;

/// Polynomial as a map from exponent vector to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    ring: Arc<Ring>,
    terms: BTreeMap<Exponents, Rational>,
}

impl MultiPoly {
    pub fn zero(ring: &Arc<Ring>) -> Self {
        Self {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(ring: &Arc<Ring>, c: Rational) -> Self {
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(vec![0; ring.len()], c);
        }
        p
    }

    pub fn one(ring: &Arc<Ring>) -> Self {
        Self::constant(ring, Rational::one())
    }

    pub fn var(ring: &Arc<Ring>, name: &str) -> Result<Self> {
        let i = ring
            .index_of(name)
            .ok_or_else(|| Error::UnknownVariable(name.to_string()))?;
        Ok(Self::var_at(ring, i))
    }

    pub fn var_at(ring: &Arc<Ring>, i: usize) -> Self {
        let mut e = vec![0; ring.len()];
        e[i] = 1;
        Self::monomial(ring, e, Rational::one())
    }

    pub fn monomial(ring: &Arc<Ring>, exps: Exponents, c: Rational) -> Self {
        debug_assert_eq!(exps.len(), ring.len());
        let mut p = Self::zero(ring);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn from_terms(ring: &Arc<Ring>, terms: impl IntoIterator<Item = (Exponents, Rational)>) -> Self {
        let mut p = Self::zero(ring);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Exponents, Rational> {
        &self.terms
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True for polynomials without geometric variables (constants and
    /// pure parameter expressions alike).
    pub fn is_free_of_geometric(&self) -> bool {
        let n = self.ring.n_geometric;
        self.terms.keys().all(|e| e[..n].iter().all(|&x| x == 0))
    }

    /// Rational constant value, if the polynomial is one.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&x| x == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, i: usize) -> u32 {
        self.terms.keys().map(|e| e[i]).max().unwrap_or(0)
    }

    pub fn involves(&self, i: usize) -> bool {
        self.terms.keys().any(|e| e[i] > 0)
    }

    pub fn add_term(&mut self, e: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let s = o.get() + c;
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    fn check_ring(&self, other: &MultiPoly) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(format!(
                "{:?} vs {:?}",
                self.ring.vars.iter().map(|v| &v.name).collect::<Vec<_>>(),
                other.ring.vars.iter().map(|v| &v.name).collect::<Vec<_>>()
            )));
        }
        Ok(())
    }

    pub fn try_add(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        Ok(self + other)
    }

    pub fn try_mul(&self, other: &MultiPoly) -> Result<MultiPoly> {
        self.check_ring(other)?;
        Ok(self * other)
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(&self.ring);
        }
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, x)| (e.clone(), x * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> MultiPoly {
        let mut acc = MultiPoly::one(&self.ring);
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                acc = &acc * &base;
            }
            k >>= 1;
            if k > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative by a geometric variable.
    pub fn partial_derivative(&self, var: &str) -> Result<MultiPoly> {
        let i = self
            .ring
            .index_of(var)
            .ok_or_else(|| Error::UnknownVariable(var.to_string()))?;
        if self.ring.is_param(i) {
            return Err(Error::ParameterDerivative(var.to_string()));
        }
        Ok(self.derivative_at(i))
    }

    pub(crate) fn derivative_at(&self, i: usize) -> MultiPoly {
        let mut out = MultiPoly::zero(&self.ring);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[i] -= 1;
            out.add_term(e2, c * rat(e[i] as i64, 1));
        }
        out
    }

    /// Substitutes `images[i]` for variable `i`. All images must live in one
    /// ring, which becomes the ring of the result.
    pub fn compose(&self, target: &Arc<Ring>, images: &[MultiPoly]) -> Result<MultiPoly> {
        if images.len() != self.ring.len() {
            return Err(Error::Dimension(format!(
                "compose needs {} images, got {}",
                self.ring.len(),
                images.len()
            )));
        }
        if let Some(bad) = images.iter().find(|p| p.ring != *target) {
            return Err(Error::RingMismatch(format!("image {bad} is not in the target ring")));
        }
        let mut out = MultiPoly::zero(target);
        // cache powers per variable
        let mut powers: Vec<Vec<MultiPoly>> = vec![vec![MultiPoly::one(target)]; images.len()];
        for (e, c) in &self.terms {
            let mut term = MultiPoly::constant(target, c.clone());
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                while powers[i].len() <= k as usize {
                    let next = powers[i].last().unwrap() * &images[i];
                    powers[i].push(next);
                }
                term = &term * &powers[i][k as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Moves the polynomial into `target` by variable name. Every variable
    /// actually used must exist there.
    pub fn embed(&self, target: &Arc<Ring>) -> Result<MultiPoly> {
        let map: Vec<Option<usize>> = self
            .ring
            .vars
            .iter()
            .map(|v| target.index_of(&v.name))
            .collect();
        let mut out = MultiPoly::zero(target);
        for (e, c) in &self.terms {
            let mut e2 = vec![0; target.len()];
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let j = map[i].ok_or_else(|| Error::UnknownVariable(self.ring.name(i).to_string()))?;
                e2[j] += k;
            }
            out.add_term(e2, c.clone());
        }
        Ok(out)
    }

    /// Reinterprets the exponent vectors in a ring of the same shape
    /// (positions line up, names may differ).
    pub fn with_ring(&self, target: &Arc<Ring>) -> Result<MultiPoly> {
        if target.len() != self.ring.len() || target.n_geometric != self.ring.n_geometric {
            return Err(Error::RingMismatch("rings differ in shape".into()));
        }
        Ok(MultiPoly {
            ring: target.clone(),
            terms: self.terms.clone(),
        })
    }

    /// Substitutes rational values for named parameters, dropping them from
    /// the ring.
    pub fn specialize(&self, target: &Arc<Ring>, values: &[(String, Rational)]) -> Result<MultiPoly> {
        let mut images = Vec::with_capacity(self.ring.len());
        for v in &self.ring.vars {
            if let Some((_, q)) = values.iter().find(|(n, _)| *n == v.name) {
                images.push(MultiPoly::constant(target, q.clone()));
            } else {
                images.push(MultiPoly::var(target, &v.name)?);
            }
        }
        self.compose(target, &images)
    }

    /// Leading coefficient sign-normalized copy: primitive with respect to
    /// scaling so the term with the largest exponent vector is positive.
    pub fn normalize_sign(&self) -> MultiPoly {
        match self.terms.iter().next_back() {
            Some((_, c)) if c.is_negative() => -self,
            _ => self.clone(),
        }
    }
}

impl fmt::Debug for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MultiPoly({self})")
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render_poly(self, &|i| self.ring.name(i).to_string()))
    }
}

impl<'a> Add<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: &'a MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.ring, rhs.ring, "ring mismatch in +");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl<'a> Sub<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: &'a MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.ring, rhs.ring, "ring mismatch in -");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), -c.clone());
        }
        out
    }
}

impl<'a> Mul<&'a MultiPoly> for &'a MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: &'a MultiPoly) -> MultiPoly {
        debug_assert_eq!(self.ring, rhs.ring, "ring mismatch in *");
        let mut out = MultiPoly::zero(&self.ring);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        MultiPoly {
            ring: self.ring.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c.clone())).collect(),
        }
    }
}

impl Add for MultiPoly {
    type Output = MultiPoly;
    fn add(self, rhs: MultiPoly) -> MultiPoly {
        &self + &rhs
    }
}

impl Sub for MultiPoly {
    type Output = MultiPoly;
    fn sub(self, rhs: MultiPoly) -> MultiPoly {
        &self - &rhs
    }
}

impl Mul for MultiPoly {
    type Output = MultiPoly;
    fn mul(self, rhs: MultiPoly) -> MultiPoly {
        &self * &rhs
    }
}

impl Neg for MultiPoly {
    type Output = MultiPoly;
    fn neg(self) -> MultiPoly {
        -&self
    }
}
