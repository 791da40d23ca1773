//! Subvarieties of `G^n = (Ga × Gm)^n`.
//!
//! A [`GVariety`] lives in coordinates `x1..xn` (additive) and `y1..yn`
//! (multiplicative). Each `yi` is kept invertible by adjoining an inverse
//! `inv_yi` with `yi·inv_yi - 1` in an internal saturated ring; reports only
//! ever show `x`, `y` and parameters.

mod family;
mod freeness;
mod rotundity;

use std::sync::{Arc, OnceLock};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::arith::{rat, rat_from_int, smith_normal_form, IntMatrix, RatMatrix};
use crate::error::{Error, Result};
use crate::poly::{
    eliminate_with_budget, groebner_with_budget, ideal_dimension, max_independent, text, Dimension, GroebnerBasis, MonomialOrder,
    MultiPoly, Ring, DEFAULT_BUDGET,
};

pub use family::{family_filter, FamilyReport, SampleVerdict};
pub use freeness::{
    is_additively_free, is_multiplicatively_free_up_to, recheck_freeness_witness, FreenessCertificate,
    FreenessKind, FreenessVerdict, FreenessWitness,
};
pub use rotundity::{
    enumerate_row_spaces, is_rotund_up_to, recheck_counterexample, RotundityCounterexample, RotundityReport,
    RotundityVerdict,
};

/// Irreducibility is never decided; every report carries this flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Irreducibility {
    #[default]
    Assumed,
}

pub fn additive_name(i: usize) -> String {
    format!("x{}", i + 1)
}

pub fn multiplicative_name(i: usize) -> String {
    format!("y{}", i + 1)
}

fn inverse_name(i: usize) -> String {
    format!("inv_y{}", i + 1)
}

/// `x1..xn, y1..yn` followed by the parameters.
pub fn coordinate_ring(n: usize, params: &[String]) -> Result<Arc<Ring>> {
    let mut names: Vec<String> = (0..n).map(additive_name).collect();
    names.extend((0..n).map(multiplicative_name));
    Ring::new(&names, params)
}

fn saturated_ring(n: usize, params: &[String]) -> Result<Arc<Ring>> {
    let mut names: Vec<String> = (0..n).map(additive_name).collect();
    names.extend((0..n).map(multiplicative_name));
    names.extend((0..n).map(inverse_name));
    Ring::new(&names, params)
}

fn check_param_names(n: usize, params: &[String]) -> Result<()> {
    for p in params {
        let looks_like_coordinate = |prefix: &str| {
            p.strip_prefix(prefix)
                .and_then(|rest| rest.parse::<usize>().ok())
                .is_some_and(|k| (1..=n).contains(&k))
        };
        if p.starts_with('_') || p.starts_with("inv_") || looks_like_coordinate("x") || looks_like_coordinate("y") {
            return Err(Error::Invalid(format!("parameter name `{p}` collides with a coordinate")));
        }
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct GVariety {
    n: usize,
    params: Vec<String>,
    ring: Arc<Ring>,
    generators: Vec<MultiPoly>,
    irreducibility: Irreducibility,
    budget: u64,
    saturated: GroebnerBasis,
    ideal: Arc<OnceLock<GroebnerBasis>>,
    additive: Arc<OnceLock<GroebnerBasis>>,
    multiplicative: Arc<OnceLock<GroebnerBasis>>,
}

impl PartialEq for GVariety {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.params == other.params && self.saturated == other.saturated
    }
}

impl GVariety {
    pub fn new(n: usize, params: &[String], generators: Vec<MultiPoly>) -> Result<Self> {
        Self::with_budget(n, params, generators, DEFAULT_BUDGET)
    }

    /// Builds the variety and its saturated Gröbner basis. Rejects the unit
    /// ideal.
    pub fn with_budget(n: usize, params: &[String], generators: Vec<MultiPoly>, budget: u64) -> Result<Self> {
        check_param_names(n, params)?;
        let ring = coordinate_ring(n, params)?;
        let sat_ring = saturated_ring(n, params)?;
        let mut sat_gens = Vec::with_capacity(generators.len() + n);
        for g in &generators {
            if *g.ring() != ring {
                return Err(Error::RingMismatch(format!("generator {g} is not in the ring of G^{n}")));
            }
            sat_gens.push(g.embed(&sat_ring)?);
        }
        for i in 0..n {
            let y = MultiPoly::var_at(&sat_ring, n + i);
            let w = MultiPoly::var_at(&sat_ring, 2 * n + i);
            sat_gens.push(&(&y * &w) - &MultiPoly::one(&sat_ring));
        }
        if sat_gens.is_empty() {
            // G^0: the zero ideal of the empty ring
            sat_gens.push(MultiPoly::zero(&sat_ring));
        }
        let saturated = groebner_with_budget(&sat_gens, MonomialOrder::Grevlex, budget)?;
        if saturated.is_unit() {
            return Err(Error::UnitIdeal);
        }
        let generators = generators.into_iter().filter(|g| !g.is_zero()).collect();
        Ok(Self {
            n,
            params: params.to_vec(),
            ring,
            generators,
            irreducibility: Irreducibility::Assumed,
            budget,
            saturated,
            ideal: Arc::new(OnceLock::new()),
            additive: Arc::new(OnceLock::new()),
            multiplicative: Arc::new(OnceLock::new()),
        })
    }

    /// Parses generator strings such as `"y1 - x1"` or `"x1 = 0"`.
    pub fn parse(n: usize, params: &[String], equations: &[&str]) -> Result<Self> {
        let ring = coordinate_ring(n, params)?;
        let gens = equations
            .iter()
            .map(|e| parse_equation(e, &ring))
            .collect::<Result<Vec<_>>>()?;
        Self::new(n, params, gens)
    }

    /// The whole of `G^n`.
    pub fn full(n: usize, params: &[String]) -> Result<Self> {
        Self::new(n, params, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn params(&self) -> &[String] {
        &self.params
    }

    pub fn ring(&self) -> &Arc<Ring> {
        &self.ring
    }

    pub fn generators(&self) -> &[MultiPoly] {
        &self.generators
    }

    pub fn irreducibility(&self) -> Irreducibility {
        self.irreducibility
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn with_new_budget(&self, budget: u64) -> Self {
        let mut v = self.clone();
        v.budget = budget;
        v
    }

    pub(crate) fn saturated_basis(&self) -> &GroebnerBasis {
        &self.saturated
    }

    /// Reduced Gröbner basis of the ideal of `V` in `x, y, parameters`
    /// (inverse variables eliminated).
    pub fn ideal_basis(&self) -> Result<&GroebnerBasis> {
        if let Some(gb) = self.ideal.get() {
            return Ok(gb);
        }
        let gb = if self.n == 0 {
            groebner_with_budget(&[MultiPoly::zero(&self.ring)], MonomialOrder::Grevlex, self.budget)?
        } else {
            let drops: Vec<String> = (0..self.n).map(inverse_name).collect();
            let drop_refs: Vec<&str> = drops.iter().map(String::as_str).collect();
            let gens: Vec<MultiPoly> = if self.saturated.generators().is_empty() {
                vec![MultiPoly::zero(self.saturated.ring())]
            } else {
                self.saturated.generators().to_vec()
            };
            let e = eliminate_with_budget(&gens, &drop_refs, self.budget)?;
            // same variable positions as the coordinate ring
            let gens: Vec<MultiPoly> = e.generators().iter().map(|g| g.with_ring(&self.ring)).collect::<Result<_>>()?;
            if gens.is_empty() {
                groebner_with_budget(&[MultiPoly::zero(&self.ring)], MonomialOrder::Grevlex, self.budget)?
            } else {
                groebner_with_budget(&gens, MonomialOrder::Grevlex, self.budget)?
            }
        };
        Ok(self.ideal.get_or_init(|| gb))
    }

    /// Krull dimension (parameters uncounted).
    pub fn dimension(&self) -> usize {
        match ideal_dimension(&self.saturated) {
            Dimension::Dim(d) => d,
            Dimension::Empty => unreachable!("unit ideals are rejected at construction"),
        }
    }

    /// Same ideal, compared through reduced Gröbner bases.
    pub fn same_ideal(&self, other: &GVariety) -> bool {
        self == other
    }

    /// Substitutes rational values for some parameters.
    pub fn specialize(&self, values: &[(String, crate::arith::Rational)]) -> Result<GVariety> {
        let rest: Vec<String> = self
            .params
            .iter()
            .filter(|p| !values.iter().any(|(n, _)| n == *p))
            .cloned()
            .collect();
        for (name, _) in values {
            if !self.params.contains(name) {
                return Err(Error::UnknownVariable(name.clone()));
            }
        }
        let ring = coordinate_ring(self.n, &rest)?;
        let gens = self
            .generators
            .iter()
            .map(|g| g.specialize(&ring, values))
            .collect::<Result<Vec<_>>>()?;
        GVariety::with_budget(self.n, &rest, gens, self.budget)
    }

    /// Saturated ideal of the graph of `x ↦ (Mx, y^M)` on `V`, in a ring
    /// whose last `2r` variables are the image coordinates.
    fn graph(&self, m: &IntMatrix) -> Result<Vec<MultiPoly>> {
        let n = self.n;
        let r = m.rows();
        let mut names: Vec<String> = (0..n).map(additive_name).collect();
        names.extend((0..n).map(multiplicative_name));
        names.extend((0..n).map(inverse_name));
        names.extend((0..r).map(|i| format!("__u{}", i + 1)));
        names.extend((0..r).map(|i| format!("__v{}", i + 1)));
        let big = Ring::new(&names, &self.params)?;
        let mut gens: Vec<MultiPoly> = self
            .saturated
            .generators()
            .iter()
            .map(|g| g.embed(&big))
            .collect::<Result<_>>()?;
        for i in 0..r {
            let mut lin = MultiPoly::var_at(&big, 3 * n + i);
            let mut exps = vec![0u32; big.len()];
            for j in 0..n {
                let a = m.get(i, j);
                if a.is_zero() {
                    continue;
                }
                let c = rat_from_int(a.clone());
                lin = &lin - &MultiPoly::var_at(&big, j).scale(&c);
                let k: u32 = a.abs().try_into().map_err(|_| Error::Invalid("matrix entry too large".into()))?;
                if a.is_positive() {
                    exps[n + j] += k;
                } else {
                    exps[2 * n + j] += k;
                }
            }
            gens.push(lin);
            let mono = MultiPoly::monomial(&big, exps, rat(1, 1));
            gens.push(&MultiPoly::var_at(&big, 3 * n + r + i) - &mono);
        }
        Ok(gens)
    }

    /// Ideal of the closure of the image under the integer rows of `m`
    /// (an `r × n` matrix acting linearly on `x` and monomially on `y`).
    /// The result lives in the coordinate ring of `G^r`.
    pub fn image_basis(&self, m: &IntMatrix) -> Result<GroebnerBasis> {
        if m.cols() != self.n {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, variety lives in G^{}",
                m.cols(),
                self.n
            )));
        }
        let n = self.n;
        let r = m.rows();
        let target = coordinate_ring(r, &self.params)?;
        if r == 0 {
            return groebner_with_budget(&[MultiPoly::zero(&target)], MonomialOrder::Grevlex, self.budget);
        }
        let gens = self.graph(m)?;
        let big = gens[0].ring().clone();
        let drops: Vec<&str> = (0..3 * n).map(|k| big.name(k)).collect();
        let e = eliminate_with_budget(&gens, &drops, self.budget)?;
        let gens: Vec<MultiPoly> = e.generators().iter().map(|g| g.with_ring(&target)).collect::<Result<_>>()?;
        if gens.is_empty() {
            return groebner_with_budget(&[MultiPoly::zero(&target)], MonomialOrder::Grevlex, self.budget);
        }
        groebner_with_budget(&gens, MonomialOrder::Grevlex, self.budget)
    }

    /// `W·V` for a unimodular `W` whose first `r` rows span the rational
    /// row space of `m` (from its Smith form), with `r = rk m`.
    ///
    /// Only the row space matters for the image dimension, and `W` is an
    /// automorphism of `G^n`, so `dim M·V` is the dimension of the projection
    /// of `W·V` onto its first `r` coordinates.
    fn straightened(&self, m: &IntMatrix) -> Result<(Vec<MultiPoly>, usize)> {
        if m.cols() != self.n {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, variety lives in G^{}",
                m.cols(),
                self.n
            )));
        }
        let n = self.n;
        let (s, _, w_inv) = smith_normal_form(m);
        let r = (0..s.rows().min(s.cols())).filter(|&i| !s.get(i, i).is_zero()).count();
        let ring = self.saturated.ring();
        let laurent = |row: usize, sign: i64| -> Result<MultiPoly> {
            let mut e = vec![0u32; ring.len()];
            for j in 0..n {
                let a = w_inv.get(row, j) * sign;
                let k: u32 = a.abs().try_into().map_err(|_| Error::Invalid("matrix entry too large".into()))?;
                if a.is_positive() {
                    e[n + j] += k;
                } else {
                    e[2 * n + j] += k;
                }
            }
            Ok(MultiPoly::monomial(ring, e, rat(1, 1)))
        };
        let mut images = Vec::with_capacity(ring.len());
        for i in 0..n {
            images.push((0..n).fold(MultiPoly::zero(ring), |acc, j| {
                &acc + &MultiPoly::var_at(ring, j).scale(&rat_from_int(w_inv.get(i, j).clone()))
            }));
        }
        for i in 0..n {
            images.push(laurent(i, 1)?);
        }
        for i in 0..n {
            images.push(laurent(i, -1)?);
        }
        images.extend((3 * n..ring.len()).map(|k| MultiPoly::var_at(ring, k)));
        let mut gens = self
            .saturated
            .generators()
            .iter()
            .map(|g| g.compose(ring, &images))
            .collect::<Result<Vec<_>>>()?;
        for j in 0..n {
            gens.push(&(&MultiPoly::var_at(ring, n + j) * &MultiPoly::var_at(ring, 2 * n + j)) - &MultiPoly::one(ring));
        }
        Ok((gens, r))
    }

    /// Dimension of the closure of the image under the rows of `m`.
    pub fn image_dimension(&self, m: &IntMatrix) -> Result<usize> {
        let n = self.n;
        let (gens, r) = self.straightened(m)?;
        if r == 0 {
            return Ok(0);
        }
        if r == n {
            return Ok(self.dimension());
        }
        let ring = self.saturated.ring();
        let drops: Vec<&str> = (r..n)
            .flat_map(|j| [j, n + j, 2 * n + j])
            .map(|k| ring.name(k))
            .collect();
        let gb = eliminate_with_budget(&gens, &drops, self.budget)?;
        match ideal_dimension(&gb) {
            Dimension::Dim(d) => Ok(d),
            Dimension::Empty => Err(Error::UnitIdeal),
        }
    }

    /// Projection of `V` to its additive factor `Ga^n`, computed once.
    fn additive_projection(&self) -> Result<&GroebnerBasis> {
        if let Some(gb) = self.additive.get() {
            return Ok(gb);
        }
        let ring = self.saturated.ring();
        let drops: Vec<&str> = (self.n..3 * self.n).map(|k| ring.name(k)).collect();
        let gb = eliminate_with_budget(&nonempty(self.saturated.generators(), ring), &drops, self.budget)?;
        Ok(self.additive.get_or_init(|| gb))
    }

    /// Projection of `V` to its multiplicative factor `Gm^n` (with inverses).
    fn multiplicative_projection(&self) -> Result<&GroebnerBasis> {
        if let Some(gb) = self.multiplicative.get() {
            return Ok(gb);
        }
        let ring = self.saturated.ring();
        let drops: Vec<&str> = (0..self.n).map(|k| ring.name(k)).collect();
        let gb = eliminate_with_budget(&nonempty(self.saturated.generators(), ring), &drops, self.budget)?;
        Ok(self.multiplicative.get_or_init(|| gb))
    }

    /// Dimension of the image of the additive projection under the rows of
    /// `m` (rank `r`): a linear change of coordinates putting the row space
    /// first, then elimination of the other `n - r` coordinates.
    fn additive_image_dimension(&self, m: &IntMatrix, r: usize) -> Result<usize> {
        let n = self.n;
        let x = self.additive_projection()?;
        if x.is_zero_ideal() {
            return Ok(r);
        }
        let rref = m.to_rational().rref();
        let mut p = RatMatrix::zeros(n, n);
        for (k, row) in rref.matrix.to_rows().into_iter().take(r).enumerate() {
            for (j, v) in row.into_iter().enumerate() {
                p.set(k, j, v);
            }
        }
        for (k, c) in (0..n).filter(|c| !rref.pivots.contains(c)).enumerate() {
            p.set(r + k, c, rat(1, 1));
        }
        let q = p.inverse().ok_or_else(|| Error::Invalid("completion of the row space is singular".into()))?;
        let ring = x.ring();
        let mut images: Vec<MultiPoly> = (0..n)
            .map(|i| {
                (0..n).fold(MultiPoly::zero(ring), |acc, j| {
                    &acc + &MultiPoly::var_at(ring, j).scale(q.get(i, j))
                })
            })
            .collect();
        images.extend((n..ring.len()).map(|k| MultiPoly::var_at(ring, k)));
        let gens = x.generators().iter().map(|g| g.compose(ring, &images)).collect::<Result<Vec<_>>>()?;
        let drops: Vec<&str> = (r..n).map(|k| ring.name(k)).collect();
        if drops.is_empty() {
            return ideal_dimension(&groebner_with_budget(&gens, MonomialOrder::Grevlex, self.budget)?)
                .value()
                .ok_or(Error::UnitIdeal);
        }
        ideal_dimension(&eliminate_with_budget(&gens, &drops, self.budget)?)
            .value()
            .ok_or(Error::UnitIdeal)
    }

    /// A lower bound for [`Self::image_dimension`], cheap in common cases.
    ///
    /// The image maps onto the images of the additive and multiplicative
    /// projections, so their dimensions bound it from below; a dominant
    /// projection settles every matrix at once. Otherwise the image
    /// coordinates are adjoined last in a grevlex basis of the graph, and
    /// any set of them containing no leading monomial is algebraically
    /// independent on `V`.
    pub fn image_dimension_lower_bound(&self, m: &IntMatrix) -> Result<usize> {
        let n = self.n;
        if m.cols() != n {
            return Err(Error::Dimension(format!(
                "matrix has {} columns, variety lives in G^{}",
                m.cols(),
                n
            )));
        }
        let r = m.rank();
        if r == 0 {
            return Ok(0);
        }
        if r == n {
            return Ok(self.dimension());
        }
        let projection_dim = |gb: &GroebnerBasis| ideal_dimension(gb).value().unwrap_or(0);
        // the multiplicative projection still carries inverse variables
        let dim_y = projection_dim(self.multiplicative_projection()?);
        if projection_dim(self.additive_projection()?) == n || dim_y == n {
            return Ok(r);
        }
        let additive = self.additive_image_dimension(m, r)?;
        if additive >= r {
            return Ok(additive);
        }
        let gens = self.graph(m)?;
        let gb = groebner_with_budget(&gens, MonomialOrder::Grevlex, self.budget)?;
        let first = 3 * n;
        let supports: Vec<Vec<usize>> = gb
            .leading_monomials()
            .iter()
            .filter(|e| e[..first].iter().all(|&x| x == 0))
            .map(|e| (0..2 * r).filter(|&i| e[first + i] > 0).collect())
            .collect();
        Ok(max_independent(2 * r, &supports).max(additive))
    }
}

fn nonempty(gens: &[MultiPoly], ring: &Arc<Ring>) -> Vec<MultiPoly> {
    if gens.is_empty() {
        vec![MultiPoly::zero(ring)]
    } else {
        gens.to_vec()
    }
}

/// `M·V` for a square integer matrix: the Zariski closure of the image.
pub fn matrix_action(m: &IntMatrix, v: &GVariety) -> Result<GVariety> {
    if m.rows() != v.n || m.cols() != v.n {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, variety lives in G^{}",
            m.rows(),
            m.cols(),
            v.n
        )));
    }
    let gb = v.image_basis(m)?;
    GVariety::with_budget(v.n, &v.params, gb.generators().to_vec(), v.budget)
}

pub fn dimension(v: &GVariety) -> usize {
    v.dimension()
}

/// `lhs = rhs` or a bare expression (meaning `expr = 0`) in the coordinate
/// ring. `exp(xi)` is accepted as a synonym for `yi`.
pub fn parse_equation(src: &str, ring: &Arc<Ring>) -> Result<MultiPoly> {
    struct Coords<'a>(&'a Arc<Ring>);
    impl text::Resolver for Coords<'_> {
        fn ident(&self, name: &str) -> Option<MultiPoly> {
            MultiPoly::var(self.0, name).ok()
        }
        fn exp(&self, name: &str) -> Option<MultiPoly> {
            let k: usize = name.strip_prefix('x')?.parse().ok()?;
            MultiPoly::var(self.0, &format!("y{k}")).ok()
        }
    }
    let resolver = Coords(ring);
    match src.split_once('=') {
        Some((l, r)) => {
            let lhs = text::parse_poly_with(l, ring, &resolver)?;
            let rhs = text::parse_poly_with(r, ring, &resolver).map_err(|e| shift_column(e, l.chars().count() + 1))?;
            Ok(&lhs - &rhs)
        }
        None => text::parse_poly_with(src, ring, &resolver),
    }
}

pub(crate) fn shift_column(e: Error, by: usize) -> Error {
    match e {
        Error::Syntax { line, column, message } => Error::Syntax {
            line,
            column: column + by,
            message,
        },
        other => other,
    }
}
