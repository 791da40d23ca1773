//! Exponential polynomials `f(x) = p(x, exp(x))`, their formal derivatives,
//! Khovanskii systems and symbolic witness verification.
//!
//! An [`ExpPoly`] of arity `n` is a polynomial in `x1..xn, y1..yn` (plus
//! coefficient parameters) where `yi` stands for `exp(xi)`. Exponentials
//! are never nested.

use std::fmt;
use std::sync::Arc;

use num_traits::Signed;
use serde::{Serialize, Serializer};

use crate::axiomgen::{Formula, Term};
use crate::error::{Error, Result};
use crate::geometry::{coordinate_ring, parse_equation};
use crate::poly::{text, MultiPoly, Ring};
use crate::presentation::EFieldPresentation;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpPoly {
    n: usize,
    p: MultiPoly,
}

impl Serialize for ExpPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn params_of(ring: &Ring) -> Vec<String> {
    ring.param_names().map(str::to_string).collect()
}

impl ExpPoly {
    /// Wraps a polynomial from `coordinate_ring(n, params)`.
    pub fn new(n: usize, p: MultiPoly) -> Result<Self> {
        let expected = coordinate_ring(n, &params_of(p.ring()))?;
        if **p.ring() != *expected {
            return Err(Error::RingMismatch(format!(
                "an exponential polynomial of arity {n} needs variables x1..x{n}, y1..y{n}"
            )));
        }
        Ok(Self { n, p })
    }

    /// Parses text such as `exp(x1) - z1` (`yi` is accepted for `exp(xi)`).
    pub fn parse(n: usize, params: &[String], src: &str) -> Result<Self> {
        let ring = coordinate_ring(n, params)?;
        Self::new(n, parse_equation(src, &ring)?)
    }

    pub fn arity(&self) -> usize {
        self.n
    }

    pub fn poly(&self) -> &MultiPoly {
        &self.p
    }

    pub fn params(&self) -> Vec<String> {
        params_of(self.p.ring())
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero()
    }

    /// True when no `exp(xi)` occurs.
    pub fn is_exp_free(&self) -> bool {
        (self.n..2 * self.n).all(|i| !self.p.involves(i))
    }

    fn name(&self, i: usize) -> Term {
        let ring = self.p.ring();
        if i < self.n {
            Term::var(ring.name(i))
        } else if i < 2 * self.n {
            Term::exp(Term::var(ring.name(i - self.n)))
        } else {
            Term::var(ring.name(i))
        }
    }

    /// The term `p(x, exp(x))` with `yi` written as `exp(xi)`.
    pub fn to_term(&self) -> Term {
        poly_to_term(&self.p, &|i| self.name(i))
    }

    /// Re-embeds into a ring with more parameters.
    fn widen(&self, params: &[String]) -> Result<ExpPoly> {
        let ring = coordinate_ring(self.n, params)?;
        ExpPoly::new(self.n, self.p.embed(&ring)?)
    }
}

impl fmt::Display for ExpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        let ring = self.p.ring().clone();
        let name = |i: usize| {
            if (n..2 * n).contains(&i) {
                format!("exp({})", ring.name(i - n))
            } else {
                ring.name(i).to_string()
            }
        };
        f.write_str(&text::render_poly(&self.p, &name))
    }
}

/// Converts a polynomial to a term, terms in descending grevlex order.
pub(crate) fn poly_to_term(p: &MultiPoly, name: &dyn Fn(usize) -> Term) -> Term {
    let mut acc: Option<Term> = None;
    for (e, c) in text::sorted_terms(p) {
        let mut factors: Vec<Term> = e
            .iter()
            .enumerate()
            .filter(|(_, &k)| k > 0)
            .map(|(i, &k)| if k == 1 { name(i) } else { Term::pow(name(i), k) })
            .collect();
        let abs = c.abs();
        if factors.is_empty() || abs != crate::arith::rat(1, 1) {
            factors.insert(0, Term::Num(abs));
        }
        let mono = factors.into_iter().reduce(Term::mul).expect("a monomial has a factor");
        acc = Some(match acc {
            None if c.is_negative() => Term::Neg(Box::new(mono)),
            None => mono,
            Some(a) if c.is_negative() => Term::sub(a, mono),
            Some(a) => Term::add(a, mono),
        });
    }
    acc.unwrap_or(Term::Num(crate::arith::rat(0, 1)))
}

/// `D_i f = ∂p/∂x_i + y_i ∂p/∂y_i`, the derivation extending
/// `d/dx exp(x) = exp(x)`. `i` is 1-based.
pub fn exp_derivative(f: &ExpPoly, i: usize) -> Result<ExpPoly> {
    if i == 0 || i > f.n {
        return Err(Error::IndexOutOfRange { index: i, arity: f.n });
    }
    let ring = f.p.ring();
    let dx = f.p.derivative_at(i - 1);
    let y = MultiPoly::var_at(ring, f.n + i - 1);
    let dy = &y * &f.p.derivative_at(f.n + i - 1);
    Ok(ExpPoly { n: f.n, p: &dx + &dy })
}

/// Brings exponential polynomials into one ring (union of parameters, in
/// order of first appearance). All arities must agree.
fn unify(fs: &[ExpPoly]) -> Result<Vec<ExpPoly>> {
    let Some(first) = fs.first() else {
        return Ok(Vec::new());
    };
    let n = first.n;
    if let Some(bad) = fs.iter().find(|f| f.n != n) {
        return Err(Error::Dimension(format!(
            "arity mismatch: {} has arity {}, expected {n}",
            bad, bad.n
        )));
    }
    let mut params: Vec<String> = Vec::new();
    for f in fs {
        for p in f.params() {
            if !params.contains(&p) {
                params.push(p);
            }
        }
    }
    fs.iter().map(|f| f.widen(&params)).collect()
}

fn determinant(m: &[Vec<MultiPoly>], ring: &Arc<Ring>) -> MultiPoly {
    match m.len() {
        0 => MultiPoly::one(ring),
        1 => m[0][0].clone(),
        k => {
            let mut acc = MultiPoly::zero(ring);
            for j in 0..k {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<MultiPoly>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|&(c, _)| c != j).map(|(_, v)| v.clone()).collect())
                    .collect();
                let term = &m[0][j] * &determinant(&minor, ring);
                acc = if j % 2 == 0 { &acc + &term } else { &acc - &term };
            }
            acc
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KhovanskiiSystem {
    width: usize,
    equations: Vec<ExpPoly>,
    jacobian: ExpPoly,
}

impl KhovanskiiSystem {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn equations(&self) -> &[ExpPoly] {
        &self.equations
    }

    pub fn jacobian(&self) -> &ExpPoly {
        &self.jacobian
    }

    /// Matrix of `D_j f_i`.
    pub fn jacobian_matrix(&self) -> Result<Vec<Vec<ExpPoly>>> {
        self.equations
            .iter()
            .map(|f| (1..=self.width).map(|j| exp_derivative(f, j)).collect())
            .collect()
    }

    /// Determinant of [`Self::jacobian_matrix`], computed from scratch.
    pub fn recompute_jacobian(&self) -> Result<ExpPoly> {
        let m: Vec<Vec<MultiPoly>> = self
            .jacobian_matrix()?
            .into_iter()
            .map(|row| row.into_iter().map(|f| f.p).collect())
            .collect();
        let ring = self.jacobian.p.ring();
        ExpPoly::new(self.width, determinant(&m, ring))
    }
}

/// The system `f_1 = … = f_n = 0` with its Jacobian determinant.
pub fn khovanskii_system(fs: &[ExpPoly]) -> Result<KhovanskiiSystem> {
    let equations = unify(fs)?;
    let n = equations.len();
    if n == 0 {
        return Err(Error::Invalid("a Khovanskii system needs at least one equation".into()));
    }
    if equations[0].n != n {
        return Err(Error::Dimension(format!(
            "arity mismatch: {n} equations of arity {}",
            equations[0].n
        )));
    }
    let ring = equations[0].p.ring().clone();
    let m: Vec<Vec<MultiPoly>> = equations
        .iter()
        .map(|f| (1..=n).map(|j| exp_derivative(f, j).map(|d| d.p)).collect())
        .collect::<Result<_>>()?;
    let jacobian = ExpPoly::new(n, determinant(&m, &ring))?;
    Ok(KhovanskiiSystem {
        width: n,
        equations,
        jacobian,
    })
}

/// `f_1 = 0 & … & f_n = 0 & ~(J = 0)`, free in `x1..xn` and the
/// coefficient parameters.
pub fn chi_formula(fs: &[ExpPoly]) -> Result<Formula> {
    let sys = khovanskii_system(fs)?;
    let zero = || Term::Num(crate::arith::rat(0, 1));
    let mut parts: Vec<Formula> = sys.equations.iter().map(|f| Formula::eq(f.to_term(), zero())).collect();
    parts.push(Formula::not(Formula::eq(sys.jacobian.to_term(), zero())));
    Ok(Formula::And(parts))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessVerdict {
    Witness,
    EquationsFail,
    JacobianVanishes,
}

/// Outcome of [`verify_witness`]. Residues are normal forms modulo the
/// presentation's locus; "nonzero" means a nonzero normal form, which
/// agrees with non-vanishing at the generic point of an irreducible locus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WitnessReport {
    pub verdict: WitnessVerdict,
    pub point: Vec<String>,
    pub equation_residues: Vec<String>,
    pub jacobian_residue: String,
    pub semantics: &'static str,
}

/// Checks that `point` (elements of `F` in its coordinate ring: basis
/// symbols as `xk`, their exponentials as `yk`) solves the system with a
/// nonvanishing Jacobian. Coefficient parameters must be named after basis
/// symbols of `F`.
pub fn verify_witness(sys: &KhovanskiiSystem, f: &EFieldPresentation, point: &[MultiPoly]) -> Result<WitnessReport> {
    let n = sys.width;
    if point.len() != n {
        return Err(Error::Dimension(format!("the system has width {n}, the point has {} entries", point.len())));
    }
    let sat = f.locus().saturated_basis();
    let ring = sat.ring().clone();
    let eq_ring = sys.jacobian.p.ring().clone();
    let uses_exp = |i: usize| sys.equations.iter().chain([&sys.jacobian]).any(|e| e.p.involves(n + i));
    let mut images = Vec::with_capacity(eq_ring.len());
    for a in point {
        images.push(a.embed(&ring)?);
    }
    for (i, a) in point.iter().enumerate() {
        if uses_exp(i) {
            images.push(f.exponential(a)?);
        } else {
            images.push(MultiPoly::zero(&ring));
        }
    }
    for p in eq_ring.param_names() {
        let k = f
            .index_of(p)
            .ok_or_else(|| Error::NotExpressible(format!("coefficient `{p}` is not a symbol of the presentation")))?;
        images.push(MultiPoly::var_at(&ring, k));
    }
    let reduce = |e: &ExpPoly| -> Result<MultiPoly> { sat.normal_form(&e.p.compose(&ring, &images)?) };
    let residues = sys.equations.iter().map(reduce).collect::<Result<Vec<_>>>()?;
    let jac = reduce(&sys.jacobian)?;
    let verdict = if residues.iter().any(|r| !r.is_zero()) {
        WitnessVerdict::EquationsFail
    } else if jac.is_zero() {
        WitnessVerdict::JacobianVanishes
    } else {
        WitnessVerdict::Witness
    };
    Ok(WitnessReport {
        verdict,
        point: point.iter().map(|a| f.render(a)).collect(),
        equation_residues: residues.iter().map(|r| f.render(r)).collect(),
        jacobian_residue: f.render(&jac),
        semantics: "generic-point",
    })
}

impl ExpPoly {
    /// Evaluates an exponential-free polynomial at a rational point.
    pub fn eval_exp_free(&self, point: &[crate::arith::Rational]) -> Option<crate::arith::Rational> {
        if !self.is_exp_free() || point.len() != self.n || self.p.ring().n_params() > 0 {
            return None;
        }
        let mut acc = crate::arith::rat(0, 1);
        for (e, c) in self.p.terms() {
            let mut t = c.clone();
            for (i, &k) in e.iter().enumerate().take(self.n) {
                for _ in 0..k {
                    t *= &point[i];
                }
            }
            acc += t;
        }
        Some(acc)
    }
}
