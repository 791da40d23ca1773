//! Additive (exact) and multiplicative (bounded) freeness.
//!
//! Normal forms are taken over `Q(p)`: the saturated basis is a Gröbner basis
//! over `Q(p)[x, y, inv_y]` because parameters sit in a trailing block, and
//! reduction multiplies through by leading coefficients in `Q[p]` instead of
//! dividing by them.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::{GVariety, Irreducibility};
use crate::arith::{primitive_integer_vector, q_linear_dependencies, rat_from_int, Integer, Rational};
use crate::error::{Error, Result};
use crate::poly::{GroebnerBasis, MonomialOrder, MultiPoly};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FreenessKind {
    Additive,
    Multiplicative,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum FreenessVerdict {
    Free,
    NotFree,
    FreeUpToBound { bound: u32 },
}

/// `Σ m_i x_i = constant` or `Π y_i^{m_i} = constant` on `V`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessWitness {
    pub m: Vec<i64>,
    /// The constant as text; a rational function of the parameters if any.
    pub constant: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FreenessCertificate {
    pub kind: FreenessKind,
    #[serde(flatten)]
    pub verdict: FreenessVerdict,
    pub witness: Option<FreenessWitness>,
    pub irreducibility: Irreducibility,
}

impl FreenessCertificate {
    pub fn is_not_free(&self) -> bool {
        self.verdict == FreenessVerdict::NotFree
    }

    pub fn summary(&self) -> String {
        let kind = match self.kind {
            FreenessKind::Additive => "additively",
            FreenessKind::Multiplicative => "multiplicatively",
        };
        match (&self.verdict, &self.witness) {
            (FreenessVerdict::Free, _) => format!("{kind} free"),
            (FreenessVerdict::FreeUpToBound { bound }, _) => format!("{kind} free up to {bound}"),
            (FreenessVerdict::NotFree, Some(w)) => format!("{kind} not free: m = {:?}, constant {}", w.m, w.constant),
            (FreenessVerdict::NotFree, None) => format!("{kind} not free"),
        }
    }
}

/// `multiplier · f ≡ remainder` modulo the ideal, with `multiplier ∈ Q[p]`
/// nonzero and `remainder` reduced over `Q(p)`.
#[derive(Clone, Debug)]
pub(crate) struct ParamNormalForm {
    pub multiplier: MultiPoly,
    pub remainder: MultiPoly,
}

impl ParamNormalForm {
    pub fn is_constant(&self) -> bool {
        self.remainder.is_free_of_geometric()
    }

    /// `remainder / multiplier` as text.
    pub fn describe(&self) -> String {
        describe_ratio(&self.remainder, &self.multiplier)
    }
}

pub(crate) fn describe_ratio(num: &MultiPoly, den: &MultiPoly) -> String {
    match den.as_constant() {
        Some(k) => num.scale(&(Rational::one() / k)).to_string(),
        None => format!("({num})/({den})"),
    }
}

struct Divisor {
    lead: Vec<u32>,
    lc: MultiPoly,
    lc_const: Option<Rational>,
}

fn geometric_part(e: &[u32], ng: usize) -> Vec<u32> {
    e[..ng].to_vec()
}

/// Coefficient of the geometric monomial `m` in `f`, as a polynomial in the
/// parameters.
fn coefficient_of(f: &MultiPoly, m: &[u32]) -> MultiPoly {
    let ng = m.len();
    MultiPoly::from_terms(
        f.ring(),
        f.terms().iter().filter(|(e, _)| e[..ng] == *m).map(|(e, c)| {
            let mut e = e.clone();
            e[..ng].iter_mut().for_each(|x| *x = 0);
            (e, c.clone())
        }),
    )
}

fn geometric_monomial(f: &MultiPoly, m: &[u32]) -> MultiPoly {
    let mut e = m.to_vec();
    e.resize(f.ring().len(), 0);
    MultiPoly::monomial(f.ring(), e, Rational::one())
}

pub(crate) fn param_normal_form(gb: &GroebnerBasis, f: &MultiPoly, budget: u64) -> Result<ParamNormalForm> {
    let ring = gb.ring();
    let ng = ring.n_geometric();
    let divisors: Vec<Divisor> = gb
        .generators()
        .iter()
        .enumerate()
        .map(|(i, g)| {
            let lead = geometric_part(gb.leading_term(i).0, ng);
            let lc = coefficient_of(g, &lead);
            let lc_const = lc.as_constant();
            Divisor { lead, lc, lc_const }
        })
        .collect();
    let mut r = f.clone();
    let mut h = MultiPoly::one(ring);
    let mut steps = 0u64;
    loop {
        let mut monos: Vec<Vec<u32>> = r.terms().keys().map(|e| geometric_part(e, ng)).collect();
        monos.sort_by(|a, b| MonomialOrder::Grevlex.compare(b, a, ng));
        monos.dedup();
        let hit = monos.iter().find_map(|m| {
            divisors
                .iter()
                .position(|d| d.lead.iter().zip(m).all(|(a, b)| a <= b))
                .map(|k| (m.clone(), k))
        });
        let Some((m, k)) = hit else { break };
        steps += 1;
        if steps > budget {
            return Err(Error::Budget { limit: budget });
        }
        let d = &divisors[k];
        let c = coefficient_of(&r, &m);
        let q: Vec<u32> = m.iter().zip(&d.lead).map(|(a, b)| a - b).collect();
        let shift = &geometric_monomial(&r, &q) * &c;
        let g = &gb.generators()[k];
        match &d.lc_const {
            Some(lc) => {
                r = &r - &(&shift * g).scale(&(Rational::one() / lc));
            }
            None => {
                r = &(&d.lc * &r) - &(&shift * g);
                h = &d.lc * &h;
            }
        }
    }
    Ok(ParamNormalForm {
        multiplier: h,
        remainder: r,
    })
}

fn to_i64_vec(v: &[Integer]) -> Result<Vec<i64>> {
    v.iter()
        .map(|x| x.to_i64().ok_or_else(|| Error::Invalid(format!("witness entry {x} exceeds 64 bits"))))
        .collect()
}

fn first_nonzero_positive(v: Vec<Integer>) -> Vec<Integer> {
    match v.iter().find(|x| !x.is_zero()) {
        Some(x) if x.is_negative() => v.into_iter().map(|x| -x).collect(),
        _ => v,
    }
}

fn product(polys: &[&MultiPoly], ring: &std::sync::Arc<crate::poly::Ring>) -> MultiPoly {
    polys.iter().fold(MultiPoly::one(ring), |acc, p| &acc * *p)
}

/// Exact: searches for a rational relation `Σ m_i x_i ∈ Q(p)` on `V`.
pub fn is_additively_free(v: &GVariety) -> Result<FreenessCertificate> {
    let gb = v.saturated_basis();
    let ring = gb.ring();
    let ng = ring.n_geometric();
    let n = v.n();
    let forms = (0..n)
        .map(|i| param_normal_form(gb, &MultiPoly::var_at(ring, i), v.budget()))
        .collect::<Result<Vec<_>>>()?;
    let big_h = product(&forms.iter().map(|f| &f.multiplier).collect::<Vec<_>>(), ring);
    // s_i = (H / h_i) · r_i, all over the common denominator H
    let scaled: Vec<MultiPoly> = (0..n)
        .map(|i| {
            let others: Vec<&MultiPoly> = (0..n).filter(|&j| j != i).map(|j| &forms[j].multiplier).collect();
            &product(&others, ring) * &forms[i].remainder
        })
        .collect();
    let mut index: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for s in &scaled {
        for e in s.terms().keys() {
            if e[..ng].iter().any(|&x| x > 0) {
                let next = index.len();
                index.entry(e.clone()).or_insert(next);
            }
        }
    }
    let vectors: Vec<Vec<Rational>> = scaled
        .iter()
        .map(|s| {
            let mut col = vec![Rational::zero(); index.len()];
            for (e, c) in s.terms() {
                if let Some(&k) = index.get(e) {
                    col[k] = c.clone();
                }
            }
            col
        })
        .collect();
    let deps = if n == 0 { Vec::new() } else { q_linear_dependencies(&vectors)? };
    let Some(dep) = deps.first() else {
        return Ok(FreenessCertificate {
            kind: FreenessKind::Additive,
            verdict: FreenessVerdict::Free,
            witness: None,
            irreducibility: v.irreducibility(),
        });
    };
    let m = first_nonzero_positive(primitive_integer_vector(dep));
    let mut numerator = MultiPoly::zero(ring);
    for (mi, s) in m.iter().zip(&scaled) {
        numerator = &numerator + &s.scale(&rat_from_int(mi.clone()));
    }
    debug_assert!(numerator.is_free_of_geometric());
    Ok(FreenessCertificate {
        kind: FreenessKind::Additive,
        verdict: FreenessVerdict::NotFree,
        witness: Some(FreenessWitness {
            m: to_i64_vec(&m)?,
            constant: describe_ratio(&numerator, &big_h),
        }),
        irreducibility: v.irreducibility(),
    })
}

/// `Π y^{m+} · Π inv_y^{m-}` in the saturated ring.
fn laurent_monomial(v: &GVariety, m: &[i64]) -> MultiPoly {
    let ring = v.saturated_basis().ring();
    let n = v.n();
    let mut e = vec![0u32; ring.len()];
    for (i, &k) in m.iter().enumerate() {
        if k > 0 {
            e[n + i] = k as u32;
        } else if k < 0 {
            e[2 * n + i] = (-k) as u32;
        }
    }
    MultiPoly::monomial(ring, e, Rational::one())
}

fn monomial_of(v: &GVariety, m: &[i64], positive: bool) -> MultiPoly {
    let flipped: Vec<i64> = m
        .iter()
        .map(|&k| if (k > 0) == positive && k != 0 { k.abs() } else { 0 })
        .collect();
    laurent_monomial(v, &flipped)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Primitive exponent vectors with entries in `[-bound, bound]`, first
/// nonzero entry positive, ordered by max norm and then lexicographically.
pub(crate) fn exponent_vectors(n: usize, bound: u32) -> Vec<Vec<i64>> {
    let b = bound as i64;
    let mut out = Vec::new();
    let mut cur = vec![-b; n];
    if n == 0 {
        return out;
    }
    loop {
        let first = cur.iter().find(|&&x| x != 0);
        if matches!(first, Some(&x) if x > 0) && cur.iter().fold(0, |g, &x| gcd_i64(g, x)) == 1 {
            out.push(cur.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                out.sort_by(|a, b| {
                    let na = a.iter().map(|x| x.abs()).max();
                    let nb = b.iter().map(|x| x.abs()).max();
                    na.cmp(&nb).then_with(|| a.cmp(b))
                });
                return out;
            }
            i -= 1;
            if cur[i] < b {
                cur[i] += 1;
                break;
            }
            cur[i] = -b;
        }
    }
}

/// Searches `|m_i| ≤ bound` for a relation `Π y_i^{m_i} ∈ Q(p)` on `V`.
pub fn is_multiplicatively_free_up_to(v: &GVariety, bound: u32) -> Result<FreenessCertificate> {
    if bound == 0 {
        return Err(Error::Invalid("multiplicative bound must be at least 1".into()));
    }
    let gb = v.saturated_basis();
    for m in exponent_vectors(v.n(), bound) {
        let form = param_normal_form(gb, &laurent_monomial(v, &m), v.budget())?;
        if form.is_constant() {
            return Ok(FreenessCertificate {
                kind: FreenessKind::Multiplicative,
                verdict: FreenessVerdict::NotFree,
                witness: Some(FreenessWitness {
                    m,
                    constant: form.describe(),
                }),
                irreducibility: v.irreducibility(),
            });
        }
    }
    Ok(FreenessCertificate {
        kind: FreenessKind::Multiplicative,
        verdict: FreenessVerdict::FreeUpToBound { bound },
        witness: None,
        irreducibility: v.irreducibility(),
    })
}

/// Whether `a` and `b` are proportional over `Q(p)` as polynomials in the
/// geometric variables.
fn proportional(a: &MultiPoly, b: &MultiPoly) -> bool {
    let ng = a.ring().n_geometric();
    let Some(lead) = b
        .terms()
        .keys()
        .map(|e| geometric_part(e, ng))
        .max_by(|x, y| MonomialOrder::Grevlex.compare(x, y, ng))
    else {
        return a.is_zero();
    };
    let (ca, cb) = (coefficient_of(a, &lead), coefficient_of(b, &lead));
    (&cb * a) == (&ca * b)
}

/// Re-derives a not-free verdict from its witness alone.
///
/// Additive witnesses are checked by reducing `Σ m_i x_i` in one go;
/// multiplicative ones by comparing the normal forms of the positive and
/// negative halves of the monomial.
pub fn recheck_freeness_witness(v: &GVariety, cert: &FreenessCertificate) -> Result<bool> {
    let Some(w) = &cert.witness else {
        return Ok(false);
    };
    if w.m.len() != v.n() || w.m.iter().all(|&k| k == 0) {
        return Ok(false);
    }
    let gb = v.saturated_basis();
    let ring = gb.ring();
    match cert.kind {
        FreenessKind::Additive => {
            let mut f = MultiPoly::zero(ring);
            for (i, &k) in w.m.iter().enumerate() {
                f = &f + &MultiPoly::var_at(ring, i).scale(&rat_from_int(BigInt::from(k)));
            }
            Ok(param_normal_form(gb, &f, v.budget())?.is_constant())
        }
        FreenessKind::Multiplicative => {
            let pos = param_normal_form(gb, &monomial_of(v, &w.m, true), v.budget())?;
            let neg = param_normal_form(gb, &monomial_of(v, &w.m, false), v.budget())?;
            let a = &pos.remainder * &neg.multiplier;
            let b = &neg.remainder * &pos.multiplier;
            Ok(!a.is_zero() && !b.is_zero() && proportional(&a, &b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::IntMatrix;
    use crate::geometry::coordinate_ring;
    use proptest::prelude::*;

    fn none() -> Vec<String> {
        Vec::new()
    }

    fn p() -> Vec<String> {
        vec!["p".to_string()]
    }

    #[test]
    fn additive_examples() {
        let v = GVariety::parse(2, &p(), &["x1 + p*x2"]).unwrap();
        assert_eq!(is_additively_free(&v).unwrap().verdict, FreenessVerdict::Free);

        let v = GVariety::parse(2, &none(), &["x1 + 2*x2"]).unwrap();
        let c = is_additively_free(&v).unwrap();
        assert_eq!(c.verdict, FreenessVerdict::NotFree);
        let w = c.witness.clone().unwrap();
        assert_eq!(w.m, vec![1, 2]);
        assert_eq!(w.constant, "0");
        assert!(recheck_freeness_witness(&v, &c).unwrap());

        let v = GVariety::full(2, &none()).unwrap();
        assert_eq!(is_additively_free(&v).unwrap().verdict, FreenessVerdict::Free);
    }

    #[test]
    fn additive_constant_in_parameters() {
        let v = GVariety::parse(2, &p(), &["x1 - x2 - p"]).unwrap();
        let c = is_additively_free(&v).unwrap();
        let w = c.witness.clone().unwrap();
        assert_eq!(w.m, vec![1, -1]);
        assert_eq!(w.constant, "p");
        assert!(recheck_freeness_witness(&v, &c).unwrap());
    }

    #[test]
    fn leading_coefficient_in_parameters() {
        // p*x1 = 1: x1 is the constant 1/p
        let v = GVariety::parse(1, &p(), &["p*x1 - 1"]).unwrap();
        let c = is_additively_free(&v).unwrap();
        assert_eq!(c.witness.unwrap().constant, "(1)/(p)");
    }

    #[test]
    fn multiplicative_examples() {
        let v = GVariety::parse(2, &none(), &["y1*y2 - 1"]).unwrap();
        let c = is_multiplicatively_free_up_to(&v, 1).unwrap();
        let w = c.witness.clone().unwrap();
        assert_eq!((w.m.clone(), w.constant.as_str()), (vec![1, 1], "1"));
        assert!(recheck_freeness_witness(&v, &c).unwrap());

        let v = GVariety::parse(1, &none(), &["y1 - x1"]).unwrap();
        for b in 1..=5 {
            let c = is_multiplicatively_free_up_to(&v, b).unwrap();
            assert_eq!(c.verdict, FreenessVerdict::FreeUpToBound { bound: b });
        }

        let v = GVariety::parse(1, &none(), &["y1 - 2"]).unwrap();
        let c = is_multiplicatively_free_up_to(&v, 5).unwrap();
        let w = c.witness.clone().unwrap();
        assert_eq!((w.m.clone(), w.constant.as_str()), (vec![1], "2"));
    }

    #[test]
    fn negative_exponent_relation() {
        // y1 = y2^2 gives y1 * y2^-2 = 1
        let v = GVariety::parse(2, &none(), &["y1 - y2^2"]).unwrap();
        let c = is_multiplicatively_free_up_to(&v, 2).unwrap();
        assert_eq!(c.witness.as_ref().unwrap().m, vec![1, -2]);
        assert!(recheck_freeness_witness(&v, &c).unwrap());
    }

    #[test]
    fn forged_witnesses_fail_recheck() {
        let v = GVariety::parse(2, &none(), &["y1*y2 - 1", "x1 + 2*x2"]).unwrap();
        let forged = |kind, m: Vec<i64>| FreenessCertificate {
            kind,
            verdict: FreenessVerdict::NotFree,
            witness: Some(FreenessWitness { m, constant: "0".into() }),
            irreducibility: Irreducibility::Assumed,
        };
        assert!(!recheck_freeness_witness(&v, &forged(FreenessKind::Additive, vec![2, 1])).unwrap());
        assert!(!recheck_freeness_witness(&v, &forged(FreenessKind::Multiplicative, vec![1, -1])).unwrap());
        assert!(recheck_freeness_witness(&v, &forged(FreenessKind::Additive, vec![1, 2])).unwrap());
    }

    #[test]
    fn exponent_vectors_are_primitive_and_ordered() {
        let vs = exponent_vectors(2, 1);
        assert_eq!(vs, vec![vec![0, 1], vec![1, -1], vec![1, 0], vec![1, 1]]);
        // (2,2) is not primitive; (2,1) is
        let vs = exponent_vectors(2, 2);
        assert!(!vs.contains(&vec![2, 2]) && vs.contains(&vec![2, 1]));
        assert_eq!(vs.len(), 8);
    }

    /// Substitutes `x ↦ U x` (additive part only).
    fn substitute_additive(v: &GVariety, u: &IntMatrix) -> GVariety {
        let ring = coordinate_ring(v.n(), v.params()).unwrap();
        let n = v.n();
        let mut images: Vec<MultiPoly> = (0..n)
            .map(|i| {
                (0..n).fold(MultiPoly::zero(&ring), |acc, j| {
                    &acc + &MultiPoly::var_at(&ring, j).scale(&rat_from_int(u.get(i, j).clone()))
                })
            })
            .collect();
        images.extend((n..ring.len()).map(|k| MultiPoly::var_at(&ring, k)));
        let gens = v.generators().iter().map(|g| g.compose(&ring, &images).unwrap()).collect();
        GVariety::new(n, v.params(), gens).unwrap()
    }

    fn unimodular() -> impl Strategy<Value = IntMatrix> {
        (-2i64..=2, -2i64..=2, -2i64..=2, -2i64..=2)
            .prop_filter("det ±1", |(a, b, c, d)| (a * d - b * c).abs() == 1)
            .prop_map(|(a, b, c, d)| IntMatrix::from_i64(&[&[a, b], &[c, d]]))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn additive_verdict_is_unimodular_invariant(u in unimodular(), which in 0usize..4) {
            let samples: [&[&str]; 4] = [&["x1 + 2*x2"], &["y1 - x1"], &["x1*x2 - 1"], &["x1 - 3", "y2 - x2"]];
            let v = GVariety::parse(2, &none(), samples[which]).unwrap();
            let w = substitute_additive(&v, &u);
            prop_assert_eq!(is_additively_free(&v).unwrap().verdict, is_additively_free(&w).unwrap().verdict);
        }
    }
}
