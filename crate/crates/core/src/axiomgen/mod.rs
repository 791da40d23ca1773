//! Axiom-scheme instances and isolating formulas as first-order / L(Q)
//! sentences over a small formula AST.

mod formula;
mod parse;

use std::collections::BTreeSet;

use num_traits::{Signed, Zero};

use crate::arith::{rat, RatMatrix, Rational};
use crate::error::{Error, Result};
use crate::exppoly::{chi_formula, poly_to_term, ExpPoly};
use crate::geometry::GVariety;
use crate::poly::{text, MultiPoly, Ring};
use crate::presentation::EFieldPresentation;

pub use formula::{Domain, Formula, Quantifier, Term};
pub use parse::{parse, parse_term};

/// Placeholder predicates standing for the conditions defining `P'`. Their
/// first-order definitions exist but are not reproduced; the emitted
/// sentences keep them as named atoms.
pub const PLACEHOLDERS: [(&str, &str); 5] = [
    ("Irreducible", "Irreducible(p): the fibre V_p is irreducible"),
    ("Dimension", "Dimension(n, p): the fibre V_p has dimension exactly n"),
    ("Rotund", "Rotund(p): dim M.V_p >= rk M for every integer n x n matrix M"),
    ("AddFree", "AddFree(p): no relation m1*x1 + ... + mn*xn = a with m in Z^n \\ 0 holds on V_p"),
    ("MultFree", "MultFree(p): no relation y1^m1 * ... * yn^mn = b with m in Z^n \\ 0 holds on V_p"),
];

fn zero() -> Term {
    Term::Num(rat(0, 1))
}

/// `g = 0` written with positive terms on the left and negated negative
/// terms on the right, the leading term kept positive.
fn equation(g: &MultiPoly, name: &dyn Fn(usize) -> Term) -> Formula {
    let g = match text::sorted_terms(g).first() {
        Some((_, c)) if c.is_negative() => -g,
        _ => g.clone(),
    };
    let ring = g.ring();
    let pos = MultiPoly::from_terms(ring, g.terms().iter().filter(|(_, c)| c.is_positive()).map(|(e, c)| (e.clone(), c.clone())));
    let neg = MultiPoly::from_terms(ring, g.terms().iter().filter(|(_, c)| c.is_negative()).map(|(e, c)| (e.clone(), -c)));
    Formula::eq(poly_to_term(&pos, name), poly_to_term(&neg, name))
}

/// `(x, exp(x)) ∈ V` as the conjunction of its generator equations, with
/// `x_i` named by `vars`.
fn membership(v: &GVariety, vars: &[String]) -> Formula {
    let n = v.n();
    let ring = v.ring().clone();
    let name = |i: usize| {
        if i < n {
            Term::var(vars[i].clone())
        } else if i < 2 * n {
            Term::exp(Term::var(vars[i - n].clone()))
        } else {
            Term::var(ring.name(i))
        }
    };
    Formula::and(v.generators().iter().map(|g| equation(g, &name)).collect())
}

/// `Σ c_i v_i` as a term; zero coefficients are skipped.
fn linear_term(coeffs: &[Rational], vars: &[String]) -> Result<Term> {
    let ring = Ring::new(vars, &[] as &[&str])?;
    let p = coeffs
        .iter()
        .enumerate()
        .fold(MultiPoly::zero(&ring), |acc, (i, c)| &acc + &MultiPoly::var_at(&ring, i).scale(c));
    Ok(poly_to_term(&p, &|i| Term::var(vars[i].clone())))
}

fn numbered(prefix: &str, k: usize, avoid: &BTreeSet<String>) -> Vec<String> {
    let mut p = prefix.to_string();
    while (1..=k).any(|i| avoid.contains(&format!("{p}{i}"))) {
        p.push('_');
    }
    (1..=k).map(|i| format!("{p}{i}")).collect()
}

/// `∀x ∃m ∈ Z^n \ 0 [(x, exp(x)) ∈ V → Σ m_i x_i = 0]` for `V` over Q of
/// dimension `n - 1`.
pub fn schanuel_axiom_instance(v: &GVariety) -> Result<Formula> {
    let n = v.n();
    if !v.params().is_empty() {
        return Err(Error::Invalid("the variety must be defined over Q (no parameters)".into()));
    }
    let d = v.dimension();
    if n == 0 || d + 1 != n {
        return Err(Error::WrongDimension {
            expected: format!("{}", n as i64 - 1),
            found: d.to_string(),
        });
    }
    let xs = numbered("x", n, &BTreeSet::new());
    let ms = numbered("m", n, &BTreeSet::new());
    let sum = (0..n)
        .map(|i| Term::mul(Term::var(ms[i].clone()), Term::var(xs[i].clone())))
        .reduce(Term::add)
        .expect("n >= 1");
    let body = Formula::implies(membership(v, &xs), Formula::eq(sum, zero()));
    Ok(Formula::forall(
        xs,
        Formula::quant(Quantifier::Exists, ms, Domain::Integers { nonzero: true }, body),
    ))
}

/// The scheme instance for the family `(V_p)` and `r` extra parameters:
/// `∀p (P'(p) → ∀a ∈ F^r ∃x ∈ F^n ∀m ∈ Q^{n+r} [(x, exp(x)) ∈ V_p ∧
/// (Σ m_i x_i + Σ m_{n+i} a_i = 0 → ∧ m_i = 0)])`.
pub fn seac_axiom_instance(family: &GVariety, r: usize) -> Result<Formula> {
    let n = family.n();
    let params: Vec<String> = family.params().to_vec();
    let taken: BTreeSet<String> = params.iter().cloned().collect();
    let xs = numbered("x", n, &taken);
    let as_ = numbered("a", r, &taken);
    let ms = numbered("m", n + r, &taken);
    let p_terms: Vec<Term> = params.iter().map(|p| Term::var(p.clone())).collect();
    let mut dim_args = vec![Term::Num(Rational::from_integer(n.into()))];
    dim_args.extend(p_terms.iter().cloned());
    let conditions = Formula::And(vec![
        Formula::Pred("Irreducible".into(), p_terms.clone()),
        Formula::Pred("Dimension".into(), dim_args),
        Formula::Pred("Rotund".into(), p_terms.clone()),
        Formula::Pred("AddFree".into(), p_terms.clone()),
        Formula::Pred("MultFree".into(), p_terms),
    ]);
    let mut vars = xs.clone();
    vars.extend(as_.iter().cloned());
    let relation = (0..n + r)
        .map(|i| Term::mul(Term::var(ms[i].clone()), Term::var(vars[i].clone())))
        .reduce(Term::add)
        .map(|s| Formula::eq(s, zero()))
        .unwrap_or(Formula::True);
    let trivial = Formula::and(ms[..n].iter().map(|m| Formula::eq(Term::var(m.clone()), zero())).collect());
    let body = Formula::And(vec![membership(family, &xs), Formula::implies(relation, trivial)]);
    let inner = Formula::quant(Quantifier::Forall, ms, Domain::Rationals { nonzero: false }, body);
    let inner = Formula::forall(as_, Formula::exists(xs, inner));
    Ok(Formula::forall(params, Formula::implies(conditions, inner)))
}

/// `∀z ¬(Q x1)(∃x2..xn) χ_f(x, z)` for the Khovanskii system `f`.
pub fn ccp_axiom_instance(fs: &[ExpPoly]) -> Result<Formula> {
    let chi = chi_formula(fs)?;
    let n = fs[0].arity();
    let params: Vec<String> = {
        let mut ps: Vec<String> = Vec::new();
        for f in fs {
            for p in f.params() {
                if !ps.contains(&p) {
                    ps.push(p);
                }
            }
        }
        ps
    };
    let rest: Vec<String> = (2..=n).map(|i| format!("x{i}")).collect();
    let q = Formula::Uncountable("x1".into(), Box::new(Formula::exists(rest, chi)));
    Ok(Formula::forall(params, Formula::not(q)))
}

/// `φ(x) = ∃y [(y, exp(y)) ∈ V ∧ y is Q-linearly independent over X0 ∧
/// x = M y]`, isolating the type of `a = M·b` where `b` are the basis
/// symbols of `F` outside `X0` and `V` contains their locus.
pub fn isolating_formula(
    f: &EFieldPresentation,
    a: &[Vec<Rational>],
    x0: &[String],
    v: &GVariety,
    m: &RatMatrix,
) -> Result<Formula> {
    for s in x0 {
        if f.index_of(s).is_none() {
            return Err(Error::NotExpressible(format!("`{s}` is not a basis symbol")));
        }
    }
    let b: Vec<usize> = (0..f.n()).filter(|&k| !x0.contains(&f.basis()[k])).collect();
    let k = b.len();
    if v.n() != k || !v.params().is_empty() {
        return Err(Error::Inconsistent(format!(
            "the variety must be over Q in G^{k}, one coordinate per basis symbol outside X0"
        )));
    }
    if m.cols() != k || m.rows() != a.len() {
        return Err(Error::Inconsistent(format!("M must be {} x {k}", a.len())));
    }
    for (i, row) in a.iter().enumerate() {
        if row.len() != f.n() {
            return Err(Error::NotExpressible(format!("element {} has the wrong length", i + 1)));
        }
        if m.row(i).iter().all(Zero::is_zero) {
            return Err(Error::Inconsistent(format!("row {} of M is zero", i + 1)));
        }
        let expected = (0..f.n()).map(|c| match b.iter().position(|&j| j == c) {
            Some(j) => m.get(i, j).clone(),
            None => Rational::zero(),
        });
        if !expected.eq(row.iter().cloned()) {
            return Err(Error::Inconsistent(format!("element {} is not row {} of M applied to the basis", i + 1, i + 1)));
        }
    }
    // V must vanish at (b, exp(b))
    let locus = f.locus();
    let ring = locus.ring();
    let n = f.n();
    let images: Vec<MultiPoly> = b
        .iter()
        .map(|&j| MultiPoly::var_at(ring, j))
        .chain(b.iter().map(|&j| MultiPoly::var_at(ring, n + j)))
        .collect();
    let gb = locus.ideal_basis()?;
    for g in v.generators() {
        if !gb.contains(&g.compose(ring, &images)?)? {
            return Err(Error::Inconsistent(format!("the basis point does not satisfy {g}")));
        }
    }
    let ys = numbered("y", k, &BTreeSet::new());
    let xs = numbered("x", a.len(), &BTreeSet::new());
    let ms = numbered("m", k, &BTreeSet::new());
    let weighted = (0..k)
        .map(|j| Term::mul(Term::var(ms[j].clone()), Term::var(ys[j].clone())))
        .reduce(Term::add)
        .unwrap_or_else(zero);
    let independent = Formula::quant(
        Quantifier::Forall,
        ms,
        Domain::Rationals { nonzero: true },
        Formula::not(Formula::InSpan(weighted, x0.to_vec())),
    );
    let mut parts = vec![membership(v, &ys), independent];
    for (i, x) in xs.iter().enumerate() {
        parts.push(Formula::eq(Term::var(x.clone()), linear_term(m.row(i), &ys)?));
    }
    Ok(Formula::exists(ys, Formula::and(parts)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::{extend_by_variety, ExtensionDatum};
    use crate::Bounds;

    #[test]
    fn kernel_instance() {
        let v = GVariety::parse(1, &[], &["x1", "y1 - 1"]).unwrap();
        let s = schanuel_axiom_instance(&v).unwrap();
        assert_eq!(s.render(), "forall x1. exists m1 in Z \\ 0. (x1 = 0 & exp(x1) = 1 -> m1*x1 = 0)");
        assert!(s.is_closed());
    }

    #[test]
    fn schanuel_rejects_wrong_dimension() {
        let v = GVariety::parse(1, &[], &["y1 - x1"]).unwrap();
        assert!(matches!(schanuel_axiom_instance(&v), Err(Error::WrongDimension { .. })));
        let v = GVariety::parse(2, &[], &["x2 - 2*x1", "y2 - y1^2", "y1 - x1"]).unwrap();
        let s = schanuel_axiom_instance(&v).unwrap();
        assert_eq!(
            s.render(),
            "forall x1, x2. exists m1, m2 in Z^2 \\ 0. (2*x1 = x2 & exp(x1)^2 = exp(x2) & x1 = exp(x1) -> m1*x1 + m2*x2 = 0)"
        );
    }

    #[test]
    fn seac_instance_shape() {
        let fam = GVariety::parse(2, &["p".to_string()], &["x1 + p*x2"]).unwrap();
        let s = seac_axiom_instance(&fam, 1).unwrap();
        assert_eq!(
            s.render(),
            "forall p. (Irreducible(p) & Dimension(2, p) & Rotund(p) & AddFree(p) & MultFree(p) -> \
             forall a1. exists x1, x2. forall m1, m2, m3 in Q^3. (x1 + x2*p = 0 & (m1*x1 + m2*x2 + m3*a1 = 0 -> m1 = 0 & m2 = 0)))"
        );
        assert!(s.is_closed());
        let s0 = seac_axiom_instance(&fam, 0).unwrap();
        assert!(!s0.render().contains("a1"));
        let g = GVariety::full(1, &[]).unwrap();
        assert_eq!(
            seac_axiom_instance(&g, 0).unwrap().render(),
            "Irreducible & Dimension(1) & Rotund & AddFree & MultFree -> exists x1. forall m1 in Q. (true & (m1*x1 = 0 -> m1 = 0))"
        );
    }

    #[test]
    fn ccp_instances() {
        let f = ExpPoly::parse(1, &["z1".to_string()], "x1 - z1").unwrap();
        assert_eq!(ccp_axiom_instance(&[f]).unwrap().render(), "forall z1. ~(Q x1) (x1 - z1 = 0 & ~(1 = 0))");
        let f = ExpPoly::parse(1, &["z1".to_string()], "exp(x1) - z1").unwrap();
        assert!(ccp_axiom_instance(&[f]).unwrap().render().contains("~(exp(x1) = 0)"));
        let id = [ExpPoly::parse(2, &[], "x1").unwrap(), ExpPoly::parse(2, &[], "x2").unwrap()];
        let s = ccp_axiom_instance(&id).unwrap();
        assert_eq!(s.render(), "~(Q x1) exists x2. (x1 = 0 & x2 = 0 & ~(1 = 0))");
        assert!(s.is_closed());
    }

    #[test]
    fn isolating_fixed_point() {
        let datum = ExtensionDatum {
            base: EFieldPresentation::standard_kernel("tau").unwrap(),
            variety: GVariety::parse(1, &[], &["y1 - x1"]).unwrap(),
            symbols: vec!["a".into()],
        };
        let f = extend_by_variety(&datum, &Bounds::default()).unwrap().presentation;
        let a = vec![f.parse_combination("a").unwrap()];
        let m = RatMatrix::from_i64(&[&[1]]);
        let phi = isolating_formula(&f, &a, &["tau".into()], &datum.variety, &m).unwrap();
        assert_eq!(
            phi.render(),
            "exists y1. (y1 = exp(y1) & (forall m1 in Q \\ 0. ~(m1*y1 in span(tau))) & x1 = y1)"
        );
        assert_eq!(phi.free_variables().into_iter().collect::<Vec<_>>(), vec!["x1".to_string()]);
        let zero = RatMatrix::from_i64(&[&[0]]);
        assert!(matches!(
            isolating_formula(&f, &a, &["tau".into()], &datum.variety, &zero),
            Err(Error::Inconsistent(_))
        ));
    }
}
