//! Membership of sample members of a parametric family in the good subfamily
//! (dimension `n`, additively and multiplicatively free, rotund).

use serde::Serialize;

use super::{
    is_additively_free, is_multiplicatively_free_up_to, is_rotund_up_to, FreenessCertificate, GVariety,
    Irreducibility,
};
use crate::arith::Rational;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SampleVerdict {
    pub values: Vec<(String, String)>,
    pub in_family: bool,
    /// Every failing condition, in the order they are checked.
    pub reasons: Vec<String>,
    pub dimension: Option<usize>,
    pub irreducibility: Irreducibility,
}

/// Verdicts with all parameters left symbolic.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SymbolicVerdict {
    pub dimension: usize,
    pub additive: FreenessCertificate,
    pub multiplicative: FreenessCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyReport {
    pub n: usize,
    pub params: Vec<String>,
    pub symbolic: SymbolicVerdict,
    pub samples: Vec<SampleVerdict>,
}

fn check_sample(family: &GVariety, values: &[(String, Rational)], mult_bound: u32, rotund_bound: u32) -> Result<(Vec<String>, Option<usize>)> {
    let v = match family.specialize(values) {
        Ok(v) => v,
        Err(Error::UnitIdeal) => return Ok((vec!["empty variety".into()], None)),
        Err(e) => return Err(e),
    };
    let n = v.n();
    let mut reasons = Vec::new();
    let d = v.dimension();
    if d != n {
        reasons.push(format!("dimension {d} != {n}"));
    }
    let add = is_additively_free(&v)?;
    if add.is_not_free() {
        reasons.push(format!("additively not-free ({})", witness_text(&add)));
    }
    let mult = is_multiplicatively_free_up_to(&v, mult_bound)?;
    if mult.is_not_free() {
        reasons.push(format!("multiplicatively not-free ({})", witness_text(&mult)));
    }
    let rot = is_rotund_up_to(&v, rotund_bound)?;
    if !rot.is_rotund() {
        reasons.push(format!("not rotund ({})", rot.summary()));
    }
    Ok((reasons, Some(d)))
}

fn witness_text(c: &FreenessCertificate) -> String {
    match &c.witness {
        Some(w) => format!("m = {:?}, constant {}", w.m, w.constant),
        None => String::new(),
    }
}

/// Checks each sample point of `family`. A sample whose checks hit an error
/// (for example the step budget) is excluded with the error as its reason.
pub fn family_filter(
    family: &GVariety,
    samples: &[Vec<(String, Rational)>],
    mult_bound: u32,
    rotund_bound: u32,
) -> Result<FamilyReport> {
    let symbolic = SymbolicVerdict {
        dimension: family.dimension(),
        additive: is_additively_free(family)?,
        multiplicative: is_multiplicatively_free_up_to(family, mult_bound)?,
    };
    let samples = samples
        .iter()
        .map(|values| {
            let (reasons, dimension) = match check_sample(family, values, mult_bound, rotund_bound) {
                Ok(r) => r,
                Err(e) => (vec![format!("error: {e}")], None),
            };
            SampleVerdict {
                values: values.iter().map(|(k, v)| (k.clone(), v.to_string())).collect(),
                in_family: reasons.is_empty(),
                reasons,
                dimension,
                irreducibility: family.irreducibility(),
            }
        })
        .collect();
    Ok(FamilyReport {
        n: family.n(),
        params: family.params().to_vec(),
        symbolic,
        samples,
    })
}
