//! Bounded rotundity: `dim M·V ≥ rk M` over a finite set of matrices.
//!
//! `dim M·V` depends only on the rational row space of `M` (two matrices
//! with the same row space differ by an isogeny composed with a projection),
//! so one `r × n` Hermite-form representative is checked per row space.

use std::collections::BTreeSet;

use num_traits::ToPrimitive;
use serde::Serialize;

use super::{matrix_action, GVariety, Irreducibility};
use crate::arith::{IntMatrix, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum RotundityVerdict {
    RotundUpTo { bound: u32 },
    NotRotund,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotundityCounterexample {
    /// Square `n × n`; row `c` holds the Hermite row whose pivot is column `c`.
    pub matrix: Vec<Vec<i64>>,
    pub image_dimension: usize,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RotundityReport {
    pub bound: u32,
    #[serde(flatten)]
    pub verdict: RotundityVerdict,
    pub counterexample: Option<RotundityCounterexample>,
    pub matrices_checked: usize,
    pub irreducibility: Irreducibility,
}

impl RotundityReport {
    pub fn is_rotund(&self) -> bool {
        matches!(self.verdict, RotundityVerdict::RotundUpTo { .. })
    }

    pub fn summary(&self) -> String {
        match &self.counterexample {
            None => format!("rotund up to {}", self.bound),
            Some(c) => format!(
                "not rotund: M = {:?}, dim M.V = {} < rk M = {}",
                c.matrix, c.image_dimension, c.rank
            ),
        }
    }
}

/// Values in `[lo, hi]` ordered by absolute value, positive first.
fn small_first(lo: i64, hi: i64) -> Vec<i64> {
    let mut v: Vec<i64> = (lo..=hi).collect();
    v.sort_by_key(|&x| (x.abs(), x < 0));
    v
}

fn combinations(n: usize, r: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, r: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == r {
            out.push(cur.clone());
            return;
        }
        for c in start..n {
            cur.push(c);
            go(c + 1, n, r, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, r, &mut Vec::new(), &mut out);
    out
}

fn cartesian(lists: &[Vec<i64>]) -> Vec<Vec<i64>> {
    lists.iter().fold(vec![Vec::new()], |acc, vals| {
        acc.into_iter()
            .flat_map(|prefix| {
                vals.iter().map(move |&v| {
                    let mut p = prefix.clone();
                    p.push(v);
                    p
                })
            })
            .collect()
    })
}

/// Integer matrices in row Hermite form with entries bounded by `bound`,
/// one per rational row space, ranks `1..=n`, with their pivot columns.
/// Enumeration order is rank, then pivot columns, then entries with small
/// absolute values first.
pub fn enumerate_row_spaces(n: usize, bound: u32) -> Vec<(IntMatrix, Vec<usize>)> {
    let b = bound as i64;
    let mut seen: BTreeSet<Vec<Vec<Rational>>> = BTreeSet::new();
    let mut out = Vec::new();
    for r in 1..=n {
        for pivots in combinations(n, r) {
            for pivot_values in cartesian(&vec![(1..=b).collect(); r]) {
                // entries right of each pivot: reduced mod a lower pivot, or free
                let mut positions = Vec::new();
                let mut choices = Vec::new();
                for (k, &c) in pivots.iter().enumerate() {
                    for col in c + 1..n {
                        positions.push((k, col));
                        match pivots.iter().position(|&p| p == col) {
                            Some(j) => choices.push((0..pivot_values[j]).collect()),
                            None => choices.push(small_first(-b, b)),
                        }
                    }
                }
                for entries in cartesian(&choices) {
                    let mut rows = vec![vec![0i64; n]; r];
                    for (k, &c) in pivots.iter().enumerate() {
                        rows[k][c] = pivot_values[k];
                    }
                    for (&(k, col), &v) in positions.iter().zip(&entries) {
                        rows[k][col] = v;
                    }
                    let refs: Vec<&[i64]> = rows.iter().map(Vec::as_slice).collect();
                    let m = IntMatrix::from_i64(&refs);
                    if seen.insert(m.to_rational().rref().matrix.to_rows()) {
                        out.push((m, pivots.clone()));
                    }
                }
            }
        }
    }
    out
}

fn padded(m: &IntMatrix, pivots: &[usize], n: usize) -> IntMatrix {
    let mut sq = IntMatrix::zeros(n, n);
    for (k, &c) in pivots.iter().enumerate() {
        for j in 0..n {
            sq.set(c, j, m.get(k, j).clone());
        }
    }
    sq
}

fn to_i64_rows(m: &IntMatrix) -> Result<Vec<Vec<i64>>> {
    m.to_rows()
        .iter()
        .map(|r| {
            r.iter()
                .map(|x| x.to_i64().ok_or_else(|| Error::Invalid("matrix entry exceeds 64 bits".into())))
                .collect()
        })
        .collect()
}

pub fn is_rotund_up_to(v: &GVariety, bound: u32) -> Result<RotundityReport> {
    if bound == 0 {
        return Err(Error::Invalid("rotundity bound must be at least 1".into()));
    }
    let n = v.n();
    let mut checked = 0;
    for (m, pivots) in enumerate_row_spaces(n, bound) {
        checked += 1;
        let rank = pivots.len();
        if v.image_dimension_lower_bound(&m)? >= rank {
            continue;
        }
        let d = v.image_dimension(&m)?;
        if d < rank {
            let square = padded(&m, &pivots, n);
            return Ok(RotundityReport {
                bound,
                verdict: RotundityVerdict::NotRotund,
                counterexample: Some(RotundityCounterexample {
                    matrix: to_i64_rows(&square)?,
                    image_dimension: d,
                    rank,
                }),
                matrices_checked: checked,
                irreducibility: v.irreducibility(),
            });
        }
    }
    Ok(RotundityReport {
        bound,
        verdict: RotundityVerdict::RotundUpTo { bound },
        counterexample: None,
        matrices_checked: checked,
        irreducibility: v.irreducibility(),
    })
}

/// Recomputes `dim M·V` through the square action and `rk M` by row
/// reduction; true iff both match the report and `dim M·V < rk M`.
pub fn recheck_counterexample(v: &GVariety, c: &RotundityCounterexample) -> Result<bool> {
    let refs: Vec<&[i64]> = c.matrix.iter().map(Vec::as_slice).collect();
    let m = IntMatrix::from_i64(&refs);
    let image = matrix_action(&m, v)?;
    let rank = m.to_rational().rref().rank;
    let dim = image.dimension();
    Ok(dim == c.image_dimension && rank == c.rank && dim < rank)
}
