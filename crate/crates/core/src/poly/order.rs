use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

/// Monomial order on the geometric variables. Parameters always form a
/// trailing grevlex block that is consulted only on ties.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum MonomialOrder {
    Grevlex,
    Lex,
    /// Product order: the first `first` geometric variables form an
    /// elimination block (grevlex inside each block).
    Block { first: usize },
}

fn grevlex(a: &[u32], b: &[u32]) -> Ordering {
    let da: u32 = a.iter().sum();
    let db: u32 = b.iter().sum();
    match da.cmp(&db) {
        Ordering::Equal => {}
        o => return o,
    }
    for (x, y) in a.iter().zip(b).rev() {
        if x != y {
            return y.cmp(x);
        }
    }
    Ordering::Equal
}

fn lex(a: &[u32], b: &[u32]) -> Ordering {
    a.cmp(b)
}

impl MonomialOrder {
    pub fn compare(&self, a: &[u32], b: &[u32], n_geometric: usize) -> Ordering {
        let (ga, pa) = a.split_at(n_geometric);
        let (gb, pb) = b.split_at(n_geometric);
        let geo = match *self {
            MonomialOrder::Grevlex => grevlex(ga, gb),
            MonomialOrder::Lex => lex(ga, gb),
            MonomialOrder::Block { first } => {
                let k = first.min(n_geometric);
                grevlex(&ga[..k], &gb[..k]).then_with(|| grevlex(&ga[k..], &gb[k..]))
            }
        };
        geo.then_with(|| grevlex(pa, pb))
    }
}
