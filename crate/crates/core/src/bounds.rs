use serde::Serialize;

use crate::poly::DEFAULT_BUDGET;

/// Search bounds shared by the bounded checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Bounds {
    /// Entry bound for rotundity matrices.
    pub rotund: u32,
    /// Exponent bound for multiplicative freeness.
    pub mult: u32,
    /// Coefficient bound for strongness and hull searches.
    pub strong: u32,
    /// Largest root scaling tried when comparing extensions.
    pub m_max: u32,
    /// Reduction steps per Gröbner computation.
    pub budget: u64,
}

impl Default for Bounds {
    fn default() -> Self {
        Self {
            rotund: 3,
            mult: 5,
            strong: 3,
            m_max: 4,
            budget: DEFAULT_BUDGET,
        }
    }
}
