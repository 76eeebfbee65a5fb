//! Resource caps for the search-flavored operations.

/// Caps for a single Groebner basis run. Exceeding either cap aborts the
/// run with [`crate::Error::Budget`]; it is never reported as a negative
/// mathematical answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GbBudget {
    /// Maximum number of S-pairs processed.
    pub max_pairs: usize,
    /// Maximum total degree of any polynomial entering the basis.
    pub max_degree: u64,
}

impl Default for GbBudget {
    fn default() -> Self {
        GbBudget { max_pairs: 100_000, max_degree: 60 }
    }
}

/// Degree cap for the linear coboundary search on ungraded inputs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveBudget {
    pub max_degree: u64,
}

impl Default for SolveBudget {
    fn default() -> Self {
        SolveBudget { max_degree: 24 }
    }
}
