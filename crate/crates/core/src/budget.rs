use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Size caps for the exhaustive operations. Defaults keep every default
/// command within minutes on one core.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Budget {
    /// Largest ambient group whose full subgroup lattice may be enumerated.
    pub max_ambient_order: u64,
    /// Largest p for the full lattice of GL2(p).
    pub max_full_lattice_p: u64,
    /// Largest p for lattices of B0(p), Ns(p), Nns(p), Cs(p).
    pub max_family_lattice_p: u64,
    /// Largest p for enumerating cyclic subgroups up to conjugacy.
    pub max_cyclic_p: u64,
    /// Largest p for the abelian enumeration.
    pub max_abelian_p: u64,
    /// Largest p for brute-force conjugator sweeps over all of GL2(p).
    pub max_exhaustive_p: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            max_ambient_order: 1_000_000,
            max_full_lattice_p: 7,
            max_family_lattice_p: 17,
            max_cyclic_p: 47,
            max_abelian_p: 19,
            max_exhaustive_p: 17,
        }
    }
}

impl Budget {
    pub(crate) fn check(what: &str, size: u64, limit: u64) -> Result<()> {
        if size > limit {
            Err(Error::BudgetExceeded {
                what: what.to_string(),
                size,
                limit,
            })
        } else {
            Ok(())
        }
    }

    /// Short stable tag used in cache file names.
    pub fn tag(&self) -> String {
        format!(
            "a{}-f{}-l{}-c{}-b{}-x{}",
            self.max_ambient_order,
            self.max_full_lattice_p,
            self.max_family_lattice_p,
            self.max_cyclic_p,
            self.max_abelian_p,
            self.max_exhaustive_p
        )
    }
}
