//! Inertia-image constraints and the divisibility arithmetic used to bound p.
//!
//! Each constraint names subgroups that must be contained, up to
//! conjugacy, in the mod-p image. Which subgroups depends on the reduction
//! type, the semistability index `e ∈ {1,2,3,4,6}` and the absolute
//! ramification index `e0 ≤ d`. The fundamental character `θ_{p-1}` and the
//! formal-group valuation `e'` are never computed. The supersingular wild
//! case only uses its consequence: `γ` and `D^{(6d)!}` both lie in the image.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::conjugacy::conjugate_contains;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::standard::{nonsplit_power, semi_cartan_power};
use crate::subgroup::Subgroup;

pub const SEMISTABILITY_INDICES: [u64; 5] = [1, 2, 3, 4, 6];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reduction {
    /// Ordinary or multiplicative, wild inertia acting trivially: `D^{e e0}`.
    OrdinaryOrMultTame,
    /// Ordinary or multiplicative, wild inertia acting: `<D^{e e0}, γ>`.
    OrdinaryOrMultWild,
    /// Supersingular, wild inertia acting trivially: `Cns(p)^{e e0}`.
    SupersingularTame,
    /// Supersingular, wild inertia acting: `<γ>` and `D^{(6d)!}`.
    SupersingularWild,
}

impl Reduction {
    pub const ALL: [Reduction; 4] = [
        Self::OrdinaryOrMultTame,
        Self::OrdinaryOrMultWild,
        Self::SupersingularTame,
        Self::SupersingularWild,
    ];
    pub const TAME: [Reduction; 2] = [Self::OrdinaryOrMultTame, Self::SupersingularTame];

    pub fn name(self) -> &'static str {
        match self {
            Self::OrdinaryOrMultTame => "ordinary-or-mult-tame",
            Self::OrdinaryOrMultWild => "ordinary-or-mult-wild",
            Self::SupersingularTame => "supersingular-tame",
            Self::SupersingularWild => "supersingular-wild",
        }
    }
}

impl fmt::Display for Reduction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct InertiaConstraint {
    pub reduction: Reduction,
    pub e: u64,
    pub e0: u64,
    pub d: u64,
}

impl fmt::Display for InertiaConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} e={} e0={}", self.reduction, self.e, self.e0)
    }
}

impl InertiaConstraint {
    pub fn new(reduction: Reduction, e: u64, e0: u64, d: u64) -> Result<Self> {
        if !SEMISTABILITY_INDICES.contains(&e) {
            return Err(Error::InvalidKind(format!(
                "semistability index {e} not in {{1,2,3,4,6}}"
            )));
        }
        if d == 0 || e0 == 0 || e0 > d {
            return Err(Error::InvalidKind(format!(
                "ramification index e0={e0} outside 1..={d}"
            )));
        }
        Ok(Self {
            reduction,
            e,
            e0,
            d,
        })
    }

    /// Every constraint for degree `d`; `e0` is pinned to 1 when unramified.
    pub fn all(d: u64, ramified: bool, reductions: &[Reduction]) -> Result<Vec<Self>> {
        let e0_max = if ramified { d } else { 1 };
        let mut out = Vec::new();
        for &r in reductions {
            for e in SEMISTABILITY_INDICES {
                for e0 in 1..=e0_max {
                    out.push(Self::new(r, e, e0, d)?);
                }
            }
        }
        Ok(out)
    }

    pub fn ee0(&self) -> u64 {
        self.e * self.e0
    }

    /// Subgroups that must each be conjugate-contained in the image.
    pub fn required(&self, p: u64) -> Result<Vec<Subgroup>> {
        let k = self.ee0();
        Ok(match self.reduction {
            Reduction::OrdinaryOrMultTame => vec![semi_cartan_power(p, k)?],
            Reduction::OrdinaryOrMultWild => {
                let dk = semi_cartan_power(p, k)?;
                let mut gens = dk.generators().to_vec();
                gens.push(Mat2::gamma(p)?);
                vec![Subgroup::closure(p, &gens)?]
            }
            Reduction::SupersingularTame => vec![nonsplit_power(p, k)?],
            Reduction::SupersingularWild => {
                // D^k only depends on gcd(k, p - 1), and (6d)! is far too
                // large to form directly.
                let r = arith::factorial_mod(6 * self.d, p - 1);
                let g = if r == 0 { p - 1 } else { arith::gcd(r, p - 1) };
                vec![
                    Subgroup::cyclic(&Mat2::gamma(p)?)?,
                    semi_cartan_power(p, g)?,
                ]
            }
        })
    }

    /// Conjugators witnessing every required containment, or `None`.
    pub fn met_by(&self, g: &Subgroup) -> Result<Option<Vec<Mat2>>> {
        let mut witnesses = Vec::new();
        for h in self.required(g.modulus())? {
            match conjugate_contains(g, &h)? {
                Some(m) => witnesses.push(m),
                None => return Ok(None),
            }
        }
        Ok(Some(witnesses))
    }
}

/// The four divisibility relations behind the conjugate-containment lemma
/// for semi-Cartan and nonsplit Cartan powers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LemmaCase {
    /// `D^k ⊆~ <γ, Z>` (also `D^k ⊆~ Cns`): `p - 1 | k`.
    A,
    /// `D^k` meeting `Ns \ Cs` after conjugation: `p - 1 | 2k`.
    B,
    /// `D^k ⊆~ Nns`: `p - 1 | 2k`.
    C,
    /// `Cns^k ⊆~ <γ, Z>`: `p + 1 | gcd(k, p^2 - 1)`.
    D,
}

impl LemmaCase {
    pub const ALL: [LemmaCase; 4] = [Self::A, Self::B, Self::C, Self::D];

    pub fn letter(self) -> char {
        match self {
            Self::A => 'a',
            Self::B => 'b',
            Self::C => 'c',
            Self::D => 'd',
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(Self::A),
            "b" => Ok(Self::B),
            "c" => Ok(Self::C),
            "d" => Ok(Self::D),
            _ => Err(Error::Parse {
                what: "lemma part",
                input: s.to_string(),
            }),
        }
    }
}

/// Evaluates the divisibility relation of `case` at `k = e * e0`.
pub fn divisibility_oracle(p: u64, e: u64, e0: u64, case: LemmaCase) -> bool {
    let k = e * e0;
    match case {
        LemmaCase::A => k.is_multiple_of(p - 1),
        LemmaCase::B | LemmaCase::C => (2 * k).is_multiple_of(p - 1),
        LemmaCase::D => arith::gcd(k, p * p - 1).is_multiple_of(p + 1),
    }
}
