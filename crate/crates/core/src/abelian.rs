//! Abelian subgroups of GL2(p) up to conjugacy, listed by shape.
//!
//! An abelian subgroup conjugates into the Borel or a Cartan normalizer; in
//! the Borel it is diagonalizable or of the form `<γ, G∩Z>`, and outside a
//! Cartan it is `<n, G∩Z>` for any `n` outside the Cartan part. The
//! candidates below cover exactly those shapes. The lattice tests check the
//! resulting classes against full abelian lattices at small p.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::arith;
use crate::budget::Budget;
use crate::conjugacy::partition_up_to_conjugacy;
use crate::error::{Error, Result};
use crate::lattice::{classes_unchecked, Scope};
use crate::mat2::Mat2;
use crate::standard::{self, named, Family};
use crate::subgroup::Subgroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AbelianShape {
    /// A subgroup of Cs(p).
    SplitCartanSubgroup,
    /// `<n, Z'>` with `n` antidiagonal and `Z'` scalar.
    AntidiagonalWithScalars,
    /// A subgroup of Cns(p).
    NonsplitCartanSubgroup,
    /// `<n, Z'>` with `n ∈ Nns(p) \ Cns(p)` and `Z'` scalar.
    ReflectionWithScalars,
    /// `<γ, Z'>` with `Z'` scalar.
    GammaWithScalars,
}

impl AbelianShape {
    pub fn name(self) -> &'static str {
        match self {
            Self::SplitCartanSubgroup => "split-cartan-subgroup",
            Self::AntidiagonalWithScalars => "antidiagonal-with-scalars",
            Self::NonsplitCartanSubgroup => "nonsplit-cartan-subgroup",
            Self::ReflectionWithScalars => "reflection-with-scalars",
            Self::GammaWithScalars => "gamma-with-scalars",
        }
    }
}

/// One conjugacy class of abelian subgroups together with every shape some
/// member of the class was produced by.
#[derive(Clone, Debug)]
pub struct AbelianClass {
    pub group: Subgroup,
    pub shapes: Vec<AbelianShape>,
}

fn scalar_subgroups(p: u64) -> Result<Vec<Subgroup>> {
    let g = arith::least_primitive_root(p).ok_or(Error::NotOddPrime(p))?;
    arith::divisors(p - 1)
        .into_iter()
        .map(|d| Subgroup::cyclic(&Mat2::scalar(p, arith::mod_pow(g, d, p) as i64)?))
        .collect()
}

fn with_scalars(x: Mat2, scalars: &[Subgroup]) -> Result<Vec<Subgroup>> {
    scalars
        .iter()
        .map(|z| {
            let mut gens = vec![x];
            gens.extend_from_slice(z.generators());
            Subgroup::closure(x.modulus(), &gens)
        })
        .collect()
}

/// All candidates of one shape, before any deduplication.
pub fn shape_candidates(p: u64, shape: AbelianShape) -> Result<Vec<Subgroup>> {
    let scalars = scalar_subgroups(p)?;
    let coset = |family: Family, cartan: Family| -> Result<Vec<Subgroup>> {
        let cartan = named(cartan, p)?;
        let outside: Vec<Mat2> = named(family, p)?
            .elements()
            .iter()
            .filter(|x| !cartan.contains_element(x))
            .copied()
            .collect();
        let groups: Vec<Result<Vec<Subgroup>>> = outside
            .par_iter()
            .map(|&n| with_scalars(n, &scalars))
            .collect();
        groups
            .into_iter()
            .collect::<Result<Vec<_>>>()
            .map(|v| v.concat())
    };
    match shape {
        AbelianShape::SplitCartanSubgroup => {
            Ok(classes_unchecked(&named(Family::Cs, p)?, Scope::All)?
                .into_iter()
                .flat_map(|c| c.members)
                .collect())
        }
        AbelianShape::AntidiagonalWithScalars => coset(Family::Ns, Family::Cs),
        AbelianShape::NonsplitCartanSubgroup => arith::divisors(p * p - 1)
            .into_iter()
            .map(|k| standard::nonsplit_power(p, k))
            .collect(),
        AbelianShape::ReflectionWithScalars => coset(Family::Nns, Family::Cns),
        AbelianShape::GammaWithScalars => with_scalars(Mat2::gamma(p)?, &scalars),
    }
}

const SHAPES: [AbelianShape; 5] = [
    AbelianShape::SplitCartanSubgroup,
    AbelianShape::AntidiagonalWithScalars,
    AbelianShape::NonsplitCartanSubgroup,
    AbelianShape::ReflectionWithScalars,
    AbelianShape::GammaWithScalars,
];

/// Abelian subgroups of GL2(p) up to conjugacy, each represented by its
/// least candidate, sorted.
pub fn enumerate_abelian_classes(p: u64, budget: &Budget) -> Result<Vec<AbelianClass>> {
    if !arith::is_prime(p) || p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    Budget::check("prime for abelian enumeration", p, budget.max_abelian_p)?;
    let mut shapes_of: BTreeMap<Subgroup, BTreeSet<AbelianShape>> = BTreeMap::new();
    for shape in SHAPES {
        for g in shape_candidates(p, shape)? {
            debug_assert!(g.is_abelian());
            shapes_of.entry(g).or_default().insert(shape);
        }
    }
    let classes = partition_up_to_conjugacy(shapes_of.keys().cloned().collect())?;
    Ok(classes
        .into_iter()
        .map(|members| {
            let shapes: BTreeSet<AbelianShape> = members
                .iter()
                .flat_map(|g| shapes_of[g].iter().copied())
                .collect();
            AbelianClass {
                group: members[0].clone(),
                shapes: shapes.into_iter().collect(),
            }
        })
        .collect())
}
