//! Dickson shapes of subgroups of GL2(p).

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith;
use crate::conjugacy::conjugate_contains;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::standard::{named, Family};
use crate::subgroup::{Subgroup, SubgroupKey};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ShapeTag {
    ContainsSL2,
    BorelConj,
    SplitNormalizerConj,
    NonsplitNormalizerConj,
    ExceptionalA4,
    ExceptionalS4,
    ExceptionalA5,
}

impl ShapeTag {
    pub fn name(self) -> &'static str {
        match self {
            Self::ContainsSL2 => "ContainsSL2",
            Self::BorelConj => "BorelConj",
            Self::SplitNormalizerConj => "SplitNormalizerConj",
            Self::NonsplitNormalizerConj => "NonsplitNormalizerConj",
            Self::ExceptionalA4 => "ExceptionalA4",
            Self::ExceptionalS4 => "ExceptionalS4",
            Self::ExceptionalA5 => "ExceptionalA5",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShapeLabel {
    pub tag: ShapeTag,
    /// For the `*Conj` tags: `m` with `m G m^-1` inside the named group.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Mat2>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ClassificationResult {
    pub key: SubgroupKey,
    pub labels: Vec<ShapeLabel>,
    pub projective_order: u64,
    pub is_abelian: bool,
    pub is_diagonalizable: bool,
    pub det_image_order: u64,
}

impl ClassificationResult {
    pub fn tags(&self) -> Vec<ShapeTag> {
        self.labels.iter().map(|l| l.tag).collect()
    }

    pub fn has(&self, tag: ShapeTag) -> bool {
        self.labels.iter().any(|l| l.tag == tag)
    }
}

/// Projective quotients recognised as exceptional: (tag, order, histogram).
type Histogram = &'static [(u64, u64)];

const EXCEPTIONAL: [(ShapeTag, u64, Histogram); 3] = [
    (ShapeTag::ExceptionalA4, 12, &[(1, 1), (2, 3), (3, 8)]),
    (
        ShapeTag::ExceptionalS4,
        24,
        &[(1, 1), (2, 9), (3, 8), (4, 6)],
    ),
    (
        ShapeTag::ExceptionalA5,
        60,
        &[(1, 1), (2, 15), (3, 20), (5, 24)],
    ),
];

/// Element-order histogram of `G / (G ∩ Z)`. The order of a coset `xZ` is
/// the least `k` with `x^k` scalar; each coset contributes `|G ∩ Z|`
/// elements of the same order, so counts are divided by that.
pub fn projective_quotient_histogram(g: &Subgroup) -> Result<BTreeMap<u64, u64>> {
    let z = g.scalar_count() as u64;
    let mut hist = BTreeMap::new();
    for x in g.elements() {
        *hist.entry(x.projective_order()?).or_insert(0) += 1;
    }
    for v in hist.values_mut() {
        *v /= z;
    }
    Ok(hist)
}

pub fn is_abelian(g: &Subgroup) -> bool {
    g.is_abelian()
}

/// Classifier holding the standard groups of one prime.
pub struct Classifier {
    p: u64,
    b0: Subgroup,
    ns: Subgroup,
    nns: Subgroup,
    cs: Subgroup,
}

impl Classifier {
    pub fn new(p: u64) -> Result<Self> {
        if p == 2 || !arith::is_prime(p) {
            return Err(Error::NotOddPrime(p));
        }
        Ok(Self {
            p,
            b0: named(Family::B0, p)?,
            ns: named(Family::Ns, p)?,
            nns: named(Family::Nns, p)?,
            cs: named(Family::Cs, p)?,
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    fn check(&self, g: &Subgroup) -> Result<()> {
        if g.modulus() != self.p {
            return Err(Error::ModulusMismatch {
                left: self.p as u32,
                right: g.modulus() as u32,
            });
        }
        Ok(())
    }

    /// `m` with `m G m^-1 ⊆ Cs(p)`.
    pub fn is_diagonalizable(&self, g: &Subgroup) -> Result<Option<Mat2>> {
        self.check(g)?;
        conjugate_contains(&self.cs, g)
    }

    /// Every applicable shape label, in tag order.
    pub fn classify(&self, g: &Subgroup) -> Result<ClassificationResult> {
        self.check(g)?;
        let p = self.p;
        let mut labels = Vec::new();
        let sl2_part = g.sl2_intersection().order() as u64;
        let contains_sl2 = sl2_part == p * (p * p - 1);
        if contains_sl2 {
            labels.push(ShapeLabel {
                tag: ShapeTag::ContainsSL2,
                witness: None,
            });
        }
        for (tag, target) in [
            (ShapeTag::BorelConj, &self.b0),
            (ShapeTag::SplitNormalizerConj, &self.ns),
            (ShapeTag::NonsplitNormalizerConj, &self.nns),
        ] {
            if let Some(m) = conjugate_contains(target, g)? {
                labels.push(ShapeLabel {
                    tag,
                    witness: Some(m),
                });
            }
        }
        let projective_order = (g.order() / g.scalar_count()) as u64;
        // PSL2(3) ≅ A4, PGL2(3) ≅ S4 and PSL2(5) ≅ A5: the exceptional case
        // only applies to groups that do not contain SL2.
        let exceptional = EXCEPTIONAL
            .iter()
            .find(|(_, order, _)| *order == projective_order);
        if let Some((tag, _, _)) = exceptional.filter(|_| !contains_sl2) {
            let hist = projective_quotient_histogram(g)?;
            let expected = EXCEPTIONAL
                .iter()
                .find(|(t, _, _)| t == tag)
                .map(|(_, _, h)| *h)
                .unwrap_or(&[]);
            if hist
                .iter()
                .map(|(k, v)| (*k, *v))
                .eq(expected.iter().copied())
            {
                labels.push(ShapeLabel {
                    tag: *tag,
                    witness: None,
                });
            }
        }
        Ok(ClassificationResult {
            key: g.key(),
            labels,
            projective_order,
            is_abelian: g.is_abelian(),
            is_diagonalizable: self.is_diagonalizable(g)?.is_some(),
            det_image_order: g.order() as u64 / sl2_part,
        })
    }
}

/// Classifies one subgroup; build a [`Classifier`] to classify many.
pub fn classify(g: &Subgroup) -> Result<ClassificationResult> {
    Classifier::new(g.modulus())?.classify(g)
}

/// `m` with `m G m^-1 ⊆ Cs(p)`, if `G` is diagonalizable.
pub fn is_diagonalizable(g: &Subgroup) -> Result<Option<Mat2>> {
    Classifier::new(g.modulus())?.is_diagonalizable(g)
}
