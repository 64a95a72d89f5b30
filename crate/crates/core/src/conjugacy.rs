//! Conjugate containment `H ⊆~ G` over GL2(p) with explicit witnesses.
//!
//! Witness policy (shared by both search routes): the identity when
//! `H ⊆ G`, otherwise the lexicographically least `m` in GL2(p) with
//! `m H m^-1 ⊆ G`.
//!
//! [`conjugate_contains`] enumerates only the conjugators that can move a
//! pivot generator `h` of `H` into `G`: for each `y ∈ G` in the class of
//! `h`, those conjugators form one coset `m0 · C(h)` of the centralizer,
//! and for non-scalar `h` the centralizer is `{x I + y h}`.
//! [`conjugate_contains_exhaustive`] walks all of GL2(p) in lexicographic
//! order. The two must agree exactly.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::arith;
use crate::error::{Error, Result};
use crate::mat2::{gl2_iter, ClassInvariant, Mat2};
use crate::subgroup::Subgroup;

fn require_prime_pair(g: &Subgroup, h: &Subgroup) -> Result<u64> {
    if g.modulus() != h.modulus() {
        return Err(Error::ModulusMismatch {
            left: g.modulus() as u32,
            right: h.modulus() as u32,
        });
    }
    let p = g.modulus();
    if !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(p)
}

fn generators_or_elements(h: &Subgroup) -> &[Mat2] {
    if h.generators().is_empty() {
        h.elements()
    } else {
        h.generators()
    }
}

#[inline]
fn moves_into(m: &Mat2, m_inv: &Mat2, gens: &[Mat2], g: &Subgroup) -> bool {
    gens.iter()
        .all(|x| g.contains_element(&m.mul_unchecked(x).mul_unchecked(m_inv)))
}

/// Necessary conditions for `H ⊆~ G` that do not need a conjugator.
fn plausible(g: &Subgroup, h: &Subgroup) -> bool {
    if !g.order().is_multiple_of(h.order()) {
        return false;
    }
    let gp = g.class_profile();
    h.class_profile()
        .iter()
        .all(|(inv, count)| gp.get(inv).is_some_and(|c| c >= count))
}

/// Some `m` with `m H m^-1 ⊆ G`, or `None`.
pub fn conjugate_contains(g: &Subgroup, h: &Subgroup) -> Result<Option<Mat2>> {
    let p = require_prime_pair(g, h)?;
    if g.contains(h)? {
        return Ok(Some(Mat2::identity(p)?));
    }
    if !plausible(g, h) {
        return Ok(None);
    }
    let gens = generators_or_elements(h);
    let g_profile = g.class_profile();
    // Pivot: the non-scalar generator with the fewest candidate images in G.
    let Some(pivot) = gens
        .iter()
        .filter(|x| !x.is_scalar())
        .min_by_key(|x| {
            (
                g_profile.get(&x.class_invariant()).copied().unwrap_or(0),
                **x,
            )
        })
        .copied()
    else {
        // Scalar generators are fixed by conjugation and H ⊄ G.
        return Ok(None);
    };
    let pivot_inv = pivot.class_invariant();
    let pivot_basis = pivot.cyclic_basis().expect("non-scalar");
    let pivot_basis_inv = pivot_basis.inv()?;
    let centralizer: Vec<Mat2> = (0..p)
        .flat_map(|x| (0..p).map(move |y| (x, y)))
        .filter_map(|(x, y)| {
            let [a, b, c, d] = pivot.entries();
            let m = Mat2::new(
                p,
                (x + y * a) as i64,
                (y * b) as i64,
                (y * c) as i64,
                (x + y * d) as i64,
            )
            .ok()?;
            m.is_invertible().then_some(m)
        })
        .collect();

    let mut best: Option<Mat2> = None;
    for y in g
        .elements()
        .iter()
        .filter(|y| y.class_invariant() == pivot_inv)
    {
        let y_basis = y.cyclic_basis().expect("same class as a non-scalar");
        let m0 = y_basis.mul_unchecked(&pivot_basis_inv);
        for c in &centralizer {
            let m = m0.mul_unchecked(c);
            if best.is_some_and(|b| m >= b) {
                continue;
            }
            let m_inv = m.inv()?;
            debug_assert_eq!(m.mul_unchecked(&pivot).mul_unchecked(&m_inv), *y);
            if moves_into(&m, &m_inv, gens, g) {
                best = Some(m);
            }
        }
    }
    Ok(best)
}

/// Brute force: all of GL2(p) in lexicographic order, first witness wins.
pub fn conjugate_contains_exhaustive(g: &Subgroup, h: &Subgroup) -> Result<Option<Mat2>> {
    let p = require_prime_pair(g, h)?;
    if g.contains(h)? {
        return Ok(Some(Mat2::identity(p)?));
    }
    let gens = generators_or_elements(h);
    for m in gl2_iter(p)? {
        let m_inv = m.inv()?;
        if moves_into(&m, &m_inv, gens, g) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// Brute-force search for a conjugator satisfying an arbitrary predicate on
/// the conjugated subgroup's generators, in lexicographic order.
pub fn find_conjugator(
    p: u64,
    h: &Subgroup,
    mut accept: impl FnMut(&[Mat2]) -> bool,
) -> Result<Option<Mat2>> {
    let gens = generators_or_elements(h).to_vec();
    let mut moved = vec![Mat2::identity(p)?; gens.len()];
    for m in gl2_iter(p)? {
        let m_inv = m.inv()?;
        for (slot, x) in moved.iter_mut().zip(&gens) {
            *slot = m.mul_unchecked(x).mul_unchecked(&m_inv);
        }
        if accept(&moved) {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `m` with `m H m^-1 = G`, if the subgroups are conjugate.
pub fn conjugator(g: &Subgroup, h: &Subgroup) -> Result<Option<Mat2>> {
    if g.order() != h.order() {
        return Ok(None);
    }
    conjugate_contains(g, h)
}

/// Invariants of a subgroup's conjugacy class: conjugate subgroups have
/// equal signatures.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConjugacySignature {
    pub order: usize,
    pub order_histogram: BTreeMap<u64, u64>,
    pub det_image_order: u64,
    pub class_profile: Vec<(ClassInvariant, u64)>,
}

impl ConjugacySignature {
    pub fn of(g: &Subgroup) -> Self {
        Self {
            order: g.order(),
            order_histogram: g.order_histogram().clone(),
            det_image_order: g.det_image().len() as u64,
            class_profile: g.class_profile().into_iter().collect(),
        }
    }
}

/// Partitions subgroups into GL2(p)-conjugacy classes. Candidates are
/// bucketed by signature, then compared pairwise with an explicit
/// conjugator search. Each class is sorted, classes are sorted by their
/// least member, and exact duplicates are dropped.
pub fn partition_up_to_conjugacy(mut candidates: Vec<Subgroup>) -> Result<Vec<Vec<Subgroup>>> {
    use rayon::prelude::*;

    candidates.sort();
    candidates.dedup();
    let mut buckets: BTreeMap<ConjugacySignature, Vec<Subgroup>> = BTreeMap::new();
    let signatures: Vec<ConjugacySignature> =
        candidates.par_iter().map(ConjugacySignature::of).collect();
    for (sig, g) in signatures.into_iter().zip(candidates) {
        buckets.entry(sig).or_default().push(g);
    }
    let per_bucket: Vec<Result<Vec<Vec<Subgroup>>>> = buckets
        .into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|members| {
            let mut classes: Vec<Vec<Subgroup>> = Vec::new();
            'next: for g in members {
                for class in classes.iter_mut() {
                    if conjugator(&class[0], &g)?.is_some() {
                        class.push(g);
                        continue 'next;
                    }
                }
                classes.push(vec![g]);
            }
            Ok(classes)
        })
        .collect();
    let mut out = Vec::new();
    for classes in per_bucket {
        out.extend(classes?);
    }
    out.sort_by(|x, y| x[0].cmp(&y[0]));
    Ok(out)
}

/// One representative (the least member) per conjugacy class, sorted.
pub fn dedupe_up_to_conjugacy(candidates: Vec<Subgroup>) -> Result<Vec<Subgroup>> {
    Ok(partition_up_to_conjugacy(candidates)?
        .into_iter()
        .map(|mut c| c.swap_remove(0))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{named, nonsplit_power, semi_cartan_power, Family};

    #[test]
    fn identity_first_policy() {
        for p in [5u64, 7] {
            let cs = named(Family::Cs, p).unwrap();
            for k in 1..p {
                let dk = semi_cartan_power(p, k).unwrap();
                assert_eq!(
                    conjugate_contains(&cs, &dk).unwrap(),
                    Some(Mat2::identity(p).unwrap())
                );
            }
        }
    }

    #[test]
    fn gamma_z_examples_at_five() {
        let gz = named(Family::GammaZ, 5).unwrap();
        let d2 = semi_cartan_power(5, 2).unwrap();
        assert_eq!(conjugate_contains_exhaustive(&gz, &d2).unwrap(), None);
        assert_eq!(conjugate_contains(&gz, &d2).unwrap(), None);
        let c6 = nonsplit_power(5, 6).unwrap();
        assert_eq!(c6, named(Family::Z, 5).unwrap());
        assert!(conjugate_contains(&gz, &c6).unwrap().is_some());
    }

    #[test]
    fn witnesses_verify_and_match_brute_force() {
        let p = 5;
        let targets = [
            Family::B0,
            Family::Ns,
            Family::Nns,
            Family::Cs,
            Family::Cns,
            Family::GammaZ,
        ];
        let gl = named(Family::GL2, p).unwrap();
        let samples: Vec<Subgroup> = gl
            .elements()
            .iter()
            .step_by(7)
            .map(|x| Subgroup::cyclic(x).unwrap())
            .chain([named(Family::Cs, p).unwrap(), named(Family::D, p).unwrap()])
            .collect();
        for fam in targets {
            let g = named(fam, p).unwrap();
            for h in &samples {
                let fast = conjugate_contains(&g, h).unwrap();
                let slow = conjugate_contains_exhaustive(&g, h).unwrap();
                assert_eq!(fast, slow, "{fam} vs {h:?}");
                if let Some(m) = fast {
                    assert!(g.contains(&h.conjugate_by(&m).unwrap()).unwrap());
                }
            }
        }
    }

    #[test]
    fn unipotent_subgroups_are_conjugate() {
        let p = 7;
        let u = Subgroup::cyclic(&Mat2::gamma(p).unwrap()).unwrap();
        let lower = Subgroup::cyclic(&Mat2::new(p, 1, 0, 3, 1).unwrap()).unwrap();
        let m = conjugator(&u, &lower).unwrap().expect("conjugate");
        assert_eq!(lower.conjugate_by(&m).unwrap(), u);
    }

    #[test]
    fn dedupe_keeps_one_per_class() {
        let p = 5;
        let all: Vec<Subgroup> = named(Family::GL2, p)
            .unwrap()
            .elements()
            .iter()
            .filter(|x| x.element_order().unwrap() == p)
            .map(|x| Subgroup::cyclic(x).unwrap())
            .collect();
        let reps = dedupe_up_to_conjugacy(all).unwrap();
        assert_eq!(reps.len(), 1);
    }
}
