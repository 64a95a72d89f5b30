//! Subgroup lattices of a finite ambient group.
//!
//! Every subgroup is generated by its cyclic subgroups of prime-power order
//! (the "zuppos"), so every subgroup is reached from the trivial group by
//! adjoining one zuppo at a time. The search runs over conjugacy classes
//! under the ambient group: each class representative is extended by every
//! zuppo, results are deduplicated up to ambient conjugacy, and the classes
//! are expanded into their full orbits at the end.

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;

use crate::arith;
use crate::budget::Budget;
use crate::conjugacy::dedupe_up_to_conjugacy;
use crate::error::{Error, Result};
use crate::mat2::{gl2_order, Mat2};
use crate::standard;
use crate::subgroup::Subgroup;

/// Which subgroups to enumerate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scope {
    All,
    /// Only abelian subgroups: extensions are restricted to zuppos that
    /// commute with the current subgroup.
    Abelian,
}

/// One conjugacy class of subgroups under the ambient group.
#[derive(Clone, Debug)]
pub struct SubgroupClass {
    /// Least member of the class.
    pub representative: Subgroup,
    /// All members, sorted.
    pub members: Vec<Subgroup>,
}

/// Dense indexing of an ambient group's elements. Index order is lex order.
struct Ambient {
    n: u64,
    elems: Vec<Mat2>,
    index: IndexMap,
    inv: Vec<u32>,
    words: usize,
}

enum IndexMap {
    Dense(Vec<u32>),
    Hashed(HashMap<Mat2, u32>),
}

const DENSE_INDEX_LIMIT: u64 = 1 << 22;

type Bits = Vec<u64>;

#[inline]
fn test(bits: &[u64], i: u32) -> bool {
    bits[(i >> 6) as usize] >> (i & 63) & 1 == 1
}

#[inline]
fn set(bits: &mut [u64], i: u32) {
    bits[(i >> 6) as usize] |= 1 << (i & 63);
}

impl Ambient {
    fn new(g: &Subgroup) -> Result<Self> {
        let n = g.modulus();
        let elems = g.elements().to_vec();
        let index = if n.pow(4) <= DENSE_INDEX_LIMIT {
            let mut v = vec![u32::MAX; n.pow(4) as usize];
            for (i, x) in elems.iter().enumerate() {
                v[x.code() as usize] = i as u32;
            }
            IndexMap::Dense(v)
        } else {
            IndexMap::Hashed(
                elems
                    .iter()
                    .enumerate()
                    .map(|(i, x)| (*x, i as u32))
                    .collect(),
            )
        };
        let mut amb = Self {
            n,
            words: elems.len().div_ceil(64),
            elems,
            index,
            inv: Vec::new(),
        };
        let inv = amb
            .elems
            .iter()
            .map(|x| x.inv().map(|y| amb.idx(&y)))
            .collect::<Result<Vec<_>>>()?;
        amb.inv = inv;
        Ok(amb)
    }

    #[inline]
    fn idx(&self, x: &Mat2) -> u32 {
        match &self.index {
            IndexMap::Dense(v) => v[x.code() as usize],
            IndexMap::Hashed(m) => m[x],
        }
    }

    #[inline]
    fn mul(&self, i: u32, j: u32) -> u32 {
        self.idx(&self.elems[i as usize].mul_unchecked(&self.elems[j as usize]))
    }

    #[inline]
    fn conj(&self, a: u32, x: u32) -> u32 {
        self.mul(self.mul(a, x), self.inv[a as usize])
    }

    fn identity(&self) -> u32 {
        self.idx(&Mat2::identity(self.n).expect("valid modulus"))
    }

    fn empty(&self) -> Bits {
        vec![0; self.words]
    }

    fn powers(&self, x: u32) -> Vec<u32> {
        let e = self.identity();
        let mut out = vec![e];
        let mut y = x;
        while y != e {
            out.push(y);
            y = self.mul(y, x);
        }
        out
    }

    fn to_subgroup(&self, rec: &Rec) -> Subgroup {
        let mut elems: Vec<u32> = rec.elems.clone();
        elems.sort_unstable();
        Subgroup::from_parts(
            self.n,
            rec.gens.iter().map(|&g| self.elems[g as usize]).collect(),
            elems.into_iter().map(|i| self.elems[i as usize]).collect(),
        )
    }
}

#[derive(Clone)]
struct Rec {
    bits: Bits,
    elems: Vec<u32>,
    gens: Vec<u32>,
}

impl Rec {
    /// `<self, z>` by coset enumeration: the result is a union of right
    /// cosets `S r`, grown until closed under right multiplication by
    /// every generator.
    fn extend(&self, amb: &Ambient, z: u32) -> Rec {
        let mut gens = self.gens.clone();
        gens.push(z);
        let mut bits = self.bits.clone();
        let mut elems = self.elems.clone();
        let base_len = self.elems.len();
        let mut reps = vec![amb.identity()];
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            i += 1;
            for &g in &gens {
                let c = amb.mul(r, g);
                if test(&bits, c) {
                    continue;
                }
                reps.push(c);
                for k in 0..base_len {
                    let y = amb.mul(self.elems[k], c);
                    set(&mut bits, y);
                    elems.push(y);
                }
            }
        }
        Rec { bits, elems, gens }
    }

    fn conjugate(&self, amb: &Ambient, a: u32) -> Rec {
        let mut bits = amb.empty();
        let elems: Vec<u32> = self.elems.iter().map(|&x| amb.conj(a, x)).collect();
        for &x in &elems {
            set(&mut bits, x);
        }
        Rec {
            bits,
            elems,
            gens: self.gens.iter().map(|&g| amb.conj(a, g)).collect(),
        }
    }
}

/// Per-element data used for class signatures.
struct ElementData {
    order: Vec<u32>,
    class: Vec<u32>,
}

impl ElementData {
    fn new(amb: &Ambient) -> Result<Self> {
        let mut classes = HashMap::new();
        let mut order = Vec::with_capacity(amb.elems.len());
        let mut class = Vec::with_capacity(amb.elems.len());
        for x in &amb.elems {
            order.push(x.element_order()? as u32);
            let next = classes.len() as u32;
            class.push(*classes.entry(x.class_invariant()).or_insert(next));
        }
        Ok(Self { order, class })
    }

    /// Invariant of the subgroup's ambient conjugacy class.
    fn signature(&self, rec: &Rec) -> Vec<(u32, u32, u32)> {
        let mut counts: HashMap<(u32, u32), u32> = HashMap::new();
        for &x in &rec.elems {
            *counts
                .entry((self.class[x as usize], self.order[x as usize]))
                .or_default() += 1;
        }
        let mut sig: Vec<(u32, u32, u32)> =
            counts.into_iter().map(|((c, o), k)| (c, o, k)).collect();
        sig.sort_unstable();
        sig
    }
}

fn check_budget(ambient: &Subgroup, budget: &Budget) -> Result<()> {
    let order = ambient.order() as u64;
    Budget::check("ambient group order", order, budget.max_ambient_order)?;
    let p = ambient.modulus();
    if arith::is_prime(p) {
        if order == gl2_order(p) {
            Budget::check("prime for a full GL2 lattice", p, budget.max_full_lattice_p)?;
        } else {
            Budget::check(
                "prime for a subgroup lattice",
                p,
                budget.max_family_lattice_p,
            )?;
        }
    }
    Ok(())
}

/// Zuppos of the ambient group, each given by its least-index generator.
fn zuppos(amb: &Ambient, data: &ElementData) -> Vec<u32> {
    let e = amb.identity();
    let mut out = Vec::new();
    for x in 0..amb.elems.len() as u32 {
        let o = data.order[x as usize] as u64;
        if x == e || !is_prime_power(o) {
            continue;
        }
        let pw = amb.powers(x);
        let least = (1..o)
            .filter(|&k| arith::gcd(k, o) == 1)
            .map(|k| pw[k as usize])
            .min();
        if least == Some(x) {
            out.push(x);
        }
    }
    out
}

fn is_prime_power(o: u64) -> bool {
    if o < 2 {
        return false;
    }
    let q = (2..=o).find(|q| o.is_multiple_of(*q)).expect("o >= 2");
    let mut m = o;
    while m.is_multiple_of(q) {
        m /= q;
    }
    m == 1
}

/// `a` with `a S a^-1 = T`, searched over the ambient group.
fn ambient_conjugate(amb: &Ambient, s: &Rec, t: &Rec) -> bool {
    (0..amb.elems.len() as u32).any(|a| s.gens.iter().all(|&g| test(&t.bits, amb.conj(a, g))))
}

/// All subgroups of `ambient` (or all abelian ones), grouped into conjugacy
/// classes under `ambient`. Classes are sorted by representative.
pub fn subgroup_classes(
    ambient: &Subgroup,
    scope: Scope,
    budget: &Budget,
) -> Result<Vec<SubgroupClass>> {
    check_budget(ambient, budget)?;
    classes_unchecked(ambient, scope)
}

pub(crate) fn classes_unchecked(ambient: &Subgroup, scope: Scope) -> Result<Vec<SubgroupClass>> {
    let amb = Ambient::new(ambient)?;
    let data = ElementData::new(&amb)?;
    let zup = zuppos(&amb, &data);

    let e = amb.identity();
    let mut trivial = Rec {
        bits: amb.empty(),
        elems: vec![e],
        gens: Vec::new(),
    };
    set(&mut trivial.bits, e);

    let mut reps: Vec<Rec> = vec![trivial.clone()];
    let mut seen: HashSet<Bits> = HashSet::from([trivial.bits]);
    let mut buckets: HashMap<Vec<(u32, u32, u32)>, Vec<usize>> = HashMap::new();
    buckets.insert(data.signature(&reps[0]), vec![0]);

    let mut next = 0;
    while next < reps.len() {
        let r = reps[next].clone();
        next += 1;
        let candidates: Vec<Rec> = zup
            .par_iter()
            .filter(|&&z| !test(&r.bits, z))
            .filter(|&&z| {
                scope == Scope::All || r.gens.iter().all(|&g| amb.mul(g, z) == amb.mul(z, g))
            })
            .map(|&z| r.extend(&amb, z))
            .collect();
        for t in candidates {
            if !seen.insert(t.bits.clone()) {
                continue;
            }
            let sig = data.signature(&t);
            let bucket = buckets.entry(sig).or_default();
            if bucket
                .iter()
                .any(|&i| ambient_conjugate(&amb, &t, &reps[i]))
            {
                continue;
            }
            bucket.push(reps.len());
            reps.push(t);
        }
    }

    let mut classes: Vec<SubgroupClass> = reps
        .par_iter()
        .map(|r| {
            let mut orbit: HashSet<Bits> = HashSet::new();
            let mut members = Vec::new();
            for a in 0..amb.elems.len() as u32 {
                let c = r.conjugate(&amb, a);
                if orbit.insert(c.bits.clone()) {
                    members.push(amb.to_subgroup(&c));
                }
            }
            members.sort();
            SubgroupClass {
                representative: members[0].clone(),
                members,
            }
        })
        .collect();
    classes.sort_by(|x, y| x.representative.cmp(&y.representative));
    Ok(classes)
}

/// Every subgroup of `ambient`, sorted.
pub fn enumerate_subgroups(ambient: &Subgroup, budget: &Budget) -> Result<Vec<Subgroup>> {
    flatten(subgroup_classes(ambient, Scope::All, budget)?)
}

/// Every abelian subgroup of `ambient`, sorted.
pub fn enumerate_abelian_subgroups(ambient: &Subgroup, budget: &Budget) -> Result<Vec<Subgroup>> {
    flatten(subgroup_classes(ambient, Scope::Abelian, budget)?)
}

fn flatten(classes: Vec<SubgroupClass>) -> Result<Vec<Subgroup>> {
    let mut out: Vec<Subgroup> = classes.into_iter().flat_map(|c| c.members).collect();
    out.sort();
    Ok(out)
}

/// One matrix from every GL2(p)-conjugacy class of elements: scalars,
/// non-scalar diagonals, scalar-times-unipotent, and nonsplit elements with
/// eigenvalues outside F_p.
pub fn element_class_representatives(p: u64) -> Result<Vec<Mat2>> {
    let eps = standard::epsilon(p)?;
    let mut reps = Vec::new();
    for l in 1..p as i64 {
        reps.push(Mat2::scalar(p, l)?);
        reps.push(Mat2::new(p, l, 1, 0, l)?);
        for m in l + 1..p as i64 {
            reps.push(Mat2::diag(p, l, m)?);
        }
    }
    for a in 0..p {
        for b in 1..=(p - 1) / 2 {
            reps.push(Mat2::new(
                p,
                a as i64,
                (b * eps) as i64,
                b as i64,
                a as i64,
            )?);
        }
    }
    reps.sort();
    Ok(reps)
}

/// One representative per conjugacy class of cyclic subgroups of GL2(p).
/// Every cyclic subgroup is conjugate to one generated by an element-class
/// representative, so only those generators are closed; each class is
/// represented by the least such subgroup.
pub fn enumerate_cyclic_subgroups(p: u64, budget: &Budget) -> Result<Vec<Subgroup>> {
    if !arith::is_prime(p) || p == 2 {
        return Err(Error::NotOddPrime(p));
    }
    Budget::check("prime for cyclic enumeration", p, budget.max_cyclic_p)?;
    let groups = element_class_representatives(p)?
        .par_iter()
        .map(Subgroup::cyclic)
        .collect::<Result<Vec<_>>>()?;
    dedupe_up_to_conjugacy(groups)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::standard::{named, Family};

    /// Independent oracle: close every subset-reachable pair by plain
    /// breadth-first closure, starting from cyclic subgroups.
    fn naive_lattice(ambient: &Subgroup) -> Vec<Subgroup> {
        let n = ambient.modulus();
        let mut found: HashSet<Subgroup> = HashSet::new();
        let mut frontier: Vec<Subgroup> = vec![Subgroup::trivial(n).unwrap()];
        found.insert(frontier[0].clone());
        while let Some(g) = frontier.pop() {
            for x in ambient.elements() {
                if g.contains_element(x) {
                    continue;
                }
                let mut gens = g.generators().to_vec();
                gens.push(*x);
                let h = Subgroup::closure(n, &gens).unwrap();
                if found.insert(h.clone()) {
                    frontier.push(h);
                }
            }
        }
        let mut out: Vec<Subgroup> = found.into_iter().collect();
        out.sort();
        out
    }

    #[test]
    fn trivial_and_small_cyclic() {
        let b = Budget::default();
        let t = Subgroup::trivial(5).unwrap();
        assert_eq!(enumerate_subgroups(&t, &b).unwrap(), vec![t]);
        let z = named(Family::Z, 5).unwrap();
        let subs = enumerate_subgroups(&z, &b).unwrap();
        assert_eq!(
            subs.iter().map(Subgroup::order).collect::<Vec<_>>().len(),
            3
        );
    }

    #[test]
    fn matches_naive_closure_on_small_groups() {
        let b = Budget::default();
        for g in [
            named(Family::GL2, 3).unwrap(),
            named(Family::Ns, 5).unwrap(),
            named(Family::B0, 5).unwrap(),
            named(Family::Nns, 3).unwrap(),
            named(Family::GL2, 5).unwrap(),
        ] {
            assert_eq!(
                enumerate_subgroups(&g, &b).unwrap(),
                naive_lattice(&g),
                "{g:?}"
            );
        }
    }

    #[test]
    fn gl2_3_lattice() {
        let subs =
            enumerate_subgroups(&named(Family::GL2, 3).unwrap(), &Budget::default()).unwrap();
        assert_eq!(subs.len(), 55);
        for g in &subs {
            assert!(g.is_closed());
            assert_eq!(48 % g.order(), 0);
        }
    }

    #[test]
    fn abelian_scope_is_the_abelian_part() {
        let b = Budget::default();
        for g in [
            named(Family::GL2, 3).unwrap(),
            named(Family::Ns, 5).unwrap(),
            named(Family::B0, 5).unwrap(),
        ] {
            let all: Vec<Subgroup> = enumerate_subgroups(&g, &b)
                .unwrap()
                .into_iter()
                .filter(Subgroup::is_abelian)
                .collect();
            assert_eq!(enumerate_abelian_subgroups(&g, &b).unwrap(), all);
        }
    }

    #[test]
    fn budget_refuses_large_gl2() {
        let g = named(Family::GL2, 11).unwrap();
        assert!(matches!(
            enumerate_subgroups(&g, &Budget::default()),
            Err(crate::Error::BudgetExceeded { .. })
        ));
    }

    fn cyclic_oracle(p: u64) -> Vec<Subgroup> {
        let mut all: Vec<Subgroup> = named(Family::GL2, p)
            .unwrap()
            .elements()
            .iter()
            .map(|x| Subgroup::cyclic(x).unwrap())
            .collect();
        all.sort();
        all.dedup();
        let mut reps: Vec<Subgroup> = Vec::new();
        for g in all {
            let seen = reps.iter().any(|r| {
                r.order() == g.order()
                    && crate::conjugacy::conjugate_contains_exhaustive(r, &g)
                        .unwrap()
                        .is_some()
            });
            if !seen {
                reps.push(g);
            }
        }
        reps
    }

    #[test]
    fn class_representatives_cover_gl2() {
        for p in [3u64, 5, 7, 11] {
            let reps = element_class_representatives(p).unwrap();
            assert_eq!(reps.len() as u64, p * p - 1);
            let invariants: HashSet<_> = reps.iter().map(Mat2::class_invariant).collect();
            assert_eq!(invariants.len(), reps.len());
            let all: HashSet<_> = named(Family::GL2, p)
                .unwrap()
                .elements()
                .iter()
                .map(Mat2::class_invariant)
                .collect();
            assert_eq!(invariants, all);
        }
    }

    #[test]
    fn cyclic_classes_match_exhaustive_oracle() {
        for p in [3u64, 5, 7] {
            let fast = enumerate_cyclic_subgroups(p, &Budget::default()).unwrap();
            let slow = cyclic_oracle(p);
            assert_eq!(fast.len(), slow.len(), "p={p}");
            for s in &slow {
                let matches = fast
                    .iter()
                    .filter(|f| {
                        f.order() == s.order()
                            && crate::conjugacy::conjugate_contains_exhaustive(f, s)
                                .unwrap()
                                .is_some()
                    })
                    .count();
                assert_eq!(matches, 1, "p={p} {s:?}");
            }
            for g in &fast {
                assert!(g.is_cyclic());
            }
            assert_eq!(fast.iter().filter(|g| g.order() as u64 == p).count(), 1);
        }
    }

    #[test]
    fn cyclic_classes_at_three() {
        let orders: Vec<usize> = enumerate_cyclic_subgroups(3, &Budget::default())
            .unwrap()
            .iter()
            .map(Subgroup::order)
            .collect();
        let mut sorted = orders.clone();
        sorted.sort();
        assert_eq!(sorted, vec![1, 2, 2, 3, 4, 6, 8]);
    }
}
