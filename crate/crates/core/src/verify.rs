//! Exhaustive checks of the group-theoretic lemmas at concrete primes.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::arith;
use crate::budget::Budget;
use crate::classify::Classifier;
use crate::conjugacy::{conjugate_contains, conjugate_contains_exhaustive, find_conjugator};
use crate::error::{Error, Result};
use crate::inertia::{divisibility_oracle, LemmaCase};
use crate::lattice::{enumerate_abelian_subgroups, enumerate_subgroups};
use crate::mat2::{gl2_order, Mat2};
use crate::standard::{named, nonsplit_power, semi_cartan_power, Family};
use crate::subgroup::{Subgroup, SubgroupKey};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Failure {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub key: Option<SubgroupKey>,
    pub reason: String,
}

impl Failure {
    fn on(g: &Subgroup, reason: impl Into<String>) -> Self {
        Self {
            key: Some(g.key()),
            reason: reason.into(),
        }
    }

    fn plain(reason: impl Into<String>) -> Self {
        Self {
            key: None,
            reason: reason.into(),
        }
    }
}

/// Outcome of one verification run.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub check: String,
    pub params: Value,
    pub passed: bool,
    /// Number of individual instances checked.
    pub checked: u64,
    pub failures: Vec<Failure>,
    pub details: Value,
}

impl VerifyReport {
    fn new(
        check: &str,
        params: Value,
        checked: u64,
        failures: Vec<Failure>,
        details: Value,
    ) -> Self {
        Self {
            check: check.to_string(),
            params,
            passed: failures.is_empty(),
            checked,
            failures,
            details,
        }
    }
}

fn require_odd_prime(p: u64) -> Result<()> {
    if p == 2 || !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(())
}

/// For `C` of index two in `N`: every subgroup `G ⊆ N` with `G ⊄ C` and
/// every `n ∈ G \ C` satisfy `G = <n, G∩C>`, `<n> ∩ C = <n^2>`, `2 | |n|`
/// and `[G : G∩C] = 2`.
pub fn verify_index2_lemma(
    big: &Subgroup,
    cartan: &Subgroup,
    budget: &Budget,
) -> Result<VerifyReport> {
    if !big.contains(cartan)? || big.order() != 2 * cartan.order() {
        return Err(Error::NotIndexTwo {
            n_order: big.order(),
            c_order: cartan.order(),
        });
    }
    let subgroups = enumerate_subgroups(big, budget)?;
    let per_group: Vec<(u64, Vec<Failure>)> = subgroups
        .par_iter()
        .filter(|g| !cartan.contains(g).unwrap_or(true))
        .map(|g| check_index2_group(g, cartan))
        .collect::<Result<Vec<_>>>()?;
    let skipped = subgroups.len() - per_group.len();
    let checked = per_group.iter().map(|(c, _)| c).sum();
    let failures = per_group.into_iter().flat_map(|(_, f)| f).collect();
    Ok(VerifyReport::new(
        "index2",
        json!({ "n_order": big.order(), "c_order": cartan.order(), "modulus": big.modulus() }),
        checked,
        failures,
        json!({ "subgroups": subgroups.len(), "inside_c_skipped": skipped }),
    ))
}

fn check_index2_group(g: &Subgroup, c: &Subgroup) -> Result<(u64, Vec<Failure>)> {
    let gc = g.intersect(c)?;
    let mut failures = Vec::new();
    let mut checked = 0;
    if g.order() != 2 * gc.order() {
        failures.push(Failure::on(
            g,
            format!("[G : G∩C] = {}/{}", g.order(), gc.order()),
        ));
    }
    for n in g.elements().iter().filter(|x| !c.contains_element(x)) {
        checked += 1;
        let mut gens = vec![*n];
        gens.extend_from_slice(gc.elements());
        if Subgroup::closure(g.modulus(), &gens)? != *g {
            failures.push(Failure::on(g, format!("<n, G∩C> != G for n = {n}")));
        }
        let cyc = Subgroup::cyclic(n)?;
        if cyc.intersect(c)? != Subgroup::cyclic(&n.mul(n)?)? {
            failures.push(Failure::on(g, format!("<n> ∩ C != <n^2> for n = {n}")));
        }
        if cyc.order() % 2 != 0 {
            failures.push(Failure::on(
                g,
                format!("odd order {} for n = {n}", cyc.order()),
            ));
        }
    }
    Ok((checked, failures))
}

fn set_json(s: &BTreeSet<u64>) -> Value {
    json!(s.iter().collect::<Vec<_>>())
}

/// Compares a search-derived set of exponents with the divisibility oracle.
fn compare(
    label: &str,
    search: &BTreeSet<u64>,
    oracle: &BTreeSet<u64>,
    failures: &mut Vec<Failure>,
) -> Value {
    let discrepancies: Vec<u64> = search.symmetric_difference(oracle).copied().collect();
    for k in &discrepancies {
        failures.push(Failure::plain(format!(
            "{label}: k = {k} is {} by search but {} by divisibility",
            if search.contains(k) {
                "admissible"
            } else {
                "not admissible"
            },
            if oracle.contains(k) {
                "admissible"
            } else {
                "not admissible"
            },
        )));
    }
    json!({ "search": set_json(search), "oracle": set_json(oracle), "discrepancies": discrepancies })
}

/// Search-derived exponent set, memoised on the subgroup each `k` produces.
fn exponent_set(
    ks: impl Iterator<Item = u64>,
    make: impl Fn(u64) -> Result<Subgroup>,
    holds: impl Fn(&Subgroup) -> Result<bool> + Sync,
) -> Result<BTreeSet<u64>> {
    let mut memo: HashMap<Subgroup, bool> = HashMap::new();
    let mut out = BTreeSet::new();
    for k in ks {
        let h = make(k)?;
        let v = match memo.get(&h) {
            Some(v) => *v,
            None => {
                let v = holds(&h)?;
                memo.insert(h, v);
                v
            }
        };
        if v {
            out.insert(k);
        }
    }
    Ok(out)
}

/// Checks one part of the conjugate-containment lemma for every
/// `k ∈ 1..=p^2-1` by brute-force conjugator search over GL2(p), comparing
/// the admissible exponents with the divisibility oracle in both directions.
pub fn verify_conjugate_containment(
    p: u64,
    part: LemmaCase,
    budget: &Budget,
) -> Result<VerifyReport> {
    require_odd_prime(p)?;
    Budget::check(
        "prime for brute-force conjugator search",
        p,
        budget.max_exhaustive_p,
    )?;
    let ks = || 1..=p * p - 1;
    let oracle = |case| -> BTreeSet<u64> {
        ks().filter(|&k| divisibility_oracle(p, k, 1, case))
            .collect()
    };
    let d = |k| semi_cartan_power(p, k);
    let mut failures = Vec::new();
    let mut checked = p * p - 1;
    let details = match part {
        LemmaCase::A => {
            let gz = named(Family::GammaZ, p)?;
            let search = exponent_set(ks(), d, |h| {
                Ok(conjugate_contains_exhaustive(&gz, h)?.is_some())
            })?;
            json!({ "gamma_z": compare("D^k in <γ,Z>", &search, &oracle(LemmaCase::A), &mut failures) })
        }
        LemmaCase::B => {
            let cs = named(Family::Cs, p)?;
            let ns = named(Family::Ns, p)?;
            let lattice = enumerate_subgroups(&cs, budget)?;
            // First claim: inside Cs, conjugate containment of D^k is plain
            // containment of D^k or of its flip.
            let mut distinct: BTreeMap<Subgroup, u64> = BTreeMap::new();
            for k in ks().filter(|k| k % (p - 1) != 0) {
                distinct.entry(d(k)?).or_insert(k);
            }
            let mut pairs = 0u64;
            for (dk, k) in &distinct {
                let flipped = dk.flip_subgroup()?;
                let bad: Vec<Failure> = lattice
                    .par_iter()
                    .map(|g| -> Result<Option<Failure>> {
                        if conjugate_contains_exhaustive(g, dk)?.is_none() {
                            return Ok(None);
                        }
                        Ok((!g.contains(dk)? && !g.contains(&flipped)?)
                            .then(|| Failure::on(g, format!("D^{k} conjugate-contained but neither D^{k} nor its flip is a subgroup"))))
                    })
                    .collect::<Result<Vec<_>>>()?
                    .into_iter()
                    .flatten()
                    .collect();
                pairs += lattice.len() as u64;
                failures.extend(bad);
            }
            checked += pairs;
            // Second claim: a conjugate of D^k inside Ns but not inside Cs.
            let search = exponent_set(ks(), d, |h| {
                Ok(find_conjugator(p, h, |gens| {
                    gens.iter().all(|x| ns.contains_element(x))
                        && gens.iter().any(|x| !cs.contains_element(x))
                })?
                .is_some())
            })?;
            let expected: BTreeSet<u64> = oracle(LemmaCase::B)
                .into_iter()
                .filter(|k| k % (p - 1) != 0)
                .collect();
            json!({
                "flip_claim": { "cs_subgroups": lattice.len(), "exponent_classes": distinct.len(), "pairs": pairs },
                "ns_minus_cs": compare("D^k into Ns \\ Cs", &search, &expected, &mut failures),
            })
        }
        LemmaCase::C => {
            let cns = named(Family::Cns, p)?;
            let nns = named(Family::Nns, p)?;
            let in_cns = exponent_set(ks(), d, |h| {
                Ok(conjugate_contains_exhaustive(&cns, h)?.is_some())
            })?;
            let in_nns = exponent_set(ks(), d, |h| {
                Ok(conjugate_contains_exhaustive(&nns, h)?.is_some())
            })?;
            checked *= 2;
            json!({
                "cns": compare("D^k in Cns", &in_cns, &oracle(LemmaCase::A), &mut failures),
                "nns": compare("D^k in Nns", &in_nns, &oracle(LemmaCase::C), &mut failures),
            })
        }
        LemmaCase::D => {
            let gz = named(Family::GammaZ, p)?;
            let search = exponent_set(
                ks(),
                |k| nonsplit_power(p, k),
                |h| Ok(conjugate_contains_exhaustive(&gz, h)?.is_some()),
            )?;
            json!({ "gamma_z": compare("Cns^k in <γ,Z>", &search, &oracle(LemmaCase::D), &mut failures) })
        }
    };
    Ok(VerifyReport::new(
        &format!("containment-{}", part.letter()),
        json!({ "p": p, "part": part.letter().to_string() }),
        checked,
        failures,
        details,
    ))
}

/// Abelian subgroup shapes:
/// (a) every abelian subgroup of GL2(p) conjugates into B0, Ns or Nns;
/// (b) a subgroup of B0 is diagonalizable iff p does not divide its order,
///     and an abelian one with p | |G| equals `<γ, G∩Z>`;
/// (c) an abelian subgroup of Ns (Nns) outside Cs (Cns) equals `<n, G∩Z>`
///     for every n outside the Cartan part.
pub fn verify_abelian_shapes(p: u64, budget: &Budget) -> Result<VerifyReport> {
    require_odd_prime(p)?;
    let mut failures = Vec::new();
    let mut checked = 0u64;
    let cs = named(Family::Cs, p)?;
    let gamma = Mat2::gamma(p)?;

    let part_a = if p <= budget.max_full_lattice_p {
        let targets = [
            named(Family::B0, p)?,
            named(Family::Ns, p)?,
            named(Family::Nns, p)?,
        ];
        let abelian = enumerate_abelian_subgroups(&named(Family::GL2, p)?, budget)?;
        checked += abelian.len() as u64;
        for g in &abelian {
            let mut hit = false;
            for t in &targets {
                if conjugate_contains(t, g)?.is_some() {
                    hit = true;
                    break;
                }
            }
            if !hit {
                failures.push(Failure::on(
                    g,
                    "abelian but not conjugate into B0, Ns or Nns",
                ));
            }
        }
        json!({ "abelian_subgroups": abelian.len() })
    } else {
        json!({ "skipped": format!("full GL2 lattice budget is p <= {}", budget.max_full_lattice_p) })
    };

    let b0_all = enumerate_subgroups(&named(Family::B0, p)?, budget)?;
    let mut b0_abelian_divisible = 0;
    for g in &b0_all {
        checked += 1;
        let divisible = (g.order() as u64).is_multiple_of(p);
        let diagonalizable = conjugate_contains(&cs, g)?.is_some();
        if diagonalizable == divisible {
            failures.push(Failure::on(
                g,
                format!("diagonalizable = {diagonalizable} but p | |G| = {divisible}"),
            ));
        }
        if divisible && g.is_abelian() {
            b0_abelian_divisible += 1;
            let mut gens = vec![gamma];
            gens.extend_from_slice(g.scalar_part().elements());
            if Subgroup::closure(p, &gens)? != *g {
                failures.push(Failure::on(g, "abelian, p | |G|, but G != <γ, G∩Z>"));
            }
        }
    }
    let part_b =
        json!({ "b0_subgroups": b0_all.len(), "abelian_with_p_dividing": b0_abelian_divisible });

    let mut part_c = serde_json::Map::new();
    for (normalizer, cartan) in [(Family::Ns, Family::Cs), (Family::Nns, Family::Cns)] {
        let c = named(cartan, p)?;
        let abelian = enumerate_abelian_subgroups(&named(normalizer, p)?, budget)?;
        let mut outside = 0;
        for g in abelian.iter().filter(|g| !c.contains(g).unwrap_or(true)) {
            outside += 1;
            let scalars = g.scalar_part();
            for n in g.elements().iter().filter(|x| !c.contains_element(x)) {
                checked += 1;
                let mut gens = vec![*n];
                gens.extend_from_slice(scalars.elements());
                if Subgroup::closure(p, &gens)? != *g {
                    failures.push(Failure::on(
                        g,
                        format!("G != <n, G∩Z> for n = {n} outside {cartan}"),
                    ));
                }
            }
        }
        part_c.insert(
            normalizer.name().to_string(),
            json!({ "abelian_subgroups": abelian.len(), "outside_cartan": outside }),
        );
    }

    Ok(VerifyReport::new(
        "abelian-shapes",
        json!({ "p": p }),
        checked,
        failures,
        json!({ "a": part_a, "b": part_b, "c": Value::Object(part_c) }),
    ))
}

/// Every subgroup of GL2(p) receives at least one shape label.
pub fn verify_dickson(p: u64, budget: &Budget) -> Result<VerifyReport> {
    require_odd_prime(p)?;
    let classifier = Classifier::new(p)?;
    let subgroups = enumerate_subgroups(&named(Family::GL2, p)?, budget)?;
    let results = subgroups
        .par_iter()
        .map(|g| classifier.classify(g))
        .collect::<Result<Vec<_>>>()?;
    let mut failures = Vec::new();
    let mut tally: BTreeMap<&'static str, u64> = BTreeMap::new();
    for (g, r) in subgroups.iter().zip(&results) {
        if r.labels.is_empty() {
            failures.push(Failure::on(g, "no shape label"));
        }
        for t in r.tags() {
            *tally.entry(t.name()).or_insert(0) += 1;
        }
    }
    Ok(VerifyReport::new(
        "dickson",
        json!({ "p": p }),
        subgroups.len() as u64,
        failures,
        json!({ "subgroups": subgroups.len(), "labels": tally }),
    ))
}

/// Number of random subgroups drawn when the lattice of GL2(n) is out of budget.
pub const SAMPLED_SUBGROUPS: usize = 400;

/// Group side of the cyclotomic-division-field criterion: `G ∩ SL2(n)` is the
/// kernel of det on `G` (so `|G| = |G ∩ SL2| |det G|`), and if it is trivial
/// then `G` is abelian with det injective. Uses every subgroup of GL2(n) for
/// primes within the lattice budget, and seeded random closures otherwise.
pub fn verify_trivial_sl2_part(n: u64, seed: u64, budget: &Budget) -> Result<VerifyReport> {
    if n < 2 {
        return Err(Error::InvalidModulus(n));
    }
    let exhaustive = arith::is_prime(n) && n <= budget.max_full_lattice_p;
    let subgroups = if exhaustive {
        enumerate_subgroups(&named(Family::GL2, n)?, budget)?
    } else {
        Budget::check(
            "GL2(n) order for sampling",
            gl2_order(n),
            budget.max_ambient_order,
        )?;
        sample_subgroups(n, seed, SAMPLED_SUBGROUPS)?
    };
    let mut failures = Vec::new();
    let mut trivial_kernel = 0;
    for g in &subgroups {
        let kernel: Vec<Mat2> = g
            .elements()
            .iter()
            .filter(|x| x.det() == 1)
            .copied()
            .collect();
        let sl2 = g.sl2_intersection();
        if sl2.elements() != kernel.as_slice() || !sl2.is_closed() {
            failures.push(Failure::on(g, "G ∩ SL2 differs from the kernel of det"));
        }
        let image: BTreeSet<u64> = g.elements().iter().map(Mat2::det).collect();
        if g.order() != kernel.len() * image.len() {
            failures.push(Failure::on(g, "|G| != |ker det| |det G|"));
        }
        if kernel.len() == 1 {
            trivial_kernel += 1;
            if !g.is_abelian() {
                failures.push(Failure::on(g, "G ∩ SL2 = 1 but G is not abelian"));
            }
            if image.len() != g.order() {
                failures.push(Failure::on(g, "G ∩ SL2 = 1 but det is not injective"));
            }
        }
    }
    Ok(VerifyReport::new(
        "trivial-sl2",
        json!({ "n": n, "seed": seed }),
        subgroups.len() as u64,
        failures,
        json!({ "exhaustive": exhaustive, "subgroups": subgroups.len(), "trivial_sl2_part": trivial_kernel }),
    ))
}

/// Seeded closures of one or two random invertible matrices mod `n`.
pub fn sample_subgroups(n: u64, seed: u64, count: usize) -> Result<Vec<Subgroup>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut random_unit = || loop {
        let m = Mat2::new(
            n,
            rng.gen_range(0..n) as i64,
            rng.gen_range(0..n) as i64,
            rng.gen_range(0..n) as i64,
            rng.gen_range(0..n) as i64,
        )
        .expect("modulus already validated");
        if m.is_invertible() {
            return m;
        }
    };
    let mut gens_list = Vec::with_capacity(count);
    for i in 0..count {
        let mut gens = vec![random_unit()];
        if i % 2 == 1 {
            gens.push(random_unit());
        }
        gens_list.push(gens);
    }
    let mut out = gens_list
        .par_iter()
        .map(|g| Subgroup::closure(n, g))
        .collect::<Result<Vec<_>>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dickson_totality_small() {
        let r = verify_dickson(3, &Budget::default()).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        assert_eq!(r.checked, 55);
        assert!(verify_dickson(11, &Budget::default()).is_err());
    }

    #[test]
    fn index2_examples() {
        let b = Budget::default();
        for (n, c) in [(Family::Ns, Family::Cs), (Family::Nns, Family::Cns)] {
            let r = verify_index2_lemma(&named(n, 5).unwrap(), &named(c, 5).unwrap(), &b).unwrap();
            assert!(r.passed, "{:?}", r.failures);
            assert!(r.checked > 0);
        }
        let err = verify_index2_lemma(
            &named(Family::B0, 5).unwrap(),
            &named(Family::Cs, 5).unwrap(),
            &b,
        );
        assert!(matches!(err, Err(Error::NotIndexTwo { .. })));
    }

    #[test]
    fn containment_small_primes() {
        let b = Budget::default();
        for p in [3u64, 5, 7] {
            for part in LemmaCase::ALL {
                let r = verify_conjugate_containment(p, part, &b).unwrap();
                assert!(r.passed, "p={p} {part:?}: {:?}", r.failures);
            }
        }
        let r = verify_conjugate_containment(5, LemmaCase::A, &b).unwrap();
        assert_eq!(
            r.details["gamma_z"]["search"],
            json!((1..=24).filter(|k| k % 4 == 0).collect::<Vec<u64>>())
        );
        let r = verify_conjugate_containment(7, LemmaCase::C, &b).unwrap();
        let nns: Vec<u64> = serde_json::from_value(r.details["nns"]["search"].clone()).unwrap();
        assert!(!nns.contains(&2));
        let r = verify_conjugate_containment(7, LemmaCase::D, &b).unwrap();
        let cns: Vec<u64> = serde_json::from_value(r.details["gamma_z"]["search"].clone()).unwrap();
        assert!(cns.contains(&8));
        assert_eq!(nonsplit_power(7, 8).unwrap(), named(Family::Z, 7).unwrap());
    }

    #[test]
    fn abelian_shapes_small_primes() {
        for p in [3u64, 5] {
            let r = verify_abelian_shapes(p, &Budget::default()).unwrap();
            assert!(r.passed, "p={p}: {:?}", r.failures);
        }
    }

    #[test]
    fn trivial_sl2_examples() {
        let b = Budget::default();
        let r = verify_trivial_sl2_part(5, 1, &b).unwrap();
        assert!(r.passed && r.details["exhaustive"] == json!(true));
        let r = verify_trivial_sl2_part(6, 7, &b).unwrap();
        assert!(r.passed, "{:?}", r.failures);
        let g = Subgroup::cyclic(&Mat2::gamma(6).unwrap()).unwrap();
        assert_eq!(g.sl2_intersection(), g);
        let d = named(Family::D, 7).unwrap();
        assert_eq!(d.sl2_intersection().order(), 1);
        assert!(d.is_abelian());
    }

    #[test]
    fn sampling_is_seeded() {
        assert_eq!(
            sample_subgroups(9, 3, 20).unwrap(),
            sample_subgroups(9, 3, 20).unwrap()
        );
    }
}
