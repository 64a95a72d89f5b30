use proptest::prelude::*;

use gl2lab::classify::Classifier;
use gl2lab::lattice::enumerate_subgroups;
use gl2lab::mat2::gl2_iter;
use gl2lab::scan::{scan_classes, ScanMode, ScanParams};
use gl2lab::standard::{epsilon, named, Family};
use gl2lab::{Mat2, Subgroup};

const PRIMES: [u64; 5] = [3, 5, 7, 11, 13];

fn unit(p: u64) -> impl Strategy<Value = Mat2> {
    (0..p, 0..p, 0..p, 0..p)
        .prop_filter("invertible", move |&(a, b, c, d)| {
            !(a * d + p * p - b * c).is_multiple_of(p)
        })
        .prop_map(move |(a, b, c, d)| Mat2::new(p, a as i64, b as i64, c as i64, d as i64).unwrap())
}

fn prime_and_units(k: usize) -> impl Strategy<Value = (u64, Vec<Mat2>)> {
    prop::sample::select(PRIMES.to_vec())
        .prop_flat_map(move |p| (Just(p), prop::collection::vec(unit(p), k)))
}

fn diagonal(p: u64) -> impl Strategy<Value = Mat2> {
    (1..p, 1..p).prop_map(move |(a, d)| Mat2::diag(p, a as i64, d as i64).unwrap())
}

fn upper(p: u64) -> impl Strategy<Value = Mat2> {
    (1..p, 0..p, 1..p)
        .prop_map(move |(a, b, d)| Mat2::new(p, a as i64, b as i64, 0, d as i64).unwrap())
}

fn with_gens<S: Strategy<Value = Mat2>>(
    gen: fn(u64) -> S,
) -> impl Strategy<Value = (u64, Vec<Mat2>)> {
    prop::sample::select(PRIMES.to_vec())
        .prop_flat_map(move |p| (Just(p), prop::collection::vec(gen(p), 1..3)))
}

fn tags(c: &Classifier, g: &Subgroup) -> Vec<gl2lab::classify::ShapeTag> {
    c.classify(g).unwrap().tags()
}

proptest! {
    #[test]
    fn multiplication_is_associative((_, m) in prime_and_units(3)) {
        let (x, y, z) = (m[0], m[1], m[2]);
        prop_assert_eq!(x.mul(&y).unwrap().mul(&z).unwrap(), x.mul(&y.mul(&z).unwrap()).unwrap());
    }

    #[test]
    fn det_is_multiplicative(n in prop::sample::select(vec![3u64, 4, 6, 9, 12, 13]), e in prop::collection::vec(0i64..13, 8)) {
        let x = Mat2::new(n, e[0], e[1], e[2], e[3]).unwrap();
        let y = Mat2::new(n, e[4], e[5], e[6], e[7]).unwrap();
        prop_assert_eq!(x.mul(&y).unwrap().det(), x.det() * y.det() % n);
    }

    #[test]
    fn conjugation_preserves_invariants((_, m) in prime_and_units(2)) {
        let (g, x) = (m[0], m[1]);
        let y = Mat2::conjugate(&g, &x).unwrap();
        prop_assert_eq!(y.det(), x.det());
        prop_assert_eq!(y.trace(), x.trace());
        prop_assert_eq!(y.element_order().unwrap(), x.element_order().unwrap());
        prop_assert_eq!(y.class_invariant(), x.class_invariant());
    }

    /// m diag(g^k, 1) m^-1 against the entrywise closed form, computed in
    /// plain integers.
    #[test]
    fn semi_cartan_conjugation_formula((p, m) in prime_and_units(1), k in 1u64..200) {
        let g = gl2lab::arith::least_primitive_root(p).unwrap();
        let gk = gl2lab::arith::mod_pow(g, k, p) as i128;
        let [a, b, c, d] = m[0].entries().map(|x| x as i128);
        let pi = p as i128;
        let det = (a * d - b * c).rem_euclid(pi);
        let inv = (1..pi).find(|t| det * t % pi == 1).unwrap();
        let entries = [a * d * gk - b * c, -a * b * (gk - 1), c * d * (gk - 1), a * d - b * c * gk]
            .map(|x| ((x * inv).rem_euclid(pi)) as i64);
        let expected = Mat2::new(p, entries[0], entries[1], entries[2], entries[3]).unwrap();
        let n = Mat2::diag(p, gk as i64, 1).unwrap();
        prop_assert_eq!(Mat2::conjugate(&m[0], &n).unwrap(), expected);
    }

    #[test]
    fn flip_is_an_involution((p, gens) in with_gens(diagonal)) {
        let h = Subgroup::closure(p, &gens).unwrap();
        prop_assert_eq!(h.flip_subgroup().unwrap().flip_subgroup().unwrap(), h.clone());
        for x in h.elements() {
            prop_assert_eq!(x.flip().unwrap().flip().unwrap(), *x);
        }
    }

    #[test]
    fn semisimplification_is_idempotent((p, gens) in with_gens(upper)) {
        let h = Subgroup::closure(p, &gens).unwrap();
        let ss = h.semisimplify().unwrap();
        prop_assert!(named(Family::Cs, p).unwrap().contains(&ss).unwrap());
        prop_assert_eq!(ss.semisimplify().unwrap(), ss);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn labels_are_conjugation_invariant((p, m) in prime_and_units(3), two in any::<bool>()) {
        let gens = if two { vec![m[0], m[1]] } else { vec![m[0]] };
        let g = Subgroup::closure(p, &gens).unwrap();
        let c = Classifier::new(p).unwrap();
        prop_assert_eq!(tags(&c, &g), tags(&c, &g.conjugate_by(&m[2]).unwrap()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    /// Conjugating every candidate class leaves each class's admissibility
    /// and conclusion unchanged.
    #[test]
    fn scan_flags_are_conjugation_invariant(m in unit(17), abelian in any::<bool>()) {
        let mode = if abelian { ScanMode::Abelian } else { ScanMode::Cyclotomic };
        let params = ScanParams::new(mode, 17, 1, false);
        let family = gl2lab::scan::family_for(mode);
        let classes = gl2lab::cache::Cache::derive(family, 17, &params.budget).unwrap();
        let moved: Vec<_> = classes
            .iter()
            .map(|c| gl2lab::abelian::AbelianClass { group: c.group.conjugate_by(&m).unwrap(), shapes: c.shapes.clone() })
            .collect();
        let a = scan_classes(&params, classes).unwrap();
        let b = scan_classes(&params, moved).unwrap();
        prop_assert_eq!(a.totals, b.totals);
        for (x, y) in a.classes.iter().zip(&b.classes) {
            prop_assert_eq!(&x.exclusion, &y.exclusion);
            prop_assert_eq!(x.admissible, y.admissible);
            prop_assert_eq!(x.conclusion_ok, y.conclusion_ok);
            let tx: Vec<_> = x.constraints_met.iter().map(|h| h.constraint).collect();
            let ty: Vec<_> = y.constraints_met.iter().map(|h| h.constraint).collect();
            prop_assert_eq!(tx, ty);
        }
    }
}

#[test]
fn labels_are_conjugation_invariant_exhaustively_at_3() {
    let p = 3;
    let c = Classifier::new(p).unwrap();
    let all = enumerate_subgroups(&named(Family::GL2, p).unwrap(), &Default::default()).unwrap();
    let units: Vec<Mat2> = gl2_iter(p).unwrap().collect();
    for g in &all {
        let t = tags(&c, g);
        for m in &units {
            assert_eq!(t, tags(&c, &g.conjugate_by(m).unwrap()), "{g:?} by {m}");
        }
    }
}

#[test]
fn flip_and_semisimplification_exhaustively_at_3() {
    let p = 3;
    for h in enumerate_subgroups(&named(Family::B0, p).unwrap(), &Default::default()).unwrap() {
        let ss = h.semisimplify().unwrap();
        assert_eq!(ss.semisimplify().unwrap(), ss);
        assert_eq!(ss.flip_subgroup().unwrap().flip_subgroup().unwrap(), ss);
    }
    for x in gl2_iter(p).unwrap() {
        for y in gl2_iter(p).unwrap() {
            assert_eq!(x.mul(&y).unwrap().det(), x.det() * y.det() % p);
        }
    }
}

#[test]
fn epsilon_generates_the_units() {
    for p in PRIMES {
        let e = epsilon(p).unwrap();
        assert_eq!(gl2lab::arith::unit_order(e, p), Some(p - 1));
    }
}

#[test]
fn results_do_not_depend_on_worker_count() {
    let run = |threads| {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap();
        pool.install(|| {
            let lattice: Vec<String> =
                enumerate_subgroups(&named(Family::GL2, 5).unwrap(), &Default::default())
                    .unwrap()
                    .iter()
                    .map(|g| g.key().to_string())
                    .collect();
            let mut report =
                gl2lab::scan::scan(&ScanParams::new(ScanMode::Abelian, 17, 1, false)).unwrap();
            report.elapsed_ms = 0;
            (lattice, serde_json::to_string(&report).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}
