//! Finite subgroups of GL2(Z/nZ) stored as explicit, sorted element sets.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Moduli up to this bound get a dense membership bitmap over all `n^4` codes.
const BITMAP_MAX_MODULUS: u64 = 32;

/// Canonical identity of a subgroup: its sorted element encodings joined by `;`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubgroupKey(pub String);

impl fmt::Display for SubgroupKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

enum Membership {
    Bitmap(Vec<u64>),
    Sorted,
}

pub struct Subgroup {
    modulus: u64,
    generators: Vec<Mat2>,
    elements: Vec<Mat2>,
    membership: OnceLock<Membership>,
    histogram: OnceLock<BTreeMap<u64, u64>>,
}

impl Clone for Subgroup {
    fn clone(&self) -> Self {
        Self::from_parts(self.modulus, self.generators.clone(), self.elements.clone())
    }
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.modulus == other.modulus && self.elements == other.elements
    }
}

impl Eq for Subgroup {}

impl Hash for Subgroup {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.modulus.hash(state);
        self.elements.hash(state);
    }
}

/// Ordered by modulus, then lexicographically by sorted element list.
impl Ord for Subgroup {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.modulus, &self.elements).cmp(&(other.modulus, &other.elements))
    }
}

impl PartialOrd for Subgroup {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subgroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Subgroup(mod {}, order {}, gens [",
            self.modulus,
            self.order()
        )?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("])")
    }
}

fn check_same_modulus(n: u64, x: &Mat2) -> Result<()> {
    if x.modulus() == n {
        Ok(())
    } else {
        Err(Error::ModulusMismatch {
            left: n as u32,
            right: x.modulus() as u32,
        })
    }
}

impl Subgroup {
    /// Trusted constructor: `elements` must be a group, generated by `generators`.
    pub(crate) fn from_parts(modulus: u64, generators: Vec<Mat2>, mut elements: Vec<Mat2>) -> Self {
        elements.sort_unstable();
        elements.dedup();
        Self {
            modulus,
            generators,
            elements,
            membership: OnceLock::new(),
            histogram: OnceLock::new(),
        }
    }

    pub fn trivial(n: u64) -> Result<Self> {
        let i = Mat2::identity(n)?;
        Ok(Self::from_parts(n, Vec::new(), vec![i]))
    }

    /// Smallest subgroup containing `gens`, by breadth-first product closure.
    pub fn closure(n: u64, gens: &[Mat2]) -> Result<Self> {
        let identity = Mat2::identity(n)?;
        for g in gens {
            check_same_modulus(n, g)?;
            if !g.is_invertible() {
                return Err(Error::NotInvertible(g.to_string()));
            }
        }
        let gens: Vec<Mat2> = gens.to_vec();
        let mut seen: HashSet<Mat2> = HashSet::from([identity]);
        let mut elements = vec![identity];
        let mut i = 0;
        while i < elements.len() {
            let x = elements[i];
            i += 1;
            for g in &gens {
                let y = x.mul_unchecked(g);
                if seen.insert(y) {
                    elements.push(y);
                }
            }
        }
        Ok(Self::from_parts(n, gens, elements))
    }

    /// Cyclic subgroup generated by one element, by listing its powers.
    pub fn cyclic(x: &Mat2) -> Result<Self> {
        let n = x.modulus();
        if !x.is_invertible() {
            return Err(Error::NotInvertible(x.to_string()));
        }
        let mut elements = vec![Mat2::identity(n)?];
        let mut y = *x;
        while !y.is_identity() {
            elements.push(y);
            y = y.mul_unchecked(x);
        }
        Ok(Self::from_parts(n, vec![*x], elements))
    }

    /// Validates an explicit element set: nonempty, one modulus, contains
    /// the identity, closed under products (hence inverses, being finite).
    pub fn from_elements(n: u64, elements: &[Mat2]) -> Result<Self> {
        let identity = Mat2::identity(n)?;
        for x in elements {
            check_same_modulus(n, x)?;
            if !x.is_invertible() {
                return Err(Error::NotInvertible(x.to_string()));
            }
        }
        let set: BTreeSet<Mat2> = elements.iter().copied().collect();
        if !set.contains(&identity) {
            return Err(Error::NotSubgroup("identity missing".into()));
        }
        // Greedy generating set; the closure must reproduce the set exactly.
        let mut gens = Vec::new();
        let mut current = Self::trivial(n)?;
        for x in &set {
            if !current.contains_element(x) {
                gens.push(*x);
                current = Self::closure(n, &gens)?;
                if current.order() > set.len() {
                    return Err(Error::NotSubgroup(format!(
                        "not closed: generated by {x} exceeds the set"
                    )));
                }
            }
        }
        if current.elements.len() != set.len() {
            return Err(Error::NotSubgroup("not closed under multiplication".into()));
        }
        Ok(current)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn generators(&self) -> &[Mat2] {
        &self.generators
    }

    /// Elements in ascending lexicographic order.
    pub fn elements(&self) -> &[Mat2] {
        &self.elements
    }

    pub fn key(&self) -> SubgroupKey {
        let mut s = String::with_capacity(self.elements.len() * 10);
        for (i, x) in self.elements.iter().enumerate() {
            if i > 0 {
                s.push(';');
            }
            s.push_str(&x.to_string());
        }
        SubgroupKey(s)
    }

    /// Inverse of [`Subgroup::key`]; the result is re-validated as a subgroup.
    pub fn from_key(n: u64, key: &str) -> Result<Self> {
        let elements = key
            .split(';')
            .map(|s| crate::mat2::parse_mat2(n, s))
            .collect::<Result<Vec<_>>>()?;
        Self::from_elements(n, &elements)
    }

    fn membership(&self) -> &Membership {
        self.membership.get_or_init(|| {
            if self.modulus <= BITMAP_MAX_MODULUS {
                let size = self.modulus.pow(4) as usize;
                let mut bits = vec![0u64; size.div_ceil(64)];
                for x in &self.elements {
                    let c = x.code() as usize;
                    bits[c / 64] |= 1 << (c % 64);
                }
                Membership::Bitmap(bits)
            } else {
                Membership::Sorted
            }
        })
    }

    #[inline]
    pub fn contains_element(&self, x: &Mat2) -> bool {
        if x.modulus() != self.modulus {
            return false;
        }
        match self.membership() {
            Membership::Bitmap(bits) => {
                let c = x.code() as usize;
                bits[c / 64] & (1 << (c % 64)) != 0
            }
            Membership::Sorted => self.elements.binary_search(x).is_ok(),
        }
    }

    /// `other ⊆ self`.
    pub fn contains(&self, other: &Subgroup) -> Result<bool> {
        self.check_modulus(other)?;
        Ok(
            other.order() <= self.order()
                && other.elements.iter().all(|x| self.contains_element(x)),
        )
    }

    fn check_modulus(&self, other: &Subgroup) -> Result<()> {
        if self.modulus == other.modulus {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.modulus as u32,
                right: other.modulus as u32,
            })
        }
    }

    pub fn intersect(&self, other: &Subgroup) -> Result<Subgroup> {
        self.check_modulus(other)?;
        let (small, large) = if self.order() <= other.order() {
            (self, other)
        } else {
            (other, self)
        };
        let elements: Vec<Mat2> = small
            .elements
            .iter()
            .copied()
            .filter(|x| large.contains_element(x))
            .collect();
        Ok(Self::with_generated_gens(self.modulus, elements))
    }

    /// Builds a trusted subgroup from a set known to be a group and picks a
    /// small generating set for it.
    pub(crate) fn with_generated_gens(n: u64, mut elements: Vec<Mat2>) -> Subgroup {
        elements.sort_unstable();
        elements.dedup();
        let gens = greedy_generators(n, &elements);
        Self::from_parts(n, gens, elements)
    }

    /// `{x in G : det x = 1}`, the kernel of det restricted to `G`.
    pub fn sl2_intersection(&self) -> Subgroup {
        let one = 1 % self.modulus;
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(|x| x.det() == one)
            .collect();
        Self::with_generated_gens(self.modulus, elements)
    }

    /// `G ∩ Z`, the scalar matrices in `G`.
    pub fn scalar_part(&self) -> Subgroup {
        let elements = self
            .elements
            .iter()
            .copied()
            .filter(Mat2::is_scalar)
            .collect();
        Self::with_generated_gens(self.modulus, elements)
    }

    /// Image of a diagonal subgroup under `diag(a, d) -> diag(d, a)`.
    pub fn flip_subgroup(&self) -> Result<Subgroup> {
        let elements = self
            .elements
            .iter()
            .map(Mat2::flip)
            .collect::<Result<Vec<_>>>()?;
        let gens = self
            .generators
            .iter()
            .map(Mat2::flip)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(self.modulus, gens, elements))
    }

    /// Diagonal parts of an upper-triangular subgroup.
    pub fn semisimplify(&self) -> Result<Subgroup> {
        let elements = self
            .elements
            .iter()
            .map(Mat2::diagonal_part)
            .collect::<Result<Vec<_>>>()?;
        let gens = self
            .generators
            .iter()
            .map(Mat2::diagonal_part)
            .collect::<Result<Vec<_>>>()?;
        let ss = Self::from_parts(self.modulus, gens, elements);
        // Projection to the diagonal is a homomorphism on B0, so the image is a group.
        debug_assert!(ss.is_closed());
        Ok(ss)
    }

    /// `m G m^-1`.
    pub fn conjugate_by(&self, m: &Mat2) -> Result<Subgroup> {
        check_same_modulus(self.modulus, m)?;
        let m_inv = m.inv()?;
        let conj = |x: &Mat2| m.mul_unchecked(x).mul_unchecked(&m_inv);
        let elements = self.elements.iter().map(conj).collect();
        let gens = self.generators.iter().map(conj).collect();
        Ok(Self::from_parts(self.modulus, gens, elements))
    }

    /// Counts of elements by element order.
    pub fn order_histogram(&self) -> &BTreeMap<u64, u64> {
        self.histogram.get_or_init(|| {
            let mut h = BTreeMap::new();
            for x in &self.elements {
                let k = x.element_order().expect("group elements are invertible");
                *h.entry(k).or_insert(0) += 1;
            }
            h
        })
    }

    /// Sorted image of det on the group.
    pub fn det_image(&self) -> Vec<u64> {
        let image: BTreeSet<u64> = self.elements.iter().map(Mat2::det).collect();
        image.into_iter().collect()
    }

    pub fn is_abelian(&self) -> bool {
        let gens = if self.generators.is_empty() {
            &self.elements
        } else {
            &self.generators
        };
        gens.iter().enumerate().all(|(i, x)| {
            gens[i + 1..]
                .iter()
                .all(|y| x.mul_unchecked(y) == y.mul_unchecked(x))
        })
    }

    pub fn is_cyclic(&self) -> bool {
        let order = self.order() as u64;
        self.order_histogram().contains_key(&order)
    }

    /// Closure under products, checked directly on the element set.
    pub fn is_closed(&self) -> bool {
        self.elements.iter().all(|x| {
            self.elements
                .iter()
                .all(|y| self.contains_element(&x.mul_unchecked(y)))
        })
    }

    /// A generator of a cyclic subgroup: its lexicographically least element
    /// of maximal order.
    pub fn cyclic_generator(&self) -> Option<Mat2> {
        let order = self.order() as u64;
        self.elements
            .iter()
            .copied()
            .find(|x| x.element_order().ok() == Some(order))
    }

    /// `G` acts on itself; the element-order histogram must divide `|ambient|`.
    pub fn order_divides(&self, ambient_order: u64) -> bool {
        ambient_order.is_multiple_of(self.order() as u64)
    }

    /// Multiset of conjugacy-class invariants (meaningful for prime moduli).
    pub fn class_profile(&self) -> BTreeMap<crate::mat2::ClassInvariant, u64> {
        let mut profile = BTreeMap::new();
        for x in &self.elements {
            *profile.entry(x.class_invariant()).or_insert(0) += 1;
        }
        profile
    }

    /// `|G| / gcd` style helper used by the verifier: number of scalar elements.
    pub fn scalar_count(&self) -> usize {
        self.elements.iter().filter(|x| x.is_scalar()).count()
    }

    pub fn is_sorted_unique(&self) -> bool {
        self.elements.windows(2).all(|w| w[0] < w[1])
    }

    /// Whether every element is a unit (always true for constructed subgroups).
    pub fn all_invertible(&self) -> bool {
        self.elements
            .iter()
            .all(|x| arith::gcd(x.det(), self.modulus) == 1)
    }
}

/// Greedy generating set: walk the elements from highest order down and keep
/// any element not already generated.
pub(crate) fn greedy_generators(n: u64, elements: &[Mat2]) -> Vec<Mat2> {
    let mut by_order: Vec<(u64, Mat2)> = elements
        .iter()
        .map(|x| (x.element_order().unwrap_or(1), *x))
        .collect();
    by_order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut gens = Vec::new();
    let mut generated: HashSet<Mat2> = HashSet::new();
    if let Ok(i) = Mat2::identity(n) {
        generated.insert(i);
    }
    for (_, x) in by_order {
        if generated.len() == elements.len() {
            break;
        }
        if !generated.contains(&x) {
            gens.push(x);
            if let Ok(g) = Subgroup::closure(n, &gens) {
                generated = g.elements.iter().copied().collect();
            }
        }
    }
    gens
}
