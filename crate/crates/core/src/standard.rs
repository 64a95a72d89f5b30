//! The named subgroups of GL2(p): Cartan groups and their normalizers, the
//! Borel group, semi-Cartan powers, scalars, `<gamma, Z>`, SL2 and GL2.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::arith;
use crate::error::{Error, Result};
use crate::mat2::{gl2_iter, Mat2};
use crate::subgroup::Subgroup;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Cs,
    Ns,
    Cns,
    Nns,
    B0,
    D,
    Z,
    GammaZ,
    SL2,
    GL2,
}

impl Family {
    pub const ALL: [Family; 10] = [
        Family::Cs,
        Family::Ns,
        Family::Cns,
        Family::Nns,
        Family::B0,
        Family::D,
        Family::Z,
        Family::GammaZ,
        Family::SL2,
        Family::GL2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Cs => "Cs",
            Family::Ns => "Ns",
            Family::Cns => "Cns",
            Family::Nns => "Nns",
            Family::B0 => "B0",
            Family::D => "D",
            Family::Z => "Z",
            Family::GammaZ => "GammaZ",
            Family::SL2 => "SL2",
            Family::GL2 => "GL2",
        }
    }

    fn takes_power(self) -> bool {
        matches!(self, Family::D | Family::Cns)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidKind(s.to_string()))
    }
}

/// A named subgroup of GL2(p), optionally raised to a power (`D^k`, `Cns^k`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StandardKind {
    pub family: Family,
    pub p: u64,
    pub power: Option<u64>,
}

impl StandardKind {
    pub fn new(family: Family, p: u64) -> Self {
        Self {
            family,
            p,
            power: None,
        }
    }

    pub fn with_power(family: Family, p: u64, k: u64) -> Self {
        Self {
            family,
            p,
            power: Some(k),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 3 || !arith::is_prime(self.p) {
            return Err(Error::NotOddPrime(self.p));
        }
        match self.power {
            Some(0) => Err(Error::InvalidKind(format!(
                "{}^0: power must be >= 1",
                self.family
            ))),
            Some(_) if !self.family.takes_power() => Err(Error::InvalidKind(format!(
                "{} does not take a power",
                self.family
            ))),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for StandardKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.power {
            Some(k) => write!(f, "{}({})^{}", self.family, self.p, k),
            None => write!(f, "{}({})", self.family, self.p),
        }
    }
}

/// The least positive integer generating `F_p^×`; this is the ε used in the
/// nonsplit Cartan group.
pub fn epsilon(p: u64) -> Result<u64> {
    if p < 3 || !arith::is_prime(p) {
        return Err(Error::NotOddPrime(p));
    }
    Ok(arith::least_primitive_root(p).expect("primes have primitive roots"))
}

/// `[[a, b ε], [b, a]]`.
pub fn nonsplit_element(p: u64, a: u64, b: u64) -> Result<Mat2> {
    let eps = epsilon(p)?;
    Mat2::new(p, a as i64, (b * eps % p) as i64, b as i64, a as i64)
}

/// Generator of the cyclic group `Cns(p)`: the lexicographically first
/// `[[a, bε], [b, a]]` of order `p^2 - 1`.
pub fn nonsplit_generator(p: u64) -> Result<Mat2> {
    let target = p * p - 1;
    for a in 0..p {
        for b in 1..p {
            let x = nonsplit_element(p, a, b)?;
            if x.is_invertible() && x.element_order()? == target {
                return Ok(x);
            }
        }
    }
    unreachable!("the nonsplit Cartan group is cyclic")
}

fn collect(p: u64, gens: Vec<Mat2>, pred: impl Fn(&Mat2) -> bool) -> Result<Subgroup> {
    let elements: Vec<Mat2> = gl2_iter(p)?.filter(|x| pred(x)).collect();
    Ok(Subgroup::from_parts(p, gens, elements))
}

/// Exact element set of the named group.
pub fn standard(kind: StandardKind) -> Result<Subgroup> {
    kind.validate()?;
    let p = kind.p;
    let g = arith::least_primitive_root(p).expect("prime") as i64;
    let diag = |a: i64, d: i64| Mat2::diag(p, a, d);
    let group = match kind.family {
        Family::Cs => Subgroup::from_parts(p, vec![diag(g, 1)?, diag(1, g)?], diagonal_units(p)?),
        Family::Ns => {
            let mut elements = diagonal_units(p)?;
            elements.extend(antidiagonal_units(p)?);
            Subgroup::from_parts(p, vec![diag(g, 1)?, diag(1, g)?, Mat2::swap(p)?], elements)
        }
        Family::Cns => {
            let gen = nonsplit_generator(p)?;
            let gen = gen.pow(kind.power.unwrap_or(1));
            Subgroup::cyclic(&gen)?
        }
        Family::Nns => {
            let mut elements = nonsplit_units(p)?;
            let reflection = diag(1, -1)?;
            let coset: Vec<Mat2> = elements
                .iter()
                .map(|x| reflection.mul_unchecked(x))
                .collect();
            elements.extend(coset);
            Subgroup::from_parts(p, vec![nonsplit_generator(p)?, reflection], elements)
        }
        Family::B0 => collect(
            p,
            vec![diag(g, 1)?, diag(1, g)?, Mat2::gamma(p)?],
            Mat2::is_upper_triangular,
        )?,
        Family::D => {
            let gen = diag(g, 1)?.pow(kind.power.unwrap_or(1));
            Subgroup::cyclic(&gen)?
        }
        Family::Z => Subgroup::cyclic(&Mat2::scalar(p, g)?)?,
        Family::GammaZ => {
            let elements: Vec<Mat2> = (1..p)
                .flat_map(|x| {
                    (0..p).map(move |y| Mat2::new(p, x as i64, (x * y) as i64, 0, x as i64))
                })
                .collect::<Result<_>>()?;
            Subgroup::from_parts(p, vec![Mat2::gamma(p)?, Mat2::scalar(p, g)?], elements)
        }
        Family::SL2 => collect(
            p,
            vec![Mat2::gamma(p)?, Mat2::new(p, 1, 0, 1, 1)?],
            Mat2::is_in_sl2,
        )?,
        Family::GL2 => collect(p, vec![diag(g, 1)?, Mat2::new(p, -1, 1, -1, 0)?], |_| true)?,
    };
    Ok(group)
}

/// Shorthand for `standard(StandardKind::new(family, p))`.
pub fn named(family: Family, p: u64) -> Result<Subgroup> {
    standard(StandardKind::new(family, p))
}

/// `D(p)^k`.
pub fn semi_cartan_power(p: u64, k: u64) -> Result<Subgroup> {
    standard(StandardKind::with_power(Family::D, p, k))
}

/// `Cns(p)^k`.
pub fn nonsplit_power(p: u64, k: u64) -> Result<Subgroup> {
    standard(StandardKind::with_power(Family::Cns, p, k))
}

/// Expected order of each named group, from the closed-form counts.
pub fn expected_order(kind: StandardKind) -> u64 {
    let p = kind.p;
    let k = kind.power.unwrap_or(1);
    match kind.family {
        Family::Cs => (p - 1) * (p - 1),
        Family::Ns => 2 * (p - 1) * (p - 1),
        Family::Cns => (p * p - 1) / arith::gcd(k, p * p - 1),
        Family::Nns => 2 * (p * p - 1),
        Family::B0 => p * (p - 1) * (p - 1),
        Family::D => (p - 1) / arith::gcd(k, p - 1),
        Family::Z => p - 1,
        Family::GammaZ => p * (p - 1),
        Family::SL2 => p * (p * p - 1),
        Family::GL2 => (p * p - 1) * (p * p - p),
    }
}

fn diagonal_units(p: u64) -> Result<Vec<Mat2>> {
    (1..p)
        .flat_map(|a| (1..p).map(move |d| Mat2::diag(p, a as i64, d as i64)))
        .collect()
}

fn antidiagonal_units(p: u64) -> Result<Vec<Mat2>> {
    (1..p)
        .flat_map(|b| (1..p).map(move |c| Mat2::new(p, 0, b as i64, c as i64, 0)))
        .collect()
}

fn nonsplit_units(p: u64) -> Result<Vec<Mat2>> {
    let mut out = Vec::with_capacity((p * p - 1) as usize);
    for a in 0..p {
        for b in 0..p {
            if a == 0 && b == 0 {
                continue;
            }
            out.push(nonsplit_element(p, a, b)?);
        }
    }
    Ok(out)
}
