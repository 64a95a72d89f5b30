//! 2x2 matrices over Z/nZ.
//!
//! Entries are always stored as reduced residues, so equality is entry-wise
//! and the derived ordering is the lexicographic order on `(a, b, c, d)`.
//! That order coincides with the numeric order of [`Mat2::code`].

use std::fmt;
use std::str::FromStr;

use crate::arith;
use crate::error::{Error, Result};

/// Largest supported modulus. Keeps every intermediate product inside `u64`
/// and every code `a*n^3 + b*n^2 + c*n + d` inside `u64`.
pub const MAX_MODULUS: u64 = 1 << 15;

/// Row-major matrix `[[a, b], [c, d]]` with entries in `[0, n)`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2 {
    n: u32,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
}

fn check_modulus(n: u64) -> Result<u32> {
    if (2..=MAX_MODULUS).contains(&n) {
        Ok(n as u32)
    } else {
        Err(Error::InvalidModulus(n))
    }
}

impl Mat2 {
    /// Builds a matrix, reducing each (possibly negative) entry mod `n`.
    pub fn new(n: u64, a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        let m = check_modulus(n)? as i64;
        let r = |x: i64| x.rem_euclid(m) as u32;
        Ok(Self {
            n: m as u32,
            a: r(a),
            b: r(b),
            c: r(c),
            d: r(d),
        })
    }

    /// Entries already known to be reduced. Internal fast path.
    pub(crate) fn from_reduced(n: u32, a: u32, b: u32, c: u32, d: u32) -> Self {
        debug_assert!(a < n && b < n && c < n && d < n);
        Self { n, a, b, c, d }
    }

    pub fn identity(n: u64) -> Result<Self> {
        Self::new(n, 1, 0, 0, 1)
    }

    pub fn diag(n: u64, a: i64, d: i64) -> Result<Self> {
        Self::new(n, a, 0, 0, d)
    }

    pub fn scalar(n: u64, x: i64) -> Result<Self> {
        Self::new(n, x, 0, 0, x)
    }

    /// The unipotent `[[1, 1], [0, 1]]`.
    pub fn gamma(n: u64) -> Result<Self> {
        Self::new(n, 1, 1, 0, 1)
    }

    /// The antidiagonal involution `[[0, 1], [1, 0]]`.
    pub fn swap(n: u64) -> Result<Self> {
        Self::new(n, 0, 1, 1, 0)
    }

    pub fn modulus(&self) -> u64 {
        self.n as u64
    }

    pub fn entries(&self) -> [u64; 4] {
        [self.a as u64, self.b as u64, self.c as u64, self.d as u64]
    }

    /// Position of this matrix in the lexicographic enumeration of all
    /// `n^4` matrices.
    pub fn code(&self) -> u64 {
        let n = self.n as u64;
        ((self.a as u64 * n + self.b as u64) * n + self.c as u64) * n + self.d as u64
    }

    pub fn from_code(n: u64, code: u64) -> Result<Self> {
        let m = check_modulus(n)? as u64;
        if code >= m.pow(4) {
            return Err(Error::Parse {
                what: "matrix code",
                input: code.to_string(),
            });
        }
        let d = code % m;
        let c = (code / m) % m;
        let b = (code / (m * m)) % m;
        let a = code / (m * m * m);
        Ok(Self::from_reduced(
            m as u32, a as u32, b as u32, c as u32, d as u32,
        ))
    }

    fn same_modulus(&self, other: &Self) -> Result<()> {
        if self.n == other.n {
            Ok(())
        } else {
            Err(Error::ModulusMismatch {
                left: self.n,
                right: other.n,
            })
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.same_modulus(other)?;
        Ok(self.mul_unchecked(other))
    }

    /// Product without the modulus check; callers guarantee equal moduli.
    #[inline]
    pub(crate) fn mul_unchecked(&self, y: &Self) -> Self {
        debug_assert_eq!(self.n, y.n);
        let n = self.n as u64;
        let (a, b, c, d) = (self.a as u64, self.b as u64, self.c as u64, self.d as u64);
        let (e, f, g, h) = (y.a as u64, y.b as u64, y.c as u64, y.d as u64);
        Self {
            n: self.n,
            a: ((a * e + b * g) % n) as u32,
            b: ((a * f + b * h) % n) as u32,
            c: ((c * e + d * g) % n) as u32,
            d: ((c * f + d * h) % n) as u32,
        }
    }

    pub fn det(&self) -> u64 {
        let n = self.n as u64;
        let ad = self.a as u64 * self.d as u64 % n;
        let bc = self.b as u64 * self.c as u64 % n;
        (ad + n - bc) % n
    }

    pub fn trace(&self) -> u64 {
        (self.a as u64 + self.d as u64) % self.n as u64
    }

    pub fn is_invertible(&self) -> bool {
        arith::gcd(self.det(), self.n as u64) == 1
    }

    pub fn is_identity(&self) -> bool {
        self.a == 1 % self.n && self.b == 0 && self.c == 0 && self.d == 1 % self.n
    }

    pub fn is_in_sl2(&self) -> bool {
        self.det() == 1 % self.n as u64
    }

    pub fn is_scalar(&self) -> bool {
        self.b == 0 && self.c == 0 && self.a == self.d
    }

    pub fn is_diagonal(&self) -> bool {
        self.b == 0 && self.c == 0
    }

    pub fn is_antidiagonal(&self) -> bool {
        self.a == 0 && self.d == 0
    }

    pub fn is_upper_triangular(&self) -> bool {
        self.c == 0
    }

    pub fn inv(&self) -> Result<Self> {
        let n = self.n as u64;
        let det_inv =
            arith::mod_inv(self.det(), n).ok_or_else(|| Error::NotInvertible(self.to_string()))?;
        let s = |x: u32| (x as u64 * det_inv % n) as u32;
        let neg = |x: u32| if x == 0 { 0 } else { self.n - x };
        Ok(Self {
            n: self.n,
            a: s(self.d),
            b: s(neg(self.b)),
            c: s(neg(self.c)),
            d: s(self.a),
        })
    }

    /// `self^k` by square-and-multiply; `k = 0` gives the identity.
    pub fn pow(&self, mut k: u64) -> Self {
        let mut base = *self;
        let mut acc = Self::from_reduced(self.n, 1 % self.n, 0, 0, 1 % self.n);
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul_unchecked(&base);
            }
            base = base.mul_unchecked(&base);
            k >>= 1;
        }
        acc
    }

    /// Least `k >= 1` with `self^k = I`, by iterated multiplication.
    pub fn element_order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let mut x = *self;
        let mut k = 1;
        while !x.is_identity() {
            x = x.mul_unchecked(self);
            k += 1;
        }
        Ok(k)
    }

    /// Least `k >= 1` with `self^k` scalar: the order of the image in PGL2.
    pub fn projective_order(&self) -> Result<u64> {
        if !self.is_invertible() {
            return Err(Error::NotInvertible(self.to_string()));
        }
        let mut x = *self;
        let mut k = 1;
        while !x.is_scalar() {
            x = x.mul_unchecked(self);
            k += 1;
        }
        Ok(k)
    }

    /// `m * x * m^-1`.
    pub fn conjugate(m: &Self, x: &Self) -> Result<Self> {
        m.same_modulus(x)?;
        let m_inv = m.inv()?;
        Ok(m.mul_unchecked(x).mul_unchecked(&m_inv))
    }

    /// Swaps the diagonal entries of a diagonal matrix.
    pub fn flip(&self) -> Result<Self> {
        if !self.is_diagonal() {
            return Err(Error::NotDiagonal(self.to_string()));
        }
        Ok(Self {
            a: self.d,
            d: self.a,
            ..*self
        })
    }

    /// Diagonal part of an upper-triangular matrix.
    pub fn diagonal_part(&self) -> Result<Self> {
        if !self.is_upper_triangular() {
            return Err(Error::NotUpperTriangular(self.to_string()));
        }
        Ok(Self { b: 0, ..*self })
    }

    /// Complete conjugacy invariant in GL2 over a prime field.
    pub fn class_invariant(&self) -> ClassInvariant {
        if self.is_scalar() {
            ClassInvariant::Scalar(self.a as u64)
        } else {
            ClassInvariant::Cyclic {
                trace: self.trace(),
                det: self.det(),
            }
        }
    }

    /// For a non-scalar matrix over a prime field, a matrix `P` whose columns
    /// are `v, x v` for a cyclic vector `v`; then `P^-1 x P` is the companion
    /// matrix of the characteristic polynomial of `x`.
    pub(crate) fn cyclic_basis(&self) -> Option<Self> {
        if self.is_scalar() {
            return None;
        }
        let one = 1 % self.n;
        // candidate vectors e1, e2, e1 + e2; one of them is cyclic
        [(one, 0), (0, one), (one, one)]
            .into_iter()
            .find_map(|(v0, v1)| {
                let xv = self.mul_unchecked(&Self {
                    a: v0,
                    b: 0,
                    c: v1,
                    d: 0,
                    ..*self
                });
                let p = Self {
                    a: v0,
                    b: xv.a,
                    c: v1,
                    d: xv.c,
                    ..*self
                };
                p.is_invertible().then_some(p)
            })
    }
}

/// Invariant separating GL2(F_p)-conjugacy classes: scalars by value,
/// everything else by characteristic polynomial.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassInvariant {
    Scalar(u64),
    Cyclic { trace: u64, det: u64 },
}

impl fmt::Display for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.a, self.b, self.c, self.d)
    }
}

/// Serialized as the canonical encoding `"a,b,c,d"`; the modulus is carried
/// by the enclosing report.
impl serde::Serialize for Mat2 {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl fmt::Debug for Mat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]] mod {}",
            self.a, self.b, self.c, self.d, self.n
        )
    }
}

/// Parses the canonical `"a,b,c,d"` encoding for a given modulus.
/// Entries must already be reduced residues.
pub fn parse_mat2(n: u64, s: &str) -> Result<Mat2> {
    let bad = || Error::Parse {
        what: "matrix \"a,b,c,d\"",
        input: s.to_string(),
    };
    let parts: Vec<u64> = s
        .trim()
        .split(',')
        .map(|t| u64::from_str(t).map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if parts.len() != 4 || parts.iter().any(|&x| x >= n) {
        return Err(bad());
    }
    Mat2::new(
        n,
        parts[0] as i64,
        parts[1] as i64,
        parts[2] as i64,
        parts[3] as i64,
    )
}

/// Iterates over all invertible matrices mod `n` in lexicographic order.
pub fn gl2_iter(n: u64) -> Result<impl Iterator<Item = Mat2>> {
    let m = check_modulus(n)?;
    let total = (m as u64).pow(4);
    Ok((0..total).filter_map(move |code| {
        let x = Mat2::from_code(m as u64, code).ok()?;
        x.is_invertible().then_some(x)
    }))
}

/// `|GL2(Z/nZ)| = n^4 * prod_{q | n} (1 - 1/q)(1 - 1/q^2)`.
pub fn gl2_order(n: u64) -> u64 {
    let mut order = n.pow(4);
    let mut m = n;
    let mut q = 2;
    while m > 1 {
        if m.is_multiple_of(q) {
            order = order / q * (q - 1);
            order = order / (q * q) * (q * q - 1);
            while m.is_multiple_of(q) {
                m /= q;
            }
        }
        q += 1;
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(n: u64, a: i64, b: i64, c: i64, d: i64) -> Mat2 {
        Mat2::new(n, a, b, c, d).unwrap()
    }

    /// Plain textbook product over the integers, reduced at the end.
    fn naive_product(x: &Mat2, y: &Mat2) -> [u64; 4] {
        let [a, b, c, d] = x.entries();
        let [e, f, g, h] = y.entries();
        let n = x.modulus();
        [
            (a * e + b * g) % n,
            (a * f + b * h) % n,
            (c * e + d * g) % n,
            (c * f + d * h) % n,
        ]
    }

    #[test]
    fn multiplication_examples() {
        let g = Mat2::gamma(5).unwrap();
        assert_eq!(g.mul(&g).unwrap(), m(5, 1, 2, 0, 1));
        let s = Mat2::swap(5).unwrap();
        let d = Mat2::diag(5, 2, 3).unwrap();
        let prod = s.mul(&d).unwrap();
        assert_eq!(prod, m(5, 0, 3, 2, 0));
        assert_eq!(prod.entries(), naive_product(&s, &d));
        let i = Mat2::identity(5).unwrap();
        assert_eq!(i.mul(&d).unwrap(), d);
    }

    #[test]
    fn modulus_mismatch_is_an_error() {
        let x = Mat2::identity(5).unwrap();
        let y = Mat2::identity(7).unwrap();
        assert!(matches!(x.mul(&y), Err(Error::ModulusMismatch { .. })));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(
            Mat2::identity(7).unwrap().inv().unwrap(),
            Mat2::identity(7).unwrap()
        );
        assert_eq!(Mat2::gamma(7).unwrap().inv().unwrap(), m(7, 1, 6, 0, 1));
        assert_eq!(
            Mat2::diag(5, 2, 3).unwrap().inv().unwrap(),
            m(5, 3, 0, 0, 2)
        );
        assert!(matches!(
            m(6, 2, 0, 0, 1).inv(),
            Err(Error::NotInvertible(_))
        ));
    }

    #[test]
    fn det_trace_sl2() {
        let g = Mat2::gamma(11).unwrap();
        assert_eq!(g.det(), 1);
        assert!(g.is_in_sl2());
        assert_eq!(Mat2::diag(11, 7, 1).unwrap().det(), 7);
        assert_eq!(m(11, 0, 4, 9, 0).trace(), 0);
    }

    #[test]
    fn element_orders() {
        for p in [3u64, 5, 7, 11] {
            assert_eq!(Mat2::gamma(p).unwrap().element_order().unwrap(), p);
        }
        assert_eq!(Mat2::diag(5, 2, 1).unwrap().element_order().unwrap(), 4);
        assert_eq!(Mat2::identity(5).unwrap().element_order().unwrap(), 1);
        assert!(m(4, 2, 0, 0, 1).element_order().is_err());
    }

    #[test]
    fn conjugation_examples() {
        let i = Mat2::identity(7).unwrap();
        let x = m(7, 3, 1, 4, 5);
        assert_eq!(Mat2::conjugate(&x, &i).unwrap(), i);
        let s = Mat2::swap(7).unwrap();
        assert_eq!(
            Mat2::conjugate(&s, &Mat2::diag(7, 2, 5).unwrap()).unwrap(),
            Mat2::diag(7, 5, 2).unwrap()
        );
        let g = Mat2::gamma(5).unwrap();
        assert_eq!(
            Mat2::conjugate(&g, &Mat2::diag(5, 2, 1).unwrap()).unwrap(),
            m(5, 2, 4, 0, 1)
        );
    }

    #[test]
    fn encoding_round_trip() {
        let x = m(13, 12, 0, 7, 3);
        assert_eq!(x.to_string(), "12,0,7,3");
        assert_eq!(parse_mat2(13, "12,0,7,3").unwrap(), x);
        assert!(parse_mat2(13, "13,0,0,1").is_err());
        assert!(parse_mat2(13, "1,0,0").is_err());
        assert!(parse_mat2(13, "1, 0,0,1").is_err());
        assert_eq!(Mat2::from_code(13, x.code()).unwrap(), x);
    }

    #[test]
    fn lexicographic_order_matches_code_order() {
        let all: Vec<Mat2> = gl2_iter(3).unwrap().collect();
        assert_eq!(all.len(), 48);
        assert!(all
            .windows(2)
            .all(|w| w[0] < w[1] && w[0].code() < w[1].code()));
        assert_eq!(all[0], m(3, 0, 1, 1, 0));
    }

    #[test]
    fn group_orders() {
        for n in 2..=12u64 {
            assert_eq!(gl2_iter(n).unwrap().count() as u64, gl2_order(n), "n = {n}");
        }
    }

    #[test]
    fn cyclic_basis_gives_companion_form() {
        for x in gl2_iter(5).unwrap().filter(|x| !x.is_scalar()) {
            let p = x
                .cyclic_basis()
                .expect("non-scalar matrices have a cyclic vector");
            let comp = p.inv().unwrap().mul(&x).unwrap().mul(&p).unwrap();
            let n = 5i64;
            let expect = m(5, 0, -(x.det() as i64) % n, 1, x.trace() as i64);
            assert_eq!(comp, expect, "{x:?}");
        }
    }
}
