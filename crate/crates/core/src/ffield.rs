//! Arithmetic in `F_q` (q an odd prime power) and in its quadratic extension
//! `F_q[Z]` with `Z^2 = c` for a fixed non-square `c`.
//!
//! Elements of `F_q` are stored as integer codes `sum c_i p^i` over their
//! coefficient sequence modulo the defining polynomial. All arithmetic goes
//! through a [`FieldSpec`] (base field) or a [`QuadExt`] view (extension).

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p must be an odd prime (got {0})")]
    NotOddPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {0} is too large for this tool")]
    TooLarge(u64),
    #[error("no monic irreducible polynomial of degree {e} over Z/{p}")]
    NoIrreducible { p: u32, e: u32 },
    #[error("modulus {0:?} is not a monic irreducible polynomial of the declared degree")]
    InvalidModulus(Vec<u32>),
    #[error("c = {0:?} is not a non-square in F_q")]
    InvalidNonSquare(Vec<u32>),
    #[error("element code {code} is out of range for a field of order {q}")]
    OutOfRange { code: u32, q: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("norm fiber target must be nonzero")]
    ZeroTarget,
}

/// An element of `F_q`, encoded as `sum coeff_i * p^i`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FqElem(u32);

impl FqElem {
    pub fn code(self) -> u32 {
        self.0
    }
}

/// An element `u + vZ` of `F_q[Z]`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fq2Elem {
    pub u: FqElem,
    pub v: FqElem,
}

impl Fq2Elem {
    pub fn new(u: FqElem, v: FqElem) -> Self {
        Fq2Elem { u, v }
    }
}

impl Serialize for Fq2Elem {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [self.u.0, self.v.0].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Fq2Elem {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [u, v] = <[u32; 2]>::deserialize(d)?;
        Ok(Fq2Elem {
            u: FqElem(u),
            v: FqElem(v),
        })
    }
}

/// The finite field `F_q = Z_p[w] / (modulus)` together with the chosen
/// non-square `c` that defines the quadratic extension.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    e: u32,
    q: u32,
    modulus: Vec<u32>,
    c: FqElem,
}

const MAX_ORDER: u64 = 1 << 16;

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of `num` modulo the monic polynomial `den` over `Z_p`.
fn poly_rem(mut num: Vec<u32>, den: &[u32], p: u32) -> Vec<u32> {
    let dd = den.len() - 1;
    while num.len() > dd {
        let lead = *num.last().unwrap();
        let shift = num.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let idx = shift + i;
                num[idx] = (num[idx] + p - (lead * c) % p) % p;
            }
        }
        num.pop();
    }
    num
}

fn monic_from_digits(digits: &[u32]) -> Vec<u32> {
    let mut m = digits.to_vec();
    m.push(1);
    m
}

/// Digits of `idx` in base `p`, most significant first, `len` digits.
fn digits_msb_first(mut idx: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for slot in out.iter_mut().rev() {
        *slot = (idx % p as u64) as u32;
        idx /= p as u64;
    }
    out
}

fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    if deg == 0 || *poly.last().unwrap() != 1 {
        return false;
    }
    for k in 1..=deg / 2 {
        let count = (p as u64).pow(k as u32);
        for idx in 0..count {
            let div = monic_from_digits(&digits_msb_first(idx, p, k));
            if poly_rem(poly.to_vec(), &div, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// Builds `F_{p^e}` with the lexicographically smallest monic irreducible
    /// modulus (coefficients compared low-to-high) and the first non-square
    /// in canonical element order.
    pub fn new(p: u32, e: u32) -> Result<FieldSpec, FieldError> {
        if p == 2 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_ORDER);
        let q = q.ok_or(FieldError::TooLarge(u64::MAX))? as u32;
        let modulus = if e == 1 {
            vec![0, 1]
        } else {
            (0..q as u64)
                .map(|idx| monic_from_digits(&digits_msb_first(idx, p, e as usize)))
                .find(|m| is_irreducible(m, p))
                .ok_or(FieldError::NoIrreducible { p, e })?
        };
        let mut field = FieldSpec {
            p,
            e,
            q,
            modulus,
            c: FqElem(0),
        };
        field.c = field
            .elements()
            .into_iter()
            .find(|&a| !field.is_square(a))
            .expect("every odd-order field has non-squares");
        Ok(field)
    }

    /// Rebuilds a field from serialized parts, checking every invariant.
    pub fn from_parts(
        p: u32,
        e: u32,
        modulus: Vec<u32>,
        c: &[u32],
    ) -> Result<FieldSpec, FieldError> {
        if p == 2 || !is_prime(p) {
            return Err(FieldError::NotOddPrime(p));
        }
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64).checked_pow(e).filter(|&q| q <= MAX_ORDER);
        let q = q.ok_or(FieldError::TooLarge(u64::MAX))? as u32;
        let valid_modulus = modulus.len() == e as usize + 1
            && modulus.iter().all(|&m| m < p)
            && (if e == 1 {
                modulus == [0, 1]
            } else {
                is_irreducible(&modulus, p)
            });
        if !valid_modulus {
            return Err(FieldError::InvalidModulus(modulus));
        }
        let mut field = FieldSpec {
            p,
            e,
            q,
            modulus,
            c: FqElem(0),
        };
        let c_elem = if c.len() <= e as usize && c.iter().all(|&x| x < p) {
            field.from_coeffs(c)
        } else {
            return Err(FieldError::InvalidNonSquare(c.to_vec()));
        };
        if c_elem == field.zero() || field.is_square(c_elem) {
            return Err(FieldError::InvalidNonSquare(c.to_vec()));
        }
        field.c = c_elem;
        Ok(field)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// The non-square `c` with `Z^2 = c`.
    pub fn nonsquare(&self) -> FqElem {
        self.c
    }

    pub fn zero(&self) -> FqElem {
        FqElem(0)
    }

    pub fn one(&self) -> FqElem {
        FqElem(1)
    }

    pub fn elem(&self, code: u32) -> Result<FqElem, FieldError> {
        if code < self.q {
            Ok(FqElem(code))
        } else {
            Err(FieldError::OutOfRange { code, q: self.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FqElem {
        FqElem(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn coeffs(&self, a: FqElem) -> Vec<u32> {
        let mut code = a.0;
        (0..self.e)
            .map(|_| {
                let c = code % self.p;
                code /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> FqElem {
        let code = coeffs
            .iter()
            .take(self.e as usize)
            .rev()
            .fold(0u32, |acc, &c| acc * self.p + c % self.p);
        FqElem(code)
    }

    pub fn in_prime_field(&self, a: FqElem) -> bool {
        a.0 < self.p
    }

    /// Canonical order: prime-subfield integers first, then lexicographic on
    /// the coefficient sequence.
    pub fn cmp_canonical(&self, a: FqElem, b: FqElem) -> Ordering {
        (!self.in_prime_field(a), self.coeffs(a)).cmp(&(!self.in_prime_field(b), self.coeffs(b)))
    }

    /// All elements of `F_q` in canonical order.
    pub fn elements(&self) -> Vec<FqElem> {
        let mut all: Vec<FqElem> = (0..self.q).map(FqElem).collect();
        all.sort_by(|&a, &b| self.cmp_canonical(a, b));
        all
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let sum: Vec<u32> = ca.iter().zip(&cb).map(|(x, y)| (x + y) % self.p).collect();
        self.from_coeffs(&sum)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        let neg: Vec<u32> = self
            .coeffs(a)
            .iter()
            .map(|x| (self.p - x) % self.p)
            .collect();
        self.from_coeffs(&neg)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        let (ca, cb) = (self.coeffs(a), self.coeffs(b));
        let mut prod = vec![0u32; ca.len() + cb.len() - 1];
        for (i, x) in ca.iter().enumerate() {
            for (j, y) in cb.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        self.from_coeffs(&poly_rem(prod, &self.modulus, self.p))
    }

    pub fn pow(&self, a: FqElem, mut exp: u64) -> FqElem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem, FieldError> {
        if a == self.zero() {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.pow(a, self.q as u64 - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Euler criterion; zero counts as a square.
    pub fn is_square(&self, a: FqElem) -> bool {
        a == self.zero() || self.pow(a, (self.q as u64 - 1) / 2) == self.one()
    }

    /// View of the quadratic extension `F_q[Z]`.
    pub fn ext(&self) -> QuadExt<'_> {
        QuadExt { base: self }
    }

    pub fn format(&self, a: FqElem) -> String {
        if self.e == 1 {
            return a.0.to_string();
        }
        let terms: Vec<String> = self
            .coeffs(a)
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| match (i, c) {
                (0, c) => c.to_string(),
                (1, 1) => "w".to_string(),
                (1, c) => format!("{c}w"),
                (i, 1) => format!("w^{i}"),
                (i, c) => format!("{c}w^{i}"),
            })
            .collect();
        if terms.is_empty() {
            "0".to_string()
        } else {
            terms.join("+")
        }
    }
}

/// Arithmetic in `F_q[Z]`, `Z^2 = c`.
#[derive(Copy, Clone, Debug)]
pub struct QuadExt<'a> {
    base: &'a FieldSpec,
}

impl<'a> QuadExt<'a> {
    pub fn base(&self) -> &'a FieldSpec {
        self.base
    }

    pub fn zero(&self) -> Fq2Elem {
        Fq2Elem::new(FqElem(0), FqElem(0))
    }

    pub fn one(&self) -> Fq2Elem {
        Fq2Elem::new(FqElem(1), FqElem(0))
    }

    /// The generator `Z`.
    pub fn z(&self) -> Fq2Elem {
        Fq2Elem::new(FqElem(0), FqElem(1))
    }

    pub fn embed(&self, a: FqElem) -> Fq2Elem {
        Fq2Elem::new(a, FqElem(0))
    }

    pub fn from_ints(&self, u: i64, v: i64) -> Fq2Elem {
        Fq2Elem::new(self.base.from_int(u), self.base.from_int(v))
    }

    pub fn is_valid(&self, a: Fq2Elem) -> bool {
        a.u.0 < self.base.q && a.v.0 < self.base.q
    }

    pub fn add(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        let f = self.base;
        Fq2Elem::new(f.add(a.u, b.u), f.add(a.v, b.v))
    }

    pub fn neg(&self, a: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(self.base.neg(a.u), self.base.neg(a.v))
    }

    pub fn sub(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq2Elem, b: Fq2Elem) -> Fq2Elem {
        let f = self.base;
        let vv = f.mul(f.mul(a.v, b.v), f.nonsquare());
        Fq2Elem::new(
            f.add(f.mul(a.u, b.u), vv),
            f.add(f.mul(a.u, b.v), f.mul(a.v, b.u)),
        )
    }

    pub fn scale(&self, s: FqElem, a: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(self.base.mul(s, a.u), self.base.mul(s, a.v))
    }

    /// Frobenius conjugation `u + vZ -> u - vZ`.
    pub fn conj(&self, a: Fq2Elem) -> Fq2Elem {
        Fq2Elem::new(a.u, self.base.neg(a.v))
    }

    /// `N(a) = a * conj(a) = u^2 - c v^2`.
    pub fn norm(&self, a: Fq2Elem) -> FqElem {
        let f = self.base;
        f.sub(f.mul(a.u, a.u), f.mul(f.nonsquare(), f.mul(a.v, a.v)))
    }

    pub fn inv(&self, a: Fq2Elem) -> Result<Fq2Elem, FieldError> {
        let n_inv = self
            .base
            .inv(self.norm(a))
            .map_err(|_| FieldError::DivisionByZero)?;
        Ok(self.scale(n_inv, self.conj(a)))
    }

    pub fn div(&self, a: Fq2Elem, b: Fq2Elem) -> Result<Fq2Elem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    pub fn pow(&self, a: Fq2Elem, mut exp: u64) -> Fq2Elem {
        let mut base = a;
        let mut acc = self.one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn cmp_canonical(&self, a: Fq2Elem, b: Fq2Elem) -> Ordering {
        let f = self.base;
        let key = |x: Fq2Elem| {
            let mut seq = f.coeffs(x.u);
            seq.extend(f.coeffs(x.v));
            (!(x.v.0 == 0 && f.in_prime_field(x.u)), seq)
        };
        key(a).cmp(&key(b))
    }

    /// All `q^2` elements in canonical order.
    pub fn elements(&self) -> Vec<Fq2Elem> {
        let q = self.base.q;
        let mut all: Vec<Fq2Elem> = (0..q)
            .flat_map(|u| (0..q).map(move |v| Fq2Elem::new(FqElem(u), FqElem(v))))
            .collect();
        all.sort_by(|&a, &b| self.cmp_canonical(a, b));
        all
    }

    /// The `q + 1` elements of norm `target`, in canonical order.
    pub fn norm_fiber(&self, target: FqElem) -> Result<Vec<Fq2Elem>, FieldError> {
        if target == self.base.zero() {
            return Err(FieldError::ZeroTarget);
        }
        Ok(self
            .elements()
            .into_iter()
            .filter(|&a| self.norm(a) == target)
            .collect())
    }

    pub fn format(&self, a: Fq2Elem) -> String {
        let f = self.base;
        let wrap = |s: String| {
            if f.e() > 1 && s.contains('+') {
                format!("({s})")
            } else {
                s
            }
        };
        let u = (a.u != f.zero()).then(|| f.format(a.u));
        let v = (a.v != f.zero()).then(|| {
            if a.v == f.one() {
                "Z".to_string()
            } else {
                format!("{}Z", wrap(f.format(a.v)))
            }
        });
        match (u, v) {
            (None, None) => "0".to_string(),
            (Some(u), None) => u,
            (None, Some(v)) => v,
            (Some(u), Some(v)) => format!("{}+{v}", wrap(u)),
        }
    }
}

/// Serialized field description: `p`, `e`, `modulus` low-to-high, `c` as a
/// coefficient sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldRecord {
    pub p: u32,
    pub e: u32,
    pub modulus: Vec<u32>,
    pub c: Vec<u32>,
}

impl From<&FieldSpec> for FieldRecord {
    fn from(f: &FieldSpec) -> Self {
        FieldRecord {
            p: f.p,
            e: f.e,
            modulus: f.modulus.clone(),
            c: f.coeffs(f.c),
        }
    }
}

impl TryFrom<&FieldRecord> for FieldSpec {
    type Error = FieldError;

    fn try_from(r: &FieldRecord) -> Result<Self, Self::Error> {
        FieldSpec::from_parts(r.p, r.e, r.modulus.clone(), &r.c)
    }
}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "F_{} (p={}, e={}, modulus={:?}, c={})",
            self.q,
            self.p,
            self.e,
            self.modulus,
            self.format(self.c)
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f3() -> FieldSpec {
        FieldSpec::new(3, 1).unwrap()
    }

    #[test]
    fn make_field_small_primes() {
        let f = f3();
        assert_eq!(f.q(), 3);
        assert_eq!(f.nonsquare(), FqElem(2));
        let f5 = FieldSpec::new(5, 1).unwrap();
        assert_eq!(f5.nonsquare(), FqElem(2));
        let f7 = FieldSpec::new(7, 1).unwrap();
        assert_eq!(f7.nonsquare(), FqElem(3));
    }

    #[test]
    fn make_field_rejects_bad_characteristic() {
        assert_eq!(FieldSpec::new(2, 1), Err(FieldError::NotOddPrime(2)));
        assert_eq!(FieldSpec::new(9, 1), Err(FieldError::NotOddPrime(9)));
        assert_eq!(FieldSpec::new(3, 0), Err(FieldError::ZeroDegree));
    }

    #[test]
    fn f9_modulus_and_nonsquare() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        assert_eq!(f9.q(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
        // every element of F_3 is a square in F_9; 1 + w is the first that is not
        assert_eq!(f9.coeffs(f9.nonsquare()), vec![1, 1]);
        let order: Vec<_> = f9.elements().iter().map(|&a| f9.coeffs(a)).collect();
        assert_eq!(order[..4], [vec![0, 0], vec![1, 0], vec![2, 0], vec![0, 1]]);
    }

    #[test]
    fn prime_power_fields_are_fields() {
        for (p, e) in [(3, 2), (5, 2), (3, 3)] {
            let f = FieldSpec::new(p, e).unwrap();
            for a in f.elements().into_iter().skip(1) {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one());
            }
        }
    }

    #[test]
    fn fq2_examples_q3() {
        let f = f3();
        let x = f.ext();
        let one_plus_z = x.from_ints(1, 1);
        assert_eq!(x.norm(one_plus_z), FqElem(2));
        assert_eq!(x.inv(one_plus_z).unwrap(), x.from_ints(2, 1));
        assert_eq!(x.inv(x.zero()), Err(FieldError::DivisionByZero));
        assert_eq!(x.format(one_plus_z), "1+Z");
        assert_eq!(x.format(x.from_ints(0, 2)), "2Z");
        assert_eq!(x.format(x.from_ints(2, 0)), "2");
    }

    #[test]
    fn inv_matches_exhaustive_search() {
        let f = f3();
        let x = f.ext();
        for a in x.elements().into_iter().filter(|&a| a != x.zero()) {
            let brute: Vec<_> = x
                .elements()
                .into_iter()
                .filter(|&b| x.mul(a, b) == x.one())
                .collect();
            assert_eq!(brute, vec![x.inv(a).unwrap()]);
        }
    }

    #[test]
    fn norm_fibers_q3() {
        let f = f3();
        let x = f.ext();
        let fmt = |v: Vec<Fq2Elem>| v.into_iter().map(|a| x.format(a)).collect::<Vec<_>>();
        assert_eq!(fmt(x.norm_fiber(FqElem(1)).unwrap()), ["1", "2", "Z", "2Z"]);
        assert_eq!(
            fmt(x.norm_fiber(FqElem(2)).unwrap()),
            ["1+Z", "1+2Z", "2+Z", "2+2Z"]
        );
        assert_eq!(x.norm_fiber(FqElem(0)), Err(FieldError::ZeroTarget));
    }

    #[test]
    fn norm_fiber_q5_by_enumeration() {
        let f = FieldSpec::new(5, 1).unwrap();
        let x = f.ext();
        let mut brute = 0;
        for u in 0..5i32 {
            for v in 0..5 {
                // u^2 - 2 v^2 == 1 (mod 5)
                if (u * u + 25 - 2 * v * v).rem_euclid(5) == 1 {
                    brute += 1;
                }
            }
        }
        assert_eq!(brute, 6);
        assert_eq!(x.norm_fiber(FqElem(1)).unwrap().len(), brute);
    }

    #[test]
    fn exhaustive_norm_and_conjugation_laws() {
        for (p, e) in [(3, 1), (5, 1), (7, 1), (3, 2)] {
            let f = FieldSpec::new(p, e).unwrap();
            let x = f.ext();
            let q = f.q() as u64;
            let all = x.elements();
            for &a in &all {
                assert_eq!(x.conj(x.conj(a)), a);
                assert_eq!(x.conj(a), x.pow(a, q));
                let n = x.norm(a);
                assert_eq!(x.mul(a, x.conj(a)), x.embed(n));
                for &b in &all {
                    assert_eq!(x.norm(x.mul(a, b)), f.mul(n, x.norm(b)));
                    assert_eq!(x.conj(x.mul(a, b)), x.mul(x.conj(a), x.conj(b)));
                    assert_eq!(x.conj(x.add(a, b)), x.add(x.conj(a), x.conj(b)));
                }
            }
            assert_eq!(x.conj(x.z()), x.neg(x.z()));
            for a in f.elements() {
                assert_eq!(x.conj(x.embed(a)), x.embed(a));
            }
            let mut covered = 0;
            for t in f.elements().into_iter().skip(1) {
                let fiber = x.norm_fiber(t).unwrap();
                assert_eq!(fiber.len() as u32, f.q() + 1);
                assert!(fiber.iter().all(|&a| fiber.contains(&x.neg(a))));
                covered += fiber.len();
            }
            assert_eq!(covered as u64, q * q - 1);
        }
    }

    #[test]
    fn record_round_trip_and_validation() {
        let f9 = FieldSpec::new(3, 2).unwrap();
        let rec = FieldRecord::from(&f9);
        assert_eq!(FieldSpec::try_from(&rec).unwrap(), f9);
        let bad = FieldRecord {
            c: vec![1],
            ..rec.clone()
        };
        assert!(matches!(
            FieldSpec::try_from(&bad),
            Err(FieldError::InvalidNonSquare(_))
        ));
        let reducible = FieldRecord {
            modulus: vec![2, 0, 1],
            ..rec
        };
        assert!(matches!(
            FieldSpec::try_from(&reducible),
            Err(FieldError::InvalidModulus(_))
        ));
    }
}
