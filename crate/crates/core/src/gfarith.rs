//! Exact arithmetic in GF(p) and GF(p^k).
//!
//! Elements are stored as the integer `c_0 + c_1 p + ... + c_{k-1} p^{k-1}`
//! of their polynomial-basis coordinates, so the additive identity is `0`,
//! the multiplicative identity is `1`, and the prime subfield is `0..p`.
//!
//! Extension fields carry exp/log tables built from the polynomial-basis
//! reference arithmetic; the reference routines stay public so the tables
//! can be checked against them.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::arith::{checked_pow, iroot_ceil, is_prime, prime_factors};

/// Largest field order accepted by default.
pub const DEFAULT_ORDER_CAP: u64 = 1 << 16;

/// Extension fields up to this order get a full addition table.
const ADD_TABLE_MAX: u32 = 256;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {p}^{k} exceeds the enumeration cap {cap}")]
    CapExceeded { p: u64, k: u32, cap: u64 },
    #[error("no monic irreducible polynomial of degree {k} over GF({p})")]
    NoIrreducible { p: u64, k: u32 },
    #[error("inversion of zero")]
    ZeroInverse,
    #[error("element {value} does not belong to GF({order})")]
    Mismatch { value: u64, order: u32 },
    #[error("cannot embed GF({small}) into GF({big})")]
    NoEmbedding { small: u32, big: u32 },
}

/// An element of some `FieldSpec`, in packed polynomial-basis encoding.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FieldElem(pub u32);

impl FieldElem {
    pub const ZERO: FieldElem = FieldElem(0);
    pub const ONE: FieldElem = FieldElem(1);

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

/// Operation selector for [`field_arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u64),
}

enum Repr {
    Prime,
    Extension {
        /// `exp[i] = g^i` for `i < 2(q-1)`, doubled to skip a reduction.
        exp: Vec<u32>,
        log: Vec<u32>,
        neg: Vec<u32>,
        add: Option<Vec<u32>>,
    },
}

struct Inner {
    p: u32,
    k: u32,
    q: u32,
    /// Monic modulus, low degree first, length `k + 1`; empty for prime fields.
    modulus: Vec<u32>,
    repr: Repr,
}

/// A finite field GF(p^k). Cheap to clone, immutable after construction.
#[derive(Clone)]
pub struct FieldSpec {
    inner: Arc<Inner>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.inner.p)
            .field("k", &self.inner.k)
            .field("order", &self.inner.q)
            .field("modulus", &self.inner.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        // the modulus is a function of (p, k)
        self.inner.p == other.inner.p && self.inner.k == other.inner.k
    }
}

impl Eq for FieldSpec {}

/// Builds GF(p^k) with the default order cap.
pub fn make_field(p: u64, k: u32) -> Result<FieldSpec, FieldError> {
    make_field_with_cap(p, k, DEFAULT_ORDER_CAP)
}

/// Builds GF(q) for a prime power `q`.
pub fn field_of_order(q: u64) -> Result<FieldSpec, FieldError> {
    let (p, k) = crate::arith::prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
    make_field(p, k)
}

pub fn make_field_with_cap(p: u64, k: u32, cap: u64) -> Result<FieldSpec, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k == 0 {
        return Err(FieldError::ZeroDegree);
    }
    let q = checked_pow(p as u128, k)
        .filter(|q| *q <= cap.min(u32::MAX as u64) as u128)
        .ok_or(FieldError::CapExceeded { p, k, cap })? as u32;
    let p = p as u32;
    if k == 1 {
        return Ok(FieldSpec {
            inner: Arc::new(Inner { p, k, q, modulus: Vec::new(), repr: Repr::Prime }),
        });
    }
    let modulus = smallest_irreducible(p, k).ok_or(FieldError::NoIrreducible { p: p as u64, k })?;
    let mut field = FieldSpec {
        inner: Arc::new(Inner { p, k, q, modulus, repr: Repr::Prime }),
    };
    let repr = field.build_tables();
    Arc::get_mut(&mut field.inner).expect("field not yet shared").repr = repr;
    Ok(field)
}

impl FieldSpec {
    pub fn characteristic(&self) -> u32 {
        self.inner.p
    }

    pub fn extension_degree(&self) -> u32 {
        self.inner.k
    }

    pub fn order(&self) -> u32 {
        self.inner.q
    }

    /// Monic modulus, low degree first; empty for prime fields.
    pub fn modulus(&self) -> &[u32] {
        &self.inner.modulus
    }

    pub fn is_prime_field(&self) -> bool {
        self.inner.k == 1
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem::ZERO
    }

    pub fn one(&self) -> FieldElem {
        FieldElem::ONE
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + Clone {
        (0..self.inner.q).map(FieldElem)
    }

    /// Checks that a packed value belongs to this field.
    pub fn elem(&self, value: u64) -> Result<FieldElem, FieldError> {
        if value < self.inner.q as u64 {
            Ok(FieldElem(value as u32))
        } else {
            Err(FieldError::Mismatch { value, order: self.inner.q })
        }
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElem {
        FieldElem(n.rem_euclid(self.inner.p as i64) as u32)
    }

    /// Builds an element from polynomial-basis coordinates.
    pub fn from_coords(&self, coords: &[u32]) -> Result<FieldElem, FieldError> {
        let p = self.inner.p;
        if coords.len() != self.inner.k as usize || coords.iter().any(|c| *c >= p) {
            return Err(FieldError::Mismatch {
                value: coords.iter().rev().fold(0u64, |acc, c| acc * p as u64 + *c as u64),
                order: self.inner.q,
            });
        }
        Ok(FieldElem(coords.iter().rev().fold(0, |acc, c| acc * p + c)))
    }

    /// Polynomial-basis coordinates, low degree first.
    pub fn coords(&self, a: FieldElem) -> Vec<u32> {
        let p = self.inner.p;
        let mut v = a.0;
        (0..self.inner.k)
            .map(|_| {
                let c = v % p;
                v /= p;
                c
            })
            .collect()
    }

    #[inline]
    pub fn add(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        match &inner.repr {
            Repr::Prime => {
                let s = a.0 + b.0;
                FieldElem(if s >= inner.p { s - inner.p } else { s })
            }
            Repr::Extension { add: Some(table), .. } => {
                FieldElem(table[(a.0 * inner.q + b.0) as usize])
            }
            Repr::Extension { add: None, .. } => self.add_digits(a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        match &inner.repr {
            Repr::Prime => FieldElem(if a.0 == 0 { 0 } else { inner.p - a.0 }),
            Repr::Extension { neg, .. } => FieldElem(neg[a.0 as usize]),
        }
    }

    #[inline]
    pub fn sub(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let inner = &*self.inner;
        match &inner.repr {
            Repr::Prime => FieldElem(((a.0 as u64 * b.0 as u64) % inner.p as u64) as u32),
            Repr::Extension { exp, log, .. } => {
                if a.0 == 0 || b.0 == 0 {
                    FieldElem::ZERO
                } else {
                    FieldElem(exp[(log[a.0 as usize] + log[b.0 as usize]) as usize])
                }
            }
        }
    }

    pub fn inv(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        let inner = &*self.inner;
        Ok(match &inner.repr {
            // Fermat: a^(p-2)
            Repr::Prime => self.pow(a, inner.p as u64 - 2),
            Repr::Extension { exp, log, .. } => {
                let l = log[a.0 as usize];
                FieldElem(exp[((inner.q - 1 - l) % (inner.q - 1)) as usize])
            }
        })
    }

    pub fn div(&self, a: FieldElem, b: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Square-and-multiply.
    pub fn pow(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    fn add_digits(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        let p = self.inner.p;
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.inner.k {
            out += ((x % p + y % p) % p) * scale;
            x /= p;
            y /= p;
            scale *= p;
        }
        FieldElem(out)
    }

    fn neg_digits(&self, a: FieldElem) -> FieldElem {
        let p = self.inner.p;
        let coords: Vec<u32> = self.coords(a).into_iter().map(|c| (p - c) % p).collect();
        FieldElem(coords.iter().rev().fold(0, |acc, c| acc * p + c))
    }

    /// Schoolbook product in the polynomial basis, reduced by the modulus.
    pub fn mul_poly_basis(&self, a: FieldElem, b: FieldElem) -> FieldElem {
        if self.is_prime_field() {
            return self.mul(a, b);
        }
        let p = self.inner.p;
        let prod = poly_mul(&self.coords(a), &self.coords(b), p);
        let (_, rem) = poly_divmod(&prod, &self.inner.modulus, p);
        self.pack(&rem)
    }

    /// Inverse by the extended Euclidean algorithm on the polynomial basis.
    pub fn inv_poly_basis(&self, a: FieldElem) -> Result<FieldElem, FieldError> {
        if a.is_zero() {
            return Err(FieldError::ZeroInverse);
        }
        if self.is_prime_field() {
            return self.inv(a);
        }
        let p = self.inner.p;
        let (mut r0, mut r1) = (self.inner.modulus.clone(), trim(self.coords(a)));
        let (mut s0, mut s1) = (Vec::<u32>::new(), vec![1u32]);
        while !r1.is_empty() {
            let (quot, rem) = poly_divmod(&r0, &r1, p);
            let s2 = poly_sub(&s0, &poly_mul(&quot, &s1, p), p);
            r0 = std::mem::replace(&mut r1, rem);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant because the modulus is irreducible
        let c_inv = mod_inv(r0[0], p);
        let inv: Vec<u32> = s0.iter().map(|c| (*c as u64 * c_inv as u64 % p as u64) as u32).collect();
        let (_, inv) = poly_divmod(&inv, &self.inner.modulus, p);
        Ok(self.pack(&inv))
    }

    fn pack(&self, poly: &[u32]) -> FieldElem {
        let p = self.inner.p;
        FieldElem(poly.iter().rev().fold(0, |acc, c| acc * p + c))
    }

    fn build_tables(&self) -> Repr {
        let q = self.inner.q;
        let group = (q - 1) as u64;
        let factors = prime_factors(group);
        let generator = (2..q)
            .map(FieldElem)
            .find(|g| {
                factors.iter().all(|r| self.pow_poly_basis(*g, group / r) != FieldElem::ONE)
            })
            .unwrap_or(FieldElem::ONE); // q = 2 never reaches here; GF(p^k), k >= 2 has q >= 4
        let mut exp = vec![0u32; 2 * (q as usize - 1)];
        let mut log = vec![0u32; q as usize];
        let mut x = FieldElem::ONE;
        for i in 0..(q - 1) as usize {
            exp[i] = x.0;
            exp[i + q as usize - 1] = x.0;
            log[x.0 as usize] = i as u32;
            x = self.mul_poly_basis(x, generator);
        }
        let neg = (0..q).map(|a| self.neg_digits(FieldElem(a)).0).collect();
        let add = (q <= ADD_TABLE_MAX).then(|| {
            let mut t = Vec::with_capacity((q * q) as usize);
            for a in 0..q {
                for b in 0..q {
                    t.push(self.add_digits(FieldElem(a), FieldElem(b)).0);
                }
            }
            t
        });
        Repr::Extension { exp, log, neg, add }
    }

    fn pow_poly_basis(&self, a: FieldElem, mut e: u64) -> FieldElem {
        let mut base = a;
        let mut acc = FieldElem::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_poly_basis(acc, base);
            }
            base = self.mul_poly_basis(base, base);
            e >>= 1;
        }
        acc
    }

    /// Field embedding into an extension `big` of the same characteristic.
    ///
    /// The generator `x` of this field's polynomial basis is sent to the
    /// smallest root of the modulus in `big`; the result is indexed by
    /// packed value.
    pub fn embedding_into(&self, big: &FieldSpec) -> Result<Vec<FieldElem>, FieldError> {
        let err = FieldError::NoEmbedding { small: self.order(), big: big.order() };
        if self.characteristic() != big.characteristic()
            || !big.extension_degree().is_multiple_of(self.extension_degree())
        {
            return Err(err);
        }
        if self.is_prime_field() {
            return Ok(self.elements().collect());
        }
        // prime-subfield residues share their encoding in both fields
        let modulus: Vec<FieldElem> = self.inner.modulus.iter().map(|c| FieldElem(*c)).collect();
        let root = big
            .elements()
            .find(|x| {
                modulus.iter().rev().fold(FieldElem::ZERO, |acc, c| big.add(big.mul(acc, *x), *c)).is_zero()
            })
            .ok_or(err)?;
        Ok(self
            .elements()
            .map(|a| {
                self.coords(a)
                    .iter()
                    .rev()
                    .fold(FieldElem::ZERO, |acc, c| big.add(big.mul(acc, root), FieldElem(*c)))
            })
            .collect())
    }

    /// Exhaustive check of the field axioms; intended for small fields.
    pub fn check_axioms(&self) -> Result<(), String> {
        let els: Vec<FieldElem> = self.elements().collect();
        let (zero, one) = (self.zero(), self.one());
        for &a in &els {
            if self.add(a, zero) != a || self.mul(a, one) != a {
                return Err(format!("identity fails at {a:?}"));
            }
            if self.add(a, self.neg(a)) != zero {
                return Err(format!("additive inverse fails at {a:?}"));
            }
            if !a.is_zero() {
                let inv = self.inv(a).map_err(|e| e.to_string())?;
                if self.mul(a, inv) != one {
                    return Err(format!("inverse fails at {a:?}"));
                }
                let count = els.iter().filter(|b| self.mul(a, **b) == one).count();
                if count != 1 {
                    return Err(format!("{a:?} has {count} inverses"));
                }
            }
            if self.pow(a, self.order() as u64) != a {
                return Err(format!("Frobenius fails at {a:?}"));
            }
            for &b in &els {
                if self.add(a, b) != self.add(b, a) || self.mul(a, b) != self.mul(b, a) {
                    return Err(format!("commutativity fails at {a:?}, {b:?}"));
                }
                if self.mul(a, b) != self.mul_poly_basis(a, b) {
                    return Err(format!("table product disagrees at {a:?}, {b:?}"));
                }
                for &c in &els {
                    if self.add(self.add(a, b), c) != self.add(a, self.add(b, c))
                        || self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c))
                    {
                        return Err(format!("associativity fails at {a:?}, {b:?}, {c:?}"));
                    }
                    if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)) {
                        return Err(format!("distributivity fails at {a:?}, {b:?}, {c:?}"));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Checked single-operation entry point: validates operand membership first.
pub fn field_arith(
    field: &FieldSpec,
    op: ArithOp,
    a: FieldElem,
    b: Option<FieldElem>,
) -> Result<FieldElem, FieldError> {
    field.elem(a.0 as u64)?;
    let rhs = |b: Option<FieldElem>| -> Result<FieldElem, FieldError> {
        let b = b.ok_or(FieldError::Mismatch { value: u64::MAX, order: field.order() })?;
        field.elem(b.0 as u64)
    };
    match op {
        ArithOp::Add => Ok(field.add(a, rhs(b)?)),
        ArithOp::Sub => Ok(field.sub(a, rhs(b)?)),
        ArithOp::Mul => Ok(field.mul(a, rhs(b)?)),
        ArithOp::Inv => field.inv(a),
        ArithOp::Pow(e) => Ok(field.pow(a, e)),
    }
}

/// Base-selection rule for the constructions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseKind {
    Prime,
    PowerOfTwo,
}

/// Smallest admissible `q` (prime, or power of two) with `n <= q^s`.
pub fn pick_base(n: u64, s: u32, kind: BaseKind) -> u64 {
    let start = iroot_ceil(n as u128, s.max(1)).max(2) as u64;
    match kind {
        BaseKind::Prime => (start..).find(|q| is_prime(*q)).expect("primes are unbounded"),
        BaseKind::PowerOfTwo => start.next_power_of_two(),
    }
}

fn trim(mut v: Vec<u32>) -> Vec<u32> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn mod_inv(a: u32, p: u32) -> u32 {
    let (mut acc, mut base, mut e) = (1u64, a as u64 % p as u64, p as u64 - 2);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u64;
        }
        base = base * base % p as u64;
        e >>= 1;
    }
    acc as u32
}

fn poly_mul(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + *x as u64 * *y as u64) % p as u64;
        }
    }
    trim(out.into_iter().map(|c| c as u32).collect())
}

fn poly_sub(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let n = a.len().max(b.len());
    trim(
        (0..n)
            .map(|i| {
                let x = a.get(i).copied().unwrap_or(0);
                let y = b.get(i).copied().unwrap_or(0);
                (x + p - y) % p
            })
            .collect(),
    )
}

/// Division with remainder over GF(p); `divisor` must be nonzero.
fn poly_divmod(num: &[u32], divisor: &[u32], p: u32) -> (Vec<u32>, Vec<u32>) {
    let divisor = trim(divisor.to_vec());
    let mut rem = trim(num.to_vec());
    let dlen = divisor.len();
    assert!(dlen > 0, "division by the zero polynomial");
    if rem.len() < dlen {
        return (Vec::new(), rem);
    }
    let lead_inv = mod_inv(divisor[dlen - 1], p) as u64;
    let mut quot = vec![0u32; rem.len() - dlen + 1];
    while rem.len() >= dlen {
        let shift = rem.len() - dlen;
        let factor = (*rem.last().unwrap() as u64 * lead_inv % p as u64) as u32;
        quot[shift] = factor;
        for (i, d) in divisor.iter().enumerate() {
            let sub = (factor as u64 * *d as u64 % p as u64) as u32;
            rem[shift + i] = (rem[shift + i] + p - sub) % p;
        }
        rem = trim(rem);
    }
    (trim(quot), rem)
}

/// Monic polynomials of degree `d`, low-degree coefficients varying slowest
/// first (lexicographic with `c_0` most significant).
fn monic_polys(p: u32, d: u32) -> impl Iterator<Item = Vec<u32>> {
    let count = (p as u64).pow(d);
    (0..count).map(move |mut idx| {
        let mut coeffs = vec![0u32; d as usize + 1];
        for slot in (0..d as usize).rev() {
            coeffs[slot] = (idx % p as u64) as u32;
            idx /= p as u64;
        }
        coeffs[d as usize] = 1;
        coeffs
    })
}

/// Trial division by every monic polynomial of degree `1..=deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let poly = trim(poly.to_vec());
    let deg = poly.len().saturating_sub(1) as u32;
    if deg == 0 {
        return false;
    }
    (1..=deg / 2).all(|d| monic_polys(p, d).all(|div| !poly_divmod(&poly, &div, p).1.is_empty()))
}

/// Lexicographically smallest (low degree first) monic irreducible of degree `k`.
pub fn smallest_irreducible(p: u32, k: u32) -> Option<Vec<u32>> {
    monic_polys(p, k).find(|f| is_irreducible(f, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Oracle for the GF(9) modulus: enumerate monic quadratics and test for roots.
    fn smallest_rootless_quadratic(p: u32) -> Vec<u32> {
        let mut found = Vec::new();
        for c0 in 0..p {
            for c1 in 0..p {
                let has_root = (0..p).any(|x| (x * x + c1 * x + c0) % p == 0);
                if !has_root {
                    found.push(vec![c0, c1, 1]);
                }
            }
        }
        found.into_iter().next().unwrap()
    }

    #[test]
    fn prime_field_construction() {
        let f = make_field(5, 1).unwrap();
        assert_eq!((f.characteristic(), f.extension_degree(), f.order()), (5, 1, 5));
        assert!(f.modulus().is_empty());
    }

    #[test]
    fn gf4_modulus_is_forced() {
        let f = make_field(2, 2).unwrap();
        assert_eq!(f.modulus(), &[1, 1, 1]);
        // x * (x + 1) = x^2 + x = 1
        let x = f.from_coords(&[0, 1]).unwrap();
        let x1 = f.from_coords(&[1, 1]).unwrap();
        assert_eq!(f.mul(x, x1), f.one());
    }

    #[test]
    fn gf9_modulus_matches_root_search() {
        let f = make_field(3, 2).unwrap();
        assert_eq!(f.order(), 9);
        assert_eq!(f.modulus(), smallest_rootless_quadratic(3).as_slice());
        assert_eq!(f.modulus(), &[1, 0, 1]);
    }

    #[test]
    fn small_examples() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(f5.mul(FieldElem(3), FieldElem(4)), FieldElem(2));
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(f7.inv(FieldElem(3)).unwrap(), FieldElem(5));
        assert_eq!(f7.inv(FieldElem(0)), Err(FieldError::ZeroInverse));
    }

    #[test]
    fn construction_errors() {
        assert_eq!(make_field(6, 1).unwrap_err(), FieldError::NotPrime(6));
        assert_eq!(make_field(5, 0).unwrap_err(), FieldError::ZeroDegree);
        assert!(matches!(make_field(2, 20), Err(FieldError::CapExceeded { .. })));
        assert!(matches!(make_field_with_cap(11, 2, 100), Err(FieldError::CapExceeded { .. })));
        assert_eq!(field_of_order(12).unwrap_err(), FieldError::NotPrimePower(12));
    }

    #[test]
    fn checked_arith_rejects_foreign_elements() {
        let f = make_field(5, 1).unwrap();
        assert_eq!(field_arith(&f, ArithOp::Mul, FieldElem(3), Some(FieldElem(4))), Ok(FieldElem(2)));
        assert!(matches!(
            field_arith(&f, ArithOp::Add, FieldElem(7), Some(FieldElem(1))),
            Err(FieldError::Mismatch { .. })
        ));
        assert_eq!(field_arith(&f, ArithOp::Inv, FieldElem(0), None), Err(FieldError::ZeroInverse));
        assert_eq!(field_arith(&f, ArithOp::Pow(3), FieldElem(2), None), Ok(FieldElem(3)));
    }

    #[test]
    fn axioms_hold_for_small_fields() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 16, 25, 27] {
            let f = field_of_order(q).unwrap();
            f.check_axioms().unwrap_or_else(|e| panic!("GF({q}): {e}"));
        }
    }

    #[test]
    fn tables_match_reference_inverse() {
        for q in [4u64, 8, 9, 16, 25, 27, 49, 64, 121, 343] {
            let f = field_of_order(q).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.inv(a).unwrap(), f.inv_poly_basis(a).unwrap(), "GF({q}) {a:?}");
            }
        }
    }

    #[test]
    fn large_extension_uses_digit_addition() {
        let f = field_of_order(343).unwrap();
        let a = f.from_coords(&[6, 3, 2]).unwrap();
        let b = f.from_coords(&[1, 5, 5]).unwrap();
        assert_eq!(f.coords(f.add(a, b)), vec![0, 1, 0]);
        assert_eq!(f.add(a, f.neg(a)), f.zero());
    }

    #[test]
    fn embeddings_are_homomorphisms() {
        for (small, big) in [(2u64, 8u64), (4, 16), (3, 9), (9, 81), (11, 121), (2, 4)] {
            let s = field_of_order(small).unwrap();
            let b = field_of_order(big).unwrap();
            let map = s.embedding_into(&b).unwrap();
            for x in s.elements() {
                for y in s.elements() {
                    assert_eq!(map[s.add(x, y).0 as usize], b.add(map[x.0 as usize], map[y.0 as usize]));
                    assert_eq!(map[s.mul(x, y).0 as usize], b.mul(map[x.0 as usize], map[y.0 as usize]));
                }
            }
        }
        let f4 = field_of_order(4).unwrap();
        let f8 = field_of_order(8).unwrap();
        assert!(f4.embedding_into(&f8).is_err());
    }

    #[test]
    fn pick_base_examples() {
        assert_eq!(pick_base(100, 2, BaseKind::Prime), 11);
        assert_eq!(pick_base(100, 2, BaseKind::PowerOfTwo), 16);
        assert_eq!(pick_base(2, 3, BaseKind::Prime), 2);
    }

    #[test]
    fn pick_base_bertrand_grid() {
        for s in 2u32..=5 {
            for n in 2u64..=1_000_000 {
                for kind in [BaseKind::Prime, BaseKind::PowerOfTwo] {
                    let q = pick_base(n, s, kind) as u128;
                    let qs = q.pow(s);
                    assert!(qs >= n as u128, "n={n} s={s}");
                    assert!(qs < 2 * n as u128 * (1u128 << (s - 1)), "n={n} s={s} q={q} {kind:?}");
                }
            }
        }
    }
}
