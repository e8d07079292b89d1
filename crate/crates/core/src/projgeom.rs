//! Canonical projective points, enumeration of P^b(F_q), and degree-m
//! multi-indices.
//!
//! A point is stored by its canonical representative: the scalar multiple
//! whose first nonzero coordinate is 1. Points of P^b(F_q) are enumerated
//! in lexicographic order of these representatives (coordinates compared by
//! packed value), which is the global point order used everywhere else.

use std::fmt;

use thiserror::Error;

use crate::arith::{binomial, checked_pow};
use crate::gfarith::{FieldElem, FieldSpec};

/// Default cap on enumerated points or multi-indices.
pub const DEFAULT_POINT_CAP: u64 = 2_000_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeomError {
    #[error("the zero vector is not a projective point")]
    ZeroVector,
    #[error("{what} has {count} entries, above the cap {cap}")]
    CapExceeded { what: &'static str, count: u128, cap: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed point {0:?}")]
    Parse(String),
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    coords: Vec<FieldElem>,
}

impl ProjPoint {
    /// Projective dimension b (the point has b+1 coordinates).
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[FieldElem] {
        &self.coords
    }

    /// Wraps coordinates already known to be canonical.
    pub(crate) fn from_canonical(coords: Vec<FieldElem>) -> Self {
        debug_assert_eq!(coords.iter().find(|c| !c.is_zero()), Some(&FieldElem::ONE));
        ProjPoint { coords }
    }

    /// Coordinate point e_i of P^b.
    pub fn coordinate(b: usize, i: usize) -> Self {
        let mut coords = vec![FieldElem::ZERO; b + 1];
        coords[i] = FieldElem::ONE;
        ProjPoint { coords }
    }

    /// Serialization: colon-separated coordinates; extension-field
    /// coordinates are written as comma-separated basis vectors.
    pub fn to_id(&self, field: &FieldSpec) -> String {
        self.coords
            .iter()
            .map(|c| {
                if field.is_prime_field() {
                    c.0.to_string()
                } else {
                    field.coords(*c).iter().map(u32::to_string).collect::<Vec<_>>().join(",")
                }
            })
            .collect::<Vec<_>>()
            .join(":")
    }

    /// Parses [`ProjPoint::to_id`] output (or any nonzero representative).
    pub fn parse(field: &FieldSpec, text: &str) -> Result<Self, GeomError> {
        let bad = || GeomError::Parse(text.to_string());
        let coords = text
            .trim()
            .split(':')
            .map(|part| {
                let digits = part
                    .split(',')
                    .map(|d| d.trim().parse::<u32>().map_err(|_| bad()))
                    .collect::<Result<Vec<_>, _>>()?;
                if field.is_prime_field() {
                    match digits.as_slice() {
                        [v] => field.elem(*v as u64).map_err(|_| bad()),
                        _ => Err(bad()),
                    }
                } else {
                    field.from_coords(&digits).map_err(|_| bad())
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        if coords.len() < 2 {
            return Err(bad());
        }
        canonicalize(field, &coords)
    }
}

/// Scales a nonzero vector so that its first nonzero coordinate is 1.
pub fn canonicalize(field: &FieldSpec, raw: &[FieldElem]) -> Result<ProjPoint, GeomError> {
    let lead = raw.iter().copied().find(|c| !c.is_zero()).ok_or(GeomError::ZeroVector)?;
    let scale = field.inv(lead).expect("leading coordinate is nonzero");
    Ok(ProjPoint { coords: raw.iter().map(|c| field.mul(*c, scale)).collect() })
}

/// |P^b(F_q)| = (q^(b+1) - 1) / (q - 1), `None` on overflow.
pub fn projective_count(q: u64, b: usize) -> Option<u128> {
    let top = checked_pow(q as u128, b as u32 + 1)?;
    Some((top - 1) / (q as u128 - 1))
}

/// Decodes the `index`-th canonical point of P^b(F_q) in lexicographic order.
///
/// Points with leading 1 in position `j` form a block of `q^(b-j)` points;
/// blocks are ordered `j = b, b-1, ..., 0` and within a block the trailing
/// coordinates run through F_q^(b-j) in lexicographic order.
pub fn point_at(q: u64, b: usize, mut index: u128, out: &mut [FieldElem]) {
    debug_assert_eq!(out.len(), b + 1);
    let q128 = q as u128;
    for lead in (0..=b).rev() {
        let block = q128.pow((b - lead) as u32);
        if index < block {
            out[..lead].fill(FieldElem::ZERO);
            out[lead] = FieldElem::ONE;
            for slot in out[lead + 1..].iter_mut().rev() {
                *slot = FieldElem((index % q128) as u32);
                index /= q128;
            }
            return;
        }
        index -= block;
    }
    panic!("point index out of range");
}

/// All points of P^b(F_q) in canonical order.
pub fn enumerate_projective(field: &FieldSpec, b: usize) -> Result<Vec<ProjPoint>, GeomError> {
    enumerate_projective_capped(field, b, DEFAULT_POINT_CAP)
}

pub fn enumerate_projective_capped(
    field: &FieldSpec,
    b: usize,
    cap: u64,
) -> Result<Vec<ProjPoint>, GeomError> {
    let q = field.order() as u64;
    let count = projective_count(q, b).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(GeomError::CapExceeded { what: "projective space", count, cap });
    }
    let mut buf = vec![FieldElem::ZERO; b + 1];
    Ok((0..count)
        .map(|i| {
            point_at(q, b, i, &mut buf);
            ProjPoint { coords: buf.clone() }
        })
        .collect())
}

/// Exponent vector of a monomial x^beta.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct MultiIndex {
    beta: Vec<u32>,
}

impl MultiIndex {
    pub fn new(beta: Vec<u32>) -> Self {
        MultiIndex { beta }
    }

    pub fn exponents(&self) -> &[u32] {
        &self.beta
    }

    pub fn degree(&self) -> u32 {
        self.beta.iter().sum()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.beta.iter().map(u32::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Number of degree-m monomials in b+1 variables, C(b+m, m).
pub fn monomial_count(b: usize, m: u32) -> u128 {
    binomial(b as u64 + m as u64, m as u64).unwrap_or(u128::MAX)
}

/// All exponent vectors with |beta| = m, in graded-lexicographic order
/// (beta_0 descending first, then beta_1, ...).
pub fn enumerate_multiindices(b: usize, m: u32) -> Result<Vec<MultiIndex>, GeomError> {
    let count = monomial_count(b, m);
    if count > DEFAULT_POINT_CAP as u128 {
        return Err(GeomError::CapExceeded { what: "multi-index list", count, cap: DEFAULT_POINT_CAP });
    }
    let mut out = Vec::with_capacity(count as usize);
    let mut current = vec![0u32; b + 1];
    fill_multiindices(0, m, &mut current, &mut out);
    Ok(out)
}

fn fill_multiindices(pos: usize, remaining: u32, current: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if pos + 1 == current.len() {
        current[pos] = remaining;
        out.push(MultiIndex { beta: current.clone() });
        return;
    }
    for e in (0..=remaining).rev() {
        current[pos] = e;
        fill_multiindices(pos + 1, remaining - e, current, out);
    }
}

/// p^beta on the canonical representative.
pub fn monomial_eval(field: &FieldSpec, p: &ProjPoint, beta: &MultiIndex) -> Result<FieldElem, GeomError> {
    if p.coords.len() != beta.beta.len() {
        return Err(GeomError::DimensionMismatch { expected: beta.beta.len(), got: p.coords.len() });
    }
    Ok(p.coords
        .iter()
        .zip(&beta.beta)
        .fold(FieldElem::ONE, |acc, (c, e)| field.mul(acc, field.pow(*c, *e as u64))))
}

/// Coefficients of the linear form l(x) = <x, p>.
pub fn linear_form_of(p: &ProjPoint) -> Vec<FieldElem> {
    p.coords.clone()
}

/// Table of coordinate powers `x_i^e` for `e <= max_degree`, reused across
/// monomial evaluations at one point.
pub(crate) fn power_table(field: &FieldSpec, coords: &[FieldElem], max_degree: u32, out: &mut Vec<FieldElem>) {
    let stride = max_degree as usize + 1;
    out.clear();
    out.resize(coords.len() * stride, FieldElem::ONE);
    for (i, c) in coords.iter().enumerate() {
        for e in 1..stride {
            out[i * stride + e] = field.mul(out[i * stride + e - 1], *c);
        }
    }
}

/// Row of all degree-m monomials evaluated at `p`, in multi-index order.
pub fn monomial_row(field: &FieldSpec, p: &ProjPoint, monomials: &[MultiIndex]) -> Vec<FieldElem> {
    let m = monomials.first().map_or(0, MultiIndex::degree);
    let mut table = Vec::new();
    power_table(field, &p.coords, m, &mut table);
    let stride = m as usize + 1;
    monomials
        .iter()
        .map(|beta| {
            beta.beta
                .iter()
                .enumerate()
                .fold(FieldElem::ONE, |acc, (i, e)| field.mul(acc, table[i * stride + *e as usize]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::{field_of_order, make_field};
    use proptest::prelude::*;

    fn pt(field: &FieldSpec, raw: &[u32]) -> ProjPoint {
        canonicalize(field, &raw.iter().map(|v| FieldElem(*v)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn canonicalize_examples() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(pt(&f5, &[2, 4]).coords(), &[FieldElem(1), FieldElem(2)]);
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(pt(&f7, &[0, 3, 6]).coords(), &[FieldElem(0), FieldElem(1), FieldElem(2)]);
        assert_eq!(pt(&f7, &[1, 0, 0]).coords(), &[FieldElem(1), FieldElem(0), FieldElem(0)]);
        assert_eq!(canonicalize(&f7, &[FieldElem(0); 3]), Err(GeomError::ZeroVector));
    }

    #[test]
    fn enumeration_examples() {
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(enumerate_projective(&f3, 2).unwrap().len(), 13);
        let f2 = make_field(2, 1).unwrap();
        let ids: Vec<String> = enumerate_projective(&f2, 1).unwrap().iter().map(|p| p.to_id(&f2)).collect();
        assert_eq!(ids, vec!["0:1", "1:0", "1:1"]);
        let f7 = make_field(7, 1).unwrap();
        assert_eq!(enumerate_projective(&f7, 3).unwrap().len(), 400);
        assert!(matches!(
            enumerate_projective_capped(&f7, 3, 100),
            Err(GeomError::CapExceeded { count: 400, .. })
        ));
    }

    #[test]
    fn enumeration_is_sorted_distinct_and_canonical() {
        for q in [2u64, 3, 4, 5, 9] {
            let f = field_of_order(q).unwrap();
            for b in 1..=3 {
                let pts = enumerate_projective(&f, b).unwrap();
                assert_eq!(pts.len() as u128, projective_count(q, b).unwrap());
                assert!(pts.windows(2).all(|w| w[0] < w[1]), "q={q} b={b}");
                for p in &pts {
                    assert_eq!(&canonicalize(&f, p.coords()).unwrap(), p);
                }
            }
        }
    }

    #[test]
    fn multiindex_examples() {
        assert_eq!(enumerate_multiindices(2, 2).unwrap().len(), 6);
        let b1: Vec<Vec<u32>> =
            enumerate_multiindices(1, 3).unwrap().iter().map(|m| m.exponents().to_vec()).collect();
        assert_eq!(b1, vec![vec![3, 0], vec![2, 1], vec![1, 2], vec![0, 3]]);
        assert_eq!(enumerate_multiindices(4, 3).unwrap().len(), 35);
        assert_eq!(enumerate_multiindices(3, 0).unwrap(), vec![MultiIndex::new(vec![0, 0, 0, 0])]);
    }

    #[test]
    fn monomial_examples() {
        let f5 = make_field(5, 1).unwrap();
        let p = pt(&f5, &[1, 2]);
        assert_eq!(monomial_eval(&f5, &p, &MultiIndex::new(vec![1, 2])).unwrap(), FieldElem(4));
        let e0 = ProjPoint::coordinate(2, 0);
        for beta in enumerate_multiindices(2, 3).unwrap() {
            let v = monomial_eval(&f5, &e0, &beta).unwrap();
            let e = beta.exponents();
            assert_eq!(v.is_zero(), e[1] + e[2] > 0);
        }
        let f2 = make_field(2, 1).unwrap();
        let ones = pt(&f2, &[1, 1, 1]);
        assert_eq!(monomial_eval(&f2, &ones, &MultiIndex::new(vec![0, 1, 1])).unwrap(), FieldElem(1));
        assert!(monomial_eval(&f2, &ones, &MultiIndex::new(vec![1, 1])).is_err());
    }

    #[test]
    fn monomial_row_matches_single_evaluations() {
        let f = field_of_order(9).unwrap();
        let monos = enumerate_multiindices(2, 3).unwrap();
        for p in enumerate_projective(&f, 2).unwrap() {
            let row = monomial_row(&f, &p, &monos);
            for (v, beta) in row.iter().zip(&monos) {
                assert_eq!(*v, monomial_eval(&f, &p, beta).unwrap());
            }
        }
    }

    #[test]
    fn linear_forms() {
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(linear_form_of(&pt(&f5, &[1, 2])), vec![FieldElem(1), FieldElem(2)]);
        assert_eq!(linear_form_of(&ProjPoint::coordinate(2, 1)), vec![FieldElem(0), FieldElem(1), FieldElem(0)]);
        let f3 = make_field(3, 1).unwrap();
        assert_eq!(linear_form_of(&pt(&f3, &[1, 1])), vec![FieldElem(1), FieldElem(1)]);
    }

    #[test]
    fn ids_round_trip() {
        let f4 = field_of_order(4).unwrap();
        for p in enumerate_projective(&f4, 2).unwrap() {
            assert_eq!(ProjPoint::parse(&f4, &p.to_id(&f4)).unwrap(), p);
        }
        let x = f4.from_coords(&[0, 1]).unwrap();
        let p = canonicalize(&f4, &[FieldElem(1), x]).unwrap();
        assert_eq!(p.to_id(&f4), "1,0:0,1");
        let f5 = make_field(5, 1).unwrap();
        assert_eq!(ProjPoint::parse(&f5, "2:4").unwrap().to_id(&f5), "1:2");
        assert!(ProjPoint::parse(&f5, "0:0").is_err());
        assert!(ProjPoint::parse(&f5, "1:7").is_err());
        assert!(ProjPoint::parse(&f5, "1").is_err());
    }

    proptest! {
        #[test]
        fn canonicalization_is_projective_invariant(
            q in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11]),
            raw in prop::collection::vec(0u32..1000, 2..5),
            scale in 1u32..1000,
        ) {
            let f = field_of_order(q).unwrap();
            let raw: Vec<FieldElem> = raw.iter().map(|v| FieldElem(v % f.order())).collect();
            let scale = FieldElem(1 + scale % (f.order() - 1));
            prop_assume!(raw.iter().any(|c| !c.is_zero()));
            let p = canonicalize(&f, &raw).unwrap();
            let scaled: Vec<FieldElem> = raw.iter().map(|c| f.mul(*c, scale)).collect();
            prop_assert_eq!(&canonicalize(&f, &scaled).unwrap(), &p);
            prop_assert_eq!(&canonicalize(&f, p.coords()).unwrap(), &p);
            // zero pattern of any monomial is scale independent
            for beta in enumerate_multiindices(raw.len() - 1, 2).unwrap() {
                let direct = beta.exponents().iter().zip(&scaled)
                    .fold(FieldElem::ONE, |acc, (e, c)| f.mul(acc, f.pow(*c, *e as u64)));
                prop_assert_eq!(direct.is_zero(), monomial_eval(&f, &p, &beta).unwrap().is_zero());
            }
        }
    }
}
