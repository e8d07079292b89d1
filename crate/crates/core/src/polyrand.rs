//! Homogeneous and bihomogeneous polynomials over GF(q), seeded sampling,
//! evaluation and specialization.
//!
//! Coefficients are indexed by [`enumerate_multiindices`] order. A bihomogeneous
//! polynomial stores its coefficient matrix row-major: row = x-multi-index,
//! column = y-multi-index.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::gfarith::{FieldElem, FieldSpec};
use crate::projgeom::{enumerate_multiindices, monomial_count, monomial_row, power_table, GeomError, MultiIndex, ProjPoint};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("malformed polynomial document: {0}")]
    Format(String),
}

/// SplitMix64 finalizer; mixes a master seed with a stream index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic random stream keyed by a 64-bit seed.
#[derive(Clone, Debug)]
pub struct SeededRng {
    seed: u64,
    stream: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            chunk.copy_from_slice(&derive_seed(seed, i as u64).to_le_bytes());
        }
        SeededRng { seed, stream: ChaCha8Rng::from_seed(key) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Independent child stream; never shares state with the parent.
    pub fn substream(&self, tag: u64) -> SeededRng {
        SeededRng::new(derive_seed(self.seed, tag ^ 0x5EED_0000_0000_0000))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.stream.next_u64()
    }

    /// Uniform residue in `0..n` from exactly one 64-bit draw (multiply-shift).
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    pub fn field_elem(&mut self, field: &FieldSpec) -> FieldElem {
        FieldElem(self.below(field.order() as u64) as u32)
    }
}

/// Homogeneous polynomial of degree `m` in `b + 1` variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomPoly {
    b: usize,
    m: u32,
    coeffs: Vec<FieldElem>,
}

impl HomPoly {
    pub fn new(b: usize, m: u32, coeffs: Vec<FieldElem>) -> Result<Self, PolyError> {
        let expected = monomial_count(b, m) as usize;
        if coeffs.len() != expected {
            return Err(GeomError::DimensionMismatch { expected, got: coeffs.len() }.into());
        }
        Ok(HomPoly { b, m, coeffs })
    }

    pub fn zero(b: usize, m: u32) -> Self {
        HomPoly { b, m, coeffs: vec![FieldElem::ZERO; monomial_count(b, m) as usize] }
    }

    /// Builds from (exponent vector, coefficient) terms; repeated terms add up.
    pub fn from_terms(field: &FieldSpec, b: usize, m: u32, terms: &[(&[u32], u32)]) -> Result<Self, PolyError> {
        let monos = enumerate_multiindices(b, m)?;
        let mut poly = HomPoly::zero(b, m);
        for (beta, c) in terms {
            let idx = monos
                .iter()
                .position(|mi| mi.exponents() == *beta)
                .ok_or_else(|| PolyError::Format(format!("{beta:?} is not a degree-{m} monomial in {} variables", b + 1)))?;
            let c = field.elem(*c as u64).map_err(|e| PolyError::Format(e.to_string()))?;
            poly.coeffs[idx] = field.add(poly.coeffs[idx], c);
        }
        Ok(poly)
    }

    /// Uniform sample: one residue per coefficient, in multi-index order.
    pub fn random(field: &FieldSpec, b: usize, m: u32, rng: &mut SeededRng) -> Self {
        let n = monomial_count(b, m) as usize;
        HomPoly { b, m, coeffs: (0..n).map(|_| rng.field_elem(field)).collect() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.b
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn evaluate(&self, field: &FieldSpec, p: &ProjPoint) -> Result<FieldElem, PolyError> {
        if p.dim() != self.b {
            return Err(GeomError::DimensionMismatch { expected: self.b, got: p.dim() }.into());
        }
        Ok(self.evaluator().eval(field, p.coords(), &mut Vec::new()))
    }

    /// Precomputed sparse form for repeated evaluation.
    pub fn evaluator(&self) -> PolyEvaluator {
        let monos = enumerate_multiindices(self.b, self.m).expect("shape already validated");
        let terms = monos
            .into_iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(beta, c)| (*c, beta.exponents().to_vec()))
            .collect();
        PolyEvaluator { degree: self.m, terms }
    }

    /// Pushes coefficients through a field map (e.g. an embedding into an extension).
    pub fn map_coeffs(&self, map: &[FieldElem]) -> HomPoly {
        HomPoly { b: self.b, m: self.m, coeffs: self.coeffs.iter().map(|c| map[c.0 as usize]).collect() }
    }

    /// Nonzero terms in canonical order as `{"b", "m", "terms": [[beta, coeff], ...]}`.
    pub fn to_json(&self, field: &FieldSpec) -> Value {
        let monos = enumerate_multiindices(self.b, self.m).expect("shape already validated");
        let terms: Vec<Value> = monos
            .iter()
            .zip(&self.coeffs)
            .filter(|(_, c)| !c.is_zero())
            .map(|(beta, c)| json!([beta.exponents(), elem_id(field, *c)]))
            .collect();
        json!({ "b": self.b, "m": self.m, "terms": terms })
    }

    pub fn from_json(field: &FieldSpec, doc: &Value) -> Result<Self, PolyError> {
        let bad = |what: &str| PolyError::Format(what.to_string());
        let b = doc["b"].as_u64().ok_or_else(|| bad("missing b"))? as usize;
        let m = doc["m"].as_u64().ok_or_else(|| bad("missing m"))? as u32;
        let monos = enumerate_multiindices(b, m)?;
        let mut poly = HomPoly::zero(b, m);
        for term in doc["terms"].as_array().ok_or_else(|| bad("missing terms"))? {
            let beta = parse_exponents(&term[0]).ok_or_else(|| bad("bad exponent vector"))?;
            let idx = monos.iter().position(|mi| mi.exponents() == beta.as_slice()).ok_or_else(|| bad("bad monomial"))?;
            poly.coeffs[idx] = parse_elem(field, &term[1]).ok_or_else(|| bad("bad coefficient"))?;
        }
        Ok(poly)
    }
}

/// Sparse evaluator: (coefficient, exponents) for each nonzero term.
#[derive(Clone, Debug)]
pub struct PolyEvaluator {
    degree: u32,
    terms: Vec<(FieldElem, Vec<u32>)>,
}

impl PolyEvaluator {
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Evaluates at raw coordinates; `scratch` is reused between calls.
    #[inline]
    pub fn eval(&self, field: &FieldSpec, coords: &[FieldElem], scratch: &mut Vec<FieldElem>) -> FieldElem {
        if self.terms.is_empty() {
            return FieldElem::ZERO;
        }
        power_table(field, coords, self.degree, scratch);
        let stride = self.degree as usize + 1;
        let mut acc = FieldElem::ZERO;
        for (c, exps) in &self.terms {
            let mut t = *c;
            for (i, e) in exps.iter().enumerate() {
                if *e > 0 {
                    t = field.mul(t, scratch[i * stride + *e as usize]);
                }
            }
            acc = field.add(acc, t);
        }
        acc
    }
}

/// Bihomogeneous polynomial of bidegree `(m, m2)` on P^a x P^b.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BiHomPoly {
    a: usize,
    b: usize,
    m: u32,
    m2: u32,
    rows: usize,
    cols: usize,
    coeffs: Vec<FieldElem>,
}

impl BiHomPoly {
    pub fn new(a: usize, b: usize, m: u32, m2: u32, coeffs: Vec<FieldElem>) -> Result<Self, PolyError> {
        let rows = monomial_count(a, m) as usize;
        let cols = monomial_count(b, m2) as usize;
        if coeffs.len() != rows * cols {
            return Err(GeomError::DimensionMismatch { expected: rows * cols, got: coeffs.len() }.into());
        }
        Ok(BiHomPoly { a, b, m, m2, rows, cols, coeffs })
    }

    /// Builds from `(x-exponents, y-exponents, coefficient)` terms.
    pub fn from_terms(
        field: &FieldSpec,
        (a, b, m, m2): (usize, usize, u32, u32),
        terms: &[(&[u32], &[u32], u32)],
    ) -> Result<Self, PolyError> {
        let xs = enumerate_multiindices(a, m)?;
        let ys = enumerate_multiindices(b, m2)?;
        let mut g = BiHomPoly::new(a, b, m, m2, vec![FieldElem::ZERO; xs.len() * ys.len()])?;
        for (alpha, beta, c) in terms {
            let i = xs.iter().position(|mi| mi.exponents() == *alpha);
            let j = ys.iter().position(|mi| mi.exponents() == *beta);
            let (Some(i), Some(j)) = (i, j) else {
                return Err(PolyError::Format(format!("bad monomial {alpha:?} x {beta:?}")));
            };
            let c = field.elem(*c as u64).map_err(|e| PolyError::Format(e.to_string()))?;
            let slot = i * g.cols + j;
            g.coeffs[slot] = field.add(g.coeffs[slot], c);
        }
        Ok(g)
    }

    /// Uniform sample, row-major coefficient order.
    pub fn random(field: &FieldSpec, a: usize, b: usize, m: u32, m2: u32, rng: &mut SeededRng) -> Self {
        let rows = monomial_count(a, m) as usize;
        let cols = monomial_count(b, m2) as usize;
        let coeffs = (0..rows * cols).map(|_| rng.field_elem(field)).collect();
        BiHomPoly { a, b, m, m2, rows, cols, coeffs }
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.a, self.b)
    }

    pub fn bidegree(&self) -> (u32, u32) {
        (self.m, self.m2)
    }

    pub fn coeffs(&self) -> &[FieldElem] {
        &self.coeffs
    }

    /// Number of (x, y) monomial pairs.
    pub fn coefficient_count(&self) -> usize {
        self.coeffs.len()
    }

    /// g(v, w) on canonical representatives.
    pub fn evaluate_bi(&self, field: &FieldSpec, v: &ProjPoint, w: &ProjPoint) -> Result<FieldElem, PolyError> {
        self.specialize(field, v)?.evaluate(field, w)
    }

    /// g(v, .) as a degree-m2 polynomial in y: coefficient of y^beta is g_beta(v).
    pub fn specialize(&self, field: &FieldSpec, v: &ProjPoint) -> Result<HomPoly, PolyError> {
        if v.dim() != self.a {
            return Err(GeomError::DimensionMismatch { expected: self.a, got: v.dim() }.into());
        }
        let xs = enumerate_multiindices(self.a, self.m)?;
        Ok(self.specialize_row(field, &monomial_row(field, v, &xs)))
    }

    /// Specialization given the precomputed x-monomial row of the anchor.
    pub fn specialize_row(&self, field: &FieldSpec, x_row: &[FieldElem]) -> HomPoly {
        debug_assert_eq!(x_row.len(), self.rows);
        let mut out = vec![FieldElem::ZERO; self.cols];
        for (i, xv) in x_row.iter().enumerate() {
            if xv.is_zero() {
                continue;
            }
            let row = &self.coeffs[i * self.cols..(i + 1) * self.cols];
            for (slot, c) in out.iter_mut().zip(row) {
                *slot = field.add(*slot, field.mul(*xv, *c));
            }
        }
        HomPoly { b: self.b, m: self.m2, coeffs: out }
    }

    pub fn to_json(&self, field: &FieldSpec) -> Value {
        let xs = enumerate_multiindices(self.a, self.m).expect("shape already validated");
        let ys = enumerate_multiindices(self.b, self.m2).expect("shape already validated");
        let mut terms = Vec::new();
        for (i, alpha) in xs.iter().enumerate() {
            for (j, beta) in ys.iter().enumerate() {
                let c = self.coeffs[i * self.cols + j];
                if !c.is_zero() {
                    terms.push(json!([alpha.exponents(), beta.exponents(), elem_id(field, c)]));
                }
            }
        }
        json!({ "a": self.a, "b": self.b, "m": [self.m, self.m2], "terms": terms })
    }
}

/// Requested polynomial shape for [`random_poly`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PolyShape {
    Hom { b: usize, m: u32 },
    Bihom { a: usize, b: usize, m: u32, m2: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RandomPoly {
    Hom(HomPoly),
    Bihom(BiHomPoly),
}

pub fn random_poly(field: &FieldSpec, shape: PolyShape, rng: &mut SeededRng) -> RandomPoly {
    match shape {
        PolyShape::Hom { b, m } => RandomPoly::Hom(HomPoly::random(field, b, m, rng)),
        PolyShape::Bihom { a, b, m, m2 } => RandomPoly::Bihom(BiHomPoly::random(field, a, b, m, m2, rng)),
    }
}

/// Element serialization shared with point ids: residue, or comma-separated basis vector.
pub fn elem_id(field: &FieldSpec, c: FieldElem) -> String {
    if field.is_prime_field() {
        c.0.to_string()
    } else {
        field.coords(c).iter().map(u32::to_string).collect::<Vec<_>>().join(",")
    }
}

fn parse_elem(field: &FieldSpec, v: &Value) -> Option<FieldElem> {
    let text = v.as_str()?;
    let digits: Vec<u32> = text.split(',').map(|d| d.trim().parse().ok()).collect::<Option<_>>()?;
    if field.is_prime_field() {
        match digits.as_slice() {
            [d] => field.elem(*d as u64).ok(),
            _ => None,
        }
    } else {
        field.from_coords(&digits).ok()
    }
}

fn parse_exponents(v: &Value) -> Option<Vec<u32>> {
    v.as_array()?.iter().map(|e| e.as_u64().map(|e| e as u32)).collect()
}

/// Convenience: the multi-index list matching a polynomial's coefficient order.
pub fn monomials_of(poly: &HomPoly) -> Vec<MultiIndex> {
    enumerate_multiindices(poly.ambient_dim(), poly.degree()).expect("shape already validated")
}
