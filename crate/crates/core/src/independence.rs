//! m-dependence of point sets: Hilbert ranks, minimality, s-wise
//! independence, strong-dependence witnesses, the M_k cap, the phi_t upper
//! bound and the Z-condition, plus the two combinatorial selection routines
//! behind the strong-dependence size bound.
//!
//! Points p_1..p_t are m-dependent when the t x C(b+m, m) matrix of degree-m
//! monomials evaluated at them has rank below t.

use std::collections::{BTreeSet, HashMap};

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::binomial;
use crate::gfarith::{FieldElem, FieldSpec};
use crate::linalg::{left_kernel, rank, rank_of_rows, row_combination, solve, Matrix};
use crate::polyrand::SeededRng;
use crate::projgeom::{enumerate_multiindices, monomial_row, GeomError, MultiIndex, ProjPoint};

/// Default number of s-subsets an exhaustive search may visit.
pub const DEFAULT_SUBSET_BUDGET: u128 = 2_000_000;

/// Default cap on the kernel dimension searched for strong-dependence witnesses.
pub const DEFAULT_KERNEL_CAP: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IndepError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("point list is empty")]
    Empty,
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("points {0} and {1} coincide")]
    DuplicatePoints(usize, usize),
    #[error("characteristic {p} does not exceed the degree {m}")]
    CharacteristicTooSmall { p: u32, m: u32 },
    #[error("points span a subspace of rank {rank}, not all of P^{b}")]
    NotSpanning { rank: usize, b: usize },
    #[error("kernel dimension {dim} exceeds the search cap {cap}")]
    KernelCapExceeded { dim: usize, cap: usize },
    #[error("graph has {edges} edges on {vertices} vertices")]
    TooManyEdges { edges: usize, vertices: usize },
    #[error("invalid edge ({0}, {1})")]
    BadEdge(usize, usize),
    #[error("{0} is not a basis")]
    NotABasis(&'static str),
    #[error("vector {0} of B is a multiple of vector {1} of B'")]
    MultiplePair(usize, usize),
}

fn check_points(points: &[ProjPoint]) -> Result<usize, IndepError> {
    let b = points.first().ok_or(IndepError::Empty)?.dim();
    let mut seen = HashMap::new();
    for (i, p) in points.iter().enumerate() {
        if p.dim() != b {
            return Err(GeomError::DimensionMismatch { expected: b, got: p.dim() }.into());
        }
        if let Some(j) = seen.insert(p, i) {
            return Err(IndepError::DuplicatePoints(j, i));
        }
    }
    Ok(b)
}

/// t x C(b+m, m) matrix with rows (p_i^beta)_beta.
pub fn evaluation_matrix(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<Matrix, IndepError> {
    let b = check_points(points)?;
    let monos = enumerate_multiindices(b, m)?;
    Ok(Matrix::from_rows(&points.iter().map(|p| monomial_row(field, p, &monos)).collect::<Vec<_>>()))
}

/// H_{I(P)}(m) for a set of distinct F_q-points.
pub fn hilbert_rank(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<usize, IndepError> {
    Ok(rank(field, &evaluation_matrix(field, points, m)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DependenceReport {
    pub t: usize,
    pub m: u32,
    pub hilbert_rank: usize,
    pub dependent: bool,
    pub minimal: bool,
    /// Relations c with sum c_i * row(p_i) = 0; dimension t - hilbert_rank.
    pub kernel_basis: Vec<Vec<FieldElem>>,
}

/// Dependence flag, minimality and the relation space of a point set.
///
/// Minimality only inspects the (t-1)-subsets: adding a point raises the rank
/// by at most one, so a dependent proper subset forces a dependent
/// (t-1)-subset containing it.
pub fn dependence_classify(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<DependenceReport, IndepError> {
    if points.len() < 2 {
        return Err(IndepError::TooFewPoints { needed: 2, got: points.len() });
    }
    let matrix = evaluation_matrix(field, points, m)?;
    let t = points.len();
    let hilbert_rank = rank(field, &matrix);
    let dependent = hilbert_rank < t;
    let minimal = dependent
        && (0..t).all(|skip| {
            let rows: Vec<&[FieldElem]> = (0..t).filter(|i| *i != skip).map(|i| matrix.row(i)).collect();
            rank_of_rows(field, &rows, &mut Vec::new()) == t - 1
        });
    Ok(DependenceReport { t, m, hilbert_rank, dependent, minimal, kernel_basis: left_kernel(field, &matrix) })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coverage {
    /// Every s-subset was checked.
    Exhaustive,
    /// The budget stopped the scan after a canonical-order prefix.
    Prefix,
    /// Uniformly random s-subsets were checked.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Independent,
    Dependent,
    Undetermined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SWiseReport {
    pub s: usize,
    pub m: u32,
    pub verdict: Verdict,
    /// Indices into the input of one m-dependent s-subset.
    pub witness: Option<Vec<usize>>,
    pub coverage: Coverage,
    pub checked: u128,
    pub total: u128,
}

/// Iterator over s-subsets of `0..n` in lexicographic order.
#[derive(Clone, Debug)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, s: usize) -> Self {
        Combinations { n, current: (s <= n).then(|| (0..s).collect()) }
    }

    /// Subsets whose first element is `first`.
    pub fn starting_at(n: usize, s: usize, first: usize) -> impl Iterator<Item = Vec<usize>> {
        assert!(s >= 1);
        Combinations::new(n.saturating_sub(first + 1), s - 1).map(move |rest| {
            std::iter::once(first).chain(rest.into_iter().map(|i| i + first + 1)).collect()
        })
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.as_mut()?;
        let out = cur.clone();
        let s = cur.len();
        let mut i = s;
        loop {
            if i == 0 {
                self.current = None;
                break;
            }
            i -= 1;
            if cur[i] < self.n - s + i {
                cur[i] += 1;
                for j in i + 1..s {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
        Some(out)
    }
}

/// Precomputed monomial rows for repeated subset rank tests.
struct RowCache {
    rows: Vec<Vec<FieldElem>>,
}

impl RowCache {
    fn new(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<Self, IndepError> {
        let b = check_points(points)?;
        let monos = enumerate_multiindices(b, m)?;
        Ok(RowCache { rows: points.par_iter().map(|p| monomial_row(field, p, &monos)).collect() })
    }

    fn is_dependent(&self, field: &FieldSpec, subset: &[usize], scratch: &mut Vec<FieldElem>) -> bool {
        let rows: Vec<&[FieldElem]> = subset.iter().map(|i| self.rows[*i].as_slice()).collect();
        rank_of_rows(field, &rows, scratch) < subset.len()
    }
}

/// True iff no s of the points are m-dependent.
///
/// Within `budget` the scan is exhaustive and parallel over the first subset
/// element; the reported witness is the lexicographically smallest dependent
/// subset. Above the budget only a canonical-order prefix is scanned and a
/// clean prefix yields `Undetermined`, never `Independent`.
pub fn s_wise_independent(
    field: &FieldSpec,
    points: &[ProjPoint],
    s: usize,
    m: u32,
    budget: u128,
) -> Result<SWiseReport, IndepError> {
    assert!(s >= 1, "subset size must be positive");
    let n = points.len();
    let total = binomial(n as u64, s as u64).unwrap_or(u128::MAX);
    let cache = RowCache::new(field, points, m)?;
    if total <= budget {
        let witness = (0..n)
            .into_par_iter()
            .map(|first| {
                let mut scratch = Vec::new();
                Combinations::starting_at(n, s, first).find(|sub| cache.is_dependent(field, sub, &mut scratch))
            })
            .find_first(Option::is_some)
            .flatten();
        let verdict = if witness.is_some() { Verdict::Dependent } else { Verdict::Independent };
        return Ok(SWiseReport { s, m, verdict, witness, coverage: Coverage::Exhaustive, checked: total, total });
    }
    let mut scratch = Vec::new();
    let mut checked = 0u128;
    let mut witness = None;
    for sub in Combinations::new(n, s).take(budget as usize) {
        checked += 1;
        if cache.is_dependent(field, &sub, &mut scratch) {
            witness = Some(sub);
            break;
        }
    }
    let verdict = if witness.is_some() { Verdict::Dependent } else { Verdict::Undetermined };
    Ok(SWiseReport { s, m, verdict, witness, coverage: Coverage::Prefix, checked, total })
}

/// Checks `samples` uniformly random s-subsets; a clean run is `Undetermined`.
pub fn s_wise_sampled(
    field: &FieldSpec,
    points: &[ProjPoint],
    s: usize,
    m: u32,
    samples: u128,
    rng: &mut SeededRng,
) -> Result<SWiseReport, IndepError> {
    let n = points.len();
    let total = binomial(n as u64, s as u64).unwrap_or(u128::MAX);
    let cache = RowCache::new(field, points, m)?;
    let mut scratch = Vec::new();
    if s > n {
        return Ok(SWiseReport { s, m, verdict: Verdict::Independent, witness: None, coverage: Coverage::Exhaustive, checked: 0, total });
    }
    for i in 0..samples {
        let sub = random_subset(n, s, rng);
        if cache.is_dependent(field, &sub, &mut scratch) {
            return Ok(SWiseReport { s, m, verdict: Verdict::Dependent, witness: Some(sub), coverage: Coverage::Sampled, checked: i + 1, total });
        }
    }
    Ok(SWiseReport { s, m, verdict: Verdict::Undetermined, witness: None, coverage: Coverage::Sampled, checked: samples, total })
}

/// Sorted uniform s-subset of `0..n` (Floyd's algorithm).
pub fn random_subset(n: usize, s: usize, rng: &mut SeededRng) -> Vec<usize> {
    let mut chosen = BTreeSet::new();
    for j in n - s..n {
        let t = rng.below(j as u64 + 1) as usize;
        if !chosen.insert(t) {
            chosen.insert(j);
        }
    }
    chosen.into_iter().collect()
}

/// Coefficients of l(x)^m for l = <x, p>, by repeated multiplication with the
/// linear form (no multinomial coefficients involved).
pub fn linear_form_power(field: &FieldSpec, p: &ProjPoint, m: u32) -> Result<Vec<FieldElem>, IndepError> {
    let b = p.dim();
    let mut current: Vec<FieldElem> = vec![FieldElem::ONE];
    let mut current_monos: Vec<MultiIndex> = enumerate_multiindices(b, 0)?;
    for d in 1..=m {
        let next_monos = enumerate_multiindices(b, d)?;
        let index: HashMap<&[u32], usize> =
            next_monos.iter().enumerate().map(|(i, mi)| (mi.exponents(), i)).collect();
        let mut next = vec![FieldElem::ZERO; next_monos.len()];
        for (beta, c) in current_monos.iter().zip(&current) {
            if c.is_zero() {
                continue;
            }
            for (j, lj) in p.coords().iter().enumerate() {
                if lj.is_zero() {
                    continue;
                }
                let mut raised = beta.exponents().to_vec();
                raised[j] += 1;
                let slot = index[raised.as_slice()];
                next[slot] = field.add(next[slot], field.mul(*c, *lj));
            }
        }
        current = next;
        current_monos = next_monos;
    }
    Ok(current)
}

/// Rows are the coefficient vectors of l_i(x)^m.
pub fn power_matrix(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<Matrix, IndepError> {
    check_points(points)?;
    let rows = points.iter().map(|p| linear_form_power(field, p, m)).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_rows(&rows))
}

/// Rank of the m-th powers of the associated linear forms.
///
/// Refuses when char <= m: the multinomial column scalings relating this
/// matrix to the evaluation matrix may then vanish.
pub fn power_rank(field: &FieldSpec, points: &[ProjPoint], m: u32) -> Result<usize, IndepError> {
    if field.characteristic() <= m {
        return Err(IndepError::CharacteristicTooSmall { p: field.characteristic(), m });
    }
    Ok(rank(field, &power_matrix(field, points, m)?))
}

/// A relation sum c_i prod_j l_i(x_j) = 0 with every c_i nonzero, searched
/// projectively over the F_q-rational kernel of the evaluation matrix.
///
/// `None` means no F_q-rational witness exists; this does not rule out one
/// over an extension field.
pub fn strong_dependence_witness(
    field: &FieldSpec,
    points: &[ProjPoint],
    m: u32,
    kernel_cap: usize,
) -> Result<Option<Vec<FieldElem>>, IndepError> {
    let b = check_points(points)?;
    let coords: Vec<&[FieldElem]> = points.iter().map(ProjPoint::coords).collect();
    let span = rank_of_rows(field, &coords, &mut Vec::new());
    if span < b + 1 {
        return Err(IndepError::NotSpanning { rank: span, b });
    }
    let matrix = evaluation_matrix(field, points, m)?;
    let kernel = left_kernel(field, &matrix);
    let dim = kernel.len();
    if dim > kernel_cap {
        return Err(IndepError::KernelCapExceeded { dim, cap: kernel_cap });
    }
    if dim == 0 {
        return Ok(None);
    }
    let q = field.order() as u128;
    let t = points.len();
    // canonical combinations: lambda with leading coordinate 1
    let count = (q.pow(dim as u32) - 1) / (q - 1);
    let mut lambda = vec![FieldElem::ZERO; dim];
    for idx in 0..count {
        crate::projgeom::point_at(q as u64, dim - 1, idx, &mut lambda);
        let mut c = vec![FieldElem::ZERO; t];
        for (l, basis) in lambda.iter().zip(&kernel) {
            if l.is_zero() {
                continue;
            }
            for (slot, v) in c.iter_mut().zip(basis) {
                *slot = field.add(*slot, field.mul(*l, *v));
            }
        }
        if c.iter().all(|v| !v.is_zero()) {
            debug_assert!(row_combination(field, &c, &matrix).iter().all(|v| v.is_zero()));
            return Ok(Some(c));
        }
    }
    Ok(None)
}

/// M_k(T) = min { m : C(m+k, k) >= T }.
pub fn m_cap(k: u32, target: u128) -> u32 {
    (0u32..)
        .find(|m| binomial(*m as u64 + k as u64, k as u64).is_none_or(|c| c >= target))
        .expect("binomials grow without bound")
}

/// Upper bound on phi_t(b, m), the dimension of minimally m-dependent t-tuples.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PhiBound {
    /// No minimally m-dependent t-sets exist (t <= m + 1).
    Empty,
    Value(Ratio<i64>),
    /// Outside the window t, b, m >= 3 and m + 2 <= t <= b.
    NotCovered,
}

/// `floor(3t/(m+4)) * (b + 1 + (m-2)t/(m+4))` inside its validity window.
pub fn phi_upper_bound(t: u32, b: u32, m: u32) -> PhiBound {
    if t <= m + 1 {
        return PhiBound::Empty;
    }
    if t < 3 || b < 3 || m < 3 || t > b {
        return PhiBound::NotCovered;
    }
    let (t, b, m) = (t as i64, b as i64, m as i64);
    let count = (3 * t) / (m + 4);
    PhiBound::Value(Ratio::from_integer(count) * (Ratio::from_integer(b + 1) + Ratio::new((m - 2) * t, m + 4)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ZVerdict {
    Satisfied,
    Violated { t: u32 },
    Undetermined { t: u32 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZRow {
    pub t: u32,
    pub bound: PhiBound,
    /// phi bound / (t - 1), when a numeric bound exists.
    pub per_point: Option<Ratio<i64>>,
    pub satisfied: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZReport {
    pub verdict: ZVerdict,
    pub ledger: Vec<ZRow>,
}

/// Sufficient test for `Z > phi_t(b, m) / (t - 1)` for all `2 <= t <= s`.
pub fn z_condition(b: u32, m: u32, z: u32, s: u32) -> ZReport {
    let mut verdict = ZVerdict::Satisfied;
    let mut ledger = Vec::new();
    for t in 2..=s {
        let bound = phi_upper_bound(t, b, m);
        let (per_point, satisfied) = match bound {
            PhiBound::Empty => (None, Some(true)),
            PhiBound::Value(v) => {
                let per = v / Ratio::from_integer(t as i64 - 1);
                (Some(per), Some(Ratio::from_integer(z as i64) > per))
            }
            PhiBound::NotCovered => (None, None),
        };
        if verdict == ZVerdict::Satisfied {
            match satisfied {
                Some(false) => verdict = ZVerdict::Violated { t },
                None => verdict = ZVerdict::Undetermined { t },
                Some(true) => {}
            }
        }
        ledger.push(ZRow { t, bound, per_point, satisfied });
    }
    ZReport { verdict, ledger }
}

/// Independent set of size at least ceil(n/3) in a graph with at most n edges,
/// by repeatedly taking a minimum-degree vertex and deleting its neighbourhood.
pub fn independent_set_third(n: usize, edges: &[(usize, usize)]) -> Result<Vec<usize>, IndepError> {
    let mut distinct = BTreeSet::new();
    for &(u, v) in edges {
        if u >= n || v >= n || u == v {
            return Err(IndepError::BadEdge(u, v));
        }
        distinct.insert((u.min(v), u.max(v)));
    }
    if distinct.len() > n {
        return Err(IndepError::TooManyEdges { edges: distinct.len(), vertices: n });
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
    for &(u, v) in &distinct {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    let mut alive: BTreeSet<usize> = (0..n).collect();
    let mut chosen = Vec::new();
    while let Some(&v) = alive.iter().min_by_key(|v| (adj[**v].len(), **v)) {
        chosen.push(v);
        let mut removed: Vec<usize> = adj[v].iter().copied().collect();
        removed.push(v);
        for u in removed {
            alive.remove(&u);
            for w in std::mem::take(&mut adj[u]) {
                adj[w].remove(&u);
            }
        }
    }
    chosen.sort_unstable();
    Ok(chosen)
}

/// Subset C of the basis `b` (as indices) with no vector of `b_prime` in span(C),
/// |C| >= ceil(n/3).
///
/// Each v in B' is written in the basis B; its support (size >= 2 since no
/// vector of B' is a multiple of one in B) is cut to its first two indices,
/// and an independent set of the resulting graph is returned.
pub fn disjoint_span_subset(
    field: &FieldSpec,
    b: &[Vec<FieldElem>],
    b_prime: &[Vec<FieldElem>],
) -> Result<Vec<usize>, IndepError> {
    let n = b.len();
    let is_basis = |vs: &[Vec<FieldElem>]| {
        vs.len() == n && vs.iter().all(|v| v.len() == n) && rank(field, &Matrix::from_rows(vs)) == n
    };
    if n == 0 || !is_basis(b) {
        return Err(IndepError::NotABasis("B"));
    }
    if !is_basis(b_prime) {
        return Err(IndepError::NotABasis("B'"));
    }
    for (i, u) in b.iter().enumerate() {
        for (j, v) in b_prime.iter().enumerate() {
            if rank(field, &Matrix::from_rows(&[u, v])) < 2 {
                return Err(IndepError::MultiplePair(i, j));
            }
        }
    }
    // columns of `basis` are the vectors of B
    let basis = Matrix::from_rows(b).transpose();
    let mut edges = Vec::with_capacity(n);
    for v in b_prime {
        let coeffs = solve(field, &basis, v).expect("B is a basis");
        let support: Vec<usize> = (0..n).filter(|i| !coeffs[*i].is_zero()).collect();
        debug_assert!(support.len() >= 2);
        edges.push((support[0], support[1]));
    }
    independent_set_third(n, &edges)
}

/// Whether `v` lies in the span of `vectors` (rank test).
pub fn in_span(field: &FieldSpec, vectors: &[&[FieldElem]], v: &[FieldElem]) -> bool {
    let mut scratch = Vec::new();
    let base = rank_of_rows(field, vectors, &mut scratch);
    let mut with: Vec<&[FieldElem]> = vectors.to_vec();
    with.push(v);
    rank_of_rows(field, &with, &mut scratch) == base
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::{field_of_order, make_field};
    use crate::projgeom::{canonicalize, enumerate_projective};

    fn pts(field: &FieldSpec, raws: &[&[u32]]) -> Vec<ProjPoint> {
        raws.iter()
            .map(|r| canonicalize(field, &r.iter().map(|v| FieldElem(*v)).collect::<Vec<_>>()).unwrap())
            .collect()
    }

    #[test]
    fn hilbert_rank_examples() {
        let f5 = make_field(5, 1).unwrap();
        for m in 0..4 {
            assert_eq!(hilbert_rank(&f5, &pts(&f5, &[&[1, 3]]), m).unwrap(), 1);
        }
        let four = pts(&f5, &[&[0, 1], &[1, 0], &[1, 1], &[1, 2]]);
        assert_eq!(hilbert_rank(&f5, &four, 2).unwrap(), 3);
        assert_eq!(hilbert_rank(&f5, &four[..3], 2).unwrap(), 3);
        let dup = pts(&f5, &[&[1, 2], &[2, 4]]);
        assert_eq!(hilbert_rank(&f5, &dup, 2), Err(IndepError::DuplicatePoints(0, 1)));
        assert_eq!(hilbert_rank(&f5, &[], 2), Err(IndepError::Empty));
    }

    /// Subset-rank oracle for minimality: every proper subset, not just (t-1)-subsets.
    fn minimal_by_all_subsets(field: &FieldSpec, points: &[ProjPoint], m: u32) -> bool {
        let t = points.len();
        if hilbert_rank(field, points, m).unwrap() == t {
            return false;
        }
        (1..t).all(|size| {
            Combinations::new(t, size).all(|sub| {
                let chosen: Vec<ProjPoint> = sub.iter().map(|i| points[*i].clone()).collect();
                hilbert_rank(field, &chosen, m).unwrap() == size
            })
        })
    }

    #[test]
    fn classify_examples() {
        let f5 = make_field(5, 1).unwrap();
        let four = pts(&f5, &[&[0, 1], &[1, 0], &[1, 1], &[1, 2]]);
        let r = dependence_classify(&f5, &four, 2).unwrap();
        assert!(r.dependent && r.minimal);
        assert_eq!(r.minimal, minimal_by_all_subsets(&f5, &four, 2));
        assert_eq!(r.kernel_basis.len(), 1);
        let r3 = dependence_classify(&f5, &four[..3], 2).unwrap();
        assert!(!r3.dependent && !r3.minimal);

        let f7 = make_field(7, 1).unwrap();
        let five = pts(&f7, &[&[0, 1], &[1, 0], &[1, 1], &[1, 2], &[1, 3]]);
        let r5 = dependence_classify(&f7, &five, 2).unwrap();
        assert!(r5.dependent && !r5.minimal);
        assert_eq!(r5.minimal, minimal_by_all_subsets(&f7, &five, 2));
        assert_eq!(dependence_classify(&f7, &five[..1], 2), Err(IndepError::TooFewPoints { needed: 2, got: 1 }));
    }

    #[test]
    fn minimality_shortcut_matches_full_subset_scan() {
        let f3 = make_field(3, 1).unwrap();
        let all = enumerate_projective(&f3, 2).unwrap();
        let mut rng = SeededRng::new(5);
        for _ in 0..200 {
            let t = 2 + rng.below(6) as usize;
            let sub: Vec<ProjPoint> = random_subset(all.len(), t, &mut rng).iter().map(|i| all[*i].clone()).collect();
            for m in 1..3 {
                let r = dependence_classify(&f3, &sub, m).unwrap();
                assert_eq!(r.minimal, minimal_by_all_subsets(&f3, &sub, m));
                assert_eq!(r.kernel_basis.len(), t - r.hilbert_rank);
            }
        }
    }

    #[test]
    fn s_wise_examples() {
        let f3 = make_field(3, 1).unwrap();
        let p1 = enumerate_projective(&f3, 1).unwrap();
        let r = s_wise_independent(&f3, &p1, 4, 2, DEFAULT_SUBSET_BUDGET).unwrap();
        assert_eq!(r.verdict, Verdict::Dependent);
        assert_eq!(r.witness, Some(vec![0, 1, 2, 3]));
        for s in 1..=3 {
            let r = s_wise_independent(&f3, &p1, s, 2, DEFAULT_SUBSET_BUDGET).unwrap();
            assert_eq!(r.verdict, Verdict::Independent);
        }
        let f7 = make_field(7, 1).unwrap();
        let coord: Vec<ProjPoint> = (0..4).map(|i| ProjPoint::coordinate(3, i)).collect();
        for m in 1..4 {
            for s in 1..=4 {
                let r = s_wise_independent(&f7, &coord, s, m, DEFAULT_SUBSET_BUDGET).unwrap();
                assert_eq!(r.verdict, Verdict::Independent, "m={m} s={s}");
            }
        }
    }

    #[test]
    fn s_wise_budget_never_claims_independence() {
        let f5 = make_field(5, 1).unwrap();
        let p2 = enumerate_projective(&f5, 2).unwrap();
        let r = s_wise_independent(&f5, &p2, 3, 2, 10).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
        assert_eq!((r.coverage, r.checked), (Coverage::Prefix, 10));
        // all of P^1(F_5) has dependent 4-subsets; the first lex subset is one
        let p1 = enumerate_projective(&f5, 1).unwrap();
        let r = s_wise_independent(&f5, &p1, 4, 2, 3).unwrap();
        assert_eq!(r.verdict, Verdict::Dependent);
        let r = s_wise_sampled(&f5, &p2, 3, 2, 50, &mut SeededRng::new(1)).unwrap();
        assert_eq!(r.verdict, Verdict::Undetermined);
        assert_eq!(r.coverage, Coverage::Sampled);
    }

    #[test]
    fn combinations_enumerate_in_order() {
        let all: Vec<Vec<usize>> = Combinations::new(5, 3).collect();
        assert_eq!(all.len(), 10);
        assert!(all.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(Combinations::new(3, 4).count(), 0);
        assert_eq!(Combinations::new(3, 0).collect::<Vec<_>>(), vec![Vec::<usize>::new()]);
        let joined: Vec<Vec<usize>> = (0..5).flat_map(|f| Combinations::starting_at(5, 3, f)).collect();
        assert_eq!(joined, all);
    }

    #[test]
    fn power_rank_examples() {
        let f7 = make_field(7, 1).unwrap();
        let coord: Vec<ProjPoint> = (0..3).map(|i| ProjPoint::coordinate(2, i)).collect();
        for m in 1..7 {
            assert_eq!(power_rank(&f7, &coord, m).unwrap(), 3);
        }
        let four = pts(&f7, &[&[0, 1], &[1, 0], &[1, 1], &[1, 2]]);
        assert_eq!(power_rank(&f7, &four, 2).unwrap(), 3);
        assert_eq!(power_rank(&f7, &four, 7), Err(IndepError::CharacteristicTooSmall { p: 7, m: 7 }));
    }

    #[test]
    fn linear_form_power_matches_multinomials() {
        // (x0 + 2 x1)^2 = x0^2 + 4 x0 x1 + 4 x1^2 over F_5
        let f5 = make_field(5, 1).unwrap();
        let p = pts(&f5, &[&[1, 2]]).remove(0);
        assert_eq!(linear_form_power(&f5, &p, 2).unwrap(), vec![FieldElem(1), FieldElem(4), FieldElem(4)]);
    }

    #[test]
    fn power_and_hilbert_rank_agree_on_random_sets() {
        for (q, b) in [(7u64, 2usize), (11, 1), (25, 2)] {
            let f = field_of_order(q).unwrap();
            let all = enumerate_projective(&f, b).unwrap();
            let mut rng = SeededRng::new(q);
            for m in 2..4 {
                for _ in 0..50 {
                    let t = 1 + rng.below(8) as usize;
                    let sub: Vec<ProjPoint> =
                        random_subset(all.len(), t, &mut rng).iter().map(|i| all[*i].clone()).collect();
                    assert_eq!(power_rank(&f, &sub, m).unwrap(), hilbert_rank(&f, &sub, m).unwrap());
                }
            }
        }
    }

    #[test]
    fn strong_witness_examples() {
        let f7 = make_field(7, 1).unwrap();
        let four = pts(&f7, &[&[0, 1], &[1, 0], &[1, 1], &[1, 2]]);
        let w = strong_dependence_witness(&f7, &four, 2, DEFAULT_KERNEL_CAP).unwrap().unwrap();
        assert!(w.iter().all(|c| !c.is_zero()));
        // also annihilates the power matrix since char > m
        let pm = power_matrix(&f7, &four, 2).unwrap();
        assert!(row_combination(&f7, &w, &pm).iter().all(|v| v.is_zero()));
        assert_eq!(strong_dependence_witness(&f7, &four[..3], 2, DEFAULT_KERNEL_CAP).unwrap(), None);
        let line = pts(&f7, &[&[1, 0, 0], &[0, 1, 0], &[1, 1, 0]]);
        assert!(matches!(strong_dependence_witness(&f7, &line, 2, 4), Err(IndepError::NotSpanning { .. })));
        let f5 = make_field(5, 1).unwrap();
        let p1 = enumerate_projective(&f5, 1).unwrap();
        assert!(matches!(strong_dependence_witness(&f5, &p1, 1, 3), Err(IndepError::KernelCapExceeded { dim: 4, cap: 3 })));
    }

    #[test]
    fn m_cap_examples() {
        assert_eq!(m_cap(1, 4), 3);
        assert_eq!(m_cap(2, 6), 2);
        for k in 1..10 {
            assert_eq!(m_cap(k, 1), 0);
            assert_eq!(m_cap(k, 0), 0);
        }
        assert_eq!(m_cap(2, 7), 3);
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_upper_bound(4, 10, 3), PhiBound::Empty);
        assert_eq!(phi_upper_bound(5, 10, 3), PhiBound::Value(Ratio::new(164, 7)));
        for b in 1..20 {
            assert_eq!(phi_upper_bound(4, b, 3), PhiBound::Empty);
        }
        assert_eq!(phi_upper_bound(12, 10, 3), PhiBound::NotCovered);
        assert_eq!(phi_upper_bound(6, 10, 2), PhiBound::NotCovered);
    }

    #[test]
    fn z_condition_examples() {
        assert_eq!(z_condition(10, 3, 1, 4).verdict, ZVerdict::Satisfied);
        assert_eq!(z_condition(7, 3, 1, 2).verdict, ZVerdict::Satisfied);
        let r = z_condition(10, 3, 5, 5);
        assert_eq!(r.verdict, ZVerdict::Violated { t: 5 });
        assert_eq!(r.ledger.last().unwrap().per_point, Some(Ratio::new(41, 7)));
        assert_eq!(z_condition(10, 3, 6, 5).verdict, ZVerdict::Satisfied);
        assert_eq!(z_condition(4, 3, 10, 6).verdict, ZVerdict::Undetermined { t: 5 });
    }

    #[test]
    fn independent_set_examples() {
        assert_eq!(independent_set_third(3, &[(0, 1), (1, 2), (0, 2)]).unwrap().len(), 1);
        let cycle: Vec<(usize, usize)> = (0..6).map(|i| (i, (i + 1) % 6)).collect();
        assert_eq!(independent_set_third(6, &cycle).unwrap().len(), 3);
        for k in 1..8 {
            let tri: Vec<(usize, usize)> =
                (0..k).flat_map(|j| [(3 * j, 3 * j + 1), (3 * j + 1, 3 * j + 2), (3 * j, 3 * j + 2)]).collect();
            assert_eq!(independent_set_third(3 * k, &tri).unwrap().len(), k);
        }
        assert!(matches!(
            independent_set_third(3, &[(0, 1), (1, 2), (0, 2), (0, 1), (2, 0)]),
            Ok(v) if v.len() == 1
        ));
        assert!(matches!(independent_set_third(2, &[(0, 1), (1, 1)]), Err(IndepError::BadEdge(1, 1))));
        let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
        assert!(matches!(independent_set_third(4, &k4), Err(IndepError::TooManyEdges { .. })));
    }

    #[test]
    fn disjoint_span_example() {
        let f5 = make_field(5, 1).unwrap();
        let e = |v: &[u32]| v.iter().map(|x| FieldElem(*x)).collect::<Vec<_>>();
        let std_basis = vec![e(&[1, 0, 0]), e(&[0, 1, 0]), e(&[0, 0, 1])];
        let full = vec![e(&[1, 1, 1]), e(&[1, 2, 1]), e(&[1, 1, 2])];
        let c = disjoint_span_subset(&f5, &std_basis, &full).unwrap();
        assert!(!c.is_empty());
        let chosen: Vec<&[FieldElem]> = c.iter().map(|i| std_basis[*i].as_slice()).collect();
        for v in &full {
            assert!(!in_span(&f5, &chosen, v));
        }
        let f3 = make_field(3, 1).unwrap();
        assert!(matches!(
            disjoint_span_subset(&f3, &[e(&[1])], &[e(&[2])]),
            Err(IndepError::MultiplePair(0, 0))
        ));
        assert!(matches!(
            disjoint_span_subset(&f3, &[e(&[1, 0]), e(&[2, 0])], &[e(&[1, 1]), e(&[1, 2])]),
            Err(IndepError::NotABasis("B"))
        ));
    }
}
