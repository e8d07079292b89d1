//! Sided bipartite graphs: the two constructions, their parameter planner,
//! exhaustive K_{s,t} verification, density ratios and the joint-uniformity
//! test for specializations.

mod construct;
mod plan;
mod uniformity;

pub use construct::{
    compute_graph_checks, construct, construct_turan, construct_zar, ConstructConfig, GraphChecks, TrialReport,
};
pub use plan::{
    plan_construction, turan_side_target, zar_left_size, ConstructionPlan, GraphKind, PlanError, PlanMode,
    PlanOverrides, DEFAULT_C,
};
pub use uniformity::{joint_uniformity_test, AnchorPolicy, UniformityMode, UniformityReport, DEFAULT_UNIFORMITY_CAP};

use std::collections::HashSet;

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::binomial;
use crate::gfarith::{make_field, FieldError, FieldSpec};
use crate::independence::{random_subset, IndepError};
use crate::polyrand::{PolyError, SeededRng};
use crate::projgeom::{GeomError, ProjPoint};
use crate::report::{decimal, ratio_string, ser_u128};
use crate::variety::VarietyError;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Variety(#[from] VarietyError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Indep(#[from] IndepError),
    #[error("{0} side is empty")]
    EmptySide(&'static str),
    #[error("duplicate vertex id {0:?}")]
    DuplicateVertex(String),
    #[error("edge ({0}, {1}) out of range")]
    BadEdge(usize, usize),
    #[error("malformed graph document: {0}")]
    Format(String),
    #[error("plan is missing {0}")]
    IncompletePlan(&'static str),
    #[error("anchors are {m}-dependent")]
    DependentAnchors { m: u32 },
    #[error("{0}")]
    Precondition(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Anchors on both sides (Turan).
    Both,
    /// Anchors on the left only (Zarankiewicz).
    LeftOnly,
}

impl Orientation {
    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "both" => Some(Orientation::Both),
            "left_only" | "left-only" | "left" => Some(Orientation::LeftOnly),
            _ => None,
        }
    }
}

/// Where a graph came from: plan, trial seed and field.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GraphMeta {
    pub plan: ConstructionPlan,
    pub seed: u64,
    pub field: FieldSpec,
}

/// Bipartite graph with a distinguished left side; adjacency rows are
/// indexed by left vertex and hold bits for right vertices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SidedGraph {
    left: Vec<String>,
    right: Vec<String>,
    adjacency: Vec<FixedBitSet>,
    meta: Option<GraphMeta>,
}

impl SidedGraph {
    pub fn new(
        left: Vec<String>,
        right: Vec<String>,
        adjacency: Vec<FixedBitSet>,
        meta: Option<GraphMeta>,
    ) -> Result<Self, GraphError> {
        for side in [&left, &right] {
            let mut seen = HashSet::new();
            if let Some(dup) = side.iter().find(|id| !seen.insert(id.as_str())) {
                return Err(GraphError::DuplicateVertex(dup.clone()));
            }
        }
        if adjacency.len() != left.len() || adjacency.iter().any(|row| row.len() != right.len()) {
            return Err(GraphError::Format("adjacency shape does not match the sides".into()));
        }
        Ok(SidedGraph { left, right, adjacency, meta })
    }

    /// Graph on vertices `0..n_left` and `0..n_right` with ids "0", "1", ...
    pub fn from_edges(n_left: usize, n_right: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let mut adjacency = vec![FixedBitSet::with_capacity(n_right); n_left];
        for &(i, j) in edges {
            if i >= n_left || j >= n_right {
                return Err(GraphError::BadEdge(i, j));
            }
            adjacency[i].insert(j);
        }
        let ids = |n: usize| (0..n).map(|i| i.to_string()).collect();
        SidedGraph::new(ids(n_left), ids(n_right), adjacency, None)
    }

    pub fn complete(n_left: usize, n_right: usize) -> Self {
        let edges: Vec<(usize, usize)> = (0..n_left).flat_map(|i| (0..n_right).map(move |j| (i, j))).collect();
        SidedGraph::from_edges(n_left, n_right, &edges).expect("edges in range")
    }

    pub fn left(&self) -> &[String] {
        &self.left
    }

    pub fn right(&self) -> &[String] {
        &self.right
    }

    pub fn meta(&self) -> Option<&GraphMeta> {
        self.meta.as_ref()
    }

    pub fn neighbors(&self, left_vertex: usize) -> &FixedBitSet {
        &self.adjacency[left_vertex]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].contains(j)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|row| row.count_ones(..)).sum()
    }

    /// Edges as (left, right) pairs in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        self.adjacency.iter().enumerate().flat_map(|(i, row)| row.ones().map(move |j| (i, j))).collect()
    }

    /// Rows indexed by right vertex.
    pub fn transposed_rows(&self) -> Vec<FixedBitSet> {
        let mut cols = vec![FixedBitSet::with_capacity(self.left.len()); self.right.len()];
        for (i, row) in self.adjacency.iter().enumerate() {
            for j in row.ones() {
                cols[j].insert(i);
            }
        }
        cols
    }

    fn side_rows(&self, side: Side) -> Vec<FixedBitSet> {
        match side {
            Side::Left => self.adjacency.clone(),
            Side::Right => self.transposed_rows(),
        }
    }

    /// Graph file document; keys come out sorted.
    pub fn to_json(&self) -> Result<Value, GraphError> {
        let meta = self.meta.as_ref().ok_or(GraphError::Format("graph has no plan metadata".into()))?;
        Ok(json!({
            "kind": "sided",
            "field": { "p": meta.field.characteristic(), "k": meta.field.extension_degree() },
            "plan": meta.plan.to_json(),
            "seed": meta.seed,
            "left": self.left,
            "right": self.right,
            "edges": self.edges().iter().map(|(i, j)| json!([i, j])).collect::<Vec<_>>(),
        }))
    }

    /// Canonical file contents: compact JSON plus a trailing newline.
    pub fn to_file_string(&self) -> Result<String, GraphError> {
        Ok(format!("{}\n", serde_json::to_string(&self.to_json()?).expect("serializable")))
    }

    pub fn from_json(doc: &Value) -> Result<Self, GraphError> {
        let bad = |what: &str| GraphError::Format(what.to_string());
        if doc["kind"] != "sided" {
            return Err(bad("kind must be \"sided\""));
        }
        let p = doc["field"]["p"].as_u64().ok_or_else(|| bad("field.p"))?;
        let k = doc["field"]["k"].as_u64().and_then(|k| u32::try_from(k).ok()).ok_or_else(|| bad("field.k"))?;
        let field = make_field(p, k)?;
        let plan = ConstructionPlan::from_json(&doc["plan"])?;
        let seed = doc["seed"].as_u64().ok_or_else(|| bad("seed"))?;
        let ids = |key: &str| -> Result<Vec<String>, GraphError> {
            doc[key]
                .as_array()
                .ok_or_else(|| bad(key))?
                .iter()
                .map(|v| {
                    let id = v.as_str().ok_or_else(|| bad(key))?;
                    let point = ProjPoint::parse(&field, id)?;
                    if point.to_id(&field) != id {
                        return Err(bad("vertex id is not in canonical form"));
                    }
                    Ok(id.to_string())
                })
                .collect()
        };
        let (left, right) = (ids("left")?, ids("right")?);
        let mut adjacency = vec![FixedBitSet::with_capacity(right.len()); left.len()];
        let mut previous: Option<(usize, usize)> = None;
        for e in doc["edges"].as_array().ok_or_else(|| bad("edges"))? {
            let pair = e.as_array().filter(|a| a.len() == 2).ok_or_else(|| bad("edge"))?;
            let i = pair[0].as_u64().ok_or_else(|| bad("edge"))? as usize;
            let j = pair[1].as_u64().ok_or_else(|| bad("edge"))? as usize;
            if i >= left.len() || j >= right.len() {
                return Err(GraphError::BadEdge(i, j));
            }
            if previous.is_some_and(|prev| prev >= (i, j)) {
                return Err(bad("edges must be sorted and distinct"));
            }
            previous = Some((i, j));
            adjacency[i].insert(j);
        }
        SidedGraph::new(left, right, adjacency, Some(GraphMeta { plan, seed, field }))
    }
}

/// Largest common neighbourhood over s-subsets of one side.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CommonNeighborhood {
    pub side: Side,
    pub s: usize,
    pub size: usize,
    /// Canonically smallest maximizing subset (empty when the side has fewer than s vertices).
    pub subset: Vec<usize>,
    /// True when every s-subset was examined.
    pub certified: bool,
    #[serde(serialize_with = "ser_u128")]
    pub checked: u128,
    #[serde(serialize_with = "ser_u128")]
    pub total: u128,
}

/// Best (size, subset) in the branch of s-subsets starting at `first`;
/// ties resolve to the lexicographically smallest subset.
fn best_in_branch(rows: &[FixedBitSet], s: usize, first: usize) -> (usize, Vec<usize>) {
    fn dfs(
        rows: &[FixedBitSet],
        s: usize,
        chosen: &mut Vec<usize>,
        common: &FixedBitSet,
        best: &mut (usize, Vec<usize>),
    ) {
        if chosen.len() == s {
            let size = common.count_ones(..);
            if size > best.0 || best.1.is_empty() {
                *best = (size, chosen.clone());
            }
            return;
        }
        let start = chosen.last().map_or(0, |l| l + 1);
        let need = s - chosen.len();
        for next in start..=rows.len() - need {
            let mut narrowed = common.clone();
            narrowed.intersect_with(&rows[next]);
            // cannot beat the incumbent: later subsets only tie or lose
            if !best.1.is_empty() && narrowed.count_ones(..) <= best.0 {
                continue;
            }
            chosen.push(next);
            dfs(rows, s, chosen, &narrowed, best);
            chosen.pop();
        }
    }
    let mut best = (0, Vec::new());
    let mut chosen = vec![first];
    dfs(rows, s, &mut chosen, &rows[first], &mut best);
    best
}

/// Maximum over s-subsets of `side` of the number of common neighbours.
///
/// Within `budget` subsets the search is exhaustive and certified. Above it,
/// `budget` random subsets drawn from `sample_seed` give a non-certifying
/// lower bound.
pub fn max_common_neighborhood(
    g: &SidedGraph,
    s: usize,
    side: Side,
    budget: u128,
    sample_seed: u64,
) -> CommonNeighborhood {
    assert!(s >= 1, "subset size must be positive");
    let rows = g.side_rows(side);
    let n = rows.len();
    let total = binomial(n as u64, s as u64).unwrap_or(u128::MAX);
    if s > n {
        return CommonNeighborhood { side, s, size: 0, subset: Vec::new(), certified: true, checked: 0, total: 0 };
    }
    if total <= budget {
        let (size, subset) = (0..=n - s)
            .into_par_iter()
            .map(|first| best_in_branch(&rows, s, first))
            .reduce_with(|a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a })
            .expect("at least one branch");
        return CommonNeighborhood { side, s, size, subset, certified: true, checked: total, total };
    }
    let mut rng = SeededRng::new(sample_seed);
    let mut best: (usize, Vec<usize>) = (0, Vec::new());
    for _ in 0..budget {
        let sub = random_subset(n, s, &mut rng);
        let mut common = rows[sub[0]].clone();
        for v in &sub[1..] {
            common.intersect_with(&rows[*v]);
        }
        let size = common.count_ones(..);
        if best.1.is_empty() || size > best.0 || (size == best.0 && sub < best.1) {
            best = (size, sub);
        }
    }
    CommonNeighborhood { side, s, size: best.0, subset: best.1, certified: false, checked: budget, total }
}

/// Common neighbours of `subset` (taken on `side`), in index order.
pub fn common_neighbors(g: &SidedGraph, side: Side, subset: &[usize]) -> Vec<usize> {
    let rows = g.side_rows(side);
    let width = match side {
        Side::Left => g.right.len(),
        Side::Right => g.left.len(),
    };
    let mut common = FixedBitSet::with_capacity(width);
    common.insert_range(..);
    for v in subset {
        common.intersect_with(&rows[*v]);
    }
    common.ones().collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum KstVerdict {
    Free,
    Contains { side: Side, subset: Vec<usize>, neighbors: Vec<usize> },
    /// Some anchored side was too large to search exhaustively and no copy was found.
    Uncertified { side: Side },
}

impl KstVerdict {
    pub fn is_free(&self) -> bool {
        matches!(self, KstVerdict::Free)
    }
}

/// K_{s,t}-freeness with the s-side anchored as `orientation` prescribes.
pub fn kst_verdict(
    g: &SidedGraph,
    s: usize,
    t: &BigUint,
    orientation: Orientation,
    budget: u128,
    sample_seed: u64,
) -> KstVerdict {
    let sides: &[Side] = match orientation {
        Orientation::Both => &[Side::Left, Side::Right],
        Orientation::LeftOnly => &[Side::Left],
    };
    let mut uncertified = None;
    for &side in sides {
        let other = match side {
            Side::Left => g.right.len(),
            Side::Right => g.left.len(),
        };
        if *t > BigUint::from(other) {
            continue;
        }
        let t = usize::try_from(t).expect("t is at most a side size");
        let best = max_common_neighborhood(g, s, side, budget, sample_seed);
        if best.size >= t && !best.subset.is_empty() {
            let neighbors = common_neighbors(g, side, &best.subset).into_iter().take(t).collect();
            return KstVerdict::Contains { side, subset: best.subset, neighbors };
        }
        if !best.certified && uncertified.is_none() {
            uncertified = Some(side);
        }
    }
    match uncertified {
        Some(side) => KstVerdict::Uncertified { side },
        None => KstVerdict::Free,
    }
}

/// Edge count and the normalized densities used as acceptance measures.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub edges: usize,
    /// |E| / q^(2s-1), exact.
    pub edges_over_q_power: String,
    /// |E| / (c^2 q^(2s-1) / 2), exact (Turan plans).
    pub turan_ratio: Option<String>,
    /// |E| / (c q^(T/s+s-1) / 4) (Zarankiewicz plans).
    pub zarankiewicz_ratio: Option<String>,
    /// |E| / (|L| |R|^(1-1/s)).
    pub kst_ratio: String,
}

pub fn density_report(g: &SidedGraph, plan: &ConstructionPlan, q: u64) -> DensityReport {
    let e = g.edge_count();
    let s = plan.s;
    let q_pow = BigUint::from(q).pow(2 * s - 1);
    let edges_over_q_power = ratio_string(&Ratio::new(BigUint::from(e), q_pow.clone()));
    let (cn, cd) = (BigUint::from(*plan.c.numer()), BigUint::from(*plan.c.denom()));
    let turan_ratio = (plan.kind == GraphKind::Turan && !plan.c.numer().eq(&0)).then(|| {
        ratio_string(&Ratio::new(BigUint::from(2 * e) * &cd * &cd, &cn * &cn * q_pow))
    });
    let zarankiewicz_ratio = match (plan.kind, plan.t_target) {
        (GraphKind::Zarankiewicz, Some(t_target)) if *plan.c.numer() != 0 => {
            let c = *plan.c.numer() as f64 / *plan.c.denom() as f64;
            let exponent = t_target as f64 / s as f64 + s as f64 - 1.0;
            Some(decimal(4.0 * e as f64 / (c * (q as f64).powf(exponent))))
        }
        _ => None,
    };
    let (l, r) = (g.left.len() as f64, g.right.len() as f64);
    let kst = if e == 0 { 0.0 } else { e as f64 / (l * r.powf(1.0 - 1.0 / s as f64)) };
    DensityReport { edges: e, edges_over_q_power, turan_ratio, zarankiewicz_ratio, kst_ratio: decimal(kst) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::make_field;
    use crate::projgeom::enumerate_projective;
    use proptest::prelude::*;

    /// Point-line incidence graph of the Fano plane P^2(F_2).
    fn fano() -> SidedGraph {
        let f2 = make_field(2, 1).unwrap();
        let pts = enumerate_projective(&f2, 2).unwrap();
        let mut edges = Vec::new();
        for (i, p) in pts.iter().enumerate() {
            for (j, l) in pts.iter().enumerate() {
                let dot = p.coords().iter().zip(l.coords()).map(|(a, b)| a.0 * b.0).sum::<u32>() % 2;
                if dot == 0 {
                    edges.push((i, j));
                }
            }
        }
        SidedGraph::from_edges(7, 7, &edges).unwrap()
    }

    fn brute_max(g: &SidedGraph, s: usize, side: Side) -> usize {
        let n = match side {
            Side::Left => g.left().len(),
            Side::Right => g.right().len(),
        };
        crate::independence::Combinations::new(n, s)
            .map(|sub| common_neighbors(g, side, &sub).len())
            .max()
            .unwrap_or(0)
    }

    #[test]
    fn common_neighborhood_examples() {
        let k23 = SidedGraph::complete(2, 3);
        assert_eq!(max_common_neighborhood(&k23, 2, Side::Left, 1000, 0).size, 3);
        let empty = SidedGraph::from_edges(4, 4, &[]).unwrap();
        let best = max_common_neighborhood(&empty, 2, Side::Left, 1000, 0);
        assert_eq!((best.size, best.subset.clone()), (0, vec![0, 1]));
        let fano = fano();
        assert_eq!(fano.edge_count(), 21);
        assert_eq!(max_common_neighborhood(&fano, 2, Side::Left, 1000, 0).size, 1);
        assert_eq!(max_common_neighborhood(&fano, 2, Side::Right, 1000, 0).size, 1);
        assert_eq!(max_common_neighborhood(&fano, 3, Side::Left, 1000, 0).size, 1);
    }

    #[test]
    fn kst_examples() {
        let k22 = SidedGraph::complete(2, 2);
        let v = kst_verdict(&k22, 2, &BigUint::from(2u32), Orientation::Both, 1000, 0);
        assert_eq!(v, KstVerdict::Contains { side: Side::Left, subset: vec![0, 1], neighbors: vec![0, 1] });
        assert!(kst_verdict(&fano(), 2, &BigUint::from(2u32), Orientation::Both, 1000, 0).is_free());
        let dense = SidedGraph::complete(5, 3);
        assert!(kst_verdict(&dense, 2, &BigUint::from(4u32), Orientation::LeftOnly, 1000, 0).is_free());
        assert!(!kst_verdict(&dense, 2, &BigUint::from(4u32), Orientation::Both, 1000, 0).is_free());
    }

    #[test]
    fn over_budget_search_never_certifies() {
        let fano = fano();
        let best = max_common_neighborhood(&fano, 2, Side::Left, 5, 7);
        assert!(!best.certified);
        assert_eq!(best.checked, 5);
        let v = kst_verdict(&fano, 2, &BigUint::from(2u32), Orientation::Both, 5, 7);
        assert!(matches!(v, KstVerdict::Uncertified { side: Side::Left }));
        // a copy found by sampling is still a valid witness
        let k = SidedGraph::complete(6, 6);
        assert!(matches!(
            kst_verdict(&k, 2, &BigUint::from(3u32), Orientation::Both, 2, 7),
            KstVerdict::Contains { .. }
        ));
    }

    #[test]
    fn density_examples() {
        let plan = plan_construction(
            GraphKind::Turan,
            2,
            PlanMode::Desk,
            &PlanOverrides { m: Some(3), r: Some(1), z: Some(1), ..Default::default() },
        )
        .unwrap();
        let empty = SidedGraph::from_edges(3, 3, &[]).unwrap();
        let d = density_report(&empty, &plan, 7);
        assert_eq!(d.turan_ratio.as_deref(), Some("0/1"));
        assert_eq!(d.kst_ratio, decimal(0.0));
        let full = SidedGraph::complete(4, 9);
        let d = density_report(&full, &plan, 7);
        assert_eq!(d.kst_ratio, decimal(3.0));
        // 36 edges, c = 1/4, q = 7: 2 * 36 * 16 / 343
        assert_eq!(d.turan_ratio.as_deref(), Some("1152/343"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]
        #[test]
        fn search_matches_brute_force_and_is_monotone(
            n_left in 1usize..9, n_right in 1usize..9, s in 1usize..4,
            density in 0u64..4, seed in any::<u64>(),
        ) {
            let mut rng = SeededRng::new(seed);
            let edges: Vec<(usize, usize)> = (0..n_left)
                .flat_map(|i| (0..n_right).map(move |j| (i, j)))
                .filter(|_| rng.below(4) < density)
                .collect();
            let g = SidedGraph::from_edges(n_left, n_right, &edges).unwrap();
            for side in [Side::Left, Side::Right] {
                let best = max_common_neighborhood(&g, s, side, 1 << 20, 0);
                prop_assert_eq!(best.size, brute_max(&g, s, side));
                if !best.subset.is_empty() {
                    prop_assert_eq!(common_neighbors(&g, side, &best.subset).len(), best.size);
                }
            }
            let mut was_free = false;
            for t in 1..=n_left.max(n_right) + 1 {
                let v = kst_verdict(&g, s, &BigUint::from(t), Orientation::Both, 1 << 20, 0);
                if let KstVerdict::Contains { side, subset, neighbors } = &v {
                    prop_assert_eq!(neighbors.len(), t);
                    let common = common_neighbors(&g, *side, subset);
                    prop_assert!(neighbors.iter().all(|x| common.contains(x)));
                }
                prop_assert!(!(was_free && !v.is_free()));
                was_free = v.is_free();
            }
        }
    }
}
