//! Turan and Zarankiewicz constructions, one trial per seed, and the
//! recomputable graph checks that decide PASS.

use fixedbitset::FixedBitSet;
use num_bigint::BigUint;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{
    density_report, kst_verdict, max_common_neighborhood, plan::turan_side_target, plan::zar_left_size,
    CommonNeighborhood, ConstructionPlan, DensityReport, GraphError, GraphKind, GraphMeta, KstVerdict, Orientation,
    Side, SidedGraph,
};
use crate::gfarith::FieldSpec;
use crate::independence::{power_rank, s_wise_independent, Verdict, DEFAULT_SUBSET_BUDGET};
use crate::polyrand::{derive_seed, BiHomPoly, HomPoly, SeededRng};
use crate::projgeom::{enumerate_multiindices, monomial_row, ProjPoint};
use crate::variety::{build_independent_variety, fq_points, BuildConfig, VarietySpec};

/// Stream tags under a trial seed.
const W_STREAM: u64 = 0;
const LEFT_CUT_STREAM: u64 = 1;
const RIGHT_CUT_STREAM: u64 = 2;
const EDGE_STREAM: u64 = 3;
const SAMPLE_STREAM: u64 = 4;

#[derive(Clone, Debug)]
pub struct ConstructConfig {
    pub build: BuildConfig,
    /// Subset budget for the common-neighbourhood search.
    pub subset_budget: u128,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig { build: BuildConfig::default(), subset_budget: DEFAULT_SUBSET_BUDGET }
    }
}

/// Everything that can be recomputed from the graph file alone.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphChecks {
    pub left_size: usize,
    pub right_size: usize,
    pub size_target: String,
    pub sizes_ok: bool,
    pub edges_ok: bool,
    pub max_common_left: CommonNeighborhood,
    pub max_common_right: Option<CommonNeighborhood>,
    pub density: DensityReport,
    pub t: String,
    pub orientation: Orientation,
    pub kst: KstVerdict,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialReport {
    pub seed: u64,
    pub graph_checks: GraphChecks,
    pub construction: Value,
}

impl TrialReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("serializable")
    }
}

fn plan_q(plan: &ConstructionPlan) -> Result<u64, GraphError> {
    plan.q.ok_or(GraphError::IncompletePlan("q"))
}

/// Size, edge and K_{s,t} checks for a constructed graph.
///
/// Turan: both sides reach floor(c q^s), 2|E| >= c^2 q^(2s-1), and no K_{s,t}
/// with t = t_threshold anchored on either side. Zarankiewicz: the left side
/// has floor(c q^(T/s)) vertices, the right side is nonempty,
/// 4|E| >= c q^(T/s+s-1), and no left-anchored K_{s,t}.
pub fn compute_graph_checks(g: &SidedGraph, budget: u128) -> Result<GraphChecks, GraphError> {
    let meta = g.meta().ok_or(GraphError::Format("graph has no plan metadata".into()))?;
    let plan = &meta.plan;
    let q = meta.field.order() as u64;
    let s = plan.s as usize;
    let e = BigUint::from(g.edge_count());
    let (cn, cd) = (BigUint::from(*plan.c.numer()), BigUint::from(*plan.c.denom()));
    let sample_seed = derive_seed(meta.seed, SAMPLE_STREAM);
    let (left_size, right_size) = (g.left().len(), g.right().len());
    let (size_target, sizes_ok, edges_ok, orientation) = match plan.kind {
        GraphKind::Turan => {
            let target = turan_side_target(plan.c, q, plan.s);
            let sizes_ok = BigUint::from(left_size) == target && BigUint::from(right_size) == target;
            let edges_ok = BigUint::from(2u32) * &e * &cd * &cd >= &cn * &cn * BigUint::from(q).pow(2 * plan.s - 1);
            (target, sizes_ok, edges_ok, Orientation::Both)
        }
        GraphKind::Zarankiewicz => {
            let t_target = plan.t_target.ok_or(GraphError::IncompletePlan("T"))?;
            let target = zar_left_size(plan.c, q, t_target, plan.s);
            let sizes_ok = BigUint::from(left_size) == target && right_size > 0;
            // (4|E| cd)^s >= cn^s q^(T + s(s-1))
            let lhs = (BigUint::from(4u32) * &e * &cd).pow(plan.s);
            let rhs = cn.pow(plan.s) * BigUint::from(q).pow(t_target + plan.s * (plan.s - 1));
            (target, sizes_ok, lhs >= rhs, Orientation::LeftOnly)
        }
    };
    let max_common_left = max_common_neighborhood(g, s, Side::Left, budget, sample_seed);
    let max_common_right = (orientation == Orientation::Both)
        .then(|| max_common_neighborhood(g, s, Side::Right, budget, sample_seed));
    let kst = kst_verdict(g, s, &plan.t_threshold, orientation, budget, sample_seed);
    let pass = sizes_ok && edges_ok && kst.is_free();
    Ok(GraphChecks {
        left_size,
        right_size,
        size_target: size_target.to_string(),
        sizes_ok,
        edges_ok,
        max_common_left,
        max_common_right,
        density: density_report(g, plan, q),
        t: plan.t_threshold.to_string(),
        orientation,
        kst,
        pass,
    })
}

/// Adjacency rows: left vertex l joined to right vertex w iff g(l, w) = 0.
fn adjacency(field: &FieldSpec, g: &BiHomPoly, left: &[ProjPoint], right: &[ProjPoint]) -> Vec<FixedBitSet> {
    let (a, _) = g.dims();
    let xs = enumerate_multiindices(a, g.bidegree().0).expect("shape already validated");
    left.par_iter()
        .map(|l| {
            let eval = g.specialize_row(field, &monomial_row(field, l, &xs)).evaluator();
            let mut row = FixedBitSet::with_capacity(right.len());
            let mut scratch = Vec::new();
            for (j, w) in right.iter().enumerate() {
                if eval.eval(field, w.coords(), &mut scratch).is_zero() {
                    row.insert(j);
                }
            }
            row
        })
        .collect()
}

fn cut_forms(field: &FieldSpec, b: usize, degrees: &[u32], rng: &mut SeededRng) -> Vec<HomPoly> {
    degrees.iter().map(|d| HomPoly::random(field, b, *d, rng)).collect()
}

fn vanish_on(field: &FieldSpec, points: &[ProjPoint], forms: &[HomPoly]) -> Vec<ProjPoint> {
    let evals: Vec<_> = forms.iter().map(HomPoly::evaluator).collect();
    points
        .par_iter()
        .filter(|p| {
            let mut scratch = Vec::new();
            evals.iter().all(|e| e.eval(field, p.coords(), &mut scratch).is_zero())
        })
        .cloned()
        .collect()
}

fn ids(field: &FieldSpec, points: &[ProjPoint]) -> Vec<String> {
    points.iter().map(|p| p.to_id(field)).collect()
}

/// One Turan trial: W from Z random forms, both sides cut from W by r
/// further forms of degrees delta, truncated to floor(c q^s) in canonical
/// order, edges from a random bidegree-(m, m) form.
pub fn construct_turan(
    field: &FieldSpec,
    plan: &ConstructionPlan,
    seed: u64,
    config: &ConstructConfig,
) -> Result<(SidedGraph, TrialReport), GraphError> {
    if plan.kind != GraphKind::Turan {
        return Err(GraphError::Precondition("plan is not a Turan plan".into()));
    }
    let z = plan.z.ok_or(GraphError::IncompletePlan("Z"))? as usize;
    let q = plan_q(plan)?;
    if q != field.order() as u64 {
        return Err(GraphError::Precondition(format!("plan has q = {q}, field has order {}", field.order())));
    }
    let (b, s, m) = (plan.b as usize, plan.s as usize, plan.m);
    let rng = SeededRng::new(seed);
    let (w, cert, w_points) = build_independent_variety(field, b, m, z, s, &rng.substream(W_STREAM), &config.build)?;
    let h = cut_forms(field, b, &plan.delta, &mut rng.substream(LEFT_CUT_STREAM));
    let h_prime = cut_forms(field, b, &plan.delta, &mut rng.substream(RIGHT_CUT_STREAM));
    let mut left = vanish_on(field, &w_points, &h);
    let mut right = vanish_on(field, &w_points, &h_prime);
    let (left_available, right_available) = (left.len(), right.len());
    let target = usize::try_from(turan_side_target(plan.c, q, plan.s)).unwrap_or(usize::MAX);
    left.truncate(target);
    right.truncate(target);
    if left.is_empty() {
        return Err(GraphError::EmptySide("left"));
    }
    if right.is_empty() {
        return Err(GraphError::EmptySide("right"));
    }
    let g = BiHomPoly::random(field, b, b, m, m, &mut rng.substream(EDGE_STREAM));
    let rows = adjacency(field, &g, &left, &right);
    let meta = GraphMeta { plan: plan.clone(), seed, field: field.clone() };
    let graph = SidedGraph::new(ids(field, &left), ids(field, &right), rows, Some(meta))?;
    let checks = compute_graph_checks(&graph, config.subset_budget)?;
    let mut right_variety = w.clone();
    for f in &h_prime {
        right_variety.push(f.clone())?;
    }
    let residual_ledger = right_variety.degree_ledger() * (m as u128).pow(s as u32);
    let construction = json!({
        "variety": cert,
        "w_degree_ledger": w.degree_ledger().to_string(),
        "w_points": w_points.len(),
        "left_available": left_available,
        "right_available": right_available,
        "residual_degree_ledger": residual_ledger.to_string(),
    });
    Ok((graph, TrialReport { seed, graph_checks: checks, construction }))
}

/// One Zarankiewicz trial: the left side is the first floor(c q^(T/s))
/// coordinate points of P^a, the right side is V(h'_1..h'_r) in P^b.
pub fn construct_zar(
    field: &FieldSpec,
    plan: &ConstructionPlan,
    seed: u64,
    config: &ConstructConfig,
) -> Result<(SidedGraph, TrialReport), GraphError> {
    if plan.kind != GraphKind::Zarankiewicz {
        return Err(GraphError::Precondition("plan is not a Zarankiewicz plan".into()));
    }
    let q = plan_q(plan)?;
    if q != field.order() as u64 {
        return Err(GraphError::Precondition(format!("plan has q = {q}, field has order {}", field.order())));
    }
    let t_target = plan.t_target.ok_or(GraphError::IncompletePlan("T"))?;
    let left_size = usize::try_from(zar_left_size(plan.c, q, t_target, plan.s))
        .map_err(|_| GraphError::Precondition("left side too large".into()))?;
    let a = plan.a.map_or(left_size, |a| a as usize);
    if left_size > a + 1 {
        return Err(GraphError::Precondition(format!("|L| = {left_size} exceeds a + 1 = {}", a + 1)));
    }
    if left_size == 0 {
        return Err(GraphError::EmptySide("left"));
    }
    let (b, s, m) = (plan.b as usize, plan.s as usize, plan.m);
    let rng = SeededRng::new(seed);
    let left: Vec<ProjPoint> = (0..left_size).map(|i| ProjPoint::coordinate(a, i)).collect();
    let h_prime = cut_forms(field, b, &plan.delta, &mut rng.substream(RIGHT_CUT_STREAM));
    let right_variety = VarietySpec::new(b, h_prime)?;
    let right = fq_points(&right_variety, field, config.build.point_cap)?;
    if right.is_empty() {
        return Err(GraphError::EmptySide("right"));
    }
    let independence = s_wise_independent(field, &left, s, m, config.subset_budget)?;
    let power_check = if field.characteristic() > m {
        let rank = power_rank(field, &left, m)?;
        json!({ "status": if rank == left.len() { "agrees" } else { "disagrees" }, "power_rank": rank })
    } else {
        json!({ "status": "skipped", "reason": "characteristic does not exceed m" })
    };
    let g = BiHomPoly::random(field, a, b, m, m, &mut rng.substream(EDGE_STREAM));
    let rows = adjacency(field, &g, &left, &right);
    let meta = GraphMeta { plan: plan.clone(), seed, field: field.clone() };
    let graph = SidedGraph::new(ids(field, &left), ids(field, &right), rows, Some(meta))?;
    let checks = compute_graph_checks(&graph, config.subset_budget)?;
    let construction = json!({
        "left_independence": independence,
        "left_independent": independence.verdict == Verdict::Independent,
        "power_rank_cross_check": power_check,
        "right_degree_ledger": right_variety.degree_ledger().to_string(),
        "residual_degree_ledger": (right_variety.degree_ledger() * (m as u128).pow(s as u32)).to_string(),
    });
    Ok((graph, TrialReport { seed, graph_checks: checks, construction }))
}

/// Dispatches on the plan kind.
pub fn construct(
    field: &FieldSpec,
    plan: &ConstructionPlan,
    seed: u64,
    config: &ConstructConfig,
) -> Result<(SidedGraph, TrialReport), GraphError> {
    match plan.kind {
        GraphKind::Turan => construct_turan(field, plan, seed, config),
        GraphKind::Zarankiewicz => construct_zar(field, plan, seed, config),
    }
}
