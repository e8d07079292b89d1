//! Subcommand bodies. Each returns the JSON document to print and whether
//! the run counts as a certified pass.

use std::fs;
use std::path::{Path, PathBuf};

use kst_core::acceptance;
use kst_core::gfarith::field_of_order;
use kst_core::graphs::{
    compute_graph_checks, construct, density_report, kst_verdict, plan_construction, ConstructConfig,
    ConstructionPlan, GraphError, KstVerdict, Orientation, SidedGraph,
};
use kst_core::independence::{dependence_classify, hilbert_rank, s_wise_independent, Verdict, DEFAULT_SUBSET_BUDGET};
use kst_core::polyrand::derive_seed;
use kst_core::projgeom::ProjPoint;
use kst_core::report::decimal;
use kst_core::variety::VarietyError;
use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::config::{CommandConfig, Subcommand};
use crate::{write_atomic, CliError};

pub struct Outcome {
    pub document: Value,
    pub pass: bool,
    /// Progress lines for stderr.
    pub log: Vec<String>,
}

impl Outcome {
    fn new(document: Value, pass: bool) -> Self {
        Outcome { document, pass, log: Vec::new() }
    }
}

pub fn run(config: &CommandConfig) -> Result<Outcome, CliError> {
    match config.subcommand {
        Subcommand::Plan => plan(config),
        Subcommand::Construct => construct_graph(config),
        Subcommand::Verify => verify(config),
        Subcommand::Indep => indep(config),
        Subcommand::Sweep => sweep(config),
        Subcommand::Selftest => selftest(config),
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn build_plan(config: &CommandConfig, q: Option<u64>) -> Result<ConstructionPlan, CliError> {
    let inputs = config.plan_inputs_for(q)?;
    Ok(plan_construction(inputs.kind, inputs.s, inputs.mode, &inputs.overrides)?)
}

fn construct_config(config: &CommandConfig) -> ConstructConfig {
    let mut c = ConstructConfig::default();
    if let Some(subsets) = config.budgets.subsets {
        c.subset_budget = subsets as u128;
        c.build.subset_budget = subsets as u128;
    }
    if let Some(points) = config.budgets.points {
        c.build.point_cap = points;
        c.build.probe_cap = points;
    }
    c
}

fn plan(config: &CommandConfig) -> Result<Outcome, CliError> {
    Ok(Outcome::new(build_plan(config, None)?.to_json(), true))
}

/// Sibling path of the trial report: `g.json` becomes `g.report.json`.
pub fn report_path(graph: &Path) -> PathBuf {
    let stem = graph.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    graph.with_file_name(format!("{stem}.report.json"))
}

enum Trial {
    Built(Box<(SidedGraph, kst_core::graphs::TrialReport)>),
    Uncertified(String),
}

fn run_trial(
    field: &kst_core::gfarith::FieldSpec,
    plan: &ConstructionPlan,
    seed: u64,
    cfg: &ConstructConfig,
) -> Result<Trial, CliError> {
    match construct(field, plan, seed, cfg) {
        Ok(built) => Ok(Trial::Built(Box::new(built))),
        Err(e @ GraphError::Variety(VarietyError::CertificationFailed { .. })) => Ok(Trial::Uncertified(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn construct_graph(config: &CommandConfig) -> Result<Outcome, CliError> {
    let plan = build_plan(config, None)?;
    let q = plan.q.ok_or_else(|| usage("construct needs --q or --n"))?;
    let field = field_of_order(q)?;
    let cfg = construct_config(config);
    let master = config.seed.expect("validated");
    let out = config.out.as_ref().expect("validated");
    let mut log = Vec::new();
    let mut kept = None;
    for i in 0..config.budgets.trials.unwrap_or(1) {
        let seed = derive_seed(master, i as u64);
        match run_trial(&field, &plan, seed, &cfg)? {
            Trial::Built(built) => {
                let pass = built.1.graph_checks.pass;
                log.push(json!({"seed": seed, "pass": pass}));
                kept = Some(built);
                if pass {
                    break;
                }
            }
            Trial::Uncertified(reason) => log.push(json!({"seed": seed, "pass": false, "error": reason})),
        }
    }
    let mut document = json!({"plan": plan.to_json(), "master_seed": master, "trials": log});
    let Some(built) = kept else {
        document["pass"] = json!(false);
        return Ok(Outcome::new(document, false));
    };
    let (graph, report) = *built;
    let pass = report.graph_checks.pass;
    write_atomic(out, graph.to_file_string()?.as_bytes())?;
    let report_file = report_path(out);
    write_atomic(&report_file, pretty(&report.to_json()).as_bytes())?;
    document["pass"] = json!(pass);
    document["graph"] = json!(out.display().to_string());
    document["report"] = json!(report_file.display().to_string());
    Ok(Outcome::new(document, pass))
}

fn read(path: &str) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.into(), source })
}

fn verify(config: &CommandConfig) -> Result<Outcome, CliError> {
    let path = config.require("graph")?;
    let doc: Value = serde_json::from_str(&read(path)?)?;
    let graph = SidedGraph::from_json(&doc)?;
    let budget = config.budgets.subsets.map_or(DEFAULT_SUBSET_BUDGET, u128::from);
    let mut document = json!({"graph": path, "edges": graph.edge_count()});
    let mut pass = None;
    if let Some(meta) = graph.meta() {
        let checks = compute_graph_checks(&graph, budget)?;
        pass = Some(checks.pass);
        document["density"] = serde_json::to_value(density_report(&graph, &meta.plan, meta.field.order() as u64))?;
        document["graph_checks"] = serde_json::to_value(&checks)?;
    }
    if let (Some(s), Some(t)) = (config.opt_u32("s")?, config.opt_u64("t")?) {
        let orientation = config.orientation()?.unwrap_or(Orientation::Both);
        let sample_seed = config.seed.or(graph.meta().map(|m| m.seed)).unwrap_or(0);
        let verdict = kst_verdict(&graph, s as usize, &BigUint::from(t), orientation, budget, sample_seed);
        pass = Some(verdict == KstVerdict::Free);
        document["kst"] = json!({
            "s": s,
            "t": t,
            "orientation": orientation,
            "verdict": serde_json::to_value(&verdict)?,
        });
    }
    let pass = pass.ok_or_else(|| usage("graph has no plan; give --s and --t"))?;
    document["pass"] = json!(pass);
    Ok(Outcome::new(document, pass))
}

fn indep(config: &CommandConfig) -> Result<Outcome, CliError> {
    let path = config.require("points")?;
    let field = field_of_order(config.require_u64("q")?)?;
    let m = config.require_u64("m")? as u32;
    let points = read(path)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| ProjPoint::parse(&field, l))
        .collect::<Result<Vec<_>, _>>()?;
    if points.is_empty() {
        return Err(usage(format!("{path}: no points")));
    }
    let mut document = json!({"points": points.len(), "m": m, "q": field.order()});
    let mut pass;
    if points.len() >= 2 {
        let report = dependence_classify(&field, &points, m)?;
        let kernel: Vec<Vec<String>> = report
            .kernel_basis
            .iter()
            .map(|v| v.iter().map(|c| field.coords(*c).iter().map(u32::to_string).collect::<Vec<_>>().join(",")).collect())
            .collect();
        pass = !report.dependent;
        document["hilbert_rank"] = json!(report.hilbert_rank);
        document["dependent"] = json!(report.dependent);
        document["minimal"] = json!(report.minimal);
        document["kernel_basis"] = json!(kernel);
    } else {
        document["hilbert_rank"] = json!(hilbert_rank(&field, &points, m)?);
        document["dependent"] = json!(false);
        pass = true;
    }
    if let Some(s) = config.opt_u32("s")? {
        if s == 0 || s as usize > points.len() {
            return Err(usage(format!("--s must lie in 1..={}", points.len())));
        }
        let budget = config.budgets.subsets.map_or(DEFAULT_SUBSET_BUDGET, u128::from);
        let report = s_wise_independent(&field, &points, s as usize, m, budget)?;
        pass = report.verdict == Verdict::Independent;
        document["verdict"] = serde_json::to_value(report.verdict)?;
        document["s_wise"] = serde_json::to_value(&report)?;
    }
    document["pass"] = json!(pass);
    Ok(Outcome::new(document, pass))
}

fn sweep(config: &CommandConfig) -> Result<Outcome, CliError> {
    let mut qs = config.q_list()?;
    if qs.is_empty() {
        qs.push(build_plan(config, None)?.q.ok_or_else(|| usage("sweep needs --q or --n"))?);
    }
    let cfg = construct_config(config);
    let master = config.seed.expect("validated");
    let trials = config.budgets.trials.unwrap_or(20);
    let mut rows = Vec::new();
    let mut all_pass = true;
    for q in qs {
        let plan = build_plan(config, Some(q))?;
        let field = field_of_order(q)?;
        let (mut passes, mut uncertified, mut edges) = (Vec::new(), 0u32, Vec::new());
        for i in 0..trials {
            let seed = derive_seed(master, i as u64);
            match run_trial(&field, &plan, seed, &cfg)? {
                Trial::Built(built) => {
                    edges.push(built.0.edge_count() as f64);
                    if built.1.graph_checks.pass {
                        passes.push(seed);
                    }
                }
                Trial::Uncertified(_) => uncertified += 1,
            }
        }
        all_pass &= !passes.is_empty();
        let mean_edges = (!edges.is_empty()).then(|| decimal(edges.iter().sum::<f64>() / edges.len() as f64));
        rows.push(json!({
            "q": q,
            "plan": plan.to_json(),
            "trials": trials,
            "passes": passes.len(),
            "pass_rate": decimal(passes.len() as f64 / trials.max(1) as f64),
            "uncertified_varieties": uncertified,
            "mean_edges": mean_edges,
            "passing_seeds": passes,
        }));
    }
    let document = json!({"master_seed": master, "grid": rows, "pass": all_pass});
    Ok(Outcome::new(document, all_pass))
}

fn selftest(config: &CommandConfig) -> Result<Outcome, CliError> {
    let mut rows = Vec::new();
    let mut log = Vec::new();
    let mut all = true;
    for id in config.criteria()? {
        let outcome = acceptance::run(id);
        log.push(outcome.line());
        all &= outcome.passed;
        rows.push(json!({
            "criterion": id,
            "title": outcome.title,
            "pass": outcome.passed,
            "detail": outcome.detail,
            "seconds": decimal(outcome.elapsed.as_secs_f64()),
        }));
    }
    Ok(Outcome { document: json!({"criteria": rows, "pass": all}), pass: all, log })
}

pub fn pretty(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}
