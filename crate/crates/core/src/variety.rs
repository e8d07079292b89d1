//! Projective varieties V(f_1, ..., f_k) over GF(q): rational points,
//! dimension probing by extension-field counts, the random s-wise
//! m-independent variety builder, residual varieties and the concentration
//! harness for random cuts.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::{binomial, checked_pow};
use crate::gfarith::{make_field_with_cap, FieldElem, FieldError, FieldSpec, DEFAULT_ORDER_CAP};
use crate::independence::{s_wise_independent, s_wise_sampled, z_condition, IndepError, SWiseReport, Verdict, ZVerdict};
use crate::polyrand::{BiHomPoly, HomPoly, PolyError, PolyEvaluator, SeededRng};
use crate::projgeom::{
    enumerate_multiindices, monomial_row, point_at, projective_count, GeomError, ProjPoint, DEFAULT_POINT_CAP,
};
use crate::report::{ser_decimal, ser_opt_decimal, ser_u128};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum VarietyError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Indep(#[from] IndepError),
    #[error("generator in P^{got} does not live in P^{expected}")]
    AmbientMismatch { expected: usize, got: usize },
    #[error("degree ledger overflows")]
    LedgerOverflow,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("Z-condition not met ({0:?}) and not waived")]
    ZCondition(ZVerdict),
    #[error("no certified variety within {attempts} attempts: {failures:?}")]
    CertificationFailed { attempts: u32, failures: FailureTally },
    #[error("point set is empty")]
    EmptyPopulation,
}

/// V(generators) in P^b with its Bezout budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarietySpec {
    ambient_dim: usize,
    generators: Vec<HomPoly>,
    degree_ledger: u128,
}

impl VarietySpec {
    /// All of P^b.
    pub fn ambient(b: usize) -> Self {
        VarietySpec { ambient_dim: b, generators: Vec::new(), degree_ledger: 1 }
    }

    pub fn new(b: usize, generators: Vec<HomPoly>) -> Result<Self, VarietyError> {
        let mut vs = VarietySpec::ambient(b);
        for g in generators {
            vs.push(g)?;
        }
        Ok(vs)
    }

    pub fn push(&mut self, generator: HomPoly) -> Result<(), VarietyError> {
        if generator.ambient_dim() != self.ambient_dim {
            return Err(VarietyError::AmbientMismatch { expected: self.ambient_dim, got: generator.ambient_dim() });
        }
        self.degree_ledger =
            self.degree_ledger.checked_mul(generator.degree() as u128).ok_or(VarietyError::LedgerOverflow)?;
        self.generators.push(generator);
        Ok(())
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn generators(&self) -> &[HomPoly] {
        &self.generators
    }

    /// Product of generator degrees.
    pub fn degree_ledger(&self) -> u128 {
        self.degree_ledger
    }

    pub fn contains(&self, field: &FieldSpec, p: &ProjPoint) -> Result<bool, VarietyError> {
        for g in &self.generators {
            if !g.evaluate(field, p)?.is_zero() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Coefficients pushed through a field map, e.g. an embedding.
    pub fn map_coeffs(&self, map: &[FieldElem]) -> VarietySpec {
        VarietySpec {
            ambient_dim: self.ambient_dim,
            generators: self.generators.iter().map(|g| g.map_coeffs(map)).collect(),
            degree_ledger: self.degree_ledger,
        }
    }

    pub fn to_json(&self, field: &FieldSpec) -> Value {
        json!({
            "b": self.ambient_dim,
            "degree_ledger": self.degree_ledger.to_string(),
            "generators": self.generators.iter().map(|g| g.to_json(field)).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(field: &FieldSpec, doc: &Value) -> Result<Self, VarietyError> {
        let bad = |what: &str| VarietyError::Poly(PolyError::Format(what.to_string()));
        let b = doc["b"].as_u64().ok_or_else(|| bad("missing b"))? as usize;
        let gens = doc["generators"]
            .as_array()
            .ok_or_else(|| bad("missing generators"))?
            .iter()
            .map(|g| HomPoly::from_json(field, g))
            .collect::<Result<Vec<_>, _>>()?;
        VarietySpec::new(b, gens)
    }
}

fn evaluators(vs: &VarietySpec) -> Vec<PolyEvaluator> {
    vs.generators.iter().map(HomPoly::evaluator).filter(|e| !e.is_zero()).collect()
}

fn ambient_count(field: &FieldSpec, b: usize, cap: u64) -> Result<u64, GeomError> {
    let count = projective_count(field.order() as u64, b).unwrap_or(u128::MAX);
    if count > cap as u128 {
        return Err(GeomError::CapExceeded { what: "projective space", count, cap });
    }
    Ok(count as u64)
}

/// Canonical F_q-points of `vs`, in enumeration order.
pub fn fq_points(vs: &VarietySpec, field: &FieldSpec, cap: u64) -> Result<Vec<ProjPoint>, VarietyError> {
    let b = vs.ambient_dim;
    let count = ambient_count(field, b, cap)?;
    let evals = evaluators(vs);
    let q = field.order() as u64;
    Ok((0..count as usize)
        .into_par_iter()
        .with_min_len(1024)
        .map_init(
            || (vec![FieldElem::ZERO; b + 1], Vec::new()),
            |(buf, scratch), i| {
                point_at(q, b, i as u128, buf);
                evals
                    .iter()
                    .all(|e| e.eval(field, buf, scratch).is_zero())
                    .then(|| ProjPoint::from_canonical(buf.to_vec()))
            },
        )
        .flatten()
        .collect())
}

/// |V(F_q)| without materializing the points.
pub fn count_points(vs: &VarietySpec, field: &FieldSpec, cap: u64) -> Result<u128, VarietyError> {
    let b = vs.ambient_dim;
    let count = ambient_count(field, b, cap)?;
    let evals = evaluators(vs);
    if evals.is_empty() {
        return Ok(count as u128);
    }
    let q = field.order() as u64;
    Ok((0..count as usize)
        .into_par_iter()
        .with_min_len(4096)
        .map_init(
            || (vec![FieldElem::ZERO; b + 1], Vec::new()),
            |(buf, scratch), i| {
                point_at(q, b, i as u128, buf);
                evals.iter().all(|e| e.eval(field, buf, scratch).is_zero()) as u128
            },
        )
        .sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Confidence {
    High,
    Low,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DimensionEstimate {
    /// (extension degree e, |V(F_{q^e})|)
    pub counts: Vec<(u32, u128)>,
    #[serde(serialize_with = "ser_opt_decimal")]
    pub slope: Option<f64>,
    /// Rounded slope; `None` when every count is zero.
    pub estimate: Option<u32>,
    pub confidence: Confidence,
}

impl DimensionEstimate {
    pub fn is_empty(&self) -> bool {
        self.estimate.is_none()
    }
}

/// Largest e with |P^b(F_{q^e})| within `cap` (at least 1).
pub fn probe_depth(q: u64, b: usize, cap: u64) -> u32 {
    (2..)
        .take_while(|e| {
            checked_pow(q as u128, *e)
                .is_some_and(|qe| qe <= DEFAULT_ORDER_CAP as u128 && projective_count(qe as u64, b).is_some_and(|c| c <= cap as u128))
        })
        .last()
        .unwrap_or(1)
}

/// Counts over GF(q^e) for e = 1..=e_max and the slope of log count against
/// e log q.
///
/// With two or more nonzero counts the slope is a least-squares fit with
/// intercept; with a single one it is the through-origin ratio and
/// confidence is low.
pub fn dimension_probe(
    vs: &VarietySpec,
    base: &FieldSpec,
    e_max: u32,
    cap: u64,
) -> Result<DimensionEstimate, VarietyError> {
    if e_max == 0 {
        return Err(VarietyError::Precondition("e_max must be at least 1".into()));
    }
    let q = base.order() as u64;
    let ambient = checked_pow(q as u128, e_max)
        .and_then(|t| u64::try_from(t).ok())
        .and_then(|t| projective_count(t, vs.ambient_dim))
        .unwrap_or(u128::MAX);
    if ambient > cap as u128 {
        return Err(GeomError::CapExceeded { what: "probe ambient space", count: ambient, cap }.into());
    }
    let mut counts = Vec::new();
    for e in 1..=e_max {
        let big = make_field_with_cap(
            base.characteristic() as u64,
            base.extension_degree() * e,
            DEFAULT_ORDER_CAP,
        )?;
        let lifted = vs.map_coeffs(&base.embedding_into(&big)?);
        counts.push((e, count_points(&lifted, &big, cap)?));
    }
    let ln_q = (q as f64).ln();
    let pts: Vec<(f64, f64)> =
        counts.iter().filter(|(_, c)| *c > 0).map(|(e, c)| (*e as f64 * ln_q, (*c as f64).ln())).collect();
    let slope = match pts.len() {
        0 => None,
        1 => Some(pts[0].1 / pts[0].0),
        n => {
            let n = n as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            Some(sxy / sxx)
        }
    };
    let low = pts.len() < 2 || counts.iter().any(|(_, c)| *c < 10 * q as u128);
    Ok(DimensionEstimate {
        estimate: slope.map(|s| s.round().max(0.0) as u32),
        slope,
        counts,
        confidence: if low { Confidence::Low } else { Confidence::High },
    })
}

#[derive(Clone, Debug)]
pub struct BuildConfig {
    pub attempts: u32,
    /// Exhaustive s-subset search up to this many subsets.
    pub subset_budget: u128,
    /// Random s-subsets checked when the exhaustive search is over budget.
    pub samples: u128,
    pub point_cap: u64,
    pub probe_cap: u64,
    pub waive_z_condition: bool,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            attempts: 10,
            subset_budget: crate::independence::DEFAULT_SUBSET_BUDGET,
            samples: 2000,
            point_cap: DEFAULT_POINT_CAP,
            probe_cap: DEFAULT_POINT_CAP,
            waive_z_condition: false,
        }
    }
}

/// Attempts rejected by each certificate criterion (first failing one counts).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FailureTally {
    pub point_count: u32,
    pub independence: u32,
    pub dimension: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CertReport {
    pub certified: bool,
    pub attempts: u32,
    /// Seed of the certified sample.
    pub seed: Option<u64>,
    #[serde(serialize_with = "ser_u128")]
    pub point_count: u128,
    /// ceil(q^(b-Z) / 2)
    #[serde(serialize_with = "ser_u128")]
    pub count_floor: u128,
    pub independence: Option<SWiseReport>,
    pub probe: Option<DimensionEstimate>,
    pub z_condition: ZVerdict,
    pub z_waived: bool,
    pub failures: FailureTally,
}

/// Samples Z random degree-m forms on P^b until V(f_1..f_Z) is certified:
/// enough points, s-wise m-independent on its F_q-points, and probing to
/// dimension b - Z. Attempt i draws from `rng.substream(i)`.
pub fn build_independent_variety(
    field: &FieldSpec,
    b: usize,
    m: u32,
    z: usize,
    s: usize,
    rng: &SeededRng,
    config: &BuildConfig,
) -> Result<(VarietySpec, CertReport, Vec<ProjPoint>), VarietyError> {
    if z >= b {
        return Err(VarietyError::Precondition(format!("b - Z = {} - {} must be at least 1", b, z)));
    }
    let zc = z_condition(b as u32, m, z as u32, s as u32).verdict;
    if zc != ZVerdict::Satisfied && !config.waive_z_condition {
        return Err(VarietyError::ZCondition(zc));
    }
    let q = field.order() as u128;
    let floor = checked_pow(q, (b - z) as u32).ok_or(VarietyError::LedgerOverflow)?.div_ceil(2);
    let mut report = CertReport {
        certified: false,
        attempts: 0,
        seed: None,
        point_count: 0,
        count_floor: floor,
        independence: None,
        probe: None,
        z_condition: zc,
        z_waived: zc != ZVerdict::Satisfied,
        failures: FailureTally::default(),
    };
    if z == 0 {
        let vs = VarietySpec::ambient(b);
        let points = fq_points(&vs, field, config.point_cap)?;
        report.certified = true;
        report.point_count = points.len() as u128;
        return Ok((vs, report, points));
    }
    let e_max = probe_depth(q as u64, b, config.probe_cap);
    for attempt in 0..config.attempts {
        report.attempts = attempt + 1;
        let mut draw = rng.substream(attempt as u64);
        let seed = draw.seed();
        let gens = (0..z).map(|_| HomPoly::random(field, b, m, &mut draw)).collect();
        let vs = VarietySpec::new(b, gens)?;
        let points = fq_points(&vs, field, config.point_cap)?;
        report.point_count = points.len() as u128;
        if (points.len() as u128) < floor {
            report.failures.point_count += 1;
            continue;
        }
        let total = binomial(points.len() as u64, s as u64).unwrap_or(u128::MAX);
        let indep = if total <= config.subset_budget {
            s_wise_independent(field, &points, s, m, config.subset_budget)?
        } else {
            s_wise_sampled(field, &points, s, m, config.samples, &mut draw.substream(1))?
        };
        let clean = indep.verdict != Verdict::Dependent;
        report.independence = Some(indep);
        if !clean {
            report.failures.independence += 1;
            continue;
        }
        let probe = dimension_probe(&vs, field, e_max, config.probe_cap)?;
        let ok = probe.estimate == Some((b - z) as u32);
        report.probe = Some(probe);
        if !ok {
            report.failures.dimension += 1;
            continue;
        }
        report.certified = true;
        report.seed = Some(seed);
        return Ok((vs, report, points));
    }
    Err(VarietyError::CertificationFailed { attempts: config.attempts, failures: report.failures })
}

/// W_{l_1..l_s}: `vs` cut by the specializations g(l_i, .).
pub fn residual_variety(
    vs: &VarietySpec,
    field: &FieldSpec,
    g: &BiHomPoly,
    anchors: &[ProjPoint],
) -> Result<VarietySpec, VarietyError> {
    let (a, b) = g.dims();
    if b != vs.ambient_dim {
        return Err(GeomError::DimensionMismatch { expected: vs.ambient_dim, got: b }.into());
    }
    let mut out = vs.clone();
    for l in anchors {
        if l.dim() != a {
            return Err(GeomError::DimensionMismatch { expected: a, got: l.dim() }.into());
        }
        out.push(g.specialize(field, l)?)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConcentrationStats {
    pub trials: u32,
    pub r: usize,
    pub population: usize,
    pub q: u32,
    /// |Y| / q^r
    #[serde(serialize_with = "ser_decimal")]
    pub expected_mean: f64,
    #[serde(serialize_with = "ser_decimal")]
    pub mean: f64,
    #[serde(serialize_with = "ser_decimal")]
    pub variance: f64,
    /// |Y| p (1 - p) with p = q^-r; exact for pairwise independent evaluations.
    #[serde(serialize_with = "ser_decimal")]
    pub model_variance: f64,
    /// sqrt(model_variance / trials)
    #[serde(serialize_with = "ser_decimal")]
    pub standard_error: f64,
    /// Fraction of trials with |Y cap V| <= |Y| / (2 q^r).
    #[serde(serialize_with = "ser_decimal")]
    pub failure_frequency: f64,
    /// 4 q^r / |Y|
    #[serde(serialize_with = "ser_decimal")]
    pub failure_ceiling: f64,
}

impl ConcentrationStats {
    pub fn mean_deviation_in_se(&self) -> f64 {
        if self.standard_error == 0.0 {
            if self.mean == self.expected_mean { 0.0 } else { f64::INFINITY }
        } else {
            (self.mean - self.expected_mean).abs() / self.standard_error
        }
    }
}

fn summarize(counts: &[u128], population: usize, q: u32, r: usize) -> ConcentrationStats {
    let trials = counts.len() as f64;
    let p = (q as f64).powi(-(r as i32));
    let mean = counts.iter().map(|c| *c as f64).sum::<f64>() / trials;
    let variance = if counts.len() > 1 {
        counts.iter().map(|c| (*c as f64 - mean).powi(2)).sum::<f64>() / (trials - 1.0)
    } else {
        0.0
    };
    let model_variance = population as f64 * p * (1.0 - p);
    // |Y cap V| <= |Y| / 2q^r  <=>  2 q^r |Y cap V| <= |Y|
    let qr = (q as u128).pow(r as u32);
    let failures = counts.iter().filter(|c| 2 * qr * **c <= population as u128).count();
    ConcentrationStats {
        trials: counts.len() as u32,
        r,
        population,
        q,
        expected_mean: population as f64 * p,
        mean,
        variance,
        model_variance,
        standard_error: (model_variance / trials).sqrt(),
        failure_frequency: failures as f64 / trials,
        failure_ceiling: 4.0 * qr as f64 / population as f64,
    }
}

/// Repeatedly cuts `y` with r random forms of the given degrees and records
/// how many points survive.
pub fn concentration_trial(
    field: &FieldSpec,
    y: &[ProjPoint],
    degrees: &[u32],
    trials: u32,
    rng: &mut SeededRng,
) -> Result<ConcentrationStats, VarietyError> {
    let b = y.first().ok_or(VarietyError::EmptyPopulation)?.dim();
    let rows = degrees
        .iter()
        .map(|m| {
            let monos = enumerate_multiindices(b, *m)?;
            y.iter()
                .map(|p| {
                    if p.dim() != b {
                        return Err(GeomError::DimensionMismatch { expected: b, got: p.dim() });
                    }
                    Ok(monomial_row(field, p, &monos))
                })
                .collect::<Result<Vec<_>, _>>()
        })
        .collect::<Result<Vec<_>, GeomError>>()?;
    let counts: Vec<u128> = (0..trials)
        .map(|_| {
            let polys: Vec<HomPoly> = degrees.iter().map(|m| HomPoly::random(field, b, *m, rng)).collect();
            (0..y.len())
                .filter(|i| polys.iter().zip(&rows).all(|(g, r)| dot(field, g.coeffs(), &r[*i]).is_zero()))
                .count() as u128
        })
        .collect();
    Ok(summarize(&counts, y.len(), field.order(), degrees.len()))
}

/// Bihomogeneous variant on a population of pairs in P^a x P^b.
pub fn concentration_trial_bi(
    field: &FieldSpec,
    y: &[(ProjPoint, ProjPoint)],
    bidegrees: &[(u32, u32)],
    trials: u32,
    rng: &mut SeededRng,
) -> Result<ConcentrationStats, VarietyError> {
    let (v0, w0) = y.first().ok_or(VarietyError::EmptyPopulation)?;
    let (a, b) = (v0.dim(), w0.dim());
    if bidegrees.iter().any(|(m, m2)| *m == 0 || *m2 == 0) {
        return Err(VarietyError::Precondition("bidegrees must be positive in both parts".into()));
    }
    let mut row_sets = Vec::new();
    for (m, m2) in bidegrees {
        let xs = enumerate_multiindices(a, *m)?;
        let ys = enumerate_multiindices(b, *m2)?;
        let rows: Vec<Vec<FieldElem>> = y
            .iter()
            .map(|(v, w)| {
                let xr = monomial_row(field, v, &xs);
                let yr = monomial_row(field, w, &ys);
                xr.iter().flat_map(|x| yr.iter().map(|t| field.mul(*x, *t))).collect()
            })
            .collect();
        row_sets.push(rows);
    }
    let counts: Vec<u128> = (0..trials)
        .map(|_| {
            let polys: Vec<BiHomPoly> =
                bidegrees.iter().map(|(m, m2)| BiHomPoly::random(field, a, b, *m, *m2, rng)).collect();
            (0..y.len())
                .filter(|i| polys.iter().zip(&row_sets).all(|(g, r)| dot(field, g.coeffs(), &r[*i]).is_zero()))
                .count() as u128
        })
        .collect();
    Ok(summarize(&counts, y.len(), field.order(), bidegrees.len()))
}

fn dot(field: &FieldSpec, a: &[FieldElem], b: &[FieldElem]) -> FieldElem {
    a.iter().zip(b).fold(FieldElem::ZERO, |acc, (x, y)| field.add(acc, field.mul(*x, *y)))
}
