//! The eleven acceptance criteria as runnable checks. Each returns an
//! [`Outcome`] with a one-line summary; the test suite and `kst selftest`
//! both drive them.

use std::time::{Duration, Instant};

use num_bigint::BigUint;

use crate::arith::{binomial, prime_power};
use crate::gfarith::{field_of_order, make_field, FieldElem, FieldSpec};
use crate::graphs::{
    compute_graph_checks, construct_turan, construct_zar, joint_uniformity_test, plan_construction, AnchorPolicy,
    ConstructConfig, GraphKind, PlanMode, PlanOverrides, SidedGraph, UniformityMode, DEFAULT_UNIFORMITY_CAP,
};
use crate::independence::{
    disjoint_span_subset, hilbert_rank, in_span, independent_set_third, m_cap, phi_upper_bound, power_rank,
    random_subset, strong_dependence_witness, z_condition, Combinations, IndepError, PhiBound, ZVerdict,
    DEFAULT_KERNEL_CAP,
};
use crate::linalg::{rank, Matrix};
use crate::polyrand::{derive_seed, SeededRng};
use crate::projgeom::{canonicalize, enumerate_projective, ProjPoint};
use crate::variety::{build_independent_variety, concentration_trial, BuildConfig};

/// Master seed of the whole suite.
pub const SUITE_SEED: u64 = 0x4b53_5400_2024;

#[derive(Clone, Debug)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "[{}] criterion {:>2}: {} ({}) in {:.1}s",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.detail,
            self.elapsed.as_secs_f64()
        )
    }
}

fn timed(id: u8, title: &'static str, body: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = body();
    Outcome { id, title, passed, detail, elapsed: start.elapsed() }
}

fn seed(criterion: u64, index: u64) -> u64 {
    derive_seed(SUITE_SEED, criterion * 1_000_000 + index)
}

pub const CRITERIA: [u8; 11] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11];

pub fn run(id: u8) -> Outcome {
    match id {
        1 => field_exactness(),
        2 => lagrange_floor(),
        3 => rank_equivalence(),
        4 => specialization_independence(),
        5 => concentration(),
        6 => variety_builder(),
        7 => turan_end_to_end(),
        8 => zarankiewicz_end_to_end(),
        9 => empirical_floors(),
        10 => arithmetic_ledgers(),
        11 => reproducibility(),
        _ => panic!("no acceptance criterion {id}"),
    }
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().map(|id| run(*id)).collect()
}

/// Point counts against the geometric series and exhaustive field axioms for q <= 64.
pub fn field_exactness() -> Outcome {
    timed(1, "field and projective exactness", || {
        let mut failures = Vec::new();
        let mut checked = 0;
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11] {
            let f = field_of_order(q).unwrap();
            for b in 0..=4usize {
                let expected: u128 = (0..=b as u32).map(|j| (q as u128).pow(j)).sum();
                let pts = enumerate_projective(&f, b).unwrap();
                let canonical = pts.iter().all(|p| p.coords().iter().find(|c| !c.is_zero()) == Some(&FieldElem::ONE));
                let sorted = pts.windows(2).all(|w| w[0] != w[1]);
                if pts.len() as u128 != expected || !canonical || !sorted {
                    failures.push(format!("P^{b}(F_{q})"));
                }
                checked += 1;
            }
        }
        let orders: Vec<u64> = (2..=64).filter(|q| prime_power(*q).is_some()).collect();
        for &q in &orders {
            if let Err(e) = field_of_order(q).unwrap().check_axioms() {
                failures.push(format!("GF({q}): {e}"));
            }
        }
        let ok = failures.is_empty();
        (ok, format!("{checked} point counts, {} fields; failures: {:?}", orders.len(), failures))
    })
    .with_deadline(Duration::from_secs(10))
}

/// Every subset of at most m+1 points is m-independent.
pub fn lagrange_floor() -> Outcome {
    timed(2, "Lagrange floor", || {
        let mut subsets = 0u64;
        let mut bad = Vec::new();
        for (q, b) in [(5u64, 1usize), (3, 2)] {
            let f = make_field(q, 1).unwrap();
            let pts = enumerate_projective(&f, b).unwrap();
            for m in [2u32, 3] {
                for size in 1..=(m as usize + 1).min(pts.len()) {
                    for sub in Combinations::new(pts.len(), size) {
                        let chosen: Vec<ProjPoint> = sub.iter().map(|i| pts[*i].clone()).collect();
                        subsets += 1;
                        if hilbert_rank(&f, &chosen, m).unwrap() != size {
                            bad.push((q, b, m, sub));
                        }
                    }
                }
            }
        }
        (bad.is_empty(), format!("{subsets} subsets, {} m-dependent", bad.len()))
    })
    .with_deadline(Duration::from_secs(60))
}

/// Hilbert rank equals the rank of the m-th powers of linear forms.
pub fn rank_equivalence() -> Outcome {
    timed(3, "rank equivalence", || {
        let mut cases = 0;
        let mut mismatches = 0;
        let mut deficient = 0;
        for (cfg, (q, b)) in [(7u64, 2usize), (11, 1)].into_iter().enumerate() {
            let f = make_field(q, 1).unwrap();
            let pts = enumerate_projective(&f, b).unwrap();
            for m in [2u32, 3] {
                let cols = binomial(b as u64 + m as u64, m as u64).unwrap() as usize;
                let mut rng = SeededRng::new(seed(3, (cfg * 10 + m as usize) as u64));
                for _ in 0..200 {
                    let t = 1 + rng.below((cols + 2).min(pts.len()) as u64) as usize;
                    let chosen: Vec<ProjPoint> =
                        random_subset(pts.len(), t, &mut rng).iter().map(|i| pts[*i].clone()).collect();
                    let h = hilbert_rank(&f, &chosen, m).unwrap();
                    cases += 1;
                    deficient += (h < t) as u32;
                    if power_rank(&f, &chosen, m).unwrap() != h {
                        mismatches += 1;
                    }
                }
            }
        }
        (mismatches == 0, format!("{cases} sets ({deficient} dependent), {mismatches} mismatches"))
    })
}

fn point(field: &FieldSpec, raw: &[u32]) -> ProjPoint {
    canonicalize(field, &raw.iter().map(|v| FieldElem(*v)).collect::<Vec<_>>()).unwrap()
}

/// Exact and sampled uniformity of specializations, plus a failing negative control.
pub fn specialization_independence() -> Outcome {
    timed(4, "specialization independence", || {
        let f2 = make_field(2, 1).unwrap();
        let exhaustive = UniformityMode::Exhaustive { cap: DEFAULT_UNIFORMITY_CAP };
        let mut rng = SeededRng::new(seed(4, 0));
        let anchors = [point(&f2, &[1, 0]), point(&f2, &[1, 1])];
        let exact =
            joint_uniformity_test(&f2, 1, 1, 1, 1, &anchors, exhaustive, AnchorPolicy::RequireIndependent, &mut rng)
                .unwrap();
        let f5 = make_field(5, 1).unwrap();
        let anchors5 = [point(&f5, &[1, 1, 1]), point(&f5, &[1, 2, 3])];
        let sampled = joint_uniformity_test(
            &f5,
            2,
            2,
            2,
            2,
            &anchors5,
            UniformityMode::Sampled { draws: 10_000 },
            AnchorPolicy::RequireIndependent,
            &mut SeededRng::new(seed(4, 1)),
        )
        .unwrap();
        let all = enumerate_projective(&f2, 1).unwrap();
        let control =
            joint_uniformity_test(&f2, 1, 1, 1, 1, &all, exhaustive, AnchorPolicy::NegativeControl, &mut rng).unwrap();
        let ok = exact.uniform && exact.samples == 16 && sampled.uniform && !control.uniform;
        (
            ok,
            format!(
                "exhaustive {}/{} cells uniform={}, chi2 {:.1} <= {:.1}: {}, negative control uniform={}",
                exact.cells_hit,
                exact.cells,
                exact.uniform,
                sampled.statistic.unwrap(),
                sampled.threshold.unwrap(),
                sampled.uniform,
                control.uniform
            ),
        )
    })
}

/// Random quadric cuts of P^3(F_7) concentrate around |Y|/q.
pub fn concentration() -> Outcome {
    timed(5, "concentration of random cuts", || {
        let f7 = make_field(7, 1).unwrap();
        let y = enumerate_projective(&f7, 3).unwrap();
        let stats = concentration_trial(&f7, &y, &[2], 500, &mut SeededRng::new(seed(5, 0))).unwrap();
        let z = stats.mean_deviation_in_se();
        let ok = y.len() == 400 && z <= 4.0 && stats.failure_frequency <= stats.failure_ceiling;
        (
            ok,
            format!(
                "mean {:.3} vs {:.3} ({z:.2} se), failure frequency {:.4} <= {:.4}",
                stats.mean, stats.expected_mean, stats.failure_frequency, stats.failure_ceiling
            ),
        )
    })
}

/// 100 master seeds, up to 10 attempts each, b=3, Z=1, m=3, s=3 over F_11.
pub fn variety_builder() -> Outcome {
    timed(6, "independent variety builder", || {
        let f11 = make_field(11, 1).unwrap();
        // small subset budget forces the sampled independence check
        let config = BuildConfig { attempts: 10, subset_budget: 50_000, samples: 2000, ..Default::default() };
        let mut certified = 0;
        let mut attempts = 0;
        for i in 0..100 {
            if let Ok((_, report, points)) =
                build_independent_variety(&f11, 3, 3, 1, 3, &SeededRng::new(seed(6, i)), &config)
            {
                let indep = report.independence.as_ref().expect("checked");
                let probe = report.probe.as_ref().expect("checked");
                if 2 * points.len() >= 121 && indep.witness.is_none() && probe.estimate == Some(2) {
                    certified += 1;
                    attempts += report.attempts;
                }
            }
        }
        (certified >= 90, format!("{certified}/100 seeds certified, {attempts} attempts in total"))
    })
    .with_deadline(Duration::from_secs(600))
}

/// Desk Turan plan s=2, m=3, r=1, Z=1 at q = 7 and 11.
pub fn turan_end_to_end() -> Outcome {
    timed(7, "Turan construction end to end", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for q in [7u64, 11] {
            let field = field_of_order(q).unwrap();
            let o = PlanOverrides { m: Some(3), r: Some(1), z: Some(1), q: Some(q), ..Default::default() };
            let plan = plan_construction(GraphKind::Turan, 2, PlanMode::Desk, &o).unwrap();
            ok &= plan.t_threshold == BigUint::from(82u32);
            let mut passes = 0;
            let mut ledger_ok = true;
            for i in 0..20 {
                let Ok((_, report)) = construct_turan(&field, &plan, seed(7, q * 100 + i), &ConstructConfig::default())
                else {
                    continue;
                };
                let checks = &report.graph_checks;
                if checks.pass {
                    passes += 1;
                    let ledger: u128 = report.construction["residual_degree_ledger"].as_str().unwrap().parse().unwrap();
                    ledger_ok &= checks.max_common_left.size as u128 <= ledger;
                }
            }
            ok &= passes >= 1 && ledger_ok;
            parts.push(format!("q={q}: {passes}/20 pass"));
        }
        (ok, parts.join(", "))
    })
}

/// Zarankiewicz plan s=2, T=3, r=1, m=2 at q = 8 and 11.
pub fn zarankiewicz_end_to_end() -> Outcome {
    timed(8, "Zarankiewicz construction end to end", || {
        let mut ok = true;
        let mut parts = Vec::new();
        for q in [8u64, 11] {
            let field = field_of_order(q).unwrap();
            let o = PlanOverrides { m: Some(2), r: Some(1), t_target: Some(3), q: Some(q), ..Default::default() };
            let plan = plan_construction(GraphKind::Zarankiewicz, 2, PlanMode::Desk, &o).unwrap();
            ok &= plan.t_threshold == BigUint::from(9u32);
            let passes = (0..20)
                .filter(|i| {
                    construct_zar(&field, &plan, seed(8, q * 100 + i), &ConstructConfig::default())
                        .is_ok_and(|(_, r)| r.graph_checks.pass)
                })
                .count();
            ok &= passes >= 1;
            parts.push(format!("q={q}: {passes}/20 pass"));
        }
        (ok, parts.join(", "))
    })
}

fn random_basis(field: &FieldSpec, n: usize, rng: &mut SeededRng) -> Vec<Vec<FieldElem>> {
    loop {
        let rows: Vec<Vec<FieldElem>> = (0..n).map(|_| (0..n).map(|_| rng.field_elem(field)).collect()).collect();
        if rank(field, &Matrix::from_rows(&rows)) == n {
            return rows;
        }
    }
}

/// No small strongly dependent sets in P^1(F_5); the two combinatorial
/// selection routines meet their ceil(n/3) guarantees.
pub fn empirical_floors() -> Outcome {
    timed(9, "strong dependence floors and selection bounds", || {
        let f5 = make_field(5, 1).unwrap();
        let pts = enumerate_projective(&f5, 1).unwrap();
        let mut small_witnesses = 0;
        let mut spanning_small = 0;
        let mut four_point_witnesses = 0;
        for size in 2..=4 {
            for sub in Combinations::new(pts.len(), size) {
                let chosen: Vec<ProjPoint> = sub.iter().map(|i| pts[*i].clone()).collect();
                match strong_dependence_witness(&f5, &chosen, 2, DEFAULT_KERNEL_CAP) {
                    Ok(Some(_)) if size < 4 => small_witnesses += 1,
                    Ok(Some(_)) => four_point_witnesses += 1,
                    Ok(None) => {}
                    Err(IndepError::NotSpanning { .. }) => continue,
                    Err(e) => panic!("{e}"),
                }
                spanning_small += (size < 4) as u32;
            }
        }
        let mut rng = SeededRng::new(seed(9, 0));
        let mut turan_ok = 0;
        for _ in 0..100 {
            let n = 1 + rng.below(12) as usize;
            let all_pairs: Vec<(usize, usize)> = Combinations::new(n, 2).map(|p| (p[0], p[1])).collect();
            let e = rng.below(n.min(all_pairs.len()) as u64 + 1) as usize;
            let edges: Vec<(usize, usize)> =
                random_subset(all_pairs.len(), e, &mut rng).iter().map(|i| all_pairs[*i]).collect();
            let set = independent_set_third(n, &edges).unwrap();
            let independent = edges.iter().all(|(u, v)| !(set.contains(u) && set.contains(v)));
            turan_ok += (independent && set.len() >= n.div_ceil(3)) as u32;
        }
        let mut bases_ok = 0;
        let mut instances = 0;
        while instances < 100 {
            let q = [5u64, 7, 11, 13][rng.below(4) as usize];
            let f = make_field(q, 1).unwrap();
            let n = 2 + rng.below(11) as usize;
            let (b, b_prime) = (random_basis(&f, n, &mut rng), random_basis(&f, n, &mut rng));
            let chosen = match disjoint_span_subset(&f, &b, &b_prime) {
                Ok(c) => c,
                Err(IndepError::MultiplePair(..)) => continue,
                Err(e) => panic!("{e}"),
            };
            instances += 1;
            let span: Vec<&[FieldElem]> = chosen.iter().map(|i| b[*i].as_slice()).collect();
            let disjoint = b_prime.iter().all(|v| !in_span(&f, &span, v));
            bases_ok += (disjoint && chosen.len() >= n.div_ceil(3)) as u32;
        }
        let ok = small_witnesses == 0 && turan_ok == 100 && bases_ok == 100;
        (
            ok,
            format!(
                "{spanning_small} spanning sets below 4 points, {small_witnesses} witnessed \
                 ({four_point_witnesses} four-point witnesses); independent sets {turan_ok}/100; \
                 disjoint spans {bases_ok}/100"
            ),
        )
    })
}

/// Smallest m with C(m+k, k) >= T, via a Pascal table.
fn m_cap_oracle(k: usize, target: u64) -> u32 {
    let mut row = vec![1u64; k + 1]; // C(m+j, j) for m = 0
    let mut m = 0;
    while row[k] < target {
        m += 1;
        for j in 1..=k {
            row[j] += row[j - 1];
        }
    }
    m
}

/// Exact integer ledgers on the grid r <= 8, T <= 50, and theorem-mode plans.
pub fn arithmetic_ledgers() -> Outcome {
    timed(10, "arithmetic ledgers", || {
        let mut bad = Vec::new();
        for k in 1..=8u32 {
            for t in 1..=50u64 {
                let mk = m_cap(k, t as u128);
                if mk != m_cap_oracle(k as usize, t) {
                    bad.push(format!("M_{k}({t})"));
                }
                // M_k(T) <= k T^(1/k)  <=>  M^k <= k^k T
                if (mk as u128).pow(k) > (k as u128).pow(k) * t as u128 {
                    bad.push(format!("root bound M_{k}({t})"));
                }
            }
        }
        for r in 1..=8u32 {
            let fact: f64 = (1..=r).map(f64::from).product();
            for t in 1..=50u64 {
                let prod: f64 = (1..=r).map(|k| m_cap(k, t as u128) as f64).product();
                let ceiling = (t as f64).powf(1.0 + (r as f64).ln()) * fact;
                if prod > ceiling * (1.0 + 1e-12) {
                    bad.push(format!("product bound r={r} T={t}"));
                }
            }
        }
        for t in 2..=12u32 {
            for b in 1..=12u32 {
                for m in 1..=6u32 {
                    let got = phi_upper_bound(t, b, m);
                    let expected = if t <= m + 1 {
                        Some(None)
                    } else if t >= 3 && b >= 3 && m >= 3 && t <= b {
                        let (t, b, m) = (t as f64, b as f64, m as f64);
                        Some(Some(((3.0 * t) / (m + 4.0)).floor() * (b + 1.0 + (m - 2.0) * t / (m + 4.0))))
                    } else {
                        None
                    };
                    let agrees = match (got, expected) {
                        (PhiBound::Empty, Some(None)) | (PhiBound::NotCovered, None) => true,
                        (PhiBound::Value(v), Some(Some(x))) => {
                            ((*v.numer() as f64 / *v.denom() as f64) - x).abs() < 1e-9
                        }
                        _ => false,
                    };
                    if !agrees {
                        bad.push(format!("phi({t},{b},{m})"));
                    }
                }
            }
        }
        if z_condition(10, 3, 5, 5).verdict != (ZVerdict::Violated { t: 5 })
            || z_condition(10, 3, 6, 5).verdict != ZVerdict::Satisfied
        {
            bad.push("z_condition examples".into());
        }
        for s in [100u32, 200] {
            let plan = plan_construction(GraphKind::Turan, s, PlanMode::Theorem, &PlanOverrides::default()).unwrap();
            let r = (0u32..).take_while(|r| (*r as u64).pow(3) <= 6 * (s as u64).pow(2)).last().unwrap();
            if (plan.m, plan.r, plan.z) != (3, r, Some(s + r + 3)) {
                bad.push(format!("theorem plan s={s}"));
            }
        }
        (bad.is_empty(), format!("grid k,r <= 8, T <= 50; violations: {bad:?}"))
    })
}

/// Two constructions from one (plan, seed) are byte-identical and the file re-verifies.
pub fn reproducibility() -> Outcome {
    timed(11, "reproducibility", || {
        let mut ok = true;
        let mut parts = Vec::new();
        let turan = PlanOverrides { m: Some(3), r: Some(1), z: Some(1), q: Some(7), ..Default::default() };
        let zar = PlanOverrides { m: Some(2), r: Some(1), t_target: Some(3), q: Some(8), ..Default::default() };
        for (kind, o, q) in [(GraphKind::Turan, turan, 7u64), (GraphKind::Zarankiewicz, zar, 8)] {
            let field = field_of_order(q).unwrap();
            let plan = plan_construction(kind, 2, PlanMode::Desk, &o).unwrap();
            let cfg = ConstructConfig::default();
            let s = seed(11, q);
            let build = || match kind {
                GraphKind::Turan => construct_turan(&field, &plan, s, &cfg),
                GraphKind::Zarankiewicz => construct_zar(&field, &plan, s, &cfg),
            };
            let (g1, r1) = build().unwrap();
            let (g2, r2) = build().unwrap();
            let (t1, t2) = (g1.to_file_string().unwrap(), g2.to_file_string().unwrap());
            let reports_equal = serde_json::to_string(&r1.to_json()).unwrap() == serde_json::to_string(&r2.to_json()).unwrap();
            let reread = SidedGraph::from_json(&serde_json::from_str(&t1).unwrap()).unwrap();
            let verified = compute_graph_checks(&reread, cfg.subset_budget).unwrap() == r1.graph_checks;
            ok &= t1 == t2 && reports_equal && verified;
            parts.push(format!("{}: identical={} verify={}", kind.as_str(), t1 == t2 && reports_equal, verified));
        }
        (ok, parts.join(", "))
    })
}

trait Deadline {
    fn with_deadline(self, limit: Duration) -> Self;
}

impl Deadline for Outcome {
    fn with_deadline(mut self, limit: Duration) -> Self {
        if self.elapsed > limit {
            self.passed = false;
            self.detail.push_str(&format!("; exceeded {}s", limit.as_secs()));
        }
        self
    }
}
