//! Joint distribution of the specializations g(v_1, .), ..., g(v_s, .) of a
//! uniformly random bihomogeneous g at fixed anchors.

use std::collections::HashMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::GraphError;
use crate::arith::checked_pow;
use crate::gfarith::{FieldElem, FieldSpec};
use crate::independence::{hilbert_rank, IndepError};
use crate::polyrand::{BiHomPoly, SeededRng};
use crate::projgeom::{enumerate_multiindices, monomial_count, monomial_row, GeomError, ProjPoint};
use crate::report::{ser_opt_decimal, ser_u128};

/// Default bound on q^(number of coefficients) in exhaustive mode.
pub const DEFAULT_UNIFORMITY_CAP: u128 = 1 << 22;

const SIGNIFICANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UniformityMode {
    /// Every g with q^N <= cap.
    Exhaustive { cap: u128 },
    Sampled { draws: u32 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnchorPolicy {
    /// Reject m-dependent anchors.
    RequireIndependent,
    /// Accept dependent anchors; used to show the test can fail.
    NegativeControl,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniformityReport {
    pub mode: &'static str,
    pub anchors: usize,
    pub anchors_independent: bool,
    /// q^N polynomials (exhaustive) or number of draws (sampled).
    #[serde(serialize_with = "ser_u128")]
    pub samples: u128,
    /// Cells of the joint target space (exhaustive) or per column block (sampled).
    #[serde(serialize_with = "ser_u128")]
    pub cells: u128,
    #[serde(serialize_with = "ser_u128")]
    pub cells_hit: u128,
    #[serde(serialize_with = "ser_opt_decimal")]
    pub statistic: Option<f64>,
    #[serde(serialize_with = "ser_opt_decimal")]
    pub threshold: Option<f64>,
    pub degrees_of_freedom: Option<u64>,
    pub uniform: bool,
}

#[allow(clippy::too_many_arguments)]
pub fn joint_uniformity_test(
    field: &FieldSpec,
    a: usize,
    b: usize,
    m: u32,
    m2: u32,
    anchors: &[ProjPoint],
    mode: UniformityMode,
    policy: AnchorPolicy,
    rng: &mut SeededRng,
) -> Result<UniformityReport, GraphError> {
    if anchors.is_empty() {
        return Err(GraphError::Precondition("no anchors".into()));
    }
    if let Some(p) = anchors.iter().find(|p| p.dim() != a) {
        return Err(GeomError::DimensionMismatch { expected: a, got: p.dim() }.into());
    }
    let anchors_independent = match hilbert_rank(field, anchors, m) {
        Ok(rank) => rank == anchors.len(),
        Err(IndepError::DuplicatePoints(..)) => false,
        Err(e) => return Err(e.into()),
    };
    if !anchors_independent && policy == AnchorPolicy::RequireIndependent {
        return Err(GraphError::DependentAnchors { m });
    }
    let xs = enumerate_multiindices(a, m)?;
    let x_rows: Vec<Vec<FieldElem>> = anchors.iter().map(|v| monomial_row(field, v, &xs)).collect();
    let rows = xs.len();
    let cols = monomial_count(b, m2) as usize;
    let q = field.order() as u128;
    let s = anchors.len();
    match mode {
        UniformityMode::Exhaustive { cap } => {
            let n = rows * cols;
            let total = checked_pow(q, n as u32).filter(|t| *t <= cap).ok_or(GeomError::CapExceeded {
                what: "bihomogeneous polynomial space",
                count: checked_pow(q, n as u32).unwrap_or(u128::MAX),
                cap: u64::try_from(cap).unwrap_or(u64::MAX),
            })?;
            let cells = checked_pow(q, (s * cols) as u32).unwrap_or(u128::MAX);
            let mut tally: HashMap<u128, u64> = HashMap::new();
            let mut coeffs = vec![FieldElem::ZERO; n];
            for index in 0..total {
                let mut rest = index;
                for c in coeffs.iter_mut() {
                    *c = FieldElem((rest % q) as u32);
                    rest /= q;
                }
                let mut key = 0u128;
                for x_row in &x_rows {
                    for col in 0..cols {
                        let mut v = FieldElem::ZERO;
                        for (i, xv) in x_row.iter().enumerate() {
                            if !xv.is_zero() {
                                v = field.add(v, field.mul(*xv, coeffs[i * cols + col]));
                            }
                        }
                        key = key.wrapping_mul(q).wrapping_add(v.0 as u128);
                    }
                }
                *tally.entry(key).or_default() += 1;
            }
            let hit = tally.len() as u128;
            let mut counts = tally.values();
            let first = counts.next().copied();
            let uniform = hit == cells && counts.all(|c| Some(*c) == first);
            Ok(UniformityReport {
                mode: "exhaustive",
                anchors: s,
                anchors_independent,
                samples: total,
                cells,
                cells_hit: hit,
                statistic: None,
                threshold: None,
                degrees_of_freedom: None,
                uniform,
            })
        }
        UniformityMode::Sampled { draws } => {
            // Column blocks of g are independent, so per-column chi-squares add.
            let block = checked_pow(q, s as u32)
                .filter(|c| *c <= 1 << 20)
                .ok_or_else(|| GraphError::Precondition("q^s too large for a sampled test".into()))?
                as usize;
            let mut counts = vec![0u64; cols * block];
            for _ in 0..draws {
                let g = BiHomPoly::random(field, a, b, m, m2, rng);
                let specs: Vec<_> = x_rows.iter().map(|x| g.specialize_row(field, x)).collect();
                for col in 0..cols {
                    let cell = specs.iter().fold(0usize, |acc, h| acc * q as usize + h.coeffs()[col].0 as usize);
                    counts[col * block + cell] += 1;
                }
            }
            let expected = draws as f64 / block as f64;
            let statistic: f64 = counts.iter().map(|o| (*o as f64 - expected).powi(2) / expected).sum();
            let dof = (cols * (block - 1)) as u64;
            let threshold = ChiSquared::new(dof as f64)
                .map_err(|e| GraphError::Precondition(e.to_string()))?
                .inverse_cdf(1.0 - SIGNIFICANCE);
            Ok(UniformityReport {
                mode: "sampled",
                anchors: s,
                anchors_independent,
                samples: draws as u128,
                cells: block as u128,
                cells_hit: counts.iter().filter(|c| **c > 0).count() as u128,
                statistic: Some(statistic),
                threshold: Some(threshold),
                degrees_of_freedom: Some(dof),
                uniform: statistic <= threshold,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gfarith::{field_of_order, make_field};
    use crate::independence::Combinations;
    use crate::projgeom::{canonicalize, enumerate_projective};

    fn point(field: &FieldSpec, raw: &[u32]) -> ProjPoint {
        canonicalize(field, &raw.iter().map(|v| FieldElem(*v)).collect::<Vec<_>>()).unwrap()
    }

    fn exhaustive() -> UniformityMode {
        UniformityMode::Exhaustive { cap: DEFAULT_UNIFORMITY_CAP }
    }

    #[test]
    fn tiny_cases_are_exactly_uniform() {
        let f2 = make_field(2, 1).unwrap();
        let mut rng = SeededRng::new(0);
        for anchors in [[point(&f2, &[1, 0]), point(&f2, &[0, 1])], [point(&f2, &[1, 0]), point(&f2, &[1, 1])]] {
            let r = joint_uniformity_test(&f2, 1, 1, 1, 1, &anchors, exhaustive(), AnchorPolicy::RequireIndependent, &mut rng)
                .unwrap();
            assert_eq!((r.samples, r.cells, r.cells_hit), (16, 16, 16));
            assert!(r.uniform);
        }
    }

    #[test]
    fn dependent_anchors() {
        let f2 = make_field(2, 1).unwrap();
        let all = enumerate_projective(&f2, 1).unwrap();
        let mut rng = SeededRng::new(0);
        assert!(matches!(
            joint_uniformity_test(&f2, 1, 1, 1, 1, &all, exhaustive(), AnchorPolicy::RequireIndependent, &mut rng),
            Err(GraphError::DependentAnchors { m: 1 })
        ));
        let r = joint_uniformity_test(&f2, 1, 1, 1, 1, &all, exhaustive(), AnchorPolicy::NegativeControl, &mut rng)
            .unwrap();
        assert!(!r.anchors_independent && !r.uniform);
    }

    #[test]
    fn sampled_mode_accepts_independent_anchors() {
        let f5 = make_field(5, 1).unwrap();
        let anchors = [point(&f5, &[1, 1, 1]), point(&f5, &[1, 2, 3])];
        let r = joint_uniformity_test(
            &f5,
            2,
            2,
            2,
            2,
            &anchors,
            UniformityMode::Sampled { draws: 10_000 },
            AnchorPolicy::RequireIndependent,
            &mut SeededRng::new(17),
        )
        .unwrap();
        assert_eq!(r.degrees_of_freedom, Some(6 * 24));
        assert!(r.uniform, "{r:?}");
    }

    #[test]
    fn exhaustive_cap_is_enforced() {
        let f3 = field_of_order(3).unwrap();
        let anchors = [ProjPoint::coordinate(2, 0)];
        assert!(joint_uniformity_test(&f3, 2, 2, 2, 2, &anchors, exhaustive(), AnchorPolicy::RequireIndependent, &mut SeededRng::new(0))
            .is_err());
    }

    /// Over the tiny grid within the enumeration cap: independent anchor sets
    /// are exactly uniform and some dependent set is not.
    #[test]
    fn tiny_grid() {
        let mut negative_seen = false;
        for q in [2u64, 3] {
            let f = field_of_order(q).unwrap();
            for a in 1..=2usize {
                let pts = enumerate_projective(&f, a).unwrap();
                for b in 1..=2usize {
                    for m in 1..=2u32 {
                        for m2 in 1..=2u32 {
                            let n = monomial_count(a, m) * monomial_count(b, m2);
                            if checked_pow(q as u128, n as u32).is_none_or(|t| t > 1 << 16) {
                                continue;
                            }
                            for s in 1..=3usize {
                                for sub in Combinations::new(pts.len(), s).take(12) {
                                    let anchors: Vec<ProjPoint> = sub.iter().map(|i| pts[*i].clone()).collect();
                                    let r = joint_uniformity_test(
                                        &f,
                                        a,
                                        b,
                                        m,
                                        m2,
                                        &anchors,
                                        UniformityMode::Exhaustive { cap: 1 << 16 },
                                        AnchorPolicy::NegativeControl,
                                        &mut SeededRng::new(0),
                                    )
                                    .unwrap();
                                    assert_eq!(r.uniform, r.anchors_independent, "q={q} a={a} b={b} m={m} m2={m2} {sub:?}");
                                    negative_seen |= !r.anchors_independent;
                                }
                            }
                        }
                    }
                }
            }
        }
        assert!(negative_seen);
    }
}
