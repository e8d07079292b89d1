//! Construction parameters and their desk-mode validation.

use num_bigint::BigUint;
use num_rational::Ratio;
use serde_json::{json, Value};
use thiserror::Error;

use crate::arith::binomial;
use crate::independence::{m_cap, z_condition, ZVerdict};
use crate::report::{big_value, decimal, parse_ratio, ratio_string};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GraphKind {
    Turan,
    Zarankiewicz,
}

impl GraphKind {
    pub fn as_str(self) -> &'static str {
        match self {
            GraphKind::Turan => "turan",
            GraphKind::Zarankiewicz => "zarankiewicz",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "turan" => Some(GraphKind::Turan),
            "zarankiewicz" | "zar" => Some(GraphKind::Zarankiewicz),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlanMode {
    Theorem,
    Desk,
}

impl PlanMode {
    pub fn as_str(self) -> &'static str {
        match self {
            PlanMode::Theorem => "theorem",
            PlanMode::Desk => "desk",
        }
    }

    pub fn parse(text: &str) -> Option<Self> {
        match text {
            "theorem" => Some(PlanMode::Theorem),
            "desk" => Some(PlanMode::Desk),
            _ => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("s must be at least 2")]
    SmallS,
    #[error("{mode} mode for {kind} needs --{flag}")]
    MissingOverride { kind: &'static str, mode: &'static str, flag: &'static str },
    #[error("violated: {0}")]
    Inequality(String),
    #[error("Z-condition fails: {0:?}")]
    ZCondition(ZVerdict),
    #[error("malformed plan: {0}")]
    Format(String),
    #[error("parameter out of range: {0}")]
    Range(String),
}

/// User-supplied parameters; `None` means "derive or not applicable".
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlanOverrides {
    pub m: Option<u32>,
    pub r: Option<u32>,
    pub z: Option<u32>,
    pub t_target: Option<u32>,
    pub a: Option<u32>,
    pub q: Option<u64>,
    pub c: Option<Ratio<u64>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstructionPlan {
    pub kind: GraphKind,
    pub mode: PlanMode,
    pub s: u32,
    pub m: u32,
    pub r: u32,
    /// Number of cutting forms for W (Turan only).
    pub z: Option<u32>,
    pub b: u32,
    /// Left ambient dimension (Zarankiewicz only, known once q is).
    pub a: Option<u32>,
    /// Target T (Zarankiewicz only).
    pub t_target: Option<u32>,
    pub q: Option<u64>,
    pub delta: Vec<u32>,
    /// Smallest t for which the graph is claimed K_{s,t}-free.
    pub t_threshold: BigUint,
    pub c: Ratio<u64>,
    /// log10 of the closed-form Turan threshold 9^s s^(4 s^(2/3)).
    pub headline_log10: Option<String>,
}

pub const DEFAULT_C: (u64, u64) = (1, 4);

fn deltas(r: u32, target: u128) -> Vec<u32> {
    (1..=r).map(|i| m_cap(r - i + 1, target)).collect()
}

fn product(m: u32, e: u32, delta: &[u32]) -> BigUint {
    delta.iter().fold(BigUint::from(m).pow(e), |acc, d| acc * BigUint::from(*d))
}

/// floor(c q^s): side length of the truncated Turan vertex sets.
pub fn turan_side_target(c: Ratio<u64>, q: u64, s: u32) -> BigUint {
    BigUint::from(*c.numer()) * BigUint::from(q).pow(s) / BigUint::from(*c.denom())
}

/// floor(c q^(T/s)) by exact integer root extraction.
pub fn zar_left_size(c: Ratio<u64>, q: u64, t_target: u32, s: u32) -> BigUint {
    let scaled = BigUint::from(*c.numer()).pow(s) * BigUint::from(q).pow(t_target);
    scaled.nth_root(s) / BigUint::from(*c.denom())
}

pub fn plan_construction(
    kind: GraphKind,
    s: u32,
    mode: PlanMode,
    overrides: &PlanOverrides,
) -> Result<ConstructionPlan, PlanError> {
    if s < 2 {
        return Err(PlanError::SmallS);
    }
    let c = overrides.c.unwrap_or(Ratio::new(DEFAULT_C.0, DEFAULT_C.1));
    let missing = |flag| PlanError::MissingOverride { kind: kind.as_str(), mode: mode.as_str(), flag };
    match kind {
        GraphKind::Turan => {
            let (m, r, z, headline) = match mode {
                PlanMode::Theorem => {
                    let r = crate::arith::iroot_floor(6 * (s as u128).pow(2), 3) as u32;
                    let sf = s as f64;
                    let headline = sf * 9f64.log10() + 4.0 * sf.powf(2.0 / 3.0) * sf.log10();
                    (3, r, s + r + 3, Some(decimal(headline)))
                }
                PlanMode::Desk => (
                    overrides.m.ok_or_else(|| missing("m"))?,
                    overrides.r.ok_or_else(|| missing("r"))?,
                    overrides.z.ok_or_else(|| missing("Z"))?,
                    None,
                ),
            };
            let b = r + s + z;
            let s2 = (s as u128).pow(2);
            if mode == PlanMode::Desk {
                let room = binomial((m + 1 + r) as u64, m as u64).unwrap_or(u128::MAX);
                if room < s2 {
                    return Err(PlanError::Inequality(format!("C(m+1+r, m) = {room} >= s^2 = {s2}")));
                }
                let zc = z_condition(b, m, z, s).verdict;
                if zc != ZVerdict::Satisfied {
                    return Err(PlanError::ZCondition(zc));
                }
            }
            let delta = deltas(r, s2);
            let t_threshold = product(m, z + s, &delta) + 1u32;
            Ok(ConstructionPlan {
                kind,
                mode,
                s,
                m,
                r,
                z: Some(z),
                b,
                a: None,
                t_target: None,
                q: overrides.q,
                delta,
                t_threshold,
                c,
                headline_log10: headline,
            })
        }
        GraphKind::Zarankiewicz => {
            let t_target = overrides.t_target.ok_or_else(|| missing("T"))?;
            let (r, m) = match mode {
                PlanMode::Theorem => {
                    let sf = s as f64;
                    let r = (sf / sf.ln()).ceil() as u32;
                    let m = overrides.m.unwrap_or_else(|| {
                        (0..).find(|m| binomial((r + 1 + m) as u64, *m as u64).is_none_or(|v| v >= t_target as u128)).unwrap()
                    });
                    (r, m)
                }
                PlanMode::Desk => (overrides.r.ok_or_else(|| missing("r"))?, overrides.m.ok_or_else(|| missing("m"))?),
            };
            let room = binomial((r + 1 + m) as u64, m as u64).unwrap_or(u128::MAX);
            if (t_target as u128) > room {
                return Err(PlanError::Inequality(format!("T = {t_target} <= C(r+1+m, m) = {room}")));
            }
            let delta = deltas(r, t_target as u128);
            let t_threshold = product(m, s, &delta) + 1u32;
            let a = match overrides.q {
                Some(q) => {
                    let left = u32::try_from(zar_left_size(c, q, t_target, s))
                        .map_err(|_| PlanError::Range("left side too large".into()))?;
                    let a = overrides.a.unwrap_or(left);
                    if left > a + 1 {
                        return Err(PlanError::Inequality(format!("|L| = {left} <= a + 1 = {}", a + 1)));
                    }
                    Some(a)
                }
                None => overrides.a,
            };
            Ok(ConstructionPlan {
                kind,
                mode,
                s,
                m,
                r,
                z: None,
                b: r + s,
                a,
                t_target: Some(t_target),
                q: overrides.q,
                delta,
                t_threshold,
                c,
                headline_log10: None,
            })
        }
    }
}

impl ConstructionPlan {
    /// `t_threshold` as a machine integer, when it fits.
    pub fn t_threshold_usize(&self) -> Option<usize> {
        usize::try_from(&self.t_threshold).ok()
    }

    pub fn to_json(&self) -> Value {
        let mut doc = json!({
            "kind": self.kind.as_str(),
            "mode": self.mode.as_str(),
            "s": self.s,
            "m": self.m,
            "r": self.r,
            "b": self.b,
            "delta": self.delta,
            "t_threshold": big_value(&self.t_threshold),
            "c": ratio_string(&self.c),
        });
        let map = doc.as_object_mut().expect("object literal");
        let mut put = |key: &str, v: Option<Value>| {
            if let Some(v) = v {
                map.insert(key.to_string(), v);
            }
        };
        put("Z", self.z.map(Value::from));
        put("a", self.a.map(Value::from));
        put("T", self.t_target.map(Value::from));
        put("q", self.q.map(Value::from));
        put("headline_t_log10", self.headline_log10.clone().map(Value::from));
        doc
    }

    pub fn from_json(doc: &Value) -> Result<Self, PlanError> {
        let bad = |what: &str| PlanError::Format(what.to_string());
        let int = |key: &str| doc[key].as_u64().and_then(|v| u32::try_from(v).ok());
        let req = |key: &'static str| int(key).ok_or_else(|| bad(key));
        let kind = doc["kind"].as_str().and_then(GraphKind::parse).ok_or_else(|| bad("kind"))?;
        let mode = doc["mode"].as_str().and_then(PlanMode::parse).ok_or_else(|| bad("mode"))?;
        let t_threshold = match &doc["t_threshold"] {
            Value::Number(n) => n.as_u64().map(BigUint::from),
            Value::String(s) => s.parse().ok(),
            _ => None,
        }
        .ok_or_else(|| bad("t_threshold"))?;
        let delta = doc["delta"]
            .as_array()
            .ok_or_else(|| bad("delta"))?
            .iter()
            .map(|d| d.as_u64().and_then(|v| u32::try_from(v).ok()))
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| bad("delta"))?;
        let headline_log10 = doc["headline_t_log10"].as_str().map(str::to_string);
        Ok(ConstructionPlan {
            kind,
            mode,
            s: req("s")?,
            m: req("m")?,
            r: req("r")?,
            z: int("Z"),
            b: req("b")?,
            a: int("a"),
            t_target: int("T"),
            q: doc["q"].as_u64(),
            delta,
            t_threshold,
            c: doc["c"].as_str().and_then(parse_ratio).ok_or_else(|| bad("c"))?,
            headline_log10,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn desk(m: u32, r: u32, z: u32) -> PlanOverrides {
        PlanOverrides { m: Some(m), r: Some(r), z: Some(z), ..Default::default() }
    }

    #[test]
    fn turan_theorem_mode() {
        let p = plan_construction(GraphKind::Turan, 100, PlanMode::Theorem, &PlanOverrides::default()).unwrap();
        assert_eq!((p.m, p.r, p.z), (3, 39, Some(142)));
        assert_eq!(p.b, 39 + 100 + 142);
        assert!(p.headline_log10.unwrap().parse::<f64>().unwrap() > 0.0);
        let p = plan_construction(GraphKind::Turan, 200, PlanMode::Theorem, &PlanOverrides::default()).unwrap();
        // 6 * 200^2 = 240000 and 62^3 = 238328 <= 240000 < 250047 = 63^3
        assert_eq!((p.m, p.r, p.z), (3, 62, Some(265)));
    }

    #[test]
    fn turan_desk_example() {
        let p = plan_construction(GraphKind::Turan, 2, PlanMode::Desk, &desk(3, 1, 1)).unwrap();
        assert_eq!(p.b, 4);
        assert_eq!(p.delta, vec![3]);
        assert_eq!(p.t_threshold, BigUint::from(82u32));
        assert_eq!(p.c, Ratio::new(1, 4));
    }

    #[test]
    fn turan_desk_rejections() {
        // C(3+1+0, 3) = 4 < 9
        assert!(matches!(
            plan_construction(GraphKind::Turan, 3, PlanMode::Desk, &desk(3, 0, 3)),
            Err(PlanError::Inequality(_))
        ));
        assert!(matches!(
            plan_construction(GraphKind::Turan, 5, PlanMode::Desk, &desk(3, 3, 1)),
            Err(PlanError::ZCondition(_))
        ));
        assert!(matches!(
            plan_construction(GraphKind::Turan, 2, PlanMode::Desk, &PlanOverrides::default()),
            Err(PlanError::MissingOverride { flag: "m", .. })
        ));
        assert_eq!(plan_construction(GraphKind::Turan, 1, PlanMode::Desk, &desk(3, 1, 1)), Err(PlanError::SmallS));
    }

    #[test]
    fn zarankiewicz_desk_example() {
        let o = PlanOverrides { m: Some(2), r: Some(1), t_target: Some(3), ..Default::default() };
        let p = plan_construction(GraphKind::Zarankiewicz, 2, PlanMode::Desk, &o).unwrap();
        assert_eq!((p.b, p.delta.clone()), (3, vec![2]));
        assert_eq!(p.t_threshold, BigUint::from(9u32));
        let big_t = PlanOverrides { t_target: Some(7), ..o };
        assert!(matches!(
            plan_construction(GraphKind::Zarankiewicz, 2, PlanMode::Desk, &big_t),
            Err(PlanError::Inequality(_))
        ));
    }

    #[test]
    fn zarankiewicz_left_sizes() {
        let quarter = Ratio::new(1, 4);
        // 8^(3/2) = 22.6..., 11^(3/2) = 36.4...
        assert_eq!(zar_left_size(quarter, 8, 3, 2), BigUint::from(5u32));
        assert_eq!(zar_left_size(quarter, 11, 3, 2), BigUint::from(9u32));
        assert_eq!(zar_left_size(Ratio::from_integer(1), 4, 3, 2), BigUint::from(8u32));
        // brute-force oracle: largest L with (4L)^2 <= q^3
        for q in 2u64..60 {
            let oracle = (0u64..).take_while(|l| (4 * l).pow(2) <= q.pow(3)).last().unwrap();
            assert_eq!(zar_left_size(quarter, q, 3, 2), BigUint::from(oracle));
        }
        let o = PlanOverrides { m: Some(2), r: Some(1), t_target: Some(3), q: Some(11), ..Default::default() };
        assert_eq!(plan_construction(GraphKind::Zarankiewicz, 2, PlanMode::Desk, &o).unwrap().a, Some(9));
        let tight = PlanOverrides { a: Some(7), ..o };
        assert!(plan_construction(GraphKind::Zarankiewicz, 2, PlanMode::Desk, &tight).is_err());
    }

    #[test]
    fn plan_json_round_trip() {
        let p = plan_construction(GraphKind::Turan, 100, PlanMode::Theorem, &PlanOverrides::default()).unwrap();
        let doc = p.to_json();
        assert!(doc["t_threshold"].is_string());
        let back = ConstructionPlan::from_json(&doc).unwrap();
        assert_eq!(back.to_json(), doc);
        let p = plan_construction(GraphKind::Turan, 2, PlanMode::Desk, &desk(3, 1, 1)).unwrap();
        assert_eq!(p.to_json()["t_threshold"], json!(82));
        assert_eq!(ConstructionPlan::from_json(&p.to_json()).unwrap(), p);
    }
}
