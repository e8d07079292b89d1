//! A fully parsed invocation: subcommand, string parameter map, seed, output
//! path and budgets. Every accepted config survives a JSON round trip.

use std::collections::BTreeMap;
use std::path::PathBuf;

use kst_core::gfarith::BaseKind;
use kst_core::graphs::{GraphKind, Orientation, PlanMode, PlanOverrides};
use kst_core::report::parse_ratio;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Subcommand {
    Plan,
    Construct,
    Verify,
    Indep,
    Sweep,
    Selftest,
}

impl Subcommand {
    pub const ALL: [Subcommand; 6] = [
        Subcommand::Plan,
        Subcommand::Construct,
        Subcommand::Verify,
        Subcommand::Indep,
        Subcommand::Sweep,
        Subcommand::Selftest,
    ];

    /// Parameter keys the subcommand accepts.
    pub fn keys(self) -> &'static [&'static str] {
        const PLAN: &[&str] = &["kind", "s", "mode", "m", "r", "Z", "T", "a", "q", "c", "n", "base"];
        match self {
            Subcommand::Plan | Subcommand::Construct | Subcommand::Sweep => PLAN,
            Subcommand::Verify => &["graph", "s", "t", "orientation"],
            Subcommand::Indep => &["points", "q", "m", "s"],
            Subcommand::Selftest => &["criteria"],
        }
    }

    fn uses_seed(self) -> bool {
        matches!(self, Subcommand::Construct | Subcommand::Sweep | Subcommand::Verify)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Budgets {
    /// Enumeration cap on projective point sets.
    pub points: Option<u64>,
    /// Subset budget for exhaustive searches.
    pub subsets: Option<u64>,
    pub trials: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommandConfig {
    pub subcommand: Subcommand,
    pub params: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub budgets: Budgets,
    pub workers: Option<usize>,
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

impl CommandConfig {
    /// Checks keys against the subcommand schema and every value against its type.
    pub fn validate(&self) -> Result<(), CliError> {
        let allowed = self.subcommand.keys();
        if let Some(k) = self.params.keys().find(|k| !allowed.contains(&k.as_str())) {
            return Err(usage(format!("--{k} is not accepted by {}", self.name())));
        }
        if self.seed.is_some() && !self.subcommand.uses_seed() {
            return Err(usage(format!("--seed is not accepted by {}", self.name())));
        }
        if self.workers == Some(0) {
            return Err(usage("--workers must be positive"));
        }
        match self.subcommand {
            Subcommand::Plan | Subcommand::Construct | Subcommand::Sweep => {
                self.plan_inputs()?;
                if self.subcommand != Subcommand::Plan && self.seed.is_none() {
                    return Err(usage(format!("{} needs --seed", self.name())));
                }
                if self.subcommand == Subcommand::Construct && self.out.is_none() {
                    return Err(usage("construct needs --out"));
                }
            }
            Subcommand::Verify => {
                self.require("graph")?;
                self.opt_u32("s")?;
                self.opt_u64("t")?;
                self.orientation()?;
                if self.params.contains_key("t") != self.params.contains_key("s") {
                    return Err(usage("verify takes --s and --t together"));
                }
            }
            Subcommand::Indep => {
                self.require("points")?;
                self.require_u64("q")?;
                self.require_u64("m")?;
                self.opt_u32("s")?;
            }
            Subcommand::Selftest => {
                self.criteria()?;
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self.subcommand {
            Subcommand::Plan => "plan",
            Subcommand::Construct => "construct",
            Subcommand::Verify => "verify",
            Subcommand::Indep => "indep",
            Subcommand::Sweep => "sweep",
            Subcommand::Selftest => "selftest",
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub fn require(&self, key: &str) -> Result<&str, CliError> {
        self.get(key).ok_or_else(|| usage(format!("{} needs --{key}", self.name())))
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        self.get(key)
            .map(|v| v.parse().map_err(|_| usage(format!("--{key}: cannot parse {v:?}"))))
            .transpose()
    }

    pub fn opt_u32(&self, key: &str) -> Result<Option<u32>, CliError> {
        self.parsed(key)
    }

    pub fn opt_u64(&self, key: &str) -> Result<Option<u64>, CliError> {
        self.parsed(key)
    }

    pub fn require_u64(&self, key: &str) -> Result<u64, CliError> {
        self.require(key)?;
        Ok(self.parsed(key)?.expect("present"))
    }

    pub fn orientation(&self) -> Result<Option<Orientation>, CliError> {
        self.get("orientation")
            .map(|o| Orientation::parse(o).ok_or_else(|| usage(format!("unknown orientation {o:?}"))))
            .transpose()
    }

    /// The field orders listed in `--q` (comma separated).
    pub fn q_list(&self) -> Result<Vec<u64>, CliError> {
        match self.get("q") {
            None => Ok(Vec::new()),
            Some(list) => list
                .split(',')
                .map(|v| v.trim().parse().map_err(|_| usage(format!("--q: cannot parse {v:?}"))))
                .collect(),
        }
    }

    pub fn criteria(&self) -> Result<Vec<u8>, CliError> {
        match self.get("criteria") {
            None => Ok(kst_core::acceptance::CRITERIA.to_vec()),
            Some(list) => list
                .split(',')
                .map(|v| match v.trim().parse::<u8>() {
                    Ok(id) if (1..=11).contains(&id) => Ok(id),
                    _ => Err(usage(format!("--criteria: no criterion {v:?}"))),
                })
                .collect(),
        }
    }

    /// Plan kind, s, mode and overrides; `q_override` replaces the `--q` list.
    pub fn plan_inputs_for(&self, q_override: Option<u64>) -> Result<PlanInputs, CliError> {
        let kind_text = self.require("kind")?;
        let kind = GraphKind::parse(kind_text).ok_or_else(|| usage(format!("unknown graph kind {kind_text:?}")))?;
        let s = self.opt_u32("s")?.ok_or_else(|| usage(format!("{} needs --s", self.name())))?;
        let mode = match self.get("mode") {
            None => PlanMode::Theorem,
            Some(m) => PlanMode::parse(m).ok_or_else(|| usage(format!("unknown mode {m:?}")))?,
        };
        let qs = self.q_list()?;
        if qs.len() > 1 && self.subcommand != Subcommand::Sweep {
            return Err(usage("only sweep accepts several --q values"));
        }
        let base = match self.get("base") {
            None => match kind {
                GraphKind::Turan => BaseKind::Prime,
                GraphKind::Zarankiewicz => BaseKind::PowerOfTwo,
            },
            Some("prime") => BaseKind::Prime,
            Some("power-of-two" | "pow2") => BaseKind::PowerOfTwo,
            Some(other) => return Err(usage(format!("unknown base {other:?}"))),
        };
        let n = self.opt_u64("n")?;
        if n.is_some() && !qs.is_empty() {
            return Err(usage("--n and --q are exclusive"));
        }
        let c = self
            .get("c")
            .map(|c| parse_ratio(c).ok_or_else(|| usage(format!("--c: cannot parse {c:?}"))))
            .transpose()?;
        let q = q_override.or(qs.first().copied()).or(n.map(|n| kst_core::gfarith::pick_base(n, s, base)));
        let overrides = PlanOverrides {
            m: self.opt_u32("m")?,
            r: self.opt_u32("r")?,
            z: self.opt_u32("Z")?,
            t_target: self.opt_u32("T")?,
            a: self.opt_u32("a")?,
            q,
            c,
        };
        Ok(PlanInputs { kind, s, mode, overrides })
    }

    pub fn plan_inputs(&self) -> Result<PlanInputs, CliError> {
        self.plan_inputs_for(None)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let config: CommandConfig = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanInputs {
    pub kind: GraphKind,
    pub s: u32,
    pub mode: PlanMode,
    pub overrides: PlanOverrides,
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn config(sub: Subcommand, params: &[(&str, &str)], seed: Option<u64>) -> CommandConfig {
        CommandConfig {
            subcommand: sub,
            params: params.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect(),
            seed,
            out: Some("g.json".into()),
            budgets: Budgets::default(),
            workers: None,
        }
    }

    #[test]
    fn schema_rejects_foreign_keys_and_missing_seed() {
        let ok = config(Subcommand::Construct, &[("kind", "turan"), ("s", "2"), ("q", "7")], Some(1));
        assert!(ok.validate().is_ok());
        let unseeded = CommandConfig { seed: None, ..ok.clone() };
        assert!(matches!(unseeded.validate(), Err(CliError::Usage(_))));
        let mut foreign = ok.clone();
        foreign.params.insert("graph".into(), "g.json".into());
        assert!(foreign.validate().is_err());
        let two_q = config(Subcommand::Construct, &[("kind", "turan"), ("s", "2"), ("q", "7,11")], Some(1));
        assert!(two_q.validate().is_err());
    }

    #[test]
    fn n_picks_the_base() {
        let c = config(Subcommand::Plan, &[("kind", "turan"), ("s", "2"), ("n", "50")], None);
        assert_eq!(c.plan_inputs().unwrap().overrides.q, Some(11));
        let z = config(Subcommand::Plan, &[("kind", "zar"), ("s", "2"), ("n", "50")], None);
        assert_eq!(z.plan_inputs().unwrap().overrides.q, Some(8));
    }

    fn arb_value(key: &'static str) -> BoxedStrategy<String> {
        match key {
            "kind" => prop_oneof![Just("turan"), Just("zarankiewicz")].prop_map(str::to_string).boxed(),
            "mode" => prop_oneof![Just("desk"), Just("theorem")].prop_map(str::to_string).boxed(),
            "base" => prop_oneof![Just("prime"), Just("power-of-two")].prop_map(str::to_string).boxed(),
            "c" => (1u64..9, 1u64..9).prop_map(|(n, d)| format!("{n}/{d}")).boxed(),
            "orientation" => prop_oneof![Just("both"), Just("left_only")].prop_map(str::to_string).boxed(),
            "graph" | "points" => "[a-z]{1,8}\\.json".boxed(),
            "criteria" => prop::collection::vec(1u8..=11, 1..4)
                .prop_map(|v| v.iter().map(u8::to_string).collect::<Vec<_>>().join(","))
                .boxed(),
            _ => (1u32..40).prop_map(|v| v.to_string()).boxed(),
        }
    }

    fn arb_config() -> impl Strategy<Value = CommandConfig> {
        (0..Subcommand::ALL.len()).prop_flat_map(|i| {
            let sub = Subcommand::ALL[i];
            let entries: Vec<_> = sub
                .keys()
                .iter()
                .map(|k| prop::option::of(arb_value(k)).prop_map(move |v| v.map(|v| (k.to_string(), v))))
                .collect();
            (
                Just(sub),
                entries,
                prop::option::of(any::<u64>()),
                prop::option::of("[a-z]{1,6}/[a-z]{1,6}\\.json"),
                (prop::option::of(1u64..1 << 40), prop::option::of(1u64..1 << 40), prop::option::of(1u32..100)),
                prop::option::of(1usize..16),
            )
                .prop_map(|(sub, entries, seed, out, (points, subsets, trials), workers)| CommandConfig {
                    subcommand: sub,
                    params: entries.into_iter().flatten().collect(),
                    seed,
                    out: out.map(PathBuf::from),
                    budgets: Budgets { points, subsets, trials },
                    workers,
                })
        })
    }

    proptest! {
        #[test]
        fn accepted_configs_round_trip(config in arb_config()) {
            if config.validate().is_ok() {
                let back = CommandConfig::from_json(&config.to_json()).unwrap();
                prop_assert_eq!(back, config);
            }
        }
    }
}
