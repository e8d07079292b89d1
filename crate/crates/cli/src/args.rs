//! Command-line grammar. Parsed flags are flattened into a [`CommandConfig`].

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand as ClapSubcommand};

use crate::config::{Budgets, CommandConfig, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "kst", version, about = "Random algebraic K_{s,t}-free graphs over finite fields")]
pub struct Cli {
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, ClapSubcommand)]
pub enum Command {
    /// Print a construction plan.
    Plan(PlanArgs),
    /// Build a graph, retrying seeds until one certifies.
    Construct {
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Re-check a graph file.
    Verify(VerifyArgs),
    /// m-independence of a point file.
    Indep(IndepArgs),
    /// Pass rates over seeds and field orders.
    Sweep {
        #[command(flatten)]
        plan: PlanArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    /// turan or zarankiewicz
    pub kind: String,
    #[arg(long)]
    pub s: Option<u32>,
    /// theorem or desk
    #[arg(long)]
    pub mode: Option<String>,
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long)]
    pub r: Option<u32>,
    #[arg(long = "Z")]
    pub z: Option<u32>,
    #[arg(long = "T")]
    pub t_target: Option<u32>,
    #[arg(long)]
    pub a: Option<u32>,
    /// Field order; sweep accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub q: Vec<u64>,
    /// Side-size fraction, e.g. 1/4.
    #[arg(long)]
    pub c: Option<String>,
    /// Pick the smallest admissible q with n <= q^s.
    #[arg(long)]
    pub n: Option<u64>,
    /// prime or power-of-two, used with --n
    #[arg(long)]
    pub base: Option<String>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<u32>,
    #[arg(long = "budget-subsets")]
    pub budget_subsets: Option<u64>,
    #[arg(long = "budget-points")]
    pub budget_points: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub graph: String,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long)]
    pub t: Option<u64>,
    /// both or left_only
    #[arg(long)]
    pub orientation: Option<String>,
    /// Seed for sampled searches; defaults to the graph's trial seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "budget-subsets")]
    pub budget_subsets: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct IndepArgs {
    #[arg(long)]
    pub points: String,
    #[arg(long)]
    pub q: u64,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub s: Option<u32>,
    #[arg(long = "budget-subsets")]
    pub budget_subsets: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SelftestArgs {
    /// Comma-separated criterion numbers; default all.
    #[arg(long)]
    pub criteria: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Default)]
struct Params(BTreeMap<String, String>);

impl Params {
    fn put(&mut self, key: &str, value: Option<impl Display>) {
        if let Some(v) = value {
            self.0.insert(key.to_string(), v.to_string());
        }
    }

    fn plan(&mut self, p: PlanArgs) {
        self.put("kind", Some(p.kind));
        self.put("s", p.s);
        self.put("mode", p.mode);
        self.put("m", p.m);
        self.put("r", p.r);
        self.put("Z", p.z);
        self.put("T", p.t_target);
        self.put("a", p.a);
        let q = (!p.q.is_empty()).then(|| p.q.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        self.put("q", q);
        self.put("c", p.c);
        self.put("n", p.n);
        self.put("base", p.base);
    }
}

impl From<Cli> for CommandConfig {
    fn from(cli: Cli) -> Self {
        let mut params = Params::default();
        let mut budgets = Budgets::default();
        let (subcommand, seed, out) = match cli.command {
            Command::Plan(p) => {
                params.plan(p);
                (Subcommand::Plan, None, None)
            }
            Command::Construct { plan, run } => {
                params.plan(plan);
                budgets = Budgets { points: run.budget_points, subsets: run.budget_subsets, trials: run.trials };
                (Subcommand::Construct, run.seed, run.out)
            }
            Command::Sweep { plan, run } => {
                params.plan(plan);
                budgets = Budgets { points: run.budget_points, subsets: run.budget_subsets, trials: run.trials };
                (Subcommand::Sweep, run.seed, run.out)
            }
            Command::Verify(v) => {
                params.put("graph", Some(v.graph));
                params.put("s", v.s);
                params.put("t", v.t);
                params.put("orientation", v.orientation);
                budgets.subsets = v.budget_subsets;
                (Subcommand::Verify, v.seed, v.out)
            }
            Command::Indep(i) => {
                params.put("points", Some(i.points));
                params.put("q", Some(i.q));
                params.put("m", Some(i.m));
                params.put("s", i.s);
                budgets.subsets = i.budget_subsets;
                (Subcommand::Indep, None, i.out)
            }
            Command::Selftest(t) => {
                params.put("criteria", t.criteria);
                (Subcommand::Selftest, None, t.out)
            }
        };
        CommandConfig { subcommand, params: params.0, seed, out, budgets, workers: cli.workers }
    }
}
