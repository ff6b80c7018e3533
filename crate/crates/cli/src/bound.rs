//! `cycle-bound`: truncated cycle sums through one point of a finite point set.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use spatperm::cycles::{finite_cycle_bound, write_bound_csv};
use spatperm::mcmc::PointSet;
use spatperm::ModelSpec;

use crate::common::{
    anchor_model, build_model, default_model, Command, ModelArgs, RunResult, Status,
};
use crate::config::{anchor, Overrides};
use crate::output::Output;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    /// CSV, one row per point, `model.dim` columns.
    pub points: PathBuf,
    #[serde(default)]
    pub start: usize,
    /// Interaction strength, `0 ≤ s < 1`.
    #[serde(default)]
    pub s: f64,
    pub n_max: usize,
    #[serde(default = "default_budget")]
    pub node_budget: u64,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_budget() -> u64 {
    100_000_000
}

#[derive(Debug, Clone, Args)]
pub struct BoundArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub points: Option<PathBuf>,
    #[arg(long)]
    pub start: Option<u64>,
    #[arg(long)]
    pub s: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u64>,
    #[arg(long)]
    pub node_budget: Option<u64>,
}

impl BoundArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        self.model.apply(&mut o);
        o.set(
            "points",
            self.points.as_ref().map(|p| p.display().to_string()),
        );
        o.set("start", self.start);
        o.set("s", self.s);
        o.set("n_max", self.n_max);
        o.set("node_budget", self.node_budget);
        Ok(o)
    }
}

pub struct Bound;

impl Command for Bound {
    type Config = BoundConfig;
    const NAME: &'static str = "cycle-bound";

    fn seed_slot(cfg: &mut BoundConfig) -> &mut Option<u64> {
        &mut cfg.seed
    }

    fn anchor_paths(cfg: &mut BoundConfig, base: Option<&std::path::Path>) -> Result<()> {
        cfg.points = anchor(&cfg.points, base)?;
        anchor_model(&mut cfg.model, base)
    }

    fn stem(_cfg: &BoundConfig) -> String {
        "cycle_bound".into()
    }

    fn run(cfg: &BoundConfig, _seed: u64, out: &mut Output) -> Result<RunResult> {
        let model = build_model(&cfg.model)?;
        let points = PointSet::from_csv(&cfg.points, cfg.model.dim)?;
        let b = finite_cycle_bound(
            &points.coords,
            points.dim,
            cfg.start,
            cfg.s,
            &model,
            cfg.n_max,
            cfg.node_budget,
        )?;
        write_bound_csv(&b, out.create(".csv")?)?;
        if !b.complete {
            eprintln!(
                "node budget {} exhausted; partial sums written",
                cfg.node_budget
            );
        }
        Ok(RunResult {
            status: if b.complete {
                Status::Ok
            } else {
                Status::ResourceCap
            },
            model_hash: Some(model.hash()),
        })
    }
}
