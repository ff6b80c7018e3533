//! `mc`: Metropolis chains over permutations and points.

use std::collections::BTreeMap;
use std::sync::Arc;

use anyhow::{Context, Result};
use clap::Args;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spatperm::cycles::{cycle_stats, write_histogram_csv};
use spatperm::mcmc::{
    generate_points, run_chain, BoxGeometry, ChainConfig, ColumnSummary, HamiltonianSpec,
    MoveCounts, Observables, PointProcess, Trace,
};
use spatperm::{Alpha, ModelSpec};

use crate::common::{
    anchor_model, build_model, default_model, Command, ModelArgs, RunResult, Status,
};
use crate::config::{anchor, Overrides};
use crate::output::Output;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McConfig {
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    /// Box side `L`.
    pub side: f64,
    /// Must equal the row count of a `file` point set.
    #[serde(default)]
    pub particles: usize,
    #[serde(default = "default_process")]
    pub process: PointProcess,
    #[serde(default)]
    pub alpha: Alpha,
    /// Scattering length of the 2-cycle interaction; excludes `α > 0`.
    #[serde(default)]
    pub pair_a: f64,
    pub sweeps: usize,
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "one")]
    pub thinning: usize,
    #[serde(default)]
    pub point_move_fraction: f64,
    #[serde(default = "one_f")]
    pub max_displacement: f64,
    #[serde(default)]
    pub cycle3_fraction: Option<f64>,
    /// `[m, n]` windows recorded as `rho_m_n`.
    #[serde(default)]
    pub rho_windows: Vec<(usize, usize)>,
    /// Independent chains from the same initial points, merged in order.
    #[serde(default = "one")]
    pub chains: usize,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_process() -> PointProcess {
    PointProcess::Poisson
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

#[derive(Debug, Clone, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long = "side", short = 'L')]
    pub side: Option<f64>,
    #[arg(long = "particles", short = 'N')]
    pub particles: Option<u64>,
    /// Point file (CSV, one row per point) instead of a random process.
    #[arg(long)]
    pub points: Option<std::path::PathBuf>,
    /// `poisson` or `lattice`.
    #[arg(long, conflicts_with = "points")]
    pub process: Option<String>,
    #[arg(long)]
    pub alpha: Option<Alpha>,
    #[arg(long)]
    pub pair_a: Option<f64>,
    #[arg(long)]
    pub sweeps: Option<u64>,
    #[arg(long)]
    pub burn_in: Option<u64>,
    #[arg(long)]
    pub thinning: Option<u64>,
    #[arg(long)]
    pub point_move_fraction: Option<f64>,
    #[arg(long)]
    pub max_displacement: Option<f64>,
    #[arg(long)]
    pub cycle3_fraction: Option<f64>,
    /// Cycle-length window `m:n`; repeatable.
    #[arg(long = "rho", value_parser = parse_window)]
    pub rho_windows: Option<Vec<(usize, usize)>>,
    #[arg(long)]
    pub chains: Option<u64>,
}

fn parse_window(s: &str) -> Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(':')
        .ok_or_else(|| format!("window must be m:n, got {s:?}"))?;
    Ok((
        m.trim().parse().map_err(|e| format!("{e}"))?,
        n.trim().parse().map_err(|e| format!("{e}"))?,
    ))
}

impl McArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        self.model.apply(&mut o);
        o.set("side", self.side);
        o.set("particles", self.particles);
        if let Some(p) = &self.points {
            o.set(
                "process",
                Some(serde_json::json!({"kind": "file", "path": p.display().to_string()})),
            );
        }
        o.set(
            "process",
            self.process
                .as_ref()
                .map(|k| serde_json::json!({ "kind": k })),
        );
        o.set("alpha", self.alpha.map(serde_json::to_value).transpose()?);
        o.set("pair_a", self.pair_a);
        o.set("sweeps", self.sweeps);
        o.set("burn_in", self.burn_in);
        o.set("thinning", self.thinning);
        o.set("point_move_fraction", self.point_move_fraction);
        o.set("max_displacement", self.max_displacement);
        o.set("cycle3_fraction", self.cycle3_fraction);
        o.set(
            "rho_windows",
            self.rho_windows
                .as_ref()
                .map(serde_json::to_value)
                .transpose()?,
        );
        o.set("chains", self.chains);
        Ok(o)
    }
}

#[derive(Serialize)]
struct Rate {
    accepted: u64,
    attempted: u64,
    rate: f64,
}

impl From<MoveCounts> for Rate {
    fn from(m: MoveCounts) -> Self {
        Self {
            accepted: m.accepted,
            attempted: m.attempted,
            rate: m.rate(),
        }
    }
}

#[derive(Serialize)]
struct Summary {
    observables: BTreeMap<String, ColumnSummary>,
    acceptance: BTreeMap<&'static str, Rate>,
    rows: usize,
    chains: usize,
    particles: usize,
    volume: f64,
    burn_in_sweeps: usize,
    max_drift: f64,
    /// Cycle structure of the first chain's final permutation.
    final_max_cycle: usize,
    final_n2: usize,
}

pub struct Mc;

impl Command for Mc {
    type Config = McConfig;
    const NAME: &'static str = "mc";

    fn seed_slot(cfg: &mut McConfig) -> &mut Option<u64> {
        &mut cfg.seed
    }

    fn anchor_paths(cfg: &mut McConfig, base: Option<&std::path::Path>) -> Result<()> {
        if let PointProcess::File { path } = &cfg.process {
            cfg.process = PointProcess::File {
                path: anchor(path, base)?,
            };
        }
        anchor_model(&mut cfg.model, base)
    }

    fn stem(_cfg: &McConfig) -> String {
        "mc".into()
    }

    fn run(cfg: &McConfig, seed: u64, out: &mut Output) -> Result<RunResult> {
        if cfg.chains == 0 {
            return Err(
                spatperm::Error::InvalidInput("config: chains must be at least 1".into()).into(),
            );
        }
        let model = Arc::new(build_model(&cfg.model)?);
        let geometry = BoxGeometry::new(cfg.side, cfg.model.dim)?;
        let spec = HamiltonianSpec::new(model.clone(), cfg.alpha, cfg.pair_a)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = generate_points(&cfg.process, &geometry, cfg.particles, &mut rng)?;
        let chain_seeds: Vec<u64> = (0..cfg.chains).map(|_| rng.gen()).collect();
        let obs = Observables {
            rho_windows: cfg.rho_windows.clone(),
        };
        let base = ChainConfig {
            sweeps: cfg.sweeps,
            burn_in: cfg.burn_in,
            thinning: cfg.thinning,
            point_move_fraction: cfg.point_move_fraction,
            max_displacement: cfg.max_displacement,
            seed: 0,
            cycle3_fraction: cfg.cycle3_fraction,
        };
        base.validate()?;
        let runs = chain_seeds
            .par_iter()
            .map(|&s| {
                run_chain(
                    &points,
                    geometry,
                    &spec,
                    &ChainConfig {
                        seed: s,
                        ..base.clone()
                    },
                    &obs,
                )
            })
            .collect::<spatperm::Result<Vec<_>>>()?;
        let traces: Vec<Trace> = runs.iter().map(|(t, _)| t.clone()).collect();
        let trace = Trace::merge(&traces)?;
        let first = &runs[0].1;
        let stats = cycle_stats(first.perm(), geometry.volume(), &[])?;

        points
            .to_csv(&out.path(".points.csv"))
            .context("writing point file")?;
        trace.write_csv(out.create(".trace.csv")?)?;
        write_histogram_csv(&stats, out.create(".histogram.csv")?)?;
        let summary = Summary {
            observables: trace.summary(),
            acceptance: [
                ("swap", trace.acceptance.swap.into()),
                ("cycle3", trace.acceptance.cycle3.into()),
                ("point", trace.acceptance.point.into()),
            ]
            .into_iter()
            .collect(),
            rows: trace.rows.len(),
            chains: cfg.chains,
            particles: points.len(),
            volume: geometry.volume(),
            burn_in_sweeps: trace.burn_in_sweeps,
            max_drift: trace.max_drift,
            final_max_cycle: stats.max_cycle,
            final_n2: stats.n2,
        };
        out.write_json(".summary.json", &summary)?;
        Ok(RunResult {
            status: Status::Ok,
            model_hash: Some(model.hash()),
        })
    }
}
