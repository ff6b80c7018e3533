//! `spectral`: exact occupation-number computations on one torus.

use std::path::PathBuf;
use std::sync::Arc;

use anyhow::Result;
use clap::{Args, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use spatperm::spectral::{
    partition_table, typical_set_probability, CacheKey, HTable, DEFAULT_MAX_MODES,
};
use spatperm::thermo::critical_density_alpha;
use spatperm::verify::TAIL_BOUND;
use spatperm::{build_mode_set, Alpha, ModeSet, ModelSpec, PartitionTable};

use crate::common::{
    anchor_model, build_model, default_model, Command, ModelArgs, RunResult, Status,
};
use crate::config::{anchor, Overrides};
use crate::output::{num, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
pub enum Task {
    /// `log Z′(Λ, M)` for `M = 0..=N`.
    #[serde(rename = "logZ")]
    #[value(name = "logZ")]
    LogZ,
    /// Law of the occupation number of one mode.
    #[serde(rename = "marginal")]
    #[value(name = "marginal")]
    Marginal,
    /// Expected density in cycles of length `m..=n` (`α = 0` only).
    #[serde(rename = "rho")]
    #[value(name = "rho")]
    Rho,
    /// `E e^{λ n₀/V}` on the λ grid.
    #[serde(rename = "mgf")]
    #[value(name = "mgf")]
    Mgf,
    /// Probability of the typical set at tolerance η.
    #[serde(rename = "typical")]
    #[value(name = "typical")]
    Typical,
    /// Exact occupation draws, one sparse state per row.
    #[serde(rename = "sample")]
    #[value(name = "sample")]
    Sample,
}

impl Task {
    fn name(self) -> &'static str {
        match self {
            Task::LogZ => "logZ",
            Task::Marginal => "marginal",
            Task::Rho => "rho",
            Task::Mgf => "mgf",
            Task::Typical => "typical",
            Task::Sample => "sample",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    /// Box side `L`.
    pub side: f64,
    /// Particle number `N`.
    pub particles: usize,
    #[serde(default)]
    pub alpha: Alpha,
    pub task: Task,
    /// Explicit mode energies (first must be 0) replacing the model's spectrum.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub energies: Option<Vec<f64>>,
    #[serde(default = "default_tail")]
    pub tail_bound: f64,
    #[serde(default = "default_max_modes")]
    pub max_modes: usize,
    /// Mode index for `marginal`.
    #[serde(default)]
    pub mode: usize,
    /// Cycle-length window for `rho`.
    #[serde(default = "one")]
    pub m: usize,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default = "default_lambda")]
    pub lambda: Vec<f64>,
    #[serde(default = "default_eta")]
    pub eta: f64,
    /// Draws for `sample` and `typical`.
    #[serde(default = "default_count")]
    pub count: usize,
    /// Table cache file; built and written when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_tail() -> f64 {
    TAIL_BOUND
}

fn default_max_modes() -> usize {
    DEFAULT_MAX_MODES
}

fn one() -> usize {
    1
}

fn default_lambda() -> Vec<f64> {
    vec![0.0]
}

fn default_eta() -> f64 {
    0.1
}

fn default_count() -> usize {
    10
}

#[derive(Debug, Clone, Args)]
pub struct SpectralArgs {
    #[arg(long, value_enum)]
    pub task: Option<Task>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Box side `L`.
    #[arg(long = "side", short = 'L')]
    pub side: Option<f64>,
    /// Particle number `N`.
    #[arg(long = "particles", short = 'N')]
    pub particles: Option<u64>,
    #[arg(long)]
    pub alpha: Option<Alpha>,
    /// Comma-separated mode energies replacing the model's spectrum.
    #[arg(long, value_delimiter = ',')]
    pub energies: Option<Vec<f64>>,
    #[arg(long)]
    pub tail_bound: Option<f64>,
    #[arg(long)]
    pub max_modes: Option<u64>,
    #[arg(long)]
    pub mode: Option<u64>,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub n: Option<u64>,
    /// Comma-separated λ values.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lambda: Option<Vec<f64>>,
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub count: Option<u64>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

impl SpectralArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        o.set("task", self.task.map(serde_json::to_value).transpose()?);
        self.model.apply(&mut o);
        o.set("side", self.side);
        o.set("particles", self.particles);
        o.set("alpha", self.alpha.map(serde_json::to_value).transpose()?);
        o.set_list("energies", self.energies.clone());
        o.set("tail_bound", self.tail_bound);
        o.set("max_modes", self.max_modes);
        o.set("mode", self.mode);
        o.set("m", self.m);
        o.set("n", self.n);
        o.set_list("lambda", self.lambda.clone());
        o.set("eta", self.eta);
        o.set("count", self.count);
        o.set(
            "cache",
            self.cache.as_ref().map(|p| p.display().to_string()),
        );
        Ok(o)
    }
}

pub struct Spectral;

fn table(cfg: &SpectralConfig, model_hash: &str) -> Result<PartitionTable> {
    let model = build_model(&cfg.model)?;
    let modes = Arc::new(match &cfg.energies {
        Some(e) => ModeSet::from_energies(cfg.side, cfg.model.dim, e)?,
        None => build_mode_set(&model, cfg.side, cfg.tail_bound, cfg.max_modes)?,
    });
    let Some(path) = &cfg.cache else {
        return Ok(partition_table(modes, cfg.particles, cfg.alpha)?);
    };
    let key = CacheKey {
        model_hash: model_hash.to_string(),
        l: cfg.side,
        n: cfg.particles,
        alpha: cfg.alpha,
        tail_bound: cfg.tail_bound,
    };
    if path.exists() {
        return Ok(PartitionTable::load_cache(path, modes, &key)?);
    }
    let h = HTable::new(cfg.alpha, cfg.particles.max(1))?;
    let t = PartitionTable::build(modes, cfg.particles, &h)?;
    t.save_cache(path, &key)?;
    Ok(t)
}

impl Command for Spectral {
    type Config = SpectralConfig;
    const NAME: &'static str = "spectral";

    fn seed_slot(cfg: &mut SpectralConfig) -> &mut Option<u64> {
        &mut cfg.seed
    }

    fn anchor_paths(cfg: &mut SpectralConfig, base: Option<&std::path::Path>) -> Result<()> {
        if let Some(c) = &cfg.cache {
            cfg.cache = Some(anchor(c, base)?);
        }
        anchor_model(&mut cfg.model, base)
    }

    fn stem(cfg: &SpectralConfig) -> String {
        format!("spectral_{}", cfg.task.name())
    }

    fn run(cfg: &SpectralConfig, seed: u64, out: &mut Output) -> Result<RunResult> {
        let model = build_model(&cfg.model)?;
        // Explicit energies are part of the model's identity.
        let hash = match &cfg.energies {
            Some(e) => format!(
                "{}:energies:{}",
                model.hash(),
                e.iter().map(|x| num(*x)).collect::<Vec<_>>().join(",")
            ),
            None => model.hash(),
        };
        let t = table(cfg, &hash)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (header, rows): (&[&str], Vec<Vec<String>>) = match cfg.task {
            Task::LogZ => (
                &["N", "log_z"],
                (0..=cfg.particles)
                    .map(|m| vec![m.to_string(), num(t.log_z_at(m))])
                    .collect(),
            ),
            Task::Marginal => {
                let p = t.occupation_marginal(cfg.mode)?;
                (
                    &["j", "probability"],
                    p.iter()
                        .enumerate()
                        .map(|(j, v)| vec![j.to_string(), num(*v)])
                        .collect(),
                )
            }
            Task::Rho => {
                let v = t.expected_cycle_density(cfg.m, cfg.n)?;
                (
                    &["m", "n", "value"],
                    vec![vec![cfg.m.to_string(), cfg.n.to_string(), num(v)]],
                )
            }
            Task::Mgf => {
                let rows = cfg
                    .lambda
                    .iter()
                    .map(|&l| Ok(vec![num(l), num(t.mgf_n0(l)?)]))
                    .collect::<Result<_>>()?;
                (&["lambda", "value"], rows)
            }
            Task::Typical => {
                let rc = critical_density_alpha(&model, cfg.alpha)?.value;
                let rho0 = cfg.particles as f64 / t.mode_set().volume() - rc;
                let e = typical_set_probability(&t, rho0, cfg.eta, cfg.count, &mut rng)?;
                (
                    &[
                        "rho0",
                        "eta",
                        "probability",
                        "lower",
                        "upper",
                        "hits",
                        "samples",
                    ],
                    vec![vec![
                        num(rho0),
                        num(cfg.eta),
                        num(e.probability),
                        num(e.lower),
                        num(e.upper),
                        e.hits.to_string(),
                        e.samples.to_string(),
                    ]],
                )
            }
            Task::Sample => {
                let rows = (0..cfg.count)
                    .map(|i| {
                        vec![
                            i.to_string(),
                            t.sample_occupation(&mut rng).to_sparse_string(),
                        ]
                    })
                    .collect();
                (&["sample", "state"], rows)
            }
        };
        out.write_csv(".csv", header, &rows)?;
        Ok(RunResult {
            status: Status::Ok,
            model_hash: Some(hash),
        })
    }
}
