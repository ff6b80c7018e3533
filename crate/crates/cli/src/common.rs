//! Pieces shared by the subcommands.

use std::path::{Path, PathBuf};

use anyhow::Result;
use clap::Args;
use serde::de::DeserializeOwned;
use serde::Serialize;
use spatperm::{DispersionModel, ModelSpec};

use crate::config::{anchor, Overrides};
use crate::output::Output;

/// How a successful run ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Outputs were written but a verification criterion failed.
    VerifyFailed,
    /// Outputs hold partial results because a budget ran out.
    ResourceCap,
}

pub struct RunResult {
    pub status: Status,
    pub model_hash: Option<String>,
}

/// One subcommand whose resolved config fully determines its outputs.
pub trait Command {
    type Config: Serialize + DeserializeOwned;
    const NAME: &'static str;

    fn seed_slot(cfg: &mut Self::Config) -> &mut Option<u64>;

    /// Seed used when neither the flag nor the config gives one; `None` draws from entropy.
    fn default_seed() -> Option<u64> {
        None
    }

    /// Rewrites relative paths so the config is valid from any directory.
    fn anchor_paths(_cfg: &mut Self::Config, _base: Option<&Path>) -> Result<()> {
        Ok(())
    }

    fn stem(cfg: &Self::Config) -> String;

    fn run(cfg: &Self::Config, seed: u64, out: &mut Output) -> Result<RunResult>;
}

/// Model flags mirrored from the `model` table of a config file.
#[derive(Debug, Clone, Default, Args)]
pub struct ModelArgs {
    /// gaussian, exponential3d, power_law1d or tabulated_radial.
    #[arg(long = "model")]
    pub kind: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub dim: Option<u64>,
    /// Two-column `r,g` CSV for the tabulated kind.
    #[arg(long)]
    pub table: Option<PathBuf>,
}

impl ModelArgs {
    pub fn apply(&self, o: &mut Overrides) {
        o.set("model.kind", self.kind.clone());
        o.set("model.beta", self.beta);
        o.set("model.dim", self.dim);
        o.set(
            "model.table",
            self.table.as_ref().map(|p| p.display().to_string()),
        );
    }
}

pub fn anchor_model(spec: &mut ModelSpec, base: Option<&Path>) -> Result<()> {
    if let Some(t) = &spec.table {
        spec.table = Some(anchor(t, base)?);
    }
    Ok(())
}

pub fn build_model(spec: &ModelSpec) -> Result<DispersionModel> {
    Ok(DispersionModel::from_spec(spec, None)?)
}

pub fn default_model() -> ModelSpec {
    ModelSpec::default()
}
