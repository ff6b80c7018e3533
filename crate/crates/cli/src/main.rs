//! Command-line front end: thermodynamic curves, exact spectral sums,
//! Metropolis chains and the acceptance suites, each run leaving a
//! manifest from which `replay` reproduces it.

mod bound;
mod common;
mod config;
mod mc;
mod output;
mod spectral;
mod thermo;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Result};
use chrono::Utc;
use clap::{Parser, Subcommand};
use serde_json::Value;

use common::{Command, Status};
use config::{resolve, ConfigSource, Overrides};
use output::{Output, RunManifest};

const EXIT_OTHER: u8 = 1;
const EXIT_DOMAIN: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_VERIFY: u8 = 4;

#[derive(Debug, Parser)]
#[command(
    name = "spatperm",
    version,
    about = "Spatial random permutations: thermodynamics, exact sums, Monte Carlo"
)]
struct Cli {
    /// TOML or JSON config for the subcommand; flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// RNG seed; drawn from entropy and recorded when absent.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid points and chains.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Pressures, critical densities, long-cycle bound, critical-temperature shift.
    Thermo(thermo::ThermoArgs),
    /// Exact partition functions, marginals, cycle densities, MGFs and samples.
    Spectral(spectral::SpectralArgs),
    /// Metropolis chains: trace CSV, summary JSON, final cycle histogram.
    Mc(mc::McArgs),
    /// Run an acceptance suite; exits 4 when a criterion fails.
    Verify(verify::VerifyArgs),
    /// Truncated cycle sums through one point of a point file.
    CycleBound(bound::BoundArgs),
    /// Re-execute the run recorded in a manifest.
    Replay { manifest: PathBuf },
}

/// Loads, overlays, anchors paths and fixes the seed.
fn configure<C: Command>(
    file: Option<&Path>,
    overrides: Overrides,
    seed: Option<u64>,
) -> Result<C::Config> {
    let src = ConfigSource::load(file)?;
    let mut cfg: C::Config = resolve(src.value, overrides)?;
    C::anchor_paths(&mut cfg, src.base.as_deref())?;
    let slot = C::seed_slot(&mut cfg);
    *slot = seed
        .or(*slot)
        .or_else(C::default_seed)
        .or_else(|| Some(rand::random()));
    Ok(cfg)
}

fn execute<C: Command>(mut cfg: C::Config, out_dir: &Path) -> Result<Status> {
    let started = Utc::now();
    let seed = C::seed_slot(&mut cfg).expect("seed fixed by configure");
    let mut out = Output::new(out_dir, C::stem(&cfg))?;
    let result = C::run(&cfg, seed, &mut out)?;
    let manifest = RunManifest::new(
        C::NAME,
        serde_json::to_value(&cfg)?,
        result.model_hash,
        seed,
        started,
        out.files(),
    );
    let path = out.write_manifest(&manifest)?;
    eprintln!(
        "wrote {} output(s) for {}, manifest {}",
        out.files().len(),
        out.stem(),
        path.display()
    );
    Ok(result.status)
}

fn configure_and_run<C: Command>(cli: &Cli, overrides: Overrides) -> Result<Status> {
    let cfg = configure::<C>(cli.config.as_deref(), overrides, cli.seed)?;
    execute::<C>(cfg, &cli.out)
}

fn replay(manifest: &Path, out: &Path) -> Result<Status> {
    let m = RunManifest::load(manifest)?;
    fn go<C: Command>(config: Value, seed: u64, out: &Path) -> Result<Status> {
        let mut cfg: C::Config = resolve(config, Overrides::default())?;
        *C::seed_slot(&mut cfg) = Some(seed);
        execute::<C>(cfg, out)
    }
    match m.command.as_str() {
        thermo::Thermo::NAME => go::<thermo::Thermo>(m.config, m.seed, out),
        spectral::Spectral::NAME => go::<spectral::Spectral>(m.config, m.seed, out),
        mc::Mc::NAME => go::<mc::Mc>(m.config, m.seed, out),
        verify::Verify::NAME => go::<verify::Verify>(m.config, m.seed, out),
        bound::Bound::NAME => go::<bound::Bound>(m.config, m.seed, out),
        other => bail!("manifest names unknown command {other:?}"),
    }
}

fn run(cli: &Cli) -> Result<Status> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()?;
    }
    match &cli.cmd {
        Cmd::Thermo(a) => configure_and_run::<thermo::Thermo>(cli, a.overrides()?),
        Cmd::Spectral(a) => configure_and_run::<spectral::Spectral>(cli, a.overrides()?),
        Cmd::Mc(a) => configure_and_run::<mc::Mc>(cli, a.overrides()?),
        Cmd::Verify(a) => configure_and_run::<verify::Verify>(cli, a.overrides()?),
        Cmd::CycleBound(a) => configure_and_run::<bound::Bound>(cli, a.overrides()?),
        Cmd::Replay { manifest } => replay(manifest, &cli.out),
    }
}

/// Domain-type failures exit 2, exhausted budgets 3, anything else 1.
fn exit_code(err: &anyhow::Error) -> u8 {
    use spatperm::Error as E;
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Domain(_)
                | E::InvalidInput(_)
                | E::UnsupportedModel(_)
                | E::UnsupportedExact(_)
                | E::Positivity { .. } => EXIT_DOMAIN,
                E::ResourceCap(_) => EXIT_RESOURCE,
                _ => EXIT_OTHER,
            };
        }
    }
    EXIT_OTHER
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Status::Ok) => ExitCode::SUCCESS,
        Ok(Status::VerifyFailed) => ExitCode::from(EXIT_VERIFY),
        Ok(Status::ResourceCap) => ExitCode::from(EXIT_RESOURCE),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
