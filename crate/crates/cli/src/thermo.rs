//! `thermo`: pressures, critical densities, the long-cycle bound and the `T_c` shift on a grid.

use anyhow::Result;
use clap::{Args, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use spatperm::thermo::{
    alpha_pressure, critical_density, critical_density_alpha, ideal_pressure,
    long_cycle_lower_bound, tc_shift_constant,
};
use spatperm::{Alpha, ModelSpec};

use crate::common::{
    anchor_model, build_model, default_model, Command, ModelArgs, RunResult, Status,
};
use crate::config::{parse_range, Overrides};
use crate::output::{num, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Ideal-gas pressure over the μ grid.
    P0,
    /// 2-cycle-penalized pressure over the α × μ grid.
    Palpha,
    /// Critical density of the ideal gas.
    Rhoc,
    /// Critical density over the α grid.
    RhocAlpha,
    /// Critical-temperature shift constant over the ρ grid.
    Tcshift,
    /// Lower bound on the long-cycle density over the α × ρ grid.
    Bound,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThermoConfig {
    #[serde(default = "default_model")]
    pub model: ModelSpec,
    pub quantity: Quantity,
    /// Chemical potentials; all must be negative.
    #[serde(default = "default_mu")]
    pub mu: Vec<f64>,
    #[serde(default = "default_alpha")]
    pub alpha: Vec<Alpha>,
    #[serde(default = "default_rho")]
    pub rho: Vec<f64>,
    #[serde(default)]
    pub seed: Option<u64>,
}

fn default_mu() -> Vec<f64> {
    vec![-0.1]
}

fn default_alpha() -> Vec<Alpha> {
    vec![Alpha::INFINITY]
}

fn default_rho() -> Vec<f64> {
    vec![0.1]
}

#[derive(Debug, Clone, Args)]
pub struct ThermoArgs {
    #[arg(long, value_enum)]
    pub quantity: Option<Quantity>,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Comma-separated chemical potentials.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub mu: Option<Vec<f64>>,
    /// `start:stop:count` grid of chemical potentials.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "mu")]
    pub mu_range: Option<String>,
    /// Comma-separated penalties; `inf` allowed.
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<Alpha>>,
    /// Comma-separated densities.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<f64>>,
}

impl ThermoArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        o.set(
            "quantity",
            self.quantity.map(serde_json::to_value).transpose()?,
        );
        self.model.apply(&mut o);
        let mu = match &self.mu_range {
            Some(r) => Some(parse_range(r)?),
            None => self.mu.clone(),
        };
        o.set_list("mu", mu);
        o.set_list(
            "alpha",
            self.alpha
                .as_ref()
                .map(|v| {
                    v.iter()
                        .map(serde_json::to_value)
                        .collect::<Result<Vec<_>, _>>()
                })
                .transpose()?,
        );
        o.set_list("rho", self.rho.clone());
        Ok(o)
    }
}

pub struct Thermo;

impl Command for Thermo {
    type Config = ThermoConfig;
    const NAME: &'static str = "thermo";

    fn seed_slot(cfg: &mut ThermoConfig) -> &mut Option<u64> {
        &mut cfg.seed
    }

    fn anchor_paths(cfg: &mut ThermoConfig, base: Option<&std::path::Path>) -> Result<()> {
        anchor_model(&mut cfg.model, base)
    }

    fn stem(cfg: &ThermoConfig) -> String {
        let q = serde_json::to_value(cfg.quantity)
            .ok()
            .and_then(|v| v.as_str().map(String::from))
            .unwrap_or_default();
        format!("thermo_{q}")
    }

    fn run(cfg: &ThermoConfig, _seed: u64, out: &mut Output) -> Result<RunResult> {
        let model = build_model(&cfg.model)?;
        let (header, rows): (&[&str], Vec<Vec<String>>) = match cfg.quantity {
            Quantity::P0 => {
                let rows = cfg
                    .mu
                    .par_iter()
                    .map(|&mu| {
                        let r = ideal_pressure(&model, mu)?;
                        Ok(vec![num(mu), num(r.value), num(r.est_error)])
                    })
                    .collect::<Result<_>>()?;
                (&["mu", "value", "est_error"], rows)
            }
            Quantity::Palpha => {
                let grid: Vec<(Alpha, f64)> = cfg
                    .alpha
                    .iter()
                    .flat_map(|&a| cfg.mu.iter().map(move |&m| (a, m)))
                    .collect();
                let rows = grid
                    .par_iter()
                    .map(|&(a, mu)| {
                        let r = alpha_pressure(&model, mu, a)?;
                        Ok(vec![a.to_string(), num(mu), num(r.value), num(r.est_error)])
                    })
                    .collect::<Result<_>>()?;
                (&["alpha", "mu", "value", "est_error"], rows)
            }
            Quantity::Rhoc => {
                let r = critical_density(&model)?;
                (
                    &["value", "est_error"],
                    vec![vec![num(r.value), num(r.est_error)]],
                )
            }
            Quantity::RhocAlpha => {
                let rows = cfg
                    .alpha
                    .par_iter()
                    .map(|&a| {
                        let r = critical_density_alpha(&model, a)?;
                        Ok(vec![a.to_string(), num(r.value), num(r.est_error)])
                    })
                    .collect::<Result<_>>()?;
                (&["alpha", "value", "est_error"], rows)
            }
            Quantity::Tcshift => {
                // Gaussian d=3 by construction; the model section is ignored.
                let rows = cfg
                    .rho
                    .par_iter()
                    .map(|&rho| {
                        let t = tc_shift_constant(rho)?;
                        Ok(vec![
                            num(rho),
                            num(t.value),
                            num((t.value - t.forward).abs()),
                            num(t.analytic),
                        ])
                    })
                    .collect::<Result<_>>()?;
                (&["rho", "value", "est_error", "analytic"], rows)
            }
            Quantity::Bound => {
                let rc_err = critical_density(&model)?.est_error;
                let grid: Vec<(Alpha, f64)> = cfg
                    .alpha
                    .iter()
                    .flat_map(|&a| cfg.rho.iter().map(move |&r| (a, r)))
                    .collect();
                let rows = grid
                    .par_iter()
                    .map(|&(a, rho)| {
                        let b = long_cycle_lower_bound(&model, rho, a)?;
                        let err = 4.0 * rc_err / (1.0 + a.exp_neg()).powi(2);
                        Ok(vec![
                            a.to_string(),
                            num(rho),
                            num(b.value),
                            num(err),
                            b.vacuous.to_string(),
                        ])
                    })
                    .collect::<Result<_>>()?;
                (&["alpha", "rho", "value", "est_error", "vacuous"], rows)
            }
        };
        out.write_csv(".csv", header, &rows)?;
        Ok(RunResult {
            status: Status::Ok,
            model_hash: Some(model.hash()),
        })
    }
}
