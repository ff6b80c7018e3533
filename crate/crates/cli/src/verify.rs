//! `verify`: named acceptance suites with a JSON report.

use anyhow::Result;
use clap::Args;
use serde::{Deserialize, Serialize};
use spatperm::verify::{run_suite, Suite, VerifyOptions};

use crate::common::{Command, RunResult, Status};
use crate::config::Overrides;
use crate::output::{num, Output};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyConfig {
    pub suite: Suite,
    #[serde(default)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    /// thm5_2, thmBP, thm7_1, thm7_2, lemB or oracle_small.
    #[arg(long)]
    pub suite: Option<Suite>,
}

impl VerifyArgs {
    pub fn overrides(&self) -> Result<Overrides> {
        let mut o = Overrides::default();
        o.set("suite", self.suite.map(serde_json::to_value).transpose()?);
        Ok(o)
    }
}

pub struct Verify;

impl Command for Verify {
    type Config = VerifyConfig;
    const NAME: &'static str = "verify";

    fn seed_slot(cfg: &mut VerifyConfig) -> &mut Option<u64> {
        &mut cfg.seed
    }

    /// Pass/fail must not depend on the invocation.
    fn default_seed() -> Option<u64> {
        Some(VerifyOptions::default().seed)
    }

    fn stem(cfg: &VerifyConfig) -> String {
        format!("verify_{}", cfg.suite.name())
    }

    fn run(cfg: &VerifyConfig, seed: u64, out: &mut Output) -> Result<RunResult> {
        let report = run_suite(cfg.suite, &VerifyOptions { seed });
        for c in &report.criteria {
            eprintln!(
                "{} criterion {} ({}): measured {}, target {}, tolerance {}, {:.1}s",
                if c.pass { "PASS" } else { "FAIL" },
                c.id,
                c.name,
                num(c.measured),
                num(c.target),
                num(c.tolerance),
                c.seconds
            );
        }
        let pass = report.pass();
        out.write_json(".json", &report)?;
        Ok(RunResult {
            status: if pass {
                Status::Ok
            } else {
                Status::VerifyFailed
            },
            model_hash: None,
        })
    }
}
