use std::collections::BTreeMap;
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::stats::{blocked_standard_error, integrated_autocorrelation_time, mean};

use super::geometry::{BoxGeometry, PointSet};
use super::hamiltonian::HamiltonianSpec;
use super::state::PermutationState;

/// Proposals between drift checks.
pub const DRIFT_CHECK_INTERVAL: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainConfig {
    /// Recorded sweeps after burn-in; one sweep is `N` proposals.
    pub sweeps: usize,
    /// `None`: ten energy autocorrelation times from a pilot run.
    #[serde(default)]
    pub burn_in: Option<usize>,
    #[serde(default = "one")]
    pub thinning: usize,
    /// `0` samples the quenched measure.
    #[serde(default)]
    pub point_move_fraction: f64,
    #[serde(default = "one_f")]
    pub max_displacement: f64,
    pub seed: u64,
    /// Share of permutation proposals that are 3-cycles; `None` picks 0.5 at `α = ∞`, else 0.
    #[serde(default)]
    pub cycle3_fraction: Option<f64>,
}

fn one() -> usize {
    1
}

fn one_f() -> f64 {
    1.0
}

impl ChainConfig {
    pub fn new(sweeps: usize, seed: u64) -> Self {
        Self {
            sweeps,
            burn_in: None,
            thinning: 1,
            point_move_fraction: 0.0,
            max_displacement: 1.0,
            seed,
            cycle3_fraction: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.thinning == 0 {
            return domain("thinning must be positive");
        }
        if !(0.0..=1.0).contains(&self.point_move_fraction) {
            return domain(format!(
                "point_move_fraction must lie in [0, 1], got {}",
                self.point_move_fraction
            ));
        }
        if !(self.max_displacement > 0.0 && self.max_displacement.is_finite()) {
            return domain(format!(
                "max_displacement must be positive, got {}",
                self.max_displacement
            ));
        }
        if let Some(f) = self.cycle3_fraction {
            if !(0.0..=1.0).contains(&f) {
                return domain(format!("cycle3_fraction must lie in [0, 1], got {f}"));
            }
        }
        Ok(())
    }

    fn cycle3(&self, spec: &HamiltonianSpec) -> f64 {
        self.cycle3_fraction
            .unwrap_or(if spec.alpha.is_infinite() { 0.5 } else { 0.0 })
    }
}

/// Which quantities are recorded per retained sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    /// `(m, n)` windows for `ϱ_{m,n}`.
    pub rho_windows: Vec<(usize, usize)>,
}

impl Observables {
    pub fn names(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .rho_windows
            .iter()
            .map(|(m, n)| format!("rho_{m}_{n}"))
            .collect();
        v.extend(["n2", "energy", "max_cycle"].map(String::from));
        v
    }
}

/// Accepted and attempted proposals per move type.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MoveCounts {
    pub accepted: u64,
    pub attempted: u64,
}

impl MoveCounts {
    pub fn rate(&self) -> f64 {
        if self.attempted == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempted as f64
        }
    }

    fn add(&mut self, other: &MoveCounts) {
        self.accepted += other.accepted;
        self.attempted += other.attempted;
    }

    fn record(&mut self, accepted: bool) {
        self.attempted += 1;
        self.accepted += u64::from(accepted);
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Acceptance {
    pub swap: MoveCounts,
    pub cycle3: MoveCounts,
    pub point: MoveCounts,
}

/// Recorded observables, one row per retained sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub names: Vec<String>,
    /// Sweep index (after burn-in) of each row.
    pub sweeps: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
    pub acceptance: Acceptance,
    pub burn_in_sweeps: usize,
    pub max_drift: f64,
}

/// Mean and blocked error of one recorded column.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColumnSummary {
    pub mean: f64,
    pub blocked_error: f64,
}

impl Trace {
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let c = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[c]).collect())
    }

    pub fn summary(&self) -> BTreeMap<String, ColumnSummary> {
        self.names
            .iter()
            .enumerate()
            .map(|(c, name)| {
                let xs: Vec<f64> = self.rows.iter().map(|r| r[c]).collect();
                (
                    name.clone(),
                    ColumnSummary {
                        mean: mean(&xs),
                        blocked_error: blocked_standard_error(&xs),
                    },
                )
            })
            .collect()
    }

    /// `sweep` followed by one column per observable, with a header.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["sweep".to_string()];
        header.extend(self.names.iter().cloned());
        w.write_record(&header)?;
        for (s, row) in self.sweeps.iter().zip(&self.rows) {
            let mut rec = vec![s.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:?}")));
            w.write_record(&rec)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Concatenates traces of independent chains in the given order.
    pub fn merge(traces: &[Trace]) -> Result<Trace> {
        let Some(first) = traces.first() else {
            return Ok(Trace::default());
        };
        let mut out = Trace {
            names: first.names.clone(),
            ..Trace::default()
        };
        for t in traces {
            if t.names != out.names {
                return domain("cannot merge traces with different observables");
            }
            out.sweeps.extend_from_slice(&t.sweeps);
            out.rows.extend(t.rows.iter().cloned());
            out.acceptance.swap.add(&t.acceptance.swap);
            out.acceptance.cycle3.add(&t.acceptance.cycle3);
            out.acceptance.point.add(&t.acceptance.point);
            out.burn_in_sweeps = out.burn_in_sweeps.max(t.burn_in_sweeps);
            out.max_drift = out.max_drift.max(t.max_drift);
        }
        Ok(out)
    }
}

struct Driver<'a> {
    spec: &'a HamiltonianSpec,
    config: &'a ChainConfig,
    cycle3: f64,
    rng: ChaCha8Rng,
    acceptance: Acceptance,
    steps: u64,
    max_drift: f64,
}

impl Driver<'_> {
    fn sweep(&mut self, state: &mut PermutationState) -> Result<()> {
        for _ in 0..state.len() {
            let u: f64 = self.rng.gen();
            if u < self.config.point_move_fraction {
                let a = state.step_point(self.spec, self.config.max_displacement, &mut self.rng);
                self.acceptance.point.record(a);
            } else if self.rng.gen::<f64>() < self.cycle3 {
                let a = state.step_cycle3(self.spec, &mut self.rng);
                self.acceptance.cycle3.record(a);
            } else {
                let a = state.step_swap(self.spec, &mut self.rng);
                self.acceptance.swap.record(a);
            }
            self.steps += 1;
            if self.steps % DRIFT_CHECK_INTERVAL == 0 {
                let d = state.check_drift(self.spec)?;
                self.max_drift = self.max_drift.max(d);
            }
        }
        Ok(())
    }
}

fn record(state: &PermutationState, spec: &HamiltonianSpec, observables: &Observables) -> Vec<f64> {
    let mut row: Vec<f64> = observables
        .rho_windows
        .iter()
        .map(|&(m, n)| state.rho(m, n))
        .collect();
    row.push(state.n2() as f64);
    row.push(state.energy(spec));
    row.push(state.max_cycle() as f64);
    row
}

/// Runs one chain from the identity permutation on `points`.
pub fn run_chain(
    points: &PointSet,
    geometry: BoxGeometry,
    spec: &HamiltonianSpec,
    config: &ChainConfig,
    observables: &Observables,
) -> Result<(Trace, PermutationState)> {
    config.validate()?;
    let mut state = PermutationState::new(points, geometry, spec)?;
    let mut driver = Driver {
        spec,
        config,
        cycle3: config.cycle3(spec),
        rng: ChaCha8Rng::seed_from_u64(config.seed),
        acceptance: Acceptance::default(),
        steps: 0,
        max_drift: 0.0,
    };
    let mut trace = Trace {
        names: observables.names(),
        ..Trace::default()
    };
    if config.sweeps == 0 {
        return Ok((trace, state));
    }
    let burn_in = match config.burn_in {
        Some(b) => {
            for _ in 0..b {
                driver.sweep(&mut state)?;
            }
            b
        }
        None => {
            let pilot = (config.sweeps / 5).max(20);
            let mut energies = Vec::with_capacity(pilot);
            for _ in 0..pilot {
                driver.sweep(&mut state)?;
                energies.push(state.energy(spec));
            }
            let tau = integrated_autocorrelation_time(&energies);
            let target = (10.0 * tau).ceil() as usize;
            for _ in pilot..target {
                driver.sweep(&mut state)?;
            }
            pilot.max(target)
        }
    };
    driver.acceptance = Acceptance::default();
    for s in 0..config.sweeps {
        driver.sweep(&mut state)?;
        if (s + 1) % config.thinning == 0 {
            trace.sweeps.push(s + 1);
            trace.rows.push(record(&state, spec, observables));
        }
    }
    let d = state.check_drift(spec)?;
    trace.acceptance = driver.acceptance;
    trace.burn_in_sweeps = burn_in;
    trace.max_drift = driver.max_drift.max(d);
    Ok((trace, state))
}
