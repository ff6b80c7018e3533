use std::collections::BTreeMap;

use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::stats::wilson_interval;

use super::modes::ModeSet;
use super::table::{apply_mode, PartitionTable, Row};

/// Sparse occupation numbers `(n_k)` with `Σ n_k = N`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OccupancyState {
    pub counts: BTreeMap<usize, u64>,
    pub total: u64,
}

impl OccupancyState {
    pub fn get(&self, mode: usize) -> u64 {
        self.counts.get(&mode).copied().unwrap_or(0)
    }

    /// `index:count` pairs separated by spaces.
    pub fn to_sparse_string(&self) -> String {
        self.counts
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl PartitionTable {
    /// Exact draw from the occupation-number law.
    ///
    /// Walks the levels in order, drawing each level total from
    /// `G_ℓ(j) S_{ℓ+1}(M − j) / S_ℓ(M)`, then splits it among the level's modes.
    pub fn sample_occupation<R: Rng + ?Sized>(&self, rng: &mut R) -> OccupancyState {
        let mut state = OccupancyState {
            counts: BTreeMap::new(),
            total: self.n as u64,
        };
        let mut rem = self.n;
        let levels = self.modes.levels();
        for (li, lv) in levels.iter().enumerate() {
            if rem == 0 {
                break;
            }
            let g = &self.level_gf[li];
            let next = &self.suffix[li + 1];
            let cur = &self.suffix[li];
            let factor = (g.log_scale + next.log_scale - cur.log_scale).exp();
            let target = rng.gen::<f64>() * cur.v[rem];
            let mut acc = 0.0;
            let mut chosen = None;
            let mut last_positive = 0;
            for j in 0..=rem {
                let w = g.v[j] * next.v[rem - j] * factor;
                if w > 0.0 {
                    last_positive = j;
                }
                acc += w;
                if acc > target {
                    chosen = Some(j);
                    break;
                }
            }
            let j = chosen.unwrap_or(last_positive);
            if j > 0 {
                self.split_level(lv.start, lv.count, j, rng, &mut state);
            }
            rem -= j;
        }
        debug_assert_eq!(rem, 0);
        state
    }

    fn split_level<R: Rng + ?Sized>(
        &self,
        start: usize,
        count: usize,
        j: usize,
        rng: &mut R,
        state: &mut OccupancyState,
    ) {
        if count == 1 {
            state.counts.insert(start, j as u64);
            return;
        }
        if self.alpha.is_zero() {
            // Uniform composition of j into `count` parts: bars among j + count − 1 slots.
            let mut bars = index::sample(rng, j + count - 1, count - 1).into_vec();
            bars.sort_unstable();
            let mut prev: isize = -1;
            for (i, &b) in bars.iter().enumerate() {
                let n = (b as isize - prev - 1) as u64;
                if n > 0 {
                    state.counts.insert(start + i, n);
                }
                prev = b as isize;
            }
            let last = (j + count - 1) as isize - prev - 1;
            if last > 0 {
                state.counts.insert(start + count - 1, last as u64);
            }
            return;
        }
        // Within a level the energy factor is common; only the h-weights matter.
        let delta = self.alpha.delta();
        let mut q = Vec::new();
        let mut tables: Vec<Row> = Vec::with_capacity(count);
        let mut row = Row {
            v: {
                let mut v = vec![0.0; j + 1];
                v[0] = 1.0;
                v
            },
            log_scale: 0.0,
        };
        tables.push(row.clone());
        for _ in 1..count {
            apply_mode(&mut row, 1.0, delta, &mut q).expect("finite h convolution");
            tables.push(row.clone());
        }
        let mut left = j;
        for i in 0..count - 1 {
            let t = &tables[count - 1 - i];
            let total: f64 = (0..=left).map(|n| self.h[n] * t.v[left - n]).sum();
            let target = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = left;
            for n in 0..=left {
                acc += self.h[n] * t.v[left - n];
                if acc > target {
                    pick = n;
                    break;
                }
            }
            if pick > 0 {
                state.counts.insert(start + i, pick as u64);
            }
            left -= pick;
        }
        if left > 0 {
            state.counts.insert(start + count - 1, left as u64);
        }
    }
}

/// Which clauses of the typical-occupation event hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TypicalClauses {
    /// `|n₀/V − ρ₀| < η`.
    pub condensate: bool,
    /// `Σ_{0<|k|<V^{−η}} n_k < ηV`.
    pub low_modes: bool,
    /// `n_k < V^{3η}` for every `|k| ≥ V^{−η}`.
    pub per_mode_cap: bool,
}

impl TypicalClauses {
    pub fn all(&self) -> bool {
        self.condensate && self.low_modes && self.per_mode_cap
    }
}

/// Evaluates the three clauses on one occupation state.
pub fn typical_clauses(
    state: &OccupancyState,
    modes: &ModeSet,
    rho0: f64,
    eta: f64,
) -> TypicalClauses {
    let v = modes.volume();
    let k_low = v.powf(-eta);
    let cap = v.powf(3.0 * eta);
    let n0 = state.get(0) as f64;
    let mut low = 0.0;
    let mut capped = true;
    for (&k, &n) in &state.counts {
        if k == 0 {
            continue;
        }
        let kabs = modes.modes()[k].kabs;
        if kabs < k_low {
            low += n as f64;
        } else if n as f64 >= cap {
            capped = false;
        }
    }
    TypicalClauses {
        condensate: (n0 / v - rho0).abs() < eta,
        low_modes: low < eta * v,
        per_mode_cap: capped,
    }
}

/// Monte Carlo estimate of the typical-set probability with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TypicalSetEstimate {
    pub probability: f64,
    pub lower: f64,
    pub upper: f64,
    pub hits: usize,
    pub samples: usize,
    /// Per-clause failure counts: condensate, low modes, per-mode cap.
    pub clause_failures: [usize; 3],
}

/// Draws `samples` exact occupation states and counts membership in the typical set.
pub fn typical_set_probability<R: Rng + ?Sized>(
    table: &PartitionTable,
    rho0: f64,
    eta: f64,
    samples: usize,
    rng: &mut R,
) -> Result<TypicalSetEstimate> {
    if !(eta > 0.0) {
        return domain(format!("eta must be positive, got {eta}"));
    }
    if samples == 0 {
        return domain("need at least one sample");
    }
    let mut hits = 0;
    let mut fails = [0usize; 3];
    for _ in 0..samples {
        let s = table.sample_occupation(rng);
        let c = typical_clauses(&s, table.mode_set(), rho0, eta);
        if c.all() {
            hits += 1;
        }
        fails[0] += usize::from(!c.condensate);
        fails[1] += usize::from(!c.low_modes);
        fails[2] += usize::from(!c.per_mode_cap);
    }
    let (lower, upper) = wilson_interval(hits, samples, 1.96);
    Ok(TypicalSetEstimate {
        probability: hits as f64 / samples as f64,
        lower,
        upper,
        hits,
        samples,
        clause_failures: fails,
    })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::alpha::Alpha;
    use crate::spectral::HTable;

    #[test]
    fn trivial_draws() {
        let modes = Arc::new(ModeSet::from_energies(1.0, 1, &[0.0]).unwrap());
        let t = PartitionTable::build(Arc::clone(&modes), 5, &HTable::new(Alpha::ZERO, 5).unwrap())
            .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = t.sample_occupation(&mut rng);
        assert_eq!(s.get(0), 5);
        let t0 = PartitionTable::build(modes, 0, &HTable::new(Alpha::ZERO, 1).unwrap()).unwrap();
        assert!(t0.sample_occupation(&mut rng).counts.is_empty());
        let est = typical_set_probability(&t, 5.0, 0.1, 100, &mut rng).unwrap();
        assert_eq!(est.hits, 100);
    }

    #[test]
    fn two_mode_frequency() {
        let modes = Arc::new(ModeSet::from_energies(1.0, 1, &[0.0, 1.0]).unwrap());
        let t = PartitionTable::build(modes, 2, &HTable::new(Alpha::ZERO, 2).unwrap()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| t.sample_occupation(&mut rng).get(0) == 2)
            .count();
        let e = (-1.0f64).exp();
        let p = 1.0 / (1.0 + e + e * e);
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((hits as f64 / n as f64 - p).abs() < 3.0 * sigma);
    }
}
