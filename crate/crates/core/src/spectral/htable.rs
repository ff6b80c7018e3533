use serde::{Deserialize, Serialize};

use crate::alpha::Alpha;
use crate::error::{domain, Result};

/// Weights `h_n(α) = (1/n!) Σ_{π∈S_n} e^{−α N₂(π)}` for `n = 0..=nmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HTable {
    alpha: Alpha,
    delta: f64,
    values: Vec<f64>,
    recursion_gap: f64,
}

impl HTable {
    /// Closed form `Σ_{j≤⌊n/2⌋} (−δ)^j/j!`, cross-checked against the recursion
    /// `h_n = (1/n)Σ_{j<n} h_j − (1/n)(1−e^{−α}) h_{n−2}`.
    pub fn new(alpha: Alpha, nmax: usize) -> Result<Self> {
        if nmax < 1 {
            return domain("nmax must be at least 1");
        }
        let delta = alpha.delta();
        let mut values = Vec::with_capacity(nmax + 1);
        let mut partial = 1.0;
        let mut term = 1.0;
        for n in 0..=nmax {
            if n >= 2 && n % 2 == 0 {
                let j = (n / 2) as f64;
                term *= -delta / j;
                partial += term;
            }
            values.push(partial);
        }
        let c = alpha.one_minus_exp_neg();
        let mut rec = vec![1.0, 1.0];
        let mut running = 2.0;
        let mut gap = 0.0f64;
        for n in 2..=nmax {
            let h = (running - c * rec[n - 2]) / n as f64;
            gap = gap.max((h - values[n]).abs());
            running += h;
            rec.push(h);
        }
        Ok(Self {
            alpha,
            delta,
            values,
            recursion_gap: gap,
        })
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn nmax(&self) -> usize {
        self.values.len() - 1
    }

    pub fn get(&self, n: usize) -> f64 {
        self.values[n]
    }

    /// Largest `|closed form − recursion|` over the table.
    pub fn recursion_gap(&self) -> f64 {
        self.recursion_gap
    }
}
