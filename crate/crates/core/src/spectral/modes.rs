use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::model::DispersionModel;
use crate::quad::{self, QuadOptions};

/// One retained Fourier mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mode {
    pub k: Vec<f64>,
    pub kabs: f64,
    pub energy: f64,
}

/// Consecutive modes with identical energy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Level {
    pub start: usize,
    pub count: usize,
    pub energy: f64,
}

/// Truncated dual lattice `(ℤ/L)^d`, mode 0 first, sorted by `|k|` then lexicographically.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModeSet {
    l: f64,
    dim: usize,
    modes: Vec<Mode>,
    levels: Vec<Level>,
    k_cut: f64,
    tail_bound: f64,
    tail_estimate: f64,
}

/// Default cap on retained modes.
pub const DEFAULT_MAX_MODES: usize = 4_000_000;

impl ModeSet {
    /// Custom mode set; the first mode must carry energy 0.
    pub fn from_modes(l: f64, dim: usize, modes: Vec<Mode>) -> Result<Self> {
        if !(l > 0.0 && l.is_finite()) {
            return domain(format!("box side must be positive, got {l}"));
        }
        if modes.is_empty() || modes[0].energy != 0.0 {
            return Err(Error::InvalidInput(
                "mode 0 with energy 0 must come first".into(),
            ));
        }
        if modes
            .iter()
            .any(|m| !(m.energy >= 0.0 && m.energy.is_finite()))
        {
            return Err(Error::InvalidInput(
                "mode energies must be finite and nonnegative".into(),
            ));
        }
        let levels = group_levels(&modes);
        let k_cut = modes.iter().fold(0.0f64, |a, m| a.max(m.kabs));
        Ok(Self {
            l,
            dim,
            modes,
            levels,
            k_cut,
            tail_bound: 0.0,
            tail_estimate: 0.0,
        })
    }

    /// Toy set from energies alone; `|k|` is set to `index / L` along the first axis.
    pub fn from_energies(l: f64, dim: usize, energies: &[f64]) -> Result<Self> {
        let modes = energies
            .iter()
            .enumerate()
            .map(|(i, &e)| {
                let mut k = vec![0.0; dim.max(1)];
                k[0] = i as f64 / l;
                Mode {
                    k,
                    kabs: i as f64 / l,
                    energy: e,
                }
            })
            .collect();
        Self::from_modes(l, dim, modes)
    }

    pub fn side(&self) -> f64 {
        self.l
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `V = L^d`.
    pub fn volume(&self) -> f64 {
        self.l.powi(self.dim as i32)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn k_cut(&self) -> f64 {
        self.k_cut
    }

    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    /// Estimated `Σ_{|k|>k_cut} e^{−ε(k)}` over discarded modes.
    pub fn tail_estimate(&self) -> f64 {
        self.tail_estimate
    }

    /// Level containing mode `index`.
    pub fn level_of(&self, index: usize) -> usize {
        self.levels
            .partition_point(|lv| lv.start + lv.count <= index)
    }

    /// Hash of `L`, `d` and the energies, for cache keys.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.l.to_le_bytes());
        h.update((self.dim as u64).to_le_bytes());
        for m in &self.modes {
            h.update(m.energy.to_le_bytes());
        }
        hex::encode(h.finalize())
    }
}

fn group_levels(modes: &[Mode]) -> Vec<Level> {
    let mut levels: Vec<Level> = Vec::new();
    for (i, m) in modes.iter().enumerate() {
        match levels.last_mut() {
            Some(lv) if lv.energy == m.energy && lv.start + lv.count == i => lv.count += 1,
            _ => levels.push(Level {
                start: i,
                count: 1,
                energy: m.energy,
            }),
        }
    }
    levels
}

/// Estimate of `Σ_{|k|>K} e^{−ε(k)}` over `(ℤ/L)^d`: `V ∫_{|q|>K−√d/(2L)} e^{−ε(q)} dq`.
pub fn tail_mass_estimate(model: &DispersionModel, l: f64, k_cut: f64) -> f64 {
    let d = model.dim();
    let v = l.powi(d as i32);
    let r = (k_cut - (d as f64).sqrt() / (2.0 * l)).max(0.0);
    let opts = QuadOptions {
        abs_tol: 1e-300,
        rel_tol: 1e-6,
        max_intervals: 500,
    };
    let f = |q: f64| q.powi(d as i32 - 1) * model.fourier_weight(q);
    let scale = model.k_scale();
    let val = if r < 4.0 * scale {
        quad::integrate(f, r, 4.0 * scale, opts).value
            + quad::integrate_to_infinity(f, 4.0 * scale, opts).value
    } else {
        quad::integrate_to_infinity(f, r, opts).value
    };
    v * quad::sphere_area(d) * val
}

/// Smallest shell `|m|² ≤ n` of `(ℤ/L)^d` whose discarded tail is below `tail_bound`.
pub fn build_mode_set(
    model: &DispersionModel,
    l: f64,
    tail_bound: f64,
    max_modes: usize,
) -> Result<ModeSet> {
    if !(l > 0.0 && l.is_finite()) {
        return domain(format!("box side must be positive, got {l}"));
    }
    if !(tail_bound > 0.0 && tail_bound <= 1e-3) {
        return domain(format!(
            "tail bound must lie in (0, 1e-3], got {tail_bound}"
        ));
    }
    let d = model.dim();
    let tail = |n: u64| tail_mass_estimate(model, l, (n as f64).sqrt() / l);
    // Exponential search then bisection on the integer norm.
    let mut hi: u64 = 1;
    while tail(hi) >= tail_bound {
        hi *= 2;
        if hi > 1 << 40 {
            return Err(Error::ResourceCap("mode cutoff does not converge".into()));
        }
    }
    let mut lo: u64 = 0;
    if tail(0) < tail_bound {
        hi = 0;
    }
    while hi > lo + 1 {
        let mid = (lo + hi) / 2;
        if tail(mid) < tail_bound {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let n_cut = hi;
    let radius = (n_cut as f64).sqrt();
    let approx_count = match d {
        1 => 2.0 * radius + 1.0,
        2 => std::f64::consts::PI * (radius + 1.0).powi(2),
        _ => 4.0 / 3.0 * std::f64::consts::PI * (radius + 1.0).powi(3),
    };
    if approx_count > max_modes as f64 {
        return Err(Error::ResourceCap(format!(
            "about {approx_count:.0} modes needed for tail bound {tail_bound:e}, cap is {max_modes}"
        )));
    }
    let r = radius.floor() as i64;
    let mut lattice: Vec<(u64, [i64; 3])> = Vec::new();
    let mut push = |m: [i64; 3]| {
        let n2 = (m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as u64;
        if n2 <= n_cut {
            lattice.push((n2, m));
        }
    };
    match d {
        1 => (-r..=r).for_each(|a| push([a, 0, 0])),
        2 => (-r..=r).for_each(|a| (-r..=r).for_each(|b| push([a, b, 0]))),
        _ => (-r..=r).for_each(|a| (-r..=r).for_each(|b| (-r..=r).for_each(|c| push([a, b, c])))),
    }
    if lattice.len() > max_modes {
        return Err(Error::ResourceCap(format!(
            "{} modes exceed cap {max_modes}",
            lattice.len()
        )));
    }
    lattice.sort();
    let mut modes = Vec::with_capacity(lattice.len());
    let mut cached: Option<(u64, f64)> = None;
    for (n2, m) in lattice {
        let kabs = (n2 as f64).sqrt() / l;
        let energy = match cached {
            Some((c, e)) if c == n2 => e,
            _ => {
                let e = model.epsilon_radial(kabs)?;
                cached = Some((n2, e));
                e
            }
        };
        modes.push(Mode {
            k: m[..d].iter().map(|&c| c as f64 / l).collect(),
            kabs,
            energy,
        });
    }
    let mut set = ModeSet::from_modes(l, d, modes)?;
    set.k_cut = radius / l;
    set.tail_bound = tail_bound;
    set.tail_estimate = tail(n_cut);
    Ok(set)
}
