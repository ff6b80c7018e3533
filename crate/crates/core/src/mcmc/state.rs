use rand::Rng;

use crate::error::{Error, Result};

use super::geometry::{BoxGeometry, PointSet};
use super::hamiltonian::HamiltonianSpec;

/// Largest tolerated `|cached − recomputed|` energy.
pub const DRIFT_TOLERANCE: f64 = 1e-8;

/// Points, permutation and the cached cycle structure and energy.
///
/// Every accepted state has finite energy: the chain starts at the identity
/// with `N₂ = 0` and infinite-energy proposals are always rejected.
#[derive(Debug, Clone)]
pub struct PermutationState {
    geometry: BoxGeometry,
    coords: Vec<f64>,
    perm: Vec<usize>,
    inverse: Vec<usize>,
    /// `ξ_Λ(x_{π(i)} − x_i)`.
    jumps: Vec<f64>,
    cycle_of: Vec<usize>,
    cycle_len: Vec<usize>,
    free_ids: Vec<usize>,
    /// Number of cycles of each length.
    length_counts: Vec<usize>,
    one_body: f64,
    two_body: f64,
}

impl PermutationState {
    /// Identity permutation on the given points.
    pub fn new(points: &PointSet, geometry: BoxGeometry, spec: &HamiltonianSpec) -> Result<Self> {
        if points.dim != geometry.dim || spec.model.dim() != geometry.dim {
            return Err(Error::InvalidInput(
                "points, box and model disagree on the dimension".into(),
            ));
        }
        let n = points.len();
        if n == 0 {
            return Err(Error::Domain("need at least one point".into()));
        }
        let self_jump = spec
            .model
            .xi_periodized(&vec![0.0; geometry.dim], geometry.side)?;
        if !self_jump.is_finite() {
            return Err(Error::Domain(
                "the periodized weight vanishes at the origin".into(),
            ));
        }
        let mut length_counts = vec![0; n + 1];
        length_counts[1] = n;
        Ok(Self {
            geometry,
            coords: points.coords.clone(),
            perm: (0..n).collect(),
            inverse: (0..n).collect(),
            jumps: vec![self_jump; n],
            cycle_of: (0..n).collect(),
            cycle_len: vec![1; n],
            free_ids: Vec::new(),
            length_counts,
            one_body: self_jump * n as f64,
            two_body: 0.0,
        })
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn geometry(&self) -> &BoxGeometry {
        &self.geometry
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn inverse(&self) -> &[usize] {
        &self.inverse
    }

    pub fn points(&self) -> PointSet {
        PointSet {
            dim: self.geometry.dim,
            coords: self.coords.clone(),
        }
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.geometry.dim;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn n2(&self) -> usize {
        self.length_counts.get(2).copied().unwrap_or(0)
    }

    pub fn cycle_length_of(&self, i: usize) -> usize {
        self.cycle_len[self.cycle_of[i]]
    }

    pub fn length_counts(&self) -> &[usize] {
        &self.length_counts
    }

    pub fn max_cycle(&self) -> usize {
        self.length_counts.iter().rposition(|&c| c > 0).unwrap_or(0)
    }

    /// `ϱ_{m,n}` from the cached length counts.
    pub fn rho(&self, m: usize, n: usize) -> f64 {
        let hi = n.min(self.len());
        let lo = m.max(1);
        let count: usize = (lo..=hi).map(|l| l * self.length_counts[l]).sum();
        count as f64 / self.geometry.volume()
    }

    /// Cached `H`.
    pub fn energy(&self, spec: &HamiltonianSpec) -> f64 {
        self.one_body + spec.alpha.penalty(self.n2()) + self.two_body
    }

    /// Cached one-body and 2-cycle interaction parts.
    pub fn energy_parts(&self) -> (f64, f64) {
        (self.one_body, self.two_body)
    }

    fn jump(&self, spec: &HamiltonianSpec, from: usize, to: usize) -> f64 {
        let d = self.geometry.dim;
        let mut disp = [0.0; 3];
        let (a, b) = (self.point(from), self.point(to));
        for c in 0..d {
            disp[c] = b[c] - a[c];
        }
        // Only divergent periodizations fail, and those fail at construction.
        spec.model
            .xi_periodized(&disp[..d], self.geometry.side)
            .unwrap_or(f64::INFINITY)
    }

    fn is_two_cycle(&self, x: usize) -> bool {
        let p = self.perm[x];
        p != x && self.perm[p] == x
    }

    /// `(number, energy)` of distinct 2-cycles through any of `idx`, under the current `perm`.
    fn local_two_cycles(&self, spec: &HamiltonianSpec, idx: &[usize]) -> (usize, f64) {
        let mut seen = [usize::MAX; 3];
        let mut count = 0;
        let mut energy = 0.0;
        for &x in idx {
            if !self.is_two_cycle(x) {
                continue;
            }
            let key = x.min(self.perm[x]);
            if seen[..count].contains(&key) {
                continue;
            }
            seen[count] = key;
            count += 1;
            if let Some(v) = spec.two_body() {
                energy += v.energy(self.point(x), self.point(self.perm[x]), &self.geometry);
            }
        }
        (count, energy)
    }

    /// Full recomputation: `(one_body, n2, two_body)`.
    pub fn recompute(&self, spec: &HamiltonianSpec) -> (f64, usize, f64) {
        let mut one = 0.0;
        let mut n2 = 0;
        let mut two = 0.0;
        for i in 0..self.len() {
            one += self.jump(spec, i, self.perm[i]);
            if self.is_two_cycle(i) && i < self.perm[i] {
                n2 += 1;
                if let Some(v) = spec.two_body() {
                    two += v.energy(self.point(i), self.point(self.perm[i]), &self.geometry);
                }
            }
        }
        (one, n2, two)
    }

    /// Compares cached and recomputed energy parts, then resynchronizes the cache.
    pub fn check_drift(&mut self, spec: &HamiltonianSpec) -> Result<f64> {
        let (one, n2, two) = self.recompute(spec);
        let drift = (one - self.one_body).abs() + (two - self.two_body).abs();
        if n2 != self.n2() {
            return Err(Error::Numerical(format!(
                "cached N2 = {} but recount gives {n2}",
                self.n2()
            )));
        }
        if !(drift < DRIFT_TOLERANCE) {
            return Err(Error::EnergyDrift { drift });
        }
        self.one_body = one;
        self.two_body = two;
        for i in 0..self.len() {
            self.jumps[i] = self.jump(spec, i, self.perm[i]);
        }
        Ok(drift)
    }

    /// Rebuilds the cycle decomposition from `perm` and compares with the cache.
    pub fn check_consistency(&self) -> Result<()> {
        let n = self.len();
        for i in 0..n {
            if self.inverse[self.perm[i]] != i {
                return Err(Error::Numerical(format!("inverse broken at {i}")));
            }
        }
        let mut seen = vec![false; n];
        let mut ids = std::collections::HashSet::new();
        let mut counts = vec![0; n + 1];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            let id = self.cycle_of[s];
            if !ids.insert(id) {
                return Err(Error::Numerical(format!(
                    "cycle id {id} shared by two cycles"
                )));
            }
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                if self.cycle_of[i] != id {
                    return Err(Error::Numerical(format!(
                        "index {i} carries a stale cycle id"
                    )));
                }
                seen[i] = true;
                i = self.perm[i];
                len += 1;
            }
            if self.cycle_len[id] != len {
                return Err(Error::Numerical(format!(
                    "cycle {id} has length {len}, cached {}",
                    self.cycle_len[id]
                )));
            }
            counts[len] += 1;
        }
        if counts != self.length_counts {
            return Err(Error::Numerical("cycle length counts out of sync".into()));
        }
        Ok(())
    }

    fn set_count(&mut self, len: usize, delta: isize) {
        let c = &mut self.length_counts[len];
        *c = (*c as isize + delta) as usize;
    }

    fn fresh_id(&mut self) -> usize {
        if let Some(id) = self.free_ids.pop() {
            id
        } else {
            self.cycle_len.push(0);
            self.cycle_len.len() - 1
        }
    }

    /// `π ← π∘(i j)` with cycle bookkeeping; relabels the smaller resulting piece.
    fn apply_transposition(&mut self, i: usize, j: usize) {
        let (ci, cj) = (self.cycle_of[i], self.cycle_of[j]);
        let (pi, pj) = (self.perm[i], self.perm[j]);
        if ci != cj {
            let (li, lj) = (self.cycle_len[ci], self.cycle_len[cj]);
            let (keep, drop, start) = if li >= lj { (ci, cj, j) } else { (cj, ci, i) };
            let mut x = start;
            loop {
                self.cycle_of[x] = keep;
                x = self.perm[x];
                if x == start {
                    break;
                }
            }
            self.cycle_len[keep] = li + lj;
            self.cycle_len[drop] = 0;
            self.free_ids.push(drop);
            self.set_count(li, -1);
            self.set_count(lj, -1);
            self.set_count(li + lj, 1);
            self.perm[i] = pj;
            self.perm[j] = pi;
            self.inverse[pj] = i;
            self.inverse[pi] = j;
        } else {
            self.perm[i] = pj;
            self.perm[j] = pi;
            self.inverse[pj] = i;
            self.inverse[pi] = j;
            let total = self.cycle_len[ci];
            // Walk both new cycles in lockstep; the first to close is the smaller.
            let (mut a, mut b) = (self.perm[i], self.perm[j]);
            let mut steps = 1;
            let (small_start, small_len) = loop {
                if a == i {
                    break (i, steps);
                }
                if b == j {
                    break (j, steps);
                }
                a = self.perm[a];
                b = self.perm[b];
                steps += 1;
            };
            let id = self.fresh_id();
            let mut x = small_start;
            loop {
                self.cycle_of[x] = id;
                x = self.perm[x];
                if x == small_start {
                    break;
                }
            }
            self.cycle_len[id] = small_len;
            self.cycle_len[ci] = total - small_len;
            self.set_count(total, -1);
            self.set_count(small_len, 1);
            self.set_count(total - small_len, 1);
        }
    }

    fn accept<R: Rng + ?Sized>(delta: f64, rng: &mut R) -> bool {
        if delta.is_nan() {
            return false;
        }
        delta <= 0.0 || rng.gen::<f64>() < (-delta).exp()
    }

    fn penalty_delta(spec: &HamiltonianSpec, before: usize, after: usize) -> f64 {
        if before == after {
            0.0
        } else {
            spec.alpha.value() * (after as f64 - before as f64)
        }
    }

    /// Metropolis step on `π ← π∘(i j)` for a uniform pair `i ≠ j`.
    pub fn step_swap<R: Rng + ?Sized>(&mut self, spec: &HamiltonianSpec, rng: &mut R) -> bool {
        let n = self.len();
        if n < 2 {
            return false;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        self.try_swap(spec, i, j, rng)
    }

    /// Metropolis step for the transposition `(i j)`.
    pub fn try_swap<R: Rng + ?Sized>(
        &mut self,
        spec: &HamiltonianSpec,
        i: usize,
        j: usize,
        rng: &mut R,
    ) -> bool {
        let (pi, pj) = (self.perm[i], self.perm[j]);
        let new_i = self.jump(spec, i, pj);
        let new_j = self.jump(spec, j, pi);
        let d_one = new_i + new_j - self.jumps[i] - self.jumps[j];
        let (n_before, e_before) = self.local_two_cycles(spec, &[i, j]);
        self.perm[i] = pj;
        self.perm[j] = pi;
        let (n_after, e_after) = self.local_two_cycles(spec, &[i, j]);
        self.perm[i] = pi;
        self.perm[j] = pj;
        let delta = d_one + Self::penalty_delta(spec, n_before, n_after) + (e_after - e_before);
        if !Self::accept(delta, rng) {
            return false;
        }
        self.apply_transposition(i, j);
        self.jumps[i] = new_i;
        self.jumps[j] = new_j;
        self.one_body += d_one;
        self.two_body += e_after - e_before;
        true
    }

    /// Metropolis step on `π ← π∘(i j k)` for distinct uniform `i, j, k`.
    ///
    /// Needed at `α = ∞`: from the identity every transposition creates a 2-cycle.
    pub fn step_cycle3<R: Rng + ?Sized>(&mut self, spec: &HamiltonianSpec, rng: &mut R) -> bool {
        let n = self.len();
        if n < 3 {
            return false;
        }
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let mut k = rng.gen_range(0..n - 2);
        if k >= lo {
            k += 1;
        }
        if k >= hi {
            k += 1;
        }
        let (pi, pj, pk) = (self.perm[i], self.perm[j], self.perm[k]);
        let new_i = self.jump(spec, i, pj);
        let new_j = self.jump(spec, j, pk);
        let new_k = self.jump(spec, k, pi);
        let d_one = new_i + new_j + new_k - self.jumps[i] - self.jumps[j] - self.jumps[k];
        let (n_before, e_before) = self.local_two_cycles(spec, &[i, j, k]);
        self.perm[i] = pj;
        self.perm[j] = pk;
        self.perm[k] = pi;
        let (n_after, e_after) = self.local_two_cycles(spec, &[i, j, k]);
        self.perm[i] = pi;
        self.perm[j] = pj;
        self.perm[k] = pk;
        let delta = d_one + Self::penalty_delta(spec, n_before, n_after) + (e_after - e_before);
        if !Self::accept(delta, rng) {
            return false;
        }
        // (i j k) = (i j)∘(j k)
        self.apply_transposition(i, j);
        self.apply_transposition(j, k);
        self.jumps[i] = new_i;
        self.jumps[j] = new_j;
        self.jumps[k] = new_k;
        self.one_body += d_one;
        self.two_body += e_after - e_before;
        true
    }

    /// Metropolis step moving one point by a uniform offset in `[−δ, δ]^d`.
    pub fn step_point<R: Rng + ?Sized>(
        &mut self,
        spec: &HamiltonianSpec,
        max_displacement: f64,
        rng: &mut R,
    ) -> bool {
        let n = self.len();
        let d = self.geometry.dim;
        let i = rng.gen_range(0..n);
        let mut proposal = [0.0; 3];
        for (c, p) in proposal.iter_mut().take(d).enumerate() {
            let x = self.coords[i * d + c] + rng.gen_range(-1.0..=1.0) * max_displacement;
            *p = self.geometry.wrap(x);
        }
        let (pi, qi) = (self.perm[i], self.inverse[i]);
        if pi == i {
            // Only the self-jump touches x_i, and it does not depend on x_i.
            self.coords[i * d..(i + 1) * d].copy_from_slice(&proposal[..d]);
            return true;
        }
        let (_, e_before) = self.local_two_cycles(spec, &[i]);
        let old: [f64; 3] = {
            let mut o = [0.0; 3];
            o[..d].copy_from_slice(self.point(i));
            o
        };
        self.coords[i * d..(i + 1) * d].copy_from_slice(&proposal[..d]);
        let new_out = self.jump(spec, i, pi);
        let new_in = self.jump(spec, qi, i);
        let (_, e_after) = self.local_two_cycles(spec, &[i]);
        let d_one = new_out + new_in - self.jumps[i] - self.jumps[qi];
        let delta = d_one + (e_after - e_before);
        if !Self::accept(delta, rng) {
            self.coords[i * d..(i + 1) * d].copy_from_slice(&old[..d]);
            return false;
        }
        self.jumps[i] = new_out;
        self.jumps[qi] = new_in;
        self.one_body += d_one;
        self.two_body += e_after - e_before;
        true
    }
}
