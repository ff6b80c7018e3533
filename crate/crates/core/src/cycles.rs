//! Cycle observables of permutations and the truncated cycle-sum enumerator.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::model::DispersionModel;

/// Cycle structure of one permutation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleStats {
    /// Cycle lengths, sorted ascending.
    pub lengths: Vec<usize>,
    /// Requested `ϱ_{m,n}`.
    pub rho_values: BTreeMap<(usize, usize), f64>,
    pub n2: usize,
    pub max_cycle: usize,
    pub volume: f64,
}

impl CycleStats {
    pub fn particles(&self) -> usize {
        self.lengths.iter().sum()
    }

    /// `ϱ_{m,n} = (1/V) #{i : m ≤ ℓ_i ≤ n}`.
    pub fn rho(&self, m: usize, n: usize) -> f64 {
        rho_from_lengths(&self.lengths, self.volume, m, n)
    }

    /// `(length, number of cycles)` pairs.
    pub fn histogram(&self) -> BTreeMap<usize, usize> {
        let mut h = BTreeMap::new();
        for &l in &self.lengths {
            *h.entry(l).or_insert(0) += 1;
        }
        h
    }
}

fn rho_from_lengths(lengths: &[usize], volume: f64, m: usize, n: usize) -> f64 {
    let count: usize = lengths.iter().filter(|&&l| l >= m && l <= n).sum();
    count as f64 / volume
}

/// Cycle lengths of a permutation given as `perm[i] = π(i)` on `0..N`.
pub fn cycle_lengths(perm: &[usize]) -> Result<Vec<usize>> {
    let n = perm.len();
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || seen[p] {
            return Err(Error::InvalidInput("not a bijection".into()));
        }
        seen[p] = true;
    }
    seen.iter_mut().for_each(|s| *s = false);
    let mut lengths = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = perm[i];
            len += 1;
        }
        lengths.push(len);
    }
    lengths.sort_unstable();
    Ok(lengths)
}

pub fn cycle_stats(perm: &[usize], volume: f64, pairs: &[(usize, usize)]) -> Result<CycleStats> {
    if !(volume > 0.0) {
        return domain(format!("volume must be positive, got {volume}"));
    }
    let lengths = cycle_lengths(perm)?;
    let rho_values = pairs
        .iter()
        .map(|&(m, n)| ((m, n), rho_from_lengths(&lengths, volume, m, n)))
        .collect();
    Ok(CycleStats {
        n2: lengths.iter().filter(|&&l| l == 2).count(),
        max_cycle: lengths.last().copied().unwrap_or(0),
        lengths,
        rho_values,
        volume,
    })
}

/// Window edges `(⌈V^a⌉, ⌈V^b⌉, ⌊sV⌋)`.
pub fn macro_windows(volume: f64, a: f64, b: f64, s: f64) -> (usize, usize, usize) {
    (
        volume.powf(a).ceil() as usize,
        volume.powf(b).ceil() as usize,
        (s * volume).floor() as usize,
    )
}

/// `(ϱ_{1,⌈V^a⌉}, ϱ_{⌈V^a⌉+1,⌈V^b⌉}, ϱ_{⌈V^b⌉+1,⌊sV⌋})`; each edge belongs to the lower window.
pub fn macro_cycle_fractions(
    perm: &[usize],
    volume: f64,
    a: f64,
    b: f64,
    s: f64,
) -> Result<(f64, f64, f64)> {
    if !(0.0 < a && a < b && b < 1.0) {
        return domain(format!("need 0 < a < b < 1, got a = {a}, b = {b}"));
    }
    if !(s >= 0.0) {
        return domain(format!("s must be nonnegative, got {s}"));
    }
    let lengths = cycle_lengths(perm)?;
    let (ta, tb, ts) = macro_windows(volume, a, b, s);
    Ok((
        rho_from_lengths(&lengths, volume, 1, ta),
        rho_from_lengths(&lengths, volume, ta + 1, tb),
        rho_from_lengths(&lengths, volume, tb + 1, ts),
    ))
}

/// Partial sums of the cycle series by length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundEnumeration {
    /// `partial_sums[n−1]` sums all cycles of length `≤ n`.
    pub partial_sums: Vec<f64>,
    /// Nodes expanded up to each depth, cumulative.
    pub nodes_visited: Vec<u64>,
    /// False when the node budget stopped the search.
    pub complete: bool,
}

/// Partial products below this are pruned.
pub const PRUNE_THRESHOLD: f64 = 1e-16;

/// `Σ_{n≤n_max} Σ_{γ=(j₁..j_n), j₁=i} Π_k e^{−(1−s)ξ(x_{j_k} − x_{j_{k−1}})}` over self-avoiding
/// cyclic sequences, with `j₀ = j_n`. Points live in `ℝ^d` (no periodization).
pub fn finite_cycle_bound(
    points: &[f64],
    dim: usize,
    start: usize,
    s: f64,
    model: &DispersionModel,
    n_max: usize,
    node_budget: u64,
) -> Result<BoundEnumeration> {
    if dim == 0 || points.len() % dim != 0 {
        return Err(Error::InvalidInput(
            "point buffer does not match dimension".into(),
        ));
    }
    let n = points.len() / dim;
    if start >= n {
        return domain(format!("start index {start} out of range"));
    }
    if !(0.0..1.0).contains(&s) {
        return domain(format!("need 0 ≤ s < 1, got {s}"));
    }
    if n_max == 0 {
        return domain("n_max must be at least 1");
    }
    let n_max = n_max.min(n);
    let weight = |a: usize, b: usize| {
        let mut r2 = 0.0;
        for c in 0..dim {
            let d = points[a * dim + c] - points[b * dim + c];
            r2 += d * d;
        }
        (-(1.0 - s) * model.xi(r2.sqrt())).exp()
    };
    let mut by_len = vec![0.0; n_max];
    let mut nodes = vec![0u64; n_max];
    by_len[0] = 1.0;
    nodes[0] = 1;
    let mut used = vec![false; n];
    used[start] = true;
    let mut budget_hit = false;
    let mut visited = 1u64;

    struct Ctx<'a, W: Fn(usize, usize) -> f64> {
        weight: &'a W,
        start: usize,
        n_max: usize,
        budget: u64,
        by_len: &'a mut [f64],
        nodes: &'a mut [u64],
        used: &'a mut [bool],
        visited: &'a mut u64,
        budget_hit: &'a mut bool,
    }

    fn dfs<W: Fn(usize, usize) -> f64>(
        ctx: &mut Ctx<'_, W>,
        last: usize,
        depth: usize,
        product: f64,
    ) {
        // `depth` points in the sequence so far.
        if depth == ctx.n_max || *ctx.budget_hit {
            return;
        }
        for next in 0..ctx.used.len() {
            if ctx.used[next] {
                continue;
            }
            if *ctx.visited >= ctx.budget {
                *ctx.budget_hit = true;
                return;
            }
            let p = product * (ctx.weight)(last, next);
            *ctx.visited += 1;
            ctx.nodes[depth] += 1;
            if p < PRUNE_THRESHOLD {
                continue;
            }
            ctx.by_len[depth] += p * (ctx.weight)(next, ctx.start);
            ctx.used[next] = true;
            dfs(ctx, next, depth + 1, p);
            ctx.used[next] = false;
        }
    }

    let mut ctx = Ctx {
        weight: &weight,
        start,
        n_max,
        budget: node_budget,
        by_len: &mut by_len,
        nodes: &mut nodes,
        used: &mut used,
        visited: &mut visited,
        budget_hit: &mut budget_hit,
    };
    dfs(&mut ctx, start, 1, 1.0);
    let mut partial_sums = Vec::with_capacity(n_max);
    let mut cum_nodes = Vec::with_capacity(n_max);
    let (mut acc, mut nacc) = (0.0, 0u64);
    for (v, c) in by_len.iter().zip(&nodes) {
        acc += v;
        nacc += c;
        partial_sums.push(acc);
        cum_nodes.push(nacc);
    }
    Ok(BoundEnumeration {
        partial_sums,
        nodes_visited: cum_nodes,
        complete: !budget_hit,
    })
}

/// `length,count` rows with a header.
pub fn write_histogram_csv<W: Write>(stats: &CycleStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["length", "count"])?;
    for (l, c) in stats.histogram() {
        w.write_record([l.to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// `n,partial_sum,nodes_visited` rows with a header.
pub fn write_bound_csv<W: Write>(bound: &BoundEnumeration, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["n", "partial_sum", "nodes_visited"])?;
    for (i, (s, v)) in bound
        .partial_sums
        .iter()
        .zip(&bound.nodes_visited)
        .enumerate()
    {
        w.write_record([(i + 1).to_string(), format!("{s:?}"), v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
