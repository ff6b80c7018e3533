//! Brute-force reference computations for small instances.
//!
//! Nothing here reuses the fast paths: permutations are enumerated
//! explicitly, occupation vectors are listed one by one and periodic
//! images are summed directly.

use crate::alpha::Alpha;
use crate::cycles::cycle_lengths;
use crate::error::{domain, Result};
use crate::mcmc::BoxGeometry;
use crate::model::DispersionModel;

/// Calls `f` on every permutation of `0..n` (Heap's algorithm).
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    let mut c = vec![0usize; n];
    f(&p);
    let mut i = 1;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                p.swap(0, i);
            } else {
                p.swap(c[i], i);
            }
            f(&p);
            c[i] += 1;
            i = 1;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn two_cycles(perm: &[usize]) -> usize {
    (0..perm.len())
        .filter(|&i| perm[i] > i && perm[perm[i]] == i)
        .count()
}

/// `(1/n!) Σ_{π∈S_n} e^{−α N₂(π)}` by enumeration.
pub fn brute_h(n: usize, alpha: Alpha) -> f64 {
    let mut sum = 0.0;
    for_each_permutation(n, |p| sum += (-alpha.penalty(two_cycles(p))).exp());
    sum / factorial(n)
}

/// All `(n_k)` with `Σ n_k = n` over `modes` slots, in lexicographic order.
pub fn occupation_vectors(modes: usize, n: usize) -> Vec<Vec<usize>> {
    fn rec(slot: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if slot + 1 == cur.len() {
            cur[slot] = left;
            out.push(cur.clone());
            return;
        }
        for j in 0..=left {
            cur[slot] = j;
            rec(slot + 1, left - j, cur, out);
        }
    }
    let mut out = Vec::new();
    if modes == 0 {
        return out;
    }
    rec(0, n, &mut vec![0; modes], &mut out);
    out
}

/// `Π_k e^{−ε_k n_k} h_{n_k}` for every occupation vector.
pub fn occupation_weights(energies: &[f64], n: usize, alpha: Alpha) -> Vec<(Vec<usize>, f64)> {
    let h: Vec<f64> = (0..=n).map(|j| brute_h(j, alpha)).collect();
    occupation_vectors(energies.len(), n)
        .into_iter()
        .map(|occ| {
            let w = occ
                .iter()
                .zip(energies)
                .map(|(&j, &e)| (-e * j as f64).exp() * h[j])
                .product();
            (occ, w)
        })
        .collect()
}

pub fn brute_partition(energies: &[f64], n: usize, alpha: Alpha) -> f64 {
    occupation_weights(energies, n, alpha)
        .iter()
        .map(|(_, w)| w)
        .sum()
}

/// `P(n_index = j)` for `j = 0..=n`.
pub fn brute_marginal(energies: &[f64], n: usize, alpha: Alpha, index: usize) -> Vec<f64> {
    let ws = occupation_weights(energies, n, alpha);
    let z: f64 = ws.iter().map(|(_, w)| w).sum();
    let mut p = vec![0.0; n + 1];
    for (occ, w) in &ws {
        p[occ[index]] += w / z;
    }
    p
}

/// `E(ϱ_{m,n})` at `α = 0` from `Σ_{π∈S_N} Π_cycles B_ℓ`, `B_ℓ = Σ_k e^{−ℓε_k}`.
pub fn brute_cycle_density(
    energies: &[f64],
    particles: usize,
    m: usize,
    n: usize,
    volume: f64,
) -> f64 {
    let b: Vec<f64> = (0..=particles)
        .map(|l| energies.iter().map(|e| (-(l as f64) * e).exp()).sum())
        .collect();
    let mut z = 0.0;
    let mut acc = 0.0;
    for_each_permutation(particles, |p| {
        let lengths = cycle_lengths(p).expect("valid permutation");
        let w: f64 = lengths.iter().map(|&l| b[l]).product();
        let inside: usize = lengths.iter().filter(|&&l| l >= m && l <= n).sum();
        z += w;
        acc += w * inside as f64;
    });
    acc / z / volume
}

/// `log Z_N` for `N = 0..=n_max` from `Z_N = (1/N) Σ_{l=1}^{N} B_l Z_{N−l}`, in log-sum-exp form.
pub fn cycle_sum_log_z(b: &[f64], n_max: usize) -> Result<Vec<f64>> {
    if b.len() <= n_max {
        return domain(format!("need B_l for l ≤ {n_max}"));
    }
    let lb: Vec<f64> = b.iter().map(|x| x.ln()).collect();
    let mut lz = vec![0.0; n_max + 1];
    let mut terms = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        terms.clear();
        terms.extend((1..=n).map(|l| lb[l] + lz[n - l]));
        let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let s: f64 = terms.iter().map(|t| (t - max).exp()).sum();
        lz[n] = max + s.ln() - (n as f64).ln();
    }
    Ok(lz)
}

/// `ξ_Λ(x)` by summing `e^{−ξ(x − Ly)}` over `|y|_∞ ≤ shells`.
pub fn brute_periodized_xi(model: &DispersionModel, x: &[f64], l: f64, shells: i64) -> f64 {
    let d = x.len();
    let mut sum = 0.0;
    let side = 2 * shells + 1;
    let total = side.pow(d as u32);
    for idx in 0..total {
        let mut rest = idx;
        let mut r2 = 0.0;
        for &xc in x {
            let y = rest % side - shells;
            rest /= side;
            let v = xc - l * y as f64;
            r2 += v * v;
        }
        sum += model.jump_weight(r2.sqrt());
    }
    -sum.ln()
}

/// Exact law `e^{−H(x,π)}/Z` over `S_N` for fixed points, in Heap's enumeration order.
pub fn boltzmann_sn(
    points: &[f64],
    geometry: &BoxGeometry,
    model: &DispersionModel,
    alpha: Alpha,
    pair_a: f64,
) -> Vec<(Vec<usize>, f64)> {
    let d = geometry.dim;
    let n = points.len() / d;
    let pt = |i: usize| &points[i * d..(i + 1) * d];
    let mut jump = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            let x: Vec<f64> = (0..d).map(|c| pt(j)[c] - pt(i)[c]).collect();
            jump[i * n + j] = brute_periodized_xi(model, &x, geometry.side, 6);
        }
    }
    let mut out = Vec::new();
    for_each_permutation(n, |p| {
        let mut h: f64 = (0..n).map(|i| jump[i * n + p[i]]).sum();
        let n2 = two_cycles(p);
        h += alpha.penalty(n2);
        if pair_a > 0.0 {
            for i in 0..n {
                if p[i] > i && p[p[i]] == i {
                    let r = geometry.min_image_distance(pt(i), pt(p[i]));
                    h += 2.0 * pair_a / r;
                }
            }
        }
        out.push((p.to_vec(), h));
    });
    let min = out.iter().map(|(_, h)| *h).fold(f64::INFINITY, f64::min);
    let mut z = 0.0;
    for (_, h) in out.iter_mut() {
        *h = (min - *h).exp();
        z += *h;
    }
    for (_, w) in out.iter_mut() {
        *w /= z;
    }
    out
}
