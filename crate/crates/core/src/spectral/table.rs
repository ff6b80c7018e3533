use std::sync::Arc;

use crate::alpha::Alpha;
use crate::error::{domain, Error, Result};

use super::htable::HTable;
use super::modes::ModeSet;

/// Coefficients `v[M]·e^{log_scale}` of a truncated power series in `t`.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Row {
    pub v: Vec<f64>,
    pub log_scale: f64,
}

impl Row {
    fn unit(len: usize) -> Self {
        let mut v = vec![0.0; len];
        v[0] = 1.0;
        Self { v, log_scale: 0.0 }
    }

    fn rescale(&mut self) -> Result<()> {
        let max = self.v.iter().fold(0.0f64, |a, &b| a.max(b));
        if !(max > 0.0 && max.is_finite()) {
            return Err(Error::Numerical(format!(
                "row maximum {max:e} after rescaling"
            )));
        }
        for x in &mut self.v {
            *x /= max;
        }
        self.log_scale += max.ln();
        Ok(())
    }

    pub fn ln_at(&self, m: usize) -> f64 {
        self.v[m].ln() + self.log_scale
    }
}

/// Multiplies a truncated series by the single-mode generating function
/// `Σ_n h_n (xt)^n = e^{−δx²t²}/(1 − xt)`.
pub(crate) fn apply_mode(row: &mut Row, x: f64, delta: f64, q: &mut Vec<f64>) -> Result<()> {
    let v = &mut row.v;
    if x > 0.0 {
        for m in 1..v.len() {
            v[m] += x * v[m - 1];
        }
        if delta > 0.0 {
            let c = delta * x * x;
            q.clear();
            q.push(1.0);
            let mut term = 1.0;
            for j in 1..v.len() {
                if 2 * j >= v.len() {
                    break;
                }
                term *= -c / j as f64;
                if term.abs() < 1e-18 {
                    break;
                }
                q.push(term);
            }
            for m in (2..v.len()).rev() {
                let mut s = v[m];
                for (j, qj) in q.iter().enumerate().skip(1) {
                    if 2 * j > m {
                        break;
                    }
                    s += qj * v[m - 2 * j];
                }
                v[m] = s;
            }
        }
    }
    row.rescale()
}

/// Suffix partition sums `S_i(M)` over levels `i..` of a mode set, for `0 ≤ M ≤ N`.
///
/// Per-mode weight `w_k(n) = e^{−ε(k) n} h_n(α)`. Modes of equal energy are grouped
/// into levels; `suffix[i]` covers levels `i..`, `suffix[levels]` is the empty product.
#[derive(Debug, Clone)]
pub struct PartitionTable {
    pub(crate) modes: Arc<ModeSet>,
    pub(crate) n: usize,
    pub(crate) alpha: Alpha,
    pub(crate) h: Vec<f64>,
    pub(crate) suffix: Vec<Row>,
    pub(crate) level_gf: Vec<Row>,
}

impl PartitionTable {
    pub fn build(modes: Arc<ModeSet>, n: usize, h: &HTable) -> Result<Self> {
        if h.nmax() < n.max(1) {
            return domain(format!("h table holds n ≤ {}, need {}", h.nmax(), n));
        }
        let len = n + 1;
        let delta = h.delta();
        let levels = modes.levels();
        let mut q = Vec::new();
        let mut suffix = vec![Row::unit(len); levels.len() + 1];
        let mut level_gf = Vec::with_capacity(levels.len());
        for (i, lv) in levels.iter().enumerate().rev() {
            let x = (-lv.energy).exp();
            let mut row = suffix[i + 1].clone();
            for _ in 0..lv.count {
                apply_mode(&mut row, x, delta, &mut q)?;
            }
            suffix[i] = row;
        }
        for lv in levels {
            let x = (-lv.energy).exp();
            let mut row = Row::unit(len);
            for _ in 0..lv.count {
                apply_mode(&mut row, x, delta, &mut q)?;
            }
            level_gf.push(row);
        }
        if !(suffix[0].v[n] > 0.0) {
            return Err(Error::Numerical(format!("S_0({n}) underflowed")));
        }
        Ok(Self {
            modes,
            n,
            alpha: h.alpha(),
            h: h.values()[..=n.max(1)].to_vec(),
            suffix,
            level_gf,
        })
    }

    pub fn mode_set(&self) -> &ModeSet {
        &self.modes
    }

    pub fn mode_set_arc(&self) -> Arc<ModeSet> {
        Arc::clone(&self.modes)
    }

    pub fn particles(&self) -> usize {
        self.n
    }

    pub fn alpha(&self) -> Alpha {
        self.alpha
    }

    /// `log Z′(Λ, N)`.
    pub fn log_z(&self) -> f64 {
        self.suffix[0].ln_at(self.n)
    }

    /// `log Z′(Λ, M)` for `M ≤ N`.
    pub fn log_z_at(&self, m: usize) -> f64 {
        self.suffix[0].ln_at(m)
    }

    /// `log S_i(M)` for level index `i`.
    pub fn log_suffix(&self, level: usize, m: usize) -> f64 {
        self.suffix[level].ln_at(m)
    }

    /// `B_l = Σ_k e^{−l ε(k)}` for `l = 0..=N`.
    pub fn cycle_weight_sums(&self) -> Vec<f64> {
        cycle_weight_sums(&self.modes, self.n)
    }

    /// Law of `n_k` for mode `index`: `P(n_k = j) ∝ w_k(j) Z′_{−k}(N − j)`.
    pub fn occupation_marginal(&self, index: usize) -> Result<Vec<f64>> {
        if index >= self.modes.len() {
            return Err(Error::Domain(format!(
                "mode index {index} out of range 0..{}",
                self.modes.len()
            )));
        }
        let levels = self.modes.levels();
        let li = self.modes.level_of(index);
        let delta = self.alpha.delta();
        let mut q = Vec::new();
        let mut rest = self.suffix[li + 1].clone();
        let lv = levels[li];
        for _ in 1..lv.count {
            apply_mode(&mut rest, (-lv.energy).exp(), delta, &mut q)?;
        }
        for other in levels[..li].iter().rev() {
            let x = (-other.energy).exp();
            for _ in 0..other.count {
                apply_mode(&mut rest, x, delta, &mut q)?;
            }
        }
        let n = self.n;
        let logs: Vec<f64> = (0..=n)
            .map(|j| {
                let r = rest.v[n - j];
                if r > 0.0 {
                    -lv.energy * j as f64 + self.h[j].ln() + r.ln()
                } else {
                    f64::NEG_INFINITY
                }
            })
            .collect();
        Ok(normalize_logs(&logs))
    }

    /// `E(ϱ_{m,n}) = (1/V) Σ_{l=m}^{n} B_l Z′(N−l)/Z′(N)`; α = 0 only.
    pub fn expected_cycle_density(&self, m: usize, n: usize) -> Result<f64> {
        if !self.alpha.is_zero() {
            return Err(Error::UnsupportedExact(format!(
                "cycle densities at alpha = {} need the Monte Carlo sampler",
                self.alpha
            )));
        }
        if m < 1 || m > n {
            return domain(format!("need 1 ≤ m ≤ n, got m = {m}, n = {n}"));
        }
        let upper = n.min(self.n);
        if m > upper {
            return Ok(0.0);
        }
        let b = self.cycle_weight_sums();
        let lz = self.log_z();
        let mut sum = 0.0;
        for (l, bl) in b.iter().enumerate().take(upper + 1).skip(m) {
            let r = self.suffix[0].v[self.n - l];
            if r > 0.0 {
                sum += bl * (self.log_z_at(self.n - l) - lz).exp();
            }
        }
        Ok(sum / self.modes.volume())
    }

    /// `E(e^{λ n₀/V})` from the exact law of `n₀`.
    pub fn mgf_n0(&self, lambda: f64) -> Result<f64> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return domain(format!("lambda must be nonnegative, got {lambda}"));
        }
        let p = self.occupation_marginal(0)?;
        let v = self.modes.volume();
        Ok(p.iter()
            .enumerate()
            .map(|(j, pj)| pj * (lambda * j as f64 / v).exp())
            .sum())
    }
}

/// `B_l = Σ_k e^{−l ε(k)}` for `l = 0..=n`.
pub fn cycle_weight_sums(modes: &ModeSet, n: usize) -> Vec<f64> {
    let mut b = vec![0.0; n + 1];
    for lv in modes.levels() {
        let x = (-lv.energy).exp();
        let mut p = 1.0;
        for bl in b.iter_mut() {
            *bl += lv.count as f64 * p;
            p *= x;
            if p == 0.0 {
                break;
            }
        }
    }
    b
}

/// Probabilities from unnormalized logs.
pub(crate) fn normalize_logs(logs: &[f64]) -> Vec<f64> {
    let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut p: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let s: f64 = p.iter().sum();
    for x in &mut p {
        *x /= s;
    }
    p
}

/// Finite-volume grand-canonical pressure `(1/V) Σ_k log Σ_n e^{(μ−ε(k))n} h_n(α)`,
/// with each inner series summed term by term.
pub fn grand_canonical_pressure(modes: &ModeSet, mu: f64, alpha: Alpha) -> Result<f64> {
    if !(mu < 0.0) {
        return domain(format!(
            "the chemical potential must be strictly negative, got {mu}"
        ));
    }
    let delta = alpha.delta();
    let mut total = 0.0;
    for lv in modes.levels() {
        let z = (mu - lv.energy).exp();
        // h_n via its closed form, summed alongside.
        let mut sum = 1.0;
        let mut zp = 1.0;
        let mut h = 1.0;
        let mut term_j = 1.0;
        for n in 1..1_000_000usize {
            zp *= z;
            if n % 2 == 0 {
                term_j *= -delta / (n / 2) as f64;
                h += term_j;
            }
            let t = zp * h;
            sum += t;
            if t < 1e-18 * sum {
                break;
            }
        }
        total += lv.count as f64 * sum.ln();
    }
    Ok(total / modes.volume())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy(energies: &[f64]) -> Arc<ModeSet> {
        Arc::new(ModeSet::from_energies(1.0, 1, energies).unwrap())
    }

    #[test]
    fn two_mode_examples() {
        let e = (-1.0f64).exp();
        let t0 = PartitionTable::build(toy(&[0.0, 1.0]), 2, &HTable::new(Alpha::ZERO, 2).unwrap())
            .unwrap();
        assert!((t0.log_z() - (1.0 + e + e * e).ln()).abs() < 1e-14);
        let p = t0.occupation_marginal(0).unwrap();
        assert!((p[2] - 1.0 / (1.0 + e + e * e)).abs() < 1e-14);
        let ti = PartitionTable::build(
            toy(&[0.0, 1.0]),
            2,
            &HTable::new(Alpha::INFINITY, 2).unwrap(),
        )
        .unwrap();
        assert!((ti.log_z() - (0.5 * (1.0 + e * e) + e).ln()).abs() < 1e-14);
        // (m, n) = (2, 2): P(n₀=2)/V + P(n₁=2)/V
        let p1 = t0.occupation_marginal(1).unwrap();
        assert!((t0.expected_cycle_density(2, 2).unwrap() - (p[2] + p1[2])).abs() < 1e-14);
        assert!(ti.expected_cycle_density(1, 2).is_err());
    }

    #[test]
    fn single_mode() {
        let t =
            PartitionTable::build(toy(&[0.0]), 3, &HTable::new(Alpha::ZERO, 3).unwrap()).unwrap();
        assert_eq!(t.log_z(), 0.0);
        assert_eq!(t.occupation_marginal(0).unwrap(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!((t.expected_cycle_density(2, 2).unwrap() - 1.0).abs() < 1e-15);
        assert!((t.mgf_n0(0.7).unwrap() - (0.7f64 * 3.0).exp()).abs() < 1e-12);
    }

    #[test]
    fn tail_probabilities_are_partition_ratios() {
        let t = PartitionTable::build(
            toy(&[0.0, 0.3, 0.3, 1.1, 2.0]),
            12,
            &HTable::new(Alpha::ZERO, 12).unwrap(),
        )
        .unwrap();
        for k in 0..5 {
            let p = t.occupation_marginal(k).unwrap();
            let eps = t.mode_set().modes()[k].energy;
            for j in 0..=12 {
                let tail: f64 = p[j..].iter().sum();
                let rel = (-eps * j as f64 + t.log_z_at(12 - j) - t.log_z()).exp();
                assert!((tail - rel).abs() < 1e-12, "k={k} j={j}");
            }
        }
        assert!((t.expected_cycle_density(1, 12).unwrap() - 12.0).abs() < 1e-12);
    }

    #[test]
    fn grand_canonical_matches_generating_function() {
        let modes = ModeSet::from_energies(2.0, 1, &[0.0, 0.4, 0.4, 1.5]).unwrap();
        for a in [0.0, 0.5, f64::INFINITY] {
            let alpha = Alpha::new(a).unwrap();
            let mu = -0.5;
            let got = grand_canonical_pressure(&modes, mu, alpha).unwrap();
            let want: f64 = modes
                .modes()
                .iter()
                .map(|m| {
                    let z = (mu - m.energy).exp();
                    -(-z).ln_1p() - alpha.delta() * z * z
                })
                .sum::<f64>()
                / 2.0;
            assert!((got - want).abs() < 1e-14);
        }
    }
}
