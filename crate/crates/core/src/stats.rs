//! Small statistics helpers: blocked errors, Wilson intervals, χ² tests.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Mean of a slice; `NaN` when empty.
pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Standard error of the mean from non-overlapping blocks of size `⌊√n⌋`.
pub fn blocked_standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return f64::NAN;
    }
    let b = (n as f64).sqrt().floor() as usize;
    let blocks = n / b;
    let means: Vec<f64> = (0..blocks).map(|i| mean(&xs[i * b..(i + 1) * b])).collect();
    let m = mean(&means);
    let var = means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (blocks - 1) as f64;
    (var / blocks as f64).sqrt()
}

/// Integrated autocorrelation time with Sokal's automatic window (`c = 6`).
pub fn integrated_autocorrelation_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 8 {
        return 1.0;
    }
    let m = mean(xs);
    let c0 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n as f64;
    if c0 <= 0.0 {
        return 1.0;
    }
    let mut tau = 1.0;
    for t in 1..n / 2 {
        let ct = xs[..n - t]
            .iter()
            .zip(&xs[t..])
            .map(|(a, b)| (a - m) * (b - m))
            .sum::<f64>()
            / n as f64;
        tau += 2.0 * ct / c0;
        if t as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(1.0)
}

/// Wilson score interval for `hits` successes in `n` trials.
pub fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = hits as f64 / nf;
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Pearson χ² statistic and upper-tail p-value.
///
/// Cells with expected count below `min_expected` are pooled into one cell.
pub fn chi_square_test(observed: &[f64], expected: &[f64], min_expected: f64) -> (f64, f64, usize) {
    let mut cells = Vec::new();
    let (mut po, mut pe) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        if e < min_expected {
            po += o;
            pe += e;
        } else {
            cells.push((o, e));
        }
    }
    if pe > 0.0 {
        cells.push((po, pe));
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e).powi(2) / e).sum();
    let dof = cells.len().saturating_sub(1);
    if dof == 0 {
        return (stat, 1.0, 0);
    }
    let p = 1.0 - ChiSquared::new(dof as f64).expect("positive dof").cdf(stat);
    (stat, p, dof)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson_interval(90, 100, 1.96);
        assert!(lo < 0.9 && hi > 0.9 && lo > 0.8 && hi < 0.96);
        assert_eq!(wilson_interval(10, 10, 1.96).1, 1.0);
    }

    #[test]
    fn chi_square_uniform() {
        let (stat, p, dof) = chi_square_test(&[25.0, 25.0, 25.0, 25.0], &[25.0; 4], 5.0);
        assert_eq!((stat, dof), (0.0, 3));
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p, _) = chi_square_test(&[50.0, 0.0, 25.0, 25.0], &[25.0; 4], 5.0);
        assert!(p < 1e-6);
    }

    #[test]
    fn blocked_error_of_iid_constant() {
        assert_eq!(blocked_standard_error(&[1.0; 100]), 0.0);
        assert!(integrated_autocorrelation_time(&[1.0; 100]) >= 1.0);
    }
}
