//! Riemann zeta, polylogarithm of e^μ, Bessel J0.

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

// B_2, B_4, ..., B_20.
const BERNOULLI_EVEN: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

/// Riemann zeta function for real `s ≠ 1`.
///
/// Euler–Maclaurin summation for `s > 0`, the functional equation for `s < 0`.
pub fn zeta(s: f64) -> f64 {
    if s == 1.0 {
        return f64::INFINITY;
    }
    if s == 0.0 {
        return -0.5;
    }
    if s < 0.0 {
        if s.fract() == 0.0 && (s as i64) % 2 == 0 {
            return 0.0;
        }
        let t = 1.0 - s;
        return 2f64.powf(s) * PI.powf(s - 1.0) * (PI * s / 2.0).sin() * gamma(t) * zeta(t);
    }
    if s > 60.0 {
        return 1.0 + 2f64.powf(-s) + 3f64.powf(-s);
    }
    const N: usize = 24;
    let n = N as f64;
    let mut sum = 0.0;
    for j in (1..N).rev() {
        sum += (j as f64).powf(-s);
    }
    sum += n.powf(1.0 - s) / (s - 1.0) + 0.5 * n.powf(-s);
    // Rising factorial s(s+1)...(s+2k-2) / (2k)! · N^{-s-2k+1}.
    let mut coeff = s / 2.0 * n.powf(-s - 1.0);
    for (k, b) in BERNOULLI_EVEN.iter().enumerate() {
        let kk = (k + 1) as f64;
        if k > 0 {
            coeff *= (s + 2.0 * kk - 3.0) * (s + 2.0 * kk - 2.0)
                / ((2.0 * kk - 1.0) * (2.0 * kk) * n * n);
        }
        sum += b * coeff;
    }
    sum
}

/// `Li_s(e^μ)` for `s > 0` and `μ ≤ 0` (`μ = 0` requires `s > 1`), with a truncation-error estimate.
///
/// Direct series for `μ < −1`; the expansion about `μ = 0` otherwise.
pub fn polylog_exp(s: f64, mu: f64) -> (f64, f64) {
    debug_assert!(s > 0.0 && mu <= 0.0);
    if mu == 0.0 {
        return (zeta(s), 0.0);
    }
    if s == 1.0 {
        return (-(-mu.exp()).ln_1p(), f64::EPSILON);
    }
    if mu < -1.0 {
        let x = mu.exp();
        let mut sum = 0.0;
        let mut xp = 1.0;
        let mut last = 0.0;
        for j in 1..10_000 {
            xp *= x;
            let term = xp * (j as f64).powf(-s);
            sum += term;
            last = term;
            if term < 1e-17 * sum {
                break;
            }
        }
        return (sum, last + sum * 4.0 * f64::EPSILON);
    }
    let is_int = s.fract() == 0.0;
    let mut sum = if is_int {
        let n = s as usize;
        let mut harmonic = 0.0;
        for j in 1..n {
            harmonic += 1.0 / j as f64;
        }
        let mut fact = 1.0;
        for j in 1..n {
            fact *= j as f64;
        }
        mu.powi(n as i32 - 1) / fact * (harmonic - (-mu).ln())
    } else {
        gamma(1.0 - s) * (-mu).powf(s - 1.0)
    };
    let mut pow = 1.0;
    let mut last = 0.0;
    let mut small_run = 0;
    for k in 0..120 {
        if k > 0 {
            pow *= mu / k as f64;
        }
        let arg = s - k as f64;
        if is_int && arg == 1.0 {
            continue;
        }
        let term = zeta(arg) * pow;
        sum += term;
        last = term.abs();
        // Trivial zeros make every other term vanish.
        if last < 1e-17 * sum.abs() {
            small_run += 1;
            if small_run >= 2 && k > 4 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    (sum, last + sum.abs() * 16.0 * f64::EPSILON)
}

/// Bessel function of the first kind, order 0.
///
/// Periodic trapezoid rule on `(1/π)∫₀^π cos(x sin θ) dθ` for `|x| ≤ 25`,
/// Hankel asymptotics beyond.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if x <= 25.0 {
        const M: usize = 64;
        let mut sum = 0.0;
        for m in 0..M {
            sum += (x * (PI * m as f64 / M as f64).sin()).cos();
        }
        return sum / M as f64;
    }
    // a_k = ((1)(9)...((2k-1)^2)) / (k! 8^k)
    let mut p = 0.0;
    let mut q = 0.0;
    let mut a = 1.0;
    let mut xp = 1.0;
    for k in 0..16 {
        if k > 0 {
            let kk = k as f64;
            a *= (2.0 * kk - 1.0).powi(2) / (kk * 8.0);
            xp *= x;
        }
        let term = a / xp;
        match k % 4 {
            0 => p += term,
            1 => q -= term,
            2 => p -= term,
            _ => q += term,
        }
    }
    let phase = x - PI / 4.0;
    (2.0 / (PI * x)).sqrt() * (p * phase.cos() - q * phase.sin())
}
