//! One-dimensional quadrature: adaptive Gauss–Kronrod (7/15) on finite and
//! semi-infinite intervals, composite Simpson on uniform samples.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Value and error estimate of a quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

/// Tolerances and subdivision budget for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            abs_tol: 1e-15,
            rel_tol: 1e-12,
            max_intervals: 4000,
        }
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Estimate {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        }
    }
    let value = kron * h;
    let raw = ((kron - gauss) * h).abs();
    Estimate {
        value,
        error: raw.max(value.abs() * f64::EPSILON * 50.0),
    }
}

struct Piece {
    a: f64,
    b: f64,
    est: Estimate,
}

impl PartialEq for Piece {
    fn eq(&self, other: &Self) -> bool {
        self.est.error == other.est.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Piece {
    fn cmp(&self, other: &Self) -> Ordering {
        self.est.error.total_cmp(&other.est.error)
    }
}

/// Globally adaptive Gauss–Kronrod integration of `f` over `[a, b]`.
///
/// Stops when the summed error estimate meets `max(abs_tol, rel_tol·|I|)` or
/// the interval budget is spent; the returned error is honest in both cases.
pub fn integrate<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, opts: QuadOptions) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            error: 0.0,
        };
    }
    let first = gk15(&mut f, a, b);
    let mut total = first;
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, est: first });
    let mut pieces = 1;
    while total.error > opts.abs_tol.max(opts.rel_tol * total.value.abs())
        && pieces < opts.max_intervals
    {
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            heap.push(worst);
            break;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        total.value += left.value + right.value - worst.est.value;
        total.error += left.error + right.error - worst.est.error;
        heap.push(Piece {
            a: worst.a,
            b: mid,
            est: left,
        });
        heap.push(Piece {
            a: mid,
            b: worst.b,
            est: right,
        });
        pieces += 1;
    }
    // Resum to shed accumulated cancellation in the running totals.
    let mut value = 0.0;
    let mut error = 0.0;
    for p in heap {
        value += p.est.value;
        error += p.est.error;
    }
    Estimate { value, error }
}

/// Integral of `f` over `[a, ∞)` through the map `x = a + t/(1−t)`.
pub fn integrate_to_infinity<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    opts: QuadOptions,
) -> Estimate {
    integrate(
        |t| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            let x = a + t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

/// Composite Simpson rule on uniformly spaced samples; `values.len()` must be odd and ≥ 3.
pub fn simpson(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    debug_assert!(n >= 3 && n % 2 == 1);
    let mut odd = 0.0;
    let mut even = 0.0;
    for (i, v) in values.iter().enumerate().take(n - 1).skip(1) {
        if i % 2 == 1 {
            odd += v;
        } else {
            even += v;
        }
    }
    h / 3.0 * (values[0] + values[n - 1] + 4.0 * odd + 2.0 * even)
}

/// Surface area of the unit sphere in ℝ^d.
pub fn sphere_area(dim: usize) -> f64 {
    match dim {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => {
            let d = dim as f64;
            2.0 * std::f64::consts::PI.powf(d / 2.0) / statrs::function::gamma::gamma(d / 2.0)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let e = integrate(|x| x * x * x - 2.0 * x, 0.0, 2.0, QuadOptions::default());
        assert!((e.value - 0.0).abs() < 1e-14);
    }

    #[test]
    fn gaussian_half_line() {
        let e = integrate_to_infinity(|x| (-x * x).exp(), 0.0, QuadOptions::default());
        assert!((e.value - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12);
        assert!(e.error < 1e-10);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let e = integrate(|x| 1.0 / x.sqrt(), 0.0, 1.0, QuadOptions::default());
        assert!((e.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn simpson_cubic_exact() {
        let h = 0.25;
        let v: Vec<f64> = (0..9).map(|i| (i as f64 * h).powi(3)).collect();
        assert!((simpson(&v, h) - 4.0).abs() < 1e-13);
    }
}
