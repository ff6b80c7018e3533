//! One-body jump weights `e^{−ξ}`, their periodizations, dispersions `ε(k)` and
//! normalizations `C = ∫ e^{−ξ}`.
//!
//! Conventions: `C e^{−ε(k)} = ∫ e^{−2πi k·x} e^{−ξ(x)} dx`, so `ε(0) = 0`.
//! Radially symmetric weights only; `ε` depends on `|k|`.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{domain, Error, Result};
use crate::quad::{self, Estimate, QuadOptions};
use crate::special::bessel_j0;

/// Catalog of jump weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    /// `e^{−|x|²/4β}`, any `d ∈ {1,2,3}`.
    Gaussian,
    /// `e^{−|x|/β}` in `d = 3`.
    Exponential3d,
    /// `(1 + |x|/β)^{−3/2}` in `d = 1`.
    PowerLaw1d,
    /// Radial samples `(r_i, g(r_i))`, linearly interpolated, zero beyond the last sample.
    TabulatedRadial,
}

/// Config-file form of a model; missing fields take the Gaussian `β = 1`, `d = 3` defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub beta: f64,
    pub dim: usize,
    /// Two-column CSV `r, g` for the tabulated kind.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<std::path::PathBuf>,
    /// Simpson grid size for tabulated transforms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_points: Option<usize>,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            kind: ModelKind::Gaussian,
            beta: 1.0,
            dim: 3,
            table: None,
            grid_points: None,
        }
    }
}

/// Validated radial samples of `g(r) = e^{−ξ(r)}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialTable {
    r: Vec<f64>,
    g: Vec<f64>,
}

impl RadialTable {
    /// Requires ≥ 3 samples, strictly increasing `r ≥ 0`, and `g` finite, nonnegative, non-increasing.
    pub fn new(r: Vec<f64>, g: Vec<f64>) -> Result<Self> {
        if r.len() != g.len() {
            return Err(Error::InvalidInput("table columns differ in length".into()));
        }
        if r.len() < 3 {
            return Err(Error::InvalidInput("table needs at least 3 samples".into()));
        }
        if r[0] < 0.0 || r.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(
                "radii must be finite and nonnegative".into(),
            ));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidInput(
                "radii must be strictly increasing".into(),
            ));
        }
        if g.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::InvalidInput(
                "table has a negative or non-finite weight".into(),
            ));
        }
        if g.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidInput(
                "table weights must be non-increasing in r".into(),
            ));
        }
        if g[0] <= 0.0 {
            return Err(Error::InvalidInput(
                "table weight vanishes at the origin".into(),
            ));
        }
        Ok(Self { r, g })
    }

    /// Reads a headerless or headed two-column CSV `r, g`.
    pub fn from_csv(path: &Path) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut r = Vec::new();
        let mut g = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec?;
            if rec.len() != 2 {
                return Err(Error::InvalidInput(format!(
                    "{}: row {} has {} columns, expected 2",
                    path.display(),
                    line + 1,
                    rec.len()
                )));
            }
            let (a, b) = (rec[0].parse::<f64>(), rec[1].parse::<f64>());
            match (a, b) {
                (Ok(a), Ok(b)) => {
                    r.push(a);
                    g.push(b);
                }
                _ if line == 0 => continue,
                _ => {
                    return Err(Error::InvalidInput(format!(
                        "{}: row {} is not numeric",
                        path.display(),
                        line + 1
                    )))
                }
            }
        }
        Self::new(r, g)
    }

    pub fn radii(&self) -> &[f64] {
        &self.r
    }

    pub fn weights(&self) -> &[f64] {
        &self.g
    }

    pub fn r_max(&self) -> f64 {
        *self.r.last().expect("validated non-empty")
    }

    /// Linear interpolation; constant below the first sample, zero beyond the last.
    pub fn eval(&self, r: f64) -> f64 {
        if r <= self.r[0] {
            return self.g[0];
        }
        if r > self.r_max() {
            return 0.0;
        }
        let i = self.r.partition_point(|&x| x < r).max(1);
        let (r0, r1) = (self.r[i - 1], self.r[i]);
        let t = (r - r0) / (r1 - r0);
        self.g[i - 1] + t * (self.g[i] - self.g[i - 1])
    }
}

/// Radial Fourier transform of a profile sampled on a uniform Simpson grid.
#[derive(Debug, Clone)]
struct RadialTransform {
    dim: usize,
    r: Vec<f64>,
    // Simpson weight × surface factor × g(r).
    w: Vec<f64>,
}

impl RadialTransform {
    fn new(dim: usize, r_max: f64, points: usize, g: impl Fn(f64) -> f64) -> Self {
        let n = if points % 2 == 0 { points + 1 } else { points }.max(3);
        let h = r_max / (n - 1) as f64;
        let mut r = Vec::with_capacity(n);
        let mut w = Vec::with_capacity(n);
        for i in 0..n {
            let ri = i as f64 * h;
            let simpson = if i == 0 || i == n - 1 {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            } * h
                / 3.0;
            let surface = match dim {
                1 => 2.0,
                2 => 2.0 * PI * ri,
                _ => 4.0 * PI * ri * ri,
            };
            r.push(ri);
            w.push(simpson * surface * g(ri));
        }
        Self { dim, r, w }
    }

    fn eval(&self, k: f64) -> f64 {
        let omega = 2.0 * PI * k;
        let mut acc = 0.0;
        for (ri, wi) in self.r.iter().zip(&self.w) {
            let z = omega * ri;
            let kernel = match self.dim {
                1 => z.cos(),
                2 => bessel_j0(z),
                _ => {
                    if z.abs() < 1e-8 {
                        1.0 - z * z / 6.0
                    } else {
                        z.sin() / z
                    }
                }
            };
            acc += wi * kernel;
        }
        acc
    }
}

/// `ε` of the power law on a grid uniform in `u = √(β|k|)`.
#[derive(Debug, Clone)]
struct PowerLawCache {
    du: f64,
    values: Vec<f64>,
}

const POWER_LAW_CACHE_POINTS: usize = 16_385;
const POWER_LAW_CACHE_UMAX: f64 = 8.0;

impl PowerLawCache {
    fn build() -> Self {
        let du = POWER_LAW_CACHE_UMAX / (POWER_LAW_CACHE_POINTS - 1) as f64;
        let values = (0..POWER_LAW_CACHE_POINTS)
            .map(|i| {
                let u = i as f64 * du;
                power_law_epsilon_direct(u * u)
            })
            .collect();
        Self { du, values }
    }

    fn eval(&self, kb: f64) -> f64 {
        let u = kb.sqrt();
        let x = u / self.du;
        let i = x.floor() as usize;
        if i + 1 >= self.values.len() {
            return power_law_epsilon_direct(kb);
        }
        let t = x - i as f64;
        self.values[i] * (1.0 - t) + self.values[i + 1] * t
    }
}

/// `ε` of `(1+|x|)^{−3/2}` in d=1 at `|k|`, by a positive non-oscillatory integral.
///
/// With `ω = 2π|k|`: `e^{−ε} = (2/√π)∫₀^∞ t⁴e^{−t²}/(t⁴+ω²) dt = 1 − (2/√π)∫₀^∞ ω²e^{−t²}/(t⁴+ω²) dt`.
pub(crate) fn power_law_epsilon_direct(k: f64) -> f64 {
    if k == 0.0 {
        return 0.0;
    }
    let w = 2.0 * PI * k;
    let w2 = w * w;
    let norm = 2.0 / PI.sqrt();
    let opts = QuadOptions {
        abs_tol: 0.0,
        rel_tol: 1e-13,
        max_intervals: 400,
    };
    let split = w.sqrt().max(1e-3);
    let part = |f: &dyn Fn(f64) -> f64| {
        quad::integrate(f, 0.0, split, opts).value
            + quad::integrate_to_infinity(f, split, opts).value
    };
    if w < 1.0 {
        let d = norm * part(&|t: f64| w2 * (-t * t).exp() / (t.powi(4) + w2));
        -(-d).ln_1p()
    } else {
        let i = norm
            * part(&|t: f64| {
                let t4 = t.powi(4);
                t4 * (-t * t).exp() / (t4 + w2)
            });
        -i.ln()
    }
}

/// A one-body jump weight with its dispersion and normalization.
///
/// Immutable after construction; caches are filled eagerly.
#[derive(Debug, Clone)]
pub struct DispersionModel {
    kind: ModelKind,
    beta: f64,
    dim: usize,
    norm: f64,
    table: Option<RadialTable>,
    transform: Option<RadialTransform>,
    power_law: Option<PowerLawCache>,
}

/// Default Simpson grid size for tabulated transforms.
pub const DEFAULT_TABLE_GRID: usize = 4001;

impl DispersionModel {
    /// Builds a catalog model. The tabulated kind needs `table`.
    pub fn new(kind: ModelKind, beta: f64, dim: usize, table: Option<RadialTable>) -> Result<Self> {
        Self::with_grid(kind, beta, dim, table, DEFAULT_TABLE_GRID)
    }

    pub fn gaussian(beta: f64, dim: usize) -> Result<Self> {
        Self::new(ModelKind::Gaussian, beta, dim, None)
    }

    pub fn with_grid(
        kind: ModelKind,
        beta: f64,
        dim: usize,
        table: Option<RadialTable>,
        grid_points: usize,
    ) -> Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return domain(format!("beta must be positive and finite, got {beta}"));
        }
        if !(1..=3).contains(&dim) {
            return Err(Error::UnsupportedModel(format!(
                "dimension {dim} (only 1, 2, 3)"
            )));
        }
        let mut model = Self {
            kind,
            beta,
            dim,
            norm: 0.0,
            table: None,
            transform: None,
            power_law: None,
        };
        match kind {
            ModelKind::Gaussian => {
                model.norm = (4.0 * PI * beta).powf(dim as f64 / 2.0);
            }
            ModelKind::Exponential3d => {
                if dim != 3 {
                    return Err(Error::UnsupportedModel(format!(
                        "exponential3d requires d = 3, got {dim}"
                    )));
                }
                model.norm = 8.0 * PI * beta.powi(3);
            }
            ModelKind::PowerLaw1d => {
                if dim != 1 {
                    return Err(Error::UnsupportedModel(format!(
                        "power_law1d requires d = 1, got {dim}"
                    )));
                }
                model.norm = 4.0 * beta;
                model.power_law = Some(PowerLawCache::build());
            }
            ModelKind::TabulatedRadial => {
                let t = table
                    .ok_or_else(|| Error::InvalidInput("tabulated_radial needs a table".into()))?;
                if grid_points < 3 {
                    return Err(Error::InvalidInput("grid needs at least 3 points".into()));
                }
                let tr = RadialTransform::new(dim, t.r_max(), grid_points, |r| t.eval(r));
                model.norm = tr.eval(0.0);
                if !(model.norm > 0.0) {
                    return Err(Error::InvalidInput(
                        "tabulated weight has zero integral".into(),
                    ));
                }
                model.table = Some(t);
                model.transform = Some(tr);
            }
        }
        Ok(model)
    }

    /// Builds from the config form; relative table paths resolve against `base`.
    pub fn from_spec(spec: &ModelSpec, base: Option<&Path>) -> Result<Self> {
        let table = match (&spec.table, spec.kind) {
            (Some(p), ModelKind::TabulatedRadial) => {
                let path = match base {
                    Some(b) if p.is_relative() => b.join(p),
                    _ => p.clone(),
                };
                Some(RadialTable::from_csv(&path)?)
            }
            (Some(_), _) => {
                return Err(Error::InvalidInput(
                    "table given for a closed-form kind".into(),
                ))
            }
            (None, _) => None,
        };
        Self::with_grid(
            spec.kind,
            spec.beta,
            spec.dim,
            table,
            spec.grid_points.unwrap_or(DEFAULT_TABLE_GRID),
        )
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn table(&self) -> Option<&RadialTable> {
        self.table.as_ref()
    }

    /// `C = ∫ e^{−ξ(x)} dx`.
    pub fn normalization(&self) -> f64 {
        self.norm
    }

    /// Stable SHA-256 of kind, β, d and table contents (hex).
    pub fn hash(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("{:?}|{:e}|{}", self.kind, self.beta, self.dim).as_bytes());
        if let Some(t) = &self.table {
            for (r, g) in t.r.iter().zip(&t.g) {
                h.update(r.to_le_bytes());
                h.update(g.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }

    /// `ξ(r)` at distance `r ≥ 0`; `+∞` where the weight vanishes.
    pub fn xi(&self, r: f64) -> f64 {
        let b = self.beta;
        match self.kind {
            ModelKind::Gaussian => r * r / (4.0 * b),
            ModelKind::Exponential3d => r / b,
            ModelKind::PowerLaw1d => 1.5 * (r / b).ln_1p(),
            ModelKind::TabulatedRadial => {
                let g = self.table.as_ref().expect("tabulated").eval(r);
                -g.ln()
            }
        }
    }

    /// `e^{−ξ(r)}`.
    pub fn jump_weight(&self, r: f64) -> f64 {
        match self.kind {
            ModelKind::TabulatedRadial => self.table.as_ref().expect("tabulated").eval(r),
            _ => (-self.xi(r)).exp(),
        }
    }

    /// `ε(k)` for a `d`-vector `k`.
    pub fn epsilon(&self, k: &[f64]) -> Result<f64> {
        if k.len() != self.dim {
            return domain(format!(
                "wave vector has {} components, model has d = {}",
                k.len(),
                self.dim
            ));
        }
        self.epsilon_radial(k.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `ε` at `|k|`. Errors if the transform is not positive there.
    pub fn epsilon_radial(&self, k: f64) -> Result<f64> {
        let k = k.abs();
        if k == 0.0 {
            return Ok(0.0);
        }
        let b = self.beta;
        Ok(match self.kind {
            ModelKind::Gaussian => 4.0 * PI * PI * b * k * k,
            ModelKind::Exponential3d => 2.0 * (2.0 * PI * b * k).powi(2).ln_1p(),
            ModelKind::PowerLaw1d => self.power_law.as_ref().expect("cache built").eval(b * k),
            ModelKind::TabulatedRadial => {
                let f = self.transform.as_ref().expect("tabulated").eval(k);
                if !(f > 0.0) {
                    return Err(Error::Positivity { k, value: f });
                }
                -(f / self.norm).ln()
            }
        })
    }

    /// `e^{−ε(|k|)}`, zero where the transform is not positive.
    pub fn fourier_weight(&self, k: f64) -> f64 {
        self.epsilon_radial(k).map(|e| (-e).exp()).unwrap_or(0.0)
    }

    /// `∫_{ℝ^d} f(ε(|k|)) dk` by radial quadrature.
    ///
    /// `f` must vanish fast enough as `ε → ∞` for the integral to converge.
    pub fn dispersion_integral(&self, f: impl Fn(f64) -> f64) -> Estimate {
        let d = self.dim;
        let area = quad::sphere_area(d);
        let eps = |k: f64| self.epsilon_radial(k).unwrap_or(f64::INFINITY);
        let integrand = |k: f64| {
            let v = f(eps(k));
            if v == 0.0 {
                0.0
            } else {
                k.powi(d as i32 - 1) * v
            }
        };
        // Scale where ε ≈ 1 separates the bulk from the tail.
        let scale = self.k_scale();
        let opts = QuadOptions {
            abs_tol: 0.0,
            rel_tol: 1e-12,
            max_intervals: 2000,
        };
        let a = quad::integrate(&integrand, 0.0, scale, opts);
        let b = quad::integrate(&integrand, scale, 8.0 * scale, opts);
        let c = quad::integrate_to_infinity(&integrand, 8.0 * scale, opts);
        Estimate {
            value: area * (a.value + b.value + c.value),
            error: area * (a.error + b.error + c.error),
        }
    }

    /// Wave number at which `ε` is of order one.
    pub fn k_scale(&self) -> f64 {
        match self.kind {
            ModelKind::Gaussian => 1.0 / (2.0 * PI * self.beta.sqrt()),
            _ => 1.0 / (2.0 * PI * self.length_scale()),
        }
    }

    /// Typical jump length.
    pub fn length_scale(&self) -> f64 {
        match self.kind {
            ModelKind::Gaussian => 2.0 * self.beta.sqrt(),
            ModelKind::TabulatedRadial => {
                let t = self.table.as_ref().expect("tabulated");
                // Radius where g drops to half its origin value.
                let half = 0.5 * t.g[0];
                t.r.iter()
                    .zip(&t.g)
                    .find(|(_, g)| **g <= half)
                    .map(|(r, _)| *r)
                    .unwrap_or(t.r_max())
                    .max(1e-12)
            }
            _ => self.beta,
        }
    }

    /// `e^{−ξ_Λ(x)} = Σ_{y∈ℤ^d} e^{−ξ(x − Ly)}`.
    pub fn xi_periodized_weight(&self, x: &[f64], l: f64) -> Result<f64> {
        Ok((-self.xi_periodized(x, l)?).exp())
    }

    /// `ξ_Λ(x)`, evaluated in log form so far images never underflow the nearest one.
    pub fn xi_periodized(&self, x: &[f64], l: f64) -> Result<f64> {
        if x.len() != self.dim {
            return domain(format!(
                "point has {} components, model has d = {}",
                x.len(),
                self.dim
            ));
        }
        if !(l > 0.0 && l.is_finite()) {
            return domain(format!("box side must be positive, got {l}"));
        }
        let mut u = [0.0; 3];
        for (c, xi) in x.iter().enumerate() {
            u[c] = xi - l * (xi / l).round();
        }
        let u = &u[..self.dim];
        match self.kind {
            ModelKind::Gaussian => Ok(self.gaussian_periodized(u, l)),
            ModelKind::PowerLaw1d => Ok(self.power_law_periodized(u[0], l)),
            _ => self.shell_periodized(u, l),
        }
    }

    fn gaussian_periodized(&self, u: &[f64], l: f64) -> f64 {
        let inv = 1.0 / (4.0 * self.beta);
        let mut total = 0.0;
        for &uc in u {
            // Images relative to the nearest: exp((u² − (u − Ly)²)/4β).
            let mut rel = 0.0;
            for y in 1.. {
                let yf = y as f64;
                let plus = ((2.0 * uc * l * yf - l * l * yf * yf) * inv).exp();
                let minus = ((-2.0 * uc * l * yf - l * l * yf * yf) * inv).exp();
                let shell = plus + minus;
                rel += shell;
                if shell < 1e-14 * (1.0 + rel) || y > 10_000 {
                    break;
                }
            }
            total += uc * uc * inv - rel.ln_1p();
        }
        total
    }

    fn power_law_periodized(&self, u: f64, l: f64) -> f64 {
        let b = self.beta;
        let g = |r: f64| (1.0 + r / b).powf(-1.5);
        const S: i64 = 64;
        let mut sum = g(u.abs());
        for y in 1..=S {
            let yf = y as f64 * l;
            sum += g((u - yf).abs()) + g((u + yf).abs());
        }
        // Euler–Maclaurin tail Σ_{y>S} (A + B y)^{−3/2} on each side.
        let bb = l / b;
        let tail = |a: f64| {
            let s = S as f64;
            let z = a + bb * s;
            let f0 = z.powf(-1.5);
            let integral = 2.0 / bb * z.powf(-0.5);
            // F^{(m)}(S) = (−3/2)(−5/2)…(−3/2−m+1) B^m z^{−3/2−m}
            let deriv = |m: i32| {
                let mut c = 1.0;
                for j in 0..m {
                    c *= -1.5 - j as f64;
                }
                c * bb.powi(m) * z.powf(-1.5 - m as f64)
            };
            const B2: f64 = 1.0 / 6.0;
            const B4: f64 = -1.0 / 30.0;
            const B6: f64 = 1.0 / 42.0;
            integral
                - 0.5 * f0
                - (B2 / 2.0 * deriv(1) + B4 / 24.0 * deriv(3) + B6 / 720.0 * deriv(5))
        };
        sum += tail(1.0 - u / b) + tail(1.0 + u / b);
        -sum.ln()
    }

    fn shell_periodized(&self, u: &[f64], l: f64) -> Result<f64> {
        let d = self.dim;
        let dist = |y: &[i64]| -> f64 {
            let mut s = 0.0;
            for c in 0..d {
                let v = u[c] - l * y[c] as f64;
                s += v * v;
            }
            s.sqrt()
        };
        let xi0 = self.xi(dist(&[0, 0, 0][..d]));
        let support = self.table.as_ref().map(|t| t.r_max());
        if !xi0.is_finite() {
            // Nearest image outside the support; farther images are too.
            return Ok(f64::INFINITY);
        }
        let mut rel = 1.0;
        let max_shells = if d == 1 { 1_000_000 } else { 4000 };
        let mut y = [0i64; 3];
        for s in 1..=max_shells as i64 {
            let mut shell = 0.0;
            for_each_shell_point(d, s, &mut y, &mut |y| {
                let xi = self.xi(dist(y));
                if xi.is_finite() {
                    shell += (xi0 - xi).exp();
                }
            });
            rel += shell;
            let beyond_support = support.is_some_and(|r| (s as f64 - 0.5) * l > r);
            if shell < 1e-14 * rel || beyond_support {
                return Ok(xi0 - rel.ln());
            }
        }
        Err(Error::DivergentPeriodization { shells: max_shells })
    }
}

/// Calls `f` on every `y ∈ ℤ^d` with `max_c |y_c| = s`.
fn for_each_shell_point(d: usize, s: i64, y: &mut [i64; 3], f: &mut impl FnMut(&[i64])) {
    match d {
        1 => {
            for v in [-s, s] {
                y[0] = v;
                f(&y[..1]);
            }
        }
        2 => {
            for a in -s..=s {
                for b in -s..=s {
                    if a.abs() == s || b.abs() == s {
                        y[0] = a;
                        y[1] = b;
                        f(&y[..2]);
                    }
                }
            }
        }
        _ => {
            for a in -s..=s {
                for b in -s..=s {
                    let edge = a.abs() == s || b.abs() == s;
                    if edge {
                        for c in -s..=s {
                            y[0] = a;
                            y[1] = b;
                            y[2] = c;
                            f(&y[..3]);
                        }
                    } else {
                        for c in [-s, s] {
                            y[0] = a;
                            y[1] = b;
                            y[2] = c;
                            f(&y[..3]);
                        }
                    }
                }
            }
        }
    }
}

/// Outcome of [`check_fourier_positivity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositivityReport {
    /// `r^{d−1} g(r)` has nonnegative second differences on the grid.
    pub is_convex_premise: bool,
    /// Smallest transform value over the `k` grid.
    pub min_transform_value: f64,
    /// `|k|` where the minimum occurs.
    pub argmin_k: f64,
    /// Transform at `k = 0`.
    pub peak_value: f64,
    /// `min ≥ −tolerance·peak`.
    pub nonnegative: bool,
    pub grid_spec: GridSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub dim: usize,
    pub r_max: f64,
    pub r_points: usize,
    pub k_max: f64,
    pub k_points: usize,
    pub tolerance: f64,
}

/// Relative floor below which a transform value counts as negative.
pub const POSITIVITY_TOLERANCE: f64 = 1e-9;

/// Discrete convexity test of `r^{d−1} g(r)` and a scan of the radial Fourier transform.
///
/// `g` is sampled on `r_points` uniform points of `[0, r_max]` (made odd for Simpson);
/// the transform is evaluated at `k_points` uniform points of `[0, k_max]`.
pub fn check_fourier_positivity(
    g: impl Fn(f64) -> f64,
    dim: usize,
    r_max: f64,
    k_max: f64,
    r_points: usize,
    k_points: usize,
) -> Result<PositivityReport> {
    if r_points < 3 || k_points < 3 {
        return Err(Error::InvalidInput(
            "positivity grid needs at least 3 points per axis".into(),
        ));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::UnsupportedModel(format!("dimension {dim}")));
    }
    if !(r_max > 0.0 && k_max > 0.0) {
        return domain("r_max and k_max must be positive");
    }
    let tr = RadialTransform::new(dim, r_max, r_points, &g);
    let n = tr.r.len();
    let h = r_max / (n - 1) as f64;
    let samples: Vec<f64> = tr.r.iter().map(|&r| g(r)).collect();
    if let Some(i) = samples.iter().position(|v| !(v.is_finite() && *v >= 0.0)) {
        return Err(Error::InvalidInput(format!(
            "profile negative or non-finite at r = {}",
            i as f64 * h
        )));
    }
    let weighted: Vec<f64> =
        tr.r.iter()
            .zip(&samples)
            .map(|(r, v)| r.powi(dim as i32 - 1) * v)
            .collect();
    let scale = weighted.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let conv_tol = 1e-12 * scale.max(f64::MIN_POSITIVE);
    let is_convex_premise = weighted
        .windows(3)
        .all(|w| w[0] - 2.0 * w[1] + w[2] >= -conv_tol);

    let peak = tr.eval(0.0);
    let mut min = f64::INFINITY;
    let mut argmin = 0.0;
    for j in 0..k_points {
        let k = k_max * j as f64 / (k_points - 1) as f64;
        let v = tr.eval(k);
        if v < min {
            min = v;
            argmin = k;
        }
    }
    Ok(PositivityReport {
        is_convex_premise,
        min_transform_value: min,
        argmin_k: argmin,
        peak_value: peak,
        nonnegative: min >= -POSITIVITY_TOLERANCE * peak.abs(),
        grid_spec: GridSpec {
            dim,
            r_max,
            r_points: n,
            k_max,
            k_points,
            tolerance: POSITIVITY_TOLERANCE,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn closed_form_normalizations() {
        let g = DispersionModel::gaussian(1.0, 3).unwrap();
        assert_relative_eq!(
            g.normalization(),
            (4.0 * PI).powf(1.5),
            max_relative = 1e-15
        );
        let e = DispersionModel::new(ModelKind::Exponential3d, 1.0, 3, None).unwrap();
        assert_relative_eq!(e.normalization(), 8.0 * PI, max_relative = 1e-15);
    }

    #[test]
    fn normalization_matches_quadrature() {
        for (kind, beta, dim) in [
            (ModelKind::Gaussian, 0.7, 1),
            (ModelKind::Gaussian, 1.3, 2),
            (ModelKind::Gaussian, 1.0, 3),
            (ModelKind::Exponential3d, 0.6, 3),
            (ModelKind::Exponential3d, 1.7, 3),
            (ModelKind::PowerLaw1d, 2.0, 1),
        ] {
            let m = DispersionModel::new(kind, beta, dim, None).unwrap();
            let area = quad::sphere_area(dim);
            let opts = QuadOptions::default();
            let c = area
                * quad::integrate_to_infinity(
                    |r| r.powi(dim as i32 - 1) * m.jump_weight(r),
                    0.0,
                    opts,
                )
                .value;
            // Algebraic tails converge slowly under the semi-infinite map.
            let tol = if kind == ModelKind::PowerLaw1d {
                1e-6
            } else {
                1e-8
            };
            assert_relative_eq!(c, m.normalization(), max_relative = tol);
        }
    }

    #[test]
    fn epsilon_examples() {
        let g = DispersionModel::gaussian(1.0, 3).unwrap();
        assert_relative_eq!(
            g.epsilon(&[1.0, 0.0, 0.0]).unwrap(),
            4.0 * PI * PI,
            max_relative = 1e-15
        );
        assert_eq!(g.epsilon(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        let e = DispersionModel::new(ModelKind::Exponential3d, 1.0, 3, None).unwrap();
        assert_relative_eq!(
            e.epsilon_radial(1.0 / (2.0 * PI)).unwrap(),
            2.0 * 2f64.ln(),
            max_relative = 1e-14
        );
        assert!(g.epsilon(&[1.0]).is_err());
    }

    #[test]
    fn power_law_cache_matches_direct_and_oracle() {
        let m = DispersionModel::new(ModelKind::PowerLaw1d, 1.0, 1, None).unwrap();
        // Independent oscillatory-quadrature value at |k| = 0.3.
        assert!((m.epsilon_radial(0.3).unwrap() - 2.326_653_294_288_95).abs() < 1e-6);
        for &k in &[1e-6, 1e-3, 0.01, 0.1, 0.77, 3.0, 20.0, 100.0] {
            let direct = power_law_epsilon_direct(k);
            assert!(
                (m.epsilon_radial(k).unwrap() - direct).abs() < 1e-6 * (1.0 + direct),
                "k={k}"
            );
        }
        // ε ∼ |k|^{1/2} near the origin.
        let r = m.epsilon_radial(1e-6).unwrap() / m.epsilon_radial(4e-6).unwrap();
        assert!((r - 0.5).abs() < 0.01);
    }

    #[test]
    fn gaussian_periodization_oracle() {
        let m = DispersionModel::gaussian(1.0, 1).unwrap();
        let oracle: f64 = (-10i32..=10).map(|y| (-(y * y) as f64).exp()).sum();
        assert_relative_eq!(
            m.xi_periodized_weight(&[0.0], 2.0).unwrap(),
            oracle,
            max_relative = 1e-14
        );
        let a = m.xi_periodized(&[0.3], 2.5).unwrap();
        let b = m.xi_periodized(&[2.8], 2.5).unwrap();
        assert_relative_eq!(a, b, max_relative = 1e-12);
    }

    #[test]
    fn periodization_limits() {
        for m in [
            DispersionModel::gaussian(1.0, 3).unwrap(),
            DispersionModel::new(ModelKind::Exponential3d, 1.0, 3, None).unwrap(),
        ] {
            let x = [0.7, -0.4, 0.2];
            let r = (0.49f64 + 0.16 + 0.04).sqrt();
            let exact = m.jump_weight(r);
            let mut prev = f64::INFINITY;
            for l in [4.0, 8.0, 16.0] {
                let err = (m.xi_periodized_weight(&x, l).unwrap() - exact).abs();
                assert!(err <= prev);
                prev = err;
            }
            assert!(prev < 1e-5 * exact);
        }
    }

    #[test]
    fn power_law_periodization_matches_long_sum() {
        let m = DispersionModel::new(ModelKind::PowerLaw1d, 1.0, 1, None).unwrap();
        let (u, l) = (0.9, 3.0);
        let mut direct = 0.0;
        for y in -2_000_000i64..=2_000_000 {
            direct += (1.0 + (u - l * y as f64).abs()).powf(-1.5);
        }
        // Remainder beyond ±2e6 images: ≈ 2·(2/L)(L·2e6)^{−1/2}.
        direct += 2.0 * (2.0 / l) * (l * 2e6f64).powf(-0.5);
        assert_relative_eq!(
            m.xi_periodized_weight(&[u], l).unwrap(),
            direct,
            max_relative = 1e-7
        );
    }

    #[test]
    fn table_validation() {
        assert!(RadialTable::new(vec![0.0, 1.0], vec![1.0, 0.5]).is_err());
        assert!(RadialTable::new(vec![0.0, 1.0, 0.5], vec![1.0, 0.5, 0.2]).is_err());
        assert!(RadialTable::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.7]).is_err());
        assert!(RadialTable::new(vec![0.0, 1.0, 2.0], vec![1.0, -0.1, -0.2]).is_err());
        assert!(RadialTable::new(vec![0.0, 1.0, 2.0], vec![1.0, 0.5, 0.0]).is_ok());
    }

    #[test]
    fn tabulated_gaussian_reproduces_closed_form() {
        let r: Vec<f64> = (0..=4000).map(|i| i as f64 * 0.005).collect();
        let g: Vec<f64> = r.iter().map(|r| (-r * r / 4.0).exp()).collect();
        let t = RadialTable::new(r, g).unwrap();
        for dim in 1..=3 {
            let m = DispersionModel::with_grid(
                ModelKind::TabulatedRadial,
                1.0,
                dim,
                Some(t.clone()),
                8001,
            )
            .unwrap();
            let exact = DispersionModel::gaussian(1.0, dim).unwrap();
            assert_relative_eq!(
                m.normalization(),
                exact.normalization(),
                max_relative = 1e-5
            );
            for &k in &[0.05, 0.1, 0.2, 0.3] {
                let a = m.epsilon_radial(k).unwrap();
                let b = exact.epsilon_radial(k).unwrap();
                assert!((a - b).abs() < 1e-4, "d={dim} k={k}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn tabulated_hard_cutoff_reports_positivity_error() {
        let t = RadialTable::new(vec![0.0, 0.999_999, 1.0], vec![1.0, 1.0, 0.0]).unwrap();
        let m = DispersionModel::with_grid(ModelKind::TabulatedRadial, 1.0, 1, Some(t), 20_001)
            .unwrap();
        // 2 sin(2πk)/(2πk) is negative on 1/2 < k < 1.
        match m.epsilon_radial(0.7) {
            Err(Error::Positivity { value, .. }) => assert!(value < 0.0),
            other => panic!("expected positivity error, got {other:?}"),
        }
    }

    #[test]
    fn positivity_checker_examples() {
        let gauss =
            check_fourier_positivity(|r| (-r * r / 4.0).exp(), 3, 20.0, 0.6, 4001, 61).unwrap();
        assert!(gauss.nonnegative && gauss.min_transform_value > 0.0);
        let power = check_fourier_positivity(|r| (r + 1.0).powf(-1.5), 1, 2000.0, 2.0, 200_001, 81)
            .unwrap();
        assert!(power.is_convex_premise && power.nonnegative);
        let cutoff =
            check_fourier_positivity(|r| if r < 1.0 { 1.0 } else { 0.0 }, 1, 4.0, 2.0, 4001, 201)
                .unwrap();
        assert!(!cutoff.is_convex_premise && !cutoff.nonnegative);
        // First negative lobe of 2 sin(2πk)/(2πk): minimum near k ≈ 0.715.
        assert!((cutoff.argmin_k - 0.715).abs() < 0.02);
        assert!(check_fourier_positivity(|r| (-r).exp(), 1, 1.0, 1.0, 2, 10).is_err());
        assert!(check_fourier_positivity(|r| 1.0 - r, 1, 2.0, 1.0, 11, 10).is_err());
    }
}
