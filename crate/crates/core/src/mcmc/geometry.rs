use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

/// Periodic cube `[0, L)^d`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxGeometry {
    pub side: f64,
    pub dim: usize,
}

impl BoxGeometry {
    pub fn new(side: f64, dim: usize) -> Result<Self> {
        if !(side > 0.0 && side.is_finite()) {
            return domain(format!("box side must be positive and finite, got {side}"));
        }
        if !(1..=3).contains(&dim) {
            return domain(format!("dimension must be 1, 2 or 3, got {dim}"));
        }
        Ok(Self { side, dim })
    }

    pub fn volume(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    /// Maps a coordinate into `[0, L)`.
    pub fn wrap(&self, x: f64) -> f64 {
        let w = x.rem_euclid(self.side);
        // rem_euclid can round up to exactly L.
        if w >= self.side {
            0.0
        } else {
            w
        }
    }

    /// Minimum-image displacement `b − a`, written into `out`.
    pub fn displacement(&self, a: &[f64], b: &[f64], out: &mut [f64]) {
        for c in 0..self.dim {
            let d = b[c] - a[c];
            out[c] = d - self.side * (d / self.side).round();
        }
    }

    pub fn min_image_distance(&self, a: &[f64], b: &[f64]) -> f64 {
        let mut d = [0.0; 3];
        self.displacement(a, b, &mut d[..self.dim]);
        d[..self.dim].iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// `N` points stored as a flat row-major buffer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    pub dim: usize,
    pub coords: Vec<f64>,
}

impl PointSet {
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 || coords.len() % dim != 0 {
            return Err(Error::InvalidInput(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidInput("non-finite coordinate".into()));
        }
        Ok(Self { dim, coords })
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    /// One row per point, `d` columns, no header.
    pub fn to_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_path(path)?;
        for i in 0..self.len() {
            // `{:?}` on f64 prints the shortest string that round-trips.
            w.write_record(self.point(i).iter().map(|c| format!("{c:?}")))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn from_csv(path: &Path, dim: usize) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .comment(Some(b'#'))
            .from_path(path)?;
        let mut coords = Vec::new();
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            if rec.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point file row {} has {} columns, expected {dim}",
                    line + 1,
                    rec.len()
                )));
            }
            for field in rec.iter() {
                coords.push(field.parse::<f64>().map_err(|e| {
                    Error::InvalidInput(format!("point file row {}: {e}", line + 1))
                })?);
            }
        }
        Self::new(dim, coords)
    }
}

/// How the initial points are produced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum PointProcess {
    /// `N` i.i.d. uniform points.
    Poisson,
    /// Cubic lattice with spacing `L/n`, `N = n^d`.
    Lattice,
    File {
        path: std::path::PathBuf,
    },
}

pub fn generate_points<R: Rng + ?Sized>(
    process: &PointProcess,
    geometry: &BoxGeometry,
    n: usize,
    rng: &mut R,
) -> Result<PointSet> {
    if n == 0 {
        return domain("need at least one point");
    }
    let d = geometry.dim;
    let points = match process {
        PointProcess::Poisson => {
            let coords = (0..n * d)
                .map(|_| rng.gen::<f64>() * geometry.side)
                .map(|x| geometry.wrap(x))
                .collect();
            PointSet::new(d, coords)?
        }
        PointProcess::Lattice => {
            let side = (n as f64).powf(1.0 / d as f64).round() as usize;
            if side.pow(d as u32) != n {
                return domain(format!(
                    "lattice needs N to be a perfect power of {d}, got {n}"
                ));
            }
            let a = geometry.side / side as f64;
            let mut coords = Vec::with_capacity(n * d);
            for idx in 0..n {
                let mut rest = idx;
                let mut p = [0.0; 3];
                for c in (0..d).rev() {
                    p[c] = (rest % side) as f64 * a;
                    rest /= side;
                }
                coords.extend_from_slice(&p[..d]);
            }
            PointSet::new(d, coords)?
        }
        PointProcess::File { path } => {
            let p = PointSet::from_csv(path, d)?;
            if p.len() != n {
                return domain(format!("point file has {} points, expected {n}", p.len()));
            }
            p
        }
    };
    if points
        .coords
        .iter()
        .any(|&c| !(0.0..geometry.side).contains(&c))
    {
        return domain("points must lie in [0, L)^d");
    }
    Ok(points)
}
