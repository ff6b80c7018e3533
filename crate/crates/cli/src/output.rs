//! Output directory, CSV/JSON writers and run manifests.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::{DateTime, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Where one command writes its files; every file shares `stem`.
pub struct Output {
    dir: PathBuf,
    stem: String,
    files: Vec<String>,
}

impl Output {
    pub fn new(dir: &Path, stem: impl Into<String>) -> Result<Self> {
        fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            stem: stem.into(),
            files: Vec::new(),
        })
    }

    pub fn stem(&self) -> &str {
        &self.stem
    }

    /// `<dir>/<stem><suffix>`, recorded for the manifest.
    pub fn path(&mut self, suffix: &str) -> PathBuf {
        let name = format!("{}{suffix}", self.stem);
        let p = self.dir.join(&name);
        self.files.push(name);
        p
    }

    pub fn create(&mut self, suffix: &str) -> Result<BufWriter<File>> {
        let p = self.path(suffix);
        let f = File::create(&p).with_context(|| format!("cannot create {}", p.display()))?;
        Ok(BufWriter::new(f))
    }

    /// Header row followed by `rows`; floats use shortest round-trip formatting.
    pub fn write_csv(&mut self, suffix: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut w = csv::Writer::from_writer(self.create(suffix)?);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }

    /// Pretty JSON with keys sorted; adds a `manifest` key naming the manifest file.
    pub fn write_json<T: Serialize>(&mut self, suffix: &str, value: &T) -> Result<()> {
        let mut v = serde_json::to_value(value)?;
        if let Value::Object(m) = &mut v {
            m.insert("manifest".into(), Value::String(self.manifest_name()));
        }
        let mut w = self.create(suffix)?;
        write_sorted_json(&mut w, &v)?;
        Ok(())
    }

    fn manifest_name(&self) -> String {
        format!("{}.manifest.json", self.stem)
    }

    pub fn files(&self) -> &[String] {
        &self.files
    }

    pub fn write_manifest(&self, manifest: &RunManifest) -> Result<PathBuf> {
        let p = self.dir.join(self.manifest_name());
        let mut w = BufWriter::new(
            File::create(&p).with_context(|| format!("cannot create {}", p.display()))?,
        );
        write_sorted_json(&mut w, &serde_json::to_value(manifest)?)?;
        Ok(p)
    }
}

/// `serde_json::Map` is a `BTreeMap` here, so round-tripping through `Value` sorts keys.
fn write_sorted_json<W: Write>(w: &mut W, v: &Value) -> Result<()> {
    serde_json::to_writer_pretty(&mut *w, v)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Everything needed to re-execute a run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Fully resolved config, seed included.
    pub config: Value,
    pub model_hash: Option<String>,
    pub seed: u64,
    pub tool_version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(
        command: &str,
        config: Value,
        model_hash: Option<String>,
        seed: u64,
        started: DateTime<Utc>,
        outputs: &[String],
    ) -> Self {
        Self {
            command: command.into(),
            config,
            model_hash,
            seed,
            tool_version: env!("CARGO_PKG_VERSION").into(),
            started_at: started.to_rfc3339_opts(SecondsFormat::Millis, true),
            finished_at: Utc::now().to_rfc3339_opts(SecondsFormat::Millis, true),
            outputs: outputs.to_vec(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("cannot read manifest {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("malformed manifest {}", path.display()))
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn num(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}
