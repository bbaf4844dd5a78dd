//! Output files and their provenance sidecars.
//!
//! A sidecar holds no timestamps or host details, so two runs with the same
//! configuration and inputs write identical sidecars as well.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use hyperrank_core::eval::EvalReport;
use hyperrank_core::pipeline::{self, ArtifactSink, RunConfig};

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub fn read_input(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    /// SHA-256 of the canonical configuration text.
    pub config_hash: String,
    pub seed: Option<u64>,
    pub config: Option<String>,
    pub params: Value,
    pub inputs: Vec<InputDigest>,
}

#[derive(Serialize)]
struct Sidecar<'a> {
    file: &'a str,
    sha256: String,
    #[serde(flatten)]
    provenance: &'a Provenance,
}

impl Provenance {
    pub fn new(command: &str, canonical: &str, params: Value) -> Self {
        Self {
            tool: env!("CARGO_PKG_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command: command.to_string(),
            config_hash: sha256_hex(canonical.as_bytes()),
            seed: params.get("seed").and_then(Value::as_u64),
            config: None,
            params,
            inputs: Vec::new(),
        }
    }

    pub fn from_config(command: &str, cfg: &RunConfig, params: Value) -> Self {
        let text = cfg.to_text();
        Self {
            seed: Some(cfg.seed),
            config: Some(text.clone()),
            ..Self::new(command, &text, params)
        }
    }

    pub fn with_inputs<P: AsRef<Path>>(mut self, paths: &[P]) -> Result<Self> {
        for p in paths {
            let p = p.as_ref();
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            self.inputs.push(InputDigest {
                path: p.display().to_string(),
                sha256: sha256_hex(&bytes),
            });
        }
        Ok(self)
    }

    fn sidecar(&self, file: &str, content: &str) -> Result<String> {
        let s = Sidecar {
            file,
            sha256: sha256_hex(content.as_bytes()),
            provenance: self,
        };
        Ok(serde_json::to_string_pretty(&s)? + "\n")
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".prov.json");
    path.with_file_name(name)
}

/// `dir/model.json` -> `dir/model.<suffix>`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    path.with_extension(suffix)
}

fn write_with_sidecar(path: &Path, content: &str, prov: &Provenance) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    fs::write(path, content).with_context(|| format!("writing {}", path.display()))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let side = sidecar_path(path);
    fs::write(&side, prov.sidecar(&name, content)?).with_context(|| format!("writing {}", side.display()))?;
    Ok(())
}

/// Writes `content` to `out` (with sidecar) or to stdout.
pub fn emit(out: Option<&Path>, content: &str, prov: &Provenance) -> Result<()> {
    match out {
        Some(path) => write_with_sidecar(path, content, prov),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// Artifact sink writing under a directory, one sidecar per file.
pub struct DirSink {
    root: PathBuf,
    prov: Provenance,
}

impl DirSink {
    pub fn new(root: &Path, prov: Provenance) -> Result<Self> {
        fs::create_dir_all(root).with_context(|| format!("creating {}", root.display()))?;
        Ok(Self {
            root: root.to_path_buf(),
            prov,
        })
    }
}

impl ArtifactSink for DirSink {
    fn put(&mut self, name: &str, content: &str) -> hyperrank_core::Result<()> {
        write_with_sidecar(&self.root.join(name), content, &self.prov)
            .map_err(|e| hyperrank_core::Error::Io(std::io::Error::other(format!("{e:#}"))))
    }
}

pub fn write_reports(sink: &mut DirSink, reports: &[EvalReport]) -> Result<()> {
    pipeline::write_report_tables(reports, sink)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sidecar_names() {
        assert_eq!(sidecar_path(Path::new("out/a.csv")), PathBuf::from("out/a.csv.prov.json"));
        assert_eq!(sibling(Path::new("m/model.json"), "history.csv"), PathBuf::from("m/model.history.csv"));
    }

    #[test]
    fn sidecar_is_deterministic() {
        let cfg = RunConfig::default();
        let a = Provenance::from_config("x", &cfg, serde_json::json!({})).sidecar("f", "abc").unwrap();
        let b = Provenance::from_config("x", &cfg, serde_json::json!({})).sidecar("f", "abc").unwrap();
        assert_eq!(a, b);
        assert!(a.contains(&sha256_hex(cfg.to_text().as_bytes())));
    }
}
