//! Output staging and the run manifest.
//!
//! Commands build every output in memory first; nothing touches the output
//! directory until all computation has succeeded.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const MANIFEST: &str = "manifest.jsonl";

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct OutputDigest {
    pub file: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    run_id: &'a str,
    command: &'a str,
    tool_version: &'a str,
    config: &'a BTreeMap<String, String>,
    inputs: &'a [InputDigest],
    outputs: Vec<OutputDigest>,
}

/// Everything that identifies a run: command, settings and input contents.
pub struct RunContext {
    pub command: &'static str,
    pub config: BTreeMap<String, String>,
    pub inputs: Vec<InputDigest>,
}

impl RunContext {
    /// `args` supplies the config; input paths and the output directory are
    /// left out of it, so the run id depends only on settings and contents.
    pub fn new(command: &'static str, args: &impl Serialize) -> Self {
        let config = match serde_json::to_value(args) {
            Ok(serde_json::Value::Object(map)) => map
                .into_iter()
                .map(|(k, v)| {
                    let v = match v {
                        serde_json::Value::String(s) => s,
                        other => other.to_string(),
                    };
                    (k, v)
                })
                .collect(),
            _ => BTreeMap::new(),
        };
        RunContext {
            command,
            config,
            inputs: Vec::new(),
        }
    }

    /// Read an input file and record its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<String, CliError> {
        let bytes = fs::read(path).map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        String::from_utf8(bytes).map_err(|_| CliError::Validation(format!("{} is not valid UTF-8", path.display())))
    }

    /// Deterministic id derived from the command, config and inputs.
    pub fn run_id(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.command.as_bytes());
        h.update(env!("CARGO_PKG_VERSION").as_bytes());
        for (k, v) in &self.config {
            h.update([0]);
            h.update(k.as_bytes());
            h.update([1]);
            h.update(v.as_bytes());
        }
        for i in &self.inputs {
            h.update([2]);
            h.update(i.sha256.as_bytes());
        }
        hex::encode(&h.finalize()[..8])
    }
}

/// What a completed command reports on stdout.
pub struct Done {
    pub summary: String,
    pub run_id: String,
    pub out_dir: PathBuf,
    pub written: Vec<PathBuf>,
}

/// Output files staged in memory.
pub struct Outputs {
    run_id: String,
    files: Vec<(String, Vec<u8>)>,
}

impl Outputs {
    pub fn new(run_id: String) -> Self {
        Outputs {
            run_id,
            files: Vec::new(),
        }
    }

    /// The comment line tying an output to its manifest entry.
    pub fn run_comment(&self) -> String {
        format!("run: {} (see {MANIFEST})", self.run_id)
    }

    pub fn add(&mut self, name: impl Into<String>, bytes: Vec<u8>) {
        self.files.push((name.into(), bytes));
    }

    /// Stage a CSV table headed by the run comment.
    pub fn table(&mut self, name: &str, header: &[&str], rows: Vec<Vec<String>>) -> Result<(), CliError> {
        self.table_noted(name, &[], header, rows)
    }

    /// Like [`Outputs::table`], with extra comment lines under the run comment.
    pub fn table_noted(
        &mut self,
        name: &str,
        notes: &[&str],
        header: &[&str],
        rows: Vec<Vec<String>>,
    ) -> Result<(), CliError> {
        let mut buf = Vec::new();
        writeln!(buf, "# {}", self.run_comment()).expect("write to memory");
        for n in notes {
            writeln!(buf, "# {n}").expect("write to memory");
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(header).map_err(CliError::computation)?;
            for r in rows {
                w.write_record(&r).map_err(CliError::computation)?;
            }
            w.flush().map_err(CliError::computation)?;
        }
        self.add(name, buf);
        Ok(())
    }

    /// Write all staged files and append the manifest line.
    pub fn commit(self, ctx: &RunContext, out_dir: &Path, summary: String) -> Result<Done, CliError> {
        let io_err = |p: &Path, e: std::io::Error| CliError::Validation(format!("cannot write {}: {e}", p.display()));
        fs::create_dir_all(out_dir).map_err(|e| io_err(out_dir, e))?;
        let mut written = Vec::new();
        let mut digests = Vec::new();
        for (name, bytes) in &self.files {
            let path = out_dir.join(name);
            fs::write(&path, bytes).map_err(|e| io_err(&path, e))?;
            digests.push(OutputDigest {
                file: name.clone(),
                sha256: sha256_hex(bytes),
            });
            written.push(path);
        }
        let manifest = Manifest {
            run_id: &self.run_id,
            command: ctx.command,
            tool_version: env!("CARGO_PKG_VERSION"),
            config: &ctx.config,
            inputs: &ctx.inputs,
            outputs: digests,
        };
        let line = serde_json::to_string(&manifest).map_err(CliError::computation)?;
        let path = out_dir.join(MANIFEST);
        let existing = fs::read_to_string(&path).unwrap_or_default();
        // Re-running an identical command leaves the manifest unchanged.
        if !existing.lines().any(|l| l == line) {
            let mut f = fs::OpenOptions::new()
                .create(true)
                .append(true)
                .open(&path)
                .map_err(|e| io_err(&path, e))?;
            writeln!(f, "{line}").map_err(|e| io_err(&path, e))?;
        }
        written.push(path);
        Ok(Done {
            summary,
            run_id: self.run_id,
            out_dir: out_dir.to_owned(),
            written,
        })
    }
}

/// Shortest round-trip rendering, scientific for very small or large
/// magnitudes.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && a.is_finite() && !(1e-4..1e15).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_else(|| "NA".into())
}
