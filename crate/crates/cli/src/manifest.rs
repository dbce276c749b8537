//! JSON run manifest: config echo, seed, outputs, per-check verdicts, and
//! timing. Written on every path, including failures.

use std::path::Path;

use serde::Serialize;

use crate::config::RunConfig;

#[derive(Clone, Debug, Serialize)]
pub struct CheckEntry {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct Manifest<'a> {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: &'static str,
    pub seed: u64,
    pub config: Option<&'a RunConfig>,
    pub outputs: Vec<String>,
    pub checks: Vec<CheckEntry>,
    pub pass: bool,
    pub error: Option<String>,
    pub wall_time_s: f64,
}

impl<'a> Manifest<'a> {
    pub fn write(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        let body = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(dir.join("manifest.json"), body + "\n")
    }
}
