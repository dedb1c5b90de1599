//! Run manifests: every command records its inputs, parameters, seed, and
//! output files so a run can be audited and replayed. Data outputs reproduce
//! byte-for-byte under replay; timing logs are listed separately.

use std::path::Path;
use std::time::Instant;

use serde::Serialize;

#[derive(Serialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub seed: u64,
    pub inputs: Vec<String>,
    pub parameters: serde_json::Map<String, serde_json::Value>,
    pub outputs: Vec<String>,
    pub logs: Vec<String>,
    pub wall_time_ms: f64,
}

pub struct ManifestBuilder {
    manifest: RunManifest,
}

impl ManifestBuilder {
    pub fn new(command: &str, seed: u64) -> Self {
        ManifestBuilder {
            manifest: RunManifest {
                command: command.to_string(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                seed,
                inputs: Vec::new(),
                parameters: serde_json::Map::new(),
                outputs: Vec::new(),
                logs: Vec::new(),
                wall_time_ms: 0.0,
            },
        }
    }

    pub fn input(&mut self, path: &Path) -> &mut Self {
        self.manifest.inputs.push(path.display().to_string());
        self
    }

    pub fn param<T: Serialize>(&mut self, key: &str, value: T) -> &mut Self {
        self.manifest.parameters.insert(
            key.to_string(),
            serde_json::to_value(value).expect("serializable parameter"),
        );
        self
    }

    pub fn output(&mut self, path: &Path) -> &mut Self {
        self.manifest.outputs.push(path.display().to_string());
        self
    }

    pub fn log(&mut self, path: &Path) -> &mut Self {
        self.manifest.logs.push(path.display().to_string());
        self
    }

    /// Writes `manifest.json` into the given directory.
    pub fn write_into(mut self, dir: &Path, started: Instant) -> anyhow::Result<()> {
        self.manifest.wall_time_ms = started.elapsed().as_secs_f64() * 1e3;
        let path = dir.join("manifest.json");
        let mut text = serde_json::to_string_pretty(&self.manifest)?;
        text.push('\n');
        std::fs::write(path, text)?;
        Ok(())
    }

    /// Writes `manifest.json` next to the given output file.
    pub fn write_next_to(self, output: &Path, started: Instant) -> anyhow::Result<()> {
        let dir = output.parent().unwrap_or_else(|| Path::new("."));
        self.write_into(dir, started)
    }
}
