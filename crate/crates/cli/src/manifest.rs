//! Run provenance embedded in every output file.

use std::collections::BTreeMap;
use std::time::Instant;

use serde::Serialize;

#[derive(Serialize, Debug, Clone)]
pub struct Manifest {
    pub command: String,
    pub inputs: Vec<String>,
    pub config: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub version: &'static str,
    /// Wall-clock stage timings; absent for pure generation commands so
    /// their output stays byte-identical across runs.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub timings_ms: BTreeMap<String, f64>,
}

impl Manifest {
    pub fn new(command: &str) -> Self {
        Manifest {
            command: command.to_string(),
            inputs: Vec::new(),
            config: serde_json::json!({}),
            seed: None,
            version: env!("CARGO_PKG_VERSION"),
            timings_ms: BTreeMap::new(),
        }
    }

    pub fn input(mut self, path: &std::path::Path) -> Self {
        self.inputs.push(path.display().to_string());
        self
    }

    pub fn config(mut self, value: serde_json::Value) -> Self {
        self.config = value;
        self
    }

    pub fn seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn time<T>(&mut self, stage: &str, f: impl FnOnce() -> T) -> T {
        let t0 = Instant::now();
        let out = f();
        self.timings_ms.insert(stage.to_string(), t0.elapsed().as_secs_f64() * 1e3);
        out
    }
}
