//! JSON run reports. The layout is documented in `report.schema.json`.

use std::time::Instant;

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};
use terrain_guard::scalar::format_rational;
use terrain_guard::terrain::terrain_to_json;
use terrain_guard::{ArithmeticMode, Rational, Terrain};

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: CommandEcho,
    pub instance: Instance,
    pub mode: ArithmeticMode,
    pub solution: Value,
    pub timing: Vec<Phase>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommandEcho {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Instance {
    pub path: String,
    pub n: usize,
    pub y_max: String,
    /// SHA-256 of the canonical JSON form of the vertices.
    pub sha256: String,
}

impl Instance {
    pub fn describe(path: &str, t: &Terrain<Rational>) -> Self {
        let canonical = terrain_to_json(t).to_string();
        Instance {
            path: path.to_string(),
            n: t.n(),
            y_max: format_rational(t.y_max()),
            sha256: hex::encode(Sha256::digest(canonical.as_bytes())),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Phase {
    pub phase: &'static str,
    pub ms: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Verification {
    pub method: &'static str,
    pub passed: bool,
    pub detail: String,
}

/// Wall-clock phases in the order they ran.
#[derive(Debug, Default)]
pub struct Timer {
    phases: Vec<Phase>,
}

impl Timer {
    pub fn time<T>(&mut self, phase: &'static str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.phases.push(Phase {
            phase,
            ms: start.elapsed().as_secs_f64() * 1e3,
        });
        out
    }

    pub fn finish(self) -> Vec<Phase> {
        self.phases
    }
}
