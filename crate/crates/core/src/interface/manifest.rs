//! Run manifests: everything needed to replay a run, plus a hash of what it
//! produced.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::CatenoidSpec;
use crate::integrator::{FlowConfig, FlowState, FlowTrajectory, StopCriteria};

pub const MANIFEST_SCHEMA: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub struct RunManifest {
    pub schema: u32,
    pub command: String,
    pub config: serde_json::Value,
    #[serde(default)]
    pub spec: Option<CatenoidSpec>,
    /// How the initial curve was produced.
    pub initial: serde_json::Value,
    pub stop: serde_json::Value,
    /// Run parameters such as δ, ε₁, the j list and horizons.
    #[serde(default)]
    pub parameters: serde_json::Value,
    /// The pipeline is deterministic; recorded so replays can confirm it.
    pub seed_metadata: serde_json::Value,
    /// Artifact name → path relative to the manifest directory.
    #[serde(default)]
    pub artifacts: BTreeMap<String, String>,
    pub version: String,
    /// SHA-256 over the artifacts in name order.
    #[serde(default)]
    pub content_hash: String,
}

impl RunManifest {
    pub fn new(command: &str) -> Self {
        Self {
            schema: MANIFEST_SCHEMA,
            command: command.into(),
            config: serde_json::Value::Null,
            spec: None,
            initial: serde_json::Value::Null,
            stop: serde_json::Value::Null,
            parameters: serde_json::Value::Null,
            seed_metadata: serde_json::json!({ "deterministic": true, "seed": null }),
            artifacts: BTreeMap::new(),
            version: env!("CARGO_PKG_VERSION").into(),
            content_hash: String::new(),
        }
    }

    pub fn with_config(mut self, config: &impl Serialize) -> Result<Self> {
        self.config = serde_json::to_value(config)?;
        Ok(self)
    }

    pub fn with_stop(mut self, stop: &impl Serialize) -> Result<Self> {
        self.stop = serde_json::to_value(stop)?;
        Ok(self)
    }

    pub fn artifact(mut self, name: &str, relative: &str) -> Self {
        self.artifacts.insert(name.into(), relative.into());
        self
    }

    /// Hash of the artifact files under `root`.
    pub fn artifact_hash(&self, root: &Path) -> Result<String> {
        let mut hasher = Sha256::new();
        for (name, rel) in &self.artifacts {
            hasher.update(name.as_bytes());
            hasher.update([0u8]);
            let bytes = fs::read(root.join(rel))?;
            hasher.update((bytes.len() as u64).to_le_bytes());
            hasher.update(&bytes);
        }
        Ok(hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect())
    }

    pub fn seal(&mut self, root: &Path) -> Result<()> {
        self.content_hash = self.artifact_hash(root)?;
        Ok(())
    }

    /// True iff the artifacts under `root` still hash to the recorded value.
    pub fn verify(&self, root: &Path) -> Result<bool> {
        Ok(self.artifact_hash(root)? == self.content_hash)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| Error::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let found = value.get("schema").and_then(|v| v.as_u64());
        if found != Some(MANIFEST_SCHEMA as u64) {
            return Err(Error::Schema {
                found: found.map_or(0, |v| v as u32),
                expected: MANIFEST_SCHEMA,
            });
        }
        Ok(serde_json::from_value(value)?)
    }

    pub fn flow_config(&self) -> Result<FlowConfig> {
        serde_json::from_value(self.config.clone())
            .map_err(|e| Error::Precondition(format!("manifest config is not a flow config: {e}")))
    }

    pub fn stop_criteria(&self) -> Result<StopCriteria> {
        serde_json::from_value(self.stop.clone())
            .map_err(|e| Error::Precondition(format!("manifest stop is not a stop criterion: {e}")))
    }

    /// State to continue a flow run from its last stored snapshot.
    pub fn resume_state(&self, traj: &FlowTrajectory) -> Result<(FlowState, StopCriteria)> {
        let last = traj
            .snapshots
            .last()
            .ok_or_else(|| Error::InsufficientHistory("empty trajectory".into()))?;
        let state =
            FlowState::new(last.curve.clone(), traj.n, self.flow_config()?)?.at_time(last.t);
        Ok((state, self.stop_criteria()?))
    }
}

/// Appends `more` (which starts at the last snapshot of `base`) to `base`.
pub fn splice(mut base: FlowTrajectory, more: FlowTrajectory) -> FlowTrajectory {
    let t_last = base.final_time();
    base.snapshots
        .extend(more.snapshots.into_iter().filter(|s| s.t > t_last));
    base.stop_reason = more.stop_reason;
    base.escape = base.escape.or(more.escape);
    base.steps += more.steps;
    base.remeshes += more.remeshes;
    base
}
