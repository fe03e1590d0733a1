use std::fs;
use std::path::{Path, PathBuf};

use detlab::variational::{Domain, FamilySpec};
use detlab::EnsembleSpec;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Seed used when neither the config file nor `--seed` provides one.
pub const DEFAULT_SEED: u64 = 20_240_601;

/// Contents of a `--config` file. Every field is optional; command-line flags
/// take precedence.
#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Subcommand to run when none is given on the command line.
    pub command: Option<String>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub out: Option<PathBuf>,
    /// Ensemble used by `detgrowth`, `wegner`, `mde` and `laplace`.
    pub spec: Option<EnsembleSpec>,
    /// Measure family for `variational` and `laplace`.
    pub family: Option<FamilySpec>,
    pub domain: Option<Domain>,
    /// Per-subcommand parameters, keyed by subcommand name; same names as the flags.
    #[serde(default)]
    pub params: toml::Table,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("bad config {}: {e}", path.display()))
    }

    /// Parameters for `command` from the file, overridden by any flag that was set.
    pub fn merge_params<T: Serialize + DeserializeOwned>(&self, command: &str, flags: &T) -> Result<T, String> {
        let mut base = match self.params.get(command) {
            Some(t) => serde_json::to_value(t).map_err(|e| e.to_string())?,
            None => Value::Object(Default::default()),
        };
        let over = serde_json::to_value(flags).map_err(|e| e.to_string())?;
        if let (Value::Object(b), Value::Object(o)) = (&mut base, over) {
            for (k, v) in o {
                if !v.is_null() && v != Value::Bool(false) {
                    b.insert(k, v);
                }
            }
        }
        serde_json::from_value(base).map_err(|e| format!("bad [params.{command}] table: {e}"))
    }
}

/// Checks that `dir` can hold output files.
pub fn ensure_writable(dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("cannot create {}: {e}", dir.display()))?;
    let probe = dir.join(".detlab-write-test");
    fs::write(&probe, b"").map_err(|e| format!("{} is not writable: {e}", dir.display()))?;
    let _ = fs::remove_file(probe);
    Ok(())
}
