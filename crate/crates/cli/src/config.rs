use std::path::{Path, PathBuf};

use pencil_core::genericity::{PencilSpec, Precision, SpecFile};
use pencil_core::numsolve::TrackerConfig;
use pencil_core::theorems::CheckKind;
use serde::Serialize;

use crate::CliError;

/// Everything a run depends on besides the spec itself.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub spec_path: PathBuf,
    pub seed: u64,
    pub precision: Precision,
    pub tol_scale: f64,
    pub force: bool,
    pub cache_dir: Option<PathBuf>,
    pub checks: Vec<CheckKind>,
}

/// Numerical settings echoed into every artifact and folded into cache keys.
#[derive(Clone, Debug, Serialize)]
pub struct Tolerances {
    pub precision: Precision,
    pub tol_scale: f64,
    pub tracker: TrackerConfig,
}

impl RunConfig {
    pub fn tolerances(&self) -> Result<Tolerances, CliError> {
        let base = TrackerConfig::default();
        let tracker = TrackerConfig {
            initial_step: base.initial_step * self.tol_scale,
            newton_tol: base.newton_tol * self.tol_scale,
            ..base
        };
        if !(self.tol_scale.is_finite() && self.tol_scale > 0.0) {
            return Err(CliError::Usage(format!("--tol-scale must be positive, got {}", self.tol_scale)));
        }
        tracker.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(Tolerances { precision: self.precision, tol_scale: self.tol_scale, tracker })
    }
}

/// Read a spec from JSON, or from TOML when the extension says so.
pub fn load_spec(path: &Path) -> Result<PencilSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    let file: SpecFile = if path.extension().is_some_and(|e| e == "toml") {
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    } else {
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
    };
    PencilSpec::from_file(&file).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}
