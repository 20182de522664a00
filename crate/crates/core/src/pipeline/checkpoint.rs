use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{SearchConfig, SearchError, Tally};

pub const CHECKPOINT_VERSION: u32 = 1;

/// Progress of a run at a chunk boundary: every index below `next_index`
/// is folded into `partials`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub config: SearchConfig,
    pub next_index: u64,
    pub partials: Tally,
}

impl Checkpoint {
    pub fn start(config: &SearchConfig) -> Self {
        Self {
            version: CHECKPOINT_VERSION,
            config: config.clone(),
            next_index: 0,
            partials: Tally::default(),
        }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        let corrupt = |m: &str| Err(SearchError::CorruptCheckpoint(m.to_string()));
        if self.version != CHECKPOINT_VERSION {
            return corrupt("unsupported version");
        }
        if self.config.validate().is_err() {
            return corrupt("invalid configuration");
        }
        if self.next_index > self.config.matrix_budget {
            return corrupt("next_index beyond the budget");
        }
        if self.partials.matrices_tested != self.next_index {
            return corrupt("tested count disagrees with next_index");
        }
        if !self.partials.is_consistent() {
            return corrupt("partial counters are inconsistent");
        }
        Ok(())
    }
}

/// Writes through a temporary file and a rename, so a crash leaves either
/// the old or the new checkpoint.
pub fn save_checkpoint(path: &Path, checkpoint: &Checkpoint) -> Result<(), SearchError> {
    let text = serde_json::to_string_pretty(checkpoint).expect("checkpoint serializes");
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    fs::write(&tmp, text + "\n")?;
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load_checkpoint(path: &Path) -> Result<Checkpoint, SearchError> {
    let text = fs::read_to_string(path)?;
    let checkpoint: Checkpoint =
        serde_json::from_str(&text).map_err(|e| SearchError::CorruptCheckpoint(e.to_string()))?;
    checkpoint.validate()?;
    Ok(checkpoint)
}
