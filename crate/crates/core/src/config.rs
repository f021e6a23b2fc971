use serde::{Deserialize, Serialize};

use crate::blockiness::BlockinessConfig;
use crate::error::Result;
use crate::seba::SebaConfig;
use crate::temporal::DetectionConfig;

/// Every tunable of an analysis run, echoed verbatim into reports.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub blockiness: BlockinessConfig,
    pub detection: DetectionConfig,
    pub seba: SebaConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        self.blockiness.validate()?;
        self.detection.validate()?;
        self.seba.validate()
    }
}
