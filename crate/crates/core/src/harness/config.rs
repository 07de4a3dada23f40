//! Run configuration: seeds, epochs, batch sizes, learning rates, ROI
//! selection and the SVM regularization grid. JSON on disk; every field has
//! a default, so `{}` is a valid config.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::dfc::RoiSelection;
use crate::dnet::TrainSettings;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct PhaseConfig {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
}

impl Default for PhaseConfig {
    fn default() -> PhaseConfig {
        PhaseConfig {
            epochs: 50,
            lr: 5e-4,
            batch_size: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub folds: usize,
    pub pretrain: PhaseConfig,
    pub finetune: PhaseConfig,
    /// 28 ROI indices; None selects the documented default set.
    pub roi_selection: Option<Vec<usize>>,
    pub svm_lambda_grid: Vec<f64>,
    pub svm_epochs: usize,
    /// Features kept by Fisher selection for the static-FC baseline.
    pub sfc_top_k: usize,
    /// Features kept for the dynamic-FC baseline.
    pub dfc_top_k: usize,
}

impl Default for RunConfig {
    fn default() -> RunConfig {
        RunConfig {
            seed: 11,
            folds: 5,
            pretrain: PhaseConfig {
                epochs: 50,
                lr: 5e-4,
                batch_size: 4,
            },
            finetune: PhaseConfig {
                epochs: 30,
                lr: 1e-5,
                batch_size: 4,
            },
            roi_selection: None,
            svm_lambda_grid: vec![1e-3, 1e-2, 1e-1, 1.0],
            svm_epochs: 500,
            sfc_top_k: 20,
            dfc_top_k: 100,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::format(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("config serialization: {e}")))?;
        fs::write(path, text)?;
        Ok(())
    }

    pub fn roi_selection(&self) -> Result<RoiSelection> {
        match &self.roi_selection {
            Some(indices) => RoiSelection::new(indices.clone()),
            None => Ok(RoiSelection::default28()),
        }
    }

    pub fn pretrain_settings(&self, seed: u64) -> TrainSettings {
        TrainSettings {
            epochs: self.pretrain.epochs,
            lr: self.pretrain.lr,
            batch_size: self.pretrain.batch_size,
            seed,
        }
    }

    pub fn finetune_settings(&self, seed: u64) -> TrainSettings {
        TrainSettings {
            epochs: self.finetune.epochs,
            lr: self.finetune.lr,
            batch_size: self.finetune.batch_size,
            seed,
        }
    }
}
