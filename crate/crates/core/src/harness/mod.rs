//! Orchestration: manifest ingestion, subject-wise fold construction,
//! training runs, metrics, checkpoints, and loss-curve emission.

pub mod access;
pub mod checkpoint;
pub mod config;
pub mod crossval;
pub mod manifest;
pub mod metrics;
pub mod split;

pub use access::{AccessLog, AccessPhase, AccessRecord, ScanStore};
pub use checkpoint::{load_checkpoint, save_checkpoint, Checkpoint, TrainingMeta};
pub use config::{PhaseConfig, RunConfig};
pub use crossval::{predict_label, run_crossval, CrossvalReport, FoldResult};
pub use manifest::{CohortManifest, ManifestEntry};
pub use metrics::{compute_metrics, render_table, Metrics};
pub use split::{split_subjectwise, FoldPlan, FoldRound};

use crate::dfc::{DfcSequence, N_SELECTED, N_WINDOWS};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Packs an extracted sequence into a checkpoint table under the cache
/// naming scheme "dfc/<scan_id>/<frame_index>".
pub fn sequence_cache(seq: &DfcSequence) -> Checkpoint {
    let tensors = seq
        .frames
        .iter()
        .enumerate()
        .map(|(k, f)| (format!("dfc/{}/{k}", seq.scan_id), f.clone()))
        .collect();
    Checkpoint::new(tensors)
}

/// Reassembles a cached sequence written by [`sequence_cache`].
pub fn sequence_from_cache(
    ckpt: &Checkpoint,
    scan_id: &str,
    subject_id: &str,
    label: Option<u8>,
) -> Result<DfcSequence> {
    let mut frames: Vec<Tensor> = Vec::with_capacity(N_WINDOWS);
    for k in 0..N_WINDOWS {
        let name = format!("dfc/{scan_id}/{k}");
        let t = ckpt
            .tensor(&name)
            .ok_or_else(|| Error::format(format!("cache is missing tensor \"{name}\"")))?;
        if t.shape() != [N_SELECTED, N_SELECTED] {
            return Err(Error::shape(format!(
                "cached frame {name} has shape {:?}",
                t.shape()
            )));
        }
        frames.push(t.clone());
    }
    DfcSequence::new(subject_id, scan_id, label, frames)
}
