//! Access-logged scan loading. Every scan read is tagged with its round and
//! role, so tests (and audits) can verify that test-fold data is never
//! touched during training.

use std::sync::Mutex;

use serde::Serialize;

use crate::dfc::{extract_dfc_sequence, load_scan, DfcSequence, RoiScan, RoiSelection};
use crate::error::Result;
use crate::harness::manifest::{CohortManifest, ManifestEntry};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum AccessPhase {
    /// Read for pre-training or fine-tuning.
    TrainingData,
    /// Read for validation-based selection (early stopping, lambda grid).
    Validation,
    /// Read for final test evaluation.
    Test,
}

#[derive(Debug, Clone, Serialize)]
pub struct AccessRecord {
    pub round: usize,
    pub subject: String,
    pub scan: String,
    pub phase: AccessPhase,
}

#[derive(Debug, Default)]
pub struct AccessLog {
    entries: Mutex<Vec<AccessRecord>>,
}

impl AccessLog {
    pub fn record(&self, record: AccessRecord) {
        self.entries.lock().expect("access log poisoned").push(record);
    }

    pub fn snapshot(&self) -> Vec<AccessRecord> {
        self.entries.lock().expect("access log poisoned").clone()
    }
}

/// Loads scans through the access log.
pub struct ScanStore<'a> {
    manifest: &'a CohortManifest,
    log: AccessLog,
}

impl<'a> ScanStore<'a> {
    pub fn new(manifest: &'a CohortManifest) -> ScanStore<'a> {
        ScanStore {
            manifest,
            log: AccessLog::default(),
        }
    }

    pub fn log(&self) -> &AccessLog {
        &self.log
    }

    pub fn fetch_scan(
        &self,
        entry: &ManifestEntry,
        round: usize,
        phase: AccessPhase,
    ) -> Result<RoiScan> {
        self.log.record(AccessRecord {
            round,
            subject: entry.subject.clone(),
            scan: entry.scan.clone(),
            phase,
        });
        load_scan(
            std::path::Path::new(&entry.path),
            entry.subject.clone(),
            entry.scan.clone(),
            Some(entry.label),
        )
    }

    /// Loads every scan belonging to the given subjects, in manifest order.
    pub fn fetch_scans(
        &self,
        subjects: &[String],
        round: usize,
        phase: AccessPhase,
    ) -> Result<Vec<RoiScan>> {
        self.manifest
            .scans_of_subjects(subjects)
            .into_iter()
            .map(|entry| self.fetch_scan(entry, round, phase))
            .collect()
    }

    /// Loads and extracts the DFC sequences of every scan belonging to the
    /// given subjects, in manifest order.
    pub fn fetch_sequences(
        &self,
        subjects: &[String],
        selection: &RoiSelection,
        round: usize,
        phase: AccessPhase,
    ) -> Result<Vec<DfcSequence>> {
        self.manifest
            .scans_of_subjects(subjects)
            .into_iter()
            .map(|entry| {
                let scan = self.fetch_scan(entry, round, phase)?;
                extract_dfc_sequence(&scan, selection)
            })
            .collect()
    }
}
