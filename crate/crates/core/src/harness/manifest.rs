//! Cohort manifest: the subject/scan/label registry that drives subject-wise
//! fold construction.
//!
//! On-disk format: JSON with a top-level `cohort` string and a `scans` array
//! of `{subject, scan, path, label}` objects, label 0 (control) or 1 (case).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestEntry {
    pub subject: String,
    pub scan: String,
    pub path: String,
    pub label: u8,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CohortManifest {
    pub cohort: String,
    pub scans: Vec<ManifestEntry>,
}

impl CohortManifest {
    pub fn new(cohort: impl Into<String>, scans: Vec<ManifestEntry>) -> Result<CohortManifest> {
        let m = CohortManifest {
            cohort: cohort.into(),
            scans,
        };
        m.validate()?;
        Ok(m)
    }

    /// Scan ids unique; labels in {0, 1} and constant per subject.
    pub fn validate(&self) -> Result<()> {
        if self.scans.is_empty() {
            return Err(Error::format("manifest has no scans".to_string()));
        }
        let mut seen = std::collections::HashSet::new();
        let mut subject_labels: BTreeMap<&str, u8> = BTreeMap::new();
        for e in &self.scans {
            if !seen.insert(e.scan.as_str()) {
                return Err(Error::format(format!("duplicate scan id \"{}\"", e.scan)));
            }
            if e.label > 1 {
                return Err(Error::format(format!(
                    "scan \"{}\" has label {}, expected 0 or 1",
                    e.scan, e.label
                )));
            }
            match subject_labels.get(e.subject.as_str()) {
                Some(&l) if l != e.label => {
                    return Err(Error::format(format!(
                        "subject \"{}\" has scans with conflicting labels",
                        e.subject
                    )));
                }
                _ => {
                    subject_labels.insert(&e.subject, e.label);
                }
            }
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<CohortManifest> {
        let text = fs::read_to_string(path)?;
        let m: CohortManifest = serde_json::from_str(&text)
            .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self)
            .map_err(|e| Error::format(format!("manifest serialization: {e}")))?;
        fs::write(path, text)?;
        Ok(())
    }

    /// Subjects with their labels, in sorted subject-id order.
    pub fn subjects(&self) -> BTreeMap<String, u8> {
        self.scans
            .iter()
            .map(|e| (e.subject.clone(), e.label))
            .collect()
    }

    pub fn scans_of_subjects<'a>(&'a self, subjects: &[String]) -> Vec<&'a ManifestEntry> {
        let wanted: std::collections::HashSet<&str> =
            subjects.iter().map(String::as_str).collect();
        self.scans
            .iter()
            .filter(|e| wanted.contains(e.subject.as_str()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn entry(subject: &str, scan: &str, label: u8) -> ManifestEntry {
        ManifestEntry {
            subject: subject.into(),
            scan: scan.into(),
            path: format!("{scan}.csv"),
            label,
        }
    }

    #[test]
    fn validates_unique_scans_and_consistent_labels() {
        assert!(CohortManifest::new(
            "c",
            vec![entry("s1", "a", 0), entry("s1", "b", 0), entry("s2", "c", 1)]
        )
        .is_ok());
        assert!(CohortManifest::new("c", vec![entry("s1", "a", 0), entry("s1", "a", 0)]).is_err());
        assert!(CohortManifest::new("c", vec![entry("s1", "a", 0), entry("s1", "b", 1)]).is_err());
        assert!(CohortManifest::new("c", vec![entry("s1", "a", 3)]).is_err());
    }

    #[test]
    fn json_round_trip_preserves_layout() {
        let m = CohortManifest::new("demo", vec![entry("s1", "a", 0), entry("s2", "b", 1)]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        m.save(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("\"cohort\""));
        assert!(text.contains("\"subject\""));
        let loaded = CohortManifest::load(&path).unwrap();
        assert_eq!(loaded, m);
    }
}
