//! Subject-wise stratified fold construction. Folds partition *subjects*,
//! never scans, so no person's data straddles train and test.

use crate::error::{Error, Result};
use crate::harness::manifest::CohortManifest;
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct FoldPlan {
    /// Subject ids per fold.
    pub folds: Vec<Vec<String>>,
}

/// One cross-validation round: fold r is the test set, fold (r + 1) mod n
/// the validation set (hyper-parameter selection), the rest train.
#[derive(Debug, Clone)]
pub struct FoldRound {
    pub round: usize,
    pub train: Vec<String>,
    pub validation: Vec<String>,
    pub test: Vec<String>,
}

impl FoldPlan {
    pub fn n_folds(&self) -> usize {
        self.folds.len()
    }

    pub fn rounds(&self) -> Vec<FoldRound> {
        let n = self.folds.len();
        (0..n)
            .map(|r| {
                let val = (r + 1) % n;
                let mut train = Vec::new();
                for (k, fold) in self.folds.iter().enumerate() {
                    if k != r && k != val {
                        train.extend(fold.iter().cloned());
                    }
                }
                FoldRound {
                    round: r,
                    train,
                    validation: self.folds[val].clone(),
                    test: self.folds[r].clone(),
                }
            })
            .collect()
    }
}

/// Shuffles subjects by seed, stratifies by class, and deals them
/// round-robin into `n_folds` folds.
pub fn split_subjectwise(
    manifest: &CohortManifest,
    n_folds: usize,
    seed: u64,
) -> Result<FoldPlan> {
    if n_folds < 2 {
        return Err(Error::invalid("need at least 2 folds"));
    }
    let subjects = manifest.subjects(); // sorted by id
    let mut by_class: [Vec<String>; 2] = [Vec::new(), Vec::new()];
    for (id, label) in subjects {
        by_class[label as usize].push(id);
    }
    for (label, class) in by_class.iter().enumerate() {
        if class.len() < n_folds {
            return Err(Error::invalid(format!(
                "class {label} has {} subjects, need at least {n_folds} for {n_folds}-fold subject-wise splitting",
                class.len()
            )));
        }
    }
    let mut rng = RngStream::new(seed);
    let mut folds = vec![Vec::new(); n_folds];
    for class in by_class.iter_mut() {
        rng.shuffle(class);
        for (i, id) in class.drain(..).enumerate() {
            folds[i % n_folds].push(id);
        }
    }
    Ok(FoldPlan { folds })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::manifest::ManifestEntry;

    fn toy_manifest(n_per_class: usize, scans_per_subject: usize) -> CohortManifest {
        let mut scans = Vec::new();
        for c in 0..2u8 {
            for s in 0..n_per_class {
                let subject = format!("c{c}s{s:02}");
                for k in 0..scans_per_subject {
                    scans.push(ManifestEntry {
                        subject: subject.clone(),
                        scan: format!("{subject}_r{k}"),
                        path: String::new(),
                        label: c,
                    });
                }
            }
        }
        CohortManifest::new("toy", scans).unwrap()
    }

    #[test]
    fn folds_partition_subjects() {
        let m = toy_manifest(13, 3);
        let plan = split_subjectwise(&m, 5, 7).unwrap();
        let mut all: Vec<String> = plan.folds.iter().flatten().cloned().collect();
        all.sort();
        let mut expect: Vec<String> = m.subjects().keys().cloned().collect();
        expect.sort();
        assert_eq!(all, expect, "each subject in exactly one fold");
    }

    #[test]
    fn fold_sizes_differ_by_at_most_one_per_class() {
        let m = toy_manifest(13, 1);
        let plan = split_subjectwise(&m, 5, 3).unwrap();
        for class in 0..2 {
            let sizes: Vec<usize> = plan
                .folds
                .iter()
                .map(|f| {
                    f.iter()
                        .filter(|s| s.starts_with(&format!("c{class}")))
                        .count()
                })
                .collect();
            let min = sizes.iter().min().unwrap();
            let max = sizes.iter().max().unwrap();
            assert!(max - min <= 1, "class {class} sizes {sizes:?}");
        }
    }

    #[test]
    fn each_subject_tests_exactly_once() {
        let m = toy_manifest(7, 2);
        let plan = split_subjectwise(&m, 5, 1).unwrap();
        let rounds = plan.rounds();
        assert_eq!(rounds.len(), 5);
        for subject in m.subjects().keys() {
            let test_count = rounds
                .iter()
                .filter(|r| r.test.contains(subject))
                .count();
            assert_eq!(test_count, 1, "{subject}");
        }
        // Roles partition the subjects in every round.
        for r in &rounds {
            let total = r.train.len() + r.validation.len() + r.test.len();
            assert_eq!(total, m.subjects().len());
        }
    }

    #[test]
    fn subject_scans_stay_together() {
        let m = toy_manifest(6, 3);
        let plan = split_subjectwise(&m, 5, 9).unwrap();
        for round in plan.rounds() {
            let test_scans = m.scans_of_subjects(&round.test);
            for e in test_scans {
                assert!(round.test.contains(&e.subject));
                assert!(!round.train.contains(&e.subject));
            }
        }
    }

    #[test]
    fn too_few_subjects_rejected() {
        let m = toy_manifest(4, 1);
        assert!(matches!(
            split_subjectwise(&m, 5, 0),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = toy_manifest(11, 2);
        let a = split_subjectwise(&m, 5, 42).unwrap();
        let b = split_subjectwise(&m, 5, 42).unwrap();
        assert_eq!(a.folds, b.folds);
        let c = split_subjectwise(&m, 5, 43).unwrap();
        assert_ne!(a.folds, c.folds);
    }
}
