//! Seeded synthetic cohort: two classes that share static functional
//! connectivity but differ in connectivity *dynamics*.
//!
//! Each scan's 28 signal ROIs follow a latent two-state Markov chain with
//! symmetric switching (each state occupies 50% of time in the long run),
//! drawing from one of two correlation templates. Class 0 switches slowly,
//! class 1 quickly; since both mix the same templates equally, full-scan
//! correlations agree across classes while windowed correlations swing far
//! more for the slow class. State-B draws use a larger per-ROI scale, which
//! makes windowed correlations convex in the window's state composition:
//! that gives window-level features a genuine (if weak) class signal for
//! the dynamic-FC baseline without separating the static averages.

use std::path::Path;

use rayon::prelude::*;

use crate::dfc::{
    normalize_scan, write_scan_csv, RoiScan, RoiSelection, N_ROIS, N_SELECTED, N_TIMEPOINTS,
};
use crate::error::{Error, Result};
use crate::harness::manifest::{CohortManifest, ManifestEntry};
use crate::rng::RngStream;
use crate::tensor::Tensor;

/// AR(1) smoothing coefficient applied to both signal and background rows.
const AR_RHO: f64 = 0.3;

/// Cohort construction parameters. `sigma_a`/`sigma_b` are correlation
/// matrices (unit diagonal, symmetric positive definite).
#[derive(Debug, Clone)]
pub struct CohortSpec {
    pub n_subjects_per_class: usize,
    /// Inclusive range of scans per subject.
    pub scans_min: usize,
    pub scans_max: usize,
    pub seed: u64,
    /// Mean state duration in samples for class 0 (slow switching).
    pub dwell_slow: f64,
    /// Mean state duration for class 1 (fast switching).
    pub dwell_fast: f64,
    /// Std of white observation noise added to signal rows.
    pub noise_std: f64,
    /// Std of the symmetric per-subject perturbation of the templates.
    pub subject_jitter_std: f64,
    /// Per-ROI scale of state-B draws relative to state A.
    pub state_b_scale: f64,
    pub sigma_a: Tensor,
    pub sigma_b: Tensor,
    pub roi_selection: RoiSelection,
}

impl Default for CohortSpec {
    fn default() -> CohortSpec {
        CohortSpec {
            n_subjects_per_class: 30,
            scans_min: 1,
            scans_max: 2,
            seed: 11,
            dwell_slow: 30.0,
            dwell_fast: 8.0,
            noise_std: 0.5,
            subject_jitter_std: 0.05,
            state_b_scale: 1.5,
            sigma_a: block_template(),
            sigma_b: interleaved_template(),
            roi_selection: RoiSelection::default28(),
        }
    }
}

impl CohortSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_subjects_per_class == 0 {
            return Err(Error::invalid("cohort needs at least one subject per class"));
        }
        if self.scans_min == 0 || self.scans_min > self.scans_max {
            return Err(Error::invalid(format!(
                "invalid scans-per-subject range {}..={}",
                self.scans_min, self.scans_max
            )));
        }
        if !(self.dwell_slow > self.dwell_fast && self.dwell_fast >= 2.0) {
            return Err(Error::invalid(format!(
                "dwell times must satisfy slow > fast >= 2, got {} / {}",
                self.dwell_slow, self.dwell_fast
            )));
        }
        for (name, t) in [("sigma_a", &self.sigma_a), ("sigma_b", &self.sigma_b)] {
            check_correlation_template(name, t)?;
            if cholesky(t).is_none() {
                return Err(Error::numeric(format!(
                    "{name} is not positive definite"
                )));
            }
        }
        Ok(())
    }
}

/// Two 14-ROI communities (0..14 and 14..28), within-community
/// correlation 0.6.
pub fn block_template() -> Tensor {
    let mut t = Tensor::zeros(&[N_SELECTED, N_SELECTED]);
    for i in 0..N_SELECTED {
        for j in 0..N_SELECTED {
            let same = (i < 14) == (j < 14);
            t.data_mut()[i * N_SELECTED + j] = if i == j {
                1.0
            } else if same {
                0.6
            } else {
                0.0
            };
        }
    }
    t
}

/// The complementary interleaving: even- and odd-indexed ROIs form the two
/// communities.
pub fn interleaved_template() -> Tensor {
    let mut t = Tensor::zeros(&[N_SELECTED, N_SELECTED]);
    for i in 0..N_SELECTED {
        for j in 0..N_SELECTED {
            let same = i % 2 == j % 2;
            t.data_mut()[i * N_SELECTED + j] = if i == j {
                1.0
            } else if same {
                0.6
            } else {
                0.0
            };
        }
    }
    t
}

fn check_correlation_template(name: &str, t: &Tensor) -> Result<()> {
    if t.shape() != [N_SELECTED, N_SELECTED] {
        return Err(Error::invalid(format!(
            "{name} must be {N_SELECTED}x{N_SELECTED}, got {:?}",
            t.shape()
        )));
    }
    let d = t.data();
    for i in 0..N_SELECTED {
        if (d[i * N_SELECTED + i] - 1.0).abs() > 1e-12 {
            return Err(Error::invalid(format!("{name} must have a unit diagonal")));
        }
        for j in 0..N_SELECTED {
            if (d[i * N_SELECTED + j] - d[j * N_SELECTED + i]).abs() > 1e-12 {
                return Err(Error::invalid(format!("{name} must be symmetric")));
            }
        }
    }
    Ok(())
}

/// Lower-triangular Cholesky factor, or None if the matrix is not positive
/// definite.
fn cholesky(a: &Tensor) -> Option<Vec<f64>> {
    let n = a.shape()[0];
    let src = a.data();
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let mut sum = src[i * n + j];
            for k in 0..j {
                sum -= l[i * n + k] * l[j * n + k];
            }
            if i == j {
                if sum <= 1e-12 {
                    return None;
                }
                l[i * n + i] = sum.sqrt();
            } else {
                l[i * n + j] = sum / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Symmetric jitter with zero diagonal, then positive definiteness restored
/// (if lost) by diagonal loading of 0.05 followed by unit-diagonal
/// renormalization.
fn jittered_template(base: &Tensor, std: f64, rng: &mut RngStream) -> Result<(Tensor, Vec<f64>)> {
    let n = N_SELECTED;
    let mut t = base.clone();
    if std > 0.0 {
        for i in 0..n {
            for j in (i + 1)..n {
                let e = std * rng.normal();
                t.data_mut()[i * n + j] += e;
                t.data_mut()[j * n + i] += e;
            }
        }
    }
    for _ in 0..64 {
        if let Some(l) = cholesky(&t) {
            return Ok((t, l));
        }
        // Load the diagonal and renormalize back to a correlation matrix.
        for i in 0..n {
            t.data_mut()[i * n + i] += 0.05;
        }
        let scale = 1.0 / 1.05;
        t.scale(scale);
        for i in 0..n {
            t.data_mut()[i * n + i] = 1.0;
        }
    }
    Err(Error::numeric(
        "template not positive definite after repeated diagonal loading".to_string(),
    ))
}

/// One subject: a class label and its personally jittered templates. All of
/// a subject's scans share these templates.
#[derive(Debug, Clone)]
pub struct SyntheticSubject {
    pub subject_id: String,
    pub label: u8,
    pub n_scans: usize,
    sigma_a: Tensor,
    sigma_b: Tensor,
    chol_a: Vec<f64>,
    chol_b: Vec<f64>,
}

impl SyntheticSubject {
    pub fn sigma_a(&self) -> &Tensor {
        &self.sigma_a
    }

    pub fn sigma_b(&self) -> &Tensor {
        &self.sigma_b
    }
}

/// Builds the subject roster deterministically from the spec seed: balanced
/// classes, per-subject jittered templates, scans_min..=scans_max scans.
pub fn build_subjects(spec: &CohortSpec) -> Result<Vec<SyntheticSubject>> {
    spec.validate()?;
    let root = RngStream::new(spec.seed);
    let total = 2 * spec.n_subjects_per_class;
    let mut subjects = Vec::with_capacity(total);
    for idx in 0..total {
        let label = (idx >= spec.n_subjects_per_class) as u8;
        let mut rng = root.substream(idx as u64);
        let (sigma_a, chol_a) = jittered_template(&spec.sigma_a, spec.subject_jitter_std, &mut rng)?;
        let (sigma_b, chol_b) = jittered_template(&spec.sigma_b, spec.subject_jitter_std, &mut rng)?;
        let n_scans = spec.scans_min + rng.below(spec.scans_max - spec.scans_min + 1);
        subjects.push(SyntheticSubject {
            subject_id: format!("sub{idx:03}"),
            label,
            n_scans,
            sigma_a,
            sigma_b,
            chol_a,
            chol_b,
        });
    }
    Ok(subjects)
}

/// Probability of leaving the current state per sample, for a mean dwell.
pub fn switch_probability(dwell: f64) -> f64 {
    1.0 / dwell
}

/// Simulates the latent two-state chain for `len` samples.
pub fn simulate_state_chain(dwell: f64, len: usize, rng: &mut RngStream) -> Vec<u8> {
    let p_switch = switch_probability(dwell);
    let mut states = Vec::with_capacity(len);
    let mut s = rng.below(2) as u8;
    for _ in 0..len {
        states.push(s);
        if rng.uniform() < p_switch {
            s ^= 1;
        }
    }
    states
}

/// Generates one scan for a subject: latent switching chain, correlated
/// Gaussian draws through the jittered template's Cholesky factor (state B
/// scaled by `state_b_scale`), AR(1) smoothing, white observation noise on
/// the 28 signal rows, independent AR(1) noise on the other 62 rows, then
/// per-row normalization to [-1, 1].
pub fn generate_scan(
    subject: &SyntheticSubject,
    scan_id: &str,
    spec: &CohortSpec,
    rng: &mut RngStream,
) -> Result<RoiScan> {
    let dwell = if subject.label == 0 {
        spec.dwell_slow
    } else {
        spec.dwell_fast
    };
    let states = simulate_state_chain(dwell, N_TIMEPOINTS, rng);

    let n = N_SELECTED;
    let smooth = (1.0 - AR_RHO * AR_RHO).sqrt();
    let mut raw = Tensor::zeros(&[N_ROIS, N_TIMEPOINTS]);

    // Signal rows.
    let mut prev = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut draw = vec![0.0; n];
    for (t, &state) in states.iter().enumerate() {
        for v in z.iter_mut() {
            *v = rng.normal();
        }
        let (chol, scale) = if state == 0 {
            (&subject.chol_a, 1.0)
        } else {
            (&subject.chol_b, spec.state_b_scale)
        };
        for i in 0..n {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += chol[i * n + k] * z[k];
            }
            draw[i] = scale * acc;
        }
        for i in 0..n {
            let s = if t == 0 {
                draw[i]
            } else {
                AR_RHO * prev[i] + smooth * draw[i]
            };
            prev[i] = s;
            let roi = spec.roi_selection.indices()[i];
            raw.data_mut()[roi * N_TIMEPOINTS + t] = s + spec.noise_std * rng.normal();
        }
    }

    // Background rows: independent AR(1) with unit innovations.
    let selected: std::collections::HashSet<usize> =
        spec.roi_selection.indices().iter().copied().collect();
    for roi in 0..N_ROIS {
        if selected.contains(&roi) {
            continue;
        }
        let mut prev = 0.0;
        for t in 0..N_TIMEPOINTS {
            let v = if t == 0 {
                rng.normal()
            } else {
                AR_RHO * prev + smooth * rng.normal()
            };
            prev = v;
            raw.data_mut()[roi * N_TIMEPOINTS + t] = v;
        }
    }

    RoiScan::new(
        subject.subject_id.clone(),
        scan_id,
        Some(subject.label),
        normalize_scan(&raw)?,
    )
}

/// Generates every scan of the cohort in memory (parallel across subjects,
/// deterministic via per-scan substreams).
pub fn generate_cohort_scans(spec: &CohortSpec) -> Result<Vec<RoiScan>> {
    let subjects = build_subjects(spec)?;
    let root = RngStream::new(spec.seed);
    let scans: Vec<Vec<RoiScan>> = subjects
        .par_iter()
        .enumerate()
        .map(|(idx, subject)| {
            (0..subject.n_scans)
                .map(|k| {
                    let mut rng = root.substream(1_000_000 + (idx * 100 + k) as u64);
                    let scan_id = format!("{}_r{k}", subject.subject_id);
                    generate_scan(subject, &scan_id, spec, &mut rng)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(scans.into_iter().flatten().collect())
}

/// Writes scan CSVs under `out_dir/scans/` and a manifest at
/// `out_dir/manifest.json`; returns the manifest.
pub fn generate_cohort(spec: &CohortSpec, out_dir: &Path) -> Result<CohortManifest> {
    let scans_dir = out_dir.join("scans");
    std::fs::create_dir_all(&scans_dir)?;
    let scans = generate_cohort_scans(spec)?;
    let mut entries = Vec::with_capacity(scans.len());
    for scan in &scans {
        let file = scans_dir.join(format!("{}.csv", scan.scan_id));
        write_scan_csv(&file, scan.data())?;
        entries.push(ManifestEntry {
            subject: scan.subject_id.clone(),
            scan: scan.scan_id.clone(),
            path: file.to_string_lossy().into_owned(),
            label: scan.label.expect("synthetic scans are labelled"),
        });
    }
    let manifest = CohortManifest::new(format!("synthetic-{}", spec.seed), entries)?;
    manifest.save(&out_dir.join("manifest.json"))?;
    Ok(manifest)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn templates_are_valid_and_positive_definite() {
        let spec = CohortSpec::default();
        spec.validate().unwrap();
        assert!(cholesky(&spec.sigma_a).is_some());
        assert!(cholesky(&spec.sigma_b).is_some());
    }

    #[test]
    fn state_occupancy_is_balanced() {
        // Long-run occupancy of each state is 1/2 for the symmetric chain.
        for dwell in [8.0, 30.0] {
            let mut rng = RngStream::new(17);
            let states = simulate_state_chain(dwell, 10_000, &mut rng);
            let ones: usize = states.iter().map(|&s| s as usize).sum();
            let frac = ones as f64 / states.len() as f64;
            assert!((frac - 0.5).abs() < 0.05, "dwell {dwell}: occupancy {frac}");
        }
    }

    #[test]
    fn scan_generation_is_deterministic_and_valid() {
        let spec = CohortSpec::default();
        let subjects = build_subjects(&spec).unwrap();
        let mut rng1 = RngStream::new(42);
        let mut rng2 = RngStream::new(42);
        let a = generate_scan(&subjects[0], "s", &spec, &mut rng1).unwrap();
        let b = generate_scan(&subjects[0], "s", &spec, &mut rng2).unwrap();
        assert_eq!(a.data().data(), b.data().data());
        assert_eq!(a.data().shape(), &[N_ROIS, N_TIMEPOINTS]);
        assert!(a.data().max_abs() <= 1.0);
    }

    #[test]
    fn non_positive_definite_template_is_a_numeric_error() {
        let mut spec = CohortSpec::default();
        // An infeasible correlation pattern: r(0,1) = -0.999 while both
        // correlate 0.999 with everything else.
        let n = N_SELECTED;
        let mut t = Tensor::zeros(&[n, n]);
        for i in 0..n {
            for j in 0..n {
                t.data_mut()[i * n + j] = if i == j { 1.0 } else { 0.999 };
            }
        }
        t.data_mut()[1] = -0.999;
        t.data_mut()[n] = -0.999;
        spec.sigma_a = t;
        spec.subject_jitter_std = 0.0;
        let err = build_subjects(&spec).unwrap_err();
        assert!(matches!(err, Error::Numeric(_)), "{err}");
    }

    #[test]
    fn subjects_get_scan_counts_within_range() {
        let spec = CohortSpec {
            scans_min: 1,
            scans_max: 3,
            ..CohortSpec::default()
        };
        let subjects = build_subjects(&spec).unwrap();
        assert_eq!(subjects.len(), 60);
        assert!(subjects.iter().all(|s| (1..=3).contains(&s.n_scans)));
        assert!(subjects.iter().any(|s| s.n_scans > 1));
        let class0 = subjects.iter().filter(|s| s.label == 0).count();
        assert_eq!(class0, 30);
    }

    #[test]
    fn jitter_produces_distinct_but_valid_subject_templates() {
        let spec = CohortSpec::default();
        let subjects = build_subjects(&spec).unwrap();
        let a0 = subjects[0].sigma_a().data();
        let a1 = subjects[1].sigma_a().data();
        assert_ne!(a0, a1);
        for s in subjects.iter().take(5) {
            assert!(cholesky(s.sigma_a()).is_some());
            assert!(cholesky(s.sigma_b()).is_some());
        }
    }
}
