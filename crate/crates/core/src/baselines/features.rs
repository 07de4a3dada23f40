//! Feature extraction for the comparison methods: full-scan ("static")
//! correlations, rectangular-window ("dynamic") correlations, and Fisher
//! score feature selection.

use crate::dfc::{RoiScan, N_ROIS, N_TIMEPOINTS};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// 90 choose 2.
pub const SFC_DIM: usize = N_ROIS * (N_ROIS - 1) / 2;
/// Rectangular window width for the dynamic features (in samples).
pub const DFC_WINDOW: usize = 30;
/// Window stride for the dynamic features.
pub const DFC_STRIDE: usize = 5;
/// Number of windows used. The 130-sample series admits 21 such windows;
/// only the first 20 are indexed (w = 1..=20).
pub const DFC_N_WINDOWS: usize = 20;
pub const DFC_DIM: usize = SFC_DIM * DFC_N_WINDOWS;

/// Identifier of one feature dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FeatureId {
    /// Upper-triangular ROI pair (i < j) of a full-scan correlation.
    Pair { i: u16, j: u16 },
    /// ROI pair within one rectangular window (0-based window index).
    PairWindow { i: u16, j: u16, window: u16 },
}

/// Feature identifiers, one per dimension, shared by every scan's vector.
#[derive(Debug, Clone)]
pub struct FeatureSchema {
    pub ids: Vec<FeatureId>,
}

pub fn sfc_schema() -> FeatureSchema {
    let mut ids = Vec::with_capacity(SFC_DIM);
    for i in 0..N_ROIS {
        for j in (i + 1)..N_ROIS {
            ids.push(FeatureId::Pair {
                i: i as u16,
                j: j as u16,
            });
        }
    }
    FeatureSchema { ids }
}

pub fn dfc_schema() -> FeatureSchema {
    let mut ids = Vec::with_capacity(DFC_DIM);
    for window in 0..DFC_N_WINDOWS {
        for i in 0..N_ROIS {
            for j in (i + 1)..N_ROIS {
                ids.push(FeatureId::PairWindow {
                    i: i as u16,
                    j: j as u16,
                    window: window as u16,
                });
            }
        }
    }
    FeatureSchema { ids }
}

/// Plain (unweighted) Pearson correlation of the rows of `x` over columns
/// [start, start + len). Constant rows correlate 0 off-diagonal.
fn pearson_over(x: &Tensor, start: usize, len: usize) -> Vec<f64> {
    let cols = x.shape()[1];
    let rows = x.shape()[0];
    let inv = 1.0 / len as f64;
    let mut centered = vec![0.0; rows * len];
    let mut sigma = vec![0.0; rows];
    for r in 0..rows {
        let seg = &x.data()[r * cols + start..r * cols + start + len];
        let mean: f64 = seg.iter().sum::<f64>() * inv;
        let c = &mut centered[r * len..(r + 1) * len];
        for (dst, v) in c.iter_mut().zip(seg) {
            *dst = v - mean;
        }
        let var: f64 = c.iter().map(|d| d * d).sum::<f64>() * inv;
        sigma[r] = if var < 1e-24 { 0.0 } else { var.sqrt() };
    }
    let mut out = Vec::with_capacity(rows * (rows - 1) / 2);
    for i in 0..rows {
        for j in (i + 1)..rows {
            if sigma[i] == 0.0 || sigma[j] == 0.0 {
                out.push(0.0);
                continue;
            }
            let a = &centered[i * len..(i + 1) * len];
            let b = &centered[j * len..(j + 1) * len];
            let cov: f64 = a.iter().zip(b).map(|(p, q)| p * q).sum::<f64>() * inv;
            out.push((cov / (sigma[i] * sigma[j])).clamp(-1.0, 1.0));
        }
    }
    out
}

/// Static features: the 4005 upper-triangular full-scan Pearson
/// coefficients over all 90 ROIs.
pub fn sfc_features(scan: &RoiScan) -> Vec<f64> {
    pearson_over(scan.data(), 0, N_TIMEPOINTS)
}

/// Dynamic features: rectangular windows of width 30, stride 5, first 20
/// windows; 4005 coefficients per window, 80100 in total. Window w covers
/// columns [5w, 5w + 30).
pub fn dfc_features(scan: &RoiScan) -> Vec<f64> {
    let mut out = Vec::with_capacity(DFC_DIM);
    for w in 0..DFC_N_WINDOWS {
        out.extend(pearson_over(scan.data(), w * DFC_STRIDE, DFC_WINDOW));
    }
    out
}

/// Fisher score per feature from training data only:
/// (mu0 - mu1)^2 / (var0 + var1 + 1e-12), population variances.
/// Returns the indices of the top-k features, ties broken by lower index.
pub fn fisher_select(rows: &[Vec<f64>], labels: &[u8], k: usize) -> Result<Vec<usize>> {
    if rows.is_empty() || rows.len() != labels.len() {
        return Err(Error::invalid(format!(
            "fisher_select: {} rows vs {} labels",
            rows.len(),
            labels.len()
        )));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::invalid("fisher_select: ragged feature rows"));
    }
    if k > dim {
        return Err(Error::invalid(format!(
            "fisher_select: k {k} exceeds feature dimension {dim}"
        )));
    }
    let n0 = labels.iter().filter(|&&l| l == 0).count();
    let n1 = labels.len() - n0;
    if n0 == 0 || n1 == 0 {
        return Err(Error::invalid(
            "fisher_select requires both classes in the training data".to_string(),
        ));
    }

    let mut scores = vec![0.0_f64; dim];
    let mut mean0 = vec![0.0_f64; dim];
    let mut mean1 = vec![0.0_f64; dim];
    for (row, &label) in rows.iter().zip(labels) {
        let acc = if label == 0 { &mut mean0 } else { &mut mean1 };
        for (a, v) in acc.iter_mut().zip(row) {
            *a += v;
        }
    }
    for m in mean0.iter_mut() {
        *m /= n0 as f64;
    }
    for m in mean1.iter_mut() {
        *m /= n1 as f64;
    }
    let mut var0 = vec![0.0_f64; dim];
    let mut var1 = vec![0.0_f64; dim];
    for (row, &label) in rows.iter().zip(labels) {
        let (mean, var) = if label == 0 {
            (&mean0, &mut var0)
        } else {
            (&mean1, &mut var1)
        };
        for ((v, m), acc) in row.iter().zip(mean).zip(var.iter_mut()) {
            let d = v - m;
            *acc += d * d;
        }
    }
    for d in 0..dim {
        let v0 = var0[d] / n0 as f64;
        let v1 = var1[d] / n1 as f64;
        let gap = mean0[d] - mean1[d];
        scores[d] = gap * gap / (v0 + v1 + 1e-12);
    }

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("fisher scores are finite")
            .then(a.cmp(&b))
    });
    order.truncate(k);
    Ok(order)
}

/// Standardization statistics fit on training data only.
#[derive(Debug, Clone)]
pub struct Standardizer {
    mean: Vec<f64>,
    std: Vec<f64>,
}

impl Standardizer {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Standardizer> {
        if rows.is_empty() {
            return Err(Error::invalid("standardizer: empty training data"));
        }
        let dim = rows[0].len();
        let n = rows.len() as f64;
        let mut mean = vec![0.0; dim];
        for row in rows {
            for (m, v) in mean.iter_mut().zip(row) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= n;
        }
        let mut std = vec![0.0; dim];
        for row in rows {
            for ((s, v), m) in std.iter_mut().zip(row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in std.iter_mut() {
            *s = (*s / n).sqrt().max(1e-12);
        }
        Ok(Standardizer { mean, std })
    }

    pub fn apply(&self, row: &[f64]) -> Vec<f64> {
        row.iter()
            .zip(&self.mean)
            .zip(&self.std)
            .map(|((v, m), s)| (v - m) / s)
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dfc::{build_taper, normalize_scan, weighted_correlation};
    use crate::rng::RngStream;

    fn random_scan(seed: u64) -> RoiScan {
        let mut rng = RngStream::new(seed);
        let mut raw = Tensor::zeros(&[N_ROIS, N_TIMEPOINTS]);
        for v in raw.data_mut() {
            *v = rng.normal();
        }
        RoiScan::new("s", "x", Some(0), normalize_scan(&raw).unwrap()).unwrap()
    }

    #[test]
    fn sfc_dimension_and_range() {
        assert_eq!(SFC_DIM, 4005);
        let scan = random_scan(1);
        let f = sfc_features(&scan);
        assert_eq!(f.len(), 4005);
        assert!(f.iter().all(|v| (-1.0..=1.0).contains(v)));
        let schema = sfc_schema();
        assert_eq!(schema.ids.len(), 4005);
        let unique: std::collections::HashSet<_> = schema.ids.iter().collect();
        assert_eq!(unique.len(), 4005, "identifiers unique");
        // Self-pairs excluded.
        assert!(schema
            .ids
            .iter()
            .all(|id| matches!(id, FeatureId::Pair { i, j } if i < j)));
    }

    #[test]
    fn sfc_matches_uniform_window_weighted_correlation() {
        // Consistency oracle: a uniform full-length window through the
        // tapered-correlation machinery must reproduce plain Pearson.
        let scan = random_scan(2);
        let f = sfc_features(&scan);
        let uniform = vec![1.0 / N_TIMEPOINTS as f64; N_TIMEPOINTS];
        let c = weighted_correlation(scan.data(), &uniform, 0).unwrap();
        let mut k = 0;
        for i in 0..N_ROIS {
            for j in (i + 1)..N_ROIS {
                let want = c.data()[i * N_ROIS + j];
                assert!((f[k] - want).abs() < 1e-12, "pair ({i},{j})");
                k += 1;
            }
        }
        // Sanity: the taper itself is NOT uniform, so this is a real check.
        assert!(build_taper().weights().iter().any(|w| (w - 0.05).abs() > 1e-6));
    }

    #[test]
    fn dfc_dimension_and_window_indexing() {
        assert_eq!(DFC_DIM, 80100);
        let scan = random_scan(3);
        let f = dfc_features(&scan);
        assert_eq!(f.len(), 80100);
        // Window w covers columns [5w, 5w + 30): check window 3 against a
        // direct computation.
        let w = 3;
        let expect = pearson_over(scan.data(), w * DFC_STRIDE, DFC_WINDOW);
        assert_eq!(&f[w * SFC_DIM..(w + 1) * SFC_DIM], &expect[..]);
        // 130 samples admit 21 windows; exactly the first 20 are used.
        assert_eq!((N_TIMEPOINTS - DFC_WINDOW) / DFC_STRIDE + 1, 21);
        assert_eq!(DFC_N_WINDOWS, 20);
        let last_start = (DFC_N_WINDOWS - 1) * DFC_STRIDE;
        assert!(last_start + DFC_WINDOW <= N_TIMEPOINTS);
    }

    #[test]
    fn fisher_score_formula() {
        // mu = (0, 1), var = (0.5, 0.5) -> score 1 / (1 + 1e-12).
        // Class 0 samples {-1, 1} with mean 0; class 1 samples {0, 2} with
        // mean 1; population variances 1 each -> score 1/2... use exact
        // construction instead: values chosen so var0 = var2 = 0.5.
        let s = 0.5_f64.sqrt();
        let rows = vec![vec![-s], vec![s], vec![1.0 - s], vec![1.0 + s]];
        let labels = vec![0, 0, 1, 1];
        let idx = fisher_select(&rows, &labels, 1).unwrap();
        assert_eq!(idx, vec![0]);
        // Recompute the score by hand.
        let score = (0.0_f64 - 1.0).powi(2) / (0.5 + 0.5 + 1e-12);
        assert!((score - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fisher_top1_matches_bruteforce_argmax() {
        let mut rng = RngStream::new(5);
        let n = 40;
        let dim = 50;
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for k in 0..n {
            let label = (k % 2) as u8;
            let mut row = Vec::with_capacity(dim);
            for d in 0..dim {
                let shift = if d == 17 { label as f64 * 2.0 } else { 0.0 };
                row.push(rng.normal() + shift);
            }
            rows.push(row);
            labels.push(label);
        }
        // Brute-force oracle: compute every score directly and take argmax.
        let mut best = (0, f64::MIN);
        for d in 0..dim {
            let c0: Vec<f64> = rows
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == 0)
                .map(|(r, _)| r[d])
                .collect();
            let c1: Vec<f64> = rows
                .iter()
                .zip(&labels)
                .filter(|(_, &l)| l == 1)
                .map(|(r, _)| r[d])
                .collect();
            let m0 = c0.iter().sum::<f64>() / c0.len() as f64;
            let m1 = c1.iter().sum::<f64>() / c1.len() as f64;
            let v0 = c0.iter().map(|v| (v - m0) * (v - m0)).sum::<f64>() / c0.len() as f64;
            let v1 = c1.iter().map(|v| (v - m1) * (v - m1)).sum::<f64>() / c1.len() as f64;
            let s = (m0 - m1) * (m0 - m1) / (v0 + v1 + 1e-12);
            if s > best.1 {
                best = (d, s);
            }
        }
        assert_eq!(fisher_select(&rows, &labels, 1).unwrap()[0], best.0);
        assert_eq!(best.0, 17);
    }

    #[test]
    fn constant_feature_never_beats_discriminative() {
        let rows = vec![
            vec![5.0, 0.1],
            vec![5.0, -0.1],
            vec![5.0, 1.9],
            vec![5.0, 2.1],
        ];
        let labels = vec![0, 0, 1, 1];
        let idx = fisher_select(&rows, &labels, 1).unwrap();
        assert_eq!(idx, vec![0 + 1]);
    }

    #[test]
    fn single_class_rejected() {
        let rows = vec![vec![1.0], vec![2.0]];
        assert!(matches!(
            fisher_select(&rows, &[0, 0], 1),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn fisher_invariant_under_shared_affine_transform() {
        let mut rng = RngStream::new(9);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..8).map(|_| rng.normal()).collect())
            .collect();
        let labels: Vec<u8> = (0..30).map(|k| (k % 2) as u8).collect();
        let base = fisher_select(&rows, &labels, 8).unwrap();
        let transformed: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.iter().map(|v| 3.0 * v - 7.0).collect())
            .collect();
        let moved = fisher_select(&transformed, &labels, 8).unwrap();
        assert_eq!(base, moved);
    }
}
