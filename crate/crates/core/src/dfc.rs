//! Dynamic functional connectivity extraction.
//!
//! Ingests 90-ROI x 130-time-step matrices (one per scan, values normalized
//! to [-1, 1]) and produces the model input: 56 tapered-window correlation
//! maps over a fixed 28-ROI subset, sliding in steps of 2 samples.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const N_ROIS: usize = 90;
pub const N_TIMEPOINTS: usize = 130;
pub const N_SELECTED: usize = 28;
pub const WINDOW_LEN: usize = 20;
pub const WINDOW_STRIDE: usize = 2;
/// (130 - 20) / 2 + 1
pub const N_WINDOWS: usize = 56;

/// Rows with weighted variance below this are treated as constant: their
/// off-diagonal correlations are 0 and diagonal stays 1.
const VARIANCE_FLOOR: f64 = 1e-24;

// ---------------------------------------------------------------------------
// Types

/// One subject scan: 90 ROI time courses of 130 normalized samples.
#[derive(Debug, Clone)]
pub struct RoiScan {
    pub subject_id: String,
    pub scan_id: String,
    pub label: Option<u8>,
    data: Tensor, // [90, 130]
}

impl RoiScan {
    pub fn new(
        subject_id: impl Into<String>,
        scan_id: impl Into<String>,
        label: Option<u8>,
        data: Tensor,
    ) -> Result<RoiScan> {
        if data.shape() != [N_ROIS, N_TIMEPOINTS] {
            return Err(Error::format(format!(
                "a scan must be {N_ROIS} rows x {N_TIMEPOINTS} columns, got {:?}",
                data.shape()
            )));
        }
        data.check_finite("scan data")?;
        if data.max_abs() > 1.0 + 1e-12 {
            return Err(Error::format(
                "scan values must lie in [-1, 1] after normalization".to_string(),
            ));
        }
        Ok(RoiScan {
            subject_id: subject_id.into(),
            scan_id: scan_id.into(),
            label,
            data,
        })
    }

    pub fn data(&self) -> &Tensor {
        &self.data
    }
}

/// 28 distinct, sorted ROI indices in [0, 90).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoiSelection {
    indices: Vec<usize>,
}

impl RoiSelection {
    pub fn new(mut indices: Vec<usize>) -> Result<RoiSelection> {
        indices.sort_unstable();
        if indices.len() != N_SELECTED {
            return Err(Error::invalid(format!(
                "ROI selection must have {N_SELECTED} indices, got {}",
                indices.len()
            )));
        }
        if indices.windows(2).any(|p| p[0] == p[1]) {
            return Err(Error::invalid("ROI selection has duplicate indices"));
        }
        if *indices.last().unwrap() >= N_ROIS {
            return Err(Error::invalid(format!(
                "ROI index {} out of range [0, {N_ROIS})",
                indices.last().unwrap()
            )));
        }
        Ok(RoiSelection { indices })
    }

    /// The default 28-region subset, by 0-based index into the 90 cerebral
    /// AAL regions: bilateral superior/middle/inferior-triangular frontal,
    /// orbital and medial frontal (12), hippocampus, parahippocampal gyrus
    /// and amygdala (6), and the superior/middle/inferior temporal gyri with
    /// both temporal poles (10).
    pub fn default28() -> RoiSelection {
        RoiSelection {
            indices: vec![
                2, 3, 4, 5, 6, 7, 12, 13, 22, 23, 24, 25, // frontal
                36, 37, 38, 39, 40, 41, // hippocampal complex
                80, 81, 82, 83, 84, 85, 86, 87, 88, 89, // temporal
            ],
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

/// Tapered window: a length-10 rectangle convolved with a Gaussian
/// (sigma = 4 samples, truncated at radius 5), normalized to sum 1.
/// Length 10 + 11 - 1 = 20.
#[derive(Debug, Clone)]
pub struct Taper {
    weights: Vec<f64>,
}

impl Taper {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// One scan's extracted correlation dynamics: 56 consecutive 28x28 frames.
#[derive(Debug, Clone)]
pub struct DfcSequence {
    pub subject_id: String,
    pub scan_id: String,
    pub label: Option<u8>,
    pub frames: Vec<Tensor>, // 56 x [28, 28]
}

impl DfcSequence {
    pub fn new(
        subject_id: impl Into<String>,
        scan_id: impl Into<String>,
        label: Option<u8>,
        frames: Vec<Tensor>,
    ) -> Result<DfcSequence> {
        if frames.len() != N_WINDOWS {
            return Err(Error::invalid(format!(
                "a sequence must have {N_WINDOWS} frames, got {}",
                frames.len()
            )));
        }
        for (k, f) in frames.iter().enumerate() {
            if f.shape() != [N_SELECTED, N_SELECTED] {
                return Err(Error::shape(format!(
                    "frame {k} has shape {:?}, expected [{N_SELECTED}, {N_SELECTED}]",
                    f.shape()
                )));
            }
        }
        Ok(DfcSequence {
            subject_id: subject_id.into(),
            scan_id: scan_id.into(),
            label,
            frames,
        })
    }
}

// ---------------------------------------------------------------------------
// Operations

/// Builds the tapered window (see [`Taper`]).
pub fn build_taper() -> Taper {
    const RECT_LEN: usize = 10;
    const SIGMA: f64 = 4.0;
    const RADIUS: i64 = 5;
    let gauss: Vec<f64> = (-RADIUS..=RADIUS)
        .map(|k| (-((k * k) as f64) / (2.0 * SIGMA * SIGMA)).exp())
        .collect();
    let out_len = RECT_LEN + gauss.len() - 1;
    let mut weights = vec![0.0; out_len];
    for r in 0..RECT_LEN {
        for (g, gv) in gauss.iter().enumerate() {
            weights[r + g] += gv;
        }
    }
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    Taper { weights }
}

/// Start offsets of every sliding window over a series of length `len`.
pub fn window_starts(len: usize, window: usize, stride: usize) -> Vec<usize> {
    if window > len {
        return Vec::new();
    }
    (0..=len - window).step_by(stride).collect()
}

/// Weighted Pearson correlation of the rows of `x` over columns
/// [start, start + weights.len()): weighted means removed, weighted
/// covariance normalized by weighted standard deviations. Constant rows get
/// zero off-diagonal correlation and a unit diagonal.
pub fn weighted_correlation(x: &Tensor, weights: &[f64], start: usize) -> Result<Tensor> {
    let (rows, cols) = match x.shape() {
        [r, c] => (*r, *c),
        other => {
            return Err(Error::shape(format!(
                "weighted_correlation expects a matrix, got {other:?}"
            )))
        }
    };
    let wlen = weights.len();
    if start + wlen > cols {
        return Err(Error::invalid(format!(
            "window [{start}, {}) exceeds series length {cols}",
            start + wlen
        )));
    }

    // Weighted means, then centered segments.
    let mut centered = vec![0.0; rows * wlen];
    let mut sigma = vec![0.0; rows];
    for i in 0..rows {
        let row = &x.data()[i * cols + start..i * cols + start + wlen];
        let mean: f64 = row.iter().zip(weights).map(|(v, w)| v * w).sum();
        let seg = &mut centered[i * wlen..(i + 1) * wlen];
        for (dst, v) in seg.iter_mut().zip(row) {
            *dst = v - mean;
        }
        let var: f64 = seg.iter().zip(weights).map(|(d, w)| w * d * d).sum();
        sigma[i] = if var < VARIANCE_FLOOR { 0.0 } else { var.sqrt() };
    }

    let mut corr = Tensor::zeros(&[rows, rows]);
    for i in 0..rows {
        corr.data_mut()[i * rows + i] = 1.0;
        if sigma[i] == 0.0 {
            continue;
        }
        for j in (i + 1)..rows {
            if sigma[j] == 0.0 {
                continue;
            }
            let a = &centered[i * wlen..(i + 1) * wlen];
            let b = &centered[j * wlen..(j + 1) * wlen];
            let cov: f64 = a
                .iter()
                .zip(b)
                .zip(weights)
                .map(|((p, q), w)| w * p * q)
                .sum();
            let r = (cov / (sigma[i] * sigma[j])).clamp(-1.0, 1.0);
            corr.data_mut()[i * rows + j] = r;
            corr.data_mut()[j * rows + i] = r;
        }
    }
    Ok(corr)
}

/// Tapered-window correlation at one window position.
pub fn windowed_correlation(x: &Tensor, taper: &Taper, start: usize) -> Result<Tensor> {
    weighted_correlation(x, taper.weights(), start)
}

/// Restricts a scan to the selected ROIs and slides the tapered window in
/// steps of 2 samples: exactly 56 correlation frames.
pub fn extract_dfc_sequence(scan: &RoiScan, sel: &RoiSelection) -> Result<DfcSequence> {
    let taper = build_taper();
    let cols = N_TIMEPOINTS;
    let mut selected = Tensor::zeros(&[N_SELECTED, cols]);
    for (k, &roi) in sel.indices().iter().enumerate() {
        selected.data_mut()[k * cols..(k + 1) * cols]
            .copy_from_slice(&scan.data().data()[roi * cols..(roi + 1) * cols]);
    }
    let starts = window_starts(cols, taper.len(), WINDOW_STRIDE);
    debug_assert_eq!(starts.len(), N_WINDOWS);
    let frames = starts
        .iter()
        .map(|&s| windowed_correlation(&selected, &taper, s))
        .collect::<Result<Vec<_>>>()?;
    DfcSequence::new(
        scan.subject_id.clone(),
        scan.scan_id.clone(),
        scan.label,
        frames,
    )
}

/// Per-row max-abs normalization into [-1, 1]; all-zero rows stay zero.
pub fn normalize_scan(raw: &Tensor) -> Result<Tensor> {
    if raw.shape() != [N_ROIS, N_TIMEPOINTS] {
        return Err(Error::format(format!(
            "normalize_scan expects [{N_ROIS}, {N_TIMEPOINTS}], got {:?}",
            raw.shape()
        )));
    }
    let mut out = raw.clone();
    for i in 0..N_ROIS {
        let row = &mut out.data_mut()[i * N_TIMEPOINTS..(i + 1) * N_TIMEPOINTS];
        let max_abs = row.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
        if max_abs > 0.0 {
            for v in row.iter_mut() {
                *v /= max_abs;
            }
        }
    }
    Ok(out)
}

/// Parses a scan file: CSV, 90 rows x 130 columns, ASCII decimal reals, no
/// header. Does not normalize.
pub fn parse_scan_csv(path: &Path) -> Result<Tensor> {
    let text = fs::read_to_string(path)?;
    let display = path.display().to_string();
    let mut data = Vec::with_capacity(N_ROIS * N_TIMEPOINTS);
    let mut n_rows = 0;
    for (row_idx, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        n_rows += 1;
        let mut n_cols = 0;
        for (col_idx, cell) in line.split(',').enumerate() {
            n_cols += 1;
            let v: f64 = cell.trim().parse().map_err(|_| Error::Parse {
                path: display.clone(),
                row: row_idx + 1,
                col: col_idx + 1,
                message: format!("not a number: {cell:?}"),
            })?;
            data.push(v);
        }
        if n_cols != N_TIMEPOINTS {
            return Err(Error::format(format!(
                "{display}: row {} has {n_cols} columns, expected {N_TIMEPOINTS}",
                row_idx + 1
            )));
        }
    }
    if n_rows != N_ROIS {
        return Err(Error::format(format!(
            "{display}: {n_rows} rows, expected {N_ROIS}"
        )));
    }
    Tensor::from_vec(&[N_ROIS, N_TIMEPOINTS], data)
}

/// Loads, normalizes, and tags a scan with its manifest metadata.
pub fn load_scan(
    path: &Path,
    subject_id: impl Into<String>,
    scan_id: impl Into<String>,
    label: Option<u8>,
) -> Result<RoiScan> {
    let raw = parse_scan_csv(path)?;
    RoiScan::new(subject_id, scan_id, label, normalize_scan(&raw)?)
}

/// Writes a scan matrix as the CSV format [`parse_scan_csv`] reads. f64
/// values round-trip exactly through Rust's shortest-representation
/// formatting.
pub fn write_scan_csv(path: &Path, data: &Tensor) -> Result<()> {
    if data.shape() != [N_ROIS, N_TIMEPOINTS] {
        return Err(Error::format(format!(
            "write_scan_csv expects [{N_ROIS}, {N_TIMEPOINTS}], got {:?}",
            data.shape()
        )));
    }
    let mut out = String::with_capacity(N_ROIS * N_TIMEPOINTS * 8);
    for i in 0..N_ROIS {
        let row = &data.data()[i * N_TIMEPOINTS..(i + 1) * N_TIMEPOINTS];
        for (j, v) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    let mut f = fs::File::create(path)?;
    f.write_all(out.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    #[test]
    fn taper_has_length_twenty_and_sums_to_one() {
        let t = build_taper();
        assert_eq!(t.len(), WINDOW_LEN);
        assert!((t.weights().iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn taper_is_symmetric_and_unimodal() {
        let t = build_taper();
        let w = t.weights();
        for k in 0..w.len() / 2 {
            assert!((w[k] - w[w.len() - 1 - k]).abs() < 1e-15);
        }
        assert!(w[9] > w[0]);
        assert!(w[10] > w[19]);
        assert!(w.iter().all(|v| *v > 0.0));
    }

    #[test]
    fn window_count_identity() {
        assert_eq!(window_starts(130, 20, 2).len(), 56);
        // Generalized: count = floor((L - 20) / 2) + 1.
        for len in 20..200 {
            let expect = (len - 20) / 2 + 1;
            assert_eq!(window_starts(len, 20, 2).len(), expect, "len {len}");
        }
        assert!(window_starts(10, 20, 2).is_empty());
    }

    #[test]
    fn identical_rows_correlate_to_one() {
        let mut rng = RngStream::new(3);
        let mut data = vec![0.0; 3 * 130];
        for t in 0..130 {
            let v = rng.normal();
            data[t] = v;
            data[130 + t] = v; // row 1 identical to row 0
            data[260 + t] = -v; // row 2 negated
        }
        let x = Tensor::from_vec(&[3, 130], data).unwrap();
        let taper = build_taper();
        let c = windowed_correlation(&x, &taper, 40).unwrap();
        assert!((c.data()[1] - 1.0).abs() < 1e-12); // (0, 1)
        assert!((c.data()[2] + 1.0).abs() < 1e-12); // (0, 2)
        assert_eq!(c.data()[0], 1.0);
    }

    /// Independent re-implementation of the weighted-moment formulas, used
    /// as the oracle for the production routine.
    fn reference_weighted_corr(x: &Tensor, w: &[f64], start: usize, i: usize, j: usize) -> f64 {
        let cols = x.shape()[1];
        let xi = &x.data()[i * cols + start..i * cols + start + w.len()];
        let xj = &x.data()[j * cols + start..j * cols + start + w.len()];
        let mi: f64 = xi.iter().zip(w).map(|(v, wt)| v * wt).sum();
        let mj: f64 = xj.iter().zip(w).map(|(v, wt)| v * wt).sum();
        let mut cov = 0.0;
        let mut vi = 0.0;
        let mut vj = 0.0;
        for t in 0..w.len() {
            cov += w[t] * (xi[t] - mi) * (xj[t] - mj);
            vi += w[t] * (xi[t] - mi) * (xi[t] - mi);
            vj += w[t] * (xj[t] - mj) * (xj[t] - mj);
        }
        (cov / (vi.sqrt() * vj.sqrt())).clamp(-1.0, 1.0)
    }

    #[test]
    fn matches_reference_weighted_moments() {
        let mut rng = RngStream::new(7);
        let x = crate::param::gaussian_init(&[3, 130], 1.0, &mut rng).unwrap();
        let taper = build_taper();
        for &start in &[0, 2, 110] {
            let c = windowed_correlation(&x, &taper, start).unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    if i == j {
                        continue;
                    }
                    let want = reference_weighted_corr(&x, taper.weights(), start, i, j);
                    let got = c.data()[i * 3 + j];
                    assert!((got - want).abs() < 1e-12, "({i},{j}) {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn out_of_range_start_rejected() {
        let x = Tensor::zeros(&[2, 130]);
        let taper = build_taper();
        assert!(matches!(
            windowed_correlation(&x, &taper, 111),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn zero_variance_row_yields_zero_off_diagonal() {
        let mut data = vec![0.0; 2 * 130];
        for t in 0..130 {
            data[130 + t] = (t as f64 * 0.1).sin();
        }
        let x = Tensor::from_vec(&[2, 130], data).unwrap();
        let taper = build_taper();
        let c = windowed_correlation(&x, &taper, 0).unwrap();
        assert_eq!(c.data()[0], 1.0);
        assert_eq!(c.data()[1], 0.0);
        assert_eq!(c.data()[2], 0.0);
        assert_eq!(c.data()[3], 1.0);
    }

    #[test]
    fn scale_invariance_of_correlation() {
        let mut rng = RngStream::new(11);
        let x = crate::param::gaussian_init(&[4, 130], 1.0, &mut rng).unwrap();
        let taper = build_taper();
        let base = windowed_correlation(&x, &taper, 10).unwrap();
        let mut scaled = x.clone();
        for v in scaled.data_mut()[130..260].iter_mut() {
            *v *= 3.7; // positive rescale of ROI 1
        }
        let c = windowed_correlation(&scaled, &taper, 10).unwrap();
        for (a, b) in base.data().iter().zip(c.data()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    fn synthetic_scan(seed: u64) -> RoiScan {
        let mut rng = RngStream::new(seed);
        let mut raw = Tensor::zeros(&[N_ROIS, N_TIMEPOINTS]);
        for v in raw.data_mut() {
            *v = rng.normal();
        }
        RoiScan::new("s1", "scan1", Some(0), normalize_scan(&raw).unwrap()).unwrap()
    }

    #[test]
    fn extraction_yields_56_symmetric_unit_diagonal_frames() {
        let scan = synthetic_scan(5);
        let seq = extract_dfc_sequence(&scan, &RoiSelection::default28()).unwrap();
        assert_eq!(seq.frames.len(), N_WINDOWS);
        for f in &seq.frames {
            assert_eq!(f.shape(), &[N_SELECTED, N_SELECTED]);
            for i in 0..N_SELECTED {
                assert_eq!(f.data()[i * N_SELECTED + i], 1.0);
                for j in 0..N_SELECTED {
                    let a = f.data()[i * N_SELECTED + j];
                    assert_eq!(a, f.data()[j * N_SELECTED + i]);
                    assert!((-1.0..=1.0).contains(&a));
                }
            }
        }
    }

    #[test]
    fn permuting_the_selection_permutes_frames() {
        // Move selected ROI k's series to the row slot of selected ROI
        // perm[k]; frames must permute identically.
        let scan = synthetic_scan(9);
        let sel = RoiSelection::default28();
        let seq = extract_dfc_sequence(&scan, &sel).unwrap();

        let mut rng = RngStream::new(1);
        let mut perm: Vec<usize> = (0..N_SELECTED).collect();
        rng.shuffle(&mut perm);
        let mut permuted = scan.data().clone();
        for (k, &p) in perm.iter().enumerate() {
            let src = sel.indices()[k] * N_TIMEPOINTS;
            let dst = sel.indices()[p] * N_TIMEPOINTS;
            let row: Vec<f64> = scan.data().data()[src..src + N_TIMEPOINTS].to_vec();
            permuted.data_mut()[dst..dst + N_TIMEPOINTS].copy_from_slice(&row);
        }
        let scan2 = RoiScan::new("s1", "scan1p", Some(0), permuted).unwrap();
        let seq2 = extract_dfc_sequence(&scan2, &sel).unwrap();
        for (f, g) in seq.frames.iter().zip(&seq2.frames) {
            for i in 0..N_SELECTED {
                for j in 0..N_SELECTED {
                    let a = f.data()[i * N_SELECTED + j];
                    let b = g.data()[perm[i] * N_SELECTED + perm[j]];
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn stationary_series_gives_near_constant_frames() {
        // A time-constant correlation structure: every frame should agree up
        // to sampling noise. The bound comes from a Monte-Carlo oracle over
        // independent windows of the same process.
        let mut rng = RngStream::new(21);
        let n = N_SELECTED;
        // Common factor + independent noise: uniform correlation 0.5.
        let series = |rng: &mut RngStream, len: usize| -> Tensor {
            let mut t = Tensor::zeros(&[n, len]);
            for col in 0..len {
                let common = rng.normal();
                for row in 0..n {
                    t.data_mut()[row * len + col] =
                        std::f64::consts::FRAC_1_SQRT_2 * (common + rng.normal());
                }
            }
            t
        };
        let taper = build_taper();

        // Oracle: sampling spread of the estimator on independent windows.
        let mut max_dev: f64 = 0.0;
        for _ in 0..120 {
            let w = series(&mut rng, WINDOW_LEN);
            let c = weighted_correlation(&w, taper.weights(), 0).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        max_dev = max_dev.max((c.data()[i * n + j] - 0.5).abs());
                    }
                }
            }
        }
        let bound = 2.0 * max_dev;

        let full = series(&mut rng, N_TIMEPOINTS);
        let frames: Vec<Tensor> = window_starts(N_TIMEPOINTS, WINDOW_LEN, WINDOW_STRIDE)
            .into_iter()
            .map(|s| weighted_correlation(&full, taper.weights(), s).unwrap())
            .collect();
        for f in &frames {
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        let dev = (f.data()[i * n + j] - 0.5).abs();
                        assert!(dev <= bound, "frame deviation {dev} vs bound {bound}");
                    }
                }
            }
        }
    }

    #[test]
    fn normalization_examples() {
        let mut raw = Tensor::zeros(&[N_ROIS, N_TIMEPOINTS]);
        raw.data_mut()[0] = 2.0;
        raw.data_mut()[1] = -4.0;
        raw.data_mut()[2] = 4.0;
        let out = normalize_scan(&raw).unwrap();
        assert_eq!(&out.data()[..3], &[0.5, -1.0, 1.0]);
        // Row 1 untouched (all zero): stays zero, no division error.
        assert!(out.data()[N_TIMEPOINTS..2 * N_TIMEPOINTS]
            .iter()
            .all(|v| *v == 0.0));
    }

    #[test]
    fn csv_round_trip_and_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.csv");
        let scan = synthetic_scan(33);
        write_scan_csv(&path, scan.data()).unwrap();
        let loaded = load_scan(&path, "s1", "scan1", Some(0)).unwrap();
        assert_eq!(loaded.data().data(), scan.data().data());

        // 89 rows -> format error naming the row count.
        let text = fs::read_to_string(&path).unwrap();
        let truncated: Vec<&str> = text.lines().take(89).collect();
        let short_path = dir.path().join("short.csv");
        fs::write(&short_path, truncated.join("\n")).unwrap();
        let err = parse_scan_csv(&short_path).unwrap_err().to_string();
        assert!(err.contains("89"), "{err}");

        // Bad cell -> parse error with location.
        let mut lines: Vec<String> = text.lines().map(String::from).collect();
        let mut cells: Vec<String> = lines[4].split(',').map(String::from).collect();
        cells[7] = "oops".into();
        lines[4] = cells.join(",");
        let bad_path = dir.path().join("bad.csv");
        fs::write(&bad_path, lines.join("\n")).unwrap();
        match parse_scan_csv(&bad_path) {
            Err(Error::Parse { row, col, .. }) => {
                assert_eq!((row, col), (5, 8));
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn selection_validation() {
        assert!(RoiSelection::new((0..28).collect()).is_ok());
        assert!(RoiSelection::new((0..27).collect()).is_err());
        let mut dup: Vec<usize> = (0..27).collect();
        dup.push(26);
        assert!(RoiSelection::new(dup).is_err());
        let mut high: Vec<usize> = (0..27).collect();
        high.push(90);
        assert!(RoiSelection::new(high).is_err());
    }
}
