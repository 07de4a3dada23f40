//! End-to-end baseline runners over the subject-wise fold plan: feature
//! extraction, Fisher selection and standardization fit on training folds
//! only, regularization chosen on the validation fold, metrics on test.

use crate::baselines::features::{
    dfc_features, fisher_select, sfc_features, Standardizer,
};
use crate::baselines::svm::{svm_predict, svm_train};
use crate::dfc::RoiScan;
use crate::error::{Error, Result};
use crate::harness::access::{AccessPhase, AccessRecord, ScanStore};
use crate::harness::config::RunConfig;
use crate::harness::manifest::CohortManifest;
use crate::harness::metrics::{compute_metrics, render_table, Metrics};
use crate::harness::split::split_subjectwise;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BaselineMethod {
    /// Full-scan correlations + linear SVM.
    Sfc,
    /// Rectangular-window correlations + linear SVM.
    Dfc,
}

impl BaselineMethod {
    pub fn parse(s: &str) -> Result<BaselineMethod> {
        match s {
            "sfc" => Ok(BaselineMethod::Sfc),
            "dfc" => Ok(BaselineMethod::Dfc),
            other => Err(Error::invalid(format!(
                "unknown baseline method \"{other}\" (expected sfc or dfc)"
            ))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            BaselineMethod::Sfc => "sfc",
            BaselineMethod::Dfc => "dfc",
        }
    }

    fn features(&self, scan: &RoiScan) -> Vec<f64> {
        match self {
            BaselineMethod::Sfc => sfc_features(scan),
            BaselineMethod::Dfc => dfc_features(scan),
        }
    }

    fn top_k(&self, config: &RunConfig) -> usize {
        match self {
            BaselineMethod::Sfc => config.sfc_top_k,
            BaselineMethod::Dfc => config.dfc_top_k,
        }
    }
}

#[derive(Debug, Clone)]
pub struct BaselineReport {
    pub method: &'static str,
    pub per_fold: Vec<Metrics>,
    pub total: Metrics,
    pub chosen_lambdas: Vec<f64>,
    pub report_text: String,
    pub access: Vec<AccessRecord>,
}

fn rows_and_labels(method: BaselineMethod, scans: &[RoiScan]) -> (Vec<Vec<f64>>, Vec<u8>) {
    let rows = scans.iter().map(|s| method.features(s)).collect();
    let labels = scans
        .iter()
        .map(|s| s.label.expect("manifest scans are labelled"))
        .collect();
    (rows, labels)
}

fn project(rows: &[Vec<f64>], selected: &[usize]) -> Vec<Vec<f64>> {
    rows.iter()
        .map(|r| selected.iter().map(|&i| r[i]).collect())
        .collect()
}

pub fn run_baseline(
    method: BaselineMethod,
    manifest: &CohortManifest,
    config: &RunConfig,
) -> Result<BaselineReport> {
    let plan = split_subjectwise(manifest, config.folds, config.seed)?;
    let store = ScanStore::new(manifest);
    let mut per_fold = Vec::new();
    let mut chosen_lambdas = Vec::new();

    for round in plan.rounds() {
        let train = store.fetch_scans(&round.train, round.round, AccessPhase::TrainingData)?;
        let val = store.fetch_scans(&round.validation, round.round, AccessPhase::Validation)?;
        let test = store.fetch_scans(&round.test, round.round, AccessPhase::Test)?;

        let (train_rows, train_labels) = rows_and_labels(method, &train);
        let (val_rows, val_labels) = rows_and_labels(method, &val);
        let (test_rows, test_labels) = rows_and_labels(method, &test);

        // Selection and standardization fit on training data only.
        let selected = fisher_select(&train_rows, &train_labels, method.top_k(config))?;
        let train_sel = project(&train_rows, &selected);
        let standardizer = Standardizer::fit(&train_sel)?;
        let train_std: Vec<Vec<f64>> = train_sel.iter().map(|r| standardizer.apply(r)).collect();
        let val_std: Vec<Vec<f64>> = project(&val_rows, &selected)
            .iter()
            .map(|r| standardizer.apply(r))
            .collect();
        let test_std: Vec<Vec<f64>> = project(&test_rows, &selected)
            .iter()
            .map(|r| standardizer.apply(r))
            .collect();

        // Regularization chosen on the validation fold; ties keep the
        // smaller lambda (grid is ascending).
        let mut best: Option<(f64, f64)> = None; // (lambda, val accuracy)
        for &lambda in &config.svm_lambda_grid {
            let svm = svm_train(&train_std, &train_labels, lambda, config.svm_epochs, config.seed)?;
            let preds: Vec<u8> = val_std.iter().map(|x| svm_predict(&svm, x)).collect();
            let acc = compute_metrics(&preds, &val_labels)?.accuracy;
            if best.map_or(true, |(_, b)| acc > b) {
                best = Some((lambda, acc));
            }
        }
        let (lambda, _) = best.expect("non-empty lambda grid");
        chosen_lambdas.push(lambda);

        let svm = svm_train(&train_std, &train_labels, lambda, config.svm_epochs, config.seed)?;
        let preds: Vec<u8> = test_std.iter().map(|x| svm_predict(&svm, x)).collect();
        per_fold.push(compute_metrics(&preds, &test_labels)?);
    }

    let total = Metrics::pooled(&per_fold);
    let report_text = render_table(&format!("{}+svm", method.name()), &per_fold, &total);
    Ok(BaselineReport {
        method: method.name(),
        per_fold,
        total,
        chosen_lambdas,
        report_text,
        access: store.log().snapshot(),
    })
}
