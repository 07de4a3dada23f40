//! The five-fold subject-wise cross-validation driver: per round, extract
//! DFC sequences, pre-train on the training folds, fine-tune with early
//! stopping on the validation fold, evaluate on the test fold; write
//! checkpoints, loss curves, and the per-fold + total report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::dfc::DfcSequence;
use crate::dnet::{finetune, pretrain, FinetuneReport, ResidualDNet};
use crate::error::{Error, Result};
use crate::harness::access::{AccessPhase, AccessRecord, ScanStore};
use crate::harness::checkpoint::{Checkpoint, TrainingMeta};
use crate::harness::config::RunConfig;
use crate::harness::manifest::CohortManifest;
use crate::harness::metrics::{compute_metrics, render_table, Metrics};
use crate::harness::split::{split_subjectwise, FoldPlan};
use crate::rng::RngStream;

#[derive(Debug, Clone)]
pub struct FoldResult {
    pub round: usize,
    pub metrics: Metrics,
    pub pretrain_curve: Vec<f64>,
    pub finetune: FinetuneReport,
}

#[derive(Debug, Clone)]
pub struct CrossvalReport {
    pub cohort: String,
    pub folds: Vec<FoldResult>,
    pub total: Metrics,
    pub report_text: String,
    pub access: Vec<AccessRecord>,
    pub plan: FoldPlan,
}

#[derive(Serialize)]
struct MetricsJson<'a> {
    cohort: &'a str,
    folds: Vec<FoldMetricsJson>,
    total: Metrics,
}

#[derive(Serialize)]
struct FoldMetricsJson {
    round: usize,
    #[serde(flatten)]
    metrics: Metrics,
}

/// Classifies one sequence: argmax of the averaged posterior (ties resolve
/// to the control class).
pub fn predict_label(net: &mut ResidualDNet, seq: &DfcSequence) -> Result<u8> {
    let posterior = net.classify(seq)?;
    Ok(u8::from(posterior.data()[1] > posterior.data()[0]))
}

fn write_curve_csv(path: &Path, train: &[f64], val: Option<&[f64]>) -> Result<()> {
    let mut text = String::from("epoch,train_loss,val_loss\n");
    for (k, t) in train.iter().enumerate() {
        match val {
            Some(v) => writeln!(text, "{},{},{}", k + 1, t, v[k]),
            None => writeln!(text, "{},{},", k + 1, t),
        }
        .expect("string write");
    }
    fs::write(path, text)?;
    Ok(())
}

pub fn run_crossval(
    manifest: &CohortManifest,
    config: &RunConfig,
    out_dir: Option<&Path>,
) -> Result<CrossvalReport> {
    let selection = config.roi_selection()?;
    let plan = split_subjectwise(manifest, config.folds, config.seed)?;
    let store = ScanStore::new(manifest);
    let seed_root = RngStream::new(config.seed);

    if let Some(dir) = out_dir {
        fs::create_dir_all(dir)?;
    }

    let mut folds = Vec::new();
    for round in plan.rounds() {
        let r = round.round;
        let run = (|| -> Result<FoldResult> {
            let train_seqs =
                store.fetch_sequences(&round.train, &selection, r, AccessPhase::TrainingData)?;
            let val_seqs =
                store.fetch_sequences(&round.validation, &selection, r, AccessPhase::Validation)?;

            let mut net_rng = seed_root.substream(10_000 + r as u64);
            let mut net = ResidualDNet::new(&mut net_rng)?;

            let pretrain_seed = seed_root.substream(20_000 + r as u64).seed();
            let pretrain_curve =
                pretrain(&mut net, &train_seqs, &config.pretrain_settings(pretrain_seed))?;

            let fold_dir = out_dir.map(|d| d.join(format!("fold{r}")));
            if let Some(dir) = &fold_dir {
                fs::create_dir_all(dir)?;
                write_curve_csv(&dir.join("pretrain_loss.csv"), &pretrain_curve, None)?;
                Checkpoint::with_meta(
                    net.state_tensors(),
                    TrainingMeta {
                        seed: pretrain_seed,
                        epoch: config.pretrain.epochs as u64,
                        learning_rate: config.pretrain.lr,
                    },
                )
                .save(&dir.join("pretrained.ckpt"))?;
            }

            let finetune_seed = seed_root.substream(30_000 + r as u64).seed();
            let report = finetune(
                &mut net,
                &train_seqs,
                &val_seqs,
                &config.finetune_settings(finetune_seed),
            )?;
            if let Some(dir) = &fold_dir {
                write_curve_csv(
                    &dir.join("finetune_loss.csv"),
                    &report.train_curve,
                    Some(&report.val_curve),
                )?;
                Checkpoint::with_meta(
                    net.state_tensors(),
                    TrainingMeta {
                        seed: finetune_seed,
                        epoch: report.best_epoch as u64,
                        learning_rate: config.finetune.lr,
                    },
                )
                .save(&dir.join("finetuned.ckpt"))?;
            }

            let test_seqs = store.fetch_sequences(&round.test, &selection, r, AccessPhase::Test)?;
            let mut predictions = Vec::with_capacity(test_seqs.len());
            let mut labels = Vec::with_capacity(test_seqs.len());
            for seq in &test_seqs {
                predictions.push(predict_label(&mut net, seq)?);
                labels.push(seq.label.expect("manifest sequences are labelled"));
            }
            let metrics = compute_metrics(&predictions, &labels)?;
            Ok(FoldResult {
                round: r,
                metrics,
                pretrain_curve,
                finetune: report,
            })
        })();
        folds.push(run.map_err(|e| Error::format(format!("fold {r}: {e}")))?);
    }

    let per_fold: Vec<Metrics> = folds.iter().map(|f| f.metrics).collect();
    let total = Metrics::pooled(&per_fold);
    let report_text = render_table(&format!("residual d-net on {}", manifest.cohort), &per_fold, &total);

    if let Some(dir) = out_dir {
        fs::write(dir.join("report.txt"), &report_text)?;
        let json = MetricsJson {
            cohort: &manifest.cohort,
            folds: folds
                .iter()
                .map(|f| FoldMetricsJson {
                    round: f.round,
                    metrics: f.metrics,
                })
                .collect(),
            total,
        };
        let text = serde_json::to_string_pretty(&json)
            .map_err(|e| Error::format(format!("metrics serialization: {e}")))?;
        fs::write(dir.join("metrics.json"), text)?;
    }

    Ok(CrossvalReport {
        cohort: manifest.cohort.clone(),
        folds,
        total,
        report_text,
        access: store.log().snapshot(),
        plan,
    })
}
