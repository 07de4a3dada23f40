//! Training loops: unsupervised pre-training on future prediction and
//! supervised fine-tuning of the contracting path + classifier.
//!
//! Batches are processed by parallel worker clones of the net; worker
//! gradients merge back in batch order, so runs are bit-reproducible for a
//! fixed seed regardless of thread count.

use rayon::prelude::*;

use crate::dfc::DfcSequence;
use crate::dnet::net::{model_inputs, ParamScope, ResidualDNet, INPUT_STEPS, SEQ_LEN};
use crate::error::{Error, Result};
use crate::layers::{bce_loss, mse_loss, mse_loss_backward};
use crate::optim::adam_step;
use crate::rng::RngStream;
use crate::tensor::Tensor;

/// Epochs, learning rate, batch size, shuffle seed.
#[derive(Debug, Clone, Copy)]
pub struct TrainSettings {
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub seed: u64,
}

/// Per-epoch cross-entropy curves from fine-tuning. The net is left at the
/// `best_epoch` parameters (lowest validation cross-entropy).
#[derive(Debug, Clone)]
pub struct FinetuneReport {
    pub train_curve: Vec<f64>,
    pub val_curve: Vec<f64>,
    pub best_epoch: usize,
}

fn check_sequences(seqs: &[DfcSequence], need_labels: bool, what: &str) -> Result<()> {
    if seqs.is_empty() {
        return Err(Error::invalid(format!("{what}: empty sequence set")));
    }
    for s in seqs {
        if s.frames.len() != SEQ_LEN {
            return Err(Error::invalid(format!(
                "{what}: sequence {} has {} frames, expected {SEQ_LEN}",
                s.scan_id,
                s.frames.len()
            )));
        }
        if need_labels && !matches!(s.label, Some(0) | Some(1)) {
            return Err(Error::invalid(format!(
                "{what}: sequence {} needs a label in {{0, 1}}, got {:?}",
                s.scan_id, s.label
            )));
        }
    }
    Ok(())
}

/// Closed-loop prediction loss and full BPTT for one sequence. Gradients
/// accumulate into the worker's parameters.
fn prediction_backward_one(net: &mut ResidualDNet, seq: &DfcSequence) -> Result<f64> {
    let inputs = model_inputs(&seq.frames[..INPUT_STEPS])?;
    let targets = model_inputs(&seq.frames[INPUT_STEPS..])?;
    let (preds, caches) = net.rollout_cached(&inputs, SEQ_LEN - INPUT_STEPS)?;
    let loss = mse_loss(&preds, &targets)?;
    let d_preds = mse_loss_backward(&preds, &targets)?;
    net.rollout_backward(&caches, INPUT_STEPS, &d_preds)?;
    Ok(loss)
}

/// Closed-loop prediction MSE of one sequence (no gradients).
pub fn prediction_loss(net: &mut ResidualDNet, seq: &DfcSequence) -> Result<f64> {
    let preds = net.predict_future(seq)?;
    let targets = model_inputs(&seq.frames[INPUT_STEPS..])?;
    mse_loss(&preds, &targets)
}

/// One optimizer step over a batch: run `per_item` on a worker clone per
/// sequence in parallel, merge gradients in batch order, average, Adam.
fn batch_step<F>(
    net: &mut ResidualDNet,
    batch: &[&DfcSequence],
    scope: ParamScope,
    lr: f64,
    per_item: F,
) -> Result<f64>
where
    F: Fn(&mut ResidualDNet, &DfcSequence) -> Result<f64> + Sync,
{
    let snapshot: &ResidualDNet = net;
    let results: Vec<(f64, ResidualDNet)> = batch
        .par_iter()
        .map(|seq| {
            let mut worker = snapshot.clone();
            worker.zero_grads(ParamScope::All);
            let loss = per_item(&mut worker, seq)?;
            Ok((loss, worker))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut batch_loss = 0.0;
    for (loss, worker) in &results {
        if !loss.is_finite() {
            return Err(Error::numeric(format!("non-finite training loss {loss}")));
        }
        batch_loss += loss;
        net.absorb_grads_from(worker)?;
    }
    net.scale_grads(ParamScope::All, 1.0 / batch.len() as f64);
    for p in net.params_mut(scope) {
        adam_step(p, lr)?;
        p.zero_grad();
    }
    // Gradients outside the updated scope stay frozen parameters; drop the
    // accumulated values so the next batch starts clean.
    net.zero_grads(ParamScope::All);
    Ok(batch_loss)
}

/// Unsupervised pre-training: minimize the closed-loop prediction MSE over
/// frames 29..56. Returns the per-epoch mean training loss. Deterministic
/// for a fixed seed (shuffle order derives from it).
pub fn pretrain(
    net: &mut ResidualDNet,
    train: &[DfcSequence],
    settings: &TrainSettings,
) -> Result<Vec<f64>> {
    check_sequences(train, false, "pretrain")?;
    if settings.batch_size == 0 || settings.epochs == 0 {
        return Err(Error::invalid("pretrain: epochs and batch_size must be positive"));
    }
    let mut rng = RngStream::new(settings.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut curve = Vec::with_capacity(settings.epochs);
    net.zero_grads(ParamScope::All);
    for _epoch in 0..settings.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(settings.batch_size) {
            let batch: Vec<&DfcSequence> = chunk.iter().map(|&i| &train[i]).collect();
            epoch_loss += batch_step(net, &batch, ParamScope::All, settings.lr, |w, s| {
                prediction_backward_one(w, s)
            })?;
        }
        curve.push(epoch_loss / train.len() as f64);
    }
    Ok(curve)
}

/// Mean classification cross-entropy over labelled sequences (no gradients).
pub fn mean_bce(net: &ResidualDNet, seqs: &[DfcSequence]) -> Result<f64> {
    let total: f64 = seqs
        .par_iter()
        .map(|seq| {
            let mut worker = net.clone();
            let posterior = worker.classify(seq)?;
            bce_loss(&posterior, seq.label.unwrap() as usize)
        })
        .collect::<Result<Vec<f64>>>()?
        .iter()
        .sum();
    Ok(total / seqs.len() as f64)
}

/// Supervised fine-tuning with early stopping: updates ONLY the contracting
/// path and the classifier head (expanding path and prediction head stay
/// bitwise frozen), tracks train/validation cross-entropy per epoch, and
/// leaves the net at the lowest-validation-loss parameters.
pub fn finetune(
    net: &mut ResidualDNet,
    train: &[DfcSequence],
    val: &[DfcSequence],
    settings: &TrainSettings,
) -> Result<FinetuneReport> {
    check_sequences(train, true, "finetune train")?;
    check_sequences(val, true, "finetune validation")?;
    if settings.batch_size == 0 || settings.epochs == 0 {
        return Err(Error::invalid("finetune: epochs and batch_size must be positive"));
    }
    let scope = ParamScope::ContractingAndClassifier;
    let mut rng = RngStream::new(settings.seed);
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut train_curve = Vec::with_capacity(settings.epochs);
    let mut val_curve = Vec::with_capacity(settings.epochs);
    let mut best: Option<(usize, f64, Vec<Tensor>)> = None;
    net.zero_grads(ParamScope::All);
    for epoch in 0..settings.epochs {
        rng.shuffle(&mut order);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(settings.batch_size) {
            let batch: Vec<&DfcSequence> = chunk.iter().map(|&i| &train[i]).collect();
            epoch_loss += batch_step(net, &batch, scope, settings.lr, |w, s| {
                let label = s.label.unwrap() as usize;
                Ok(w.classify_backward(s, label)?.0)
            })?;
        }
        train_curve.push(epoch_loss / train.len() as f64);

        let val_loss = mean_bce(net, val)?;
        val_curve.push(val_loss);
        let improved = best.as_ref().map_or(true, |(_, b, _)| val_loss < *b);
        if improved {
            let snapshot = net.params(scope).iter().map(|p| p.value().clone()).collect();
            best = Some((epoch, val_loss, snapshot));
        }
    }
    let (best_epoch, _, snapshot) = best.expect("at least one epoch ran");
    for (p, v) in net.params_mut(scope).into_iter().zip(snapshot) {
        *p.value_mut() = v;
    }
    Ok(FinetuneReport {
        train_curve,
        val_curve,
        best_epoch,
    })
}
