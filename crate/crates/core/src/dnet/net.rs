//! The assembled network: a 2-depth recurrent encoder-decoder over 28x28
//! correlation frames.
//!
//! Contracting path: down block (1 -> 16, 28 -> 14), recurrent block
//! (16 @ 14x14, the skip source), down block (16 -> 32, 14 -> 7), recurrent
//! block (32 @ 7x7, the classification embedding). Expanding path: up block
//! (32 -> 16 with the skip), up block (16 -> 16, no skip), then a 3x3
//! conv (16 -> 1) with tanh as the frame-prediction head. A dense 2-way
//! softmax classifier reads the flattened 32x7x7 embedding and averages its
//! per-step posteriors over the sequence.

use crate::dfc::DfcSequence;
use crate::dnet::blocks::{
    ClstmBlockCarry, ContractingStepCache, ResCLSTMBlock, ResDBlock, ResUBlock, ResUCache,
};
use crate::error::{Error, Result};
use crate::layers::{bce_loss, bce_loss_backward, softmax, softmax_backward, tanh_backward, tanh_map, Conv2D};
use crate::param::Parameter;
use crate::rng::RngStream;
use crate::tensor::Tensor;

/// Correlation frames are 28x28.
pub const FRAME_SIDE: usize = 28;
/// Every extracted sequence has exactly 56 frames.
pub const SEQ_LEN: usize = 56;
/// The prediction task consumes the first T = 28 frames and predicts the
/// remaining 28.
pub const INPUT_STEPS: usize = 28;
/// The classification embedding is 32 channels at 7x7 ...
pub const Z_LAST_SHAPE: [usize; 3] = [32, 7, 7];
/// ... which flattens to exactly 1568 values.
pub const Z_LAST_LEN: usize = 1568;

/// Which parameters an update or traversal touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParamScope {
    All,
    /// Both down blocks and both recurrent blocks.
    Contracting,
    /// Up blocks and the frame-prediction head.
    Expanding,
    /// The dense softmax classifier.
    Classifier,
    /// What fine-tuning updates: contracting path plus classifier.
    ContractingAndClassifier,
}

#[derive(Debug, Clone)]
pub struct ResidualDNet {
    dblock1: ResDBlock,
    clstm1: ResCLSTMBlock,
    dblock2: ResDBlock,
    clstm2: ResCLSTMBlock,
    ublock1: ResUBlock,
    ublock2: ResUBlock,
    head: Conv2D,
    cls_w: Parameter, // [2, 1568]
    cls_b: Parameter, // [2]
}

/// All per-step activations needed to run backward through one full step.
#[derive(Debug, Clone)]
pub struct StepCache {
    contracting: ContractingStepCache,
    u1: ResUCache,
    u2: ResUCache,
    head_in: Tensor,
    pred: Tensor,
}

impl StepCache {
    pub fn prediction(&self) -> &Tensor {
        &self.pred
    }
}

/// Recurrent gradient carries for both recurrent blocks.
pub struct NetCarries {
    l1: ClstmBlockCarry,
    l2: ClstmBlockCarry,
}

impl ResidualDNet {
    pub fn new(rng: &mut RngStream) -> Result<ResidualDNet> {
        Ok(ResidualDNet {
            dblock1: ResDBlock::new("dblock1", 1, 16, rng)?,
            clstm1: ResCLSTMBlock::new("clstm1", 16, 14, 14, rng)?,
            dblock2: ResDBlock::new("dblock2", 16, 32, rng)?,
            clstm2: ResCLSTMBlock::new("clstm2", 32, 7, 7, rng)?,
            ublock1: ResUBlock::new("ublock1", 32, 16, 16, rng)?,
            ublock2: ResUBlock::new("ublock2", 16, 16, 0, rng)?,
            head: Conv2D::new("head", 16, 1, rng)?,
            cls_w: Parameter::gaussian("classifier.weight", &[2, Z_LAST_LEN], (2.0 / Z_LAST_LEN as f64).sqrt(), rng)?,
            cls_b: Parameter::zeros("classifier.bias", &[2]),
        })
    }

    // -- parameter traversal --------------------------------------------

    /// Parameters in a fixed, documented order: contracting path, expanding
    /// path, prediction head, classifier. Checkpoints and gradient merging
    /// rely on this order being stable.
    pub fn params(&self, scope: ParamScope) -> Vec<&Parameter> {
        let mut ps: Vec<&Parameter> = Vec::new();
        let contracting = matches!(
            scope,
            ParamScope::All | ParamScope::Contracting | ParamScope::ContractingAndClassifier
        );
        let expanding = matches!(scope, ParamScope::All | ParamScope::Expanding);
        let classifier = matches!(
            scope,
            ParamScope::All | ParamScope::Classifier | ParamScope::ContractingAndClassifier
        );
        if contracting {
            ps.extend(self.dblock1.params());
            ps.extend(self.clstm1.params());
            ps.extend(self.dblock2.params());
            ps.extend(self.clstm2.params());
        }
        if expanding {
            ps.extend(self.ublock1.params());
            ps.extend(self.ublock2.params());
            ps.extend(self.head.params());
        }
        if classifier {
            ps.push(&self.cls_w);
            ps.push(&self.cls_b);
        }
        ps
    }

    pub fn params_mut(&mut self, scope: ParamScope) -> Vec<&mut Parameter> {
        let mut ps: Vec<&mut Parameter> = Vec::new();
        let contracting = matches!(
            scope,
            ParamScope::All | ParamScope::Contracting | ParamScope::ContractingAndClassifier
        );
        let expanding = matches!(scope, ParamScope::All | ParamScope::Expanding);
        let classifier = matches!(
            scope,
            ParamScope::All | ParamScope::Classifier | ParamScope::ContractingAndClassifier
        );
        if contracting {
            ps.extend(self.dblock1.params_mut());
            ps.extend(self.clstm1.params_mut());
            ps.extend(self.dblock2.params_mut());
            ps.extend(self.clstm2.params_mut());
        }
        if expanding {
            ps.extend(self.ublock1.params_mut());
            ps.extend(self.ublock2.params_mut());
            ps.extend(self.head.params_mut());
        }
        if classifier {
            ps.push(&mut self.cls_w);
            ps.push(&mut self.cls_b);
        }
        ps
    }

    pub fn zero_grads(&mut self, scope: ParamScope) {
        for p in self.params_mut(scope) {
            p.zero_grad();
        }
    }

    pub fn scale_grads(&mut self, scope: ParamScope, factor: f64) {
        for p in self.params_mut(scope) {
            p.grad_mut().scale(factor);
        }
    }

    /// Sums a worker clone's accumulated gradients into this net.
    pub fn absorb_grads_from(&mut self, worker: &ResidualDNet) -> Result<()> {
        let theirs = worker.params(ParamScope::All);
        for (mine, other) in self.params_mut(ParamScope::All).into_iter().zip(theirs) {
            debug_assert_eq!(mine.name(), other.name());
            mine.absorb_grad(other)?;
        }
        Ok(())
    }

    // -- forward ---------------------------------------------------------

    /// Zeroes all recurrent state; call before every new sequence.
    pub fn reset_state(&mut self) {
        self.clstm1.reset();
        self.clstm2.reset();
    }

    fn check_frame(&self, x: &Tensor) -> Result<()> {
        if x.shape() != [1, FRAME_SIDE, FRAME_SIDE] {
            return Err(Error::shape(format!(
                "expected input frame [1, {FRAME_SIDE}, {FRAME_SIDE}], got {:?}",
                x.shape()
            )));
        }
        Ok(())
    }

    /// One full step: consumes a frame, advances recurrent state, returns
    /// (next-frame prediction in (-1, 1), classification embedding).
    pub fn dnet_step(&mut self, x: &Tensor) -> Result<(Tensor, Tensor)> {
        self.check_frame(x)?;
        let d1 = self.dblock1.forward(x)?;
        let zm = self.clstm1.step(&d1)?;
        let d2 = self.dblock2.forward(&zm)?;
        let zl = self.clstm2.step(&d2)?;
        let u1 = self.ublock1.forward(&zl, Some(&zm))?;
        let u2 = self.ublock2.forward(&u1, None)?;
        let pred = tanh_map(&self.head.forward(&u2)?);
        Ok((pred, zl))
    }

    /// Like [`ResidualDNet::dnet_step`], additionally returning the
    /// activation cache for backpropagation through time.
    pub fn dnet_step_cached(&mut self, x: &Tensor) -> Result<(Tensor, Tensor, StepCache)> {
        self.check_frame(x)?;
        let (d1, d1c) = self.dblock1.forward_cached(x)?;
        let (zm, l1c) = self.clstm1.step_cached(&d1)?;
        let (d2, d2c) = self.dblock2.forward_cached(&zm)?;
        let (zl, l2c) = self.clstm2.step_cached(&d2)?;
        let (u1, u1c) = self.ublock1.forward_cached(&zl, Some(&zm))?;
        let (u2, u2c) = self.ublock2.forward_cached(&u1, None)?;
        let head_lin = self.head.forward(&u2)?;
        let pred = tanh_map(&head_lin);
        Ok((
            pred.clone(),
            zl,
            StepCache {
                contracting: ContractingStepCache {
                    d1: d1c,
                    l1: l1c,
                    d2: d2c,
                    l2: l2c,
                },
                u1: u1c,
                u2: u2c,
                head_in: u2,
                pred,
            },
        ))
    }

    /// Contracting path only (classification does not run the decoder).
    pub fn step_contracting(&mut self, x: &Tensor) -> Result<Tensor> {
        self.check_frame(x)?;
        let d1 = self.dblock1.forward(x)?;
        let zm = self.clstm1.step(&d1)?;
        let d2 = self.dblock2.forward(&zm)?;
        self.clstm2.step(&d2)
    }

    pub fn step_contracting_cached(&mut self, x: &Tensor) -> Result<(Tensor, ContractingStepCache)> {
        self.check_frame(x)?;
        let (d1, d1c) = self.dblock1.forward_cached(x)?;
        let (zm, l1c) = self.clstm1.step_cached(&d1)?;
        let (d2, d2c) = self.dblock2.forward_cached(&zm)?;
        let (zl, l2c) = self.clstm2.step_cached(&d2)?;
        Ok((
            zl,
            ContractingStepCache {
                d1: d1c,
                l1: l1c,
                d2: d2c,
                l2: l2c,
            },
        ))
    }

    /// Stage-by-stage output shapes of one full step, for verifying the
    /// documented architecture trace.
    pub fn shape_trace(&mut self, x: &Tensor) -> Result<Vec<(String, Vec<usize>)>> {
        self.check_frame(x)?;
        self.reset_state();
        let mut trace = vec![("input".to_string(), x.shape().to_vec())];
        let d1 = self.dblock1.forward(x)?;
        trace.push(("res_d_1".into(), d1.shape().to_vec()));
        let zm = self.clstm1.step(&d1)?;
        trace.push(("res_clstm_1".into(), zm.shape().to_vec()));
        let d2 = self.dblock2.forward(&zm)?;
        trace.push(("res_d_2".into(), d2.shape().to_vec()));
        let zl = self.clstm2.step(&d2)?;
        trace.push(("res_clstm_2".into(), zl.shape().to_vec()));
        let u1 = self.ublock1.forward(&zl, Some(&zm))?;
        trace.push(("res_u_1".into(), u1.shape().to_vec()));
        let u2 = self.ublock2.forward(&u1, None)?;
        trace.push(("res_u_2".into(), u2.shape().to_vec()));
        let pred = tanh_map(&self.head.forward(&u2)?);
        trace.push(("prediction".into(), pred.shape().to_vec()));
        self.reset_state();
        Ok(trace)
    }

    // -- closed-loop rollout ----------------------------------------------

    /// Closed-loop rollout: consume `inputs` as ground truth, then feed the
    /// model's own predictions back as inputs. The output of the step that
    /// consumed the last ground-truth frame is the first returned
    /// prediction; `horizon` predictions are returned in order. Recurrent
    /// state is reset at the start and NOT reset at the input/prediction
    /// boundary.
    pub fn rollout(&mut self, inputs: &[Tensor], horizon: usize) -> Result<Vec<Tensor>> {
        if inputs.is_empty() || horizon == 0 {
            return Err(Error::invalid("rollout needs inputs and a positive horizon"));
        }
        self.reset_state();
        let t_in = inputs.len();
        let steps = t_in + horizon - 1;
        let mut preds = Vec::with_capacity(horizon);
        let mut last_pred: Option<Tensor> = None;
        for k in 0..steps {
            let input = if k < t_in {
                inputs[k].clone()
            } else {
                last_pred.clone().expect("previous prediction exists")
            };
            let (pred, _) = self.dnet_step(&input)?;
            if k >= t_in - 1 {
                preds.push(pred.clone());
            }
            last_pred = Some(pred);
        }
        Ok(preds)
    }

    /// Caching variant of [`ResidualDNet::rollout`]; returns every step's
    /// cache so [`ResidualDNet::rollout_backward`] can run full BPTT,
    /// including through the prediction-feedback connections.
    pub fn rollout_cached(
        &mut self,
        inputs: &[Tensor],
        horizon: usize,
    ) -> Result<(Vec<Tensor>, Vec<StepCache>)> {
        if inputs.is_empty() || horizon == 0 {
            return Err(Error::invalid("rollout needs inputs and a positive horizon"));
        }
        self.reset_state();
        let t_in = inputs.len();
        let steps = t_in + horizon - 1;
        let mut caches: Vec<StepCache> = Vec::with_capacity(steps);
        let mut preds = Vec::with_capacity(horizon);
        for k in 0..steps {
            let input = if k < t_in {
                inputs[k].clone()
            } else {
                caches[k - 1].pred.clone()
            };
            let (pred, _, cache) = self.dnet_step_cached(&input)?;
            if k >= t_in - 1 {
                preds.push(pred);
            }
            caches.push(cache);
        }
        Ok((preds, caches))
    }

    /// Full backpropagation through a cached rollout. `d_preds[j]` is the
    /// loss gradient for the j-th returned prediction. Gradients accumulate
    /// into this net's parameters.
    pub fn rollout_backward(
        &mut self,
        caches: &[StepCache],
        t_in: usize,
        d_preds: &[Tensor],
    ) -> Result<()> {
        let steps = caches.len();
        if steps + 1 != t_in + d_preds.len() {
            return Err(Error::invalid(format!(
                "rollout_backward: {steps} cached steps do not match t_in {t_in} + horizon {}",
                d_preds.len()
            )));
        }
        let mut carries = NetCarries {
            l1: self.clstm1.carry(),
            l2: self.clstm2.carry(),
        };
        let mut feedback: Option<Tensor> = None;
        for k in (0..steps).rev() {
            // Gradient arriving at this step's prediction: from the loss if
            // this step emitted a scored frame, plus from the next step's
            // input if that step consumed this prediction.
            let mut d_pred = Tensor::zeros(&[1, FRAME_SIDE, FRAME_SIDE]);
            if k >= t_in - 1 {
                d_pred.add_assign(&d_preds[k - (t_in - 1)])?;
            }
            if let Some(fb) = feedback.take() {
                d_pred.add_assign(&fb)?;
            }
            let d_x = self.step_backward(&caches[k], &d_pred, None, &mut carries)?;
            if k >= t_in {
                feedback = Some(d_x);
            }
        }
        Ok(())
    }

    /// Backward through a cached open-loop sequence (every step consumed a
    /// ground-truth input): one prediction gradient per step, no feedback.
    pub fn sequence_backward(&mut self, caches: &[StepCache], d_preds: &[Tensor]) -> Result<()> {
        if caches.len() != d_preds.len() {
            return Err(Error::invalid(format!(
                "sequence_backward: {} caches vs {} prediction grads",
                caches.len(),
                d_preds.len()
            )));
        }
        let mut carries = self.fresh_carries();
        for k in (0..caches.len()).rev() {
            self.step_backward(&caches[k], &d_preds[k], None, &mut carries)?;
        }
        Ok(())
    }

    /// Backward through one full step (expanding path, then contracting),
    /// with optional extra gradient injected at the classification
    /// embedding. Returns the gradient w.r.t. the step's input frame.
    fn step_backward(
        &mut self,
        cache: &StepCache,
        d_pred: &Tensor,
        d_zlast_extra: Option<&Tensor>,
        carries: &mut NetCarries,
    ) -> Result<Tensor> {
        if d_pred.max_abs() == 0.0 {
            // Warm-up steps carry no prediction gradient; only the recurrent
            // carries flow through the contracting path.
            let zeros = Tensor::zeros(&Z_LAST_SHAPE);
            let d_zl = d_zlast_extra.unwrap_or(&zeros);
            return self.contracting_backward_step(&cache.contracting, d_zl, None, carries);
        }
        let d_head_lin = tanh_backward(&cache.pred, d_pred);
        let d_u2 = self.head.backward(&cache.head_in, &d_head_lin)?;
        let (d_u1, none_skip) = self.ublock2.backward(&cache.u2, &d_u2)?;
        debug_assert!(none_skip.is_none());
        let (mut d_zl, d_zm_skip) = self.ublock1.backward(&cache.u1, &d_u1)?;
        if let Some(extra) = d_zlast_extra {
            d_zl.add_assign(extra)?;
        }
        let d_zm_skip = d_zm_skip.expect("ublock1 has a skip input");
        self.contracting_backward_step(
            &cache.contracting,
            &d_zl,
            Some(&d_zm_skip),
            carries,
        )
    }

    /// Backward through the contracting path of one step.
    pub(crate) fn contracting_backward_step(
        &mut self,
        cache: &ContractingStepCache,
        d_zlast: &Tensor,
        d_zmid_extra: Option<&Tensor>,
        carries: &mut NetCarries,
    ) -> Result<Tensor> {
        let d_d2 = self.clstm2.backward_step(&cache.l2, d_zlast, &mut carries.l2)?;
        let mut d_zm = self.dblock2.backward(&cache.d2, &d_d2)?;
        if let Some(extra) = d_zmid_extra {
            d_zm.add_assign(extra)?;
        }
        let d_d1 = self.clstm1.backward_step(&cache.l1, &d_zm, &mut carries.l1)?;
        self.dblock1.backward(&cache.d1, &d_d1)
    }

    pub fn fresh_carries(&self) -> NetCarries {
        NetCarries {
            l1: self.clstm1.carry(),
            l2: self.clstm2.carry(),
        }
    }

    // -- prediction and classification over sequences ----------------------

    /// Closed-loop future prediction: consumes the first T = 28 frames of
    /// the sequence and returns the 28 predicted continuation frames, each
    /// [1, 28, 28].
    pub fn predict_future(&mut self, seq: &DfcSequence) -> Result<Vec<Tensor>> {
        if seq.frames.len() < INPUT_STEPS {
            return Err(Error::invalid(format!(
                "predict_future needs at least {INPUT_STEPS} input frames, got {}",
                seq.frames.len()
            )));
        }
        let inputs = model_inputs(&seq.frames[..INPUT_STEPS])?;
        self.rollout(&inputs, INPUT_STEPS)
    }

    /// Per Eq.-style time-averaged classification: run the contracting path
    /// over all 56 frames, average per-step softmax posteriors.
    pub fn classify(&mut self, seq: &DfcSequence) -> Result<Tensor> {
        if seq.frames.len() != SEQ_LEN {
            return Err(Error::invalid(format!(
                "classify needs exactly {SEQ_LEN} frames, got {}",
                seq.frames.len()
            )));
        }
        self.reset_state();
        let mut posterior = Tensor::zeros(&[2]);
        for frame in &seq.frames {
            let x = frame.reshaped(&[1, FRAME_SIDE, FRAME_SIDE])?;
            let zl = self.step_contracting(&x)?;
            let p = softmax(&self.classifier_logits(&zl)?)?;
            posterior.add_assign(&p)?;
        }
        posterior.scale(1.0 / SEQ_LEN as f64);
        Ok(posterior)
    }

    /// Classifier logits w_cl * flatten(z_last) + b_cl.
    pub fn classifier_logits(&self, z_last: &Tensor) -> Result<Tensor> {
        if z_last.len() != Z_LAST_LEN {
            return Err(Error::shape(format!(
                "classifier expects {} embedding values, got shape {:?}",
                Z_LAST_LEN,
                z_last.shape()
            )));
        }
        let w = self.cls_w.value().data();
        let b = self.cls_b.value().data();
        let z = z_last.data();
        let mut logits = Tensor::zeros(&[2]);
        for k in 0..2 {
            let row = &w[k * Z_LAST_LEN..(k + 1) * Z_LAST_LEN];
            logits.data_mut()[k] = b[k] + row.iter().zip(z).map(|(a, c)| a * c).sum::<f64>();
        }
        Ok(logits)
    }

    /// Classification loss for one labelled sequence with full BPTT through
    /// the contracting path and the classifier. Returns (loss, posterior);
    /// gradients accumulate into the contracting and classifier parameters.
    pub fn classify_backward(&mut self, seq: &DfcSequence, label: usize) -> Result<(f64, Tensor)> {
        if seq.frames.len() != SEQ_LEN {
            return Err(Error::invalid(format!(
                "classify needs exactly {SEQ_LEN} frames, got {}",
                seq.frames.len()
            )));
        }
        self.reset_state();
        let mut caches = Vec::with_capacity(SEQ_LEN);
        let mut embeddings = Vec::with_capacity(SEQ_LEN);
        let mut posteriors = Vec::with_capacity(SEQ_LEN);
        let mut posterior = Tensor::zeros(&[2]);
        for frame in &seq.frames {
            let x = frame.reshaped(&[1, FRAME_SIDE, FRAME_SIDE])?;
            let (zl, cache) = self.step_contracting_cached(&x)?;
            let p = softmax(&self.classifier_logits(&zl)?)?;
            posterior.add_assign(&p)?;
            caches.push(cache);
            embeddings.push(zl);
            posteriors.push(p);
        }
        posterior.scale(1.0 / SEQ_LEN as f64);
        let loss = bce_loss(&posterior, label)?;

        // d loss / d per-step posterior = bce grad / T.
        let mut d_mean = bce_loss_backward(&posterior, label)?;
        d_mean.scale(1.0 / SEQ_LEN as f64);

        // Classifier gradients and per-step embedding gradients.
        let mut d_embeddings = Vec::with_capacity(SEQ_LEN);
        for t in 0..SEQ_LEN {
            let d_logits = softmax_backward(&posteriors[t], &d_mean);
            let z = embeddings[t].data();
            {
                let dw = self.cls_w.grad_mut().data_mut();
                for k in 0..2 {
                    let g = d_logits.data()[k];
                    if g != 0.0 {
                        for (dst, zv) in dw[k * Z_LAST_LEN..(k + 1) * Z_LAST_LEN].iter_mut().zip(z)
                        {
                            *dst += g * zv;
                        }
                    }
                }
            }
            {
                let db = self.cls_b.grad_mut().data_mut();
                db[0] += d_logits.data()[0];
                db[1] += d_logits.data()[1];
            }
            let mut d_z = Tensor::zeros(&Z_LAST_SHAPE);
            {
                let w = self.cls_w.value().data();
                let dz = d_z.data_mut();
                for k in 0..2 {
                    let g = d_logits.data()[k];
                    if g != 0.0 {
                        for (dst, wv) in dz.iter_mut().zip(&w[k * Z_LAST_LEN..(k + 1) * Z_LAST_LEN])
                        {
                            *dst += g * wv;
                        }
                    }
                }
            }
            d_embeddings.push(d_z);
        }

        // BPTT through the contracting path.
        let mut carries = self.fresh_carries();
        for t in (0..SEQ_LEN).rev() {
            self.contracting_backward_step(&caches[t], &d_embeddings[t], None, &mut carries)?;
        }
        Ok((loss, posterior))
    }

    // -- checkpoint interchange -------------------------------------------

    /// Named value tensors in traversal order, for checkpointing.
    pub fn state_tensors(&self) -> Vec<(String, Tensor)> {
        self.params(ParamScope::All)
            .into_iter()
            .map(|p| (p.name().to_string(), p.value().clone()))
            .collect()
    }

    /// Restores parameter values by name. Every parameter must be present
    /// with a matching shape.
    pub fn load_state_tensors(&mut self, table: &[(String, Tensor)]) -> Result<()> {
        for p in self.params_mut(ParamScope::All) {
            let found = table
                .iter()
                .find(|(name, _)| name == p.name())
                .ok_or_else(|| {
                    Error::format(format!("checkpoint is missing tensor \"{}\"", p.name()))
                })?;
            if found.1.shape() != p.value().shape() {
                return Err(Error::shape(format!(
                    "checkpoint tensor \"{}\": {:?} vs expected {:?}",
                    p.name(),
                    found.1.shape(),
                    p.value().shape()
                )));
            }
            *p.value_mut() = found.1.clone();
        }
        Ok(())
    }
}

/// Converts 28x28 matrix frames into [1, 28, 28] model inputs.
pub fn model_inputs(frames: &[Tensor]) -> Result<Vec<Tensor>> {
    frames
        .iter()
        .map(|f| f.reshaped(&[1, FRAME_SIDE, FRAME_SIDE]))
        .collect()
}
