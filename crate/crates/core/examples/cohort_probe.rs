//! Scratch probe of the default synthetic cohort: class separation
//! structure, baseline accuracies, and training throughput. Run with
//! `cargo run --release -p resdnet-core --example cohort_probe [fast]`.

use std::time::Instant;

use resdnet_core::baselines::{run_baseline, BaselineMethod};
use resdnet_core::dfc::{extract_dfc_sequence, weighted_correlation, DfcSequence, N_TIMEPOINTS};
use resdnet_core::dnet::train::prediction_loss;
use resdnet_core::dnet::{model_inputs, pretrain, ResidualDNet, TrainSettings, INPUT_STEPS};
use resdnet_core::harness::RunConfig;
use resdnet_core::layers::mse_loss;
use resdnet_core::rng::RngStream;
use resdnet_core::synthgen::{generate_cohort, CohortSpec};
use resdnet_core::tensor::Tensor;

fn static_fc_28(seq_scan: &resdnet_core::dfc::RoiScan, sel: &resdnet_core::dfc::RoiSelection) -> Tensor {
    // Full-scan correlation restricted to the 28 signal ROIs.
    let mut rows = Tensor::zeros(&[28, N_TIMEPOINTS]);
    for (k, &roi) in sel.indices().iter().enumerate() {
        rows.data_mut()[k * N_TIMEPOINTS..(k + 1) * N_TIMEPOINTS]
            .copy_from_slice(&seq_scan.data().data()[roi * N_TIMEPOINTS..(roi + 1) * N_TIMEPOINTS]);
    }
    let uniform = vec![1.0 / N_TIMEPOINTS as f64; N_TIMEPOINTS];
    weighted_correlation(&rows, &uniform, 0).unwrap()
}

fn frobenius(t: &Tensor) -> f64 {
    t.data().iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn temporal_variance(seq: &DfcSequence) -> f64 {
    // Mean over off-diagonal entries of the variance across frames.
    let n = 28;
    let frames = &seq.frames;
    let mut acc = 0.0;
    let mut count = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let vals: Vec<f64> = frames.iter().map(|f| f.data()[i * n + j]).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            let var = vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / vals.len() as f64;
            acc += var;
            count += 1;
        }
    }
    acc / count as f64
}

fn main() {
    let fast = std::env::args().any(|a| a == "fast");
    let spec = CohortSpec::default();
    let dir = std::env::temp_dir().join("resdnet_probe");
    let t0 = Instant::now();
    let manifest = generate_cohort(&spec, &dir).unwrap();
    println!(
        "cohort: {} scans from {} subjects in {:.1}s",
        manifest.scans.len(),
        manifest.subjects().len(),
        t0.elapsed().as_secs_f64()
    );

    // Load scans back and split by class.
    let sel = spec.roi_selection.clone();
    let mut scans0 = Vec::new();
    let mut scans1 = Vec::new();
    for e in &manifest.scans {
        let scan = resdnet_core::dfc::load_scan(
            std::path::Path::new(&e.path),
            e.subject.clone(),
            e.scan.clone(),
            Some(e.label),
        )
        .unwrap();
        if e.label == 0 {
            scans0.push(scan);
        } else {
            scans1.push(scan);
        }
    }

    // Static FC class means.
    let mean_fc = |scans: &[resdnet_core::dfc::RoiScan]| {
        let mut acc = Tensor::zeros(&[28, 28]);
        for s in scans {
            acc.add_assign(&static_fc_28(s, &sel)).unwrap();
        }
        acc.scale(1.0 / scans.len() as f64);
        acc
    };
    let m0 = mean_fc(&scans0);
    let m1 = mean_fc(&scans1);
    let mut diff = m0.clone();
    diff.add_scaled(&m1, -1.0).unwrap();
    let ratio = frobenius(&diff) / (0.5 * (frobenius(&m0) + frobenius(&m1)));
    println!("static FC class-mean Frobenius ratio: {ratio:.4}  (need < 0.15)");

    // Temporal variance of windowed FC.
    let tv = |scans: &[resdnet_core::dfc::RoiScan]| {
        let mut acc = 0.0;
        for s in scans {
            let seq = extract_dfc_sequence(s, &sel).unwrap();
            acc += temporal_variance(&seq);
        }
        acc / scans.len() as f64
    };
    let tv0 = tv(&scans0);
    let tv1 = tv(&scans1);
    println!("temporal variance slow/fast: {tv0:.5} / {tv1:.5} = {:.2}x (need >= 2x)", tv0 / tv1);

    // Baselines.
    let config = RunConfig::default();
    let t1 = Instant::now();
    let sfc = run_baseline(BaselineMethod::Sfc, &manifest, &config).unwrap();
    println!(
        "SFC+SVM total acc {:.3} in {:.1}s (need <= 0.65); lambdas {:?}",
        sfc.total.accuracy,
        t1.elapsed().as_secs_f64(),
        sfc.chosen_lambdas
    );
    let t2 = Instant::now();
    let dfc = run_baseline(BaselineMethod::Dfc, &manifest, &config).unwrap();
    println!(
        "DFC+SVM total acc {:.3} in {:.1}s; lambdas {:?}",
        dfc.total.accuracy,
        t2.elapsed().as_secs_f64(),
        dfc.chosen_lambdas
    );

    if fast {
        return;
    }

    // Training throughput + early learning signal: pretrain a few epochs on
    // a 60%-of-subjects split, compare held-out prediction MSE against the
    // repeat-last-frame persistence baseline.
    let subjects: Vec<String> = manifest.subjects().keys().cloned().collect();
    let train_subj: Vec<String> = subjects
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 5 != 4 && k % 5 != 3)
        .map(|(_, s)| s.clone())
        .collect();
    let held_subj: Vec<String> = subjects
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 5 == 4)
        .map(|(_, s)| s.clone())
        .collect();
    let mut train_seqs = Vec::new();
    for e in manifest.scans_of_subjects(&train_subj) {
        let scan = resdnet_core::dfc::load_scan(
            std::path::Path::new(&e.path),
            e.subject.clone(),
            e.scan.clone(),
            Some(e.label),
        )
        .unwrap();
        train_seqs.push(extract_dfc_sequence(&scan, &sel).unwrap());
    }
    let mut held_seqs = Vec::new();
    for e in manifest.scans_of_subjects(&held_subj) {
        let scan = resdnet_core::dfc::load_scan(
            std::path::Path::new(&e.path),
            e.subject.clone(),
            e.scan.clone(),
            Some(e.label),
        )
        .unwrap();
        held_seqs.push(extract_dfc_sequence(&scan, &sel).unwrap());
    }
    println!("train {} seqs, held-out {} seqs", train_seqs.len(), held_seqs.len());

    // Persistence baseline on held-out.
    let mut persist = 0.0;
    for seq in &held_seqs {
        let last = seq.frames[INPUT_STEPS - 1].reshaped(&[1, 28, 28]).unwrap();
        let preds = vec![last; 28];
        let targets = model_inputs(&seq.frames[INPUT_STEPS..]).unwrap();
        persist += mse_loss(&preds, &targets).unwrap();
    }
    persist /= held_seqs.len() as f64;
    println!("persistence held-out MSE: {persist:.5}");

    let mut rng = RngStream::new(7);
    let mut net = ResidualDNet::new(&mut rng).unwrap();
    let settings = TrainSettings {
        epochs: 2,
        lr: 5e-4,
        batch_size: 4,
        seed: 11,
    };
    let t3 = Instant::now();
    let curve = pretrain(&mut net, &train_seqs, &settings).unwrap();
    let per_epoch = t3.elapsed().as_secs_f64() / settings.epochs as f64;
    println!(
        "pretrain: {:.1}s/epoch over {} seqs -> 50 epochs ~ {:.1} min; loss {:?}",
        per_epoch,
        train_seqs.len(),
        50.0 * per_epoch / 60.0,
        curve
    );

    let mut held = 0.0;
    for seq in &held_seqs {
        held += prediction_loss(&mut net, seq).unwrap();
    }
    held /= held_seqs.len() as f64;
    println!(
        "after {} epochs: held-out MSE {held:.5} ({:.3}x persistence)",
        settings.epochs,
        held / persist
    );
}
