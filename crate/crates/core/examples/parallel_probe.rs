//! Check batch-parallel speedup of the training step.

use std::time::Instant;

use resdnet_core::dfc::DfcSequence;
use resdnet_core::dnet::{pretrain, ResidualDNet, TrainSettings, SEQ_LEN};
use resdnet_core::param::gaussian_init;
use resdnet_core::rng::RngStream;

fn random_seq(rng: &mut RngStream) -> DfcSequence {
    let frames = (0..SEQ_LEN)
        .map(|_| {
            let mut t = gaussian_init(&[28, 28], 0.3, rng).unwrap();
            for v in t.data_mut() {
                *v = v.clamp(-0.9, 0.9);
            }
            t
        })
        .collect();
    DfcSequence::new("s", "x", Some(0), frames).unwrap()
}

fn main() {
    println!("rayon threads: {}", rayon::current_num_threads());
    let mut rng = RngStream::new(1);
    let seqs: Vec<DfcSequence> = (0..8).map(|_| random_seq(&mut rng)).collect();

    for batch in [1usize, 2, 4, 8] {
        let mut net = ResidualDNet::new(&mut rng).unwrap();
        let settings = TrainSettings {
            epochs: 1,
            lr: 5e-4,
            batch_size: batch,
            seed: 3,
        };
        let t0 = Instant::now();
        pretrain(&mut net, &seqs, &settings).unwrap();
        println!(
            "batch {batch}: {:.2}s for 8 seqs ({:.2}s/seq)",
            t0.elapsed().as_secs_f64(),
            t0.elapsed().as_secs_f64() / 8.0
        );
    }
}
