//! Inspect per-frame swings of single correlation entries per class.

use resdnet_core::dfc::extract_dfc_sequence;
use resdnet_core::rng::RngStream;
use resdnet_core::synthgen::{build_subjects, generate_scan, simulate_state_chain, CohortSpec};

fn main() {
    let spec = CohortSpec::default();
    let subjects = build_subjects(&spec).unwrap();
    let slow = &subjects[0]; // label 0
    let fast = &subjects[30]; // label 1
    for (name, subj) in [("slow", slow), ("fast", fast)] {
        let mut rng = RngStream::new(99);
        let scan = generate_scan(subj, "probe", &spec, &mut rng).unwrap();
        let seq = extract_dfc_sequence(&scan, &spec.roi_selection).unwrap();
        // Pair (0, 1): within block A, opposite parity -> sigma_A 0.6, sigma_B 0.
        let series: Vec<f64> = seq.frames.iter().map(|f| f.data()[1]).collect();
        let head: Vec<String> = series.iter().map(|v| format!("{v:+.2}")).collect();
        println!("{name} pair(0,1): {}", head.join(" "));
        // Pair (0, 14): cross block, same parity -> sigma_A 0, sigma_B 0.6.
        let series2: Vec<f64> = seq.frames.iter().map(|f| f.data()[14]).collect();
        let head2: Vec<String> = series2.iter().map(|v| format!("{v:+.2}")).collect();
        println!("{name} pair(0,14): {}", head2.join(" "));
        let mut rng2 = RngStream::new(99);
        let dwell = if subj.label == 0 { spec.dwell_slow } else { spec.dwell_fast };
        let states = simulate_state_chain(dwell, 130, &mut rng2);
        let s: String = states.iter().map(|&x| char::from(b'0' + x)).collect();
        println!("{name} states:     {s}");
    }
}
