//! Quick wall-clock calibration of the hot kernels. Run with
//! `cargo run --release -p resdnet-core --example kernel_timing`.

use resdnet_core::layers::Conv2D;
use resdnet_core::param::gaussian_init;
use resdnet_core::rng::RngStream;
use std::time::Instant;

fn time_conv(in_ch: usize, out_ch: usize, hw: usize, reps: usize) {
    let mut rng = RngStream::new(1);
    let mut layer = Conv2D::new("t", in_ch, out_ch, &mut rng).unwrap();
    let x = gaussian_init(&[in_ch, hw, hw], 1.0, &mut rng).unwrap();
    let y0 = layer.forward(&x).unwrap();

    let t0 = Instant::now();
    let mut sink = 0.0;
    for _ in 0..reps {
        let y = layer.forward(&x).unwrap();
        sink += y.data()[0];
    }
    let fwd = t0.elapsed().as_secs_f64();

    let t1 = Instant::now();
    for _ in 0..reps {
        let dx = layer.backward(&x, &y0).unwrap();
        sink += dx.data()[0];
    }
    let bwd = t1.elapsed().as_secs_f64();

    let macs = (out_ch * in_ch * 9 * hw * hw) as f64;
    println!(
        "conv {in_ch:>3}->{out_ch:>3} @{hw:>2}x{hw:<2}  fwd {:>7.2} GFLOP/s   bwd {:>7.2} GFLOP/s   (sink {sink:.3e})",
        2.0 * macs * reps as f64 / fwd / 1e9,
        3.0 * 2.0 * macs * reps as f64 / bwd / 1e9,
    );
}

fn main() {
    time_conv(1, 16, 28, 20000);
    time_conv(16, 16, 28, 2000);
    time_conv(32, 64, 14, 2000); // clstm1 gate conv
    time_conv(16, 32, 14, 2000);
    time_conv(64, 128, 7, 2000); // clstm2 gate conv
    time_conv(16, 16, 14, 4000);
}
