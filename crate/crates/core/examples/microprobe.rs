//! Bisect the small-conv overhead: patch build vs gemm vs allocation.
use std::time::Instant;

fn build_patches(x: &[f64], in_ch: usize, h: usize, w: usize, patches: &mut [f64]) {
    let plane = h * w;
    for ic in 0..in_ch {
        let xp = &x[ic * plane..(ic + 1) * plane];
        for ky in 0..3usize {
            for kx in 0..3usize {
                let row = &mut patches[(ic * 9 + ky * 3 + kx) * plane..(ic * 9 + ky * 3 + kx + 1) * plane];
                let (ox_lo, ox_hi) = (usize::from(kx == 0), if kx == 2 { w - 1 } else { w });
                for oy in 0..h {
                    let iy = oy + ky;
                    if iy == 0 || iy > h { continue; }
                    let src = &xp[(iy - 1) * w + ox_lo + kx - 1..(iy - 1) * w + ox_hi + kx - 1];
                    row[oy * w + ox_lo..oy * w + ox_hi].copy_from_slice(src);
                }
            }
        }
    }
}

const MR: usize = 4;
const NR: usize = 8;

fn gemm(a: &[f64], m: usize, kc: usize, b: &[f64], n: usize, c: &mut [f64]) {
    let mut m0 = 0;
    while m0 < m {
        let rows = MR.min(m - m0);
        let mut p0 = 0;
        while p0 + NR <= n {
            let mut acc = [[0.0_f64; NR]; MR];
            for k in 0..kc {
                let r = &b[k * n + p0..k * n + p0 + NR];
                for i in 0..rows {
                    let wv = a[(m0 + i) * kc + k];
                    for j in 0..NR { acc[i][j] += wv * r[j]; }
                }
            }
            for i in 0..rows {
                let dst = &mut c[(m0 + i) * n + p0..(m0 + i) * n + p0 + NR];
                for (d, s) in dst.iter_mut().zip(&acc[i]) { *d += *s; }
            }
            p0 += NR;
        }
        m0 += MR;
    }
}

fn main() {
    let (in_ch, out_ch, h, w) = (1usize, 16usize, 28usize, 28usize);
    let plane = h * w;
    let kc = in_ch * 9;
    let x = vec![0.5_f64; in_ch * plane];
    let wt = vec![0.1_f64; out_ch * kc];
    let reps = 20000;

    let t0 = Instant::now();
    let mut sink = 0.0;
    for _ in 0..reps {
        let mut p = vec![0.0; kc * plane];
        build_patches(&x, in_ch, h, w, &mut p);
        sink += p[100];
    }
    println!("alloc+build: {:.1}us", t0.elapsed().as_secs_f64() / reps as f64 * 1e6);

    let mut p = vec![0.0; kc * plane];
    build_patches(&x, in_ch, h, w, &mut p);
    let t1 = Instant::now();
    for _ in 0..reps {
        let mut y = vec![0.0; out_ch * plane];
        gemm(&wt, out_ch, kc, &p, plane, &mut y);
        sink += y[3];
    }
    println!("alloc+gemm: {:.1}us  (sink {sink:.1})", t1.elapsed().as_secs_f64() / reps as f64 * 1e6);

    let mut y = vec![0.0; out_ch * plane];
    let t2 = Instant::now();
    for _ in 0..reps {
        y.fill(0.0);
        gemm(&wt, out_ch, kc, &p, plane, &mut y);
        sink += y[3];
    }
    println!("reused-buffer gemm: {:.1}us (sink {sink:.1})", t2.elapsed().as_secs_f64() / reps as f64 * 1e6);
}
