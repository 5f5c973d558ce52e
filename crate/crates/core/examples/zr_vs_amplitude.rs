//! Prints Z_R next to the IQP all-zeros amplitude for random instances.
//! Exploratory only: no relation between the two is asserted.
//!
//! `cargo run --release --example zr_vs_amplitude -- [instances] [max_n]`

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wgverify::iqp::{build_iqp_state, compute_z_r, IqpInstance};

fn main() -> wgverify::Result<()> {
    let mut args = std::env::args()
        .skip(1)
        .map(|a| a.parse::<usize>().expect("integer argument"));
    let count = args.next().unwrap_or(10);
    let max_n = args.next().unwrap_or(6);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    println!("n,re_zr,im_zr,abs2_zr_over_4n,p_zero");
    for _ in 0..count {
        let n = rng.random_range(1..=max_n);
        let mut w = Vec::new();
        for j in 1..=n {
            for k in j + 1..=n {
                w.push((j, k, rng.random_range(0..8u8)));
            }
        }
        let v: Vec<(usize, u8)> = (1..=n).map(|l| (l, rng.random_range(0..8u8))).collect();
        let inst = IqpInstance::new(n, w, v)?;
        let z = compute_z_r(&inst)?;
        let p0 = build_iqp_state(&inst)?.state()?.amplitudes()[0].norm_sqr();
        println!(
            "{n},{},{},{},{p0}",
            z.re,
            z.im,
            z.norm_sqr() / 4f64.powi(n as i32)
        );
    }
    Ok(())
}
