//! Fit a single broadcast decomposition `𝒴 ≈ 𝒜 ⊡ ℬ ⊡ 𝒞` (A: I×J×1,
//! B: I×1×K, C: 1×J×K) to noisy planted data with alternating least squares.
//!
//! cargo run --release --example broadcast_decomposition [N] [SIGMA]

use broadcast_tensor::decomposition::{bd_als, reconstruct, snr_db, BdFactors, BdInit, FitConfig};
use broadcast_tensor::random::{rng_from_seed, standard_normal};
use broadcast_tensor::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(16, |s| s.parse().expect("N must be an integer"));
    let sigma: f64 = args.next().map_or(0.1, |s| s.parse().expect("SIGMA must be a number"));

    let mut rng = rng_from_seed(7);
    let planted = BdFactors::random([n, n, n], &mut rng)?;
    let signal = reconstruct(&planted);
    let y = signal.add(&standard_normal(signal.shape().clone(), &mut rng).scale(sigma))?;
    println!("{n}×{n}×{n}, sigma {sigma}, {} parameters per term", planted.param_count());

    for init in [BdInit::Structured, BdInit::Random] {
        let cfg = FitConfig { init, ..Default::default() };
        let (f, trace) = bd_als(&y, &cfg)?;
        println!(
            "{init:?} start: {} sweeps (converged {}), objective {:.4e} -> {:.4e}, SNR vs signal {:.2} dB",
            trace.iterations_run,
            trace.converged,
            trace.initial_objective,
            trace.final_objective(),
            snr_db(&signal, &reconstruct(&f))?
        );
    }
    Ok(())
}
