//! Sum of broadcast decompositions fitted by hierarchical ALS, for a range
//! of term counts.
//!
//! cargo run --release --example sum_of_bd

use broadcast_tensor::decomposition::{reconstruct_sum, snr_db, sum_bd_hals, sum_bd_param_count, BdFactors, FitConfig};
use broadcast_tensor::random::{rng_from_seed, standard_normal};
use broadcast_tensor::Result;

fn main() -> Result<()> {
    let dims = [10, 12, 8];
    let mut rng = rng_from_seed(3);
    let planted: Vec<BdFactors> = (0..2).map(|_| BdFactors::random(dims, &mut rng)).collect::<Result<_>>()?;
    let signal = reconstruct_sum(&planted)?;
    let y = signal.add(&standard_normal(signal.shape().clone(), &mut rng).scale(0.05))?;

    println!("{:>2} {:>7} {:>7} {:>10} {:>12}", "R", "params", "cycles", "objective", "SNR signal");
    for r in 1..=4 {
        let (terms, trace) = sum_bd_hals(&y, r, &FitConfig { max_iters: 1000, ..Default::default() })?;
        println!(
            "{r:>2} {:>7} {:>7} {:>10.4} {:>12.2}",
            sum_bd_param_count(dims, r),
            trace.iterations_run,
            trace.final_objective(),
            snr_db(&signal, &reconstruct_sum(&terms)?)?
        );
        assert!(trace.max_update_increase() <= 1e-10);
    }
    Ok(())
}
