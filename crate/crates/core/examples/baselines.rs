//! CP-ALS and Tucker-HOOI on the same noisy data, with parameter counts.
//!
//! cargo run --release --example baselines

use broadcast_tensor::baselines::{cp_als, tucker_hooi};
use broadcast_tensor::decomposition::{snr_db, FitConfig};
use broadcast_tensor::experiment::generate_synthetic;
use broadcast_tensor::Result;

fn main() -> Result<()> {
    let (signal, y) = generate_synthetic([12, 12, 12], 0.1, 0)?;
    let cfg = FitConfig::default();
    println!("{:<12} {:>7} {:>7} {:>12}", "model", "params", "sweeps", "SNR signal");
    for r in [1, 4, 16, 32] {
        let (m, t) = cp_als(&y, r, &cfg)?;
        println!("{:<12} {:>7} {:>7} {:>12.2}", format!("cp R={r}"), m.param_count(), t.iterations_run, snr_db(&signal, &m.reconstruct())?);
    }
    for r in [1, 4, 8, 12] {
        let (m, t) = tucker_hooi(&y, [r, r, r], &cfg)?;
        let name = format!("tucker {r}x{r}x{r}");
        println!("{:<12} {:>7} {:>7} {:>12.2}", name, m.param_count(), t.iterations_run, snr_db(&signal, &m.reconstruct()?)?);
    }
    Ok(())
}
