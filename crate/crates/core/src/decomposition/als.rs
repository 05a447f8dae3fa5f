use super::{dims3, initial_terms, reconstruct, sweep, BdFactors, FitConfig, FitTrace};
use crate::error::Result;
use crate::ops::{frobenius_norm_sq, squared_distance};
use crate::tensor::DenseTensor;

/// Fits `y ≈ A ⊡ B ⊡ C` by alternating least squares, starting as `cfg.init` says.
pub fn bd_als(y: &DenseTensor, cfg: &FitConfig) -> Result<(BdFactors, FitTrace)> {
    cfg.validate()?;
    let init = initial_terms(y, 1, cfg)?.remove(0);
    bd_als_from(y, init, cfg)
}

/// [`bd_als`] from caller-supplied initial factors.
pub fn bd_als_from(y: &DenseTensor, init: BdFactors, cfg: &FitConfig) -> Result<(BdFactors, FitTrace)> {
    cfg.validate()?;
    let dims = dims3(y.shape())?;
    if init.dims() != dims {
        return Err(crate::Error::InvalidProblem(format!(
            "initial factors are sized for {:?}, data is {:?}",
            init.dims(),
            dims
        )));
    }
    let y = y.reshape(crate::Shape::new(dims.to_vec())?)?;
    let scale = frobenius_norm_sq(&y);

    let mut f = init;
    let mut trace = FitTrace {
        initial_objective: squared_distance(&y, &reconstruct(&f))?,
        ..Default::default()
    };
    let mut prev = trace.initial_objective;
    for _ in 0..cfg.max_iters {
        let obj = sweep(&y, &mut f, cfg.denom_epsilon, &mut trace.objective_per_update)?;
        trace.objective_per_iter.push(obj);
        trace.iterations_run += 1;
        if cfg.converged(prev, obj, scale) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }
    Ok((f, trace))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{rng_from_seed, standard_normal};
    use crate::Shape;

    #[test]
    fn planted_init_converges_in_one_sweep() {
        let mut rng = rng_from_seed(11);
        let f = BdFactors::random([5, 6, 7], &mut rng).unwrap();
        let y = reconstruct(&f);
        let (_, trace) = bd_als_from(&y, f, &FitConfig::default()).unwrap();
        assert_eq!(trace.iterations_run, 1);
        assert!(trace.converged);
        assert!(trace.final_objective() <= 1e-24 * frobenius_norm_sq(&y));
    }

    #[test]
    fn single_iteration_contract() {
        let mut rng = rng_from_seed(12);
        let y = standard_normal(Shape::new(vec![4, 5, 6]).unwrap(), &mut rng);
        let cfg = FitConfig { max_iters: 1, ..Default::default() };
        let (_, trace) = bd_als(&y, &cfg).unwrap();
        assert_eq!(trace.objective_per_iter.len(), 1);
        assert_eq!(trace.objective_per_update.len(), 3);
        assert_eq!(trace.iterations_run, 1);
    }

    #[test]
    fn rejects_mismatched_init() {
        let mut rng = rng_from_seed(13);
        let y = standard_normal(Shape::new(vec![4, 5, 6]).unwrap(), &mut rng);
        let f = BdFactors::random([4, 5, 7], &mut rng).unwrap();
        assert!(bd_als_from(&y, f, &FitConfig::default()).is_err());
        assert!(bd_als(&DenseTensor::zeros(Shape::new(vec![2, 2, 2, 2]).unwrap()), &FitConfig::default()).is_err());
    }
}
