use super::{dims3, initial_terms, reconstruct, sweep, BdFactors, FitConfig, FitTrace};
use crate::error::{Error, Result};
use crate::ops::{frobenius_norm_sq, squared_distance};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// Cycles between full recomputations of the running model sum.
const RESYNC_EVERY: usize = 50;

/// Fits `y ≈ Σ_r A⁽ʳ⁾ ⊡ B⁽ʳ⁾ ⊡ C⁽ʳ⁾` with `r` terms by hierarchical ALS.
///
/// Terms are initialized as `cfg.init` says, the same way as
/// [`super::bd_als`], so `r = 1` reproduces it exactly.
pub fn sum_bd_hals(y: &DenseTensor, r: usize, cfg: &FitConfig) -> Result<(Vec<BdFactors>, FitTrace)> {
    if r < 1 {
        return Err(Error::InvalidProblem("a sum of broadcast decompositions needs R ≥ 1".into()));
    }
    cfg.validate()?;
    let init = initial_terms(y, r, cfg)?;
    sum_bd_hals_from(y, init, cfg)
}

/// [`sum_bd_hals`] from caller-supplied initial terms.
///
/// One cycle visits the terms in order; for term `k` it forms the partial
/// residual `Y_k = Y − Σ_{r≠k} A⁽ʳ⁾⊡B⁽ʳ⁾⊡C⁽ʳ⁾` and runs one ALS sweep of that
/// term against it. The model sum is maintained incrementally and rebuilt
/// every 50 cycles.
pub fn sum_bd_hals_from(
    y: &DenseTensor,
    init: Vec<BdFactors>,
    cfg: &FitConfig,
) -> Result<(Vec<BdFactors>, FitTrace)> {
    if init.is_empty() {
        return Err(Error::InvalidProblem("a sum of broadcast decompositions needs R ≥ 1".into()));
    }
    cfg.validate()?;
    let dims = dims3(y.shape())?;
    if let Some(bad) = init.iter().find(|f| f.dims() != dims) {
        return Err(Error::InvalidProblem(format!(
            "initial term is sized for {:?}, data is {:?}",
            bad.dims(),
            dims
        )));
    }
    let y = y.reshape(Shape::new(dims.to_vec())?)?;
    let scale = frobenius_norm_sq(&y);

    let mut terms = init;
    let mut parts: Vec<DenseTensor> = terms.iter().map(reconstruct).collect();
    let mut model = sum_parts(&y, &parts);

    let mut trace = FitTrace {
        initial_objective: squared_distance(&y, &model)?,
        ..Default::default()
    };
    let mut prev = trace.initial_objective;
    for cycle in 1..=cfg.max_iters {
        for k in 0..terms.len() {
            // Y_k = Y − (model − part_k)
            let partial = y.zip_with(&model.sub(&parts[k])?, |a, b| a - b)?;
            sweep(&partial, &mut terms[k], cfg.denom_epsilon, &mut trace.objective_per_update)?;
            let fresh = reconstruct(&terms[k]);
            model = model.sub(&parts[k])?.add(&fresh)?;
            parts[k] = fresh;
        }
        if cycle % RESYNC_EVERY == 0 {
            model = sum_parts(&y, &parts);
        }
        let obj = squared_distance(&y, &model)?;
        trace.objective_per_iter.push(obj);
        trace.iterations_run += 1;
        if cfg.converged(prev, obj, scale) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }
    Ok((terms, trace))
}

/// Full reconstruction of a sum of broadcast decompositions.
pub fn reconstruct_sum(terms: &[BdFactors]) -> Result<DenseTensor> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidProblem("empty sum of broadcast decompositions".into()))?;
    let mut acc = DenseTensor::zeros(Shape::new(first.dims().to_vec())?);
    for t in terms {
        acc = acc.add(&reconstruct(t))?;
    }
    Ok(acc)
}

fn sum_parts(y: &DenseTensor, parts: &[DenseTensor]) -> DenseTensor {
    let mut acc = DenseTensor::zeros(y.shape().clone());
    for p in parts {
        acc = acc.add(p).expect("parts share the data shape");
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decomposition::bd_als;
    use crate::random::{rng_from_seed, standard_normal};

    #[test]
    fn one_term_matches_als_exactly() {
        let mut rng = rng_from_seed(21);
        let y = standard_normal(Shape::new(vec![5, 4, 6]).unwrap(), &mut rng);
        let cfg = FitConfig { max_iters: 60, seed: 9, ..Default::default() };
        let (f, t1) = bd_als(&y, &cfg).unwrap();
        let (terms, t2) = sum_bd_hals(&y, 1, &cfg).unwrap();
        assert_eq!(t1, t2);
        assert_eq!(terms, vec![f]);
    }

    #[test]
    fn zero_terms_rejected() {
        let y = DenseTensor::ones(Shape::new(vec![2, 2, 2]).unwrap());
        assert!(sum_bd_hals(&y, 0, &FitConfig::default()).is_err());
        assert!(sum_bd_hals_from(&y, vec![], &FitConfig::default()).is_err());
    }

    #[test]
    fn reconstruct_sum_adds_terms() {
        let mut rng = rng_from_seed(22);
        let a = BdFactors::random([2, 3, 4], &mut rng).unwrap();
        let b = BdFactors::random([2, 3, 4], &mut rng).unwrap();
        let s = reconstruct_sum(&[a.clone(), b.clone()]).unwrap();
        let want = reconstruct(&a).add(&reconstruct(&b)).unwrap();
        assert!(s.max_abs_diff(&want) == 0.0);
    }

    #[test]
    fn long_runs_stay_monotone_across_resync() {
        let mut rng = rng_from_seed(23);
        let y = standard_normal(Shape::new(vec![4, 4, 4]).unwrap(), &mut rng);
        let cfg = FitConfig { max_iters: 120, rel_tol: 1e-300, ..Default::default() };
        let (_, trace) = sum_bd_hals(&y, 2, &cfg).unwrap();
        assert_eq!(trace.iterations_run, 120);
        assert!(trace.max_update_increase() <= 1e-10);
    }
}
