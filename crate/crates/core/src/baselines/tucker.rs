//! Tucker decomposition by higher-order orthogonal iteration (HOOI),
//! initialized with the truncated HOSVD.

use nalgebra::{DMatrix, SVD};

use super::{from_matrix, to_matrix};
use crate::decomposition::{dims3, FitConfig, FitTrace};
use crate::error::{Error, Result};
use crate::ops::{frobenius_norm_sq, squared_distance};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// `Y ≈ G ×1 U1 ×2 U2 ×3 U3` with orthonormal factor columns.
#[derive(Debug, Clone, PartialEq)]
pub struct TuckerModel {
    /// `r1×r2×r3`
    pub core: DenseTensor,
    /// `U1: I×r1`, `U2: J×r2`, `U3: K×r3`.
    pub factors: [DMatrix<f64>; 3],
}

impl TuckerModel {
    pub fn ranks(&self) -> [usize; 3] {
        [self.factors[0].ncols(), self.factors[1].ncols(), self.factors[2].ncols()]
    }

    /// `r1 r2 r3 + I r1 + J r2 + K r3`
    pub fn param_count(&self) -> usize {
        self.core.numel() + self.factors.iter().map(|u| u.len()).sum::<usize>()
    }

    pub fn reconstruct(&self) -> Result<DenseTensor> {
        let mut t = self.core.reshape(self.core.shape().padded(3))?;
        for (mode, u) in self.factors.iter().enumerate() {
            t = mode_product(&t, u, mode)?;
        }
        Ok(t)
    }
}

/// `x ×_mode m`: multiplies every mode-`mode` fiber by `m`, so that mode's
/// length becomes `m.nrows()`.
pub fn mode_product(x: &DenseTensor, m: &DMatrix<f64>, mode: usize) -> Result<DenseTensor> {
    let unfolded = to_matrix(&x.unfold(mode)?);
    if m.ncols() != unfolded.nrows() {
        return Err(Error::InvalidProblem(format!(
            "mode-{} product needs a matrix with {} columns, got {}",
            mode + 1,
            unfolded.nrows(),
            m.ncols()
        )));
    }
    let mut dims = x.dims().to_vec();
    dims[mode] = m.nrows();
    DenseTensor::fold(&from_matrix(&(m * unfolded)), mode, &Shape::new(dims)?)
}

/// Fits a Tucker model with multilinear ranks `ranks`.
///
/// Each sweep replaces `U_n` (n = 1, 2, 3) by the `r_n` dominant left
/// singular vectors of `Y` projected on the other two factors. The objective
/// is recorded after every factor update.
pub fn tucker_hooi(y: &DenseTensor, ranks: [usize; 3], cfg: &FitConfig) -> Result<(TuckerModel, FitTrace)> {
    cfg.validate()?;
    let dims = dims3(y.shape())?;
    for (n, (&r, &d)) in ranks.iter().zip(&dims).enumerate() {
        if r < 1 || r > d {
            return Err(Error::InvalidProblem(format!(
                "Tucker rank {r} for mode {} must lie in 1..={d}",
                n + 1
            )));
        }
    }
    let y = y.reshape(Shape::new(dims.to_vec())?)?;
    let scale = frobenius_norm_sq(&y);

    // truncated HOSVD
    let mut factors = [0, 1, 2].map(|n| {
        let unfolded = to_matrix(&y.unfold(n).expect("mode in range"));
        leading_left_singular_vectors(&unfolded, ranks[n])
    });
    let mut model = fit_core(&y, &factors)?;
    let mut trace = FitTrace {
        initial_objective: squared_distance(&y, &model.reconstruct()?)?,
        ..Default::default()
    };

    let mut prev = trace.initial_objective;
    let mut obj = prev;
    for _ in 0..cfg.max_iters {
        for n in 0..3 {
            let mut projected = y.clone();
            for m in (0..3).filter(|&m| m != n) {
                projected = mode_product(&projected, &factors[m].transpose(), m)?;
            }
            factors[n] = leading_left_singular_vectors(&to_matrix(&projected.unfold(n)?), ranks[n]);
            model = fit_core(&y, &factors)?;
            obj = squared_distance(&y, &model.reconstruct()?)?;
            trace.objective_per_update.push(obj);
        }
        trace.objective_per_iter.push(obj);
        trace.iterations_run += 1;
        if cfg.converged(prev, obj, scale) {
            trace.converged = true;
            break;
        }
        prev = obj;
    }
    Ok((model, trace))
}

fn fit_core(y: &DenseTensor, factors: &[DMatrix<f64>; 3]) -> Result<TuckerModel> {
    let mut core = y.clone();
    for (mode, u) in factors.iter().enumerate() {
        core = mode_product(&core, &u.transpose(), mode)?;
    }
    Ok(TuckerModel {
        core,
        factors: factors.clone(),
    })
}

/// Orthonormal basis of the dominant `rank`-dimensional column space of `m`.
fn leading_left_singular_vectors(m: &DMatrix<f64>, rank: usize) -> DMatrix<f64> {
    let rows = m.nrows();
    // Pad with zero columns so a full set of left singular vectors exists.
    let padded = if m.ncols() < rows {
        let mut p = DMatrix::zeros(rows, rows);
        p.columns_mut(0, m.ncols()).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, true, false);
    let u = svd.u.expect("left singular vectors were requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| {
        svd.singular_values[b]
            .partial_cmp(&svd.singular_values[a])
            .expect("singular values are finite")
            .then(a.cmp(&b))
    });
    let mut out = DMatrix::zeros(rows, rank);
    for (c, &src) in order.iter().take(rank).enumerate() {
        out.set_column(c, &u.column(src));
    }
    out
}
