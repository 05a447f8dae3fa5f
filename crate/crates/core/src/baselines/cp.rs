//! CP decomposition fitted by alternating least squares.
//!
//! The mode-1 update solves `U1 · V = Y_(1) (U3 ⊙ U2)` with
//! `V = (U2ᵀU2) * (U3ᵀU3)` (Hadamard product of Gram matrices); modes 2 and 3
//! are analogous. The right-hand side is accumulated straight from the tensor
//! without forming the Khatri–Rao product.

use nalgebra::DMatrix;

use crate::decomposition::{dims3, FitConfig, FitTrace};
use crate::error::{Error, Result};
use crate::ops::{frobenius_norm_sq, squared_distance};
use crate::random::{rng_from_seed, standard_normal};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, PartialEq)]
pub struct CpModel {
    /// `U1: I×R`, `U2: J×R`, `U3: K×R`.
    pub factors: [DMatrix<f64>; 3],
}

impl CpModel {
    pub fn new(factors: [DMatrix<f64>; 3]) -> Result<Self> {
        let r = factors[0].ncols();
        if r == 0 || factors.iter().any(|u| u.ncols() != r || u.nrows() == 0) {
            return Err(Error::InvalidProblem(
                "CP factors need a common positive number of columns".into(),
            ));
        }
        Ok(CpModel { factors })
    }

    pub fn rank(&self) -> usize {
        self.factors[0].ncols()
    }

    pub fn dims(&self) -> [usize; 3] {
        [self.factors[0].nrows(), self.factors[1].nrows(), self.factors[2].nrows()]
    }

    /// `R(I+J+K)`
    pub fn param_count(&self) -> usize {
        self.rank() * self.dims().iter().sum::<usize>()
    }

    /// `Σ_r u1_r ∘ u2_r ∘ u3_r`
    pub fn reconstruct(&self) -> DenseTensor {
        let [i_len, j_len, k_len] = self.dims();
        let [u1, u2, u3] = &self.factors;
        let mut data = vec![0.0; i_len * j_len * k_len];
        for k in 0..k_len {
            for j in 0..j_len {
                let col = &mut data[(j + j_len * k) * i_len..][..i_len];
                for r in 0..self.rank() {
                    let w = u2[(j, r)] * u3[(k, r)];
                    for (i, v) in col.iter_mut().enumerate() {
                        *v += u1[(i, r)] * w;
                    }
                }
            }
        }
        DenseTensor::new(
            Shape::new(vec![i_len, j_len, k_len]).expect("positive dims"),
            data,
        )
        .expect("length matches")
    }
}

/// Rank-`r` CP-ALS from standard-normal factors drawn with `cfg.seed`.
pub fn cp_als(y: &DenseTensor, r: usize, cfg: &FitConfig) -> Result<(CpModel, FitTrace)> {
    if r < 1 {
        return Err(Error::InvalidProblem("CP rank must be at least 1".into()));
    }
    cfg.validate()?;
    let [i, j, k] = dims3(y.shape())?;
    let mut rng = rng_from_seed(cfg.seed);
    let mut draw = |rows: usize| {
        let t = standard_normal(Shape::new(vec![rows, r]).expect("positive dims"), &mut rng);
        DMatrix::from_column_slice(rows, r, t.data())
    };
    let init = CpModel::new([draw(i), draw(j), draw(k)])?;
    cp_als_from(y, init, cfg)
}

/// [`cp_als`] from caller-supplied factors. Updates run U1, U2, U3 per sweep.
pub fn cp_als_from(y: &DenseTensor, init: CpModel, cfg: &FitConfig) -> Result<(CpModel, FitTrace)> {
    cfg.validate()?;
    let dims = dims3(y.shape())?;
    if init.dims() != dims {
        return Err(Error::InvalidProblem(format!(
            "CP factors are sized for {:?}, data is {:?}",
            init.dims(),
            dims
        )));
    }
    let y = y.reshape(Shape::new(dims.to_vec())?)?;
    let scale = frobenius_norm_sq(&y);

    let mut model = init;
    let mut trace = FitTrace {
        initial_objective: squared_distance(&y, &model.reconstruct())?,
        ..Default::default()
    };
    let mut prev = trace.initial_objective;
    let mut obj = prev;
    for _ in 0..cfg.max_iters {
        for mode in 0..3 {
            let rhs = mttkrp(&y, &model, mode);
            let (p, q) = match mode {
                0 => (1, 2),
                1 => (0, 2),
                _ => (0, 1),
            };
            let gram = (model.factors[p].transpose() * &model.factors[p])
                .component_mul(&(model.factors[q].transpose() * &model.factors[q]));
            model.factors[mode] = solve_normal_equations(&gram, &rhs, cfg.denom_epsilon);
            obj = squared_distance(&y, &model.reconstruct())?;
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

/// `Y_(n) · (Khatri–Rao product of the other factors)`, an `I_n × R` matrix.
fn mttkrp(y: &DenseTensor, model: &CpModel, mode: usize) -> DMatrix<f64> {
    let [i_len, j_len, k_len] = model.dims();
    let r_len = model.rank();
    let [u1, u2, u3] = &model.factors;
    let mut out = DMatrix::zeros(model.dims()[mode], r_len);
    let data = y.data();
    for k in 0..k_len {
        for j in 0..j_len {
            let fiber = &data[(j + j_len * k) * i_len..][..i_len];
            for r in 0..r_len {
                match mode {
                    0 => {
                        let w = u2[(j, r)] * u3[(k, r)];
                        for (i, &v) in fiber.iter().enumerate() {
                            out[(i, r)] += v * w;
                        }
                    }
                    1 => {
                        let dot: f64 = fiber.iter().enumerate().map(|(i, &v)| v * u1[(i, r)]).sum();
                        out[(j, r)] += dot * u3[(k, r)];
                    }
                    _ => {
                        let dot: f64 = fiber.iter().enumerate().map(|(i, &v)| v * u1[(i, r)]).sum();
                        out[(k, r)] += dot * u2[(j, r)];
                    }
                }
            }
        }
    }
    out
}

/// Solves `U · gram = rhs` for `U` by Cholesky. When `gram` is not numerically
/// positive definite a ridge starting at `eps·max(1, mean diagonal)` is added
/// and grown tenfold until the factorization succeeds.
fn solve_normal_equations(gram: &DMatrix<f64>, rhs: &DMatrix<f64>, eps: f64) -> DMatrix<f64> {
    let n = gram.nrows();
    let scale = (gram.trace() / n as f64).max(1.0);
    let mut ridge = 0.0;
    let mut step = if eps > 0.0 { eps * scale } else { f64::EPSILON * scale };
    loop {
        let mut g = gram.clone();
        for d in 0..n {
            g[(d, d)] += ridge;
        }
        if let Some(chol) = g.cholesky() {
            // gram is symmetric: U·G = B  ⇔  G·Uᵀ = Bᵀ
            return chol.solve(&rhs.transpose()).transpose();
        }
        ridge = step;
        step *= 10.0;
    }
}
