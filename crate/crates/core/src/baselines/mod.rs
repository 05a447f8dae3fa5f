//! Conventional low-rank baselines (CP-ALS and Tucker-HOOI) and a common
//! parameter count for comparing them with sums of broadcast decompositions.

mod cp;
mod tucker;

pub use cp::{cp_als, cp_als_from, CpModel};
pub use tucker::{mode_product, tucker_hooi, TuckerModel};

use nalgebra::DMatrix;

use crate::decomposition::{reconstruct_sum, BdFactors};
use crate::error::Result;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// Any fitted third-order model.
#[derive(Debug, Clone)]
pub enum Model {
    Cp(CpModel),
    Tucker(TuckerModel),
    SumBd(Vec<BdFactors>),
}

impl Model {
    pub fn reconstruct(&self) -> Result<DenseTensor> {
        match self {
            Model::Cp(m) => Ok(m.reconstruct()),
            Model::Tucker(m) => m.reconstruct(),
            Model::SumBd(terms) => reconstruct_sum(terms),
        }
    }
}

/// Number of free parameters:
/// CP `R(I+J+K)`, Tucker `r1 r2 r3 + I r1 + J r2 + K r3`, sum of BDs `R(IJ+IK+JK)`.
pub fn param_count(model: &Model) -> usize {
    match model {
        Model::Cp(m) => m.param_count(),
        Model::Tucker(m) => m.param_count(),
        Model::SumBd(terms) => terms.iter().map(BdFactors::param_count).sum(),
    }
}

/// Column-major tensor of shape `rows × cols` viewed as a matrix.
pub(crate) fn to_matrix(t: &DenseTensor) -> DMatrix<f64> {
    let rows = t.dims()[0];
    DMatrix::from_column_slice(rows, t.numel() / rows, t.data())
}

pub(crate) fn from_matrix(m: &DMatrix<f64>) -> DenseTensor {
    DenseTensor::new(
        Shape::new(vec![m.nrows(), m.ncols()]).expect("matrix dims are positive"),
        m.as_slice().to_vec(),
    )
    .expect("length matches")
}
