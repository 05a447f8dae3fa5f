//! Seeded generation of standard-normal tensors.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::shape::Shape;
use crate::tensor::DenseTensor;

pub type Rng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// I.i.d. `N(0, 1)` entries, drawn in column-major order.
pub fn standard_normal(shape: Shape, rng: &mut Rng) -> DenseTensor {
    let data = (0..shape.numel())
        .map(|_| StandardNormal.sample(rng))
        .collect();
    DenseTensor::new(shape, data).expect("length matches shape")
}
