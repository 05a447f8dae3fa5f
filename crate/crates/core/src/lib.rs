//! Dense column-major tensors with the broadcast product operator family.
//!
//! Two tensors are *compatible* when, after padding the shorter shape with
//! trailing ones, every mode has equal lengths or length 1 on one side. The
//! broadcast product `x ⊡ y` replicates length-1 modes and multiplies
//! elementwise; sum, difference and division follow the same rule.
//!
//! On top of the operators the crate provides
//!
//! * [`lstsq`]: the closed-form least-squares solve `min_W ‖X − W ⊡ H‖`,
//! * [`decomposition`]: broadcast decomposition `Y ≈ A ⊡ B ⊡ C` by ALS and
//!   its rank-`R` sum by hierarchical ALS,
//! * [`baselines`]: CP-ALS and Tucker-HOOI for comparison,
//! * [`experiment`]: a seeded synthetic rank sweep reporting SNR against
//!   parameter count,
//! * [`btf`]: a plain-text tensor file format.
//!
//! Modes are 0-based in the API; error messages count them from 1.
//!
//! ```
//! use broadcast_tensor::{ops, DenseTensor};
//!
//! // 3×1 times 1×2 is an outer product
//! let x = DenseTensor::from_dims(&[3, 1], vec![1.0, 2.0, 3.0]).unwrap();
//! let y = DenseTensor::from_dims(&[1, 2], vec![10.0, 20.0]).unwrap();
//! let z = ops::product(&x, &y).unwrap();
//! assert_eq!(z.dims(), &[3, 2]);
//! assert_eq!(z.data(), &[10.0, 20.0, 30.0, 20.0, 40.0, 60.0]);
//! ```

pub mod baselines;
pub mod btf;
pub mod decomposition;
pub mod error;
pub mod experiment;
pub mod lstsq;
pub mod ops;
pub mod random;
pub mod shape;
pub mod tensor;

pub use error::{Error, Result};
pub use ops::BroadcastOp;
pub use shape::{ModePartition, Shape};
pub use tensor::DenseTensor;
