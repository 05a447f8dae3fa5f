//! The broadcast operator family, marginalization and mode sums.
//!
//! Every binary operator first replicates both operands to the per-mode
//! maximum of their shapes (see [`DenseTensor::bc`]) and then combines them
//! elementwise. The replication here is virtual (zero strides), which gives
//! the same values as materializing both operands.

use crate::error::{Error, Result};
use crate::shape::Shape;
use crate::tensor::{broadcast_strides, walk, walk2, DenseTensor};

/// The four broadcast operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BroadcastOp {
    /// `⊡`: Hadamard product after replication.
    Product,
    /// `⊞`
    Sum,
    /// `⊟`
    Difference,
    /// `⧄`: the divisor must not contain zeros.
    Division,
}

impl BroadcastOp {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            BroadcastOp::Product => a * b,
            BroadcastOp::Sum => a + b,
            BroadcastOp::Difference => a - b,
            BroadcastOp::Division => a / b,
        }
    }
}

/// `bc(x, shape(y)) ∘ bc(y, shape(x))` for the chosen elementwise operation `∘`.
pub fn broadcast_apply(op: BroadcastOp, x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    let out = x.shape().broadcast_with(y.shape())?;
    if op == BroadcastOp::Division {
        if let Some(index) = y.data().iter().position(|&v| v == 0.0) {
            return Err(Error::DivisionByZero { index });
        }
    }
    let (xd, yd) = (x.data(), y.data());
    let mut data = Vec::with_capacity(out.numel());
    if x.shape().is_equivalent(y.shape()) {
        data.extend(xd.iter().zip(yd).map(|(&a, &b)| op.apply(a, b)));
    } else {
        let sx = broadcast_strides(x.shape(), &out);
        let sy = broadcast_strides(y.shape(), &out);
        walk2(out.dims(), &sx, &sy, |i, j| data.push(op.apply(xd[i], yd[j])));
    }
    DenseTensor::new(out, data)
}

/// `x ⊡ y`
pub fn product(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    broadcast_apply(BroadcastOp::Product, x, y)
}

/// `x ⊞ y`
pub fn sum(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    broadcast_apply(BroadcastOp::Sum, x, y)
}

/// `x ⊟ y`
pub fn difference(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    broadcast_apply(BroadcastOp::Difference, x, y)
}

/// `x ⧄ y`
pub fn division(x: &DenseTensor, y: &DenseTensor) -> Result<DenseTensor> {
    broadcast_apply(BroadcastOp::Division, x, y)
}

/// Sums out each listed mode (0-based), keeping it with length 1.
///
/// Each output entry accumulates its inputs in column-major order starting
/// from `0.0`, so results are reproducible bit for bit.
pub fn mode_sum(x: &DenseTensor, modes: &[usize]) -> Result<DenseTensor> {
    if let Some(&bad) = modes.iter().find(|&&m| m >= x.order()) {
        return Err(Error::ModeOutOfRange {
            mode: bad + 1,
            order: x.order(),
        });
    }
    if modes.iter().all(|&m| x.dims()[m] == 1) {
        return Ok(x.clone());
    }
    let out_dims: Vec<usize> = x
        .dims()
        .iter()
        .enumerate()
        .map(|(m, &d)| if modes.contains(&m) { 1 } else { d })
        .collect();
    let out_shape = Shape::new(out_dims)?;
    let strides = broadcast_strides(&out_shape, x.shape());
    let mut acc = vec![0.0; out_shape.numel()];
    let src = x.data();
    let mut i = 0;
    walk(x.dims(), &strides, |off| {
        acc[off] += src[i];
        i += 1;
    });
    DenseTensor::new(out_shape, acc)
}

/// Shrinks `x` against the partner shape `other`: every entry is the
/// Frobenius norm of the fiber of `x` running over the modes where `other`
/// has length 1. The result has the per-mode minimum shape and is
/// nonnegative (a fiber of one element yields its absolute value).
pub fn marginalize(x: &DenseTensor, other: &Shape) -> Result<DenseTensor> {
    let target = x.shape().marginal_with(other)?;
    let order = target.order();
    let x = x.reshape(x.shape().padded(order))?;
    let other = other.padded(order);
    let reduce: Vec<usize> = (0..order)
        .filter(|&m| other.dims()[m] == 1 && x.dims()[m] > 1)
        .collect();
    let squared = mode_sum(&x.map(|v| v * v), &reduce)?;
    squared.map(f64::sqrt).reshape(target)
}

/// `‖x‖_F²`, accumulated in column-major order with compensated summation.
pub fn frobenius_norm_sq(x: &DenseTensor) -> f64 {
    compensated_sum(x.data().iter().map(|v| v * v))
}

/// `‖x‖_F = √(Σ x²)`.
pub fn frobenius_norm(x: &DenseTensor) -> f64 {
    frobenius_norm_sq(x).sqrt()
}

/// `‖x − y‖_F²` without materializing the difference.
pub fn squared_distance(x: &DenseTensor, y: &DenseTensor) -> Result<f64> {
    if !x.shape().is_equivalent(y.shape()) {
        return Err(Error::InvalidProblem(format!(
            "distance needs equal shapes, got {} and {}",
            x.shape(),
            y.shape()
        )));
    }
    Ok(compensated_sum(
        x.data().iter().zip(y.data()).map(|(a, b)| (a - b) * (a - b)),
    ))
}

// Neumaier's variant of Kahan summation.
fn compensated_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0f64;
    let mut carry = 0.0f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            carry += (sum - t) + v;
        } else {
            carry += (v - t) + sum;
        }
        sum = t;
    }
    sum + carry
}
