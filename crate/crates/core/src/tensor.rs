//! Dense column-major tensors and their layout operations.
//!
//! Element `(i_1, …, i_N)` (1-based) lives at linear index
//! `(i_1 − 1) + I_1·(i_2 − 1) + I_1·I_2·(i_3 − 1) + …`, i.e. the first mode
//! varies fastest. The API itself takes 0-based indices and mode numbers.

use crate::error::{Error, Result};
use crate::shape::Shape;

/// A shape plus its column-major element buffer. Immutable once built.
#[derive(Clone, PartialEq)]
pub struct DenseTensor {
    shape: Shape,
    data: Vec<f64>,
}

impl DenseTensor {
    /// Builds a tensor from column-major values; the value count must match the shape.
    pub fn new(shape: Shape, data: Vec<f64>) -> Result<Self> {
        let expected = shape.numel();
        if data.len() != expected {
            return Err(Error::LengthMismatch {
                shape,
                expected,
                actual: data.len(),
            });
        }
        Ok(DenseTensor { shape, data })
    }

    /// Convenience wrapper over [`Shape::new`] and [`DenseTensor::new`].
    pub fn from_dims(dims: &[usize], data: Vec<f64>) -> Result<Self> {
        DenseTensor::new(Shape::new(dims.to_vec())?, data)
    }

    pub fn full(shape: Shape, value: f64) -> Self {
        let data = vec![value; shape.numel()];
        DenseTensor { shape, data }
    }

    pub fn zeros(shape: Shape) -> Self {
        Self::full(shape, 0.0)
    }

    pub fn ones(shape: Shape) -> Self {
        Self::full(shape, 1.0)
    }

    pub fn scalar(value: f64) -> Self {
        Self::full(Shape::scalar(), value)
    }

    /// Fills every element from its 0-based multi-index, visited in column-major order.
    pub fn from_fn(shape: Shape, mut f: impl FnMut(&[usize]) -> f64) -> Self {
        let dims = shape.dims().to_vec();
        let mut idx = vec![0usize; dims.len()];
        let mut data = Vec::with_capacity(shape.numel());
        for _ in 0..shape.numel() {
            data.push(f(&idx));
            for (i, &d) in idx.iter_mut().zip(&dims) {
                *i += 1;
                if *i < d {
                    break;
                }
                *i = 0;
            }
        }
        DenseTensor { shape, data }
    }

    pub fn shape(&self) -> &Shape {
        &self.shape
    }

    pub fn dims(&self) -> &[usize] {
        self.shape.dims()
    }

    pub fn order(&self) -> usize {
        self.shape.order()
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    /// Linear offset of a 0-based multi-index. Missing trailing indices count as 0.
    pub fn linear_index(&self, index: &[usize]) -> Option<usize> {
        if index.len() > self.order() && index[self.order()..].iter().any(|&i| i != 0) {
            return None;
        }
        let mut offset = 0;
        let mut stride = 1;
        for (m, &d) in self.dims().iter().enumerate() {
            let i = index.get(m).copied().unwrap_or(0);
            if i >= d {
                return None;
            }
            offset += i * stride;
            stride *= d;
        }
        Some(offset)
    }

    /// Element at a 0-based multi-index.
    pub fn get(&self, index: &[usize]) -> Option<f64> {
        self.linear_index(index).map(|i| self.data[i])
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> DenseTensor {
        DenseTensor {
            shape: self.shape.clone(),
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> DenseTensor {
        self.map(|x| k * x)
    }

    /// Elementwise combination of two tensors of equivalent shape.
    pub fn zip_with(&self, other: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> Result<DenseTensor> {
        if !self.shape.is_equivalent(&other.shape) {
            return Err(Error::InvalidProblem(format!(
                "elementwise operation needs equal shapes, got {} and {}",
                self.shape, other.shape
            )));
        }
        let shape = if self.order() >= other.order() {
            self.shape.clone()
        } else {
            other.shape.clone()
        };
        Ok(DenseTensor {
            shape,
            data: self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect(),
        })
    }

    /// Hadamard product of tensors with equivalent shapes.
    pub fn hadamard(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseTensor) -> Result<DenseTensor> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Largest absolute elementwise difference; `inf` when shapes differ.
    pub fn max_abs_diff(&self, other: &DenseTensor) -> f64 {
        if !self.shape.is_equivalent(&other.shape) {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Replicates length-1 modes so the result has the per-mode maximum of
    /// `self.shape()` and `target` (the `bc` operator). The result is materialized.
    pub fn bc(&self, target: &Shape) -> Result<DenseTensor> {
        let out = self.shape.broadcast_with(target)?;
        if out == self.shape {
            return Ok(self.clone());
        }
        let strides = broadcast_strides(&self.shape, &out);
        let mut data = Vec::with_capacity(out.numel());
        walk(out.dims(), &strides, |off| data.push(self.data[off]));
        Ok(DenseTensor { shape: out, data })
    }

    /// Output mode `p` is input mode `perm[p]` (0-based).
    pub fn permute(&self, perm: &[usize]) -> Result<DenseTensor> {
        validate_permutation(perm, self.order())?;
        let in_strides = self.shape.strides();
        let dims: Vec<usize> = perm.iter().map(|&p| self.dims()[p]).collect();
        let strides: Vec<usize> = perm.iter().map(|&p| in_strides[p]).collect();
        let mut data = Vec::with_capacity(self.numel());
        walk(&dims, &strides, |off| data.push(self.data[off]));
        Ok(DenseTensor {
            shape: Shape::new(dims)?,
            data,
        })
    }

    /// Reinterprets the buffer under a new shape with the same element count.
    pub fn reshape(&self, shape: Shape) -> Result<DenseTensor> {
        DenseTensor::new(shape, self.data.clone())
    }

    /// Collapses consecutive groups of modes into single modes. Each group must
    /// list its modes in order and the groups together must cover `0..order`
    /// in order; within a group the index is column-major.
    pub fn reshape_group(&self, groups: &[Vec<usize>]) -> Result<DenseTensor> {
        let mut next = 0;
        let mut dims = Vec::with_capacity(groups.len());
        for group in groups {
            if group.is_empty() {
                return Err(Error::InvalidGrouping("empty group".into()));
            }
            let mut len = 1;
            for &m in group {
                if m >= self.order() {
                    return Err(Error::InvalidGrouping(format!(
                        "mode {} does not exist in an order-{} tensor",
                        m + 1,
                        self.order()
                    )));
                }
                if m != next {
                    return Err(Error::InvalidGrouping(format!(
                        "expected mode {} next, found mode {}",
                        next + 1,
                        m + 1
                    )));
                }
                len *= self.dims()[m];
                next += 1;
            }
            dims.push(len);
        }
        if next != self.order() {
            return Err(Error::InvalidGrouping(format!(
                "groups cover {next} of {} modes",
                self.order()
            )));
        }
        self.reshape(Shape::new(dims)?)
    }

    /// Mode-`mode` unfolding: an `I_mode × ∏_{n≠mode} I_n` matrix whose columns
    /// are the mode-`mode` fibers, ordered with the remaining modes column-major.
    pub fn unfold(&self, mode: usize) -> Result<DenseTensor> {
        let perm = mode_first_permutation(mode, self.order())?;
        let rows = self.dims()[mode];
        let permuted = self.permute(&perm)?;
        permuted.reshape(Shape::new(vec![rows, self.numel() / rows])?)
    }

    /// Inverse of [`DenseTensor::unfold`] for a tensor of shape `target`.
    pub fn fold(matrix: &DenseTensor, mode: usize, target: &Shape) -> Result<DenseTensor> {
        let perm = mode_first_permutation(mode, target.order())?;
        let rows = target.dims()[mode];
        let cols = target.numel() / rows;
        if !matrix.shape.is_equivalent(&Shape::new(vec![rows, cols])?) {
            return Err(Error::InvalidProblem(format!(
                "cannot fold a {} matrix along mode {} into {target}",
                matrix.shape,
                mode + 1
            )));
        }
        let permuted_dims: Vec<usize> = perm.iter().map(|&p| target.dims()[p]).collect();
        let permuted = matrix.reshape(Shape::new(permuted_dims)?)?;
        permuted.permute(&inverse_permutation(&perm))
    }
}

impl std::fmt::Debug for DenseTensor {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("DenseTensor")
            .field("shape", &self.shape)
            .field("data", &self.data)
            .finish()
    }
}

pub fn inverse_permutation(perm: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; perm.len()];
    for (p, &q) in perm.iter().enumerate() {
        inv[q] = p;
    }
    inv
}

fn validate_permutation(perm: &[usize], order: usize) -> Result<()> {
    let mut seen = vec![false; order];
    if perm.len() != order {
        return Err(Error::InvalidPermutation(perm.to_vec()));
    }
    for &p in perm {
        if p >= order || seen[p] {
            return Err(Error::InvalidPermutation(perm.to_vec()));
        }
        seen[p] = true;
    }
    Ok(())
}

fn mode_first_permutation(mode: usize, order: usize) -> Result<Vec<usize>> {
    if mode >= order {
        return Err(Error::ModeOutOfRange {
            mode: mode + 1,
            order,
        });
    }
    Ok(std::iter::once(mode)
        .chain((0..order).filter(|&m| m != mode))
        .collect())
}

/// Strides of `src` laid over `out`, zero along replicated modes.
pub(crate) fn broadcast_strides(src: &Shape, out: &Shape) -> Vec<usize> {
    let src = src.padded(out.order());
    src.strides()
        .into_iter()
        .zip(src.dims())
        .map(|(s, &d)| if d == 1 { 0 } else { s })
        .collect()
}

/// Visits the output positions of `dims` in column-major order, passing the
/// matching offset under `strides`.
pub(crate) fn walk(dims: &[usize], strides: &[usize], mut f: impl FnMut(usize)) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    let mut off = 0usize;
    for _ in 0..total {
        f(off);
        for m in 0..dims.len() {
            idx[m] += 1;
            off += strides[m];
            if idx[m] < dims[m] {
                break;
            }
            off -= strides[m] * dims[m];
            idx[m] = 0;
        }
    }
}

/// Two-operand version of [`walk`].
pub(crate) fn walk2(
    dims: &[usize],
    strides_a: &[usize],
    strides_b: &[usize],
    mut f: impl FnMut(usize, usize),
) {
    let total: usize = dims.iter().product();
    let mut idx = vec![0usize; dims.len()];
    let (mut a, mut b) = (0usize, 0usize);
    for _ in 0..total {
        f(a, b);
        for m in 0..dims.len() {
            idx[m] += 1;
            a += strides_a[m];
            b += strides_b[m];
            if idx[m] < dims[m] {
                break;
            }
            a -= strides_a[m] * dims[m];
            b -= strides_b[m] * dims[m];
            idx[m] = 0;
        }
    }
}
