//! Closed-form broadcast least squares.
//!
//! For `min_W ‖X − W ⊡ H‖_F²` every entry of `W` is decoupled: it only
//! meets the entries of `X` and `H` along the modes where `W` is replicated.
//! The minimizer is therefore
//!
//! ```text
//! Ŵ = P_R(X ⊡ H) ⧄ P_R(H ⊡ H)
//! ```
//!
//! where `P_R` sums over the modes in which `W` has length 1 and `H` does not.
//! Two routes are provided: the direct closed form above, and a reduction
//! that permutes the modes into `(L, S, R)` order, flattens each group into a
//! single mode and solves the canonical third-order problem
//! `min_A ‖Y − A ⊡ Z‖` with `A: I×J×1` and `Z: 1×J×K`. Both routes perform
//! the same floating-point operations in the same order and agree bit for bit.

use crate::error::{Error, Result};
use crate::ops::{self, mode_sum};
use crate::shape::{broadcast_compatible, ModePartition, Shape};
use crate::tensor::{inverse_permutation, DenseTensor};

/// Data of one least-squares problem `min_W ‖observed − W ⊡ known‖_F²`.
#[derive(Debug, Clone)]
pub struct LsProblem {
    pub observed: DenseTensor,
    pub known: DenseTensor,
    pub unknown_shape: Shape,
}

impl LsProblem {
    pub fn new(observed: DenseTensor, known: DenseTensor, unknown_shape: Shape) -> Result<Self> {
        if !broadcast_compatible(&unknown_shape, known.shape()) {
            return Err(Error::InvalidProblem(format!(
                "unknown shape {unknown_shape} and known shape {} are not broadcast compatible",
                known.shape()
            )));
        }
        let joint = unknown_shape.broadcast_with(known.shape())?;
        if !joint.is_equivalent(observed.shape()) {
            return Err(Error::InvalidProblem(format!(
                "observed tensor has shape {} but unknown {unknown_shape} ⊡ known {} has shape {joint}",
                observed.shape(),
                known.shape()
            )));
        }
        Ok(LsProblem {
            observed,
            known,
            unknown_shape,
        })
    }

    pub fn partition(&self) -> Result<ModePartition> {
        classify_modes(&self.unknown_shape, self.known.shape())
    }

    /// Direct closed form.
    pub fn solve(&self) -> Result<DenseTensor> {
        closed_form(self, Denominator::Strict)
    }

    /// Same as [`LsProblem::solve`] with `lambda` added to every denominator.
    pub fn solve_ridge(&self, lambda: f64) -> Result<DenseTensor> {
        closed_form(self, Denominator::Ridge(lambda))
    }

    /// Permute → flatten → third-order solve → unflatten → inverse permute.
    pub fn solve_by_reduction(&self) -> Result<DenseTensor> {
        let part = self.partition()?;
        let order = part.order();
        let w_shape = self.unknown_shape.padded(order);
        let h_shape = self.known.shape().padded(order);
        let perm = part.permutation();

        let groups = {
            let (l, s) = (part.left.len(), part.shared.len());
            [(0..l).collect::<Vec<_>>(), (l..l + s).collect(), (l + s..order).collect()]
        };
        let flatten = |t: &DenseTensor, shape: &Shape| -> Result<DenseTensor> {
            let permuted = t.reshape(shape.clone())?.permute(&perm)?;
            let dims: Vec<usize> = groups
                .iter()
                .map(|g| g.iter().map(|&m| permuted.dims()[m]).product())
                .collect();
            permuted.reshape(Shape::new(dims)?)
        };

        let observed_shape = w_shape.broadcast_with(&h_shape)?;
        let y = flatten(&self.observed, &observed_shape)?;
        let z = flatten(&self.known, &h_shape)?;
        let a = ls_solve_third_order(&y, &z)?;

        let permuted_w: Vec<usize> = perm.iter().map(|&p| w_shape.dims()[p]).collect();
        a.reshape(Shape::new(permuted_w)?)?
            .permute(&inverse_permutation(&perm))?
            .reshape(self.unknown_shape.clone())
    }
}

/// Splits modes into `L` (`D > 1, F = 1`), `S` (`D = F`) and `R` (`D = 1, F > 1`),
/// with `D` the unknown's shape and `F` the known tensor's shape.
///
/// Modes with `D = F = 1` go to `S`.
pub fn classify_modes(w_shape: &Shape, h_shape: &Shape) -> Result<ModePartition> {
    w_shape.broadcast_with(h_shape)?;
    let order = w_shape.order().max(h_shape.order());
    let mut part = ModePartition {
        left: Vec::new(),
        shared: Vec::new(),
        right: Vec::new(),
    };
    for m in 0..order {
        let (d, f) = (w_shape.dim(m), h_shape.dim(m));
        if d == f {
            part.shared.push(m);
        } else if f == 1 {
            part.left.push(m);
        } else {
            part.right.push(m);
        }
    }
    Ok(part)
}

/// Solves `min_A ‖y − A ⊡ z‖_F²` for `y: I×J×K`, `z: 1×J×K`, returning `A: I×J×1`.
pub fn ls_solve_third_order(y: &DenseTensor, z: &DenseTensor) -> Result<DenseTensor> {
    let (i, j, k) = match *y.shape().padded(3).dims() {
        [i, j, k] => (i, j, k),
        _ => {
            return Err(Error::InvalidProblem(format!(
                "observed tensor must be third order, got {}",
                y.shape()
            )))
        }
    };
    if !z.shape().is_equivalent(&Shape::new(vec![1, j, k])?) {
        return Err(Error::InvalidProblem(format!(
            "known tensor must have shape (1×{j}×{k}), got {}",
            z.shape()
        )));
    }
    let y = y.reshape(Shape::new(vec![i, j, k])?)?;
    let z = z.reshape(Shape::new(vec![1, j, k])?)?;
    let num = mode_sum(&ops::product(&y, &z)?, &[2])?;
    let den = mode_sum(&ops::product(&z, &z)?, &[2])?;
    divide_checked(&num, &den, Denominator::Strict)
}

/// Direct closed form `P_R(x ⊡ h) ⧄ P_R(h ⊡ h)` for arbitrary order.
pub fn ls_solve_general(x: &DenseTensor, h: &DenseTensor, w_shape: &Shape) -> Result<DenseTensor> {
    LsProblem::new(x.clone(), h.clone(), w_shape.clone())?.solve()
}

/// [`ls_solve_general`] with `lambda ≥ 0` added to the denominators.
pub fn ls_solve_general_ridge(
    x: &DenseTensor,
    h: &DenseTensor,
    w_shape: &Shape,
    lambda: f64,
) -> Result<DenseTensor> {
    LsProblem::new(x.clone(), h.clone(), w_shape.clone())?.solve_ridge(lambda)
}

/// Permute/unfold route; agrees bit for bit with [`ls_solve_general`].
pub fn ls_solve_general_by_reduction(
    x: &DenseTensor,
    h: &DenseTensor,
    w_shape: &Shape,
) -> Result<DenseTensor> {
    LsProblem::new(x.clone(), h.clone(), w_shape.clone())?.solve_by_reduction()
}

/// Handling of the `P_R(h ⊡ h)` denominators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Denominator {
    /// A zero denominator is an error.
    Strict,
    /// Add `λ` to every denominator.
    Ridge(f64),
    /// Replace denominators below `ε` by `ε`; `ε = 0` behaves like `Strict`.
    Clamp(f64),
}

pub(crate) fn closed_form(p: &LsProblem, guard: Denominator) -> Result<DenseTensor> {
    let order = p.observed.order().max(p.known.order()).max(p.unknown_shape.order());
    let x = p.observed.reshape(p.observed.shape().padded(order))?;
    let h = p.known.reshape(p.known.shape().padded(order))?;
    let w_shape = p.unknown_shape.padded(order);
    let right = classify_modes(&w_shape, h.shape())?.right;

    let num = mode_sum(&ops::product(&x, &h)?, &right)?;
    let den = mode_sum(&ops::product(&h, &h)?, &right)?;
    divide_checked(&num, &den, guard)?.reshape(p.unknown_shape.clone())
}

fn divide_checked(num: &DenseTensor, den: &DenseTensor, guard: Denominator) -> Result<DenseTensor> {
    let den = match guard {
        Denominator::Ridge(lambda) => den.map(|d| d + lambda),
        Denominator::Clamp(eps) if eps > 0.0 => den.map(|d| d.max(eps)),
        Denominator::Strict | Denominator::Clamp(_) => den.clone(),
    };
    if let Some(pos) = den.data().iter().position(|&d| d == 0.0) {
        // Report the first affected entry of the unknown.
        let index = if den.shape() == num.shape() { pos } else { first_hit(num, &den, pos) };
        return Err(Error::Singular { index });
    }
    ops::division(num, &den)
}

// Linear index in the broadcast result of the first entry that reads den[pos].
fn first_hit(num: &DenseTensor, den: &DenseTensor, pos: usize) -> usize {
    let out = num.shape().broadcast_with(den.shape()).expect("shapes checked");
    let marker = DenseTensor::from_fn(den.shape().clone(), |idx| {
        if den.linear_index(idx) == Some(pos) { 1.0 } else { 0.0 }
    });
    marker
        .bc(&out)
        .ok()
        .and_then(|m| m.data().iter().position(|&v| v == 1.0))
        .unwrap_or(pos)
}
