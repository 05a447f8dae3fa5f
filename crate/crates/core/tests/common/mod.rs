//! Shared oracles and generators. The oracles index raw column-major buffers
//! directly and never call the library's broadcasting or reduction code.

#![allow(dead_code)]

use broadcast_tensor::random::{rng_from_seed, standard_normal, Rng};
use broadcast_tensor::{DenseTensor, Shape};
use proptest::prelude::*;
use rand::Rng as _;

pub fn tensor(dims: &[usize], data: Vec<f64>) -> DenseTensor {
    DenseTensor::from_dims(dims, data).unwrap()
}

pub fn shape(dims: &[usize]) -> Shape {
    Shape::new(dims.to_vec()).unwrap()
}

pub fn randn(dims: &[usize], rng: &mut Rng) -> DenseTensor {
    standard_normal(shape(dims), rng)
}

pub fn rng(seed: u64) -> Rng {
    rng_from_seed(seed)
}

/// `dims` padded with trailing ones to `order`.
pub fn padded(dims: &[usize], order: usize) -> Vec<usize> {
    let mut d = dims.to_vec();
    d.resize(order.max(dims.len()), 1);
    d
}

/// Column-major multi-index of linear position `n`.
pub fn unravel(mut n: usize, dims: &[usize]) -> Vec<usize> {
    dims.iter()
        .map(|&d| {
            let i = n % d;
            n /= d;
            i
        })
        .collect()
}

/// Element of `t` at `idx`, with length-1 modes of `t` pinned to index 0.
pub fn broadcast_get(t: &DenseTensor, idx: &[usize]) -> f64 {
    let dims = padded(t.dims(), idx.len());
    let mut lin = 0;
    let mut stride = 1;
    for (n, &d) in dims.iter().enumerate() {
        let i = if d == 1 { 0 } else { idx[n] };
        lin += i * stride;
        stride *= d;
    }
    t.data()[lin]
}

/// Elementwise broadcast oracle: returns (output dims, column-major values).
pub fn oracle_apply(x: &DenseTensor, y: &DenseTensor, f: impl Fn(f64, f64) -> f64) -> (Vec<usize>, Vec<f64>) {
    let order = x.order().max(y.order());
    let (dx, dy) = (padded(x.dims(), order), padded(y.dims(), order));
    let out: Vec<usize> = dx.iter().zip(&dy).map(|(a, b)| *a.max(b)).collect();
    let numel: usize = out.iter().product();
    let values = (0..numel)
        .map(|n| {
            let idx = unravel(n, &out);
            f(broadcast_get(x, &idx), broadcast_get(y, &idx))
        })
        .collect();
    (out, values)
}

pub fn max_abs(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// Drops trailing ones so shapes that differ only by padding compare equal.
pub fn trimmed(dims: &[usize]) -> Vec<usize> {
    let mut d = dims.to_vec();
    while d.len() > 1 && d.last() == Some(&1) {
        d.pop();
    }
    d
}

/// A random pair of broadcast-compatible shapes of order ≤ `max_order`: per
/// mode both operands share the length, or one side has length 1. The
/// operands may have different orders (trailing ones dropped).
pub fn compatible_dims(r: &mut Rng, max_order: usize, max_len: usize) -> (Vec<usize>, Vec<usize>) {
    let order = r.random_range(1..=max_order);
    let mut a = Vec::with_capacity(order);
    let mut b = Vec::with_capacity(order);
    for _ in 0..order {
        let len = r.random_range(1..=max_len);
        match r.random_range(0..3) {
            0 => {
                a.push(len);
                b.push(len);
            }
            1 => {
                a.push(len);
                b.push(1);
            }
            _ => {
                a.push(1);
                b.push(len);
            }
        }
    }
    (trimmed(&a), trimmed(&b))
}

prop_compose! {
    /// Compatible shape pair (order ≤ 4, lengths ≤ 4) with values in [-10, 10].
    pub fn compatible_pair()(seed in any::<u64>()) -> (DenseTensor, DenseTensor) {
        let mut r = rng(seed);
        let (a, b) = compatible_dims(&mut r, 4, 4);
        (uniform(&a, &mut r), uniform(&b, &mut r))
    }
}

pub fn uniform(dims: &[usize], r: &mut Rng) -> DenseTensor {
    let n: usize = dims.iter().product();
    tensor(dims, (0..n).map(|_| r.random_range(-10.0..10.0)).collect())
}

/// Elementwise normal-equation solution of `min_W ‖X − W ⊡ H‖`:
/// `ŵ = Σ x·h / Σ h²` over every element of `X` that maps onto `ŵ`.
pub fn ls_oracle(x: &DenseTensor, h: &DenseTensor, w_dims: &[usize]) -> Vec<f64> {
    let order = x.order().max(w_dims.len()).max(h.order());
    let xd = padded(x.dims(), order);
    let wd = padded(w_dims, order);
    let n_w: usize = wd.iter().product();
    let (mut num, mut den) = (vec![0.0; n_w], vec![0.0; n_w]);
    for n in 0..x.numel() {
        let idx = unravel(n, &xd);
        let hv = broadcast_get(h, &idx);
        let lin = idx
            .iter()
            .zip(&wd)
            .rev()
            .fold(0, |acc, (&i, &d)| acc * d + if d == 1 { 0 } else { i });
        num[lin] += x.data()[n] * hv;
        den[lin] += hv * hv;
    }
    num.iter().zip(&den).map(|(a, b)| a / b).collect()
}

/// Random least-squares problem `(X, H, shape of W)` of order ≤ `max_order`.
pub fn random_ls_problem(r: &mut Rng, max_order: usize, max_len: usize) -> (DenseTensor, DenseTensor, Vec<usize>) {
    let (w, h) = compatible_dims(r, max_order, max_len);
    let order = w.len().max(h.len());
    let x_dims: Vec<usize> = padded(&w, order).iter().zip(padded(&h, order)).map(|(a, b)| *a.max(&b)).collect();
    (randn(&x_dims, r), randn(&h, r), w)
}
