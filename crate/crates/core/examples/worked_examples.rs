//! Small broadcast products and marginals that can be checked by hand.
//!
//! cargo run --example worked_examples

use broadcast_tensor::ops::{self, marginalize, mode_sum};
use broadcast_tensor::{DenseTensor, Result};

fn show(label: &str, t: &DenseTensor) {
    println!("{label}: shape {}, column-major {:?}", t.shape(), t.data());
}

fn main() -> Result<()> {
    let x = DenseTensor::from_dims(&[2], vec![1.0, 2.0])?;
    let y = DenseTensor::from_dims(&[2], vec![3.0, 4.0])?;
    show("[1,2] ⊡ [3,4]", &ops::product(&x, &y)?);

    // rows [1,2], [3,4], [5,6] times the row [7,8]
    let x = DenseTensor::from_dims(&[3, 2], vec![1.0, 3.0, 5.0, 2.0, 4.0, 6.0])?;
    let y = DenseTensor::from_dims(&[1, 2], vec![7.0, 8.0])?;
    show("X ⊡ y", &ops::product(&x, &y)?);
    show("y replicated to 3×2", &y.bc(x.shape())?);
    show("X marginalized against y", &marginalize(&x, y.shape())?);
    show("y marginalized against X", &marginalize(&y, x.shape())?);

    // 3×4×2 tensor with entries 1..24 times a 3×4 matrix: the matrix is
    // copied along the third mode
    let x3 = DenseTensor::from_dims(&[3, 4, 2], (1..=24).map(f64::from).collect())?;
    let y3 = DenseTensor::from_fn(broadcast_tensor::Shape::new(vec![3, 4])?, |i| (4 * i[0] + i[1] + 1) as f64);
    let z = ops::product(&x3, &y3)?;
    show("𝒳 ⊡ Y", &z);
    show("sum of 𝒳 over mode 3", &mode_sum(&x3, &[2])?);

    // both operands replicated: 1×2×3 against 4×2×1
    let a = DenseTensor::from_dims(&[1, 2, 3], vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0])?;
    let b = DenseTensor::from_dims(&[4, 2, 1], vec![7.0, 9.0, 11.0, 13.0, 8.0, 10.0, 12.0, 14.0])?;
    show("𝒜 ⊡ ℬ", &ops::product(&a, &b)?);
    show("𝒜 marginalized", &marginalize(&a, b.shape())?);
    show("ℬ marginalized", &marginalize(&b, a.shape())?);

    // the norm identity ‖𝒜 ⊡ ℬ‖ = ‖𝒜_□ ⊙ ℬ_□‖
    let lhs = ops::frobenius_norm(&ops::product(&a, &b)?);
    let rhs = ops::frobenius_norm(&marginalize(&a, b.shape())?.hadamard(&marginalize(&b, a.shape())?)?);
    println!("‖𝒜 ⊡ ℬ‖ = {lhs}, ‖𝒜_□ ⊙ ℬ_□‖ = {rhs}");
    Ok(())
}
