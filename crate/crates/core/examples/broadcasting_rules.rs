//! Which shapes broadcast together. Shorter shapes are padded with trailing
//! ones, so a vector lines up with the first mode of a matrix.
//!
//! cargo run --example broadcasting_rules

use broadcast_tensor::shape::{broadcast_compatible, normalize_orders};
use broadcast_tensor::{ops, DenseTensor, Result, Shape};

fn main() -> Result<()> {
    let pairs: [(&[usize], &[usize]); 6] = [
        (&[3, 2], &[3, 1]),
        (&[1, 2, 5], &[3, 1, 5]),
        (&[2, 3], &[2, 3, 1]),
        (&[3, 2], &[3, 3]),
        (&[1, 2, 3], &[2, 3]),
        (&[3], &[3, 4]),
    ];
    for (a, b) in pairs {
        let (a, b) = (Shape::new(a.to_vec())?, Shape::new(b.to_vec())?);
        let (pa, pb) = normalize_orders(&a, &b);
        match a.broadcast_with(&b) {
            Ok(joint) => println!("{a} with {b}: padded {pa} / {pb}, result {joint}"),
            Err(e) => {
                assert!(!broadcast_compatible(&a, &b));
                println!("{a} with {b}: padded {pa} / {pb}, rejected ({e})");
            }
        }
    }

    let v = DenseTensor::from_dims(&[3], vec![1.0, 2.0, 3.0])?;
    let m = DenseTensor::ones(Shape::new(vec![3, 4])?);
    let p = ops::product(&v, &m)?;
    println!("[1,2,3] ⊡ ones(3,4): row i holds {:?}", (0..3).map(|i| p.get(&[i, 0]).unwrap()).collect::<Vec<_>>());

    let x = DenseTensor::from_dims(&[2, 3, 2], (1..=12).map(f64::from).collect())?;
    println!("mode-2 unfolding of a 2×3×2 tensor: {:?}", x.unfold(1)?.data());
    let p = x.permute(&[2, 0, 1])?;
    println!("permuted to {}: {:?}", p.shape(), p.data());
    Ok(())
}
