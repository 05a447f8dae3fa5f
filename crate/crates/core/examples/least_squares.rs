//! Closed-form solution of `min_W ‖X − W ⊡ H‖` for a sixth-order problem,
//! solved directly and through the permute/flatten reduction.
//!
//! cargo run --example least_squares

use broadcast_tensor::lstsq::LsProblem;
use broadcast_tensor::ops::{self, squared_distance};
use broadcast_tensor::random::{rng_from_seed, standard_normal};
use broadcast_tensor::{Result, Shape};

fn main() -> Result<()> {
    let mut rng = rng_from_seed(1);
    let w_shape = Shape::new(vec![2, 3, 1, 4, 5, 1])?;
    let h_shape = Shape::new(vec![2, 1, 3, 1, 5, 6])?;
    let w_true = standard_normal(w_shape.clone(), &mut rng);
    let h = standard_normal(h_shape, &mut rng);
    let clean = ops::product(&w_true, &h)?;
    let noise = standard_normal(clean.shape().clone(), &mut rng).scale(0.05);
    let x = clean.add(&noise)?;

    let problem = LsProblem::new(x.clone(), h.clone(), w_shape)?;
    println!("unknown {} known {} observed {}", problem.unknown_shape, h.shape(), x.shape());
    println!("mode partition (1-based): {}", problem.partition()?);

    let direct = problem.solve()?;
    let reduced = problem.solve_by_reduction()?;
    println!("direct and reduced solutions identical: {}", direct == reduced);
    println!("max |Ŵ − W| = {:.3e}", direct.max_abs_diff(&w_true));

    let fit = ops::product(&direct, &h)?.bc(x.shape())?;
    let truth = ops::product(&w_true, &h)?.bc(x.shape())?;
    println!(
        "residual ‖X − Ŵ⊡H‖² = {:.4} (planted W gives {:.4})",
        squared_distance(&x, &fit)?,
        squared_distance(&x, &truth)?
    );
    Ok(())
}
