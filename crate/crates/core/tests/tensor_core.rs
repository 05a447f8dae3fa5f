mod common;

use broadcast_tensor::shape::{broadcast_compatible, normalize_orders};
use broadcast_tensor::tensor::inverse_permutation;
use broadcast_tensor::{btf, ops, DenseTensor, Error};
use common::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng as _;

fn sorted(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

#[test]
fn construction_examples() {
    let v = tensor(&[2], vec![1.0, 2.0]);
    assert_eq!(v.data(), &[1.0, 2.0]);
    let x = tensor(&[3, 2], vec![1.0, 3.0, 5.0, 2.0, 4.0, 6.0]);
    assert_eq!(x.get(&[0, 1]), Some(2.0));
    assert_eq!(x.get(&[2, 0]), Some(5.0));
    assert!(matches!(
        DenseTensor::from_dims(&[2, 3], vec![0.0; 5]),
        Err(Error::LengthMismatch { expected: 6, actual: 5, .. })
    ));
}

#[test]
fn normalize_examples() {
    let (a, b) = normalize_orders(&shape(&[5, 4, 3]), &shape(&[5, 4]));
    assert_eq!((a.dims(), b.dims()), (&[5, 4, 3][..], &[5, 4, 1][..]));
    let (a, b) = normalize_orders(&shape(&[7]), &shape(&[7, 1, 1]));
    assert_eq!((a.dims(), b.dims()), (&[7, 1, 1][..], &[7, 1, 1][..]));
}

#[test]
fn compatibility_examples() {
    assert!(broadcast_compatible(&shape(&[3, 2]), &shape(&[3, 1])));
    assert!(broadcast_compatible(&shape(&[1, 2, 5]), &shape(&[3, 1, 5])));
    assert!(!broadcast_compatible(&shape(&[3, 2]), &shape(&[3, 3])));
}

/// Padding is with trailing ones; the leading-ones alignment used by NumPy is not ours.
#[test]
fn trailing_ones_conformance() {
    assert!(broadcast_compatible(&shape(&[2, 3]), &shape(&[2, 3, 1])));
    assert!(shape(&[2, 3]).is_equivalent(&shape(&[2, 3, 1])));

    // (1,2,3) is (2,3) with a LEADING one: not equivalent and not even compatible.
    assert!(!shape(&[1, 2, 3]).is_equivalent(&shape(&[2, 3])));
    assert!(!broadcast_compatible(&shape(&[1, 2, 3]), &shape(&[2, 3])));
    let a = DenseTensor::ones(shape(&[1, 2, 3]));
    let b = DenseTensor::ones(shape(&[2, 3]));
    assert!(matches!(ops::product(&a, &b), Err(Error::Incompatible { mode: 2, .. })));

    // a length-3 vector lines up with the FIRST mode of a 3×4 matrix ...
    let v = tensor(&[3], vec![1.0, 2.0, 3.0]);
    let m = DenseTensor::ones(shape(&[3, 4]));
    let p = ops::product(&v, &m).unwrap();
    assert_eq!(p.dims(), &[3, 4]);
    assert_eq!(p.get(&[2, 3]), Some(3.0));
    // ... so a length-4 vector does not fit it
    assert!(ops::product(&DenseTensor::ones(shape(&[4])), &m).is_err());
}

#[test]
fn permute_example_and_transpose() {
    let w = DenseTensor::zeros(shape(&[10, 20, 1, 40, 50, 1]));
    // groups ({2,4},{1,5},{3,6}) in 1-based modes
    let p = w.permute(&[1, 3, 0, 4, 2, 5]).unwrap();
    assert_eq!(p.dims(), &[20, 40, 10, 50, 1, 1]);
    let grouped = p.reshape_group(&[vec![0, 1], vec![2, 3], vec![4, 5]]).unwrap();
    assert_eq!(grouped.dims(), &[800, 500, 1]);

    let m = tensor(&[2, 3], (1..=6).map(f64::from).collect());
    let t = m.permute(&[1, 0]).unwrap();
    for i in 0..2 {
        for j in 0..3 {
            assert_eq!(t.get(&[j, i]), m.get(&[i, j]));
        }
    }
    assert!(matches!(m.permute(&[0, 0]), Err(Error::InvalidPermutation(_))));
}

#[test]
fn reshape_group_matches_mode_one_unfold() {
    let mut r = rng(11);
    let x = randn(&[2, 3, 4], &mut r);
    let g = x.reshape_group(&[vec![0], vec![1, 2]]).unwrap();
    let u = x.unfold(0).unwrap();
    assert_eq!(g, u);
    assert_eq!(x.reshape_group(&[vec![0], vec![1], vec![2]]).unwrap(), x);
    assert!(x.reshape_group(&[vec![0, 2], vec![1]]).is_err());
    assert!(x.reshape_group(&[vec![0], vec![1]]).is_err());
}

#[test]
fn fold_examples() {
    let mut r = rng(12);
    let x = randn(&[3, 4, 5], &mut r);
    let u = x.unfold(1).unwrap();
    assert_eq!(u.dims(), &[4, 15]);
    assert_eq!(DenseTensor::fold(&u, 1, x.shape()).unwrap(), x);
    // an order-2 fold along mode 1 is the identity
    let m = randn(&[3, 4], &mut r);
    assert_eq!(DenseTensor::fold(&m, 0, m.shape()).unwrap(), m);
    assert!(DenseTensor::fold(&m, 0, &shape(&[4, 3])).is_err());
}

proptest! {
    #[test]
    fn bc_shape_values_and_idempotence(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, t) = compatible_dims(&mut r, 4, 4);
        let x = uniform(&a, &mut r);
        let target = shape(&t);
        let b = x.bc(&target).unwrap();
        let order = a.len().max(t.len());
        let want: Vec<usize> = padded(&a, order).iter().zip(padded(&t, order)).map(|(p, q)| *p.max(&q)).collect();
        prop_assert_eq!(trimmed(b.dims()), trimmed(&want));
        for n in 0..b.numel() {
            let idx = unravel(n, &want);
            prop_assert_eq!(b.data()[n], broadcast_get(&x, &idx));
        }
        prop_assert_eq!(b.bc(&target).unwrap(), b);
    }

    #[test]
    fn compatibility_is_symmetric(a in prop::collection::vec(1usize..4, 1..5), b in prop::collection::vec(1usize..4, 1..5)) {
        let (sa, sb) = (shape(&a), shape(&b));
        prop_assert_eq!(broadcast_compatible(&sa, &sb), broadcast_compatible(&sb, &sa));
        let order = a.len().max(b.len());
        let expected = padded(&a, order).iter().zip(padded(&b, order)).all(|(p, q)| *p == q || *p == 1 || q == 1);
        prop_assert_eq!(broadcast_compatible(&sa, &sb), expected);
    }

    #[test]
    fn permute_unfold_fold_group_are_bijections(seed in any::<u64>()) {
        let mut r = rng(seed);
        let order = r.random_range(1..=5);
        let dims: Vec<usize> = (0..order).map(|_| r.random_range(1..=4)).collect();
        let x = uniform(&dims, &mut r);
        let values = sorted(x.data());

        let mut perm: Vec<usize> = (0..order).collect();
        perm.shuffle(&mut r);
        let p = x.permute(&perm).unwrap();
        prop_assert_eq!(sorted(p.data()), values.clone());
        for (q, &src) in perm.iter().enumerate() {
            prop_assert_eq!(p.dims()[q], dims[src]);
        }
        prop_assert_eq!(&p.permute(&inverse_permutation(&perm)).unwrap(), &x);

        let mode = r.random_range(0..order);
        let u = x.unfold(mode).unwrap();
        prop_assert_eq!(sorted(u.data()), values.clone());
        prop_assert_eq!(&DenseTensor::fold(&u, mode, x.shape()).unwrap(), &x);

        let cut = r.random_range(0..=order);
        let groups: Vec<Vec<usize>> = [(0..cut).collect::<Vec<_>>(), (cut..order).collect()]
            .into_iter()
            .filter(|g| !g.is_empty())
            .collect();
        let g = x.reshape_group(&groups).unwrap();
        prop_assert_eq!(g.data(), x.data());
    }

    #[test]
    fn btf_round_trips(seed in any::<u64>()) {
        let mut r = rng(seed);
        let order = r.random_range(1..=4);
        let dims: Vec<usize> = (0..order).map(|_| r.random_range(1..=4)).collect();
        let x = randn(&dims, &mut r).scale(10f64.powi(r.random_range(-200..200)));
        prop_assert_eq!(btf::parse(&btf::to_string(&x)).unwrap(), x);
    }
}
