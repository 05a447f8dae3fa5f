//! Deterministic starting point for broadcast-decomposition fits.
//!
//! `|y_ijk| = |a_ij| |b_ik| |c_jk|` is additive in the log domain, so the
//! magnitudes come from a weighted least-squares fit of
//! `ln|y_ijk| ≈ α_ij + β_ik + γ_jk` (convex, solved by backfitting, weights
//! `y_ijk²` so that entries near zero barely count).
//!
//! Signs satisfy `sgn y_ijk = s_ij s_ik s_jk`. For two horizontal slices
//! `i` and `i0`, the `J×K` matrix `y_ijk y_i0jk = c_jk² (a_ij a_i0j)(b_ik b_i0k)`
//! is a positive matrix with rows and columns sign-flipped, so the signs of
//! its dominant singular vectors give `s_ij s_i0j` and `s_ik s_i0k`. Taking
//! `i0` as the strongest slice and fixing the gauge `s_i0j = s_i0k = 1`
//! yields every `s_ij` and `s_ik`; `s_jk` follows by weighted majority, and
//! two rounds of weighted majority votes refine all three.

use nalgebra::DMatrix;

use super::{reconstruct, BdFactors};
use crate::error::Result;
use crate::ops::squared_distance;
use crate::shape::Shape;
use crate::tensor::DenseTensor;

const BACKFIT_SWEEPS: usize = 100;
const SIGN_ROUNDS: usize = 2;

/// Structured initial term for `y` (third order, `I×J×K`).
///
/// The model is invariant under cyclic mode rotation (`A, B, C` trade
/// roles), so the construction is run on all three rotations of `y` and the
/// candidate with the smallest residual is kept.
pub fn structured_init(y: &DenseTensor, dims: [usize; 3]) -> Result<BdFactors> {
    let y = y.reshape(Shape::new(dims.to_vec())?)?;
    let mut best: Option<(f64, BdFactors)> = None;
    let mut rotated = y.clone();
    for turns in 0..3 {
        let rd = [rotated.dims()[0], rotated.dims()[1], rotated.dims()[2]];
        let mut f = oriented_init(&rotated, rd)?;
        for _ in 0..turns {
            f = unrotate(&f)?;
        }
        let obj = squared_distance(&y, &reconstruct(&f))?;
        if best.as_ref().is_none_or(|(b, _)| obj < *b) {
            best = Some((obj, f));
        }
        rotated = rotated.permute(&ROTATE)?;
    }
    Ok(best.expect("three candidates").1)
}

// y'(j,k,i) = y(i,j,k)
const ROTATE: [usize; 3] = [1, 2, 0];

/// Maps a term fitted to `y.permute(ROTATE)` back to a term for `y`.
fn unrotate(f: &BdFactors) -> Result<BdFactors> {
    // rotated roles: A' = C, B' = Aᵀ, C' = Bᵀ
    let back = [2, 0, 1];
    BdFactors::new(f.b.permute(&back)?, f.c.permute(&back)?, f.a.permute(&back)?)
}

fn oriented_init(y: &DenseTensor, dims: [usize; 3]) -> Result<BdFactors> {
    let [ni, nj, nk] = dims;
    let v = y.data();
    let at = |i: usize, j: usize, k: usize| i + ni * (j + nj * k);

    // log magnitudes
    let w: Vec<f64> = v.iter().map(|x| x * x).collect();
    let l: Vec<f64> = v.iter().map(|x| if *x == 0.0 { 0.0 } else { x.abs().ln() }).collect();
    let mut alpha = vec![0.0; ni * nj];
    let mut beta = vec![0.0; ni * nk];
    let mut gamma = vec![0.0; nj * nk];
    for _ in 0..BACKFIT_SWEEPS {
        for j in 0..nj {
            for i in 0..ni {
                let (mut num, mut den) = (0.0, 0.0);
                for k in 0..nk {
                    let n = at(i, j, k);
                    num += w[n] * (l[n] - beta[i + ni * k] - gamma[j + nj * k]);
                    den += w[n];
                }
                alpha[i + ni * j] = if den > 0.0 { num / den } else { 0.0 };
            }
        }
        for k in 0..nk {
            for i in 0..ni {
                let (mut num, mut den) = (0.0, 0.0);
                for j in 0..nj {
                    let n = at(i, j, k);
                    num += w[n] * (l[n] - alpha[i + ni * j] - gamma[j + nj * k]);
                    den += w[n];
                }
                beta[i + ni * k] = if den > 0.0 { num / den } else { 0.0 };
            }
        }
        for k in 0..nk {
            for j in 0..nj {
                let (mut num, mut den) = (0.0, 0.0);
                for i in 0..ni {
                    let n = at(i, j, k);
                    num += w[n] * (l[n] - alpha[i + ni * j] - beta[i + ni * k]);
                    den += w[n];
                }
                gamma[j + nj * k] = if den > 0.0 { num / den } else { 0.0 };
            }
        }
    }
    let ma: Vec<f64> = alpha.iter().map(|x| x.exp()).collect();
    let mb: Vec<f64> = beta.iter().map(|x| x.exp()).collect();
    let mc: Vec<f64> = gamma.iter().map(|x| x.exp()).collect();

    // signs
    let sgn = |x: f64| if x < 0.0 { -1.0 } else { 1.0 };
    let i0 = (0..ni)
        .map(|i| (i, (0..nj * nk).map(|n| w[i + ni * n]).sum::<f64>()))
        .fold((0, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0;
    let mut sa = vec![1.0; ni * nj];
    let mut sb = vec![1.0; ni * nk];
    let mut sc = vec![1.0; nj * nk];
    for i in (0..ni).filter(|&i| i != i0) {
        let t = DMatrix::from_fn(nj, nk, |j, k| v[at(i, j, k)] * v[at(i0, j, k)]);
        let (u, vt) = dominant_pair(t);
        for j in 0..nj {
            sa[i + ni * j] = sgn(u[j]);
        }
        for k in 0..nk {
            sb[i + ni * k] = sgn(vt[k]);
        }
    }
    for round in 0..=SIGN_ROUNDS {
        for k in 0..nk {
            for j in 0..nj {
                let vote: f64 = (0..ni)
                    .map(|i| v[at(i, j, k)] * sa[i + ni * j] * sb[i + ni * k] * ma[i + ni * j] * mb[i + ni * k])
                    .sum();
                sc[j + nj * k] = sgn(vote);
            }
        }
        if round == SIGN_ROUNDS {
            break;
        }
        for j in 0..nj {
            for i in 0..ni {
                let vote: f64 = (0..nk)
                    .map(|k| v[at(i, j, k)] * sb[i + ni * k] * sc[j + nj * k] * mb[i + ni * k] * mc[j + nj * k])
                    .sum();
                sa[i + ni * j] = sgn(vote);
            }
        }
        for k in 0..nk {
            for i in 0..ni {
                let vote: f64 = (0..nj)
                    .map(|j| v[at(i, j, k)] * sa[i + ni * j] * sc[j + nj * k] * ma[i + ni * j] * mc[j + nj * k])
                    .sum();
                sb[i + ni * k] = sgn(vote);
            }
        }
    }

    let a: Vec<f64> = ma.iter().zip(&sa).map(|(m, s)| m * s).collect();
    let b: Vec<f64> = mb.iter().zip(&sb).map(|(m, s)| m * s).collect();
    let c: Vec<f64> = mc.iter().zip(&sc).map(|(m, s)| m * s).collect();
    BdFactors::new(
        DenseTensor::new(Shape::new(vec![ni, nj, 1])?, a)?,
        DenseTensor::new(Shape::new(vec![ni, 1, nk])?, b)?,
        DenseTensor::new(Shape::new(vec![1, nj, nk])?, c)?,
    )
}

/// Left and right singular vectors of the largest singular value, oriented
/// so that the left vector's largest-magnitude entry is positive.
fn dominant_pair(t: DMatrix<f64>) -> (Vec<f64>, Vec<f64>) {
    let svd = t.svd(true, true);
    let s = &svd.singular_values;
    let top = (0..s.len()).fold(0, |best, n| if s[n] > s[best] { n } else { best });
    let u = svd.u.expect("requested").column(top).iter().copied().collect::<Vec<_>>();
    let v = svd.v_t.expect("requested").row(top).iter().copied().collect::<Vec<_>>();
    let pivot = u.iter().copied().fold(0.0, |m: f64, x| if x.abs() > m.abs() { x } else { m });
    if pivot < 0.0 {
        (u.iter().map(|x| -x).collect(), v.iter().map(|x| -x).collect())
    } else {
        (u, v)
    }
}
