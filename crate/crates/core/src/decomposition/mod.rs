//! Broadcast decomposition: `Y ≈ A ⊡ B ⊡ C` with `A: I×J×1`, `B: I×1×K`,
//! `C: 1×J×K`, i.e. `y_ijk ≈ a_ij · b_ik · c_jk`, and its rank-`R` sum.
//!
//! Each factor update is an exact closed-form least-squares solve given the
//! other two factors, so the objective never increases along the fit.

mod als;
mod hals;
mod init;

pub use als::{bd_als, bd_als_from};
pub use hals::{reconstruct_sum, sum_bd_hals, sum_bd_hals_from};
pub use init::structured_init;

use crate::error::{Error, Result};
use crate::lstsq::{closed_form, Denominator, LsProblem};
use crate::ops::{self, frobenius_norm_sq, squared_distance};
use crate::random::{standard_normal, Rng};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

/// One broadcast-decomposition term.
#[derive(Debug, Clone, PartialEq)]
pub struct BdFactors {
    /// `I×J×1`
    pub a: DenseTensor,
    /// `I×1×K`
    pub b: DenseTensor,
    /// `1×J×K`
    pub c: DenseTensor,
}

/// Which factor of a [`BdFactors`] term to update.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Factor {
    A,
    B,
    C,
}

impl BdFactors {
    pub fn new(a: DenseTensor, b: DenseTensor, c: DenseTensor) -> Result<Self> {
        let [i, j, _] = dims3(a.shape())?;
        let [_, _, k] = dims3(b.shape())?;
        let expect = [
            (&a, [i, j, 1], "A"),
            (&b, [i, 1, k], "B"),
            (&c, [1, j, k], "C"),
        ];
        for (t, dims, name) in expect {
            let want = Shape::new(dims.to_vec())?;
            if !t.shape().is_equivalent(&want) {
                return Err(Error::InvalidProblem(format!(
                    "factor {name} has shape {} but {want} is required",
                    t.shape()
                )));
            }
        }
        Ok(BdFactors {
            a: a.reshape(Shape::new(vec![i, j, 1])?)?,
            b: b.reshape(Shape::new(vec![i, 1, k])?)?,
            c: c.reshape(Shape::new(vec![1, j, k])?)?,
        })
    }

    /// Standard-normal factors, drawn in the order A, B, C.
    pub fn random(dims: [usize; 3], rng: &mut Rng) -> Result<Self> {
        let [i, j, k] = dims;
        let a = standard_normal(Shape::new(vec![i, j, 1])?, rng);
        let b = standard_normal(Shape::new(vec![i, 1, k])?, rng);
        let c = standard_normal(Shape::new(vec![1, j, k])?, rng);
        BdFactors::new(a, b, c)
    }

    /// `[I, J, K]`
    pub fn dims(&self) -> [usize; 3] {
        [self.a.dims()[0], self.a.dims()[1], self.b.dims()[2]]
    }

    /// `IJ + IK + JK`
    pub fn param_count(&self) -> usize {
        self.a.numel() + self.b.numel() + self.c.numel()
    }

    pub fn factor(&self, which: Factor) -> &DenseTensor {
        match which {
            Factor::A => &self.a,
            Factor::B => &self.b,
            Factor::C => &self.c,
        }
    }

    /// Product of the two factors other than `which`: the known tensor of that factor's update.
    fn complement(&self, which: Factor) -> DenseTensor {
        let (p, q) = match which {
            Factor::A => (&self.b, &self.c),
            Factor::B => (&self.a, &self.c),
            Factor::C => (&self.a, &self.b),
        };
        ops::product(p, q).expect("factor shapes are mutually compatible")
    }

    fn with_factor(&self, which: Factor, value: DenseTensor) -> BdFactors {
        let mut next = self.clone();
        match which {
            Factor::A => next.a = value,
            Factor::B => next.b = value,
            Factor::C => next.c = value,
        }
        next
    }
}

/// `A ⊡ B ⊡ C`, an `I×J×K` tensor with entries `a_ij · b_ik · c_jk`.
pub fn reconstruct(f: &BdFactors) -> DenseTensor {
    let ab = ops::product(&f.a, &f.b).expect("factor shapes are mutually compatible");
    ops::product(&ab, &f.c).expect("factor shapes are mutually compatible")
}

/// Number of parameters of a rank-`r` sum of broadcast decompositions.
pub fn sum_bd_param_count(dims: [usize; 3], r: usize) -> usize {
    let [i, j, k] = dims;
    r * (i * j + i * k + j * k)
}

/// Settings shared by every iterative fit in this crate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct FitConfig {
    pub max_iters: usize,
    /// Stop once the relative objective change of a full sweep drops below this.
    pub rel_tol: f64,
    pub seed: u64,
    /// Lower clamp for update denominators; 0 turns a vanishing denominator into an error.
    pub denom_epsilon: f64,
    /// Starting point of broadcast-decomposition fits; CP and Tucker ignore it.
    pub init: BdInit,
}

/// How [`bd_als`] and [`sum_bd_hals`] choose their initial terms.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BdInit {
    /// [`structured_init`]; for sums, each term starts from the residual left by the previous ones.
    #[default]
    Structured,
    /// I.i.d. standard normal entries drawn with the fit seed, term by term in the order A, B, C.
    Random,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            max_iters: 500,
            rel_tol: 1e-9,
            seed: 0,
            denom_epsilon: 1e-12,
            init: BdInit::Structured,
        }
    }
}

impl FitConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters < 1 {
            return Err(Error::InvalidProblem("max_iters must be at least 1".into()));
        }
        if self.rel_tol.is_nan() || self.rel_tol <= 0.0 {
            return Err(Error::InvalidProblem("rel_tol must be positive".into()));
        }
        if self.denom_epsilon.is_nan() || self.denom_epsilon < 0.0 {
            return Err(Error::InvalidProblem("denom_epsilon must be nonnegative".into()));
        }
        Ok(())
    }

    /// Stopping test after a sweep moved the objective from `prev` to `cur`.
    /// `scale` is `‖Y‖²`; an objective at round-off level of it counts as an exact fit.
    pub(crate) fn converged(&self, prev: f64, cur: f64, scale: f64) -> bool {
        cur <= EXACT_FIT * scale || (prev - cur).abs() <= self.rel_tol * prev
    }
}

// Relative squared residual of 1e-30 is a residual of 1e-15 relative: machine precision.
const EXACT_FIT: f64 = 1e-30;

/// Objective history of a fit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FitTrace {
    /// Objective before the first sweep.
    pub initial_objective: f64,
    /// `‖Y − model‖_F²` after each full sweep.
    pub objective_per_iter: Vec<f64>,
    /// Objective after every single factor update, in update order.
    pub objective_per_update: Vec<f64>,
    pub iterations_run: usize,
    pub converged: bool,
}

impl FitTrace {
    pub fn final_objective(&self) -> f64 {
        self.objective_per_iter
            .last()
            .copied()
            .unwrap_or(self.initial_objective)
    }

    /// Largest increase between consecutive per-update objectives (≤ 0 when monotone).
    pub fn max_update_increase(&self) -> f64 {
        std::iter::once(self.initial_objective)
            .chain(self.objective_per_update.iter().copied())
            .collect::<Vec<_>>()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Replaces one factor by its closed-form least-squares update given the
/// other two. The summed mode is the updated factor's singleton mode (3 for
/// A, 2 for B, 1 for C); denominators are clamped below at `eps`.
pub fn bd_update_factor(y: &DenseTensor, f: &BdFactors, which: Factor, eps: f64) -> Result<BdFactors> {
    if eps.is_nan() || eps < 0.0 {
        return Err(Error::InvalidProblem("eps must be nonnegative".into()));
    }
    let known = f.complement(which);
    let problem = LsProblem::new(y.clone(), known, f.factor(which).shape().clone())?;
    let updated = closed_form(&problem, Denominator::Clamp(eps))?;
    Ok(f.with_factor(which, updated))
}

/// `10·log10(‖reference‖² / ‖reference − estimate‖²)`; `+∞` for an exact estimate.
pub fn snr_db(reference: &DenseTensor, estimate: &DenseTensor) -> Result<f64> {
    if !reference.shape().is_equivalent(estimate.shape()) {
        return Err(Error::InvalidProblem(format!(
            "SNR needs equal shapes, got {} and {}",
            reference.shape(),
            estimate.shape()
        )));
    }
    let signal = frobenius_norm_sq(reference);
    if signal == 0.0 {
        return Err(Error::InvalidProblem("SNR reference is the zero tensor".into()));
    }
    let noise = squared_distance(reference, estimate)?;
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// `r` starting terms for a fit of `y` according to `cfg.init`.
pub(crate) fn initial_terms(y: &DenseTensor, r: usize, cfg: &FitConfig) -> Result<Vec<BdFactors>> {
    let dims = dims3(y.shape())?;
    match cfg.init {
        BdInit::Random => {
            let mut rng = crate::random::rng_from_seed(cfg.seed);
            (0..r).map(|_| BdFactors::random(dims, &mut rng)).collect()
        }
        BdInit::Structured => {
            let mut residual = y.reshape(Shape::new(dims.to_vec())?)?;
            let mut terms = Vec::with_capacity(r);
            for _ in 0..r {
                let t = structured_init(&residual, dims)?;
                residual = residual.sub(&reconstruct(&t))?;
                terms.push(t);
            }
            Ok(terms)
        }
    }
}

pub(crate) fn dims3(shape: &Shape) -> Result<[usize; 3]> {
    match *shape.padded(3).dims() {
        [i, j, k] => Ok([i, j, k]),
        _ => Err(Error::InvalidProblem(format!(
            "a third-order tensor is required, got {shape}"
        ))),
    }
}

/// The three updates of one sweep, in the fixed order A, B, C. Appends the
/// objective after each update to `objectives` and returns the last one.
pub(crate) fn sweep(
    y: &DenseTensor,
    f: &mut BdFactors,
    eps: f64,
    objectives: &mut Vec<f64>,
) -> Result<f64> {
    let mut obj = f64::NAN;
    for which in [Factor::A, Factor::B, Factor::C] {
        *f = bd_update_factor(y, f, which, eps)?;
        obj = squared_distance(y, &reconstruct(f))?;
        objectives.push(obj);
    }
    Ok(obj)
}
