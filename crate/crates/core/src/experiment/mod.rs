//! Synthetic rank sweep: planted broadcast-decomposition data plus Gaussian
//! noise, fitted by sums of BDs, CP and Tucker over rank grids, scored by SNR
//! against both the noiseless signal and the noisy observation.

mod report;

pub use report::{median, ExperimentReport, Method, ReportRow, SummaryRow, CSV_HEADER};

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{cp_als, tucker_hooi, Model};
use crate::btf;
use crate::decomposition::{reconstruct, snr_db, sum_bd_hals, sum_bd_param_count, BdFactors, FitConfig};
use crate::error::{Error, Result};
use crate::random::{rng_from_seed, standard_normal};
use crate::shape::Shape;
use crate::tensor::DenseTensor;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dims: [usize; 3],
    pub sigma: f64,
    pub seeds: Vec<u64>,
    #[serde(alias = "bd_R_grid")]
    pub bd_r_grid: Vec<usize>,
    #[serde(alias = "cp_R_grid")]
    pub cp_r_grid: Vec<usize>,
    /// Diagonal Tucker ranks: `r` stands for `(r, r, r)`.
    pub tucker_rank_grid: Vec<usize>,
    pub fit: FitConfig,
    /// Where to write `report.csv`, the plot data and the factors; nothing is written when unset.
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dims: [16, 16, 16],
            sigma: 0.1,
            seeds: vec![0, 1, 2, 3, 4],
            bd_r_grid: vec![1, 2],
            cp_r_grid: vec![1, 2, 4, 8, 16, 32, 64],
            tucker_rank_grid: (1..=16).collect(),
            fit: FitConfig::default(),
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| Error::InvalidProblem(format!("experiment config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_toml(&fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.dims.contains(&0) {
            return Err(Error::InvalidProblem("experiment dims must be positive".into()));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidProblem(format!("sigma must be finite and ≥ 0, got {}", self.sigma)));
        }
        for (name, empty) in [
            ("seeds", self.seeds.is_empty()),
            ("bd_R_grid", self.bd_r_grid.is_empty()),
            ("cp_R_grid", self.cp_r_grid.is_empty()),
            ("tucker_rank_grid", self.tucker_rank_grid.is_empty()),
        ] {
            if empty {
                return Err(Error::InvalidProblem(format!("{name} must not be empty")));
            }
        }
        self.fit.validate()
    }
}

/// Draws `A`, `B`, `C` and `E` (in that order) from the generator seeded
/// with `seed` and returns `(A⊡B⊡C, A⊡B⊡C + σE)`.
pub fn generate_synthetic(dims: [usize; 3], sigma: f64, seed: u64) -> Result<(DenseTensor, DenseTensor)> {
    if sigma.is_nan() || sigma < 0.0 {
        return Err(Error::InvalidProblem(format!("sigma must be ≥ 0, got {sigma}")));
    }
    let mut rng = rng_from_seed(seed);
    let planted = BdFactors::random(dims, &mut rng)?;
    let noise = standard_normal(Shape::new(dims.to_vec())?, &mut rng);
    let signal = reconstruct(&planted);
    let observed = signal.zip_with(&noise, |s, e| s + sigma * e)?;
    Ok((signal, observed))
}

/// Parameter count of a configuration, independent of whether its fit succeeds.
pub fn planned_param_count(method: Method, dims: [usize; 3], rank: usize) -> usize {
    let [i, j, k] = dims;
    match method {
        Method::SumBd => sum_bd_param_count(dims, rank),
        Method::Cp => rank * (i + j + k),
        Method::Tucker => rank * rank * rank + rank * (i + j + k),
    }
}

struct Cell {
    method: Method,
    rank: usize,
    seed: u64,
}

struct CellOutcome {
    row: ReportRow,
    model: Option<Model>,
}

/// Runs every (method, rank, seed) cell, in parallel, and writes the outputs
/// when `cfg.output_dir` is set. Failed fits become rows with `NaN` SNRs.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let data = cfg
        .seeds
        .iter()
        .map(|&s| generate_synthetic(cfg.dims, cfg.sigma, s))
        .collect::<Result<Vec<_>>>()?;

    let mut cells = Vec::new();
    for &seed in &cfg.seeds {
        for (method, grid) in [
            (Method::SumBd, &cfg.bd_r_grid),
            (Method::Cp, &cfg.cp_r_grid),
            (Method::Tucker, &cfg.tucker_rank_grid),
        ] {
            cells.extend(grid.iter().map(|&rank| Cell { method, rank, seed }));
        }
    }

    let outcomes: Vec<CellOutcome> = cells
        .par_iter()
        .map(|cell| {
            let idx = cfg.seeds.iter().position(|&s| s == cell.seed).expect("seed is listed");
            let (signal, observed) = &data[idx];
            run_cell(cfg, cell, signal, observed)
        })
        .collect();

    if let Some(dir) = &cfg.output_dir {
        let factor_dir = dir.join("factors");
        fs::create_dir_all(&factor_dir)?;
        for o in &outcomes {
            if let Some(model) = &o.model {
                write_factors(&factor_dir, &o.row, model)?;
            }
        }
    }

    let report = ExperimentReport::new(outcomes.into_iter().map(|o| o.row).collect());
    if let Some(dir) = &cfg.output_dir {
        fs::write(dir.join("report.csv"), report.to_csv())?;
        for method in Method::ALL {
            fs::write(
                dir.join(format!("plotdata_{method}.dat")),
                report.plot_data(method, cfg.sigma),
            )?;
        }
        fs::write(dir.join("config.toml"), cfg.to_toml())?;
    }
    Ok(report)
}

fn run_cell(cfg: &ExperimentConfig, cell: &Cell, signal: &DenseTensor, observed: &DenseTensor) -> CellOutcome {
    // Initializations differ across data seeds but stay reproducible.
    let fit = FitConfig {
        seed: cfg.fit.seed.wrapping_add(cell.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        ..cfg.fit
    };
    let fitted = match cell.method {
        Method::SumBd => sum_bd_hals(observed, cell.rank, &fit).map(|(t, tr)| (Model::SumBd(t), tr)),
        Method::Cp => cp_als(observed, cell.rank, &fit).map(|(m, tr)| (Model::Cp(m), tr)),
        Method::Tucker => {
            tucker_hooi(observed, [cell.rank; 3], &fit).map(|(m, tr)| (Model::Tucker(m), tr))
        }
    };
    let scored = fitted.and_then(|(model, trace)| {
        let estimate = model.reconstruct()?;
        let s = snr_db(signal, &estimate)?;
        let o = snr_db(observed, &estimate)?;
        Ok((model, trace, s, o))
    });
    let mut row = ReportRow {
        method: cell.method,
        rank: cell.rank,
        n_params: planned_param_count(cell.method, cfg.dims, cell.rank),
        snr_signal_db: f64::NAN,
        snr_observed_db: f64::NAN,
        iterations: 0,
        seed: cell.seed,
    };
    match scored {
        Ok((model, trace, s, o)) => {
            row.n_params = crate::baselines::param_count(&model);
            row.snr_signal_db = s;
            row.snr_observed_db = o;
            row.iterations = trace.iterations_run;
            CellOutcome { row, model: Some(model) }
        }
        Err(_) => CellOutcome { row, model: None },
    }
}

/// File stem shared by every factor of one report row.
pub fn factor_stem(row: &ReportRow) -> String {
    format!("{}_r{}_seed{}", row.method, row.rank, row.seed)
}

fn write_factors(dir: &Path, row: &ReportRow, model: &Model) -> Result<()> {
    let stem = factor_stem(row);
    let put = |name: String, t: &DenseTensor| btf::write(t, dir.join(format!("{stem}_{name}.btf")));
    match model {
        Model::SumBd(terms) => {
            for (n, t) in terms.iter().enumerate() {
                put(format!("A{}", n + 1), &t.a)?;
                put(format!("B{}", n + 1), &t.b)?;
                put(format!("C{}", n + 1), &t.c)?;
            }
        }
        Model::Cp(m) => {
            for (n, u) in m.factors.iter().enumerate() {
                put(format!("U{}", n + 1), &crate::baselines::from_matrix(u))?;
            }
        }
        Model::Tucker(m) => {
            put("G".into(), &m.core)?;
            for (n, u) in m.factors.iter().enumerate() {
                put(format!("U{}", n + 1), &crate::baselines::from_matrix(u))?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_noise_observes_signal() {
        let (s, o) = generate_synthetic([3, 4, 2], 0.0, 7).unwrap();
        assert_eq!(s, o);
        let (s2, _) = generate_synthetic([3, 4, 2], 0.0, 7).unwrap();
        assert_eq!(s, s2);
    }

    #[test]
    fn planned_counts_match_models() {
        assert_eq!(planned_param_count(Method::SumBd, [32, 32, 32], 1), 3072);
        assert_eq!(planned_param_count(Method::Cp, [32, 32, 32], 10), 960);
        assert_eq!(planned_param_count(Method::Tucker, [32, 32, 32], 4), 448);
    }

    #[test]
    fn config_round_trips_through_toml() {
        let cfg = ExperimentConfig {
            output_dir: Some("out".into()),
            ..Default::default()
        };
        assert_eq!(ExperimentConfig::from_toml(&cfg.to_toml()).unwrap(), cfg);
        let partial = ExperimentConfig::from_toml("dims = [8, 8, 8]\nbd_R_grid = [1]\n").unwrap();
        assert_eq!(partial.dims, [8, 8, 8]);
        assert_eq!(partial.bd_r_grid, vec![1]);
        assert_eq!(partial.sigma, 0.1);
        assert!(ExperimentConfig::from_toml("sigma = -1.0").is_err());
        assert!(ExperimentConfig::from_toml("seeds = []").is_err());
        assert!(ExperimentConfig::from_toml("unknown = 1").is_err());
    }

    #[test]
    fn failed_fits_become_nan_rows() {
        let cfg = ExperimentConfig {
            dims: [3, 3, 3],
            seeds: vec![1],
            bd_r_grid: vec![1],
            cp_r_grid: vec![1],
            tucker_rank_grid: vec![2, 4],
            fit: FitConfig { max_iters: 5, ..Default::default() },
            ..Default::default()
        };
        let report = run_experiment(&cfg).unwrap();
        assert_eq!(report.rows.len(), 4);
        let bad = report.rows.iter().find(|r| r.method == Method::Tucker && r.rank == 4).unwrap();
        assert!(bad.snr_signal_db.is_nan() && bad.snr_observed_db.is_nan());
        assert_eq!(bad.n_params, 64 + 4 * 9);
        assert!(report.rows.iter().filter(|r| r.rank != 4).all(|r| r.snr_signal_db.is_finite()));
    }
}
