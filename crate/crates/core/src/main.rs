use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use broadcast_tensor::baselines::{cp_als, tucker_hooi};
use broadcast_tensor::btf::{self, format_value};
use broadcast_tensor::decomposition::{bd_als, sum_bd_hals, FitConfig, FitTrace};
use broadcast_tensor::experiment::{run_experiment, ExperimentConfig, Method};
use broadcast_tensor::lstsq::LsProblem;
use broadcast_tensor::{DenseTensor, Error, Result, Shape};

#[derive(Parser)]
#[command(name = "broadcast-tensor", version, about = "Broadcast tensor algebra batch tools")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve min_W ‖X − W ⊡ H‖ in closed form.
    LsSolve {
        #[arg(long)]
        observed: PathBuf,
        #[arg(long)]
        known: PathBuf,
        /// Mode lengths of W, e.g. `4,1,3`.
        #[arg(long)]
        unknown_shape: Shape,
        #[arg(long)]
        out: PathBuf,
        /// Add λ to every denominator.
        #[arg(long)]
        ridge: Option<f64>,
    },
    /// Fit a broadcast decomposition or a sum of them to a third-order tensor.
    Decompose {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "bd")]
        model: BdModel,
        /// Number of terms (sum-bd only).
        #[arg(long = "R", default_value_t = 1)]
        r: usize,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Fit a CP or Tucker baseline to a third-order tensor.
    Baseline {
        #[arg(long, value_enum)]
        method: BaselineMethod,
        #[arg(long)]
        input: PathBuf,
        /// CP rank `R`, or Tucker ranks as `r` or `r1,r2,r3`.
        #[arg(long, value_delimiter = ',', num_args = 1..=3, required = true)]
        rank: Vec<usize>,
        #[command(flatten)]
        fit: FitArgs,
        #[arg(long)]
        out_prefix: PathBuf,
    },
    /// Synthetic rank sweep over sums of BDs, CP and Tucker.
    Experiment {
        /// TOML file with `ExperimentConfig` fields; flags override it.
        #[arg(long)]
        config: Option<PathBuf>,
        /// `I,J,K`
        #[arg(long, value_delimiter = ',')]
        dims: Option<Vec<usize>>,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        seeds: Option<Vec<u64>>,
        #[arg(long = "bd-R", value_delimiter = ',', num_args = 1..)]
        bd_r: Option<Vec<usize>>,
        #[arg(long = "cp-R", value_delimiter = ',', num_args = 1..)]
        cp_r: Option<Vec<usize>>,
        #[arg(long = "tucker-r", value_delimiter = ',', num_args = 1..)]
        tucker_r: Option<Vec<usize>>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum BdModel {
    Bd,
    SumBd,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineMethod {
    Cp,
    Tucker,
}

#[derive(clap::Args)]
struct FitArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
}

impl FitArgs {
    fn config(&self) -> FitConfig {
        FitConfig {
            max_iters: self.max_iters,
            rel_tol: self.tol,
            seed: self.seed,
            ..Default::default()
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::LsSolve {
            observed,
            known,
            unknown_shape,
            out,
            ridge,
        } => {
            let problem = LsProblem::new(btf::read(observed)?, btf::read(known)?, unknown_shape)?;
            let w = match ridge {
                Some(lambda) => problem.solve_ridge(lambda)?,
                None => problem.solve()?,
            };
            btf::write(&w, &out)?;
            println!("partition {}; wrote {}", problem.partition()?, out.display());
        }
        Command::Decompose {
            input,
            model,
            r,
            fit,
            out_prefix,
        } => {
            let y = btf::read(input)?;
            let cfg = fit.config();
            let mut outputs = Vec::new();
            let trace = match model {
                BdModel::Bd => {
                    let (f, trace) = bd_als(&y, &cfg)?;
                    outputs.extend([("A".to_string(), f.a), ("B".into(), f.b), ("C".into(), f.c)]);
                    trace
                }
                BdModel::SumBd => {
                    let (terms, trace) = sum_bd_hals(&y, r, &cfg)?;
                    for (n, t) in terms.into_iter().enumerate() {
                        outputs.push((format!("A{}", n + 1), t.a));
                        outputs.push((format!("B{}", n + 1), t.b));
                        outputs.push((format!("C{}", n + 1), t.c));
                    }
                    trace
                }
            };
            write_outputs(&out_prefix, &outputs, &trace)?;
        }
        Command::Baseline {
            method,
            input,
            rank,
            fit,
            out_prefix,
        } => {
            let y = btf::read(input)?;
            let cfg = fit.config();
            let mut outputs = Vec::new();
            let trace = match method {
                BaselineMethod::Cp => {
                    let [r] = rank[..] else {
                        return Err(Error::InvalidProblem("CP takes a single rank".into()));
                    };
                    let (m, trace) = cp_als(&y, r, &cfg)?;
                    for (n, u) in m.factors.iter().enumerate() {
                        outputs.push((format!("U{}", n + 1), matrix_tensor(u)?));
                    }
                    trace
                }
                BaselineMethod::Tucker => {
                    let ranks = match rank[..] {
                        [r] => [r; 3],
                        [a, b, c] => [a, b, c],
                        _ => return Err(Error::InvalidProblem("Tucker takes `r` or `r1,r2,r3`".into())),
                    };
                    let (m, trace) = tucker_hooi(&y, ranks, &cfg)?;
                    outputs.push(("G".into(), m.core.clone()));
                    for (n, u) in m.factors.iter().enumerate() {
                        outputs.push((format!("U{}", n + 1), matrix_tensor(u)?));
                    }
                    trace
                }
            };
            write_outputs(&out_prefix, &outputs, &trace)?;
        }
        Command::Experiment {
            config,
            dims,
            sigma,
            seeds,
            bd_r,
            cp_r,
            tucker_r,
            max_iters,
            tol,
            out,
        } => {
            let mut cfg = match config {
                Some(path) => ExperimentConfig::load(path)?,
                None => ExperimentConfig::default(),
            };
            if let Some(d) = dims {
                cfg.dims = d
                    .try_into()
                    .map_err(|_| Error::InvalidProblem("--dims takes three lengths `I,J,K`".into()))?;
            }
            cfg.sigma = sigma.unwrap_or(cfg.sigma);
            cfg.seeds = seeds.unwrap_or(cfg.seeds);
            cfg.bd_r_grid = bd_r.unwrap_or(cfg.bd_r_grid);
            cfg.cp_r_grid = cp_r.unwrap_or(cfg.cp_r_grid);
            cfg.tucker_rank_grid = tucker_r.unwrap_or(cfg.tucker_rank_grid);
            cfg.fit.max_iters = max_iters.unwrap_or(cfg.fit.max_iters);
            cfg.fit.rel_tol = tol.unwrap_or(cfg.fit.rel_tol);
            cfg.output_dir = out.or(cfg.output_dir);
            if cfg.output_dir.is_none() {
                return Err(Error::InvalidProblem("experiment needs --out or output_dir".into()));
            }
            let report = run_experiment(&cfg)?;
            for method in Method::ALL {
                for s in report.summary().iter().filter(|s| s.method == method) {
                    println!(
                        "{:<7} rank {:>3}  params {:>6}  median SNR {:>8.3} dB (signal) {:>8.3} dB (observed)",
                        s.method, s.rank, s.n_params, s.median_snr_signal_db, s.median_snr_observed_db
                    );
                }
            }
        }
    }
    Ok(())
}

fn matrix_tensor(m: &nalgebra::DMatrix<f64>) -> Result<DenseTensor> {
    DenseTensor::from_dims(&[m.nrows(), m.ncols()], m.as_slice().to_vec())
}

/// `<prefix>_<name>.btf` per factor plus `<prefix>_trace.csv`; row 0 of the
/// trace is the objective at initialization.
fn write_outputs(prefix: &Path, factors: &[(String, DenseTensor)], trace: &FitTrace) -> Result<()> {
    let with_suffix = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    if let Some(dir) = prefix.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    for (name, t) in factors {
        btf::write(t, with_suffix(&format!("_{name}.btf")))?;
    }
    let mut csv = String::from("iter,objective\n");
    let objectives = std::iter::once(trace.initial_objective).chain(trace.objective_per_iter.iter().copied());
    for (i, obj) in objectives.enumerate() {
        writeln!(csv, "{i},{}", format_value(obj)).expect("writing to a String cannot fail");
    }
    fs::write(with_suffix("_trace.csv"), csv)?;
    println!(
        "{} sweeps, converged: {}, final objective {}",
        trace.iterations_run,
        trace.converged,
        format_value(trace.final_objective())
    );
    Ok(())
}
