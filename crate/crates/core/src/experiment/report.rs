use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use crate::btf::format_value;

/// Model family of a report row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Cp,
    SumBd,
    Tucker,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Cp => "cp",
            Method::SumBd => "sum-bd",
            Method::Tucker => "tucker",
        }
    }

    pub const ALL: [Method; 3] = [Method::Cp, Method::SumBd, Method::Tucker];
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One fitted (method, rank, seed) cell. Failed fits carry `NaN` SNRs.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub method: Method,
    /// `R` for CP and sums of BDs, `r` for a Tucker model with ranks `(r, r, r)`.
    pub rank: usize,
    pub n_params: usize,
    pub snr_signal_db: f64,
    pub snr_observed_db: f64,
    pub iterations: usize,
    pub seed: u64,
}

impl ReportRow {
    pub fn rank_param(&self) -> String {
        match self.method {
            Method::Tucker => format!("{0}x{0}x{0}", self.rank),
            _ => self.rank.to_string(),
        }
    }

    fn key(&self) -> (Method, usize, u64) {
        (self.method, self.rank, self.seed)
    }
}

/// Median over seeds for one (method, rank) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub rank: usize,
    pub n_params: usize,
    pub median_snr_signal_db: f64,
    pub median_snr_observed_db: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentReport {
    pub rows: Vec<ReportRow>,
}

pub const CSV_HEADER: &str = "method,rank_param,n_params,snr_signal_db,snr_observed_db,iterations,seed";

impl ExperimentReport {
    /// Rows are kept sorted by (method, rank, seed).
    pub fn new(mut rows: Vec<ReportRow>) -> Self {
        rows.sort_by_key(ReportRow::key);
        ExperimentReport { rows }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.method,
                r.rank_param(),
                r.n_params,
                format_value(r.snr_signal_db),
                format_value(r.snr_observed_db),
                r.iterations,
                r.seed
            )
            .expect("writing to a String cannot fail");
        }
        out
    }

    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        for chunk in self.rows.chunk_by(|a, b| (a.method, a.rank) == (b.method, b.rank)) {
            let first = &chunk[0];
            out.push(SummaryRow {
                method: first.method,
                rank: first.rank,
                n_params: first.n_params,
                median_snr_signal_db: median(chunk.iter().map(|r| r.snr_signal_db)),
                median_snr_observed_db: median(chunk.iter().map(|r| r.snr_observed_db)),
            });
        }
        out
    }

    /// gnuplot-ready `n_params  median_snr_signal_db  median_snr_observed_db  rank`
    /// lines for one method, ordered by parameter count.
    pub fn plot_data(&self, method: Method, sigma: f64) -> String {
        let mut rows: Vec<SummaryRow> = self
            .summary()
            .into_iter()
            .filter(|s| s.method == method)
            .collect();
        rows.sort_by_key(|s| (s.n_params, s.rank));
        let mut out = format!(
            "# method {method}, sigma {}, median over seeds\n# n_params snr_signal_db snr_observed_db rank\n",
            format_value(sigma)
        );
        for s in rows {
            writeln!(
                out,
                "{} {} {} {}",
                s.n_params,
                format_value(s.median_snr_signal_db),
                format_value(s.median_snr_observed_db),
                s.rank
            )
            .expect("writing to a String cannot fail");
        }
        out
    }
}

/// Median of the non-NaN values (mean of the middle two for even counts); `NaN` if none.
pub fn median(values: impl Iterator<Item = f64>) -> f64 {
    let mut v: Vec<f64> = values.filter(|x| !x.is_nan()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    let n = v.len();
    if n % 2 == 1 || v[n / 2 - 1] == v[n / 2] {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
