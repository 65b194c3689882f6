//! Result records and CSV rendering.
//!
//! One [`ResultRecord`] per run, with a fixed column contract. Files start
//! with a single `#` comment line carrying the timestamp; everything after it
//! is deterministic for a given config, so repeated runs produce
//! byte-identical bodies.

use std::collections::BTreeMap;

/// Exact header of the per-run CSV.
pub const CSV_HEADER: &str = "run_id,algorithm,T,n,seed,iter,comm_rounds,grad_evals,rel_error,\
gnorm_error,consensus_gap,steps_to_eps,comms_to_eps,delta_certified";

/// Outcome of a single run. Optional fields render as empty cells: a missing
/// `steps_to_eps` means the target was not reached (or the run diverged, in
/// which case `rel_error` is `inf`); missing certificate fields mean no rate
/// was certified for that configuration.
#[derive(Debug, Clone)]
pub struct ResultRecord {
    pub run_id: String,
    pub algorithm: String,
    /// Primal updates per iteration; 0 for methods without an inner loop.
    pub t: usize,
    pub n: usize,
    pub seed: u64,
    pub iter: u64,
    pub comm_rounds: u64,
    pub grad_evals: u64,
    pub rel_error: f64,
    pub gnorm_error: Option<f64>,
    pub consensus_gap: f64,
    pub steps_to_eps: Option<u64>,
    pub comms_to_eps: Option<u64>,
    pub delta_certified: Option<f64>,
}

fn fmt_float(v: f64) -> String {
    if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v}")
    }
}

fn fmt_opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn fmt_opt_float(v: Option<f64>) -> String {
    v.map(fmt_float).unwrap_or_default()
}

impl ResultRecord {
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            self.run_id,
            self.algorithm,
            self.t,
            self.n,
            self.seed,
            self.iter,
            self.comm_rounds,
            self.grad_evals,
            fmt_float(self.rel_error),
            fmt_opt_float(self.gnorm_error),
            fmt_float(self.consensus_gap),
            fmt_opt_u64(self.steps_to_eps),
            fmt_opt_u64(self.comms_to_eps),
            fmt_opt_float(self.delta_certified),
        )
    }
}

/// Render records as CSV, sorted by `run_id` so concurrent production order
/// can never leak into the output bytes.
pub fn render_runs_csv(records: &[ResultRecord], timestamp_line: Option<&str>) -> String {
    let mut sorted: Vec<&ResultRecord> = records.iter().collect();
    sorted.sort_by(|a, b| a.run_id.cmp(&b.run_id));
    let mut out = String::new();
    if let Some(ts) = timestamp_line {
        out.push_str(ts);
        out.push('\n');
    }
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in sorted {
        out.push_str(&r.csv_row());
        out.push('\n');
    }
    out
}

/// Seed-averaged statistics for one `(n, algorithm, T)` group. Averages are
/// taken over the runs that reached the target; `runs` and `reached` make
/// the divisor recomputable from the per-run file.
#[derive(Debug, Clone, PartialEq)]
pub struct AverageRecord {
    pub n: usize,
    pub algorithm: String,
    pub t: usize,
    pub runs: usize,
    pub reached: usize,
    pub mean_steps_to_eps: Option<f64>,
    pub mean_comms_to_eps: Option<f64>,
}

pub const AVERAGES_HEADER: &str =
    "n,algorithm,T,runs,reached,mean_steps_to_eps,mean_comms_to_eps";

/// Group records by `(n, algorithm, T)` and average the reached runs.
pub fn averages(records: &[ResultRecord]) -> Vec<AverageRecord> {
    let mut groups: BTreeMap<(usize, String, usize), Vec<&ResultRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.n, r.algorithm.clone(), r.t)).or_default().push(r);
    }
    groups
        .into_iter()
        .map(|((n, algorithm, t), rows)| {
            let reached: Vec<&&ResultRecord> =
                rows.iter().filter(|r| r.steps_to_eps.is_some()).collect();
            let mean = |f: fn(&ResultRecord) -> Option<u64>| -> Option<f64> {
                if reached.is_empty() {
                    None
                } else {
                    let sum: u64 = reached.iter().map(|r| f(r).unwrap()).sum();
                    Some(sum as f64 / reached.len() as f64)
                }
            };
            AverageRecord {
                n,
                algorithm,
                t,
                runs: rows.len(),
                reached: reached.len(),
                mean_steps_to_eps: mean(|r| r.steps_to_eps),
                mean_comms_to_eps: mean(|r| r.comms_to_eps),
            }
        })
        .collect()
}

pub fn render_averages_csv(avgs: &[AverageRecord], timestamp_line: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp_line {
        out.push_str(ts);
        out.push('\n');
    }
    out.push_str(AVERAGES_HEADER);
    out.push('\n');
    for a in avgs {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            a.n,
            a.algorithm,
            a.t,
            a.runs,
            a.reached,
            fmt_opt_float(a.mean_steps_to_eps),
            fmt_opt_float(a.mean_comms_to_eps),
        ));
    }
    out
}

/// One sampled point of a relative-error series.
#[derive(Debug, Clone)]
pub struct SeriesPoint {
    pub algorithm: String,
    pub t: usize,
    pub iter: u64,
    pub comm_rounds: u64,
    pub rel_error: f64,
}

pub const SERIES_HEADER: &str = "algorithm,T,iter,comm_rounds,rel_error";

pub fn render_series_csv(points: &[SeriesPoint], timestamp_line: Option<&str>) -> String {
    let mut out = String::new();
    if let Some(ts) = timestamp_line {
        out.push_str(ts);
        out.push('\n');
    }
    out.push_str(SERIES_HEADER);
    out.push('\n');
    for p in points {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            p.algorithm,
            p.t,
            p.iter,
            p.comm_rounds,
            fmt_float(p.rel_error)
        ));
    }
    out
}

/// Strip the leading `#` timestamp line, leaving the deterministic body.
pub fn csv_body(text: &str) -> &str {
    match text.strip_prefix('#') {
        Some(_) => text.split_once('\n').map(|(_, rest)| rest).unwrap_or(""),
        None => text,
    }
}
