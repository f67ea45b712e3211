use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{ExperimentConfig, Reference, Statistic};
use super::run::{TrialRow, TrialTable};
use super::stats::{histogram, ks_distance, EmpiricalDistribution};
use crate::error::Result;
use crate::neumann::Halt;

pub const TRIALS_FILE: &str = "trials.csv";
pub const STATISTICS_FILE: &str = "statistics.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";

/// Step of the central difference used for the theoretical pdf column.
const PDF_STEP: f64 = 1e-4;

/// `HaltingRecord` as a CSV row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HaltingCsvRow {
    pub trial_index: u64,
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub k_eps: Option<u64>,
    pub k_star_eps: Option<u64>,
    #[serde(rename = "K_eps")]
    pub big_k_eps: u64,
    #[serde(rename = "K_star_eps")]
    pub big_k_star_eps: u64,
    pub saturated: u8,
}

impl From<&TrialRow> for HaltingCsvRow {
    fn from(r: &TrialRow) -> Self {
        let rec = &r.record;
        Self {
            trial_index: r.trial_index,
            n: r.n,
            lambda_min: rec.lambda_min,
            lambda_max: rec.lambda_max,
            k_eps: rec.k_eps.map(Halt::count),
            k_star_eps: rec.k_star_eps.map(Halt::count),
            big_k_eps: rec.big_k_eps,
            big_k_star_eps: rec.big_k_star_eps,
            saturated: rec.saturated() as u8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct StatisticCsvRow {
    trial_index: u64,
    n: usize,
    seed: u64,
    value: f64,
    value_bottom: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Quantiles {
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeSummary {
    pub mean: f64,
    pub quantiles: Quantiles,
    pub reference: Option<Reference>,
    pub ks_distance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NSummary {
    pub n: usize,
    pub trials: usize,
    pub saturated: usize,
    pub statistic: EdgeSummary,
    pub bottom_edge: Option<EdgeSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub empty: bool,
    pub statistic: Statistic,
    pub epsilon: f64,
    pub alpha: f64,
    pub beta: f64,
    pub master_seed: u64,
    pub total_trials: usize,
    pub total_saturated: usize,
    /// `E[log ξ]` used by `Z_refined`.
    pub mean_log_xi: Option<f64>,
    pub per_n: Vec<NSummary>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportPaths {
    pub trials: PathBuf,
    pub statistics: PathBuf,
    pub summary: PathBuf,
    pub histogram: PathBuf,
}

fn edge_summary(
    values: Vec<f64>,
    reference: Option<Reference>,
) -> Result<(EdgeSummary, EmpiricalDistribution)> {
    let dist = EmpiricalDistribution::new(values)?;
    let q = |p| dist.quantile(p).unwrap_or(f64::NAN);
    let ks_distance = reference
        .as_ref()
        .map(|r| ks_distance(&dist, r))
        .transpose()?;
    Ok((
        EdgeSummary {
            mean: dist.mean().unwrap_or(f64::NAN),
            quantiles: Quantiles {
                q05: q(0.05),
                q25: q(0.25),
                q50: q(0.5),
                q75: q(0.75),
                q95: q(0.95),
            },
            reference,
            ks_distance,
        },
        dist,
    ))
}

/// Per-`n` statistics, KS distances against the limit law and saturation
/// counts.
pub fn summarize(table: &TrialTable) -> Result<Summary> {
    Ok(summarize_with_distributions(table)?.0)
}

type EdgeDists = Vec<(usize, EmpiricalDistribution, Option<EmpiricalDistribution>)>;

fn summarize_with_distributions(table: &TrialTable) -> Result<(Summary, EdgeDists)> {
    let cfg = &table.config;
    let mut per_n = Vec::new();
    let mut dists = Vec::new();
    for &n in &cfg.n_values {
        let rows: Vec<&TrialRow> = table.rows_for(n).collect();
        if rows.is_empty() {
            continue;
        }
        let (top_ref, bottom_ref) = cfg.reference(n);
        let (top, top_dist) = edge_summary(rows.iter().map(|r| r.value).collect(), top_ref)?;
        let bottoms: Vec<f64> = rows.iter().filter_map(|r| r.value_bottom).collect();
        let (bottom_edge, bottom_dist) = if bottoms.is_empty() {
            (None, None)
        } else {
            let (s, d) = edge_summary(bottoms, bottom_ref)?;
            (Some(s), Some(d))
        };
        per_n.push(NSummary {
            n,
            trials: rows.len(),
            saturated: table.saturated_count(n),
            statistic: top,
            bottom_edge,
        });
        dists.push((n, top_dist, bottom_dist));
    }
    let mean_log_xi = match (cfg.statistic, cfg.n_values.first()) {
        (Statistic::ZRefined, Some(&n)) => Some(cfg.resolved_mean_log_xi(n)?),
        _ => None,
    };
    let summary = Summary {
        empty: table.rows.is_empty(),
        statistic: cfg.statistic,
        epsilon: cfg.epsilon,
        alpha: cfg.alpha(),
        beta: cfg.beta(),
        master_seed: cfg.master_seed,
        total_trials: table.rows.len(),
        total_saturated: per_n.iter().map(|s| s.saturated).sum(),
        mean_log_xi,
        per_n,
    };
    Ok((summary, dists))
}

pub fn write_trials_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record([
            "trial_index",
            "n",
            "lambda_min",
            "lambda_max",
            "k_eps",
            "k_star_eps",
            "K_eps",
            "K_star_eps",
            "saturated",
        ])?;
    }
    for r in rows {
        w.serialize(HaltingCsvRow::from(r))?;
    }
    w.flush()?;
    Ok(())
}

fn write_statistics_csv<W: Write>(rows: &[TrialRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    if rows.is_empty() {
        w.write_record(["trial_index", "n", "seed", "value", "value_bottom"])?;
    }
    for r in rows {
        w.serialize(StatisticCsvRow {
            trial_index: r.trial_index,
            n: r.n,
            seed: r.seed,
            value: r.value,
            value_bottom: r.value_bottom,
        })?;
    }
    w.flush()?;
    Ok(())
}

fn write_histogram_csv<W: Write>(cfg: &ExperimentConfig, dists: &EdgeDists, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "edge",
        "bin_left",
        "bin_right",
        "density",
        "theory_pdf",
    ])?;
    for (n, top, bottom) in dists {
        let (top_ref, bottom_ref) = cfg.reference(*n);
        let edges = [
            ("top", Some(top), top_ref),
            ("bottom", bottom.as_ref(), bottom_ref),
        ];
        for (edge, dist, reference) in edges {
            let Some(dist) = dist else { continue };
            let h = histogram(dist, cfg.bins)?;
            for (i, density) in h.densities.iter().enumerate() {
                let (a, b) = (h.edges[i], h.edges[i + 1]);
                let theory = match reference {
                    Some(r) => r.pdf(0.5 * (a + b), PDF_STEP)?.to_string(),
                    None => String::new(),
                };
                w.write_record([
                    n.to_string(),
                    edge.to_string(),
                    a.to_string(),
                    b.to_string(),
                    density.to_string(),
                    theory,
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Writes the trials CSV, per-trial statistic CSV, summary JSON and histogram
/// CSV (with the theoretical density at bin midpoints) into `dir`.
pub fn emit_report(table: &TrialTable, dir: &Path) -> Result<ReportPaths> {
    std::fs::create_dir_all(dir)?;
    let paths = ReportPaths {
        trials: dir.join(TRIALS_FILE),
        statistics: dir.join(STATISTICS_FILE),
        summary: dir.join(SUMMARY_FILE),
        histogram: dir.join(HISTOGRAM_FILE),
    };
    let (summary, dists) = summarize_with_distributions(table)?;
    write_trials_csv(&table.rows, std::fs::File::create(&paths.trials)?)?;
    write_statistics_csv(&table.rows, std::fs::File::create(&paths.statistics)?)?;
    let mut f = std::fs::File::create(&paths.summary)?;
    serde_json::to_writer_pretty(&mut f, &summary)?;
    writeln!(f)?;
    write_histogram_csv(
        &table.config,
        &dists,
        std::fs::File::create(&paths.histogram)?,
    )?;
    Ok(paths)
}
