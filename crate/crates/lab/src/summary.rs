//! Per-cell aggregates and fitted query-scaling slopes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use unitary_lab_core::bootstrap::loglog_slope;

use crate::record::ExperimentRecord;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellSummary {
    pub experiment: String,
    pub d: usize,
    pub eps: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub median_queries: f64,
    pub median_dist_lie: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeSummary {
    pub experiment: String,
    pub d: usize,
    /// Least-squares slope of ln(median queries) against ln(1/eps).
    pub slope: Option<f64>,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub cells: Vec<CellSummary>,
    pub slopes: Vec<SlopeSummary>,
}

pub fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let n = values.len();
    Some(if n % 2 == 1 { values[n / 2] } else { 0.5 * (values[n / 2 - 1] + values[n / 2]) })
}

/// Slope of `ln Q` against `ln(1/eps)` over per-eps medians.
pub fn heisenberg_slope(cells: &[CellSummary]) -> unitary_lab_core::Result<f64> {
    let points: Vec<(f64, f64)> = cells.iter().map(|c| (c.eps, c.median_queries)).collect();
    loglog_slope(&points)
}

pub fn summarize(records: &[ExperimentRecord]) -> anyhow::Result<Summary> {
    if records.is_empty() {
        anyhow::bail!("no records to summarize");
    }
    let mut groups: BTreeMap<(String, usize, u64), Vec<&ExperimentRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.experiment.clone(), r.d, r.eps.to_bits())).or_default().push(r);
    }
    let cells: Vec<CellSummary> = groups
        .into_iter()
        .map(|((experiment, d, eps), rs)| {
            let successes = rs.iter().filter(|r| r.success).count();
            let mut q: Vec<f64> = rs.iter().map(|r| r.queries as f64).collect();
            let mut lie: Vec<f64> = rs.iter().filter_map(|r| r.dist_lie).collect();
            CellSummary {
                experiment,
                d,
                eps: f64::from_bits(eps),
                trials: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                median_queries: median(&mut q).unwrap_or(0.0),
                median_dist_lie: median(&mut lie),
            }
        })
        .collect();
    let mut by_series: BTreeMap<(String, usize), Vec<CellSummary>> = BTreeMap::new();
    for c in &cells {
        by_series.entry((c.experiment.clone(), c.d)).or_default().push(c.clone());
    }
    let slopes = by_series
        .into_iter()
        .map(|((experiment, d), cs)| match heisenberg_slope(&cs) {
            Ok(s) => SlopeSummary { experiment, d, slope: Some(s), note: None },
            Err(e) => SlopeSummary { experiment, d, slope: None, note: Some(e.to_string()) },
        })
        .collect();
    Ok(Summary { cells, slopes })
}
