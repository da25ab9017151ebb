//! Per-trial records and the results.csv schema.

use std::path::Path;

use anyhow::Context;
use serde::{Deserialize, Serialize};

pub const CSV_HEADER: &str = "experiment,d,eps,eta,seed,queries,dist_diamond,dist_lie,pudist,ent_infid,success,wall_ms";

/// One trial. Distances that do not apply to an experiment are left empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub experiment: String,
    pub d: usize,
    pub eps: f64,
    pub eta: f64,
    pub seed: u64,
    pub queries: u64,
    pub dist_diamond: Option<f64>,
    pub dist_lie: Option<f64>,
    pub pudist: Option<f64>,
    pub ent_infid: Option<f64>,
    pub success: bool,
    pub wall_ms: u64,
}

pub fn write_csv(path: &Path, records: &[ExperimentRecord]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for r in records {
        w.serialize(r).with_context(|| format!("writing {}", path.display()))?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

pub fn read_csv(path: &Path) -> anyhow::Result<Vec<ExperimentRecord>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    let header = r.headers()?.iter().collect::<Vec<_>>().join(",");
    if header != CSV_HEADER {
        anyhow::bail!("{}: unexpected header {header}", path.display());
    }
    r.deserialize()
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
}
