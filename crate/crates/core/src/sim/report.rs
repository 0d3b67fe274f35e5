//! Plot-ready campaign output.

use std::io::Write;

use super::{CampaignResult, Scenario};
use crate::error::{Error, Result};

/// Column order of the results CSV.
pub const RESULT_COLUMNS: [&str; 9] = [
    "scenario",
    "test",
    "alternative",
    "estimate",
    "mc_stderr",
    "n_effective",
    "band_low",
    "band_high",
    "verdict",
];

/// Token written for missing values.
pub const MISSING: &str = "NA";

fn opt(v: Option<f64>) -> String {
    v.map_or_else(|| MISSING.to_string(), |x| x.to_string())
}

/// Writes one row per scenario, test and alternative.
pub fn write_results_csv<W: Write>(out: W, results: &[(Scenario, CampaignResult)]) -> Result<()> {
    let io = |e: csv::Error| Error::Io(e.to_string());
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULT_COLUMNS).map_err(io)?;
    for (scenario, result) in results {
        for row in &result.rows {
            w.write_record([
                scenario.label.clone(),
                row.test.to_string(),
                row.alternative.to_string(),
                opt(row.estimate),
                opt(row.mc_stderr),
                row.n_effective.to_string(),
                opt(row.band.map(|b| b.0)),
                opt(row.band.map(|b| b.1)),
                row.verdict.as_str().to_string(),
            ])
            .map_err(io)?;
        }
    }
    w.flush()?;
    Ok(())
}
