//! Batch experiments behind the command-line tool and their file formats.
//!
//! Tables are written as CSV, single runs as JSON. Every file starts with a
//! manifest: the resolved configuration of the run that produced it. In CSV
//! the manifest sits in `#` comment lines ahead of the header row.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;

pub mod check;
pub mod prepare;
pub mod scaling;
pub mod spectrum;

pub use check::{run_checks, CheckOutcome, CheckStatus};
pub use prepare::{run_prepare, CurvePoint, Outcome, PrepareConfig, PrepareReport};
pub use scaling::{
    fit_loglog, fit_power_law, read_scaling_csv, run_scaling, write_gnuplot_script, write_scaling_csv, FitResult,
    ScalingConfig, ScalingRecord, ScalingReport,
};
pub use spectrum::{run_spectrum, write_spectrum_csv, SpectrumRow};

/// Version of the JSON report layout and CSV manifest.
pub const SCHEMA_VERSION: u32 = 1;

/// Stated in every report: `t_c` counts preparation only.
pub const TIME_NOTE: &str =
    "t_c is the preparation (discrimination) time only; the duration of the photon-counting measurement is not modelled";

/// Formats a float with 17 significant digits, which round-trips `f64`
/// exactly.
pub fn fmt_f64(x: f64) -> String { format!("{:.16e}", x) }

#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Envelope shared by all JSON outputs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report<C, R> {
    pub schema_version: u32,
    pub command: String,
    pub config: C,
    pub notes: Vec<String>,
    pub results: R,
}

impl<C: Serialize, R: Serialize> Report<C, R> {
    pub fn new(command: &str, config: C, results: R) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            command: command.to_string(),
            config,
            notes: vec![TIME_NOTE.to_string()],
            results,
        }
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Writes the `#` manifest lines that precede a CSV table.
pub fn write_csv_manifest<W: Write, C: Serialize>(out: &mut W, command: &str, config: &C) -> Result<()> {
    writeln!(out, "# primecavity {} schema_version={}", command, SCHEMA_VERSION)?;
    writeln!(out, "# config: {}", serde_json::to_string(config)?)?;
    writeln!(out, "# note: {}", TIME_NOTE)?;
    Ok(())
}
