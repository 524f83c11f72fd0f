//! Preparation time and time-energy product as functions of `N`.

use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fmt_f64, write_csv_manifest, Report};
use crate::cavity::{build_basis, build_coupling, CouplingModel};
use crate::encoding::level_energy;
use crate::error::{Error, Result};
use crate::perturbation::{discrimination_time, DiscriminationMode};
use crate::units::Units;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingConfig {
    pub targets: Vec<u64>,
    pub kappa: f64,
    pub mode: DiscriminationMode,
    pub coupling_model: CouplingModel,
    pub lambda: f64,
    pub units: Units,
    /// Defaults to twice the largest target.
    pub n_max: Option<u64>,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            targets: vec![8, 16, 32, 64, 128],
            kappa: 10.0,
            mode: DiscriminationMode::Envelope,
            coupling_model: CouplingModel::StarUniform,
            lambda: 1e-3,
            units: Units::default(),
            n_max: None,
        }
    }
}

/// Cost of preparing one label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingRecord {
    #[serde(rename = "N")]
    pub n: u64,
    /// `log₂ N`.
    pub bit_size: f64,
    pub t_disc: f64,
    /// `E_N = ħω ln N`.
    pub energy: f64,
    /// `t_disc·E_N`.
    pub product: f64,
    /// `product / (ħ N ln N)`.
    pub ratio: f64,
}

/// Least squares line through `(ln N, ln t_disc)`.
#[derive(Copy, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub rss: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingReport {
    pub records: Vec<ScalingRecord>,
    pub fit: Option<FitResult>,
}

/// Ordinary least squares `y = intercept + slope·x`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 3 {
        return Err(Error::Fit(format!("need at least 3 points, got {}", points.len())));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    if !(sxx > 0.0) {
        return Err(Error::Fit("degenerate abscissae".into()));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let rss = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(FitResult { slope, intercept, rss })
}

/// Fits `ln t_disc` against `ln N`. Labels must be distinct.
pub fn fit_loglog(records: &[ScalingRecord]) -> Result<FitResult> {
    let mut labels: Vec<u64> = records.iter().map(|r| r.n).collect();
    labels.sort_unstable();
    if labels.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Fit("repeated N in records".into()));
    }
    let points: Vec<(f64, f64)> = records.iter().map(|r| ((r.n as f64).ln(), r.t_disc.ln())).collect();
    fit_power_law(&points)
}

/// Computes one record per target, in ascending `N`, and the log-log fit
/// when at least three targets are given.
pub fn run_scaling(config: &ScalingConfig) -> Result<ScalingReport> {
    config.units.validate()?;
    let mut targets = config.targets.clone();
    targets.sort_unstable();
    if targets.is_empty() {
        return Err(Error::Config("no targets given".into()));
    }
    if targets.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Config("targets must be distinct".into()));
    }
    let largest = *targets.last().expect("non-empty");
    let n_max = config.n_max.unwrap_or(2 * largest);
    if let Some(&bad) = targets.iter().find(|&&n| n < 2 || n + 1 > n_max) {
        return Err(Error::Config(format!("target {} needs 2 <= N and N + 1 <= n_max = {}", bad, n_max)));
    }
    let basis = build_basis(n_max, config.units)?;
    let coupling = build_coupling(&basis, config.coupling_model, config.lambda)?;
    let hbar = config.units.hbar;

    let records = targets
        .par_iter()
        .map(|&n| {
            let t_disc = discrimination_time(n, &basis, &coupling, config.kappa, config.mode)?;
            let energy = level_energy(n, config.units)?;
            let product = t_disc * energy;
            Ok(ScalingRecord {
                n,
                bit_size: (n as f64).log2(),
                t_disc,
                energy,
                product,
                ratio: product / (hbar * n as f64 * (n as f64).ln()),
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let fit = if records.len() >= 3 { Some(fit_loglog(&records)?) } else { None };
    Ok(ScalingReport { records, fit })
}

/// Columns: `N,bit_size,t_disc,energy,product,ratio`; floats carry 17
/// significant digits.
pub fn write_scaling_csv<W: Write>(mut out: W, report: &ScalingReport, config: &ScalingConfig) -> Result<()> {
    write_csv_manifest(&mut out, "scaling", config)?;
    if let Some(fit) = &report.fit {
        writeln!(out, "# fit: slope={} intercept={} rss={}", fmt_f64(fit.slope), fmt_f64(fit.intercept), fmt_f64(fit.rss))?;
    }
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["N", "bit_size", "t_disc", "energy", "product", "ratio"])?;
    for r in &report.records {
        wtr.write_record([
            r.n.to_string(),
            fmt_f64(r.bit_size),
            fmt_f64(r.t_disc),
            fmt_f64(r.energy),
            fmt_f64(r.product),
            fmt_f64(r.ratio),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads records written by [`write_scaling_csv`], skipping the manifest.
pub fn read_scaling_csv<R: Read>(input: R) -> Result<Vec<ScalingRecord>> {
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(input);
    rdr.deserialize().map(|r| r.map_err(Error::from)).collect()
}

pub fn scaling_json<W: Write>(out: W, report: &ScalingReport, config: &ScalingConfig) -> Result<()> {
    Report::new("scaling", config, report).write_json(out)
}

/// Gnuplot script plotting `t_disc` and the ratio column of `csv_path`.
pub fn write_gnuplot_script<W: Write>(mut out: W, csv_path: &Path) -> Result<()> {
    let data = csv_path.display();
    writeln!(out, "set datafile separator ','")?;
    writeln!(out, "set datafile commentschars '#'")?;
    writeln!(out, "set key autotitle columnhead")?;
    writeln!(out, "set logscale xy")?;
    writeln!(out, "set xlabel 'N'")?;
    writeln!(out, "set multiplot layout 1,2")?;
    writeln!(out, "set ylabel 't_disc'")?;
    writeln!(out, "plot '{}' using 1:3 with linespoints title 't_disc'", data)?;
    writeln!(out, "unset logscale y")?;
    writeln!(out, "set ylabel 't E / (hbar N ln N)'")?;
    writeln!(out, "plot '{}' using 1:6 with linespoints title 'ratio'", data)?;
    writeln!(out, "unset multiplot")?;
    Ok(())
}
