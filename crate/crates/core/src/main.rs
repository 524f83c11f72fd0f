use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use primecavity::experiments::{
    self, run_checks, run_prepare, run_scaling, run_spectrum, write_gnuplot_script, write_scaling_csv,
    write_spectrum_csv, CheckStatus, Outcome, OutputFormat, PrepareConfig, Report, ScalingConfig,
};
use primecavity::{CouplingModel, DiscriminationMode, Error, Units};

const EXIT_PASS: u8 = 0;
const EXIT_FAILURE: u8 = 1;
const EXIT_MISMATCH: u8 = 2;
const EXIT_INCONCLUSIVE: u8 = 3;
const EXIT_CONFIG: u8 = 4;

#[derive(Parser)]
#[command(name = "primecavity", version, about = "Prime-frequency cavity factoring simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate levels 1..=nmax with factorization, energy and gap.
    Spectrum {
        #[arg(long)]
        nmax: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Drive one target, sample photon counts and read the factorization.
    Prepare {
        #[arg(long)]
        target: u64,
        /// Basis size; defaults to 2*target + 2.
        #[arg(long)]
        nmax: Option<u64>,
        /// Coupling strength; defaults to the value that keeps the run inside
        /// the first-order regime with a usable excitation.
        #[arg(long = "lambda")]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 10.0)]
        kappa: f64,
        #[arg(long = "coupling-model", default_value = "star-uniform")]
        coupling_model: String,
        #[arg(long, default_value = "envelope")]
        mode: String,
        /// Time step; defaults to half the largest step the accuracy gate admits.
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long, default_value_t = 10_000)]
        shots: u64,
        #[arg(long, default_value_t = experiments::prepare::DEFAULT_SEED)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Discrimination time and time-energy product across targets.
    Scaling {
        /// Targets, repeated or comma separated.
        #[arg(long = "target", value_delimiter = ',', default_values_t = vec![8u64, 16, 32, 64, 128])]
        targets: Vec<u64>,
        /// Basis size; defaults to twice the largest target.
        #[arg(long)]
        nmax: Option<u64>,
        #[arg(long = "lambda", default_value_t = 1e-3)]
        lambda: f64,
        #[arg(long, default_value_t = 10.0)]
        kappa: f64,
        #[arg(long = "coupling-model", default_value = "star-uniform")]
        coupling_model: String,
        #[arg(long, default_value = "envelope")]
        mode: String,
        /// Also write a gnuplot script next to the CSV given by --out.
        #[arg(long = "gnuplot-script")]
        gnuplot_script: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Run the built-in invariant checks.
    Check {
        /// Use smaller exhaustive ranges.
        #[arg(long)]
        quick: bool,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 1.0)]
    hbar: f64,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Copy, Clone, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

impl Common {
    fn units(&self) -> Result<Units, Error> { Units::new(self.hbar, self.omega) }

    fn writer(&self) -> Result<Box<dyn Write>, Error> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(File::create(path)?)),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::Domain(_) | Error::EmptyDomain(_) | Error::Overflow(_) => EXIT_CONFIG,
        Error::Inconclusive { .. } => EXIT_INCONCLUSIVE,
        _ => EXIT_FAILURE,
    }
}

fn gnuplot_path(csv: &Path) -> PathBuf { csv.with_extension("gp") }

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Spectrum { nmax, common } => {
            let units = common.units()?;
            let rows = run_spectrum(nmax, units)?;
            let mut out = common.writer()?;
            match common.format.into() {
                OutputFormat::Csv => write_spectrum_csv(&mut out, &rows, units)?,
                OutputFormat::Json => {
                    #[derive(Serialize)]
                    struct Cfg { n_max: u64, units: Units }
                    Report::new("spectrum", Cfg { n_max: nmax, units }, &rows).write_json(&mut out)?
                }
            }
            out.flush()?;
            Ok(EXIT_PASS)
        }
        Command::Prepare { target, nmax, lambda, kappa, coupling_model, mode, dt, shots, seed, common } => {
            let config = PrepareConfig {
                n_max: nmax,
                lambda,
                kappa,
                coupling_model: coupling_model.parse::<CouplingModel>()?,
                mode: mode.parse::<DiscriminationMode>()?,
                units: common.units()?,
                dt,
                shots,
                seed,
                ..PrepareConfig::new(target)
            };
            let report = run_prepare(&config)?;
            let mut out = common.writer()?;
            match common.format.into() {
                OutputFormat::Json => report.write_json(&mut out)?,
                OutputFormat::Csv => report.write_curve_csv(&mut out)?,
            }
            out.flush()?;
            eprintln!(
                "target {}: t_disc = {:.4}, readout {}, expected {}, conditional target probability {}",
                target,
                report.t_disc,
                report.readout.as_deref().unwrap_or("inconclusive"),
                report.expected,
                report.measurement.conditional_target_probability.map_or("n/a".into(), |p| format!("{:.4}", p)),
            );
            Ok(match report.outcome {
                Outcome::Pass => EXIT_PASS,
                Outcome::Mismatch => EXIT_MISMATCH,
                Outcome::Inconclusive => EXIT_INCONCLUSIVE,
            })
        }
        Command::Scaling { targets, nmax, lambda, kappa, coupling_model, mode, gnuplot_script, common } => {
            let config = ScalingConfig {
                targets,
                kappa,
                mode: mode.parse()?,
                coupling_model: coupling_model.parse()?,
                lambda,
                units: common.units()?,
                n_max: nmax,
            };
            let report = run_scaling(&config)?;
            let mut out = common.writer()?;
            match common.format.into() {
                OutputFormat::Csv => write_scaling_csv(&mut out, &report, &config)?,
                OutputFormat::Json => experiments::scaling::scaling_json(&mut out, &report, &config)?,
            }
            out.flush()?;
            if gnuplot_script {
                let csv = common.out.as_ref()
                    .ok_or_else(|| Error::Config("--gnuplot-script needs --out".into()))?;
                write_gnuplot_script(BufWriter::new(File::create(gnuplot_path(csv))?), csv)?;
            }
            Ok(EXIT_PASS)
        }
        Command::Check { quick, common } => {
            let outcomes = run_checks(quick)?;
            let mut out = common.writer()?;
            match common.format.into() {
                OutputFormat::Json => Report::new("check", serde_json::json!({ "quick": quick }), &outcomes)
                    .write_json(&mut out)?,
                OutputFormat::Csv => {
                    for o in &outcomes {
                        let tag = match o.status {
                            CheckStatus::Pass => "PASS",
                            CheckStatus::Fail => "FAIL",
                            CheckStatus::Info => "INFO",
                        };
                        writeln!(out, "[{}] {}: {}", tag, o.name, o.detail)?;
                    }
                }
            }
            out.flush()?;
            let failed = outcomes.iter().any(|o| o.status == CheckStatus::Fail);
            Ok(if failed { EXIT_FAILURE } else { EXIT_PASS })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_PASS };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(exit_code_for(&e))
        }
    }
}
