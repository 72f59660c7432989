use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use bistab::parser::parse_network;
use bistab::report::{AnalysisReport, SteadyStateReport, WitnessReport};
use bistab::verifier::{enumerate_steady_states, VerifyError};
use bistab::witness::{make_witness, WitnessError, WitnessOptions};
use bistab::BiNetwork;

const EXIT_MULTISTABLE: u8 = 0;
const EXIT_NOT_MULTISTABLE: u8 = 1;
const EXIT_NOT_APPLICABLE: u8 = 2;
const EXIT_INPUT: u8 = 3;
const EXIT_WITNESS: u8 = 4;

#[derive(Parser)]
#[command(name = "bistab", version, about = "Multistability of bi-reaction networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Human,
}

#[derive(Subcommand)]
enum Command {
    /// Decide multistability of a network file.
    Analyze { path: PathBuf },
    /// Construct and certify rate constants and totals with two stable states.
    Witness {
        path: PathBuf,
        /// Seed for the perturbation offsets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Enumerate the steady states for given rate constants and totals.
    Verify {
        path: PathBuf,
        /// Rate constants k1,k2.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        kappa: Vec<f64>,
        /// Total constants c1,...,c_{s-1}.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        c: Vec<f64>,
    },
    /// Analyze every .net file in a directory; one JSON report per line.
    Batch { dir: PathBuf },
}

fn load(path: &Path) -> Result<BiNetwork, Box<AnalysisReport>> {
    let source = Some(path.display().to_string());
    let text = std::fs::read_to_string(path)
        .map_err(|e| Box::new(AnalysisReport::failure(source.clone(), "io", e.to_string())))?;
    parse_network(&text).map_err(|e| Box::new(AnalysisReport::failure(source, "parse", e.to_string())))
}

fn emit(report: &mut AnalysisReport, start: Instant, format: Format) {
    report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
    match format {
        Format::Json => println!("{}", report.to_json()),
        Format::Human => print!("{}", report.to_human()),
    }
}

fn fail(mut report: AnalysisReport, start: Instant, format: Format, code: u8) -> ExitCode {
    if let Some(err) = &report.error {
        eprintln!("bistab: {}", err.message);
    }
    emit(&mut report, start, format);
    ExitCode::from(code)
}

fn analyze(path: &Path, format: Format) -> ExitCode {
    let start = Instant::now();
    let net = match load(path) {
        Ok(n) => n,
        Err(r) => return fail(*r, start, format, EXIT_INPUT),
    };
    let (mut report, verdict) = AnalysisReport::analyze(&net, Some(path.display().to_string()));
    emit(&mut report, start, format);
    let code = if report.applicability.is_some_and(|a| !a.is_ok()) {
        EXIT_NOT_APPLICABLE
    } else if verdict.multistable {
        EXIT_MULTISTABLE
    } else {
        EXIT_NOT_MULTISTABLE
    };
    ExitCode::from(code)
}

fn witness(path: &Path, seed: u64, format: Format) -> ExitCode {
    let start = Instant::now();
    let net = match load(path) {
        Ok(n) => n,
        Err(r) => return fail(*r, start, format, EXIT_INPUT),
    };
    let (mut report, _) = AnalysisReport::analyze(&net, Some(path.display().to_string()));
    let opts = WitnessOptions {
        seed,
        ..Default::default()
    };
    match make_witness(&net, &opts) {
        Ok(w) => {
            report.witness = Some(WitnessReport::new(&w, seed));
            emit(&mut report, start, format);
            ExitCode::from(0)
        }
        Err(e) => {
            let kind = match e {
                WitnessError::NotMultistable(_) => "not_multistable",
                WitnessError::NotApplicable(_) => "not_applicable",
                WitnessError::ConstructionFailed(_) => "construction_failed",
            };
            let message = match &e {
                WitnessError::NotMultistable(_) => format!("not multistable: {e}"),
                _ => e.to_string(),
            };
            report.error = Some(bistab::report::ErrorReport { kind, message });
            fail(report, start, format, EXIT_WITNESS)
        }
    }
}

fn verify(path: &Path, kappa: &[f64], c: &[f64], format: Format) -> ExitCode {
    let start = Instant::now();
    let source = Some(path.display().to_string());
    let net = match load(path) {
        Ok(n) => n,
        Err(r) => return fail(*r, start, format, EXIT_INPUT),
    };
    if kappa.len() != 2 {
        let msg = format!("--kappa needs exactly 2 values, got {}", kappa.len());
        return fail(AnalysisReport::failure(source, "input", msg), start, format, EXIT_INPUT);
    }
    let kappa = [kappa[0], kappa[1]];
    let (mut report, _) = AnalysisReport::analyze(&net, source);
    match enumerate_steady_states(&net, kappa, c) {
        Ok(set) => {
            let ok = set.stable_count() >= 2;
            report.steady_states = Some(SteadyStateReport::new(kappa, c, &set));
            emit(&mut report, start, format);
            ExitCode::from(if ok { 0 } else { 1 })
        }
        Err(e) => {
            let code = match e {
                VerifyError::NotOneDimensional | VerifyError::LambdaNonnegative(_) => EXIT_NOT_APPLICABLE,
                _ => EXIT_INPUT,
            };
            report.error = Some(bistab::report::ErrorReport {
                kind: "verify",
                message: e.to_string(),
            });
            fail(report, start, format, code)
        }
    }
}

fn batch(dir: &Path, format: Format) -> ExitCode {
    let entries = match std::fs::read_dir(dir) {
        Ok(rd) => rd,
        Err(e) => {
            eprintln!("bistab: cannot read {}: {e}", dir.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "net"))
        .collect();
    files.sort();
    let reports: Vec<AnalysisReport> = files
        .par_iter()
        .map(|path| {
            let start = Instant::now();
            let mut report = match load(path) {
                Ok(net) => AnalysisReport::analyze(&net, Some(path.display().to_string())).0,
                Err(r) => *r,
            };
            report.timing.elapsed_ms = start.elapsed().as_secs_f64() * 1e3;
            report
        })
        .collect();
    for r in reports {
        match format {
            Format::Json => println!("{}", r.to_json_line()),
            Format::Human => println!("{}", r.to_human()),
        }
    }
    ExitCode::from(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("BISTAB_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match &cli.command {
        Command::Analyze { path } => analyze(path, cli.format),
        Command::Witness { path, seed } => witness(path, *seed, cli.format),
        Command::Verify { path, kappa, c } => verify(path, kappa, c, cli.format),
        Command::Batch { dir } => batch(dir, cli.format),
    }
}
