//! Benchmark harness for three-center nuclear attraction integrals.
//!
//! Case files ([`config`]) describe orbital pairs, nuclear positions and
//! published values; [`runner`] evaluates them and grades the agreement;
//! [`report`] renders text tables (mantissas in groups of five digits) and
//! CSV. Four benchmark tables are compiled in ([`reference`]).

pub mod aux_rows;
pub mod config;
mod error;
pub mod reference;
pub mod report;
pub mod runner;
pub mod timing;

use std::fs;
use std::path::Path;

pub use config::{load_config, parse_config, BenchCase, BenchConfig};
pub use error::{BenchError, Result, EXIT_CONFIG, EXIT_MISMATCH, EXIT_NUMERICAL};
pub use report::{ComparisonReport, Status};
pub use runner::{run_cases, run_convergence, RunOptions, TableRun};

/// Which report files [`write_reports`] produces.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    Txt,
    Csv,
    #[default]
    Both,
}

impl std::str::FromStr for OutputFormat {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "txt" => Ok(OutputFormat::Txt),
            "csv" => Ok(OutputFormat::Csv),
            "both" => Ok(OutputFormat::Both),
            _ => Err(BenchError::Invalid(format!("unknown format `{s}` (txt, csv, both)"))),
        }
    }
}

/// Text rendering of a run, including numerical failure diagnostics.
pub fn render_run(run: &TableRun) -> String {
    let mut s = report::render_text(&run.name, &run.reports);
    for (id, why) in &run.failures {
        s.push_str(&format!("FAILED {id}: {why}\n"));
    }
    s
}

/// Writes `<name>.txt` and/or `<name>.csv` into `dir`, returning the paths.
pub fn write_reports(run: &TableRun, dir: &Path, format: OutputFormat) -> Result<Vec<std::path::PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| BenchError::io(dir.display().to_string(), e))?;
    let mut written = Vec::new();
    let stem = if run.name.is_empty() { "report" } else { run.name.as_str() };
    if matches!(format, OutputFormat::Txt | OutputFormat::Both) {
        let path = dir.join(format!("{stem}.txt"));
        fs::write(&path, render_run(run)).map_err(|e| BenchError::io(path.display().to_string(), e))?;
        written.push(path);
    }
    if matches!(format, OutputFormat::Csv | OutputFormat::Both) {
        let path = dir.join(format!("{stem}.csv"));
        let file = fs::File::create(&path).map_err(|e| BenchError::io(path.display().to_string(), e))?;
        report::write_csv(&run.reports, file)?;
        written.push(path);
    }
    Ok(written)
}

/// Loads `config`, evaluates it and writes the reports; returns the process
/// exit code (0 all matched, 1 mismatch, 2 config error, 3 numerical failure).
pub fn run_table(config: &str, only: Option<&str>, opts: &RunOptions, out: Option<&Path>, format: OutputFormat) -> i32 {
    let outcome = load_config(config).and_then(|c| run_cases(&c, only, opts));
    match outcome {
        Ok(run) => {
            print!("{}", render_run(&run));
            if let Some(dir) = out {
                if let Err(e) = write_reports(&run, dir, format) {
                    eprintln!("error: {e}");
                    return e.exit_code();
                }
            }
            run.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
