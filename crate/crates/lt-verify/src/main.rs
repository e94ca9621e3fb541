use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lt_verify::config::{resolve, FileConfig, Overrides, Suite};
use lt_verify::report::write_ndjson;

/// Verify Lubin-Tate arithmetic, Coleman series and explicit reciprocity at working precision.
#[derive(Parser, Debug)]
#[command(name = "verify", version)]
struct Cli {
    /// TOML run matrix; the built-in default matrix when omitted
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    prime: Option<u32>,
    #[arg(long)]
    degree_d: Option<usize>,
    /// certification target M
    #[arg(long)]
    precision: Option<u32>,
    /// series truncation degree D
    #[arg(long)]
    series_degree: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// coherent units sampled per configuration
    #[arg(long)]
    samples: Option<usize>,
    /// suites to run (repeat or comma-separate)
    #[arg(long, value_enum, value_delimiter = ',')]
    suite: Vec<Suite>,
    /// NDJSON destination; standard output when omitted
    #[arg(long)]
    out: Option<PathBuf>,
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("verify: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file = match &cli.config {
        Some(p) => match FileConfig::load(p) {
            Ok(f) => f,
            Err(e) => return usage(e),
        },
        None => FileConfig::builtin(),
    };
    let ov = Overrides {
        prime: cli.prime,
        degree_d: cli.degree_d,
        precision: cli.precision,
        series_degree: cli.series_degree,
        seed: cli.seed,
        samples: cli.samples,
        suites: (!cli.suite.is_empty()).then(|| cli.suite.clone()),
    };
    let cfgs = match resolve(&file, &ov) {
        Ok(c) => c,
        Err(e) => return usage(e),
    };
    let (records, summary) = lt_verify::run::run(&cfgs);
    let written = match &cli.out {
        Some(p) => File::create(p).and_then(|f| write_ndjson(&mut BufWriter::new(f), &records, &summary)),
        None => write_ndjson(&mut io::stdout().lock(), &records, &summary),
    };
    if let Err(e) = written {
        return usage(format!("cannot write report: {e}"));
    }
    let _ = io::stderr().flush();
    ExitCode::from(summary.exit_code as u8)
}
