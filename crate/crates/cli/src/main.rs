//! `maxrs`: generate instances, run the solvers on them, time updates.

mod bench;
mod generate;
mod run;
mod schema;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bench::BenchArgs;
use crate::generate::GenSpec;
use crate::run::{Algo, RunConfig};
use crate::schema::Instance;

#[derive(Parser, Debug)]
#[command(name = "maxrs", version, about = "Maximum range sum experiments")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a seeded instance file.
    Generate {
        #[command(flatten)]
        spec: GenSpec,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one algorithm on an instance file.
    Run(RunArgs),
    /// Time dynamic insertions and deletions at several sizes.
    Bench {
        #[command(flatten)]
        args: BenchArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(clap::Args, Debug)]
struct RunArgs {
    #[arg(long)]
    algo: Algo,
    /// Instance file.
    #[arg(long = "in")]
    input: PathBuf,
    /// Expected dimension; an instance of another dimension is rejected.
    #[arg(long)]
    d: Option<usize>,
    /// Accuracy; defaults to 0.2 for the (1/2 - eps) solvers and 0.3 for colored-approx.
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = run::C_SAMPLE)]
    c_sample: f64,
    #[arg(long, default_value_t = maxrs_core::colored_approx::DEFAULT_C1)]
    c1: f64,
    /// Group count for minplus-batched (default: sequence length).
    #[arg(long)]
    m: Option<usize>,
    /// Seed of trial 0; trial t uses seed + t.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    trials: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Compare every answer against a brute-force oracle.
    #[arg(long)]
    check: bool,
    /// Worker threads for trials.
    #[arg(long, env = "MAXRS_THREADS")]
    threads: Option<usize>,
}

fn render<T: Serialize>(rows: &[T], format: Format) -> Result<String, String> {
    match format {
        Format::Json => serde_json::to_string_pretty(rows)
            .map(|s| s + "\n")
            .map_err(|e| e.to_string()),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
    }
}

fn emit(text: &str, out: Option<&PathBuf>) -> Result<(), String> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| e.to_string()),
    }
}

fn main_inner(cli: Cli) -> Result<bool, String> {
    match cli.cmd {
        Cmd::Generate { spec, out } => {
            let inst = generate::generate(&spec)?;
            match out {
                Some(p) => inst.save(&p)?,
                None => emit(&inst.to_text(), None)?,
            }
            Ok(true)
        }
        Cmd::Run(a) => {
            let inst = Instance::load(&a.input)?;
            if let Some(d) = a.d.filter(|d| *d != inst.d) {
                return Err(format!("instance has d = {}, expected {d}", inst.d));
            }
            let threads = a
                .threads
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
            let cfg = RunConfig {
                algo: a.algo,
                eps: a.eps,
                c_sample: a.c_sample,
                c1: a.c1,
                m: a.m,
                seed: a.seed,
                trials: a.trials,
                check: a.check,
                threads,
            };
            let rows = run::run(&inst, &cfg)?;
            emit(&render(&rows, a.format)?, a.out.as_ref())?;
            Ok(rows.iter().all(|r| r.oracle_pass != Some(false)))
        }
        Cmd::Bench { args, out, format } => {
            let rows = bench::bench(&args)?;
            emit(&render(&rows, format)?, out.as_ref())?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("maxrs: oracle check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("maxrs: {e}");
            ExitCode::from(2)
        }
    }
}
