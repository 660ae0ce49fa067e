use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::Value;

use qdiff_cli::{build_document, error_json, render_text, run_document, run_text};

#[derive(Parser)]
#[command(
    name = "qdiff",
    version,
    about = "Exact criteria for linear q-difference equations"
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Cmd>,

    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    format: Format,

    /// Batch file with one job per line, run in parallel.
    #[arg(long, value_name = "FILE")]
    jobs: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Cmd {
    /// q-divisor of a rational function.
    Divq(JobArgs),
    /// Coboundary witness c*z^m*b(qz)/b(z).
    SolveB(JobArgs),
    /// Classify the rank-one equation sigma_q(y) = a y.
    RankOne(JobArgs),
    /// Galois classification of a q-hypergeometric operator.
    Classify(JobArgs),
    /// Newton polygon of an operator.
    Newton(JobArgs),
    /// Twisted formal Puiseux solution of an operator.
    SolveSeries(JobArgs),
    /// Truncated q-hypergeometric series.
    Series(JobArgs),
    /// Residual of the operator on the truncated series.
    Verify(JobArgs),
    /// Bounded telescoper search for a matrix.
    Telescoper(JobArgs),
    /// Iterated system A[l].
    Iterate(JobArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Input text; read from --file or standard input when absent.
    input: Option<String>,

    #[arg(long)]
    file: Option<PathBuf>,

    /// Truncation order.
    #[arg(long, env = "QDIFF_ORDER")]
    order: Option<String>,

    #[arg(long)]
    slope_index: Option<usize>,

    /// `continuous` or `discrete`.
    #[arg(long)]
    mode: Option<String>,

    /// Discrete twist exponent; all d up to --d-max when absent.
    #[arg(long)]
    d: Option<u32>,

    #[arg(long)]
    d_max: Option<u32>,

    /// Degree bound of the telescoper ansatz.
    #[arg(long)]
    bound: Option<u32>,

    /// Iteration count for `iterate`.
    #[arg(long)]
    l: Option<u32>,

    /// Comma-separated exponents k_0,...,k_r for the twisted product.
    #[arg(long)]
    twist: Option<String>,
}

impl JobArgs {
    fn options(&self) -> BTreeMap<String, String> {
        let mut o = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                o.insert(k.to_string(), v);
            }
        };
        put("order", self.order.clone());
        put("slope_index", self.slope_index.map(|x| x.to_string()));
        put("mode", self.mode.clone());
        put("d", self.d.map(|x| x.to_string()));
        put("d_max", self.d_max.map(|x| x.to_string()));
        put("bound", self.bound.map(|x| x.to_string()));
        put("l", self.l.map(|x| x.to_string()));
        put("twist", self.twist.clone());
        o
    }

    fn input_text(&self) -> std::io::Result<String> {
        if let Some(t) = &self.input {
            return Ok(t.clone());
        }
        if let Some(p) = &self.file {
            return std::fs::read_to_string(p);
        }
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s)?;
        Ok(s)
    }
}

fn split(cmd: &Cmd) -> (&'static str, &JobArgs) {
    match cmd {
        Cmd::Divq(a) => ("divq", a),
        Cmd::SolveB(a) => ("solve-b", a),
        Cmd::RankOne(a) => ("rank-one", a),
        Cmd::Classify(a) => ("classify", a),
        Cmd::Newton(a) => ("newton", a),
        Cmd::SolveSeries(a) => ("solve-series", a),
        Cmd::Series(a) => ("series", a),
        Cmd::Verify(a) => ("verify", a),
        Cmd::Telescoper(a) => ("telescoper", a),
        Cmd::Iterate(a) => ("iterate", a),
    }
}

fn emit(v: &Value, format: Format) {
    let text = match format {
        Format::Json => serde_json::to_string_pretty(v).expect("serializable") + "\n",
        Format::Text => render_text(v),
    };
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn io_error(msg: String) -> Value {
    serde_json::json!({"command": null, "error": {"kind": "IoError", "message": msg}})
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, ok) = if let Some(path) = &cli.jobs {
        match std::fs::read_to_string(path) {
            Err(e) => (io_error(format!("{}: {e}", path.display())), false),
            Ok(text) => {
                let lines: Vec<&str> = text
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#'))
                    .collect();
                let results: Vec<(Value, bool)> = lines.par_iter().map(|l| run_text(l)).collect();
                let ok = results.iter().all(|(_, ok)| *ok);
                (
                    Value::Array(results.into_iter().map(|(v, _)| v).collect()),
                    ok,
                )
            }
        }
    } else if let Some(cmd) = &cli.command {
        let (name, args) = split(cmd);
        match args.input_text() {
            Err(e) => (io_error(e.to_string()), false),
            Ok(text) => match build_document(name, &text, args.options()) {
                Err(e) => (error_json(name.parse().ok(), &e), false),
                Ok(doc) => run_document(&doc),
            },
        }
    } else {
        eprintln!("no command given; see `qdiff --help`");
        return ExitCode::from(2);
    };
    emit(&value, cli.format);
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
