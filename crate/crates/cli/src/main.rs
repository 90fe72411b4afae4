mod render;
mod request;

use std::io::{self, BufRead, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::json;

use request::{CommandKind, ExponentInput, Failure, MatrixInput, Request, Settings};

/// Freeness and discreteness of two-generator subgroups of PSL(2,R) and of
/// their roots.
#[derive(Parser)]
#[command(name = "fuchsian-roots", version)]
struct Cli {
    /// Mantissa bits for float evaluation (a multiple of 64).
    #[arg(long, global = true, default_value_t = 256)]
    precision: usize,
    /// Float comparisons closer than 2^-K are reported as ambiguous.
    #[arg(long, global = true, value_name = "K", default_value_t = 128)]
    tolerance: u32,
    /// Print the Nielsen move log.
    #[arg(long, global = true)]
    log: bool,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_iterations: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct PairArgs {
    /// Matrix as JSON `[["a","b"],["c","d"]]` or `@file`.
    #[arg(long = "A", value_name = "MATRIX")]
    a: String,
    #[arg(long = "B", value_name = "MATRIX")]
    b: String,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether A, B generate a free Fuchsian group of rank 2.
    Classify(PairArgs),
    /// Run trace minimization on A, B.
    TraceMin(PairArgs),
    /// Decide whether roots R^m = A, S^n = B generate a free Fuchsian group
    /// of rank 2.
    RootCheck {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        /// The root of A; with --S, minimized directly when tau > 2.
        #[arg(long = "R", value_name = "MATRIX", requires = "s")]
        r: Option<String>,
        #[arg(long = "S", value_name = "MATRIX", requires = "r")]
        s: Option<String>,
    },
    /// Decide for rational powers R^p = A^q, S^p' = B^q'.
    RationalPower {
        #[command(flatten)]
        pair: PairArgs,
        /// p/q
        #[arg(long)]
        m: String,
        /// p'/q'
        #[arg(long)]
        n: String,
    },
    /// Roots of parabolic generators; A and B, when given, are verified.
    ParabolicCheck {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        n: u32,
        #[arg(long = "A", value_name = "MATRIX", requires = "b")]
        a: Option<String>,
        #[arg(long = "B", value_name = "MATRIX", requires = "a")]
        b: Option<String>,
    },
    /// Read JSON requests, one per line, from stdin; write one JSON result
    /// per line in input order.
    Batch,
}

fn text_matrix(s: String) -> Option<MatrixInput> {
    Some(MatrixInput::Text(s))
}

fn request(command: Command) -> Option<Request> {
    let mut req = Request {
        command: CommandKind::Classify,
        a: None,
        b: None,
        r: None,
        s: None,
        m: None,
        n: None,
        log: None,
        precision: None,
        tolerance: None,
        max_iterations: None,
    };
    let set_pair = |req: &mut Request, p: PairArgs| {
        req.a = text_matrix(p.a);
        req.b = text_matrix(p.b);
    };
    match command {
        Command::Classify(p) => set_pair(&mut req, p),
        Command::TraceMin(p) => {
            req.command = CommandKind::TraceMin;
            set_pair(&mut req, p);
        }
        Command::RootCheck { pair, m, n, r, s } => {
            req.command = CommandKind::RootCheck;
            set_pair(&mut req, pair);
            req.m = Some(ExponentInput::Int(m.into()));
            req.n = Some(ExponentInput::Int(n.into()));
            req.r = r.and_then(text_matrix);
            req.s = s.and_then(text_matrix);
        }
        Command::RationalPower { pair, m, n } => {
            req.command = CommandKind::RationalPower;
            set_pair(&mut req, pair);
            req.m = Some(ExponentInput::Text(m));
            req.n = Some(ExponentInput::Text(n));
        }
        Command::ParabolicCheck { m, n, a, b } => {
            req.command = CommandKind::ParabolicCheck;
            req.a = a.and_then(text_matrix);
            req.b = b.and_then(text_matrix);
            req.m = Some(ExponentInput::Int(m.into()));
            req.n = Some(ExponentInput::Int(n.into()));
        }
        Command::Batch => return None,
    }
    Some(req)
}

fn batch_line(index: usize, line: &str, settings: &Settings) -> String {
    let (code, result) = match serde_json::from_str::<Request>(line) {
        Err(e) => {
            let f = Failure::Input(format!("request: {e}"));
            (f.code(), f.to_json())
        }
        Ok(req) => match req.run(settings) {
            Ok(report) => (report.code(), report.to_json()),
            Err(f) => (f.code(), f.to_json()),
        },
    };
    json!({"line": index + 1, "exit": code, "result": result}).to_string()
}

fn batch(settings: &Settings) -> ExitCode {
    let lines: Vec<(usize, String)> = match io::stdin().lock().lines().collect::<Result<Vec<_>, _>>() {
        Ok(lines) => lines.into_iter().enumerate().filter(|(_, l)| !l.trim().is_empty()).collect(),
        Err(e) => {
            eprintln!("error: reading stdin: {e}");
            return ExitCode::from(1);
        }
    };
    let outputs: Vec<String> = lines.par_iter().map(|(i, l)| batch_line(*i, l, settings)).collect();
    let mut stdout = io::stdout().lock();
    for out in outputs {
        if writeln!(stdout, "{out}").is_err() {
            return ExitCode::from(1);
        }
    }
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let settings = Settings {
        precision: cli.precision,
        tolerance: cli.tolerance,
        max_iterations: cli.max_iterations,
        log: cli.log,
    };
    let Some(req) = request(cli.command) else {
        return batch(&settings);
    };
    match (req.run(&settings), cli.format) {
        (Ok(report), Format::Json) => {
            println!("{}", report.to_json());
            ExitCode::from(report.code())
        }
        (Ok(report), Format::Text) => {
            print!("{}", render::text(&report));
            ExitCode::from(report.code())
        }
        (Err(f), format) => {
            if let Format::Json = format {
                println!("{}", f.to_json());
            } else if let Failure::Ambiguous(_) = f {
                println!("verdict: AMBIGUOUS\nreason: boundary_tolerance");
            }
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
