//! lifeorder: stochastic orders between discrete lifetime distributions.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use lifeorder::FamilySpec;
use lifeorder_cli::{audit, curves, exit_code, report, shapes, Settings, EXIT_DISAGREEMENT, EXIT_OK, EXIT_USAGE};

#[derive(Parser)]
#[command(name = "lifeorder", version, about = "Likelihood-ratio, hazard-rate, mean-residual-life and usual stochastic orders")]
struct Cli {
    /// Print JSON instead of text
    #[arg(long, global = true)]
    json: bool,

    /// Relative comparison tolerance
    #[arg(long, global = true, default_value_t = lifeorder::DEFAULT_TOL)]
    tol: f64,

    /// Neglected tail mass allowed when truncating
    #[arg(long, global = true, default_value_t = lifeorder::DEFAULT_TAIL_TOL)]
    tail_tol: f64,

    /// Largest truncation horizon
    #[arg(long, global = true, default_value_t = 1_000_000)]
    max_n: usize,

    /// Seed for audit sweeps
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Output directory for CSV files
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form verdicts against the numerical oracle for X and Y
    Compare { x: String, y: String },
    /// Write lr.csv, sratio.csv and mrldiff.csv for X and Y
    Curves { x: String, y: String },
    /// Random sweep of one family
    Audit { family: String, n_pairs: usize },
    /// Shape of a pmf, or of the likelihood ratio of a pair
    Shape { x: String, y: Option<String> },
}

fn parse(text: &str) -> lifeorder::Result<FamilySpec> {
    text.parse()
}

fn emit<T: serde::Serialize>(json: bool, value: &T, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn run(cli: Cli) -> lifeorder::Result<i32> {
    let settings = Settings { tol: cli.tol, tail_tol: cli.tail_tol, max_n: cli.max_n };
    match cli.command {
        Command::Compare { x, y } => {
            let r = report::compare(&parse(&x)?, &parse(&y)?, &settings)?;
            emit(cli.json, &r, || r.render_text());
            Ok(if r.agreement { EXIT_OK } else { EXIT_DISAGREEMENT })
        }
        Command::Curves { x, y } => {
            let files = curves::curves(&parse(&x)?, &parse(&y)?, &settings)?;
            if let Err(e) = curves::write_files(&cli.out, &files) {
                eprintln!("error: cannot write to {}: {e}", cli.out.display());
                return Ok(EXIT_USAGE);
            }
            for name in ["lr.csv", "sratio.csv", "mrldiff.csv"] {
                println!("{}", cli.out.join(name).display());
            }
            Ok(EXIT_OK)
        }
        Command::Audit { family, n_pairs } => {
            if n_pairs == 0 {
                eprintln!("error: n_pairs must be at least 1");
                return Ok(EXIT_USAGE);
            }
            let start = std::time::Instant::now();
            let s = audit::audit(&family, n_pairs, cli.seed, &settings)?;
            emit(cli.json, &s, || s.render_text());
            eprintln!("elapsed {:.2} s", start.elapsed().as_secs_f64());
            Ok(s.exit_code())
        }
        Command::Shape { x, y } => {
            let s = match y {
                Some(y) => shapes::ratio_shape(&parse(&x)?, &parse(&y)?, &settings)?,
                None => shapes::pmf_shape(&parse(&x)?, &settings)?,
            };
            emit(cli.json, &s, || s.render_text());
            Ok(EXIT_OK)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE as u8 } else { EXIT_OK as u8 });
        }
    };
    let code = run(cli).unwrap_or_else(|e| {
        eprintln!("error: {e}");
        exit_code(&e)
    });
    ExitCode::from(code as u8)
}
