//! Command-line front end: runs named verification suites and emits
//! machine-readable reports, or parses a measure-description file and
//! prints its moments.
//!
//! Exit codes: 0 all cases passed, 1 at least one case failed, 2
//! configuration error.

mod suites;

use clap::Parser;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "szegolab", version, about = "Szegő minimum problem laboratory")]
struct Cli {
    /// Suite to run: invariance, dyadic-sandwich, discrete-bounds, halasz,
    /// denisov, riesz, capacity, superexp, anti-nevai, pron
    #[arg(long)]
    suite: Option<String>,

    /// key = value file that may set any flag; explicit flags win
    #[arg(long)]
    config: Option<PathBuf>,

    /// working precision in mantissa bits
    #[arg(long)]
    precision_bits: Option<u32>,

    /// verification grid size (rounded up to a power of two where relevant)
    #[arg(long)]
    grid: Option<usize>,

    /// seed for randomized cases (recorded in the report)
    #[arg(long)]
    seed: Option<u64>,

    /// output path; stdout when absent
    #[arg(long)]
    out: Option<PathBuf>,

    /// report format
    #[arg(long, value_parser = ["json", "csv"])]
    format: Option<String>,

    /// print the moments of a measure-description JSON file and exit
    #[arg(long)]
    measure: Option<PathBuf>,

    /// moment order for --measure
    #[arg(long, default_value_t = 8)]
    order: usize,
}

#[derive(Debug, Clone)]
pub struct Config {
    pub suite: String,
    pub precision_bits: u32,
    pub grid: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: String,
}

const SUITES: &[&str] = &[
    "invariance",
    "dyadic-sandwich",
    "discrete-bounds",
    "halasz",
    "denisov",
    "riesz",
    "capacity",
    "superexp",
    "anti-nevai",
    "pron",
];

fn parse_config_file(path: &PathBuf) -> Result<Vec<(String, String)>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("config {path:?}: {e}"))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(format!(
                "config {path:?} line {}: expected key = value",
                lineno + 1
            ));
        };
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

fn build_config(cli: &Cli) -> Result<Config, String> {
    let mut suite = cli.suite.clone();
    let mut precision_bits = cli.precision_bits;
    let mut grid = cli.grid;
    let mut seed = cli.seed;
    let mut out = cli.out.clone();
    let mut format = cli.format.clone();
    if let Some(path) = &cli.config {
        for (k, v) in parse_config_file(path)? {
            match k.as_str() {
                "suite" => {
                    suite.get_or_insert(v);
                }
                "precision-bits" | "precision_bits" => {
                    precision_bits.get_or_insert(
                        v.parse().map_err(|_| format!("bad precision-bits {v:?}"))?,
                    );
                }
                "grid" => {
                    grid.get_or_insert(v.parse().map_err(|_| format!("bad grid {v:?}"))?);
                }
                "seed" => {
                    seed.get_or_insert(v.parse().map_err(|_| format!("bad seed {v:?}"))?);
                }
                "out" => {
                    out.get_or_insert(PathBuf::from(v));
                }
                "format" => {
                    format.get_or_insert(v);
                }
                other => return Err(format!("unknown config key {other:?}")),
            }
        }
    }
    let suite = suite.ok_or_else(|| "no suite selected (use --suite)".to_string())?;
    if !SUITES.contains(&suite.as_str()) {
        return Err(format!("unknown suite {suite:?}; valid: {}", SUITES.join(", ")));
    }
    let format = format.unwrap_or_else(|| "json".into());
    if format != "json" && format != "csv" {
        return Err(format!("unknown format {format:?}"));
    }
    Ok(Config {
        suite,
        precision_bits: precision_bits.unwrap_or(256),
        grid: grid.unwrap_or(1 << 14),
        seed: seed.unwrap_or(0),
        out,
        format,
    })
}

fn run_measure_mode(path: &PathBuf, order: usize, bits: u32) -> Result<(), String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{path:?}: {e}"))?;
    let measure = szegolab::measure::parse_measure_json(&text).map_err(|e| e.to_string())?;
    let ctx = szegolab::PrecisionContext::new(bits);
    let moments = measure
        .moments(order, 1e-30, ctx)
        .map_err(|e| e.to_string())?;
    let rows: Vec<serde_json::Value> = (0..=order)
        .map(|m| {
            serde_json::json!([
                szegolab::report::decimal_string(&moments.value(m).re),
                szegolab::report::decimal_string(&moments.value(m).im)
            ])
        })
        .collect();
    let doc = serde_json::json!({
        "order": order,
        "precision_bits": bits,
        "convention": "c_m = integral of e^{-im theta} d rho",
        "moments": rows,
    });
    println!("{}", serde_json::to_string_pretty(&doc).unwrap());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(path) = &cli.measure {
        return match run_measure_mode(path, cli.order, cli.precision_bits.unwrap_or(256)) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
        };
    }
    let config = match build_config(&cli) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match suites::run_suite(&config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let rendered = match config.format.as_str() {
        "csv" => report.to_csv(),
        _ => report.to_json().unwrap(),
    };
    match &config.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, rendered) {
                eprintln!("error: write {path:?}: {e}");
                return ExitCode::from(2);
            }
        }
        None => println!("{rendered}"),
    }
    eprintln!(
        "suite {}: {} passed, {} failed",
        report.suite, report.passed, report.failed
    );
    if report.all_passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
