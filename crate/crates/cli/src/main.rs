//! Experiment harness: cost predictions, the penalty table, seeded
//! benchmarks with verification, recurrence-vs-enumeration reports and
//! plot-ready curves.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use quickxsort::*;

#[derive(Parser)]
#[command(name = "quickxsort", version, about = "QuickXsort experiment harness")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
    Tsv,
}

impl Format {
    fn sep(self) -> &'static str {
        match self {
            Format::Table => "  ",
            Format::Csv => ",",
            Format::Tsv => "\t",
        }
    }
}

#[derive(Args)]
struct CellArgs {
    /// Input sizes (repeat or comma-separate).
    #[arg(long = "n", value_delimiter = ',', required = true)]
    n: Vec<usize>,
    /// Sampling parameters t (pivot = median of 2t+1).
    #[arg(long = "t", value_delimiter = ',', default_value = "0")]
    t: Vec<usize>,
    /// Algorithms to run.
    #[arg(long = "alg", value_delimiter = ',', default_value = "quickmergesort-td")]
    alg: Vec<Algorithm>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Predicted expected comparison counts per (algorithm, n, t).
    Predict(CellArgs),
    /// The sampling penalty q for t in {0,1,2,3,10} and alpha in {1, 1/2}.
    Table1,
    /// Seeded, verified benchmark runs.
    Bench {
        #[command(flatten)]
        cells: CellArgs,
        #[arg(long, default_value_t = 100)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Recurrence values vs exhaustive enumeration of the implementation.
    Oracle {
        #[arg(long, default_value_t = 64)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value = "quickmergesort-td")]
        alg: Algorithm,
    },
    /// Two-column numeric curves for external plotting.
    Curves {
        #[arg(value_enum)]
        what: Curve,
        /// Largest t for the t-indexed curves.
        #[arg(long, default_value_t = 100)]
        t_max: usize,
        /// Buffer ratio: 1 or 1/2.
        #[arg(long, default_value = "1/2")]
        alpha: String,
        /// Grid points for the skewed-pivot curve.
        #[arg(long, default_value_t = 999)]
        steps: usize,
        /// Linear coefficient b of X for the skewed-pivot curve.
        #[arg(long, default_value_t = -1.24)]
        b: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Curve {
    Penalty,
    RecursiveFraction,
    Skewed,
}

/// Six significant digits, fixed-point, deterministic.
fn sig6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    format!("{x:.decimals$}")
}

fn parse_alpha(s: &str) -> Result<Alpha, String> {
    match s {
        "1" => Ok(Alpha::ONE),
        "1/2" => Ok(Alpha::HALF),
        other => Err(format!("unsupported alpha {other:?} (use 1 or 1/2)")),
    }
}

fn emit(out: &Option<PathBuf>, body: String) -> Result<(), String> {
    match out {
        None => {
            print!("{body}");
            Ok(())
        }
        Some(path) => fs::write(path, body).map_err(|e| format!("{}: {e}", path.display())),
    }
}

fn cmd_predict(cells: &CellArgs, format: Format) -> String {
    let sep = format.sep();
    let mut body = format!("algorithm{sep}n{sep}t{sep}predicted{sep}leading{sep}linear_coeff\n");
    for &alg in &cells.alg {
        for &n in &cells.n {
            for &t in &cells.t {
                let params = alg.cost_params(t);
                let nf = n as f64;
                let leading = if n > 1 { nf * nf.log2() } else { 0.0 };
                let row = [
                    alg.name().to_string(),
                    n.to_string(),
                    t.to_string(),
                    sig6(predict_total(n as u64, &params)),
                    sig6(leading),
                    sig6(linear_coefficient(&params)),
                ];
                body.push_str(&row.join(sep));
                body.push('\n');
            }
        }
    }
    body
}

fn cmd_table1(format: Format) -> String {
    let sep = format.sep();
    let mut body = format!("t{sep}alpha=1{sep}alpha=1/2\n");
    for t in [0usize, 1, 2, 3, 10] {
        body.push_str(&format!(
            "{t}{sep}{:.5}{sep}{:.5}\n",
            penalty_q(t, Alpha::ONE),
            penalty_q(t, Alpha::HALF)
        ));
    }
    // q -> 0 as the sample median converges on the true median.
    body.push_str(&format!("inf{sep}0 (limit){sep}0 (limit)\n"));
    body
}

fn cmd_bench(
    cells: &CellArgs,
    trials: u64,
    seed: u64,
    format: Format,
) -> Result<String, String> {
    let sep = format.sep();
    let mut body = format!(
        "algorithm{sep}n{sep}t{sep}trials{sep}mean{sep}stddev{sep}linear_coeff{sep}predicted{sep}delta\n"
    );
    for &alg in &cells.alg {
        for &n in &cells.n {
            for &t in &cells.t {
                let cfg = TrialConfig::new(alg, n, t, trials, seed);
                let summary = run_trials(&cfg).map_err(|e| e.to_string())?;
                let predicted = predict_total(n as u64, &alg.cost_params(t));
                let row = [
                    alg.name().to_string(),
                    n.to_string(),
                    t.to_string(),
                    trials.to_string(),
                    sig6(summary.mean),
                    sig6(summary.stddev),
                    sig6(summary.normalized_linear(n)),
                    sig6(predicted),
                    sig6(summary.mean - predicted),
                ];
                body.push_str(&row.join(sep));
                body.push('\n');
            }
        }
    }
    Ok(body)
}

fn cmd_oracle(n_max: usize, t: usize, alg: Algorithm, format: Format) -> Result<String, String> {
    const EXACT_LIMIT: usize = 512;
    const ENUM_LIMIT: usize = 8;
    let sep = format.sep();
    let k = 2 * t + 1;
    let alpha = alg.alpha();

    // Per-size expected X cost on the segment X receives.
    let (x_exact, cap) = match alg {
        Algorithm::QuickMergesortTD | Algorithm::QuickMergesortAlpha1 => (
            mergesort_avg_table(n_max.min(EXACT_LIMIT), MergeVariant::TopDown),
            n_max,
        ),
        Algorithm::QuickMergesortBU => (
            mergesort_avg_table(n_max.min(EXACT_LIMIT), MergeVariant::BottomUp),
            n_max,
        ),
        Algorithm::QuickHeapsort => {
            // No simple recurrence for Heapsort: enumerated averages only.
            let table: Vec<ExactRational> = (0..=9.min(n_max))
                .map(|m| enumerated_x_avg(m, &ExternalHeapsort, true))
                .collect();
            (table, n_max.min(10))
        }
    };

    let exact_max = cap.min(EXACT_LIMIT).min(x_exact.len().saturating_sub(1) + 1);
    let base = insertion_sort_avg_table(1.max(k - 1));
    let table =
        solve_recurrence(exact_max, &x_exact, &base, t, alpha).map_err(|e| e.to_string())?;

    let mut body = format!("n{sep}recurrence{sep}enumeration{sep}verdict\n");
    let mut all_pass = true;
    let sorter = alg.sorter();
    for n in 1..=exact_max {
        let dp = &table.c[n];
        if n <= ENUM_LIMIT {
            let brute = exhaustive_avg(n, &sorter, t, 1);
            let ok = &brute == dp;
            all_pass &= ok;
            body.push_str(&format!(
                "{n}{sep}{dp}{sep}{brute}{sep}{}\n",
                if ok { "PASS" } else { "FAIL" }
            ));
        } else {
            body.push_str(&format!(
                "{n}{sep}{}{sep}{sep}\n",
                sig6(dp.to_f64().unwrap_or(f64::NAN))
            ));
        }
    }

    let has_f64_extension = matches!(
        alg,
        Algorithm::QuickMergesortTD | Algorithm::QuickMergesortAlpha1
    );
    if cap > exact_max && has_f64_extension {
        let xf = mergesort_td_avg_f64(cap);
        let basef: Vec<f64> = base.iter().map(|v| v.to_f64().unwrap()).collect();
        let cf = solve_recurrence_f64(cap, &xf, &basef, t, alpha);
        for n in exact_max + 1..=cap {
            body.push_str(&format!("{n}{sep}{}{sep}{sep}\n", sig6(cf[n])));
        }
    }

    if all_pass {
        Ok(body)
    } else {
        emit(&None, body).ok();
        Err("recurrence and enumeration disagree".into())
    }
}

fn cmd_curves(
    what: Curve,
    t_max: usize,
    alpha: Alpha,
    steps: usize,
    b: f64,
    format: Format,
) -> Result<String, String> {
    let sep = format.sep();
    let mut body = String::new();
    match what {
        Curve::Penalty => {
            body.push_str(&format!("t{sep}penalty\n"));
            for t in 0..=t_max {
                body.push_str(&format!("{t}{sep}{}\n", sig6(penalty_q(t, alpha))));
            }
        }
        Curve::RecursiveFraction => {
            body.push_str(&format!("t{sep}fraction\n"));
            for t in 0..=t_max {
                let f = recursive_fraction(t, alpha).to_f64().unwrap();
                body.push_str(&format!("{t}{sep}{}\n", sig6(f)));
            }
        }
        Curve::Skewed => {
            body.push_str(&format!("rho{sep}coefficient\n"));
            for i in 1..=steps {
                let rho = i as f64 / (steps + 1) as f64;
                let c = skewed_cost_coefficient(rho, b).map_err(|e| e.to_string())?;
                body.push_str(&format!("{}{sep}{}\n", sig6(rho), sig6(c)));
            }
        }
    }
    Ok(body)
}

fn run(cli: Cli) -> Result<(), String> {
    let body = match &cli.cmd {
        Cmd::Predict(cells) => cmd_predict(cells, cli.format),
        Cmd::Table1 => cmd_table1(cli.format),
        Cmd::Bench {
            cells,
            trials,
            seed,
        } => cmd_bench(cells, *trials, *seed, cli.format)?,
        Cmd::Oracle { n_max, t, alg } => cmd_oracle(*n_max, *t, *alg, cli.format)?,
        Cmd::Curves {
            what,
            t_max,
            alpha,
            steps,
            b,
        } => cmd_curves(*what, *t_max, parse_alpha(alpha)?, *steps, *b, cli.format)?,
    };
    emit(&cli.out, body)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
