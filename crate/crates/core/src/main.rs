use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use superquad::claims::ClaimId;
use superquad::maps::MapDescriptor;
use superquad::report::{demo_paper_example, run_suite, SuiteConfig};
use superquad::sampler::{rng_from, search_counterexample, Relaxation};
use superquad::scalar_funcs::FunctionSpec;
use superquad::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_EXHAUSTED: u8 = 3;

#[derive(Parser)]
#[command(
    name = "superquad",
    version,
    about = "Randomized checks of superquadratic and operator inequalities"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded claim suites and print one JSON report per claim.
    Check {
        /// Claim identifier; repeat to batch several claims.
        #[arg(long, required = true)]
        claim: Vec<ClaimId>,
        /// Function spec, `pow:<p>` or `negpow:<q>`.
        #[arg(long = "fn")]
        function: FunctionSpec,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        /// Positive unital map; omit to cycle through id, trace, pinch:2, conj:<seed>, mix:3:<seed>.
        #[arg(long)]
        map: Option<MapDescriptor>,
        /// Relative tolerance applied to `1 + max |term|`.
        #[arg(long)]
        tol: Option<f64>,
        /// Also append the reports to this file.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Leave out wall-clock timing so reports are byte-for-byte reproducible.
        #[arg(long)]
        no_timing: bool,
    },
    /// Replay a worked example.
    Demo {
        #[arg(value_enum)]
        example: Example,
    },
    /// Look for a counterexample once a hypothesis is dropped.
    Search {
        #[arg(long)]
        claim: ClaimId,
        /// Hypothesis to drop: none, sandwich or sum.
        #[arg(long)]
        relax: Relaxation,
        #[arg(long = "fn")]
        function: FunctionSpec,
        #[arg(long, default_value_t = 100_000)]
        budget: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0)]
        stream: u64,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value = "id")]
        map: MapDescriptor,
    },
    /// List identifiers accepted by the other commands.
    List {
        #[arg(value_enum)]
        what: Listing,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Example {
    PaperExample,
}

#[derive(Clone, Copy, ValueEnum)]
enum Listing {
    Claims,
    Functions,
    Maps,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(command: Command) -> Result<u8, Error> {
    match command {
        Command::Check {
            claim,
            function,
            dim,
            trials,
            seed,
            stream,
            map,
            tol,
            out,
            no_timing,
        } => {
            let mut lines = Vec::new();
            let mut violated = false;
            for c in claim {
                let cfg = SuiteConfig {
                    claim: c,
                    function,
                    dim,
                    trials,
                    seed,
                    stream,
                    map,
                    rel_tol: tol,
                };
                let start = Instant::now();
                let mut report = run_suite(&cfg)?;
                if !no_timing {
                    report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
                }
                violated |= !report.holds();
                let line = report.to_json_line();
                println!("{line}");
                lines.push(line);
            }
            if let Some(path) = out {
                let mut file = OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(&path)
                    .map_err(|e| Error::InvalidInput(format!("cannot open {}: {e}", path.display())))?;
                for line in &lines {
                    writeln!(file, "{line}")
                        .map_err(|e| Error::InvalidInput(format!("cannot write {}: {e}", path.display())))?;
                }
            }
            Ok(if violated { EXIT_VIOLATION } else { 0 })
        }
        Command::Demo {
            example: Example::PaperExample,
        } => {
            let ex = demo_paper_example()?;
            println!("f(t) = t^3, M = {}", ex.big_m);
            for (name, m) in ex.matrices() {
                println!("{name}:");
                for row in m.rows() {
                    let cells: Vec<String> = row.iter().map(|v| format!("{v:>10.4}")).collect();
                    println!("  [{}]", cells.join(", "));
                }
            }
            println!("min eig(RHS - LHS) = {:.4} (positive semidefinite)", ex.margin);
            println!("max deviation from direct oracle = {:e}", ex.max_oracle_error);
            println!("{}", ex.report.to_json_line());
            Ok(0)
        }
        Command::Search {
            claim,
            relax,
            function,
            budget,
            seed,
            stream,
            dim,
            map,
        } => {
            let spec = map.instantiate(dim)?;
            let mut rng = rng_from(seed, stream);
            let outcome = search_counterexample(claim, relax, &function, dim, &spec, budget, &mut rng)?;
            println!("{}", serde_json::to_string(&outcome).expect("outcomes serialize"));
            Ok(if outcome.found() { 0 } else { EXIT_EXHAUSTED })
        }
        Command::List { what } => {
            match what {
                Listing::Claims => {
                    for c in ClaimId::ALL {
                        let kind = if c.is_operator() { "operator" } else { "scalar" };
                        println!("{:<18} {:<8} {}", c.as_str(), kind, c.description());
                    }
                }
                Listing::Functions => {
                    println!("pow:<p>     t^p, p > 0 (superquadratic for p >= 2)");
                    println!("negpow:<q>  -t^q, q > 0 (superquadratic for 1 <= q <= 2)");
                }
                Listing::Maps => {
                    println!("id             identity");
                    println!("trace          normalized trace, X -> tr(X)/n I");
                    println!("pinch:<k>      keep k contiguous diagonal blocks");
                    println!("conj:<seed>    X -> U^T X U with a seeded random orthogonal U");
                    println!("mix:<k>:<seed> convex mixture of k seeded conjugations");
                }
            }
            Ok(0)
        }
    }
}
