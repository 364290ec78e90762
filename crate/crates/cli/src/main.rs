//! Command-line front end for the stackalloc solvers.
//!
//! Exit codes: 0 success, 1 solver failure, 2 bad input, 3 an enumeration
//! cap was hit.

use std::fs::File;
use std::io::{self, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;
use stackalloc::bench::{run_experiment, write_csv, ExperimentSpec};
use stackalloc::model::{generate_instance, load_instance, write_instance, GeneratorSpec, UniformDist};
use stackalloc::report::{run_solver, Algorithm, SolverSettings};
use stackalloc::{Error, Follower, Game};

#[derive(Parser)]
#[command(name = "stackalloc", version, about = "Leader strategies for Stackelberg budget allocation games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and print its shape.
    Validate {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Draw a random instance.
    Generate {
        /// Number of media.
        #[arg(long)]
        n: usize,
        /// Number of customers.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        mean_degree: f64,
        /// Leader probabilities, `low,high`.
        #[arg(long, value_parser = parse_dist)]
        p: UniformDist,
        /// Follower probabilities, `low,high`.
        #[arg(long, value_parser = parse_dist)]
        pf: UniformDist,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        kl: usize,
        #[arg(long, default_value_t = 1)]
        kf: usize,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a solver and print a JSON report.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        /// greedy, mwu, heuristic, exact or exact-disjoint.
        #[arg(long)]
        algorithm: Algorithm,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        learning_rate: Option<f64>,
        #[arg(long, default_value_t = 10)]
        ell: usize,
        /// Echoed in the report; every solver is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Follower payoffs within this distance of the best count as ties.
        #[arg(long)]
        tie_tolerance: Option<f64>,
        #[arg(long, default_value_t = stackalloc::exact::DEFAULT_LEADER_CAP)]
        leader_cap: u128,
    },
    /// Run an experiment spec and print CSV.
    Bench {
        #[arg(long)]
        spec: PathBuf,
        /// Also write per-trial values as JSON here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn parse_dist(s: &str) -> Result<UniformDist, String> {
    let (a, b) = s.split_once(',').ok_or("expected `low,high`")?;
    let a: f64 = a.trim().parse().map_err(|e| format!("{a}: {e}"))?;
    let b: f64 = b.trim().parse().map_err(|e| format!("{b}: {e}"))?;
    UniformDist::new(a, b).map_err(|e| e.to_string())
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::EnumerationCap { .. } => 3,
        Error::InvalidInput(_) | Error::NotDisjoint | Error::Model(_) | Error::CustomerOutOfRange { .. } => 2,
        Error::Verification(_) | Error::Lp(_) => 1,
    }
}

fn read_instance(path: &PathBuf) -> Result<Game, Error> {
    let file = File::open(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
    Ok(load_instance(BufReader::new(file))?)
}

fn print_json(value: &serde_json::Value) -> Result<(), Error> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Error::InvalidInput(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Validate { instance } => {
            let g = read_instance(&instance)?;
            print_json(&json!({
                "media": g.n_media(),
                "customers": g.n_customers(),
                "edges": g.edges().len(),
                "leader_budget": g.leader_budget(),
                "follower_budget": g.follower_budget(),
                "disjoint": g.is_disjoint(),
            }))
        }
        Command::Generate { n, m, mean_degree, p, pf, seed, kl, kf, out } => {
            if kl > n || kf > n {
                return Err(Error::InvalidInput(format!("budgets ({kl}, {kf}) exceed the {n} media")));
            }
            let spec = GeneratorSpec {
                media: n,
                customers: m,
                mean_degree,
                p,
                p_follower: pf,
                leader_budget: kl,
                follower_budget: kf,
            };
            let game = generate_instance(&spec, seed)?;
            let io_err = |e: io::Error| Error::InvalidInput(e.to_string());
            match out {
                Some(path) => {
                    let file = File::create(&path).map_err(io_err)?;
                    let mut w = io::BufWriter::new(file);
                    write_instance(&game, &mut w).map_err(io_err)?;
                    w.flush().map_err(io_err)
                }
                None => write_instance(&game, io::stdout().lock()).map_err(io_err),
            }
        }
        Command::Solve { instance, algorithm, iters, epsilon, learning_rate, ell, seed, tie_tolerance, leader_cap } => {
            let game = read_instance(&instance)?;
            let mut follower = Follower::new(&game)?;
            if let Some(tol) = tie_tolerance {
                if !(tol.is_finite() && tol >= 0.0) {
                    return Err(Error::InvalidInput(format!("tie tolerance must be non-negative, got {tol}")));
                }
                follower = follower.with_tie_tolerance(tol);
            }
            let settings = SolverSettings { iterations: iters, epsilon, learning_rate, ell, leader_cap };
            let report = run_solver(&follower, algorithm, &settings)?;
            let mut value = serde_json::to_value(&report).map_err(|e| Error::InvalidInput(e.to_string()))?;
            value["seed"] = json!(seed);
            print_json(&value)
        }
        Command::Bench { spec, json } => {
            let text = std::fs::read_to_string(&spec)
                .map_err(|e| Error::InvalidInput(format!("{}: {e}", spec.display())))?;
            let spec = ExperimentSpec::from_json(&text)?;
            let rows = run_experiment(&spec)?;
            write_csv(&rows, io::stdout().lock())?;
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&rows).map_err(|e| Error::InvalidInput(e.to_string()))?;
                std::fs::write(&path, text).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("STACKALLOC_THREADS").ok().and_then(|t| t.parse::<usize>().ok()) {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
