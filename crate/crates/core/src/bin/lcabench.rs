//! Experiment harness CLI. `LCA_THREADS` overrides worker parallelism.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lca_core::bench::{emit_csv, run_experiment, ExperimentConfig, ExperimentId};

#[derive(Parser)]
#[command(name = "lcabench", about = "Probe-complexity and approximation experiments")]
struct Args {
    /// weak3-scaling | weak2det-scaling | weak2rand-variants |
    /// mono-path-lengths | directed-path-lengths | clique-chain-blowup |
    /// matching-ratio | sparsify-marginals | vc-family-structure
    #[arg(long)]
    experiment: String,

    /// Comma-separated instance sizes (primes p for vc-family-structure).
    #[arg(long)]
    grid: String,

    #[arg(long, default_value_t = 5)]
    seeds: u32,

    #[arg(long = "master-seed", default_value_t = 0)]
    master_seed: u64,

    /// Per-instance query cap; instances at most this size get full sweeps.
    #[arg(long = "query-cap", default_value_t = 4096)]
    query_cap: u32,

    /// Instance degree where applicable.
    #[arg(long, default_value_t = 8)]
    degree: u32,

    #[arg(long, default_value_t = 0.25)]
    eps: f64,

    /// Sparsification degree cap override.
    #[arg(long)]
    q: Option<u32>,

    /// Clique-size factor for clique-chain instances (size = c * log2 n).
    #[arg(long = "clique-c", default_value_t = 0.5)]
    clique_c: f64,

    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(experiment) = ExperimentId::parse(&args.experiment) else {
        eprintln!(
            "unknown experiment '{}'; known: {}",
            args.experiment,
            ExperimentId::all().iter().map(|e| e.name()).collect::<Vec<_>>().join(", ")
        );
        return ExitCode::FAILURE;
    };
    let grid: Result<Vec<u32>, _> = args.grid.split(',').map(|t| t.trim().parse()).collect();
    let grid = match grid {
        Ok(g) if !g.is_empty() => g,
        _ => {
            eprintln!("--grid expects comma-separated sizes");
            return ExitCode::FAILURE;
        }
    };
    let mut cfg = ExperimentConfig::new(experiment, grid, args.seeds, args.master_seed);
    cfg.query_cap = args.query_cap;
    cfg.degree = args.degree;
    cfg.eps = args.eps;
    cfg.q = args.q;
    cfg.clique_c = args.clique_c;
    let rows = match run_experiment(&cfg) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("experiment failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    let all_ok = rows.iter().all(|r| r.ok);
    if let Err(e) = emit_csv(&rows, &args.out) {
        eprintln!("{e}");
        return ExitCode::FAILURE;
    }
    println!("wrote {} rows to {} (all_ok={all_ok})", rows.len(), args.out.display());
    ExitCode::SUCCESS
}
