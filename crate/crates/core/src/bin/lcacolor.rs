//! Coloring LCA driver: answer a single query or sweep every vertex,
//! printing per-query probe counts and a legality verdict.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lca_core::coloring::{
    weak2_det_lca, weak2_rand_lca, weak3_lca, ColorSeed, ProbeModel,
};
use lca_core::graph::{Graph, PortOrder};
use lca_core::parent::{RankAssignment, Scheme};
use lca_core::probe::ProbeSession;
use lca_core::verify::verify_weak_coloring;

#[derive(Parser)]
#[command(name = "lcacolor", about = "Weak-coloring local computation algorithms")]
struct Args {
    /// weak3 | weak2det | weak2rand
    #[arg(long)]
    algo: String,

    /// Parent scheme for weak2rand: arbitrary | random-lowest-neighbor
    #[arg(long, default_value = "arbitrary")]
    scheme: String,

    /// strong | weak (weak2rand only)
    #[arg(long = "probe-model", default_value = "strong")]
    probe_model: String,

    /// true | kwise (temporary color source for weak2rand)
    #[arg(long = "seed-mode", default_value = "true")]
    seed_mode: String,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    #[arg(long)]
    graph: PathBuf,

    /// Single query vertex (1-based).
    #[arg(long)]
    query: Option<u32>,

    /// Query every vertex and emit CSV plus a legality line.
    #[arg(long, default_value_t = false)]
    all: bool,

    /// Optional CSV output path for --all (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn run_one(
    g: &Graph,
    args: &Args,
    cs: &ColorSeed,
    ranks: &RankAssignment,
    v: u32,
) -> Result<(u8, u64, u64), String> {
    let mut session = ProbeSession::new(g);
    let color = match args.algo.as_str() {
        "weak3" => weak3_lca(&mut session, v).map_err(|e| e.to_string())?,
        "weak2det" => weak2_det_lca(&mut session, v).map_err(|e| e.to_string())?,
        "weak2rand" => {
            let scheme = Scheme::parse(&args.scheme).ok_or("bad scheme")?;
            let model = ProbeModel::parse(&args.probe_model).ok_or("bad probe model")?;
            weak2_rand_lca(&mut session, v, cs, scheme, model, Some(ranks))
                .map_err(|e| e.to_string())?
        }
        other => return Err(format!("unknown algorithm '{other}'")),
    };
    let stats = session.stats();
    Ok((color, stats.weak, stats.strong))
}

fn main() -> ExitCode {
    let args = Args::parse();
    let g = match Graph::load(&args.graph, PortOrder::Insertion) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("failed to load graph: {e}");
            return ExitCode::FAILURE;
        }
    };
    let cs = match args.seed_mode.as_str() {
        "true" => ColorSeed::true_random(args.seed),
        "kwise" => ColorSeed::k_wise_default(args.seed, g.n()),
        other => {
            eprintln!("unknown seed mode '{other}'");
            return ExitCode::FAILURE;
        }
    };
    let ranks = RankAssignment::new(args.seed ^ 0x7a7c5);

    if let Some(v) = args.query {
        return match run_one(&g, &args, &cs, &ranks, v) {
            Ok((color, weak, strong)) => {
                println!("vertex={v} color={color} weak={weak} strong={strong}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("{e}");
                ExitCode::FAILURE
            }
        };
    }
    if !args.all {
        eprintln!("either --query V or --all is required");
        return ExitCode::FAILURE;
    }

    let mut csv = String::from("vertex,color,weak,strong\n");
    let mut colors = Vec::with_capacity(g.n() as usize);
    for v in g.vertices() {
        match run_one(&g, &args, &cs, &ranks, v) {
            Ok((color, weak, strong)) => {
                colors.push(color);
                csv.push_str(&format!("{v},{color},{weak},{strong}\n"));
            }
            Err(e) => {
                eprintln!("query {v} failed: {e}");
                return ExitCode::FAILURE;
            }
        }
    }
    let palette = if args.algo == "weak3" { 3 } else { 2 };
    let verdict = match verify_weak_coloring(&g, &colors, palette) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let legality = format!("legal={} violations={}", verdict.passed, verdict.witnesses.len());
    match &args.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &csv) {
                eprintln!("write failed: {e}");
                return ExitCode::FAILURE;
            }
            println!("{legality}");
        }
        None => {
            print!("{csv}");
            println!("{legality}");
        }
    }
    if verdict.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
