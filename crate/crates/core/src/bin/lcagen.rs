//! Instance generator CLI: emits the edge-list format plus a sidecar
//! `.meta` file with family parameters and designated vertices.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use lca_core::instances::{generate, parse_params, InstanceFamily, InstanceSpec};

#[derive(Parser)]
#[command(name = "lcagen", about = "Generate benchmark and adversarial graph instances")]
struct Args {
    /// ring | path-with-hub | layered-doubling | clique-chain |
    /// path-clique-gadget | bipartite-minus-matching | inductive-family |
    /// poly-bipartite | fused-vc | random-regular | affine-plane
    #[arg(long)]
    family: String,

    /// Family parameters as k=v,k=v (e.g. "n=1024" or "p=3,k=3").
    #[arg(long, default_value = "")]
    params: String,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Output edge-list path; metadata goes to <out>.meta.
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let Some(family) = InstanceFamily::parse(&args.family) else {
        eprintln!("unknown family '{}'", args.family);
        return ExitCode::FAILURE;
    };
    let params = match parse_params(&args.params) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::FAILURE;
        }
    };
    let spec = InstanceSpec { family, params, seed: args.seed };
    let inst = match generate(&spec) {
        Ok(i) => i,
        Err(e) => {
            eprintln!("generation failed: {e}");
            return ExitCode::FAILURE;
        }
    };
    if let Err(e) = inst.graph.save(&args.out) {
        eprintln!("write failed: {e}");
        return ExitCode::FAILURE;
    }
    let meta_path = PathBuf::from(format!("{}.meta", args.out.display()));
    if let Err(e) = std::fs::write(&meta_path, inst.meta_text()) {
        eprintln!("metadata write failed: {e}");
        return ExitCode::FAILURE;
    }
    println!(
        "wrote {} (n={}, m={}) and {}",
        args.out.display(),
        inst.graph.n(),
        inst.graph.edge_count(),
        meta_path.display()
    );
    ExitCode::SUCCESS
}
