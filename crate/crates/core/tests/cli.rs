//! End-to-end checks of the four binaries through their public interfaces.

use std::path::PathBuf;
use std::process::Command;

fn run(bin: &str, args: &[&str]) -> (bool, String) {
    let exe = match bin {
        "lcagen" => env!("CARGO_BIN_EXE_lcagen"),
        "lcacolor" => env!("CARGO_BIN_EXE_lcacolor"),
        "lcamatch" => env!("CARGO_BIN_EXE_lcamatch"),
        "lcabench" => env!("CARGO_BIN_EXE_lcabench"),
        _ => unreachable!(),
    };
    let out = Command::new(exe).args(args).output().expect("binary runs");
    let text = format!(
        "{}{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    (out.status.success(), text)
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("lca-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn generate_color_match_pipeline() {
    let edges = tmp("ring.edges");
    let edges_s = edges.to_str().unwrap();
    let (ok, out) = run("lcagen", &["--family", "ring", "--params", "n=32", "--seed", "3", "--out", edges_s]);
    assert!(ok, "{out}");
    let meta = std::fs::read_to_string(format!("{edges_s}.meta")).unwrap();
    assert!(meta.contains("family=ring"));
    assert!(meta.contains("n=32"));

    let (ok, out) = run("lcacolor", &["--algo", "weak3", "--graph", edges_s, "--all"]);
    assert!(ok, "{out}");
    assert!(out.contains("legal=true"), "{out}");
    assert!(out.lines().next().unwrap().starts_with("vertex,color,weak,strong"));

    let (ok, out) = run("lcacolor", &["--algo", "weak2rand", "--scheme", "arbitrary", "--probe-model", "weak", "--seed-mode", "kwise", "--seed", "9", "--graph", edges_s, "--all"]);
    assert!(ok, "{out}");
    assert!(out.contains("legal=true"), "{out}");

    let (ok, out) = run("lcacolor", &["--algo", "weak3", "--graph", edges_s, "--query", "5"]);
    assert!(ok, "{out}");
    assert!(out.starts_with("vertex=5 color="), "{out}");

    let (ok, out) = run("lcamatch", &["--algo", "rg", "--seed", "4", "--graph", edges_s, "--all"]);
    assert!(ok, "{out}");
    assert!(out.contains("valid=true maximal=true"), "{out}");
    assert!(out.contains("ratio="), "{out}");

    let (ok, out) = run("lcamatch", &["--algo", "phase", "--eps", "0.5", "--seed", "4", "--graph", edges_s, "--query", "1 2"]);
    assert!(ok, "{out}");
    assert!(out.contains("verdict="), "{out}");
}

#[test]
fn bench_csv_deterministic() {
    let out1 = tmp("bench1.csv");
    let out2 = tmp("bench2.csv");
    for out in [&out1, &out2] {
        let (ok, text) = run(
            "lcabench",
            &[
                "--experiment",
                "weak3-scaling",
                "--grid",
                "64,128",
                "--seeds",
                "2",
                "--master-seed",
                "5",
                "--out",
                out.to_str().unwrap(),
            ],
        );
        assert!(ok, "{text}");
        assert!(text.contains("all_ok=true"), "{text}");
    }
    let a = std::fs::read(&out1).unwrap();
    let b = std::fs::read(&out2).unwrap();
    assert_eq!(a, b, "identical configs must produce byte-identical CSV");
    let text = String::from_utf8(a).unwrap();
    assert!(text.starts_with("experiment,n,family,variant,seed,queries,weak_max"));
}

#[test]
fn loader_rejects_malformed_input() {
    let bad = tmp("bad.edges");
    std::fs::write(&bad, "3 2\n1 2\n1 oops\n").unwrap();
    let (ok, out) = run("lcacolor", &["--algo", "weak3", "--graph", bad.to_str().unwrap(), "--all"]);
    assert!(!ok);
    assert!(out.contains("line 3"), "error carries the line number: {out}");
}
