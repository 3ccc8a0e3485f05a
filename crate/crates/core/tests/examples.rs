use std::process::Command;

const EXAMPLES: [&str; 8] = [
    "bisection_4gauss",
    "dense_subgraph",
    "modularity",
    "mrf",
    "segmentation",
    "rank_one_qp",
    "capped_simplex",
    "oracle_check",
];

#[test]
fn every_example_runs() {
    let cargo = std::env::var("CARGO").unwrap_or_else(|_| "cargo".into());
    for name in EXAMPLES {
        let out = Command::new(&cargo)
            .args(["run", "--quiet", "--release", "--example", name])
            .current_dir(env!("CARGO_MANIFEST_DIR"))
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{name} failed:\n{}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}
