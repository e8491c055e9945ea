//! Runs the shipped verification manifest and prints the report table.
//!
//! cargo run --release --example verify_theorems -- [manifest.json]

use std::path::PathBuf;

use spacelike_graphs::verifier::run_suite_file;
use spacelike_graphs::Result;

fn main() -> Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| {
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("manifests/default.json")
        });
    let report = run_suite_file(&path, None)?;
    print!("{}", report.table());
    for case in report.cases.iter().filter(|c| c.solve.is_some()) {
        let s = case.solve.as_ref().unwrap();
        println!(
            "{}: {} outer steps, residual {:.2e}",
            case.id, s.outer_iterations, s.final_residual
        );
    }
    Ok(())
}
