//! Run the bundled corpus through every mode and amplifier.

use std::path::PathBuf;

use qsat::pipeline::self_check;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus"));
    let summary = self_check(&dir)?;
    for e in &summary.entries {
        let verdicts: String = e
            .runs
            .iter()
            .map(|r| if r.satisfiable { 'S' } else { 'U' })
            .collect();
        println!(
            "{:<24} n={:<2} m={:<2} μ={:<2} r={:<4} {}",
            e.file, e.n, e.m, e.mu, e.r, verdicts
        );
    }
    for (mode, amp, agree, total) in summary.matrix() {
        println!("{mode:<11} {amp:<10} {agree}/{total}");
    }
    for d in &summary.disagreements {
        println!("DISAGREE {d}");
    }
    if !summary.all_agree() {
        std::process::exit(1);
    }
    Ok(())
}
