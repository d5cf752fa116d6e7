//! Full pipeline on one file in both modes with both amplifiers, printing
//! the JSON report of the last run.
//!
//! ```bash
//! cargo run --release --example end_to_end -- corpus/needle_n10.cnf
//! ```

use std::path::PathBuf;

use qsat::pipeline::{run_pipeline, AmplifierKind, Mode, PipelineConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let input = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/needle_n8.cnf"));

    let mut last = None;
    for mode in [Mode::Oracle, Mode::Statevector] {
        for amplifier in [AmplifierKind::Chaos, AmplifierKind::Stochastic] {
            let cfg = PipelineConfig {
                input_path: input.clone(),
                mode,
                amplifier,
                ..Default::default()
            };
            let r = run_pipeline(&cfg)?;
            println!(
                "{mode:<11} {amplifier:<10} q² = {:<12.6e} verdict {:<5} agrees with brute force: {:?} ({:.1} ms)",
                r.q_squared.value,
                if r.satisfiable == Some(true) { "SAT" } else { "UNSAT" },
                r.agreement,
                r.timing_ms
            );
            last = Some(r);
        }
    }
    if let Some(r) = last {
        print!("{}", r.to_json());
    }
    Ok(())
}
