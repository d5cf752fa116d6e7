//! Build the oracle circuit for a small formula, show its gates, and check
//! that the measured probability equals r/2ⁿ.

use qsat::circuit::{build_sat_circuit, post_measure, prepare_uniform, run, success_probability};
use qsat::cnf::{count_satisfying, CnfFormula};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // (x1 ∨ ¬x2) ∧ (x2 ∨ x3)
    let f = CnfFormula::from_ints(3, &[&[1, -2], &[2, 3]])?;
    let (circuit, layout) = build_sat_circuit(&f)?;
    println!("{f}");
    println!(
        "{} inputs, work qubits {:?}, result qubit {}, μ = {}",
        layout.n_input, layout.work_qubits, layout.result_qubit, layout.mu
    );
    for g in circuit.gates() {
        println!("  {g:?}");
    }

    let out = run(&circuit, prepare_uniform(layout.n_input, layout.mu)?)?;
    let p = success_probability(&out, &layout);
    let c = count_satisfying(&f)?;
    println!("measured ‖Pψ‖² = {p:.12}");
    println!(
        "r/2ⁿ          = {} = {:.12}",
        c.q_squared,
        c.q_squared_f64()
    );

    if let Some(post) = post_measure(&out, &layout) {
        println!("satisfying inputs in the post-measurement state:");
        for (i, a) in post.amplitudes().iter().enumerate() {
            if a.norm_sqr() > 1e-12 {
                let eps = i >> layout.mu;
                println!(
                    "  ε = {eps:0w$b}  |amp|² = {:.4}",
                    a.norm_sqr(),
                    w = layout.n_input as usize
                );
            }
        }
    }
    Ok(())
}
