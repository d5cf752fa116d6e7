//! Discrete Fourier states from Hadamards plus per-qubit phases.

use qsat::circuit::{dft_state, prepare_uniform};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n = 3;
    let uniform = prepare_uniform(n, 0)?;
    println!(
        "ξ(0) equals the uniform state: {}",
        dft_state(0, n)?.max_abs_diff(&uniform) < 1e-15
    );

    for t in 0..1u64 << n {
        let s = dft_state(t, n)?;
        let phases: Vec<String> = s
            .amplitudes()
            .iter()
            .map(|a| format!("{:+.3}π", a.arg() / std::f64::consts::PI))
            .collect();
        println!("ξ({t}): {}", phases.join(" "));
    }

    let a = dft_state(2, n)?;
    let b = dft_state(5, n)?;
    println!("⟨ξ(2)|ξ(5)⟩ = {:.2e}", a.inner(&b).norm());
    Ok(())
}
