//! Damping versus coherent evolution of the probe state, selected by the
//! collapsed input amplitude.

use qsat::dynamics::spectrum;
use qsat::stochastic::{
    adapt_with_tolerance, classify, damping_generator, ClassifierConfig, InputAmplitudes,
    Susceptibility, TwoLevelHamiltonian,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let g = Susceptibility::new(1.0, 0.5)?;
    let h = TwoLevelHamiltonian::new(0.0, 2.0)?;
    let cfg = ClassifierConfig::for_susceptibility(&g);

    let gen = damping_generator(g);
    let s = spectrum(&gen.l_star)?;
    println!("spectrum of {}:", gen.l_star.label());
    for z in &s.eigenvalues {
        println!("  {:+.6} {:+.6}i", z.re, z.im);
    }
    println!("zero modes {}, gap {:?}", s.zero_modes, s.gap);

    for (label, q2) in [("q² = 1/1024", 1.0 / 1024.0), ("q² = 0", 0.0)] {
        let psi = InputAmplitudes::from_q_squared(q2)?;
        let dynamics = adapt_with_tolerance(&psi, &h, g, 0.0);
        let v = classify(&dynamics, &cfg)?;
        println!(
            "{label:>12}: damped = {}, tail mean p1 = {:.3e}, verdict {}",
            v.damped,
            v.tail_mean,
            if v.satisfiable { "SAT" } else { "UNSAT" }
        );
        if let Some(r) = v.fitted_rate {
            println!(
                "{:>12}  fitted p1 rate {r:.6} (expected {})",
                "",
                gen.population_rate()
            );
        }
        for p in v.trajectory.iter().step_by(80) {
            println!(
                "{:>12}  t = {:>6.2}  p1 = {:.6}  |ρ01| = {:.6}",
                "", p.t, p.p1, p.coh_abs
            );
        }
    }
    Ok(())
}
