//! Logistic-map amplification of needle probabilities 2⁻ⁿ.
//!
//! ```bash
//! cargo run --example chaos_amplifier -- 3.9
//! ```

use qsat::chaos::{detect, iterate, LogisticParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a: f64 = match std::env::args().nth(1) {
        Some(s) => s.parse()?,
        None => qsat::chaos::DEFAULT_A,
    };
    let p = LogisticParams::new(a)?;
    println!("a = {a}");
    println!(
        "{:>3} {:>12} {:>6} {:>6} {:>8}",
        "n", "x0", "m_hit", "2n", "bound"
    );
    for n in 2..=20 {
        let v = detect(2f64.powi(-n), n as u32, &p)?;
        let hit = v.m_hit.map_or("-".into(), |m| m.to_string());
        let bound = v.lower_bound.map_or("-".into(), |b| format!("{b:.3}"));
        println!(
            "{n:>3} {:>12.4e} {hit:>6} {:>6} {bound:>8}",
            2f64.powi(-n),
            v.window
        );
    }

    let zero = iterate(0.0, &p, 40)?;
    println!(
        "x0 = 0 stays at 0 for 40 steps: {}",
        zero.xs.iter().all(|&x| x == 0.0)
    );
    Ok(())
}
