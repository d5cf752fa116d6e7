//! Parse a DIMACS formula and count its models by enumeration.
//!
//! ```bash
//! cargo run --example count_models -- corpus/php_3_2.cnf
//! ```

use qsat::cnf::{count_satisfying, filter_minimal, parse_dimacs};

const DEFAULT: &str = "\
c (x1 or x2) and (not x1 or x3) and (x1 or not x1)
p cnf 3 3
1 2 0
-1 3 0
1 -1 0
";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let text = match std::env::args().nth(1) {
        Some(path) => std::fs::read_to_string(path)?,
        None => DEFAULT.to_string(),
    };
    let f = parse_dimacs(&text)?;
    println!("formula  {f}");
    println!("n = {}, m = {}", f.num_vars(), f.num_clauses());

    let reduced = filter_minimal(&f);
    if reduced.num_clauses() != f.num_clauses() {
        println!("without tautologies: {reduced}");
    }

    let c = count_satisfying(&f)?;
    println!("r = {} of {}", c.r, c.total);
    println!("q² = {} ≈ {:.6}", c.q_squared, c.q_squared_f64());
    println!("{}", if c.is_sat() { "SAT" } else { "UNSAT" });
    Ok(())
}
