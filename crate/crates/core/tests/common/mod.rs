#![allow(dead_code)]

use std::path::PathBuf;

use qsat::circuit::SatCircuitBuilder;
use qsat::cnf::{Clause, CnfFormula, Literal};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random formula with clause widths in `1..=kmax` over distinct variables.
pub fn random_formula<R: Rng>(rng: &mut R, n: u32, m: usize, kmax: usize) -> CnfFormula {
    let clauses = (0..m)
        .map(|_| {
            let k = rng.gen_range(1..=kmax.min(n as usize));
            let vars = rand::seq::index::sample(rng, n as usize, k);
            vars.iter()
                .map(|v| Literal::new(v as u32 + 1, rng.gen_bool(0.5)))
                .collect::<Clause>()
        })
        .collect();
    CnfFormula::new(n, clauses).unwrap()
}

/// Random formula with `n ≤ max_n`, `m ≤ max_m` whose circuit fits in
/// `qubits` qubits.
pub fn random_feasible<R: Rng>(rng: &mut R, max_n: u32, max_m: usize, qubits: u32) -> CnfFormula {
    loop {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(0..=max_m);
        let f = random_formula(rng, n, m, 3);
        if n + SatCircuitBuilder::ancilla_count(&f) <= qubits {
            return f;
        }
    }
}

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}
