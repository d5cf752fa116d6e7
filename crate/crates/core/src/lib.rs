//! Decision lab for SAT: a quantum oracle circuit simulated on a
//! statevector, followed by one of two amplifiers that turn a possibly tiny
//! success probability `q² = r/2ⁿ` into a clear SAT/UNSAT verdict.
//!
//! - [`cnf`]: formulas, DIMACS I/O and brute-force model counting.
//! - [`circuit`]: statevector simulator and the SAT oracle circuit.
//! - [`dynamics`]: two-level density matrices and Lindblad superoperators.
//! - [`chaos`]: logistic-map amplifier.
//! - [`stochastic`]: damping/coherent amplifier driven by the input amplitude.
//! - [`pipeline`]: channel composition, reports and corpus self-check.

pub mod chaos;
pub mod circuit;
pub mod cnf;
pub mod dynamics;
pub mod pipeline;
pub mod stochastic;

pub use chaos::{detect, ChaosVerdict, LogisticParams};
pub use circuit::{build_sat_circuit, Circuit, CircuitLayout, Gate, StateVector};
pub use cnf::{count_satisfying, parse_dimacs, Clause, CnfFormula, Literal};
pub use pipeline::{run_formula, run_pipeline, PipelineConfig, Report};
pub use stochastic::{adapt, classify, AdaptiveDynamics, DynVerdict};
