//! Statevector simulation of the SAT oracle circuit.
//!
//! Basis index convention: for `N` qubits, qubit 0 is the most significant
//! bit of the index, so index `k` is the ket label `|ε₁…εₙ, work…, result⟩`
//! read as a binary number. The result qubit is always the last one.
//!
//! The oracle circuit uses only X, CNOT and Toffoli gates. Each clause is
//! computed into fresh work qubits by De Morgan (flip the inputs whose
//! literal is positive, AND them with a Toffoli chain, flip the inputs back
//! and negate the accumulator). Clause outputs are then AND-chained and the
//! final value copied into the result qubit. That allocates
//! `μ = Σ_j (|C_j| − 1) + (m − 1) + 1` ancillas including the result qubit.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::io::{self, Read, Write};
use std::ops::Range;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{filter_minimal, Clause, CnfFormula};

pub const DEFAULT_MAX_QUBITS: u32 = 26;

/// Environment variable overriding [`DEFAULT_MAX_QUBITS`].
pub const MAX_QUBITS_ENV: &str = "QSAT_MAX_QUBITS";

/// Tolerance under which a projected norm counts as zero in [`post_measure`].
pub const ZERO_PROJECTION: f64 = 1e-14;

const NORM_TOLERANCE: f64 = 1e-10;

/// Amplitude arrays at least this long are processed with rayon.
const PAR_THRESHOLD: usize = 1 << 14;

const DUMP_MAGIC: &[u8; 4] = b"QSV1";
/// Stored in the dump header: qubit 0 is the most significant index bit.
const DUMP_ORDER_MSB_FIRST: u32 = 0;

#[derive(Debug, Error)]
pub enum CircuitError {
    #[error("{gate:?} addresses a qubit outside 0..{num_qubits}")]
    QubitIndex { gate: Gate, num_qubits: u32 },
    #[error("{0:?} uses the same qubit twice")]
    RepeatedQubit(Gate),
    #[error("{required} qubits required (μ = {mu} ancillas) but the simulator cap is {cap}; raise {MAX_QUBITS_ENV} or use oracle mode")]
    QubitCap { required: u32, mu: u32, cap: u32 },
    #[error("circuit acts on {circuit} qubits but the state has {state}")]
    DimensionMismatch { circuit: u32, state: u32 },
    #[error("DFT index t = {t} is outside 0..2^{qubits}")]
    DftIndex { t: u64, qubits: u32 },
    #[error("amplitudes are not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("amplitude array length {0} is not a power of two")]
    BadLength(usize),
    #[error("q² = {0} is outside [0, 1]")]
    ProbabilityRange(f64),
    #[error("invalid state dump: {0}")]
    BadDump(String),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Simulator qubit cap, honouring `QSAT_MAX_QUBITS` when set to an integer.
pub fn max_qubits() -> u32 {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Gate {
    X(u32),
    H(u32),
    Cnot {
        control: u32,
        target: u32,
    },
    Toffoli {
        c1: u32,
        c2: u32,
        target: u32,
    },
    /// `diag(1, e^{i·angle})` on the target.
    Phase {
        target: u32,
        angle: f64,
    },
}

impl Gate {
    fn qubits(&self) -> ([u32; 3], usize) {
        match *self {
            Gate::X(t) | Gate::H(t) | Gate::Phase { target: t, .. } => ([t, 0, 0], 1),
            Gate::Cnot { control, target } => ([control, target, 0], 2),
            Gate::Toffoli { c1, c2, target } => ([c1, c2, target], 3),
        }
    }

    pub fn validate(&self, num_qubits: u32) -> Result<(), CircuitError> {
        let (qs, len) = self.qubits();
        let qs = &qs[..len];
        if qs.iter().any(|&q| q >= num_qubits) {
            return Err(CircuitError::QubitIndex {
                gate: *self,
                num_qubits,
            });
        }
        for i in 0..len {
            if qs[i + 1..].contains(&qs[i]) {
                return Err(CircuitError::RepeatedQubit(*self));
            }
        }
        Ok(())
    }

    pub fn inverse(&self) -> Gate {
        match *self {
            Gate::Phase { target, angle } => Gate::Phase {
                target,
                angle: -angle,
            },
            g => g,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    num_qubits: u32,
    amps: Vec<Complex64>,
}

#[inline]
fn qubit_mask(num_qubits: u32, q: u32) -> usize {
    1usize << (num_qubits - 1 - q)
}

impl StateVector {
    /// `|0…0⟩` on `num_qubits` qubits, subject to the simulator cap.
    pub fn zero(num_qubits: u32) -> Result<Self, CircuitError> {
        Self::basis(num_qubits, 0)
    }

    pub fn basis(num_qubits: u32, index: usize) -> Result<Self, CircuitError> {
        let cap = max_qubits();
        if num_qubits > cap {
            return Err(CircuitError::QubitCap {
                required: num_qubits,
                mu: 0,
                cap,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self, CircuitError> {
        if !amps.len().is_power_of_two() {
            return Err(CircuitError::BadLength(amps.len()));
        }
        let num_qubits = amps.len().trailing_zeros();
        let s = StateVector { num_qubits, amps };
        let norm = s.norm_sqr();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(CircuitError::NotNormalized(norm));
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        if self.amps.len() >= PAR_THRESHOLD {
            self.amps.par_iter().map(|a| a.norm_sqr()).sum()
        } else {
            self.amps.iter().map(|a| a.norm_sqr()).sum()
        }
    }

    /// Probability that qubit `q` reads 1.
    pub fn probability_one(&self, q: u32) -> f64 {
        let mask = qubit_mask(self.num_qubits, q);
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// ⟨self|other⟩.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<(), CircuitError> {
        gate.validate(self.num_qubits)?;
        let nq = self.num_qubits;
        match *gate {
            Gate::X(t) => {
                for_each_pair(&mut self.amps, qubit_mask(nq, t), |_, a, b| {
                    std::mem::swap(a, b)
                });
            }
            Gate::H(t) => {
                for_each_pair(&mut self.amps, qubit_mask(nq, t), |_, a, b| {
                    let (x, y) = (*a, *b);
                    *a = (x + y) * FRAC_1_SQRT_2;
                    *b = (x - y) * FRAC_1_SQRT_2;
                });
            }
            Gate::Cnot { control, target } => {
                let cm = qubit_mask(nq, control);
                for_each_pair(&mut self.amps, qubit_mask(nq, target), |i, a, b| {
                    if i & cm != 0 {
                        std::mem::swap(a, b)
                    }
                });
            }
            Gate::Toffoli { c1, c2, target } => {
                let cm = qubit_mask(nq, c1) | qubit_mask(nq, c2);
                for_each_pair(&mut self.amps, qubit_mask(nq, target), |i, a, b| {
                    if i & cm == cm {
                        std::mem::swap(a, b)
                    }
                });
            }
            Gate::Phase { target, angle } => {
                let w = Complex64::from_polar(1.0, angle);
                for_each_pair(&mut self.amps, qubit_mask(nq, target), |_, _, b| *b *= w);
            }
        }
        Ok(())
    }

    /// Writes the `QSV1` dump: magic, `u32` qubit count, `u32` bit-order flag,
    /// `u32` reserved, then little-endian `(re, im)` doubles.
    pub fn write_dump<W: Write>(&self, mut w: W) -> Result<(), CircuitError> {
        w.write_all(DUMP_MAGIC)?;
        w.write_all(&self.num_qubits.to_le_bytes())?;
        w.write_all(&DUMP_ORDER_MSB_FIRST.to_le_bytes())?;
        w.write_all(&0u32.to_le_bytes())?;
        for a in &self.amps {
            w.write_all(&a.re.to_le_bytes())?;
            w.write_all(&a.im.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_dump<R: Read>(mut r: R) -> Result<Self, CircuitError> {
        let mut header = [0u8; 16];
        r.read_exact(&mut header)?;
        if &header[..4] != DUMP_MAGIC {
            return Err(CircuitError::BadDump("missing QSV1 magic".into()));
        }
        let word = |i: usize| u32::from_le_bytes(header[i..i + 4].try_into().unwrap());
        let num_qubits = word(4);
        if word(8) != DUMP_ORDER_MSB_FIRST {
            return Err(CircuitError::BadDump(format!(
                "unsupported bit-order flag {}",
                word(8)
            )));
        }
        if num_qubits > 30 {
            return Err(CircuitError::BadDump(format!(
                "{num_qubits} qubits is too large to load"
            )));
        }
        let len = 1usize << num_qubits;
        let mut buf = vec![0u8; len * 16];
        r.read_exact(&mut buf)?;
        let amps = buf
            .chunks_exact(16)
            .map(|c| {
                Complex64::new(
                    f64::from_le_bytes(c[..8].try_into().unwrap()),
                    f64::from_le_bytes(c[8..].try_into().unwrap()),
                )
            })
            .collect();
        Ok(StateVector { num_qubits, amps })
    }
}

/// Calls `f(i, &mut amps[i], &mut amps[i | bit])` for every index `i` with
/// `i & bit == 0`.
fn for_each_pair<F>(amps: &mut [Complex64], bit: usize, f: F)
where
    F: Fn(usize, &mut Complex64, &mut Complex64) + Sync,
{
    let block = bit * 2;
    let seq = |base: usize, chunk: &mut [Complex64]| {
        let (lo, hi) = chunk.split_at_mut(bit);
        for (j, (a, b)) in lo.iter_mut().zip(hi).enumerate() {
            f(base + j, a, b);
        }
    };
    if amps.len() < PAR_THRESHOLD {
        for (k, chunk) in amps.chunks_mut(block).enumerate() {
            seq(k * block, chunk);
        }
    } else if block <= PAR_THRESHOLD {
        amps.par_chunks_mut(PAR_THRESHOLD)
            .enumerate()
            .for_each(|(k, outer)| {
                for (j, chunk) in outer.chunks_mut(block).enumerate() {
                    seq(k * PAR_THRESHOLD + j * block, chunk);
                }
            });
    } else {
        amps.par_chunks_mut(block)
            .enumerate()
            .for_each(|(k, chunk)| {
                let (lo, hi) = chunk.split_at_mut(bit);
                lo.par_iter_mut()
                    .zip(hi.par_iter_mut())
                    .enumerate()
                    .for_each(|(j, (a, b))| f(k * block + j, a, b));
            });
    }
}

/// Applies a single gate, consuming and returning the state.
pub fn apply_gate(mut s: StateVector, g: &Gate) -> Result<StateVector, CircuitError> {
    s.apply(g)?;
    Ok(s)
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Circuit {
    num_qubits: u32,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(num_qubits: u32) -> Self {
        Circuit {
            num_qubits,
            gates: Vec::new(),
        }
    }

    pub fn push(&mut self, g: Gate) -> Result<&mut Self, CircuitError> {
        g.validate(self.num_qubits)?;
        self.gates.push(g);
        Ok(self)
    }

    pub fn num_qubits(&self) -> u32 {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn inverse(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::inverse).collect(),
        }
    }
}

pub fn run(c: &Circuit, mut s: StateVector) -> Result<StateVector, CircuitError> {
    if c.num_qubits != s.num_qubits {
        return Err(CircuitError::DimensionMismatch {
            circuit: c.num_qubits,
            state: s.num_qubits,
        });
    }
    for g in &c.gates {
        s.apply(g)?;
    }
    Ok(s)
}

/// Register layout of a built SAT circuit: inputs `0..n`, work qubits after
/// them, and the result qubit last. `mu` counts work plus result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CircuitLayout {
    pub n_input: u32,
    pub work_qubits: Range<u32>,
    pub result_qubit: u32,
    pub mu: u32,
}

impl CircuitLayout {
    pub fn num_qubits(&self) -> u32 {
        self.n_input + self.mu
    }
}

/// Constant in the bound `μ ≤ c·m·n` checked after every build.
pub const ANCILLA_BOUND_FACTOR: u32 = 2;

/// Either a known constant or a qubit whose value (possibly negated) is a
/// sub-formula's truth value.
#[derive(Clone, Copy, Debug)]
enum Wire {
    Const(bool),
    Qubit { q: u32, inverted: bool },
}

struct Emitter {
    gates: Vec<Gate>,
    next_work: u32,
}

impl Emitter {
    fn alloc(&mut self) -> u32 {
        let q = self.next_work;
        self.next_work += 1;
        q
    }

    fn clause(&mut self, c: &Clause) -> Wire {
        let lits: Vec<_> = c.literals().collect();
        match lits.as_slice() {
            [] => Wire::Const(false),
            [l] => Wire::Qubit {
                q: l.var() - 1,
                inverted: l.is_negated(),
            },
            _ => {
                // After flipping positive-literal inputs every input qubit
                // holds the negation of its literal.
                let flips: Vec<u32> = lits
                    .iter()
                    .filter(|l| !l.is_negated())
                    .map(|l| l.var() - 1)
                    .collect();
                self.gates.extend(flips.iter().map(|&q| Gate::X(q)));
                let mut acc = lits[0].var() - 1;
                for l in &lits[1..] {
                    let w = self.alloc();
                    self.gates.push(Gate::Toffoli {
                        c1: acc,
                        c2: l.var() - 1,
                        target: w,
                    });
                    acc = w;
                }
                self.gates.extend(flips.iter().map(|&q| Gate::X(q)));
                self.gates.push(Gate::X(acc));
                Wire::Qubit {
                    q: acc,
                    inverted: false,
                }
            }
        }
    }

    /// XORs the value of `w` into `target` (which holds 0).
    fn copy(&mut self, w: Wire, target: u32) {
        match w {
            Wire::Const(false) => {}
            Wire::Const(true) => self.gates.push(Gate::X(target)),
            Wire::Qubit { q, inverted } => {
                self.gates.push(Gate::Cnot { control: q, target });
                if inverted {
                    self.gates.push(Gate::X(target));
                }
            }
        }
    }

    /// Writes `a ∧ b` into `target` (which holds 0).
    fn and(&mut self, a: Wire, b: Wire, target: u32) {
        match (a, b) {
            (Wire::Const(false), _) | (_, Wire::Const(false)) => {}
            (Wire::Const(true), w) | (w, Wire::Const(true)) => self.copy(w, target),
            (
                Wire::Qubit {
                    q: qa,
                    inverted: ia,
                },
                Wire::Qubit {
                    q: qb,
                    inverted: ib,
                },
            ) => {
                if qa == qb {
                    // x ∧ x = x, x ∧ ¬x = 0
                    if ia == ib {
                        self.copy(a, target);
                    }
                    return;
                }
                let flips: Vec<u32> = [(qa, ia), (qb, ib)]
                    .iter()
                    .filter(|(_, inv)| *inv)
                    .map(|(q, _)| *q)
                    .collect();
                self.gates.extend(flips.iter().map(|&q| Gate::X(q)));
                self.gates.push(Gate::Toffoli {
                    c1: qa,
                    c2: qb,
                    target,
                });
                self.gates.extend(flips.iter().map(|&q| Gate::X(q)));
            }
        }
    }
}

/// Builder for the SAT oracle circuit.
#[derive(Clone, Copy, Debug)]
pub struct SatCircuitBuilder {
    max_qubits: u32,
    uncompute: bool,
}

impl Default for SatCircuitBuilder {
    fn default() -> Self {
        SatCircuitBuilder {
            max_qubits: max_qubits(),
            uncompute: false,
        }
    }
}

impl SatCircuitBuilder {
    pub fn max_qubits(mut self, cap: u32) -> Self {
        self.max_qubits = cap;
        self
    }

    /// Re-run the clause gates in reverse after writing the result so the
    /// output is `|ε, 0, t(ε)⟩` with clean work qubits.
    pub fn uncompute(mut self, yes: bool) -> Self {
        self.uncompute = yes;
        self
    }

    /// Number of ancillas (work + result) the circuit for `f` will use.
    pub fn ancilla_count(f: &CnfFormula) -> u32 {
        let f = filter_minimal(f);
        let clauses = f.clauses();
        if clauses.is_empty() || clauses.iter().any(Clause::is_empty) {
            return 1;
        }
        let clause_work: u32 = clauses.iter().map(|c| c.len() as u32 - 1).sum();
        clause_work + (clauses.len() as u32 - 1) + 1
    }

    pub fn build(&self, f: &CnfFormula) -> Result<(Circuit, CircuitLayout), CircuitError> {
        let n = f.num_vars();
        let mu = Self::ancilla_count(f);
        let num_qubits = n + mu;
        if num_qubits > self.max_qubits {
            return Err(CircuitError::QubitCap {
                required: num_qubits,
                mu,
                cap: self.max_qubits,
            });
        }
        let result = num_qubits - 1;
        let layout = CircuitLayout {
            n_input: n,
            work_qubits: n..result,
            result_qubit: result,
            mu,
        };
        let bound = ANCILLA_BOUND_FACTOR * (f.num_clauses() as u32 * n).max(1);
        assert!(mu <= bound, "μ = {mu} exceeds {bound}");

        // Tautological clauses are always 1 and drop out of the conjunction.
        let reduced = filter_minimal(f);
        let clauses = reduced.clauses();
        let mut em = Emitter {
            gates: Vec::new(),
            next_work: n,
        };
        if clauses.iter().any(Clause::is_empty) {
            // Constant 0: the result qubit is never touched.
        } else if clauses.is_empty() {
            em.gates.push(Gate::X(result));
        } else {
            let wires: Vec<Wire> = clauses.iter().map(|c| em.clause(c)).collect();
            let mut acc = wires[0];
            for &w in &wires[1..] {
                let t = em.alloc();
                em.and(acc, w, t);
                acc = Wire::Qubit {
                    q: t,
                    inverted: false,
                };
            }
            debug_assert_eq!(em.next_work, result);
            let compute = std::mem::take(&mut em.gates);
            em.gates.extend_from_slice(&compute);
            em.copy(acc, result);
            if self.uncompute {
                em.gates.extend(compute.iter().rev().map(Gate::inverse));
            }
        }

        let mut circuit = Circuit::new(num_qubits);
        for g in em.gates {
            circuit.push(g)?;
        }
        Ok((circuit, layout))
    }
}

/// [`SatCircuitBuilder::build`] with default settings.
pub fn build_sat_circuit(f: &CnfFormula) -> Result<(Circuit, CircuitLayout), CircuitError> {
    SatCircuitBuilder::default().build(f)
}

/// `2^{-n/2} Σ_ε |ε, 0_μ⟩`.
pub fn prepare_uniform(n: u32, mu: u32) -> Result<StateVector, CircuitError> {
    let num_qubits = n + mu;
    let cap = max_qubits();
    if num_qubits > cap {
        return Err(CircuitError::QubitCap {
            required: num_qubits,
            mu,
            cap,
        });
    }
    let amp = Complex64::new((-(n as f64) / 2.0).exp2(), 0.0);
    let mut amps = vec![Complex64::new(0.0, 0.0); 1usize << num_qubits];
    for k in 0..1usize << n {
        amps[k << mu] = amp;
    }
    Ok(StateVector { num_qubits, amps })
}

/// Discrete Fourier state `ξ(t)` with amplitudes `2^{-N/2} e^{2πitk/2^N}`,
/// built as Hadamards followed by one phase gate per qubit.
pub fn dft_state(t: u64, num_qubits: u32) -> Result<StateVector, CircuitError> {
    if num_qubits >= 64 || t >= 1u64 << num_qubits {
        return Err(CircuitError::DftIndex {
            t,
            qubits: num_qubits,
        });
    }
    let mut s = prepare_uniform(num_qubits, 0)?;
    let dim = (1u64 << num_qubits) as f64;
    for q in 0..num_qubits {
        let weight = (1u64 << (num_qubits - 1 - q)) as f64;
        let angle = 2.0 * PI * ((t as f64 * weight) % dim) / dim;
        s.apply(&Gate::Phase { target: q, angle })?;
    }
    Ok(s)
}

/// `‖P ψ‖²` with `P` projecting the result qubit onto `|1⟩`.
pub fn success_probability(s: &StateVector, layout: &CircuitLayout) -> f64 {
    s.probability_one(layout.result_qubit)
}

/// Projects onto result qubit = 1 and renormalizes; `None` when the
/// projection vanishes.
pub fn post_measure(s: &StateVector, layout: &CircuitLayout) -> Option<StateVector> {
    let p = success_probability(s, layout);
    if p < ZERO_PROJECTION {
        return None;
    }
    let mask = qubit_mask(s.num_qubits, layout.result_qubit);
    let scale = 1.0 / p.sqrt();
    let amps = s
        .amps
        .iter()
        .enumerate()
        .map(|(i, a)| {
            if i & mask != 0 {
                a * scale
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect();
    Some(StateVector {
        num_qubits: s.num_qubits,
        amps,
    })
}

/// `(√(1−q²), q)`: the single-qubit state handed to the amplifiers.
pub fn collapse_to_qubit(q_squared: f64) -> Result<(f64, f64), CircuitError> {
    // Statevector probabilities can overshoot 1 by a rounding error.
    const SLACK: f64 = 1e-12;
    if !(-SLACK..=1.0 + SLACK).contains(&q_squared) {
        return Err(CircuitError::ProbabilityRange(q_squared));
    }
    let q2 = q_squared.clamp(0.0, 1.0);
    Ok(((1.0 - q2).sqrt(), q2.sqrt()))
}
