//! End-to-end orchestration: preparation, computation and measurement
//! channels, the amplifier stage, reports and the corpus self-check.
//!
//! Two modes produce `q²`. `Statevector` simulates the oracle circuit;
//! `Oracle` counts models by enumeration and keeps `q² = r/2ⁿ` as an exact
//! rational, which is what the circuit's measurement probability equals.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;
use thiserror::Error;

use crate::chaos::{self, ChaosError, ChaosVerdict, LogisticParams};
use crate::circuit::{
    self, build_sat_circuit, max_qubits, prepare_uniform, CircuitError, CircuitLayout, Gate,
    SatCircuitBuilder, StateVector,
};
use crate::cnf::{count_satisfying, parse_dimacs, CnfError, CnfFormula, CountSummary};
use crate::stochastic::{
    self, adapt_with_tolerance, classify, ClassifierConfig, DynVerdict, InputAmplitudes,
    StochasticError, Susceptibility, TwoLevelHamiltonian,
};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: CnfError,
    },
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Chaos(#[from] ChaosError),
    #[error(transparent)]
    Stochastic(#[from] StochasticError),
    #[error("channel stages out of order: {next:?} cannot follow {prev:?}")]
    StageOrder { prev: StageLabel, next: StageLabel },
    #[error("stage {0:?} received a state it cannot act on")]
    StageInput(StageLabel),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("corpus {0} contains no .cnf files")]
    EmptyCorpus(PathBuf),
    #[error("CSV output needs an amplifier trace; use --amplifier chaos or stochastic")]
    NothingToEmit,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Oracle,
    Statevector,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AmplifierKind {
    Chaos,
    Stochastic,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Json,
    Csv,
}

macro_rules! keyword_enum {
    ($ty:ident { $($name:literal => $variant:ident),* $(,)? }) => {
        impl FromStr for $ty {
            type Err = PipelineError;
            fn from_str(s: &str) -> Result<Self, Self::Err> {
                match s {
                    $($name => Ok($ty::$variant),)*
                    _ => Err(PipelineError::Config(format!(
                        "unknown {} {s:?}", stringify!($ty)
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.pad(match self { $($ty::$variant => $name,)* })
            }
        }
    };
}

keyword_enum!(Mode { "oracle" => Oracle, "statevector" => Statevector });
keyword_enum!(AmplifierKind { "chaos" => Chaos, "stochastic" => Stochastic, "none" => None });
keyword_enum!(OutputFormat { "json" => Json, "csv" => Csv });

#[derive(Clone, Debug, PartialEq)]
pub struct PipelineConfig {
    pub input_path: PathBuf,
    pub mode: Mode,
    pub amplifier: AmplifierKind,
    pub a: f64,
    pub gamma_re: f64,
    pub gamma_im: f64,
    pub e0: i64,
    pub e1: i64,
    pub horizon_factor: f64,
    pub threshold: f64,
    pub emit_path: Option<PathBuf>,
    pub format: OutputFormat,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            input_path: PathBuf::new(),
            mode: Mode::Oracle,
            amplifier: AmplifierKind::Chaos,
            a: chaos::DEFAULT_A,
            gamma_re: 1.0,
            gamma_im: 0.0,
            e0: 0,
            e1: 2,
            horizon_factor: stochastic::DEFAULT_HORIZON_FACTOR,
            threshold: stochastic::DEFAULT_THRESHOLD,
            emit_path: None,
            format: OutputFormat::Json,
        }
    }
}

impl PipelineConfig {
    fn logistic(&self) -> Result<LogisticParams, PipelineError> {
        Ok(LogisticParams::new(self.a)?)
    }

    fn susceptibility(&self) -> Result<Susceptibility, PipelineError> {
        Ok(Susceptibility::new(self.gamma_re, self.gamma_im)?)
    }

    fn hamiltonian(&self) -> Result<TwoLevelHamiltonian, PipelineError> {
        Ok(TwoLevelHamiltonian::new(self.e0 as f64, self.e1 as f64)?)
    }

    fn classifier(&self) -> Result<ClassifierConfig, PipelineError> {
        if !(self.horizon_factor > 0.0) {
            return Err(PipelineError::Config(format!(
                "horizon factor must be positive, got {}",
                self.horizon_factor
            )));
        }
        let cfg = ClassifierConfig::with_horizon_factor(
            &self.susceptibility()?,
            self.horizon_factor,
            self.threshold,
        );
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks every parameter against its owning module.
    pub fn validate(&self) -> Result<(), PipelineError> {
        self.logistic()?;
        self.hamiltonian()?;
        self.classifier()?;
        Ok(())
    }

    /// Non-fatal advice about the configuration.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.amplifier == AmplifierKind::Stochastic && self.e1 == self.e0 + 1 {
            out.push(format!(
                "E1 = E0 + 1 makes the coherent branch stationary; use E1 >= E0 + 2 (got E0 = {}, E1 = {})",
                self.e0, self.e1
            ));
        }
        out
    }
}

// ---------------------------------------------------------------------------
// Channels

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StageLabel {
    Preparation,
    Computation,
    Measurement,
}

/// Outcome of the PVM `{P, 1 − P}` on the result qubit.
#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRecord {
    pub probability: f64,
    /// Normalized post-measurement state on the `1` branch; `None` when that
    /// branch has zero weight.
    pub post_state: Option<StateVector>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum ChannelState {
    Vector(StateVector),
    Measured(MeasurementRecord),
}

type Transform<'a> = Box<dyn Fn(ChannelState) -> Result<ChannelState, PipelineError> + 'a>;

pub struct ChannelStage<'a> {
    pub label: StageLabel,
    transform: Transform<'a>,
}

impl<'a> ChannelStage<'a> {
    pub fn new<F>(label: StageLabel, f: F) -> Self
    where
        F: Fn(ChannelState) -> Result<ChannelState, PipelineError> + 'a,
    {
        ChannelStage {
            label,
            transform: Box::new(f),
        }
    }

    pub fn identity(label: StageLabel) -> Self {
        Self::new(label, Ok)
    }
}

impl fmt::Debug for ChannelStage<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChannelStage")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// Applies the stages in order; labels must not go backwards through
/// preparation → computation → measurement.
pub fn compose_channels(
    stages: &[ChannelStage<'_>],
    input: ChannelState,
) -> Result<ChannelState, PipelineError> {
    for pair in stages.windows(2) {
        if pair[1].label < pair[0].label {
            return Err(PipelineError::StageOrder {
                prev: pair[0].label,
                next: pair[1].label,
            });
        }
    }
    stages
        .iter()
        .try_fold(input, |s, stage| (stage.transform)(s))
}

/// The three stages of the SAT algorithm for `f`, acting on `|0…0⟩` of
/// `n + μ` qubits: Hadamards on the inputs, the oracle circuit, and the
/// result-qubit measurement.
pub fn sat_channels(
    f: &CnfFormula,
) -> Result<(Vec<ChannelStage<'static>>, CircuitLayout), PipelineError> {
    let (circ, layout) = build_sat_circuit(f)?;
    let n = layout.n_input;
    let measured = layout.clone();
    let stages = vec![
        ChannelStage::new(StageLabel::Preparation, move |s| match s {
            ChannelState::Vector(mut v) => {
                for q in 0..n {
                    v.apply(&Gate::H(q))?;
                }
                Ok(ChannelState::Vector(v))
            }
            _ => Err(PipelineError::StageInput(StageLabel::Preparation)),
        }),
        ChannelStage::new(StageLabel::Computation, move |s| match s {
            ChannelState::Vector(v) => Ok(ChannelState::Vector(circuit::run(&circ, v)?)),
            _ => Err(PipelineError::StageInput(StageLabel::Computation)),
        }),
        ChannelStage::new(StageLabel::Measurement, move |s| match s {
            ChannelState::Vector(v) => Ok(ChannelState::Measured(MeasurementRecord {
                probability: circuit::success_probability(&v, &measured),
                post_state: circuit::post_measure(&v, &measured),
            })),
            _ => Err(PipelineError::StageInput(StageLabel::Measurement)),
        }),
    ];
    Ok((stages, layout))
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormulaStats {
    pub n: u32,
    pub m: usize,
    pub mu: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QSquared {
    /// `"r/2^n"` in lowest terms; only in oracle mode.
    pub exact: Option<String>,
    pub value: f64,
    pub source: Mode,
}

impl QSquared {
    /// Zero test matching the mode: exact in oracle mode, amplitude below
    /// [`stochastic::AMPLITUDE_TOLERANCE`] in statevector mode.
    pub fn is_zero(&self) -> bool {
        self.value.sqrt() <= self.zero_tolerance()
    }

    fn zero_tolerance(&self) -> f64 {
        match self.source {
            Mode::Oracle => 0.0,
            Mode::Statevector => stochastic::AMPLITUDE_TOLERANCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AmplifierVerdict {
    Chaos(ChaosVerdict),
    Stochastic(DynVerdict),
}

impl AmplifierVerdict {
    pub fn satisfiable(&self) -> bool {
        match self {
            AmplifierVerdict::Chaos(v) => v.satisfiable,
            AmplifierVerdict::Stochastic(v) => v.satisfiable,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub r: u64,
    pub total: u64,
    pub satisfiable: bool,
}

impl From<&CountSummary> for Reference {
    fn from(c: &CountSummary) -> Self {
        Reference {
            r: c.r,
            total: c.total,
            satisfiable: c.is_sat(),
        }
    }
}

/// Outcome of one pipeline run. Serialized as the JSON report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub formula: FormulaStats,
    pub q_squared: QSquared,
    pub amplifier: AmplifierKind,
    pub verdict: Option<AmplifierVerdict>,
    pub satisfiable: Option<bool>,
    pub reference: Option<Reference>,
    pub agreement: Option<bool>,
    pub timing_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }
}

/// Computes `q²` for `f` in the given mode.
pub fn measure_q_squared(f: &CnfFormula, mode: Mode) -> Result<QSquared, PipelineError> {
    match mode {
        Mode::Oracle => {
            let c = count_satisfying(f)?;
            Ok(oracle_q_squared(&c))
        }
        Mode::Statevector => {
            let (stages, layout) = sat_channels(f)?;
            let input = ChannelState::Vector(StateVector::zero(layout.num_qubits())?);
            match compose_channels(&stages, input)? {
                ChannelState::Measured(m) => Ok(QSquared {
                    exact: None,
                    value: m.probability,
                    source: Mode::Statevector,
                }),
                ChannelState::Vector(_) => unreachable!("measurement stage is last"),
            }
        }
    }
}

fn oracle_q_squared(c: &CountSummary) -> QSquared {
    QSquared {
        exact: Some(format!("{}/{}", c.q_squared.numer(), c.q_squared.denom())),
        value: c.q_squared_f64(),
        source: Mode::Oracle,
    }
}

/// Hands `q²` to the selected amplifier.
pub fn amplify(
    q2: &QSquared,
    n: u32,
    kind: AmplifierKind,
    cfg: &PipelineConfig,
) -> Result<Option<AmplifierVerdict>, PipelineError> {
    let zero = q2.is_zero();
    Ok(match kind {
        AmplifierKind::None => None,
        AmplifierKind::Chaos => {
            let x0 = if zero { 0.0 } else { q2.value.clamp(0.0, 1.0) };
            Some(AmplifierVerdict::Chaos(chaos::detect(
                x0,
                n.max(1),
                &cfg.logistic()?,
            )?))
        }
        AmplifierKind::Stochastic => {
            let (a0, a1) = circuit::collapse_to_qubit(q2.value)?;
            let psi = InputAmplitudes::real(a0, a1)?;
            let dynamics = adapt_with_tolerance(
                &psi,
                &cfg.hamiltonian()?,
                cfg.susceptibility()?,
                q2.zero_tolerance(),
            );
            Some(AmplifierVerdict::Stochastic(classify(
                &dynamics,
                &cfg.classifier()?,
            )?))
        }
    })
}

/// Runs the pipeline on an already parsed formula.
pub fn run_formula(f: &CnfFormula, cfg: &PipelineConfig) -> Result<Report, PipelineError> {
    let start = Instant::now();
    cfg.validate()?;
    let mu = SatCircuitBuilder::ancilla_count(f);
    let n = f.num_vars();

    let reference = count_satisfying(f).ok();
    let q_squared = match (cfg.mode, &reference) {
        (Mode::Oracle, Some(c)) => oracle_q_squared(c),
        (Mode::Oracle, None) => measure_q_squared(f, Mode::Oracle)?,
        (Mode::Statevector, _) => {
            let cap = max_qubits();
            if n + mu > cap {
                return Err(PipelineError::Config(format!(
                    "statevector mode needs {} qubits (n = {n}, μ = {mu}) but the cap is {cap}; \
                     use --mode oracle or raise QSAT_MAX_QUBITS",
                    n + mu
                )));
            }
            measure_q_squared(f, Mode::Statevector)?
        }
    };

    let verdict = amplify(&q_squared, n, cfg.amplifier, cfg)?;
    let satisfiable = verdict.as_ref().map(AmplifierVerdict::satisfiable);
    let reference = reference.as_ref().map(Reference::from);
    let agreement = match (satisfiable, &reference) {
        (Some(s), Some(r)) => Some(s == r.satisfiable),
        _ => None,
    };
    Ok(Report {
        formula: FormulaStats {
            n,
            m: f.num_clauses(),
            mu,
        },
        q_squared,
        amplifier: cfg.amplifier,
        verdict,
        satisfiable,
        reference,
        agreement,
        timing_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

pub fn load_formula(path: &Path) -> Result<CnfFormula, PipelineError> {
    let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
        path: path.to_owned(),
        source,
    })?;
    parse_dimacs(&text).map_err(|source| PipelineError::Parse {
        path: path.to_owned(),
        source,
    })
}

/// Reads `cfg.input_path` and runs the pipeline.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<Report, PipelineError> {
    let f = load_formula(&cfg.input_path)?;
    run_formula(&f, cfg)
}

// ---------------------------------------------------------------------------
// Emission

/// Renders a report as JSON, or the amplifier trace as CSV.
pub fn render(report: &Report, format: OutputFormat) -> Result<String, PipelineError> {
    match format {
        OutputFormat::Json => Ok(report.to_json()),
        OutputFormat::Csv => match &report.verdict {
            Some(AmplifierVerdict::Chaos(v)) => Ok(chaos_csv(v)),
            Some(AmplifierVerdict::Stochastic(v)) => Ok(trajectory_csv(v)),
            None => Err(PipelineError::NothingToEmit),
        },
    }
}

pub fn chaos_csv(v: &ChaosVerdict) -> String {
    let mut out = String::from("m,x_m\n");
    for (m, x) in v.trace.xs.iter().enumerate() {
        out.push_str(&format!("{m},{x}\n"));
    }
    out
}

pub fn trajectory_csv(v: &DynVerdict) -> String {
    let mut out = String::from("t,p1,coh_abs,coh_phase\n");
    for p in &v.trajectory {
        out.push_str(&format!("{},{},{},{}\n", p.t, p.p1, p.coh_abs, p.coh_phase));
    }
    out
}

pub fn emit(report: &Report, format: OutputFormat, path: &Path) -> Result<(), PipelineError> {
    let body = render(report, format)?;
    let io = |source| PipelineError::Io {
        path: path.to_owned(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(body.as_bytes()).map_err(io)
}

// ---------------------------------------------------------------------------
// Self-check

/// Expectation recorded in a corpus file as `c expect: SAT` or
/// `c expect: UNSAT`.
pub fn corpus_expectation(text: &str) -> Option<bool> {
    text.lines().find_map(|l| {
        let rest = l.trim().strip_prefix('c')?.trim().strip_prefix("expect:")?;
        match rest.trim() {
            "SAT" => Some(true),
            "UNSAT" => Some(false),
            _ => None,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunOutcome {
    pub mode: Mode,
    pub amplifier: AmplifierKind,
    pub q_squared: f64,
    pub satisfiable: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheckEntry {
    pub file: String,
    pub n: u32,
    pub m: usize,
    pub mu: u32,
    pub r: u64,
    pub reference: bool,
    pub expected: Option<bool>,
    pub runs: Vec<RunOutcome>,
    /// `|q²(statevector) − q²(oracle)|` when both modes ran.
    pub mode_gap: Option<f64>,
}

/// Tolerance for oracle vs statevector `q²`.
pub const MODE_EQUIVALENCE_TOLERANCE: f64 = 1e-10;

impl SelfCheckEntry {
    pub fn disagreements(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(e) = self.expected {
            if e != self.reference {
                out.push(format!(
                    "{}: labelled {} but brute force says {}",
                    self.file,
                    sat_word(e),
                    sat_word(self.reference)
                ));
            }
        }
        for run in &self.runs {
            if run.satisfiable != self.reference {
                out.push(format!(
                    "{}: {} / {} says {} but brute force says {}",
                    self.file,
                    run.mode,
                    run.amplifier,
                    sat_word(run.satisfiable),
                    sat_word(self.reference)
                ));
            }
        }
        if let Some(gap) = self.mode_gap {
            if gap > MODE_EQUIVALENCE_TOLERANCE {
                out.push(format!(
                    "{}: oracle and statevector q² differ by {gap:e}",
                    self.file
                ));
            }
        }
        out
    }
}

fn sat_word(b: bool) -> &'static str {
    if b {
        "SAT"
    } else {
        "UNSAT"
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelfCheckSummary {
    pub entries: Vec<SelfCheckEntry>,
    pub runs: usize,
    pub disagreements: Vec<String>,
}

impl SelfCheckSummary {
    pub fn all_agree(&self) -> bool {
        self.disagreements.is_empty()
    }

    /// Agreement counts per (mode, amplifier) pair.
    pub fn matrix(&self) -> Vec<(Mode, AmplifierKind, usize, usize)> {
        let mut out = Vec::new();
        for mode in [Mode::Oracle, Mode::Statevector] {
            for amp in [AmplifierKind::Chaos, AmplifierKind::Stochastic] {
                let (mut agree, mut total) = (0, 0);
                for e in &self.entries {
                    for r in e
                        .runs
                        .iter()
                        .filter(|r| r.mode == mode && r.amplifier == amp)
                    {
                        total += 1;
                        agree += (r.satisfiable == e.reference) as usize;
                    }
                }
                out.push((mode, amp, agree, total));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct SelfCheckOptions {
    /// Statevector runs are skipped above this many qubits.
    pub statevector_qubits: u32,
    pub config: PipelineConfig,
}

impl Default for SelfCheckOptions {
    fn default() -> Self {
        SelfCheckOptions {
            statevector_qubits: max_qubits(),
            config: PipelineConfig::default(),
        }
    }
}

pub fn self_check(corpus_dir: &Path) -> Result<SelfCheckSummary, PipelineError> {
    self_check_with(corpus_dir, &SelfCheckOptions::default())
}

/// Runs both amplifiers in oracle mode and, where the circuit fits, in
/// statevector mode for every `.cnf` file in `corpus_dir`.
pub fn self_check_with(
    corpus_dir: &Path,
    opts: &SelfCheckOptions,
) -> Result<SelfCheckSummary, PipelineError> {
    let io = |source| PipelineError::Io {
        path: corpus_dir.to_owned(),
        source,
    };
    let mut files: Vec<PathBuf> = fs::read_dir(corpus_dir)
        .map_err(io)?
        .map(|e| e.map(|e| e.path()))
        .collect::<Result<_, _>>()
        .map_err(io)?;
    files.retain(|p| p.extension().is_some_and(|e| e == "cnf"));
    files.sort();
    if files.is_empty() {
        return Err(PipelineError::EmptyCorpus(corpus_dir.to_owned()));
    }

    let mut entries = Vec::with_capacity(files.len());
    for path in &files {
        let text = fs::read_to_string(path).map_err(|source| PipelineError::Io {
            path: path.clone(),
            source,
        })?;
        let f = parse_dimacs(&text).map_err(|source| PipelineError::Parse {
            path: path.clone(),
            source,
        })?;
        let count = count_satisfying(&f)?;
        let n = f.num_vars();
        let mu = SatCircuitBuilder::ancilla_count(&f);

        let mut q2s = vec![oracle_q_squared(&count)];
        if n + mu <= opts.statevector_qubits.min(max_qubits()) {
            q2s.push(measure_q_squared(&f, Mode::Statevector)?);
        }
        let mode_gap = (q2s.len() == 2).then(|| (q2s[0].value - q2s[1].value).abs());

        let mut runs = Vec::new();
        for q2 in &q2s {
            for amp in [AmplifierKind::Chaos, AmplifierKind::Stochastic] {
                let v = amplify(q2, n, amp, &opts.config)?.expect("amplifier selected");
                runs.push(RunOutcome {
                    mode: q2.source,
                    amplifier: amp,
                    q_squared: q2.value,
                    satisfiable: v.satisfiable(),
                });
            }
        }
        entries.push(SelfCheckEntry {
            file: path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default(),
            n,
            m: f.num_clauses(),
            mu,
            r: count.r,
            reference: count.is_sat(),
            expected: corpus_expectation(&text),
            runs,
            mode_gap,
        });
    }
    let runs = entries.iter().map(|e| e.runs.len()).sum();
    let disagreements = entries.iter().flat_map(|e| e.disagreements()).collect();
    Ok(SelfCheckSummary {
        entries,
        runs,
        disagreements,
    })
}

/// Uniform input state for `f`'s circuit, for callers driving the stages
/// by hand.
pub fn uniform_input(f: &CnfFormula) -> Result<StateVector, PipelineError> {
    let mu = SatCircuitBuilder::ancilla_count(f);
    Ok(prepare_uniform(f.num_vars(), mu)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: u32, c: &[&[i64]]) -> CnfFormula {
        CnfFormula::from_ints(n, c).unwrap()
    }

    #[test]
    fn identity_stages_leave_input_unchanged() {
        let s = ChannelState::Vector(circuit::dft_state(3, 3).unwrap());
        let stages = [
            ChannelStage::identity(StageLabel::Preparation),
            ChannelStage::identity(StageLabel::Computation),
            ChannelStage::identity(StageLabel::Measurement),
        ];
        assert_eq!(compose_channels(&stages, s.clone()).unwrap(), s);
    }

    #[test]
    fn out_of_order_stages_are_rejected() {
        let s = ChannelState::Vector(StateVector::zero(1).unwrap());
        let stages = [
            ChannelStage::identity(StageLabel::Measurement),
            ChannelStage::identity(StageLabel::Preparation),
        ];
        assert!(matches!(
            compose_channels(&stages, s),
            Err(PipelineError::StageOrder { .. })
        ));
    }

    #[test]
    fn sat_channels_measure_success_probability() {
        let g = f(2, &[&[1, 2]]);
        let (stages, layout) = sat_channels(&g).unwrap();
        let out = compose_channels(
            &stages,
            ChannelState::Vector(StateVector::zero(layout.num_qubits()).unwrap()),
        )
        .unwrap();
        match out {
            ChannelState::Measured(m) => {
                assert!((m.probability - 0.75).abs() < 1e-12);
                assert!(m.post_state.is_some());
            }
            _ => panic!("expected a measurement record"),
        }

        let g = f(1, &[&[1], &[-1]]);
        let (stages, layout) = sat_channels(&g).unwrap();
        let out = compose_channels(
            &stages,
            ChannelState::Vector(StateVector::zero(layout.num_qubits()).unwrap()),
        )
        .unwrap();
        assert_eq!(
            out,
            ChannelState::Measured(MeasurementRecord {
                probability: 0.0,
                post_state: None
            })
        );
    }

    #[test]
    fn run_formula_examples() {
        let cfg = PipelineConfig::default();
        let r = run_formula(&f(2, &[&[1, 2]]), &cfg).unwrap();
        assert_eq!(r.satisfiable, Some(true));
        assert_eq!(r.q_squared.exact.as_deref(), Some("3/4"));
        match r.verdict.unwrap() {
            AmplifierVerdict::Chaos(v) => {
                assert_eq!((v.m_hit, v.window), (Some(0), 4));
            }
            v => panic!("{v:?}"),
        }

        for amp in [AmplifierKind::Chaos, AmplifierKind::Stochastic] {
            for mode in [Mode::Oracle, Mode::Statevector] {
                let cfg = PipelineConfig {
                    amplifier: amp,
                    mode,
                    ..Default::default()
                };
                let r = run_formula(&f(1, &[&[1], &[-1]]), &cfg).unwrap();
                assert_eq!(r.satisfiable, Some(false), "{amp} {mode}");
                assert_eq!(r.agreement, Some(true));
            }
        }
    }

    #[test]
    fn needle_is_found_by_stochastic_amplifier() {
        let units: Vec<Vec<i64>> = (1..=8)
            .map(|v| vec![if v % 3 == 0 { -v } else { v }])
            .collect();
        let refs: Vec<&[i64]> = units.iter().map(|c| c.as_slice()).collect();
        let g = f(8, &refs);
        let cfg = PipelineConfig {
            amplifier: AmplifierKind::Stochastic,
            ..Default::default()
        };
        let r = run_formula(&g, &cfg).unwrap();
        assert_eq!(r.q_squared.exact.as_deref(), Some("1/256"));
        assert_eq!(r.satisfiable, Some(true));
        match r.verdict.unwrap() {
            AmplifierVerdict::Stochastic(v) => assert!(v.damped),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn statevector_mode_enforces_cap() {
        let g = f(4, &[&[1, 2, 3, 4], &[-1, -2, -3, -4], &[1, -2, 3, -4]]);
        let r = run_formula(
            &g,
            &PipelineConfig {
                mode: Mode::Statevector,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(r.satisfiable, Some(true));
        assert!((r.q_squared.value - r.reference.unwrap().r as f64 / 16.0).abs() < 1e-10);
    }

    #[test]
    fn invalid_parameters_are_reported() {
        let g = f(1, &[&[1]]);
        for cfg in [
            PipelineConfig {
                a: 5.0,
                ..Default::default()
            },
            PipelineConfig {
                gamma_re: -1.0,
                ..Default::default()
            },
            PipelineConfig {
                e0: 3,
                e1: 1,
                ..Default::default()
            },
            PipelineConfig {
                threshold: 0.0,
                ..Default::default()
            },
            PipelineConfig {
                horizon_factor: 0.0,
                ..Default::default()
            },
        ] {
            assert!(run_formula(&g, &cfg).is_err(), "{cfg:?}");
        }
        let warn = PipelineConfig {
            amplifier: AmplifierKind::Stochastic,
            e0: 0,
            e1: 1,
            ..Default::default()
        };
        assert_eq!(warn.warnings().len(), 1);
    }

    #[test]
    fn csv_rendering() {
        let g = f(2, &[&[1, 2]]);
        let r = run_formula(&g, &PipelineConfig::default()).unwrap();
        let csv = render(&r, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("m,x_m\n0,0.75\n"));
        assert_eq!(csv.lines().count(), 1 + 5);

        let r = run_formula(
            &g,
            &PipelineConfig {
                amplifier: AmplifierKind::Stochastic,
                ..Default::default()
            },
        )
        .unwrap();
        let csv = render(&r, OutputFormat::Csv).unwrap();
        assert!(csv.starts_with("t,p1,coh_abs,coh_phase\n0,"));
        assert_eq!(csv.lines().count(), 1 + 401);

        let r = run_formula(
            &g,
            &PipelineConfig {
                amplifier: AmplifierKind::None,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(matches!(
            render(&r, OutputFormat::Csv),
            Err(PipelineError::NothingToEmit)
        ));
    }

    #[test]
    fn expectation_comments() {
        assert_eq!(corpus_expectation("c expect: SAT\np cnf 1 0\n"), Some(true));
        assert_eq!(corpus_expectation("c foo\nc expect: UNSAT\n"), Some(false));
        assert_eq!(corpus_expectation("p cnf 1 0\n"), None);
    }

    #[test]
    fn keywords_parse() {
        assert_eq!("oracle".parse::<Mode>().unwrap(), Mode::Oracle);
        assert_eq!(
            "stochastic".parse::<AmplifierKind>().unwrap(),
            AmplifierKind::Stochastic
        );
        assert_eq!(OutputFormat::Csv.to_string(), "csv");
        assert!("quantum".parse::<Mode>().is_err());
    }
}
