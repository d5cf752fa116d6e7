//! State-adaptive amplifier.
//!
//! The single-qubit output `ψ = α₀e₀ + α₁e₁` of the SAT circuit fixes the
//! interaction with an external field. When both amplitudes are nonzero the
//! reduced dynamics in the stochastic limit is a damping semigroup that
//! drives every state to `|e₀⟩⟨e₀|`; when `α₁ = 0` it is the coherent
//! evolution generated by the shifted Hamiltonian
//! `H_S + |e₀⟩⟨e₀| = diag(E₀ + 1, E₁)`, which is periodic for integer
//! energies. A probe state tells the two apart: its excited population
//! decays in the first case and stays constant in the second.
//!
//! The damping generator is used in its trace-preserving form
//!
//! ```text
//! L_* ρ = i·Im γ₋ [ρ, D⁺D] + Re γ₋ (2DρD⁺ − {D⁺D, ρ}),   D = |e₀⟩⟨e₁|
//! L_H x = i·Im γ₋ [D⁺D, x] + Re γ₋ (2D⁺xD − {D⁺D, x})
//! ```
//!
//! giving population decay `2 Re γ₋`, coherence decay `Re γ₋` and coherence
//! rotation `Im γ₋`. [`GeneratorForm::Unnormalized`] keeps the coefficient
//! `Re γ₋` on the jump term instead; it loses trace and is only meant for
//! comparison.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{
    anticommutator, commutator, evolve, DensityMatrix2, DynamicsError, Mat2, RelaxationSolution,
    Superoperator,
};

/// Amplitudes at or below this modulus count as zero in statevector mode.
pub const AMPLITUDE_TOLERANCE: f64 = 1e-12;

pub const DEFAULT_HORIZON_FACTOR: f64 = 20.0;
pub const DEFAULT_THRESHOLD: f64 = 0.1;
pub const DEFAULT_SAMPLES: usize = 400;

#[derive(Debug, Error, PartialEq)]
pub enum StochasticError {
    #[error("input amplitudes are not normalized: |α₀|² + |α₁|² = {0}")]
    NotNormalized(f64),
    #[error("susceptibility needs Re γ₋ > 0, got {0}")]
    NonDampingSusceptibility(f64),
    #[error("energies must satisfy E0 < E1, got E0 = {e0}, E1 = {e1}")]
    EnergyOrder { e0: f64, e1: f64 },
    #[error("energy {0} is not an integer; the coherent evolution would not be periodic")]
    NonIntegerEnergy(f64),
    #[error("invalid classifier configuration: {0}")]
    Config(String),
    #[error("probe needs p₁(0) ≥ 0.25 and |ρ₀₁(0)| ≥ 0.25, got p₁ = {p1}, |ρ₀₁| = {coherence}")]
    WeakProbe { p1: f64, coherence: f64 },
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
}

/// `ψ = α₀e₀ + α₁e₁` with `‖ψ‖ = 1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InputAmplitudes {
    alpha0: Complex64,
    alpha1: Complex64,
}

impl InputAmplitudes {
    pub fn new(alpha0: Complex64, alpha1: Complex64) -> Result<Self, StochasticError> {
        let norm = alpha0.norm_sqr() + alpha1.norm_sqr();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(StochasticError::NotNormalized(norm));
        }
        Ok(InputAmplitudes { alpha0, alpha1 })
    }

    pub fn real(alpha0: f64, alpha1: f64) -> Result<Self, StochasticError> {
        Self::new(Complex64::new(alpha0, 0.0), Complex64::new(alpha1, 0.0))
    }

    /// `(√(1 − q²), q)`.
    pub fn from_q_squared(q_squared: f64) -> Result<Self, StochasticError> {
        let q2 = q_squared.clamp(0.0, 1.0);
        Self::real((1.0 - q2).sqrt(), q2.sqrt())
    }

    pub fn alpha0(&self) -> Complex64 {
        self.alpha0
    }

    pub fn alpha1(&self) -> Complex64 {
        self.alpha1
    }
}

/// `H_S = E₀|e₀⟩⟨e₀| + E₁|e₁⟩⟨e₁|` with `E₀ < E₁`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwoLevelHamiltonian {
    e0: f64,
    e1: f64,
}

impl TwoLevelHamiltonian {
    pub fn new(e0: f64, e1: f64) -> Result<Self, StochasticError> {
        if !(e0 < e1) {
            return Err(StochasticError::EnergyOrder { e0, e1 });
        }
        Ok(TwoLevelHamiltonian { e0, e1 })
    }

    /// Rejects non-integer energies.
    pub fn strict(e0: f64, e1: f64) -> Result<Self, StochasticError> {
        for e in [e0, e1] {
            if e.fract() != 0.0 {
                return Err(StochasticError::NonIntegerEnergy(e));
            }
        }
        Self::new(e0, e1)
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn e1(&self) -> f64 {
        self.e1
    }

    /// Bohr frequency `ω₀ = E₁ − E₀`.
    pub fn bohr_frequency(&self) -> f64 {
        self.e1 - self.e0
    }
}

impl Default for TwoLevelHamiltonian {
    fn default() -> Self {
        TwoLevelHamiltonian { e0: 0.0, e1: 2.0 }
    }
}

/// The complex constant `γ₋` of the stochastic golden rule.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Susceptibility {
    re: f64,
    im: f64,
}

impl Susceptibility {
    pub fn new(re: f64, im: f64) -> Result<Self, StochasticError> {
        if !(re > 0.0) {
            return Err(StochasticError::NonDampingSusceptibility(re));
        }
        Ok(Susceptibility { re, im })
    }

    pub fn re(&self) -> f64 {
        self.re
    }

    pub fn im(&self) -> f64 {
        self.im
    }
}

impl Default for Susceptibility {
    fn default() -> Self {
        Susceptibility { re: 1.0, im: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum GeneratorForm {
    /// Trace-preserving, jump term `2 Re γ₋ DρD⁺`.
    #[default]
    Gksl,
    /// Jump term `Re γ₋ DρD⁺`; does not preserve trace.
    Unnormalized,
}

/// Schrödinger and Heisenberg generators of the damping semigroup.
#[derive(Clone, Debug, PartialEq)]
pub struct DampingGenerator {
    pub gamma: Susceptibility,
    pub l_star: Superoperator,
    pub l_heis: Superoperator,
}

impl DampingGenerator {
    pub fn population_rate(&self) -> f64 {
        2.0 * self.gamma.re
    }

    pub fn coherence_decay_rate(&self) -> f64 {
        self.gamma.re
    }

    pub fn coherence_rotation(&self) -> f64 {
        self.gamma.im
    }

    /// Exact solution of the decoupled population/coherence equations.
    pub fn closed_form(&self) -> RelaxationSolution {
        RelaxationSolution {
            population_rate: self.population_rate(),
            coherence_exponent: Complex64::new(-self.gamma.re, self.gamma.im),
        }
    }
}

pub fn damping_generator(g: Susceptibility) -> DampingGenerator {
    damping_generator_with(g, GeneratorForm::Gksl)
}

pub fn damping_generator_with(g: Susceptibility, form: GeneratorForm) -> DampingGenerator {
    let d = Mat2::lowering();
    let dd = d.dagger();
    let n = Mat2::p1(); // D⁺D
    let rot = Complex64::new(0.0, g.im);
    let jump = match form {
        GeneratorForm::Gksl => 2.0 * g.re,
        GeneratorForm::Unnormalized => g.re,
    };
    let l_star = Superoperator::from_map(format!("L_*(γ₋ = {}{:+}i)", g.re, g.im), |rho| {
        rot * commutator(rho, n) + jump * (d * rho * dd) - g.re * anticommutator(n, rho)
    });
    let l_heis = Superoperator::from_map(format!("L_H(γ₋ = {}{:+}i)", g.re, g.im), |x| {
        rot * commutator(n, x) + jump * (dd * x * d) - g.re * anticommutator(n, x)
    });
    DampingGenerator {
        gamma: g,
        l_star,
        l_heis,
    }
}

/// Coherent evolution under a diagonal effective Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct CoherentEvolution {
    pub h_eff: Mat2,
    /// `None` when the two levels are degenerate and nothing moves.
    pub period: Option<f64>,
}

impl CoherentEvolution {
    /// Coherence phase frequency `Δ = H₁₁ − H₀₀`.
    pub fn detuning(&self) -> f64 {
        self.h_eff.get(1, 1).re - self.h_eff.get(0, 0).re
    }
}

/// `diag(E₀ + 1, E₁)` with period `2π/|Δ|`, `Δ = E₁ − E₀ − 1`.
pub fn effective_hamiltonian(h: &TwoLevelHamiltonian) -> CoherentEvolution {
    coherent(h.e0 + 1.0, h.e1)
}

fn coherent(h00: f64, h11: f64) -> CoherentEvolution {
    let delta = h11 - h00;
    CoherentEvolution {
        h_eff: Mat2::real([[h00, 0.0], [0.0, h11]]),
        period: (delta != 0.0).then(|| 2.0 * PI / delta.abs()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum AdaptiveDynamics {
    /// Both amplitudes nonzero.
    Damping(DampingGenerator),
    /// One amplitude vanishes. `trivially_sat` marks `α₀ = 0`, where the
    /// input is `e₁` itself.
    Coherent {
        evolution: CoherentEvolution,
        trivially_sat: bool,
    },
}

impl AdaptiveDynamics {
    pub fn is_damping(&self) -> bool {
        matches!(self, AdaptiveDynamics::Damping(_))
    }

    pub fn trivially_sat(&self) -> bool {
        matches!(
            self,
            AdaptiveDynamics::Coherent {
                trivially_sat: true,
                ..
            }
        )
    }
}

/// Selects the dynamics induced by `ψ` with the default zero tolerance.
pub fn adapt(
    psi: &InputAmplitudes,
    h: &TwoLevelHamiltonian,
    g: Susceptibility,
) -> AdaptiveDynamics {
    adapt_with_tolerance(psi, h, g, AMPLITUDE_TOLERANCE)
}

/// `tol = 0.0` gives the exact zero test used with exact probabilities.
pub fn adapt_with_tolerance(
    psi: &InputAmplitudes,
    h: &TwoLevelHamiltonian,
    g: Susceptibility,
    tol: f64,
) -> AdaptiveDynamics {
    let a0 = psi.alpha0.norm();
    let a1 = psi.alpha1.norm();
    if a1 <= tol {
        AdaptiveDynamics::Coherent {
            evolution: effective_hamiltonian(h),
            trivially_sat: false,
        }
    } else if a0 <= tol {
        // H_I = λ|e₁⟩⟨e₁| ⊗ field: the same no-damping argument with the
        // shift on the upper level.
        AdaptiveDynamics::Coherent {
            evolution: coherent(h.e0, h.e1 + 1.0),
            trivially_sat: true,
        }
    } else {
        AdaptiveDynamics::Damping(damping_generator(g))
    }
}

/// `ρ_t` under the selected dynamics.
pub fn evolve_adaptive(
    dyn_: &AdaptiveDynamics,
    rho0: &DensityMatrix2,
    t: f64,
) -> Result<DensityMatrix2, StochasticError> {
    match dyn_ {
        AdaptiveDynamics::Damping(gen) => Ok(evolve(&gen.l_star, rho0, t)?),
        AdaptiveDynamics::Coherent { evolution, .. } => {
            if t < 0.0 {
                return Err(DynamicsError::NegativeTime(t).into());
            }
            // e^{-iHt} ρ e^{iHt} only rotates the coherence by e^{iΔt}.
            let phase = Complex64::from_polar(1.0, evolution.detuning() * t);
            let m = rho0.matrix();
            let c = m.get(0, 1) * phase;
            let out = Mat2::new([[m.get(0, 0), c], [c.conj(), m.get(1, 1)]]);
            Ok(DensityMatrix2::new(out)?)
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierConfig {
    pub probe: DensityMatrix2,
    pub horizon: f64,
    pub dt: f64,
    pub threshold: f64,
}

impl ClassifierConfig {
    /// Probe `(e₀ + e₁)/√2`, horizon `20/Re γ₋`, 400 samples, threshold 0.1.
    pub fn for_susceptibility(g: &Susceptibility) -> Self {
        Self::with_horizon_factor(g, DEFAULT_HORIZON_FACTOR, DEFAULT_THRESHOLD)
    }

    pub fn with_horizon_factor(g: &Susceptibility, factor: f64, threshold: f64) -> Self {
        let horizon = factor / g.re;
        ClassifierConfig {
            probe: DensityMatrix2::plus(),
            horizon,
            dt: horizon / DEFAULT_SAMPLES as f64,
            threshold,
        }
    }

    pub fn validate(&self) -> Result<(), StochasticError> {
        if !(self.horizon > 0.0) {
            return Err(StochasticError::Config(format!(
                "horizon must be positive, got {}",
                self.horizon
            )));
        }
        if !(self.dt > 0.0 && self.dt < self.horizon) {
            return Err(StochasticError::Config(format!(
                "need 0 < dt < horizon, got dt = {}",
                self.dt
            )));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(StochasticError::Config(format!(
                "threshold must lie in (0, 1), got {}",
                self.threshold
            )));
        }
        let p1 = self.probe.p1();
        let coherence = self.probe.coherence().norm();
        if p1 < 0.25 || coherence < 0.25 {
            return Err(StochasticError::WeakProbe { p1, coherence });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub p1: f64,
    pub coh_abs: f64,
    pub coh_phase: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DynVerdict {
    pub damped: bool,
    pub satisfiable: bool,
    pub trivially_sat: bool,
    /// Mean of `p₁` over the second half of the horizon.
    pub tail_mean: f64,
    /// Fitted decay rate of `p₁`, when damped.
    pub fitted_rate: Option<f64>,
    /// Fitted decay rate of `|ρ₀₁|`, when damped.
    pub fitted_coherence_rate: Option<f64>,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryPoint>,
}

/// Samples below this value are left out of the log-linear fits.
const FIT_FLOOR: f64 = 1e-10;

/// Least-squares slope of `ln y` against `t`, negated: the decay rate of an
/// exponential. Points with `y ≤ floor` are skipped.
pub fn fit_decay_rate(points: impl IntoIterator<Item = (f64, f64)>, floor: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .into_iter()
        .filter(|&(_, y)| y > floor)
        .map(|(t, y)| (t, y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

/// Samples the probe trajectory and decides damping vs oscillation.
pub fn classify(
    dyn_: &AdaptiveDynamics,
    cfg: &ClassifierConfig,
) -> Result<DynVerdict, StochasticError> {
    cfg.validate()?;
    let steps = (cfg.horizon / cfg.dt).round() as usize;
    // Each sample is evolved from the probe directly, never chained.
    let trajectory = (0..=steps)
        .map(|k| {
            let t = (k as f64 * cfg.dt).min(cfg.horizon);
            let rho = evolve_adaptive(dyn_, &cfg.probe, t)?;
            let c = rho.coherence();
            Ok(TrajectoryPoint {
                t,
                p1: rho.p1(),
                coh_abs: c.norm(),
                coh_phase: c.arg(),
            })
        })
        .collect::<Result<Vec<_>, StochasticError>>()?;

    let half = cfg.horizon / 2.0;
    let tail: Vec<f64> = trajectory
        .iter()
        .filter(|p| p.t >= half)
        .map(|p| p.p1)
        .collect();
    let tail_mean = tail.iter().sum::<f64>() / tail.len() as f64;
    let p1_0 = trajectory[0].p1;
    let damped = tail_mean < cfg.threshold * p1_0;
    let trivially_sat = dyn_.trivially_sat();

    let (fitted_rate, fitted_coherence_rate) = if damped {
        (
            fit_decay_rate(trajectory.iter().map(|p| (p.t, p.p1)), FIT_FLOOR),
            fit_decay_rate(trajectory.iter().map(|p| (p.t, p.coh_abs)), FIT_FLOOR),
        )
    } else {
        (None, None)
    };

    Ok(DynVerdict {
        damped,
        satisfiable: damped || trivially_sat,
        trivially_sat,
        tail_mean,
        fitted_rate,
        fitted_coherence_rate,
        trajectory,
    })
}
