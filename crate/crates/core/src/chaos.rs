//! Logistic-map amplifier.
//!
//! The success probability `q²` of the SAT circuit seeds the logistic map
//! `x ↦ a·x(1 − x)`. A nonzero seed as small as `2⁻ⁿ` is driven above `1/2`
//! within `2n` steps at `a = 3.71`, while the seed `0` is a fixed point. The
//! classical state is carried by the diagonal density matrix
//! `(1 − x)|0⟩⟨0| + x|1⟩⟨1|` and read out through `Tr(ρ P₁) = x`.

use serde::Serialize;
use thiserror::Error;

use crate::dynamics::{DensityMatrix2, Mat2};

/// Default map parameter, in the chaotic regime.
pub const DEFAULT_A: f64 = 3.71;

/// Detection threshold on `x_m`.
pub const THRESHOLD: f64 = 0.5;

#[derive(Debug, Error, PartialEq)]
pub enum ChaosError {
    #[error("map parameter a = {0} is outside [0, 4]")]
    Parameter(f64),
    #[error("x = {0} is outside [0, 1]")]
    Domain(f64),
    #[error("the lower bound (n−1)/log₂a needs a > 1, got a = {0}")]
    BoundUndefined(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LogisticParams {
    a: f64,
}

impl LogisticParams {
    pub fn new(a: f64) -> Result<Self, ChaosError> {
        if !(0.0..=4.0).contains(&a) {
            return Err(ChaosError::Parameter(a));
        }
        Ok(LogisticParams { a })
    }

    pub fn a(&self) -> f64 {
        self.a
    }
}

impl Default for LogisticParams {
    fn default() -> Self {
        LogisticParams { a: DEFAULT_A }
    }
}

#[inline]
fn step_unchecked(x: f64, a: f64) -> f64 {
    a * x * (1.0 - x)
}

pub fn logistic_step(x: f64, p: &LogisticParams) -> Result<f64, ChaosError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ChaosError::Domain(x));
    }
    Ok(step_unchecked(x, p.a))
}

/// Iterates `x₀, …, x_steps`; `hit` is the first `m` with `x_m > 1/2`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChaosTrace {
    pub xs: Vec<f64>,
    pub hit: Option<usize>,
}

pub fn iterate(x0: f64, p: &LogisticParams, steps: usize) -> Result<ChaosTrace, ChaosError> {
    if !(0.0..=1.0).contains(&x0) {
        return Err(ChaosError::Domain(x0));
    }
    let mut xs = Vec::with_capacity(steps + 1);
    let mut x = x0;
    xs.push(x);
    for _ in 0..steps {
        x = step_unchecked(x, p.a);
        xs.push(x);
    }
    let hit = xs.iter().position(|&x| x > THRESHOLD);
    Ok(ChaosTrace { xs, hit })
}

/// `diag(1 − x, x)`.
pub fn density_embedding(x: f64) -> Result<DensityMatrix2, ChaosError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(ChaosError::Domain(x));
    }
    Ok(DensityMatrix2::diagonal(x))
}

/// Amplifier readout `M = Tr(ρ P₁)` of the state embedding `x`.
pub fn expected_m(x: f64) -> Result<f64, ChaosError> {
    let rho = density_embedding(x)?;
    Ok(rho.expectation(&Mat2::p1()).re)
}

/// `(n − 1) / log₂ a`: every hit index for the seed `2⁻ⁿ` exceeds it.
pub fn theoretical_lower_bound(n: u32, a: f64) -> Result<f64, ChaosError> {
    if a <= 1.0 || a.is_nan() {
        return Err(ChaosError::BoundUndefined(a));
    }
    Ok((n as f64 - 1.0) / a.log2())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChaosVerdict {
    pub satisfiable: bool,
    pub m_hit: Option<usize>,
    /// Iteration budget `2n`.
    pub window: usize,
    pub lower_bound: Option<f64>,
    pub trace: ChaosTrace,
}

/// Runs the map for `2n` steps from `x₀ = q²`; satisfiable iff some
/// iterate exceeds `1/2`.
pub fn detect(q_squared: f64, n: u32, p: &LogisticParams) -> Result<ChaosVerdict, ChaosError> {
    let window = 2 * n as usize;
    let trace = iterate(q_squared, p, window)?;
    Ok(ChaosVerdict {
        satisfiable: trace.hit.is_some(),
        m_hit: trace.hit,
        window,
        lower_bound: theoretical_lower_bound(n, p.a).ok(),
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p() -> LogisticParams {
        LogisticParams::default()
    }

    #[test]
    fn step_examples() {
        assert_eq!(logistic_step(0.0, &p()).unwrap(), 0.0);
        assert!((logistic_step(0.5, &p()).unwrap() - 0.9275).abs() < 1e-15);
        assert_eq!(logistic_step(1.0, &p()).unwrap(), 0.0);
        assert_eq!(logistic_step(1.2, &p()), Err(ChaosError::Domain(1.2)));
        assert!(LogisticParams::new(4.5).is_err());
    }

    #[test]
    fn iterate_examples() {
        let t = iterate(1.0 / 16.0, &p(), 8).unwrap();
        assert_eq!(t.xs.len(), 9);
        assert_eq!(t.hit, Some(2));
        // Direct iteration: 3.71·(1/16)(15/16) and once more.
        let x1 = 3.71 * (1.0 / 16.0) * (15.0 / 16.0);
        assert!((t.xs[1] - x1).abs() < 1e-15);
        assert!((t.xs[1] - 0.21738).abs() < 1e-5);
        assert!((t.xs[2] - 0.63117).abs() < 1e-5);

        let t = iterate(0.0, &p(), 50).unwrap();
        assert!(t.xs.iter().all(|&x| x == 0.0));
        assert_eq!(t.hit, None);

        let t = iterate(0.6, &p(), 0).unwrap();
        assert_eq!((t.xs.len(), t.hit), (1, Some(0)));
    }

    #[test]
    fn embedding_examples() {
        let rho = density_embedding(0.0).unwrap();
        assert_eq!(rho, DensityMatrix2::ground());
        assert_eq!(expected_m(0.0).unwrap(), 0.0);
        let rho = density_embedding(0.25).unwrap();
        assert_eq!(rho.matrix().get(0, 0).re, 0.75);
        assert_eq!(expected_m(0.25).unwrap(), 0.25);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(theoretical_lower_bound(1, 3.71).unwrap(), 0.0);
        assert!((theoretical_lower_bound(10, 3.71).unwrap() - 4.758).abs() < 1e-3);
        assert_eq!(theoretical_lower_bound(21, 2.0).unwrap(), 20.0);
        assert!(theoretical_lower_bound(5, 1.0).is_err());
    }

    #[test]
    fn detect_examples() {
        let v = detect(0.0, 8, &p()).unwrap();
        assert!(!v.satisfiable && v.m_hit.is_none());
        assert_eq!(v.window, 16);

        let v = detect(0.75, 2, &p()).unwrap();
        assert_eq!((v.satisfiable, v.m_hit, v.window), (true, Some(0), 4));

        let v = detect(2f64.powi(-10), 10, &p()).unwrap();
        let m0 = v.m_hit.unwrap();
        assert!(m0 >= 5 && m0 as f64 > v.lower_bound.unwrap());
    }

    proptest! {
        #[test]
        fn step_keeps_unit_interval(x in 0.0f64..=1.0, a in 0.0f64..=4.0) {
            let y = logistic_step(x, &LogisticParams::new(a).unwrap()).unwrap();
            prop_assert!((0.0..=1.0).contains(&y));
        }

        #[test]
        fn embedding_tracks_scalar_iterates(x0 in 0.0f64..=1.0, steps in 0usize..40) {
            let t = iterate(x0, &p(), steps).unwrap();
            for &x in &t.xs {
                let rho = density_embedding(x).unwrap();
                prop_assert_eq!(expected_m(x).unwrap(), x);
                prop_assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
            }
        }
    }
}
