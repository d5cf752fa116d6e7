//! Two-level open-system substrate: 2×2 operators, density matrices,
//! superoperators on their vectorization, semigroup exponentials and
//! spectra.
//!
//! Vectorization is column stacking: `vec(ρ) = (ρ₀₀, ρ₁₀, ρ₀₁, ρ₁₁)`.
//! Superoperators should be built through [`Superoperator::from_map`] so the
//! convention lives in one place.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix4, Schur, Vector4};
use num_complex::Complex64;
use thiserror::Error;

/// Eigenvalues below this modulus count as zero modes.
pub const ZERO_MODE_TOLERANCE: f64 = 1e-10;

const HERMITIAN_TOLERANCE: f64 = 1e-12;
const TRACE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues in `[-NEGATIVITY_FLOOR, 0)` are clamped to zero; anything more
/// negative is reported as an error.
const NEGATIVITY_FLOOR: f64 = 1e-10;
const TRACE_PRESERVATION_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, PartialEq)]
pub enum DynamicsError {
    #[error("evolution time must be non-negative, got {0}")]
    NegativeTime(f64),
    #[error("generator {label:?} is not trace preserving (column trace defect {defect:e})")]
    NotTracePreserving { label: String, defect: f64 },
    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),
    #[error("evolved state has eigenvalue {0:e} below the positivity floor")]
    Negativity(f64),
    #[error("eigenvalue computation did not converge")]
    NoConvergence,
}

#[inline]
fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A 2×2 complex matrix, row-major `[[a, b], [c, d]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[Complex64; 2]; 2]);

impl Mat2 {
    pub const fn new(m: [[Complex64; 2]; 2]) -> Self {
        Mat2(m)
    }

    pub fn zero() -> Self {
        Mat2([[cx(0.0, 0.0); 2]; 2])
    }

    pub fn identity() -> Self {
        Self::diag(cx(1.0, 0.0), cx(1.0, 0.0))
    }

    pub fn diag(a: Complex64, d: Complex64) -> Self {
        Mat2([[a, cx(0.0, 0.0)], [cx(0.0, 0.0), d]])
    }

    pub fn real(m: [[f64; 2]; 2]) -> Self {
        Mat2([
            [cx(m[0][0], 0.0), cx(m[0][1], 0.0)],
            [cx(m[1][0], 0.0), cx(m[1][1], 0.0)],
        ])
    }

    /// Matrix unit `|i⟩⟨j|`.
    pub fn unit(i: usize, j: usize) -> Self {
        let mut m = Self::zero();
        m.0[i][j] = cx(1.0, 0.0);
        m
    }

    /// `|e₀⟩⟨e₀|`
    pub fn p0() -> Self {
        Self::unit(0, 0)
    }

    /// `|e₁⟩⟨e₁|`
    pub fn p1() -> Self {
        Self::unit(1, 1)
    }

    /// Lowering operator `D = |e₀⟩⟨e₁|`.
    pub fn lowering() -> Self {
        Self::unit(0, 1)
    }

    pub fn sigma_z() -> Self {
        Self::real([[1.0, 0.0], [0.0, -1.0]])
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.0[i][j]
    }

    pub fn dagger(&self) -> Self {
        let m = &self.0;
        Mat2([
            [m[0][0].conj(), m[1][0].conj()],
            [m[0][1].conj(), m[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> Complex64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let m = &self.0;
        Mat2([[m[0][0] * s, m[0][1] * s], [m[1][0] * s, m[1][1] * s]])
    }

    /// Largest entry-wise modulus.
    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        (*self - self.dagger()).max_abs() <= tol
    }

    /// Column-stacked vectorization.
    pub fn vec(&self) -> Vector4<Complex64> {
        let m = &self.0;
        Vector4::new(m[0][0], m[1][0], m[0][1], m[1][1])
    }

    pub fn unvec(v: &Vector4<Complex64>) -> Self {
        Mat2([[v[0], v[2]], [v[1], v[3]]])
    }

    /// Eigenvalues of a hermitian matrix, ascending.
    fn hermitian_eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let b = self.0[0][1];
        let mid = 0.5 * (a + d);
        let rad = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
        [mid - rad, mid + rad]
    }
}

impl Add for Mat2 {
    type Output = Mat2;
    fn add(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        Mat2([
            [a[0][0] + b[0][0], a[0][1] + b[0][1]],
            [a[1][0] + b[1][0], a[1][1] + b[1][1]],
        ])
    }
}

impl Sub for Mat2 {
    type Output = Mat2;
    fn sub(self, o: Mat2) -> Mat2 {
        self + (-o)
    }
}

impl Neg for Mat2 {
    type Output = Mat2;
    fn neg(self) -> Mat2 {
        self.scale(cx(-1.0, 0.0))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;
    fn mul(self, o: Mat2) -> Mat2 {
        let (a, b) = (&self.0, &o.0);
        let e = |i: usize, j: usize| a[i][0] * b[0][j] + a[i][1] * b[1][j];
        Mat2([[e(0, 0), e(0, 1)], [e(1, 0), e(1, 1)]])
    }
}

impl Mul<Mat2> for Complex64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(self)
    }
}

impl Mul<Mat2> for f64 {
    type Output = Mat2;
    fn mul(self, m: Mat2) -> Mat2 {
        m.scale(cx(self, 0.0))
    }
}

/// `[a, b] = ab − ba`
pub fn commutator(a: Mat2, b: Mat2) -> Mat2 {
    a * b - b * a
}

/// `{a, b} = ab + ba`
pub fn anticommutator(a: Mat2, b: Mat2) -> Mat2 {
    a * b + b * a
}

/// A 2×2 density matrix: hermitian, unit trace, positive semidefinite.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DensityMatrix2(Mat2);

impl DensityMatrix2 {
    pub fn new(m: Mat2) -> Result<Self, DynamicsError> {
        if !m.is_hermitian(HERMITIAN_TOLERANCE) {
            return Err(DynamicsError::NotDensityMatrix("not hermitian".into()));
        }
        let tr = m.trace();
        if (tr - 1.0).norm() > TRACE_TOLERANCE {
            return Err(DynamicsError::NotDensityMatrix(format!("trace {tr}")));
        }
        let [lo, _] = m.hermitian_eigenvalues();
        if lo < -NEGATIVITY_FLOOR {
            return Err(DynamicsError::NotDensityMatrix(format!(
                "negative eigenvalue {lo:e}"
            )));
        }
        Ok(DensityMatrix2(m))
    }

    /// `|ψ⟩⟨ψ|` for `ψ = α₀e₀ + α₁e₁`, normalized first.
    pub fn pure(alpha0: Complex64, alpha1: Complex64) -> Self {
        let norm = (alpha0.norm_sqr() + alpha1.norm_sqr()).sqrt();
        let (a, b) = (alpha0 / norm, alpha1 / norm);
        DensityMatrix2(Mat2([
            [a * a.conj(), a * b.conj()],
            [b * a.conj(), b * b.conj()],
        ]))
    }

    /// `(1 − p₁)|e₀⟩⟨e₀| + p₁|e₁⟩⟨e₁|`; panics unless `p₁ ∈ [0, 1]`.
    pub fn diagonal(p1: f64) -> Self {
        assert!((0.0..=1.0).contains(&p1), "population {p1} outside [0, 1]");
        DensityMatrix2(Mat2::diag(cx(1.0 - p1, 0.0), cx(p1, 0.0)))
    }

    pub fn ground() -> Self {
        Self::diagonal(0.0)
    }

    pub fn excited() -> Self {
        Self::diagonal(1.0)
    }

    /// `(e₀ + e₁)/√2`
    pub fn plus() -> Self {
        Self::pure(cx(1.0, 0.0), cx(1.0, 0.0))
    }

    pub fn matrix(&self) -> Mat2 {
        self.0
    }

    /// Population `⟨e₁|ρ|e₁⟩`.
    pub fn p1(&self) -> f64 {
        self.0 .0[1][1].re
    }

    /// Coherence `ρ₀₁ = ⟨e₀|ρ|e₁⟩`.
    pub fn coherence(&self) -> Complex64 {
        self.0 .0[0][1]
    }

    pub fn purity(&self) -> f64 {
        (self.0 * self.0).trace().re
    }

    /// `Tr(ρ x)`
    pub fn expectation(&self, x: &Mat2) -> Complex64 {
        (self.0 * *x).trace()
    }

    pub fn eigenvalues(&self) -> [f64; 2] {
        self.0.hermitian_eigenvalues()
    }

    /// Restores exact hermiticity and unit trace, clamping eigenvalues in
    /// `[-1e-10, 0)` to zero.
    fn project(m: Mat2) -> Result<Self, DynamicsError> {
        let h = 0.5 * (m + m.dagger());
        let tr = h.trace().re;
        let mut h = h.scale(cx(1.0 / tr, 0.0));
        let [lo, _] = h.hermitian_eigenvalues();
        if lo < -NEGATIVITY_FLOOR {
            return Err(DynamicsError::Negativity(lo));
        }
        if lo < 0.0 {
            // Remove the negative eigencomponent: ρ − λ|v⟩⟨v| has
            // eigenvalues (0, 1 − λ); renormalize.
            let v = eigenvector(&h, lo);
            let proj = Mat2([
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ]);
            h = (h - lo * proj).scale(cx(1.0 / (1.0 - lo), 0.0));
            h.0[0][0].im = 0.0;
            h.0[1][1].im = 0.0;
        }
        Ok(DensityMatrix2(h))
    }
}

/// Unit eigenvector of a hermitian 2×2 matrix for eigenvalue `lambda`.
fn eigenvector(h: &Mat2, lambda: f64) -> [Complex64; 2] {
    let a = h.0[0][0].re - lambda;
    let b = h.0[0][1];
    let d = h.0[1][1].re - lambda;
    // Rows of (h − λ) are orthogonal to v; use the better-conditioned one.
    let v = if a.abs() + b.norm() >= d.abs() + b.norm() && b.norm() + a.abs() > 0.0 {
        [-b, cx(a, 0.0)]
    } else if b.norm() + d.abs() > 0.0 {
        [cx(d, 0.0), -b.conj()]
    } else {
        [cx(1.0, 0.0), cx(0.0, 0.0)]
    };
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

impl fmt::Display for DensityMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = &self.0 .0;
        write!(
            f,
            "[[{:.6}, {:.6}], [{:.6}, {:.6}]]",
            m[0][0], m[0][1], m[1][0], m[1][1]
        )
    }
}

/// Linear map on 2×2 matrices, stored as a 4×4 matrix acting on `vec(·)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Superoperator {
    label: String,
    matrix: Matrix4<Complex64>,
}

impl Superoperator {
    /// Tabulates a linear map by its action on the matrix units.
    pub fn from_map<F: Fn(Mat2) -> Mat2>(label: impl Into<String>, f: F) -> Self {
        let mut matrix = Matrix4::zeros();
        for col in 0..4 {
            // Column `col` of the superoperator is vec(f(E)) with
            // vec(E) = basis vector `col`.
            let e = Mat2::unit(col % 2, col / 2);
            matrix.set_column(col, &f(e).vec());
        }
        Superoperator {
            label: label.into(),
            matrix,
        }
    }

    pub fn from_matrix(label: impl Into<String>, matrix: Matrix4<Complex64>) -> Self {
        Superoperator {
            label: label.into(),
            matrix,
        }
    }

    pub fn zero(label: impl Into<String>) -> Self {
        Self::from_matrix(label, Matrix4::zeros())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Mat2) -> Mat2 {
        Mat2::unvec(&(self.matrix * x.vec()))
    }

    /// Largest `|Tr L(E_ij)|` over matrix units; zero for a trace-preserving
    /// generator.
    pub fn trace_defect(&self) -> f64 {
        (0..4)
            .map(|c| (self.matrix[(0, c)] + self.matrix[(3, c)]).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_defect() <= TRACE_PRESERVATION_TOLERANCE
    }

    /// `exp(tL)` as a superoperator.
    pub fn exp(&self, t: f64) -> Result<Superoperator, DynamicsError> {
        expm_superop(self, t)
    }
}

fn norm1(m: &Matrix4<Complex64>) -> f64 {
    (0..4)
        .map(|c| m.column(c).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `exp(tL)` by scaling and squaring of a truncated Taylor series.
///
/// The argument is scaled to 1-norm ≤ 1/2 and the series is summed until
/// terms fall below machine precision relative to the partial sum, then
/// squared back.
pub fn expm_superop(l: &Superoperator, t: f64) -> Result<Superoperator, DynamicsError> {
    if t < 0.0 || t.is_nan() {
        return Err(DynamicsError::NegativeTime(t));
    }
    let a = l.matrix * cx(t, 0.0);
    let norm = norm1(&a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let a = a * cx((-(squarings as f64)).exp2(), 0.0);
    let mut sum = Matrix4::<Complex64>::identity();
    let mut term = Matrix4::<Complex64>::identity();
    for k in 1..=30 {
        term = term * a * cx(1.0 / k as f64, 0.0);
        sum += term;
        if norm1(&term) <= f64::EPSILON * 1e-2 * norm1(&sum) {
            break;
        }
    }
    for _ in 0..squarings {
        sum = sum * sum;
    }
    Ok(Superoperator {
        label: format!("exp({t}·{})", l.label),
        matrix: sum,
    })
}

/// Schrödinger-picture evolution `ρ ↦ exp(tL)ρ` of a trace-preserving
/// generator, re-projected onto the density matrices.
pub fn evolve(
    l: &Superoperator,
    rho: &DensityMatrix2,
    t: f64,
) -> Result<DensityMatrix2, DynamicsError> {
    if !l.is_trace_preserving() {
        return Err(DynamicsError::NotTracePreserving {
            label: l.label.clone(),
            defect: l.trace_defect(),
        });
    }
    let m = expm_superop(l, t)?.apply(&rho.0);
    DensityMatrix2::project(m)
}

/// Heisenberg-picture evolution `x ↦ exp(tL_H)x` of an observable.
pub fn heisenberg_evolve(l_heis: &Superoperator, x: &Mat2, t: f64) -> Result<Mat2, DynamicsError> {
    Ok(expm_superop(l_heis, t)?.apply(x))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    /// Sorted by descending real part, then descending imaginary part.
    pub eigenvalues: Vec<Complex64>,
    pub zero_modes: usize,
    /// Smallest `|Re λ|` among the non-zero eigenvalues.
    pub gap: Option<f64>,
}

pub fn spectrum(l: &Superoperator) -> Result<Spectrum, DynamicsError> {
    let schur = Schur::try_new(l.matrix, 1e-15, 10_000).ok_or(DynamicsError::NoConvergence)?;
    let (_, t) = schur.unpack();
    let mut eigenvalues: Vec<Complex64> = (0..4).map(|i| t[(i, i)]).collect();
    eigenvalues.sort_by(|a, b| b.re.total_cmp(&a.re).then(b.im.total_cmp(&a.im)));
    let zero_modes = eigenvalues
        .iter()
        .filter(|z| z.norm() < ZERO_MODE_TOLERANCE)
        .count();
    let gap = eigenvalues
        .iter()
        .filter(|z| z.norm() >= ZERO_MODE_TOLERANCE)
        .map(|z| z.re.abs())
        .min_by(f64::total_cmp);
    Ok(Spectrum {
        eigenvalues,
        zero_modes,
        gap,
    })
}

/// `½ Σ |λᵢ(a − b)|`
pub fn trace_distance(a: &DensityMatrix2, b: &DensityMatrix2) -> f64 {
    let [l0, l1] = (a.0 - b.0).hermitian_eigenvalues();
    0.5 * (l0.abs() + l1.abs())
}

/// Closed-form solution of a generator that relaxes to `|e₀⟩⟨e₀|` with
/// decoupled populations and coherences:
/// `p₁(t) = p₁(0)e^{−Γt}`, `ρ₀₁(t) = ρ₀₁(0)e^{κt}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelaxationSolution {
    /// Population decay rate Γ.
    pub population_rate: f64,
    /// Complex coherence exponent κ (negative real part).
    pub coherence_exponent: Complex64,
}

impl RelaxationSolution {
    pub fn at(&self, rho0: &DensityMatrix2, t: f64) -> DensityMatrix2 {
        let p1 = rho0.p1() * (-self.population_rate * t).exp();
        let c = rho0.coherence() * (self.coherence_exponent * t).exp();
        DensityMatrix2(Mat2([[cx(1.0 - p1, 0.0), c], [c.conj(), cx(p1, 0.0)]]))
    }
}
