mod common;

use num_complex::Complex64;
use qsat::dynamics::{
    evolve, expm_superop, heisenberg_evolve, trace_distance, DensityMatrix2, DynamicsError, Mat2,
};
use qsat::stochastic::{
    damping_generator, damping_generator_with, effective_hamiltonian, evolve_adaptive,
    fit_decay_rate, AdaptiveDynamics, GeneratorForm, Susceptibility, TwoLevelHamiltonian,
};
use rand::Rng;

fn gamma_grid() -> Vec<Susceptibility> {
    let mut out = Vec::new();
    for re in [0.1, 1.0, 10.0] {
        for im in [-1.0, 0.0, 1.0] {
            out.push(Susceptibility::new(re, im).unwrap());
        }
    }
    out
}

fn random_density<R: Rng>(rng: &mut R) -> DensityMatrix2 {
    // Bloch vector inside the unit ball.
    loop {
        let (x, y, z): (f64, f64, f64) = (
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        if x * x + y * y + z * z <= 1.0 {
            let m = Mat2::new([
                [
                    Complex64::new((1.0 + z) / 2.0, 0.0),
                    Complex64::new(x, -y) / 2.0,
                ],
                [
                    Complex64::new(x, y) / 2.0,
                    Complex64::new((1.0 - z) / 2.0, 0.0),
                ],
            ]);
            return DensityMatrix2::new(m).unwrap();
        }
    }
}

fn random_hermitian<R: Rng>(rng: &mut R) -> Mat2 {
    let off = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
    Mat2::new([
        [Complex64::new(rng.gen_range(-1.0..1.0), 0.0), off],
        [off.conj(), Complex64::new(rng.gen_range(-1.0..1.0), 0.0)],
    ])
}

#[test]
fn damping_trajectories_stay_physical() {
    let mut rng = common::rng(31);
    for g in gamma_grid() {
        let gen = damping_generator(g);
        for _ in 0..5 {
            let rho0 = random_density(&mut rng);
            for k in 0..=100 {
                let t = 0.5 * k as f64;
                let rho = evolve(&gen.l_star, &rho0, t).unwrap();
                let m = rho.matrix();
                assert!((m.trace().re - 1.0).abs() < 1e-8 && m.trace().im.abs() < 1e-8);
                assert!(m.is_hermitian(1e-8));
                assert!(rho.eigenvalues().iter().all(|&l| l >= -1e-8));
            }
        }
    }
}

#[test]
fn expm_agrees_with_closed_form() {
    let mut rng = common::rng(32);
    for g in gamma_grid() {
        let gen = damping_generator(g);
        let exact = gen.closed_form();
        for _ in 0..10 {
            let rho0 = random_density(&mut rng);
            let t = rng.gen_range(0.0..5.0) / g.re();
            let a = evolve(&gen.l_star, &rho0, t).unwrap();
            assert!(trace_distance(&a, &exact.at(&rho0, t)) < 1e-10);
        }
    }
}

#[test]
fn semigroup_law() {
    let mut rng = common::rng(33);
    for g in gamma_grid() {
        let l = damping_generator(g).l_star;
        let s = rng.gen_range(0.0..2.0);
        let t = rng.gen_range(0.0..2.0);
        let lhs = expm_superop(&l, s + t).unwrap();
        let rhs = expm_superop(&l, s).unwrap().matrix() * expm_superop(&l, t).unwrap().matrix();
        assert!((lhs.matrix() - rhs).iter().all(|z| z.norm() < 1e-10));
    }
}

#[test]
fn convergence_to_ground_state_fits_expected_exponent() {
    for g in gamma_grid() {
        let gen = damping_generator(g);
        let ground = DensityMatrix2::ground();
        // Coherent probe: the coherence dominates late times, rate Re γ.
        // Population-only probe: rate 2 Re γ.
        for (probe, rate) in [
            (DensityMatrix2::plus(), g.re()),
            (DensityMatrix2::excited(), 2.0 * g.re()),
        ] {
            let pts = (0..=100).map(|k| {
                let t = (5.0 + 0.1 * k as f64) / g.re();
                let rho = evolve(&gen.l_star, &probe, t).unwrap();
                (t, trace_distance(&rho, &ground))
            });
            let fitted = fit_decay_rate(pts, 1e-12).unwrap();
            assert!(
                (fitted / rate - 1.0).abs() < 0.02,
                "γ = {g:?}: {fitted} vs {rate}"
            );
        }
    }
}

#[test]
fn heisenberg_schrodinger_duality() {
    let mut rng = common::rng(34);
    for g in gamma_grid() {
        let gen = damping_generator(g);
        for _ in 0..20 {
            let rho = random_density(&mut rng);
            let x = random_hermitian(&mut rng);
            let t = rng.gen_range(0.0..10.0);
            let lhs = (evolve(&gen.l_star, &rho, t).unwrap().matrix() * x).trace();
            let rhs = (rho.matrix() * heisenberg_evolve(&gen.l_heis, &x, t).unwrap()).trace();
            assert!((lhs - rhs).norm() < 1e-8);
        }
    }
}

#[test]
fn unnormalized_generator_is_rejected_by_evolve() {
    let gen = damping_generator_with(Susceptibility::default(), GeneratorForm::Unnormalized);
    assert!(matches!(
        evolve(&gen.l_star, &DensityMatrix2::excited(), 1.0),
        Err(DynamicsError::NotTracePreserving { .. })
    ));
}

#[test]
fn coherent_case_conserves_purity_and_is_periodic() {
    let mut rng = common::rng(35);
    for (e0, e1) in [(0.0, 2.0), (0.0, 3.0), (1.0, 5.0), (-2.0, 4.0)] {
        let h = TwoLevelHamiltonian::new(e0, e1).unwrap();
        let ev = effective_hamiltonian(&h);
        let period = ev.period.unwrap();
        let dyn_ = AdaptiveDynamics::Coherent {
            evolution: ev,
            trivially_sat: false,
        };
        for _ in 0..5 {
            let rho0 = random_density(&mut rng);
            for k in 0..=40 {
                let t = 0.37 * k as f64;
                let a = evolve_adaptive(&dyn_, &rho0, t).unwrap();
                let b = evolve_adaptive(&dyn_, &rho0, t + period).unwrap();
                assert!(trace_distance(&a, &b) < 1e-9);
                assert!((a.purity() - rho0.purity()).abs() < 1e-10);
                assert!((a.coherence().norm() - rho0.coherence().norm()).abs() < 1e-9);
                assert!((a.p1() - rho0.p1()).abs() < 1e-12);
            }
        }
    }
}
