use num_bigint::BigUint;
use qsat::chaos::{
    density_embedding, detect, expected_m, iterate, theoretical_lower_bound, LogisticParams,
};

/// Fixed-point logistic orbit with `a = 371/100`, scaled by `2^BITS`.
struct ExactOrbit {
    x: BigUint,
}

const BITS: u64 = 512;

impl ExactOrbit {
    fn from_power(n: u32, k: u64) -> Self {
        ExactOrbit {
            x: BigUint::from(k) << (BITS - n as u64),
        }
    }

    fn one() -> BigUint {
        BigUint::from(1u8) << BITS
    }

    fn step(&mut self) {
        let one = Self::one();
        self.x = (&self.x * (&one - &self.x) * 371u32 / 100u32) >> BITS;
    }

    fn above_half(&self) -> bool {
        self.x > (Self::one() >> 1)
    }

    fn to_f64(&self) -> f64 {
        let shift = BITS - 60;
        let top: BigUint = &self.x >> shift;
        top.to_u64_digits().first().copied().unwrap_or(0) as f64 / (1u64 << 60) as f64
    }
}

fn exact_first_hit(n: u32, k: u64, window: usize) -> Option<usize> {
    let mut orbit = ExactOrbit::from_power(n, k);
    for m in 0..=window {
        if orbit.above_half() {
            return Some(m);
        }
        orbit.step();
    }
    None
}

#[test]
fn float_hits_match_extended_precision() {
    let p = LogisticParams::default();
    for n in 2..=20u32 {
        let v = detect(2f64.powi(-(n as i32)), n, &p).unwrap();
        assert_eq!(v.m_hit, exact_first_hit(n, 1, 2 * n as usize), "n = {n}");
    }
}

#[test]
fn float_orbit_tracks_extended_precision_up_to_the_hit() {
    let p = LogisticParams::default();
    for n in 18..=20u32 {
        let trace = iterate(2f64.powi(-(n as i32)), &p, 2 * n as usize).unwrap();
        let m0 = trace.hit.unwrap();
        let mut orbit = ExactOrbit::from_power(n, 1);
        for m in 0..=m0 {
            let exact = orbit.to_f64();
            assert!(
                (trace.xs[m] - exact).abs() <= 1e-12 * exact.max(1e-300),
                "n = {n}, m = {m}: {} vs {exact}",
                trace.xs[m]
            );
            orbit.step();
        }
    }
}

#[test]
fn hit_indices_respect_both_bounds() {
    let p = LogisticParams::default();
    for n in 2..=20u32 {
        let v = detect(2f64.powi(-(n as i32)), n, &p).unwrap();
        let m0 = v.m_hit.expect("hit within 2n");
        assert!(m0 <= 2 * n as usize);
        assert!(m0 as f64 > theoretical_lower_bound(n, p.a()).unwrap());
    }
}

#[test]
fn k_needles_hit_within_window_in_both_precisions() {
    let p = LogisticParams::default();
    for n in 4..=16u32 {
        for k in 1..=15u64 {
            let q2 = k as f64 / (1u64 << n) as f64;
            let v = detect(q2, n, &p).unwrap();
            assert!(v.satisfiable, "k = {k}, n = {n}");
            assert_eq!(v.m_hit, exact_first_hit(n, k, 2 * n as usize));
        }
    }
}

#[test]
fn zero_orbit_is_exactly_zero() {
    let t = iterate(0.0, &LogisticParams::default(), 1000).unwrap();
    assert!(t.xs.iter().all(|&x| x.to_bits() == 0));
}

#[test]
fn embedding_readout_reproduces_iterates() {
    let t = iterate(2f64.powi(-12), &LogisticParams::default(), 24).unwrap();
    for &x in &t.xs {
        assert_eq!(expected_m(x).unwrap(), x);
        assert_eq!(density_embedding(x).unwrap().p1(), x);
    }
}
