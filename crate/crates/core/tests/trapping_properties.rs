use henon_core::horseshoe::{horseshoe_condition, verify_covering};
use henon_core::trapping::{
    brute_force_trap_oracle, sandwich_check, theorem2_certificate, theorem2_domain, theorem3_certificate,
    theorem3_domain, AuxMaps,
};
use henon_core::{MapParams, Nonlinearity};
use proptest::prelude::*;

fn shift(n: usize, a_bound: f64) -> Vec<f64> {
    (1..n).map(|i| if i == 1 { a_bound } else { -0.5 * a_bound }).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn quadratic_certificate_passes_oracle(mu in 0.01..2.0f64, b in -0.5..0.5f64, a in 0.0..0.5f64, n in 1usize..4) {
        let a = if n == 1 { 0.0 } else { a };
        if let Ok(Some(d)) = theorem2_domain(mu, b, a) {
            let p = MapParams::new(Nonlinearity::Quadratic { mu }, b, shift(n, a)).unwrap();
            let r = brute_force_trap_oracle(&p, &d, 12, 300).unwrap();
            prop_assert!(r.passed, "{r:?}");
            prop_assert_eq!(r.escaped, 0);
            prop_assert!(sandwich_check(&p, &d, 500, 3).unwrap().passed);
        }
    }

    #[test]
    fn cubic_certificate_passes_oracle(mu in 0.01..3.0f64, b in -0.5..0.5f64, n in 1usize..3) {
        if let Ok(Some(d)) = theorem3_domain(mu, b, 0.0) {
            let p = MapParams::new(Nonlinearity::Cubic { mu }, b, shift(n, 0.0)).unwrap();
            let r = brute_force_trap_oracle(&p, &d, 12, 300).unwrap();
            prop_assert!(r.passed, "{r:?}");
            prop_assert_eq!(r.escaped, 0);
        }
    }

    #[test]
    fn gamma_consistency(mu in 0.01..3.0f64, b in -0.3..0.3f64, a in 0.0..0.4f64) {
        if let Ok(c) = theorem2_certificate(mu, b, a) {
            prop_assert!((c.gamma - c.alpha * b.abs() / (1.0 - a)).abs() <= 1e-12 * c.gamma.max(1e-300));
        }
        if let Ok(c) = theorem3_certificate(mu, b, a) {
            prop_assert!((c.gamma - c.alpha * b.abs() / (1.0 - a)).abs() <= 1e-12 * c.gamma.max(1e-300));
        }
    }

    #[test]
    fn aux_maps_differ_by_two_gamma(mu in -2.0..3.0f64, gamma in 0.0..1.0f64, x in -3.0..3.0f64) {
        let aux = AuxMaps::new(Nonlinearity::Quadratic { mu }, gamma);
        prop_assert!((aux.plus(x) - aux.minus(x) - 2.0 * gamma).abs() <= 1e-12 * (1.0 + x * x + mu.abs()));
    }

    #[test]
    fn horseshoe_condition_implies_two_crossings(mu in 2.05..6.0f64, b in 0.0..0.05f64) {
        let gamma = henon_core::horseshoe::horseshoe_gamma(mu, b, 0.0);
        if horseshoe_condition(mu, gamma).unwrap() {
            let p = MapParams::planar(Nonlinearity::Quadratic { mu }, b).unwrap();
            let r = verify_covering(&p, 8, 4000).unwrap();
            prop_assert!(r.covering_verified, "{r:?}");
            prop_assert!(r.strip_gap.unwrap() >= 0.0);
            if gamma > 0.0 {
                prop_assert!(r.strip_gap.unwrap() > 0.0);
            }
        }
    }
}

#[test]
fn cubic_factorization_identity() {
    // (p - 3)(p + 1.5)^2 = p^3 - 27/4 p - 27/4
    for k in 0..200 {
        let p = -5.0 + 0.05 * k as f64;
        let lhs = p * p * p - 6.75 * p - 6.75;
        let rhs = (p - 3.0) * (p + 1.5) * (p + 1.5);
        assert!((lhs - rhs).abs() < 1e-10 * (1.0 + lhs.abs()));
        assert_eq!(lhs < 0.0, p < 3.0 && p != -1.5);
    }
}

#[test]
fn horseshoe_degenerates_at_equality() {
    // sqrt(2 (mu + gamma)) = mu - gamma, solved for gamma at mu = 3
    let mu: f64 = 3.0;
    let g = |gamma: f64| (2.0 * (mu + gamma)).sqrt() - (mu - gamma);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    assert!(horseshoe_condition(mu, lo).unwrap());
    assert!(!horseshoe_condition(mu, hi).unwrap());
    let exact = (2.0 * (mu + hi)).sqrt();
    assert!((exact - (mu - hi)).abs() < 1e-12);
}
