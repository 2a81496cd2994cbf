use henon_core::orbits::{
    continue_in_b, default_interval, find_1d_orbits, multiplier_track, structural_stability, track_continuity,
    ORBIT_TOLERANCE,
};
use henon_core::spectrum::{cycle_residual, eigenvalues, matrix_char_poly, matrix_eigenvalues, orbit_multipliers};
use henon_core::{MapParams, Nonlinearity};

fn quadratic_orbits(mu: f64, period_max: usize, n: usize) -> Vec<henon_core::PeriodicOrbit> {
    let f = Nonlinearity::Quadratic { mu };
    find_1d_orbits(&f, period_max, default_interval(&f), n).unwrap()
}

#[test]
fn every_orbit_closes_and_has_minimal_period() {
    for &mu in &[0.9, 1.2, 1.4, 1.9] {
        let f = Nonlinearity::Quadratic { mu };
        let p0 = MapParams::planar(f.clone(), 0.0).unwrap();
        for o in quadratic_orbits(mu, 8, 1) {
            assert_eq!(o.points.len(), o.period);
            assert!(cycle_residual(&p0, &o.points).unwrap() < ORBIT_TOLERANCE);
            let x0 = o.points[0].x;
            for d in (1..o.period).filter(|d| o.period % d == 0) {
                let xd = (0..d).fold(x0, |x, _| f.eval(x));
                assert!((xd - x0).abs() > 1e-9, "mu={mu} period {} repeats after {d}", o.period);
            }
        }
    }
}

#[test]
fn continued_orbits_close_and_keep_consistent_multipliers() {
    for &mu in &[0.9, 1.2, 1.4] {
        let f = Nonlinearity::Quadratic { mu };
        let p0 = MapParams::new(f, 0.0, vec![0.3]).unwrap();
        for o in quadratic_orbits(mu, 4, 2).iter().filter(|o| structural_stability(o)) {
            let hist = continue_in_b(&p0, o, 1e-3, 5).unwrap();
            for h in &hist[1..] {
                let p = p0.with_b(h.b_value).unwrap();
                assert!(cycle_residual(&p, &h.points).unwrap() < ORBIT_TOLERANCE);
                for (a, b) in h.points.iter().zip(&o.points) {
                    assert!((a.x - b.x).abs() < 10.0 * h.b_value);
                }
                let m = orbit_multipliers(&p, &h.points).unwrap();
                let from_poly = eigenvalues(&henon_core::CharPoly {
                    coeffs: matrix_char_poly(&m.monodromy).into_coeffs(),
                    built_from: henon_core::spectrum::Construction::Determinant,
                });
                let direct = matrix_eigenvalues(&m.monodromy);
                for r in &from_poly {
                    let closest = direct.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
                    assert!(closest < 1e-8, "mu={mu}: {r} vs {direct:?}");
                }
            }
        }
    }
}

#[test]
fn multiplier_track_is_continuous() {
    let f = Nonlinearity::Quadratic { mu: 1.2 };
    let p0 = MapParams::planar(f, 0.0).unwrap();
    for o in quadratic_orbits(1.2, 2, 1).iter().filter(|o| structural_stability(o)) {
        // the stable 2-cycle at mu = 1.2 flips near b = 0.035
        let hist = continue_in_b(&p0, o, 0.03, 25).unwrap();
        let rows = multiplier_track(&hist);
        assert_eq!(rows.len(), 26);
        assert_eq!(rows[0].moduli[0], o.m_x.abs());
        assert!(rows[0].moduli[1..].iter().all(|m| *m == 0.0));
        let c = track_continuity(&rows[1..]);
        assert!(c.max_ratio <= 10.0, "{c:?}");
    }
}
