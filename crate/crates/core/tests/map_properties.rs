use henon_core::map::manhattan_norm;
use henon_core::{MapParams, Nonlinearity, Polynomial, State};
use proptest::prelude::*;

fn nonlinearity() -> impl Strategy<Value = Nonlinearity> {
    prop_oneof![
        (-1.0..3.0f64).prop_map(|mu| Nonlinearity::Quadratic { mu }),
        (-1.0..4.0f64).prop_map(|mu| Nonlinearity::Cubic { mu }),
        prop::collection::vec(-2.0..2.0f64, 2..6).prop_map(|mut c| {
            let last = c.len() - 1;
            if c[last].abs() < 0.1 {
                c[last] = 1.0;
            }
            Nonlinearity::Polynomial { coeffs: c }
        }),
    ]
}

fn params() -> impl Strategy<Value = MapParams> {
    (
        nonlinearity(),
        -0.99..0.99f64,
        prop::collection::vec(-0.99..0.99f64, 0..6),
    )
        .prop_map(|(f, b, a)| MapParams::new(f, b, a).unwrap())
}

fn params_and_state() -> impl Strategy<Value = (MapParams, State)> {
    params().prop_flat_map(|p| {
        let n = p.n();
        (
            Just(p),
            (-2.0..2.0f64, prop::collection::vec(-1.0..1.0f64, n)).prop_map(|(x, y)| State::new(x, y)),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn jacobian_matches_central_differences((p, s) in params_and_state()) {
        let h = 1e-6;
        let dim = p.n() + 1;
        let j = p.jacobian_at(s.x);
        let base = s.to_vec();
        for c in 0..dim {
            let mut plus = base.clone();
            let mut minus = base.clone();
            plus[c] += h;
            minus[c] -= h;
            let sp = p.step(&State::new(plus[0], plus[1..].to_vec())).unwrap().to_vec();
            let sm = p.step(&State::new(minus[0], minus[1..].to_vec())).unwrap().to_vec();
            for r in 0..dim {
                let fd = (sp[r] - sm[r]) / (2.0 * h);
                let exact = j[(r, c)];
                let scale = exact.abs().max(1.0);
                prop_assert!((fd - exact).abs() <= 1e-5 * scale, "entry ({r},{c}): fd {fd} vs {exact}");
            }
        }
    }

    #[test]
    fn y_norm_contracts_outside_the_ball(
        (p, s) in params_and_state(),
        alpha in 0.1..3.0f64,
        t in 0.0..0.999f64,
        stretch in 1.0001..5.0f64,
    ) {
        let a = p.a_bound();
        let threshold = alpha * p.b().abs() / (1.0 - a);
        let x = alpha * (2.0 * t - 1.0);
        let norm = s.y_norm();
        prop_assume!(norm > 0.0);
        let target = threshold.max(1e-12) * stretch;
        let y: Vec<f64> = s.y.iter().map(|v| v * target / norm).collect();
        let next = p.step(&State::new(x, y.clone())).unwrap();
        prop_assert!(next.y_norm() < manhattan_norm(&y));
    }

    #[test]
    fn y_image_norm_bound((p, s) in params_and_state()) {
        let next = p.step(&s).unwrap();
        let bound = p.b().abs() * s.x.abs() + p.a_bound() * s.y_norm();
        prop_assert!(next.y_norm() <= bound * (1.0 + 1e-15) + 1e-300);
    }

    #[test]
    fn uncoupled_y_collapses_in_n_steps((p, s) in params_and_state()) {
        let p = p.with_b(0.0).unwrap();
        let n = p.n();
        let orbit = p.iterate(&s, n).unwrap();
        prop_assert!(orbit[n].y.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn named_forms_round_trip_through_polynomials(mu in -3.0..3.0f64, x in -10.0..10.0f64, cubic in any::<bool>()) {
        let f = if cubic { Nonlinearity::Cubic { mu } } else { Nonlinearity::Quadratic { mu } };
        let poly = f.to_polynomial();
        prop_assert_eq!(f.eval(x), poly.eval(x));
        prop_assert_eq!(Nonlinearity::from_polynomial(&poly), f);
    }

    #[test]
    fn polynomial_nonlinearity_matches_polynomial(c in prop::collection::vec(-3.0..3.0f64, 1..8), x in -3.0..3.0f64) {
        let f = Nonlinearity::Polynomial { coeffs: c.clone() };
        prop_assert_eq!(f.eval(x), Polynomial::new(c).eval(x));
    }
}

#[test]
fn thousand_point_round_trip() {
    for (i, f) in [Nonlinearity::Quadratic { mu: 1.4 }, Nonlinearity::Cubic { mu: 2.0 }]
        .iter()
        .enumerate()
    {
        let poly = f.to_polynomial();
        for k in 0..1000 {
            let x = -5.0 + 10.0 * (k as f64 + 0.5 * i as f64) / 1000.0;
            assert_eq!(f.eval(x), poly.eval(x));
        }
    }
}
