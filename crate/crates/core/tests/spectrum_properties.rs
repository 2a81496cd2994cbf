use henon_core::spectrum::{char_poly_closed_form, char_poly_determinant, eigenvalues, matrix_eigenvalues};
use henon_core::{Complex64, MapParams, Nonlinearity};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn params() -> impl Strategy<Value = (MapParams, f64)> {
    (
        1usize..=10,
        -0.95..0.95f64,
        prop::collection::vec(-0.95..0.95f64, 9),
        -3.0..3.0f64,
    )
        .prop_map(|(n, b, a, fx)| {
            let p = MapParams::new(Nonlinearity::Quadratic { mu: 1.0 }, b, a[..n - 1].to_vec()).unwrap();
            (p, fx)
        })
}

fn jacobian_with(p: &MapParams, fx: f64) -> DMatrix<f64> {
    let mut j = p.jacobian_at(0.0);
    j[(0, 0)] = fx;
    j
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn closed_form_equals_determinant_recursion((p, fx) in params()) {
        let cf = char_poly_closed_form(&p, fx);
        let det = char_poly_determinant(&p, fx).unwrap();
        prop_assert_eq!(cf.coeffs.len(), det.coeffs.len());
        let scale = cf.coeffs.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in cf.coeffs.iter().zip(&det.coeffs) {
            prop_assert!((a - b).abs() <= 1e-10 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn evaluation_equals_numeric_determinant((p, fx) in params(), s in prop::collection::vec(-2.0..2.0f64, 20)) {
        let cf = char_poly_closed_form(&p, fx);
        let j = jacobian_with(&p, fx);
        let dim = j.nrows();
        let sign = if dim % 2 == 0 { 1.0 } else { -1.0 };
        for &si in &s {
            let numeric = sign * (&j - DMatrix::<f64>::identity(dim, dim) * si).determinant();
            let value = cf.eval(si);
            prop_assert!((value - numeric).abs() <= 1e-9 * numeric.abs().max(1.0), "s={si}: {value} vs {numeric}");
        }
    }

    #[test]
    fn roots_match_trace_and_determinant((p, fx) in params()) {
        let cp = char_poly_closed_form(&p, fx);
        let roots = eigenvalues(&cp);
        prop_assert_eq!(roots.len(), p.n() + 1);
        let sum: Complex64 = roots.iter().sum();
        let prod: Complex64 = roots.iter().product();
        let j = jacobian_with(&p, fx);
        prop_assert!((sum.re - j.trace()).abs() <= 1e-9 * j.trace().abs().max(1.0));
        prop_assert!(sum.im.abs() <= 1e-9);
        let sign = if p.n() % 2 == 0 { -1.0 } else { 1.0 };
        let c0 = sign * cp.coeffs[0];
        prop_assert!((prod.re - c0).abs() <= 1e-9 * c0.abs().max(1.0), "{prod} vs {c0}");
        prop_assert!((prod.re - j.determinant()).abs() <= 1e-9 * c0.abs().max(1.0));
    }

    #[test]
    fn polynomial_roots_agree_with_matrix_eigenvalues((p, fx) in params()) {
        let roots = eigenvalues(&char_poly_closed_form(&p, fx));
        let ev = matrix_eigenvalues(&jacobian_with(&p, fx));
        for r in &roots {
            let closest = ev.iter().map(|e| (e - r).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(closest < 1e-5, "root {r} has no matching eigenvalue");
        }
    }
}

#[test]
fn roots_approach_uncoupled_spectrum_monotonically() {
    for n in 1..=6 {
        let a: Vec<f64> = (1..n).map(|i| 0.7 - 0.1 * i as f64).collect();
        let fx = -1.3;
        let mut last = f64::INFINITY;
        for k in 1..=12 {
            let b = 10f64.powi(-k);
            let p = MapParams::new(Nonlinearity::Quadratic { mu: 1.0 }, b, a.clone()).unwrap();
            let roots = eigenvalues(&char_poly_closed_form(&p, fx));
            let dist = roots
                .iter()
                .map(|r| (r - fx).norm().min(r.norm()))
                .fold(0.0, f64::max);
            assert!(dist < last, "n={n} b={b}: {dist} !< {last}");
            last = dist;
        }
    }
}
