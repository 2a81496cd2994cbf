//! Characteristic polynomial of the Jacobian, its roots, and periodic-orbit
//! multipliers.
//!
//! The polynomial is stored monic, `q(s) = det(sI - J)`, lowest degree first.
//! It is built two ways: from the closed-form solution of the cofactor
//! recursion, and by running that recursion over polynomial coefficients.

use crate::error::{HenonError, Result};
use crate::map::{MapParams, State};
use crate::poly::Polynomial;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

/// Largest matrix size accepted by [`char_poly_determinant`].
pub const MAX_DETERMINANT_SIZE: usize = 64;

/// Closure residual accepted by [`orbit_multipliers`].
pub const CYCLE_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Construction {
    ClosedForm,
    Determinant,
}

/// Monic characteristic polynomial of degree `n + 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharPoly {
    /// Lowest degree first; the last entry is the leading 1.
    pub coeffs: Vec<f64>,
    pub built_from: Construction,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, s: f64) -> f64 {
        self.polynomial().eval(s)
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }
}

/// `s^{n-1}(s^2 - f' s - b) - b (a_1 s^{n-2} + a_1 a_2 s^{n-3} + .. + a_1..a_{n-1})`
pub fn char_poly_closed_form(p: &MapParams, fx_prime: f64) -> CharPoly {
    let n = p.n();
    let b = p.b();
    let mut coeffs = vec![0.0; n + 2];
    coeffs[n + 1] = 1.0;
    coeffs[n] = -fx_prime;
    coeffs[n - 1] = -b;
    let mut prod = 1.0;
    for (l, al) in p.a().iter().enumerate() {
        prod *= al;
        // term k = l + 3 has degree n - k + 1 = n - 2 - l
        coeffs[n - 2 - l] -= b * prod;
    }
    CharPoly {
        coeffs,
        built_from: Construction::ClosedForm,
    }
}

/// Runs `D_{m+1} = (-1)^m b a_1..a_{m-1} - s D_m` from
/// `D_2 = s^2 - f' s - b` over exact polynomial coefficients and normalizes
/// `(-1)^{n+1} D_{n+1}` to the monic form.
pub fn char_poly_determinant(p: &MapParams, fx_prime: f64) -> Result<CharPoly> {
    let n = p.n();
    if n + 1 > MAX_DETERMINANT_SIZE {
        return Err(HenonError::DimensionBound {
            size: n + 1,
            max: MAX_DETERMINANT_SIZE,
        });
    }
    let b = p.b();
    let mut delta = Polynomial::new(vec![-b, -fx_prime, 1.0]);
    let mut prod = 1.0;
    for m in 2..=n {
        if m >= 2 {
            // product a_1..a_{m-1}; empty for m = 1
            prod *= p.a()[m - 2];
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let inhom = Polynomial::constant(sign * b * prod);
        delta = &inhom - &delta.shift(1);
    }
    if (n + 1) % 2 == 1 {
        delta = -&delta;
    }
    let mut coeffs = delta.into_coeffs();
    coeffs.resize(n + 2, 0.0);
    Ok(CharPoly {
        coeffs,
        built_from: Construction::Determinant,
    })
}

/// Characteristic polynomial `det(sI - A)` of a general square matrix by the
/// Faddeev-LeVerrier recursion.
pub fn matrix_char_poly(a: &DMatrix<f64>) -> Polynomial {
    let n = a.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m;
        for i in 0..n {
            m[(i, i)] += coeffs[n - k + 1];
        }
        let am = a * &m;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    Polynomial::new(coeffs)
}

/// All roots of a monic polynomial, sorted by modulus descending.
///
/// Exact zero roots are split off first; the rest come from the eigenvalues
/// of the balanced companion matrix, with Newton polishing on the few whose
/// residual exceeds 1e-8.
pub fn eigenvalues(cp: &CharPoly) -> Vec<Complex64> {
    polynomial_roots(&cp.polynomial())
}

pub fn polynomial_roots(poly: &Polynomial) -> Vec<Complex64> {
    let c = poly.coeffs();
    let zeros = c.iter().take_while(|v| **v == 0.0).count();
    let reduced = &c[zeros..];
    let mut roots = vec![Complex64::new(0.0, 0.0); zeros];

    let degree = reduced.len().saturating_sub(1);
    if degree == 1 {
        roots.push(Complex64::new(-reduced[0] / reduced[1], 0.0));
    } else if degree > 1 {
        let lead = reduced[degree];
        let mut comp = DMatrix::<f64>::zeros(degree, degree);
        for i in 1..degree {
            comp[(i, i - 1)] = 1.0;
        }
        for i in 0..degree {
            comp[(i, degree - 1)] = -reduced[i] / lead;
        }
        balance(&mut comp);
        let raw = schur_eigenvalues(&comp).unwrap_or_else(|| aberth(reduced));
        roots.extend(raw.into_iter().map(|z| polish(poly, z)));
    }
    sort_by_modulus(&mut roots);
    roots
}

/// Eigenvalues through a real Schur form with a bounded sweep count.
/// `None` when the QR iteration does not settle.
fn schur_eigenvalues(m: &DMatrix<f64>) -> Option<Vec<Complex64>> {
    let sweeps = 1000 * m.nrows().max(1);
    m.clone()
        .try_schur(f64::EPSILON, sweeps)
        .map(|s| s.complex_eigenvalues().iter().copied().collect())
}

/// Eigenvalues of a square matrix. Falls back to the roots of its
/// characteristic polynomial when the Schur iteration stalls (as it can on
/// defective matrices).
pub fn matrix_eigenvalues(m: &DMatrix<f64>) -> Vec<Complex64> {
    let mut ev = schur_eigenvalues(m).unwrap_or_else(|| polynomial_roots(&matrix_char_poly(m)));
    sort_by_modulus(&mut ev);
    ev
}

/// Simultaneous Aberth-Ehrlich iteration for the roots of a polynomial with
/// nonzero constant term (coefficients lowest first).
fn aberth(c: &[f64]) -> Vec<Complex64> {
    let poly = Polynomial::new(c.to_vec());
    let d = poly.derivative();
    let degree = c.len() - 1;
    let lead = c[degree].abs();
    let radius = 1.0 + c[..degree].iter().map(|v| v.abs() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * k as f64 / degree as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..degree {
            let v = poly.eval_complex(z[i]);
            if v.norm() == 0.0 {
                continue;
            }
            let ratio = v / d.eval_complex(z[i]);
            let repulsion: Complex64 = (0..degree)
                .filter(|&j| j != i)
                .map(|j| Complex64::new(1.0, 0.0) / (z[i] - z[j]))
                .sum();
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if w.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

fn polish(poly: &Polynomial, mut z: Complex64) -> Complex64 {
    if poly.eval_complex(z).norm() <= 1e-8 {
        return z;
    }
    let d = poly.derivative();
    for _ in 0..20 {
        let v = poly.eval_complex(z);
        let dv = d.eval_complex(z);
        if dv.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        if poly.eval_complex(next).norm() >= v.norm() {
            break;
        }
        z = next;
    }
    z
}

/// Diagonal similarity scaling (radix 2) that equalizes row and column
/// norms before the eigensolve.
fn balance(a: &mut DMatrix<f64>) {
    const RADIX: f64 = 2.0;
    let n = a.nrows();
    loop {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX * RADIX;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= RADIX * RADIX;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                for j in 0..n {
                    a[(i, j)] /= f;
                    a[(j, i)] *= f;
                }
            }
        }
        if done {
            break;
        }
    }
}

pub fn sort_by_modulus(roots: &mut [Complex64]) {
    roots.sort_by(|a, b| {
        b.norm()
            .total_cmp(&a.norm())
            .then(a.re.total_cmp(&b.re))
            .then(a.im.total_cmp(&b.im))
    });
}

/// Absolute condition number of each root: `sum |c_i| |r|^i / |q'(r)|`.
/// Large values flag clustered or multiple roots.
pub fn root_conditions(cp: &CharPoly, roots: &[Complex64]) -> Vec<f64> {
    let poly = cp.polynomial();
    let d = poly.derivative();
    roots
        .iter()
        .map(|r| {
            let scale = poly.magnitude_at(r.norm());
            let dq = d.eval_complex(*r).norm();
            if dq == 0.0 {
                f64::INFINITY
            } else {
                scale / dq
            }
        })
        .collect()
}

/// Multipliers of a periodic orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitMultipliers {
    /// Eigenvalues of `J(x_p) .. J(x_1)`, modulus descending.
    pub multipliers: Vec<Complex64>,
    /// Reduced multiplier `prod f'(x_i)`.
    pub m_x: f64,
    /// Product of the Jacobians along the cycle.
    pub monodromy: DMatrix<f64>,
    /// Largest `|T(s_i) - s_{i+1}|` around the cycle.
    pub residual: f64,
}

/// Largest max-norm mismatch `|T(s_i) - s_{i+1 mod p}|`.
pub fn cycle_residual(p: &MapParams, orbit: &[State]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for (i, s) in orbit.iter().enumerate() {
        let img = p.step(s)?;
        worst = worst.max(img.distance(&orbit[(i + 1) % orbit.len()]));
    }
    Ok(worst)
}

/// Multipliers of a verified cycle. For `b = 0` the product is block upper
/// triangular with a nilpotent y-block, so the spectrum is exactly
/// `{m_x, 0 (n times)}` and is returned in that form.
pub fn orbit_multipliers(p: &MapParams, orbit: &[State]) -> Result<OrbitMultipliers> {
    if orbit.is_empty() {
        return Err(HenonError::NotACycle {
            residual: f64::INFINITY,
            tolerance: CYCLE_TOLERANCE,
        });
    }
    let residual = cycle_residual(p, orbit)?;
    if !(residual < CYCLE_TOLERANCE) {
        return Err(HenonError::NotACycle {
            residual,
            tolerance: CYCLE_TOLERANCE,
        });
    }
    let dim = p.n() + 1;
    let mut monodromy = DMatrix::<f64>::identity(dim, dim);
    let mut m_x = 1.0;
    for s in orbit {
        monodromy = p.jacobian_at(s.x) * monodromy;
        m_x *= p.f().derivative(s.x);
    }
    let mut multipliers = if p.b() == 0.0 {
        let mut v = vec![Complex64::new(0.0, 0.0); dim];
        v[0] = Complex64::new(m_x, 0.0);
        v
    } else {
        matrix_eigenvalues(&monodromy)
    };
    sort_by_modulus(&mut multipliers);
    Ok(OrbitMultipliers {
        multipliers,
        m_x,
        monodromy,
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::Nonlinearity;
    use approx::assert_relative_eq;

    fn params(b: f64, a: &[f64]) -> MapParams {
        MapParams::new(Nonlinearity::Quadratic { mu: 1.0 }, b, a.to_vec()).unwrap()
    }

    #[test]
    fn closed_form_examples() {
        let cp = char_poly_closed_form(&params(0.3, &[]), 0.7);
        assert_eq!(cp.coeffs, vec![-0.3, -0.7, 1.0]);

        let cp = char_poly_closed_form(&params(0.0, &[0.4, -0.2, 0.9]), 0.7);
        assert_eq!(cp.coeffs, vec![0.0, 0.0, 0.0, 0.0, -0.7, 1.0]);

        let cp = char_poly_closed_form(&params(0.1, &[0.5]), 1.0);
        assert_eq!(cp.degree(), 3);
        for (got, want) in cp.coeffs.iter().zip([-0.05, -0.1, -1.0, 1.0]) {
            assert_relative_eq!(*got, want, epsilon = 1e-15);
        }
    }

    #[test]
    fn determinant_examples() {
        let p = params(0.3, &[]);
        assert_eq!(
            char_poly_determinant(&p, 0.7).unwrap().coeffs,
            char_poly_closed_form(&p, 0.7).coeffs
        );
        let p = params(0.25, &[0.0, 0.0, 0.0]);
        let cp = char_poly_determinant(&p, -0.4).unwrap();
        // s^3 (s^2 + 0.4 s - 0.25)
        assert_eq!(cp.coeffs, vec![0.0, 0.0, 0.0, -0.25, 0.4, 1.0]);
        let p = params(0.1, &[0.5]);
        let det = char_poly_determinant(&p, 1.0).unwrap();
        let cf = char_poly_closed_form(&p, 1.0);
        for (a, b) in det.coeffs.iter().zip(&cf.coeffs) {
            assert_relative_eq!(a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn determinant_size_bound() {
        let p = params(0.1, &vec![0.5; 63]);
        assert!(matches!(
            char_poly_determinant(&p, 1.0),
            Err(HenonError::DimensionBound { size: 65, max: 64 })
        ));
        assert!(char_poly_determinant(&params(0.1, &vec![0.5; 62]), 1.0).is_ok());
    }

    #[test]
    fn eigenvalue_examples() {
        let roots = eigenvalues(&char_poly_closed_form(&params(0.0, &[0.5]), 0.7));
        assert_eq!(roots.len(), 3);
        assert_relative_eq!(roots[0].re, 0.7, epsilon = 1e-14);
        assert_eq!(roots[1], Complex64::new(0.0, 0.0));
        assert_eq!(roots[2], Complex64::new(0.0, 0.0));

        let roots = eigenvalues(&char_poly_closed_form(&params(0.3, &[]), 0.0));
        let r = 0.3f64.sqrt();
        assert_relative_eq!(roots[0].norm(), r, epsilon = 1e-14);
        assert_relative_eq!(roots[1].norm(), r, epsilon = 1e-14);
        assert_relative_eq!(roots[0].re + roots[1].re, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn product_of_roots_is_jacobian_determinant() {
        let a = [0.5, -0.7, 0.3, 0.9];
        let p = params(-0.4, &a);
        let roots = eigenvalues(&char_poly_closed_form(&p, 1.3));
        let prod = roots.iter().fold(Complex64::new(1.0, 0.0), |acc, r| acc * r);
        let det_j = p.jacobian_at(0.2).determinant();
        let formula = (-1f64).powi(p.n() as i32) * -0.4 * a.iter().product::<f64>();
        assert_relative_eq!(det_j, formula, epsilon = 1e-14);
        assert!((prod.re - formula).abs() < 1e-10 && prod.im.abs() < 1e-10);
    }

    #[test]
    fn matrix_char_poly_matches_closed_form() {
        let p = params(0.2, &[0.6, -0.5]);
        let x = 0.35;
        let fx = p.f().derivative(x);
        let m = matrix_char_poly(&p.jacobian_at(x));
        let cf = char_poly_closed_form(&p, fx);
        for (a, b) in m.coeffs().iter().zip(&cf.coeffs) {
            assert_relative_eq!(a, b, epsilon = 1e-13);
        }
    }

    #[test]
    fn conditions_flag_multiple_roots() {
        // (s - 1)^2 (s + 2)
        let cp = CharPoly {
            coeffs: vec![2.0, -3.0, 0.0, 1.0],
            built_from: Construction::ClosedForm,
        };
        let roots = eigenvalues(&cp);
        let cond = root_conditions(&cp, &roots);
        assert!(cond[0] < 10.0);
        assert!(cond[1] > 1e4 && cond[2] > 1e4, "{cond:?}");
    }

    #[test]
    fn multipliers_of_uncoupled_fixed_point() {
        let mu = 0.9;
        let p = MapParams::new(Nonlinearity::Quadratic { mu }, 0.0, vec![0.5, 0.5]).unwrap();
        let x = (-1.0 + (1.0 + 4.0 * mu as f64).sqrt()) / 2.0;
        assert!((x - 0.5724).abs() < 1e-4);
        let m = orbit_multipliers(&p, &[State::on_axis(x, 3)]).unwrap();
        assert_relative_eq!(m.m_x, -2.0 * x);
        assert!((m.m_x + 1.1448).abs() < 1e-4);
        assert_eq!(m.multipliers[0], Complex64::new(m.m_x, 0.0));
        assert!(m.multipliers[1..].iter().all(|z| z.norm() == 0.0));
        // numeric spectrum of the product agrees
        let numeric = matrix_eigenvalues(&m.monodromy);
        let top = numeric.iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert_relative_eq!(top, m.m_x.abs(), epsilon = 1e-12);
    }

    #[test]
    fn multipliers_of_coupled_fixed_point() {
        let (mu, b) = (0.9, 0.3);
        let p = MapParams::planar(Nonlinearity::Quadratic { mu }, b).unwrap();
        let x = ((b - 1.0) + ((1.0 - b) * (1.0 - b) + 4.0 * mu).sqrt()) / 2.0;
        let m = orbit_multipliers(&p, &[State::new(x, vec![b * x])]).unwrap();
        let want = polynomial_roots(&Polynomial::new(vec![-b, 2.0 * x, 1.0]));
        for (g, w) in m.multipliers.iter().zip(&want) {
            assert!((g - w).norm() < 1e-12);
        }
    }

    #[test]
    fn non_cycle_rejected() {
        let p = MapParams::planar(Nonlinearity::Quadratic { mu: 0.9 }, 0.3).unwrap();
        assert!(matches!(
            orbit_multipliers(&p, &[State::new(0.1, vec![0.0])]),
            Err(HenonError::NotACycle { .. })
        ));
    }
}
