//! Perron root and eigenvector of a nonnegative integer matrix.

use serde::Serialize;

use crate::matrix::IntMatrix;
use crate::nimrep::is_irreducible;

pub const RESIDUAL_TOLERANCE: f64 = 1e-10;
const MAX_ITERATIONS: usize = 1_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerronReport {
    pub irreducible: bool,
    pub spectral_radius: f64,
    pub top_eigenvalue_simple: bool,
    pub positive_eigenvector: bool,
    /// Normalised to maximum entry 1.
    pub eigenvector: Vec<f64>,
    /// Real and imaginary parts, sorted by real part then imaginary part.
    pub eigenvalues: Vec<(f64, f64)>,
}

fn sorted_eigenvalues(q: &IntMatrix) -> Vec<(f64, f64)> {
    let mut vals: Vec<(f64, f64)> = q.to_f64().complex_eigenvalues().iter().map(|z| (z.re, z.im)).collect();
    vals.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    vals
}

/// Power iteration on `Q + I` (primitive when `Q` is irreducible), stopped
/// once `|Qx - rho x|_inf < 1e-10` with `x` normalised to maximum 1.
fn power_iteration(q: &nalgebra::DMatrix<f64>) -> Option<(f64, nalgebra::DVector<f64>)> {
    let r = q.nrows();
    let shifted = q + nalgebra::DMatrix::<f64>::identity(r, r);
    let mut x = nalgebra::DVector::<f64>::from_element(r, 1.0);
    for _ in 0..MAX_ITERATIONS {
        let y = &shifted * &x;
        let top = y.max();
        if top <= 0.0 {
            return None;
        }
        x = y / top;
        let qx = q * &x;
        let rho = qx.dot(&x) / x.dot(&x);
        if (qx - &x * rho).amax() < RESIDUAL_TOLERANCE {
            return Some((rho, x));
        }
    }
    None
}

pub fn perron_analysis(q: &IntMatrix) -> PerronReport {
    assert!(q.is_nonnegative(), "perron_analysis needs a nonnegative matrix");
    let irreducible = is_irreducible(q).is_none();
    let eigenvalues = sorted_eigenvalues(q);
    let modulus_max = eigenvalues.iter().map(|(re, im)| re.hypot(*im)).fold(0.0, f64::max);
    let (spectral_radius, eigenvector) = match power_iteration(&q.to_f64()) {
        Some((rho, x)) => (rho, x.iter().copied().collect()),
        None => (modulus_max, vec![]),
    };

    // multiplicity > 1 iff rho is also a root of gcd(p, p')
    let p = q.char_poly();
    let g = p.gcd(&p.derivative());
    let scale: f64 = g
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| num_traits::ToPrimitive::to_f64(c).unwrap_or(f64::INFINITY).abs() * spectral_radius.abs().powi(i as i32))
        .sum::<f64>()
        .max(1.0);
    let top_eigenvalue_simple = g.degree() == 0 || g.eval_f64(spectral_radius).abs() > 1e-7 * scale;
    let positive_eigenvector = !eigenvector.is_empty() && eigenvector.iter().all(|&v| v > 1e-12);
    PerronReport { irreducible, spectral_radius, top_eigenvalue_simple, positive_eigenvector, eigenvector, eigenvalues }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: Vec<Vec<i64>>) -> IntMatrix {
        IntMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn cor12_q() {
        let r = perron_analysis(&m(vec![vec![2, 0, 1], vec![0, 2, 1], vec![1, 1, 2]]));
        let root2 = 2f64.sqrt();
        assert!(r.irreducible);
        assert!((r.spectral_radius - (2.0 + root2)).abs() < 1e-9);
        assert!(r.top_eigenvalue_simple);
        assert!(r.positive_eigenvector);
        let expected = [2.0 - root2, 2.0, 2.0 + root2];
        for ((re, im), want) in r.eigenvalues.iter().zip(expected) {
            assert!((re - want).abs() < 1e-9 && im.abs() < 1e-9);
        }
    }

    #[test]
    fn small_cases() {
        let r = perron_analysis(&m(vec![vec![0, 1], vec![1, 0]]));
        assert!(r.irreducible && r.top_eigenvalue_simple && r.positive_eigenvector);
        assert!((r.spectral_radius - 1.0).abs() < 1e-10);
        assert!(r.eigenvector.iter().all(|v| (v - 1.0).abs() < 1e-9));

        let r = perron_analysis(&IntMatrix::scalar(2, 2));
        assert!(!r.irreducible);
        assert!(!r.top_eigenvalue_simple);
        assert!((r.spectral_radius - 2.0).abs() < 1e-10);

        let r = perron_analysis(&IntMatrix::zeros(1));
        assert!(r.irreducible);
        assert_eq!(r.spectral_radius, 0.0);
    }

    #[test]
    fn possx2_root() {
        let r = perron_analysis(&m(vec![vec![2, 2], vec![1, 2]]));
        assert!((r.spectral_radius - (2.0 + 2f64.sqrt())).abs() < 1e-9);
        assert!(r.top_eigenvalue_simple && r.positive_eigenvector);
    }
}
