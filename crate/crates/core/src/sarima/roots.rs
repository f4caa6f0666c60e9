//! Root checks for lag polynomials.

use nalgebra::DMatrix;

/// Smallest root modulus of `1 − Σ c_i z^i`; `+∞` when the polynomial
/// has no roots.
pub fn min_root_modulus(c: &[f64]) -> f64 {
    let mut c = c.to_vec();
    while c.last() == Some(&0.0) {
        c.pop();
    }
    let p = c.len();
    if p == 0 {
        return f64::INFINITY;
    }
    // The companion matrix of z^p − c_1 z^{p−1} − … − c_p has the reciprocal
    // roots as eigenvalues.
    let companion = DMatrix::from_fn(p, p, |i, j| {
        if i == 0 {
            c[j]
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let largest = companion
        .complex_eigenvalues()
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if largest == 0.0 {
        f64::INFINITY
    } else {
        1.0 / largest
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_roots() {
        // 1 − 0.5z has its root at 2
        assert!((min_root_modulus(&[0.5]) - 2.0).abs() < 1e-12);
        // (1 − 0.5z)(1 + 0.25z) = 1 − 0.25z − 0.125z²: roots 2 and −4
        assert!((min_root_modulus(&[0.25, 0.125]) - 2.0).abs() < 1e-10);
        // 1 + z² has roots ±i
        assert!((min_root_modulus(&[0.0, -1.0]) - 1.0).abs() < 1e-10);
        assert_eq!(min_root_modulus(&[]), f64::INFINITY);
    }
}
