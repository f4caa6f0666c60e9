//! Bijection between unconstrained vectors and stationary AR coefficients.
//!
//! Each coordinate becomes a partial autocorrelation `r = R·tanh(u)` with
//! `|r| < R < 1`; the Durbin-Levinson recursion then yields coefficients of
//! `1 − Σ φ_i z^i` with every root outside the unit circle.

const R_MAX: f64 = 1.0 - 1e-6;

/// Unconstrained values to AR coefficients.
pub fn to_stationary(u: &[f64]) -> Vec<f64> {
    let r: Vec<f64> = u.iter().map(|v| R_MAX * v.tanh()).collect();
    let mut phi: Vec<f64> = Vec::with_capacity(r.len());
    for (k, &rk) in r.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - rk * prev[k - 1 - j];
        }
        phi.push(rk);
    }
    phi
}

/// Inverse of [`to_stationary`] for coefficients inside the region.
pub fn from_stationary(phi: &[f64]) -> Vec<f64> {
    let p = phi.len();
    let mut cur = phi.to_vec();
    let mut r = vec![0.0; p];
    for k in (0..p).rev() {
        let rk = cur[k];
        r[k] = rk;
        let denom = 1.0 - rk * rk;
        let prev: Vec<f64> = (0..k).map(|j| (cur[j] + rk * cur[k - 1 - j]) / denom).collect();
        cur = prev;
    }
    r.iter().map(|v| (v / R_MAX).atanh()).collect()
}

/// MA coefficients for `1 + Σ θ_i z^i`, invertible by construction.
pub fn to_invertible(u: &[f64]) -> Vec<f64> {
    to_stationary(u).into_iter().map(|v| -v).collect()
}

pub fn from_invertible(theta: &[f64]) -> Vec<f64> {
    from_stationary(&theta.iter().map(|v| -v).collect::<Vec<_>>())
}
