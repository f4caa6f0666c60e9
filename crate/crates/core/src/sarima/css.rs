//! Conditional-sum-of-squares objective.

use super::SarimaOrder;
use crate::{Error, Result};

/// Model coefficients in their natural (constrained) form.
#[derive(Debug, Clone, PartialEq)]
pub struct SarimaCoefficients {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub intercept: f64,
}

fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn seasonal_poly(coefs: &[f64], m: usize, sign: f64) -> Vec<f64> {
    let mut poly = vec![0.0; coefs.len() * m + 1];
    poly[0] = 1.0;
    for (j, c) in coefs.iter().enumerate() {
        poly[(j + 1) * m] = sign * c;
    }
    poly
}

/// `α` with `1 − Σ α_k z^k = (1 − Σ φ_i z^i)(1 − Σ Φ_j z^{jm})`.
pub fn expand_ar(phi: &[f64], seasonal_phi: &[f64], m: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    a.extend(phi.iter().map(|v| -v));
    multiply(&a, &seasonal_poly(seasonal_phi, m, -1.0))[1..]
        .iter()
        .map(|v| -v)
        .collect()
}

/// `β` with `1 + Σ β_k z^k = (1 + Σ θ_i z^i)(1 + Σ Θ_j z^{jm})`.
pub fn expand_ma(theta: &[f64], seasonal_theta: &[f64], m: usize) -> Vec<f64> {
    let mut a = vec![1.0];
    a.extend_from_slice(theta);
    multiply(&a, &seasonal_poly(seasonal_theta, m, 1.0))[1..].to_vec()
}

/// Residuals of the differenced series; zero before the AR warm-up
/// `p + P·m`, with pre-sample residuals taken as zero.
pub fn residuals(coefs: &SarimaCoefficients, w: &[f64], order: &SarimaOrder) -> Result<Vec<f64>> {
    let alpha = expand_ar(&coefs.phi, &coefs.seasonal_phi, order.m.max(1));
    let beta = expand_ma(&coefs.theta, &coefs.seasonal_theta, order.m.max(1));
    let t0 = order.ar_span();
    let mu = coefs.intercept;
    let mut e = vec![0.0; w.len()];
    for t in t0..w.len() {
        let mut v = w[t] - mu;
        for (k, a) in alpha.iter().enumerate() {
            if *a != 0.0 {
                v -= a * (w[t - k - 1] - mu);
            }
        }
        for (k, b) in beta.iter().enumerate() {
            if *b != 0.0 && t > k {
                v -= b * e[t - k - 1];
            }
        }
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("CSS residual at t={t}")));
        }
        e[t] = v;
    }
    Ok(e)
}

/// `Σ e_t²` over `t ≥ p + P·m`.
pub fn css_loss(coefs: &SarimaCoefficients, w: &[f64], order: &SarimaOrder) -> Result<f64> {
    let e = residuals(coefs, w, order)?;
    Ok(e[order.ar_span().min(e.len())..].iter().map(|v| v * v).sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ar1(phi: f64, intercept: f64) -> SarimaCoefficients {
        SarimaCoefficients {
            phi: vec![phi],
            theta: vec![],
            seasonal_phi: vec![],
            seasonal_theta: vec![],
            intercept,
        }
    }

    #[test]
    fn polynomial_expansion() {
        // (1 − 0.5z)(1 − 0.3z²) = 1 − 0.5z − 0.3z² + 0.15z³
        let a = expand_ar(&[0.5], &[0.3], 2);
        assert_eq!(a.len(), 3);
        assert!((a[0] - 0.5).abs() < 1e-15 && (a[1] - 0.3).abs() < 1e-15 && (a[2] + 0.15).abs() < 1e-15);
        // (1 + 0.4z)(1 + 0.2z²) = 1 + 0.4z + 0.2z² + 0.08z³
        let b = expand_ma(&[0.4], &[0.2], 2);
        assert!((b[2] - 0.08).abs() < 1e-15);
    }

    #[test]
    fn zero_ar_is_constant_model() {
        let w = [1.0, 4.0, 2.0, 6.0];
        let order = SarimaOrder::new(1, 0, 0, 0, 0, 0, 1);
        let loss = css_loss(&ar1(0.0, 2.0), &w, &order).unwrap();
        assert_eq!(loss, 4.0 + 0.0 + 16.0);
    }

    #[test]
    fn exact_ar1_has_zero_loss() {
        let mut w = vec![3.0];
        for _ in 0..20 {
            w.push(0.5 * w.last().unwrap());
        }
        let order = SarimaOrder::new(1, 0, 0, 0, 0, 0, 1);
        assert!(css_loss(&ar1(0.5, 0.0), &w, &order).unwrap() < 1e-24);
    }
}
