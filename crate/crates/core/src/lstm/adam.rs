use super::weights::LstmWeights;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// First/second moment accumulators with bias-corrected updates.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(num_params: usize, config: AdamConfig) -> Self {
        Self {
            config,
            m: vec![0.0; num_params],
            v: vec![0.0; num_params],
            t: 0,
        }
    }

    /// Applies one update to `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Dimension(format!(
                "optimizer tracks {} parameters, got {} params / {} gradients",
                self.m.len(),
                params.len(),
                grads.len()
            )));
        }
        if let Some(i) = grads.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFinite(format!("gradient entry {i}")));
        }
        let AdamConfig {
            learning_rate,
            beta1,
            beta2,
            epsilon,
        } = self.config;
        self.t += 1;
        let bc1 = 1.0 - beta1.powf(self.t as f64);
        let bc2 = 1.0 - beta2.powf(self.t as f64);
        for (((p, &g), m), v) in params.iter_mut().zip(grads).zip(&mut self.m).zip(&mut self.v) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *p -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
        }
        Ok(())
    }
}

/// Functional form of [`AdamState::step`] over LSTM weights.
pub fn adam_step(
    w: &LstmWeights,
    grads: &LstmWeights,
    opt: &AdamState,
) -> Result<(LstmWeights, AdamState)> {
    if !w.same_shape(grads) {
        return Err(Error::Dimension("gradient shape differs from weights".into()));
    }
    let mut w = w.clone();
    let mut opt = opt.clone();
    opt.step(w.as_mut_slice(), grads.as_slice())?;
    Ok((w, opt))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradient_leaves_weights() {
        let w = LstmWeights::from_params(1, 1, 1, (0..14).map(f64::from).collect()).unwrap();
        let g = LstmWeights::zeros(1, 1, 1);
        let opt = AdamState::new(14, AdamConfig::default());
        let (w2, opt2) = adam_step(&w, &g, &opt).unwrap();
        assert_eq!(w2, w);
        assert_eq!(opt2.t, 1);
    }

    #[test]
    fn first_step_closed_form() {
        let mut opt = AdamState::new(
            1,
            AdamConfig {
                learning_rate: 0.1,
                ..AdamConfig::default()
            },
        );
        let mut x = [0.0];
        opt.step(&mut x, &[1.0]).unwrap();
        assert!((x[0] - (-0.1 / (1.0 + 1e-8))).abs() < 1e-15);
        assert!(opt.v[0] >= 0.0);
    }

    #[test]
    fn non_finite_gradient_rejected() {
        let mut opt = AdamState::new(2, AdamConfig::default());
        let mut x = [0.0, 0.0];
        assert!(matches!(opt.step(&mut x, &[1.0, f64::NAN]), Err(Error::NonFinite(_))));
        assert_eq!(opt.t, 0);
    }

    #[test]
    fn descends_a_parabola() {
        // f(x) = x^2 from x = 1; oracle: plain scalar iteration of the same rule.
        let cfg = AdamConfig {
            learning_rate: 0.1,
            ..AdamConfig::default()
        };
        let mut opt = AdamState::new(1, cfg);
        let mut x = [1.0];
        let (mut m, mut v, mut xr) = (0.0f64, 0.0f64, 1.0f64);
        for t in 1..=100 {
            let g = 2.0 * x[0];
            opt.step(&mut x, &[g]).unwrap();
            let gr = 2.0 * xr;
            m = 0.9 * m + 0.1 * gr;
            v = 0.999 * v + 0.001 * gr * gr;
            xr -= 0.1 * (m / (1.0 - 0.9f64.powi(t))) / ((v / (1.0 - 0.999f64.powi(t))).sqrt() + 1e-8);
        }
        assert!((x[0] - xr).abs() < 1e-12);
        // overshoots around the minimum, but ends far below the start
        assert!(x[0].abs() < 0.01);
    }
}
