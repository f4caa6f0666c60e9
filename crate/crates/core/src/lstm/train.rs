use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{AdamConfig, AdamState};
use super::cell::batch_gradients;
use super::weights::{clip_gradients, LstmWeights};
use crate::market_data::WindowedDataset;
use crate::{Error, Result};

/// Training hyperparameters. The loss is always mean squared error.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
    /// Global gradient-norm ceiling; `None` disables clipping.
    pub clip_norm: Option<f64>,
    pub batch_size: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: 64,
            epochs: 50,
            learning_rate: 1e-3,
            seed: 0,
            clip_norm: Some(1.0),
            batch_size: 32,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.hidden == 0 {
            return Err(Error::Config("lstm hidden size must be at least 1".into()));
        }
        if self.epochs == 0 {
            return Err(Error::Config("lstm epochs must be at least 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config("lstm learning rate must be positive".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::Config("lstm batch size must be at least 1".into()));
        }
        if let Some(c) = self.clip_norm {
            if !(c > 0.0) {
                return Err(Error::Config("clip norm must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Minibatch Adam training from a seeded initialization.
///
/// Each epoch shuffles the samples with the run's RNG and takes one Adam
/// step per minibatch. The history holds, per epoch, the sample-weighted
/// mean of the minibatch losses seen during that epoch (each measured
/// before its step).
pub fn train(dataset: &WindowedDataset, cfg: &TrainConfig) -> Result<(LstmWeights, Vec<f64>)> {
    cfg.validate()?;
    if dataset.is_empty() {
        return Err(Error::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut weights = LstmWeights::init(cfg.hidden, dataset.num_features, dataset.horizon, &mut rng);
    let mut opt = AdamState::new(
        weights.as_slice().len(),
        AdamConfig {
            learning_rate: cfg.learning_rate,
            ..AdamConfig::default()
        },
    );
    let mut order: Vec<usize> = (0..dataset.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs);

    for epoch in 1..=cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for batch in order.chunks(cfg.batch_size) {
            let (loss, mut grads) = match batch_gradients(dataset, batch, &weights) {
                Ok(v) => v,
                Err(Error::NonFinite(_)) => return Err(Error::Diverged { epoch }),
                Err(e) => return Err(e),
            };
            if let Some(c) = cfg.clip_norm {
                clip_gradients(&mut grads, c);
            }
            opt.step(weights.as_mut_slice(), grads.as_slice())
                .map_err(|_| Error::Diverged { epoch })?;
            epoch_loss += loss * batch.len() as f64;
        }
        let epoch_loss = epoch_loss / dataset.len() as f64;
        if !epoch_loss.is_finite() || !weights.is_finite() {
            return Err(Error::Diverged { epoch });
        }
        history.push(epoch_loss);
    }
    Ok((weights, history))
}
