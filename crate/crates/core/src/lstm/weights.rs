use rand::Rng;

use crate::{Error, Result};

/// The four gate blocks, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gate {
    Forget,
    Input,
    Candidate,
    Output,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Forget, Gate::Input, Gate::Candidate, Gate::Output];

    fn index(self) -> usize {
        self as usize
    }
}

/// All trainable parameters of a single-layer LSTM with an affine
/// multistep head, stored in one flat buffer.
///
/// Layout (each matrix row-major): `W_f, W_i, W_C, W_o` (each
/// `hidden x (hidden + input)`, acting on `[h_prev, x]`), then
/// `b_f, b_i, b_C, b_o`, then `head_W` (`horizon x hidden`) and `head_b`.
/// Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmWeights {
    hidden: usize,
    input: usize,
    horizon: usize,
    params: Vec<f64>,
}

impl LstmWeights {
    pub fn zeros(hidden: usize, input: usize, horizon: usize) -> Self {
        let n = Self::count(hidden, input, horizon);
        Self {
            hidden,
            input,
            horizon,
            params: vec![0.0; n],
        }
    }

    /// Xavier-uniform matrices, zero biases, forget bias `+1`.
    pub fn init<R: Rng>(hidden: usize, input: usize, horizon: usize, rng: &mut R) -> Self {
        let mut w = Self::zeros(hidden, input, horizon);
        let gate_limit = (6.0 / ((hidden + input) + hidden) as f64).sqrt();
        for g in Gate::ALL {
            for v in w.gate_mut(g) {
                *v = rng.random_range(-gate_limit..gate_limit);
            }
        }
        w.bias_mut(Gate::Forget).fill(1.0);
        let head_limit = (6.0 / (hidden + horizon) as f64).sqrt();
        for v in w.head_w_mut() {
            *v = rng.random_range(-head_limit..head_limit);
        }
        w
    }

    pub fn from_params(hidden: usize, input: usize, horizon: usize, params: Vec<f64>) -> Result<Self> {
        let n = Self::count(hidden, input, horizon);
        if params.len() != n {
            return Err(Error::Dimension(format!(
                "{} parameters for hidden={hidden}, input={input}, horizon={horizon} (need {n})",
                params.len()
            )));
        }
        Ok(Self {
            hidden,
            input,
            horizon,
            params,
        })
    }

    fn count(hidden: usize, input: usize, horizon: usize) -> usize {
        4 * hidden * (hidden + input) + 4 * hidden + horizon * hidden + horizon
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn input(&self) -> usize {
        self.input
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// Width of the concatenated `[h_prev, x]` vector.
    pub fn concat_len(&self) -> usize {
        self.hidden + self.input
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.params
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn same_shape(&self, other: &LstmWeights) -> bool {
        (self.hidden, self.input, self.horizon) == (other.hidden, other.input, other.horizon)
    }

    fn gate_block(&self) -> usize {
        self.hidden * self.concat_len()
    }

    fn gate_range(&self, g: Gate) -> std::ops::Range<usize> {
        let n = self.gate_block();
        g.index() * n..(g.index() + 1) * n
    }

    fn bias_range(&self, g: Gate) -> std::ops::Range<usize> {
        let start = 4 * self.gate_block() + g.index() * self.hidden;
        start..start + self.hidden
    }

    fn head_w_range(&self) -> std::ops::Range<usize> {
        let start = 4 * self.gate_block() + 4 * self.hidden;
        start..start + self.horizon * self.hidden
    }

    fn head_b_range(&self) -> std::ops::Range<usize> {
        let start = self.head_w_range().end;
        start..start + self.horizon
    }

    pub fn gate(&self, g: Gate) -> &[f64] {
        &self.params[self.gate_range(g)]
    }

    pub fn gate_mut(&mut self, g: Gate) -> &mut [f64] {
        let r = self.gate_range(g);
        &mut self.params[r]
    }

    pub fn bias(&self, g: Gate) -> &[f64] {
        &self.params[self.bias_range(g)]
    }

    pub fn bias_mut(&mut self, g: Gate) -> &mut [f64] {
        let r = self.bias_range(g);
        &mut self.params[r]
    }

    pub fn head_w(&self) -> &[f64] {
        &self.params[self.head_w_range()]
    }

    pub fn head_w_mut(&mut self) -> &mut [f64] {
        let r = self.head_w_range();
        &mut self.params[r]
    }

    pub fn head_b(&self) -> &[f64] {
        &self.params[self.head_b_range()]
    }

    pub fn head_b_mut(&mut self) -> &mut [f64] {
        let r = self.head_b_range();
        &mut self.params[r]
    }

    pub fn norm(&self) -> f64 {
        self.params.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.params.iter().all(|v| v.is_finite())
    }
}

/// Rescales `grads` in place to norm `max_norm` when it is larger.
/// Returns the norm before clipping.
pub fn clip_gradients(grads: &mut LstmWeights, max_norm: f64) -> f64 {
    let norm = grads.norm();
    if norm > max_norm && norm > 0.0 {
        let s = max_norm / norm;
        for g in grads.as_mut_slice() {
            *g *= s;
        }
    }
    norm
}
