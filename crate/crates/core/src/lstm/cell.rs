//! Forward and backward passes through the LSTM cell and the multistep head.

use super::weights::{Gate, LstmWeights};
use crate::market_data::WindowedDataset;
use crate::{Error, Matrix, Result};

/// Hidden and cell state carried between time steps.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmState {
    pub h: Vec<f64>,
    pub c: Vec<f64>,
}

impl LstmState {
    pub fn zeros(hidden: usize) -> Self {
        Self {
            h: vec![0.0; hidden],
            c: vec![0.0; hidden],
        }
    }
}

/// Everything one step needs to be differentiated later.
#[derive(Debug, Clone, PartialEq)]
pub struct GateRecord {
    /// `[h_prev, x]`
    pub concat: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `W_g · [h_prev, x] + b_g` for one gate.
fn preactivation(w: &LstmWeights, g: Gate, concat: &[f64]) -> Vec<f64> {
    let n = w.concat_len();
    let mat = w.gate(g);
    w.bias(g)
        .iter()
        .enumerate()
        .map(|(r, b)| {
            let row = &mat[r * n..(r + 1) * n];
            b + row.iter().zip(concat).map(|(a, z)| a * z).sum::<f64>()
        })
        .collect()
}

/// One cell step:
///
/// ```text
/// f = σ(W_f·[h,x] + b_f)   i = σ(W_i·[h,x] + b_i)   C̃ = tanh(W_C·[h,x] + b_C)
/// C' = f ⊙ C + i ⊙ C̃       o = σ(W_o·[h,x] + b_o)   h' = o ⊙ tanh(C')
/// ```
pub fn lstm_cell_forward(
    x: &[f64],
    state: &LstmState,
    w: &LstmWeights,
) -> Result<(LstmState, GateRecord)> {
    if x.len() != w.input() {
        return Err(Error::Dimension(format!(
            "input has {} features, cell expects {}",
            x.len(),
            w.input()
        )));
    }
    if state.h.len() != w.hidden() || state.c.len() != w.hidden() {
        return Err(Error::Dimension(format!(
            "state size {} does not match hidden size {}",
            state.h.len(),
            w.hidden()
        )));
    }
    Ok(cell_step(x, state, w))
}

fn cell_step(x: &[f64], state: &LstmState, w: &LstmWeights) -> (LstmState, GateRecord) {
    let mut concat = Vec::with_capacity(w.concat_len());
    concat.extend_from_slice(&state.h);
    concat.extend_from_slice(x);

    let forget: Vec<f64> = preactivation(w, Gate::Forget, &concat).into_iter().map(sigmoid).collect();
    let input: Vec<f64> = preactivation(w, Gate::Input, &concat).into_iter().map(sigmoid).collect();
    let candidate: Vec<f64> = preactivation(w, Gate::Candidate, &concat).into_iter().map(f64::tanh).collect();
    let output: Vec<f64> = preactivation(w, Gate::Output, &concat).into_iter().map(sigmoid).collect();

    let c: Vec<f64> = (0..w.hidden())
        .map(|k| forget[k] * state.c[k] + input[k] * candidate[k])
        .collect();
    let tanh_c: Vec<f64> = c.iter().map(|v| v.tanh()).collect();
    let h: Vec<f64> = output.iter().zip(&tanh_c).map(|(o, t)| o * t).collect();

    let record = GateRecord {
        concat,
        c_prev: state.c.clone(),
        forget,
        input,
        candidate,
        output,
        tanh_c,
    };
    (LstmState { h, c }, record)
}

fn head(w: &LstmWeights, h: &[f64]) -> Vec<f64> {
    let hw = w.head_w();
    w.head_b()
        .iter()
        .enumerate()
        .map(|(r, b)| b + hw[r * w.hidden()..(r + 1) * w.hidden()].iter().zip(h).map(|(a, v)| a * v).sum::<f64>())
        .collect()
}

/// Runs a flat `lookback x input` window and returns the step records and
/// the head output.
fn unroll(w: &LstmWeights, window: &[f64]) -> (Vec<GateRecord>, LstmState, Vec<f64>) {
    let f = w.input();
    let steps = window.len() / f;
    let mut state = LstmState::zeros(w.hidden());
    let mut records = Vec::with_capacity(steps);
    for t in 0..steps {
        let (next, rec) = cell_step(&window[t * f..(t + 1) * f], &state, w);
        records.push(rec);
        state = next;
    }
    let y = head(w, &state.h);
    (records, state, y)
}

/// Prediction for a flat row-major window; the caller guarantees the shape.
pub(crate) fn predict_flat(w: &LstmWeights, window: &[f64]) -> Vec<f64> {
    unroll(w, window).2
}

/// Zero initial state, one cell step per window row, then
/// `head_W · h_L + head_b`.
pub fn forward_sequence(window: &Matrix, w: &LstmWeights) -> Result<Vec<f64>> {
    if window.cols() != w.input() {
        return Err(Error::Dimension(format!(
            "window has {} features, weights expect {}",
            window.cols(),
            w.input()
        )));
    }
    if window.rows() == 0 {
        return Err(Error::Dimension("empty window".into()));
    }
    Ok(predict_flat(w, window.as_slice()))
}

/// Mean squared error over all samples and horizon steps, and its exact
/// gradient by backpropagation through time.
pub fn bptt_gradients(batch: &WindowedDataset, w: &LstmWeights) -> Result<(f64, LstmWeights)> {
    let all: Vec<usize> = (0..batch.len()).collect();
    batch_gradients(batch, &all, w)
}

pub(crate) fn batch_gradients(
    data: &WindowedDataset,
    indices: &[usize],
    w: &LstmWeights,
) -> Result<(f64, LstmWeights)> {
    if indices.is_empty() {
        return Err(Error::Empty);
    }
    if data.num_features != w.input() || data.horizon != w.horizon() {
        return Err(Error::Dimension(format!(
            "dataset has {} features / horizon {}, weights expect {} / {}",
            data.num_features,
            data.horizon,
            w.input(),
            w.horizon()
        )));
    }
    let hidden = w.hidden();
    let n_concat = w.concat_len();
    let norm = 1.0 / (indices.len() * w.horizon()) as f64;
    let mut grads = LstmWeights::zeros(hidden, w.input(), w.horizon());
    let mut loss = 0.0;

    for &s in indices {
        let (records, last, y) = unroll(w, data.input(s));
        let target = data.target(s);

        // head
        let mut dh = vec![0.0; hidden];
        {
            let dy: Vec<f64> = y.iter().zip(target).map(|(p, t)| 2.0 * (p - t) * norm).collect();
            loss += y.iter().zip(target).map(|(p, t)| (p - t) * (p - t)).sum::<f64>();
            let hw = w.head_w();
            let ghw = grads.head_w_mut();
            for (r, &d) in dy.iter().enumerate() {
                for k in 0..hidden {
                    ghw[r * hidden + k] += d * last.h[k];
                    dh[k] += d * hw[r * hidden + k];
                }
            }
            for (g, d) in grads.head_b_mut().iter_mut().zip(&dy) {
                *g += d;
            }
        }

        let mut dc = vec![0.0; hidden];
        let mut da = [
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
            vec![0.0; hidden],
        ];
        for rec in records.iter().rev() {
            for k in 0..hidden {
                let o = rec.output[k];
                let tc = rec.tanh_c[k];
                let d_o = dh[k] * tc;
                dc[k] += dh[k] * o * (1.0 - tc * tc);
                let (f, i, g) = (rec.forget[k], rec.input[k], rec.candidate[k]);
                da[Gate::Forget as usize][k] = dc[k] * rec.c_prev[k] * f * (1.0 - f);
                da[Gate::Input as usize][k] = dc[k] * g * i * (1.0 - i);
                da[Gate::Candidate as usize][k] = dc[k] * i * (1.0 - g * g);
                da[Gate::Output as usize][k] = d_o * o * (1.0 - o);
                dc[k] *= f;
            }
            let mut dconcat = vec![0.0; n_concat];
            for gate in Gate::ALL {
                let dag = &da[gate as usize];
                let mat = w.gate(gate);
                let gmat = grads.gate_mut(gate);
                for (r, &d) in dag.iter().enumerate() {
                    if d == 0.0 {
                        continue;
                    }
                    let row = r * n_concat;
                    for j in 0..n_concat {
                        gmat[row + j] += d * rec.concat[j];
                        dconcat[j] += d * mat[row + j];
                    }
                }
                for (gb, d) in grads.bias_mut(gate).iter_mut().zip(dag) {
                    *gb += d;
                }
            }
            dh.copy_from_slice(&dconcat[..hidden]);
        }
    }

    let loss = loss * norm;
    if !loss.is_finite() {
        return Err(Error::NonFinite("loss".into()));
    }
    Ok((loss, grads))
}

/// Mean squared error of the current weights over a dataset.
pub fn dataset_loss(data: &WindowedDataset, w: &LstmWeights) -> f64 {
    let mut sum = 0.0;
    for s in 0..data.len() {
        let y = predict_flat(w, data.input(s));
        sum += y.iter().zip(data.target(s)).map(|(p, t)| (p - t) * (p - t)).sum::<f64>();
    }
    sum / (data.len() * data.horizon).max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::window_columns;

    #[test]
    fn zero_weights_zero_state() {
        let w = LstmWeights::zeros(3, 2, 1);
        let (s, rec) = lstm_cell_forward(&[0.4, -1.0], &LstmState::zeros(3), &w).unwrap();
        assert_eq!(s.c, vec![0.0; 3]);
        assert_eq!(s.h, vec![0.0; 3]);
        assert!(rec.forget.iter().all(|&f| f == 0.5));
        assert!(rec.candidate.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn saturated_forget_gate_keeps_memory() {
        let mut w = LstmWeights::zeros(2, 1, 1);
        w.bias_mut(Gate::Forget).fill(50.0);
        w.bias_mut(Gate::Input).fill(-50.0);
        let state = LstmState {
            h: vec![0.1, -0.2],
            c: vec![0.7, -1.3],
        };
        let (s, _) = lstm_cell_forward(&[2.0], &state, &w).unwrap();
        for (a, b) in s.c.iter().zip(&state.c) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn dimension_mismatch() {
        let w = LstmWeights::zeros(2, 3, 1);
        assert!(matches!(
            lstm_cell_forward(&[1.0], &LstmState::zeros(2), &w),
            Err(Error::Dimension(_))
        ));
        let m = Matrix::zeros(4, 2);
        assert!(matches!(forward_sequence(&m, &w), Err(Error::Dimension(_))));
    }

    #[test]
    fn zero_weights_predict_head_bias() {
        let mut w = LstmWeights::zeros(4, 2, 3);
        w.head_b_mut().copy_from_slice(&[1.0, -2.0, 0.5]);
        let window = Matrix::from_vec(5, 2, (0..10).map(f64::from).collect()).unwrap();
        assert_eq!(forward_sequence(&window, &w).unwrap(), vec![1.0, -2.0, 0.5]);
    }

    #[test]
    fn perfect_fit_has_zero_loss_and_gradient() {
        // Zero gate weights keep h at zero, so the head bias alone predicts.
        let mut w = LstmWeights::zeros(2, 1, 2);
        w.head_b_mut().copy_from_slice(&[3.0, 3.0]);
        let inputs = Matrix::from_vec(6, 1, vec![0.0; 6]).unwrap();
        let ds = window_columns(&inputs, &[3.0; 6], 2, 2).unwrap();
        let (loss, g) = bptt_gradients(&ds, &w).unwrap();
        assert_eq!(loss, 0.0);
        assert!(g.as_slice().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn doubling_targets_shifts_loss_analytically() {
        // loss(2t) - loss(t) = mean(3t^2 - 2 p t) for fixed predictions p.
        let mut w = LstmWeights::zeros(2, 1, 2);
        w.head_b_mut().copy_from_slice(&[0.5, -0.25]);
        let inputs = Matrix::from_vec(7, 1, vec![0.3; 7]).unwrap();
        let target: Vec<f64> = (0..7).map(|i| 1.0 + i as f64 * 0.5).collect();
        let ds = window_columns(&inputs, &target, 3, 2).unwrap();
        let (l1, _) = bptt_gradients(&ds, &w).unwrap();
        let (l2, _) = bptt_gradients(&ds.map_targets(|t| 2.0 * t), &w).unwrap();
        let mut expected = 0.0;
        for s in 0..ds.len() {
            for (k, &t) in ds.target(s).iter().enumerate() {
                let p = w.head_b()[k];
                expected += 3.0 * t * t - 2.0 * p * t;
            }
        }
        expected /= (ds.len() * 2) as f64;
        assert!((l2 - l1 - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_rejected() {
        let w = LstmWeights::zeros(2, 1, 1);
        let inputs = Matrix::zeros(3, 1);
        let ds = window_columns(&inputs, &[0.0; 3], 1, 1).unwrap();
        assert!(matches!(batch_gradients(&ds, &[], &w), Err(Error::Empty)));
    }
}
