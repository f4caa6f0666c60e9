//! Single-layer LSTM with a direct multistep head, trained from scratch.

mod adam;
mod cell;
mod train;
mod weights;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use cell::{bptt_gradients, dataset_loss, forward_sequence, lstm_cell_forward, GateRecord, LstmState};
pub use train::{train, TrainConfig};
pub use weights::{clip_gradients, Gate, LstmWeights};

use crate::market_data::{window_columns, Field, OhlcvSeries, ScaleParams};
use crate::textfmt::{fmt_opt_f64, parse_opt_f64, Reader, Writer};
use crate::{Error, Matrix, Result};

/// Inverse-scales a forecast for `recent_window` back to price units.
///
/// `recent_window` is the scaled `lookback x input` matrix; `target_col`
/// selects the scale column that holds the target.
pub fn predict_multistep(
    w: &LstmWeights,
    recent_window: &Matrix,
    scale: &ScaleParams,
    target_col: usize,
) -> Result<Vec<f64>> {
    if target_col >= scale.len() {
        return Err(Error::Dimension(format!(
            "scale has {} columns, target column is {target_col}",
            scale.len()
        )));
    }
    let scaled = forward_sequence(recent_window, w)?;
    Ok(scaled
        .into_iter()
        .map(|v| scale.unscale_value(target_col, v))
        .collect())
}

/// What to feed the network and how to train it.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmSpec {
    pub features: Vec<Field>,
    pub target: Field,
    pub lookback: usize,
    pub horizon: usize,
    /// Append the daily sentiment score as an extra input channel.
    pub use_sentiment: bool,
    pub train: TrainConfig,
}

impl LstmSpec {
    /// Close price in, close price out.
    pub fn univariate(lookback: usize, horizon: usize, train: TrainConfig) -> Self {
        Self {
            features: vec![Field::Close],
            target: Field::Close,
            lookback,
            horizon,
            use_sentiment: false,
            train,
        }
    }

    /// Open, high, low and volume in; close out.
    pub fn multivariate(lookback: usize, horizon: usize, train: TrainConfig) -> Self {
        Self {
            features: vec![Field::Open, Field::High, Field::Low, Field::Volume],
            target: Field::Close,
            lookback,
            horizon,
            use_sentiment: false,
            train,
        }
    }

    fn input_width(&self) -> usize {
        self.features.len() + usize::from(self.use_sentiment)
    }

    /// Unscaled matrix: feature columns, the optional sentiment column, then
    /// the target column when it is not already an input. Returns the
    /// matrix and the target's column index.
    fn raw_matrix(&self, series: &OhlcvSeries, sentiment: Option<&[f64]>) -> Result<(Matrix, usize)> {
        if self.features.is_empty() {
            return Err(Error::Config("lstm needs at least one input feature".into()));
        }
        let mut columns: Vec<Vec<f64>> = self.features.iter().map(|&f| series.field(f)).collect();
        if self.use_sentiment {
            let s = sentiment.ok_or_else(|| Error::Config("lstm sentiment channel needs a sentiment series".into()))?;
            if s.len() != series.len() {
                return Err(Error::Dimension(format!(
                    "sentiment has {} rows, series has {}",
                    s.len(),
                    series.len()
                )));
            }
            columns.push(s.to_vec());
        }
        let target_col = match self.features.iter().position(|&f| f == self.target) {
            Some(i) => i,
            None => {
                columns.push(series.field(self.target));
                columns.len() - 1
            }
        };
        Ok((Matrix::from_columns(&columns)?, target_col))
    }

    fn fit_scale(&self, raw: &Matrix) -> Result<ScaleParams> {
        let mut scale = ScaleParams::fit(&self.price_columns(raw)?)?;
        if self.use_sentiment {
            // scores already live in [-1, 1] and may be constant in a fold
            let at = self.features.len();
            scale.min.insert(at, -1.0);
            scale.max.insert(at, 1.0);
        }
        Ok(scale)
    }

    fn price_columns(&self, raw: &Matrix) -> Result<Matrix> {
        let keep: Vec<usize> = (0..raw.cols())
            .filter(|&j| !(self.use_sentiment && j == self.features.len()))
            .collect();
        raw.select_columns(&keep)
    }
}

/// A trained network together with its scaling and input layout.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmForecaster {
    pub spec: LstmSpec,
    pub weights: LstmWeights,
    pub scale: ScaleParams,
    pub target_col: usize,
    pub loss_history: Vec<f64>,
}

impl LstmForecaster {
    /// Scales on `series` only, windows it, and trains.
    pub fn fit(series: &OhlcvSeries, sentiment: Option<&[f64]>, spec: &LstmSpec) -> Result<Self> {
        let (raw, target_col) = spec.raw_matrix(series, sentiment)?;
        let scale = spec.fit_scale(&raw)?;
        let scaled = scale.transform(&raw)?;
        let inputs = scaled.select_columns(&(0..spec.input_width()).collect::<Vec<_>>())?;
        let dataset = window_columns(&inputs, &scaled.column(target_col), spec.lookback, spec.horizon)?;
        let (weights, loss_history) = train(&dataset, &spec.train)?;
        Ok(Self {
            spec: spec.clone(),
            weights,
            scale,
            target_col,
            loss_history,
        })
    }

    /// Forecasts the `horizon` closes following the last bar of `recent`.
    pub fn forecast(&self, recent: &OhlcvSeries, sentiment: Option<&[f64]>) -> Result<Vec<f64>> {
        let l = self.spec.lookback;
        if recent.len() < l {
            return Err(Error::TooShort {
                needed: l,
                actual: recent.len(),
            });
        }
        let (raw, _) = self.spec.raw_matrix(recent, sentiment)?;
        let scaled = self.scale.transform(&raw)?;
        let window = scaled
            .slice_rows(scaled.rows() - l, scaled.rows())
            .select_columns(&(0..self.spec.input_width()).collect::<Vec<_>>())?;
        predict_multistep(&self.weights, &window, &self.scale, self.target_col)
    }

    /// Text model file; see the README for the layout.
    pub fn save(&self) -> String {
        let s = &self.spec;
        let mut w = Writer::new(LSTM_MAGIC);
        w.field("hidden", self.weights.hidden())
            .field("input", self.weights.input())
            .field("horizon", self.weights.horizon())
            .field("lookback", s.lookback)
            .field(
                "features",
                s.features.iter().map(|f| f.name()).collect::<Vec<_>>().join(","),
            )
            .field("target", s.target.name())
            .field("sentiment", u8::from(s.use_sentiment))
            .field("target_col", self.target_col)
            .field("epochs", s.train.epochs)
            .field("learning_rate", s.train.learning_rate)
            .field("seed", s.train.seed)
            .field("clip_norm", fmt_opt_f64(s.train.clip_norm))
            .field("batch_size", s.train.batch_size)
            .floats("scale_min", &self.scale.min)
            .floats("scale_max", &self.scale.max)
            .floats("loss_history", &self.loss_history)
            .field("params", self.weights.as_slice().len());
        let mut out = w.finish();
        for v in self.weights.as_slice() {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn load(text: &str) -> Result<Self> {
        let mut r = Reader::new(text, LSTM_MAGIC)?;
        let hidden: usize = r.parse("hidden")?;
        let input: usize = r.parse("input")?;
        let horizon: usize = r.parse("horizon")?;
        let lookback: usize = r.parse("lookback")?;
        let features = r
            .field("features")?
            .split(',')
            .map(Field::parse)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::Format(e.to_string()))?;
        let target = Field::parse(r.field("target")?).map_err(|e| Error::Format(e.to_string()))?;
        let use_sentiment = r.parse::<u8>("sentiment")? == 1;
        let target_col: usize = r.parse("target_col")?;
        let train = TrainConfig {
            hidden,
            epochs: r.parse("epochs")?,
            learning_rate: r.parse("learning_rate")?,
            seed: r.parse("seed")?,
            clip_norm: parse_opt_f64(r.field("clip_norm")?)?,
            batch_size: r.parse("batch_size")?,
        };
        let min = r.floats("scale_min")?;
        let max = r.floats_len("scale_max", min.len())?;
        let loss_history = r.floats("loss_history")?;
        let n: usize = r.parse("params")?;
        let params = text
            .lines()
            .rev()
            .take(n)
            .collect::<Vec<_>>()
            .into_iter()
            .rev()
            .map(|l| l.trim().parse::<f64>().map_err(|_| Error::Format(format!("bad parameter `{l}`"))))
            .collect::<Result<Vec<_>>>()?;
        let weights = LstmWeights::from_params(hidden, input, horizon, params)
            .map_err(|e| Error::Format(e.to_string()))?;
        let spec = LstmSpec {
            features,
            target,
            lookback,
            horizon,
            use_sentiment,
            train,
        };
        if spec.input_width() != input || target_col >= min.len() {
            return Err(Error::Format("input layout does not match stored dimensions".into()));
        }
        Ok(Self {
            spec,
            weights,
            scale: ScaleParams { min, max },
            target_col,
            loss_history,
        })
    }
}

const LSTM_MAGIC: &str = "stockcast-lstm v1";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic;

    #[test]
    fn affine_inverse_of_prediction() {
        let mut w = LstmWeights::zeros(2, 1, 1);
        w.head_b_mut()[0] = 0.5;
        let scale = ScaleParams {
            min: vec![100.0],
            max: vec![200.0],
        };
        let window = Matrix::zeros(3, 1);
        assert_eq!(predict_multistep(&w, &window, &scale, 0).unwrap(), vec![150.0]);
        assert!(matches!(
            predict_multistep(&w, &window, &scale, 1),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn identity_scale_matches_forward() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let w = LstmWeights::init(3, 2, 4, &mut rng);
        let window = Matrix::from_vec(5, 2, (0..10).map(|v| v as f64 * 0.1).collect()).unwrap();
        let a = predict_multistep(&w, &window, &ScaleParams::identity(2), 1).unwrap();
        assert_eq!(a, forward_sequence(&window, &w).unwrap());
    }

    fn small_spec() -> LstmSpec {
        LstmSpec::multivariate(
            6,
            3,
            TrainConfig {
                hidden: 3,
                epochs: 3,
                ..TrainConfig::default()
            },
        )
    }

    #[test]
    fn save_load_round_trip_is_exact() {
        let series = synthetic::ohlcv("T", 80, 4);
        let model = LstmForecaster::fit(&series, None, &small_spec()).unwrap();
        let loaded = LstmForecaster::load(&model.save()).unwrap();
        assert_eq!(loaded, model);
        assert_eq!(
            loaded.forecast(&series, None).unwrap(),
            model.forecast(&series, None).unwrap()
        );
    }

    #[test]
    fn forecast_composes_forward_and_inverse_scale() {
        let series = synthetic::ohlcv("T", 60, 5);
        let model = LstmForecaster::fit(&series, None, &small_spec()).unwrap();
        let raw = series.matrix(&[Field::Open, Field::High, Field::Low, Field::Volume, Field::Close]);
        let scaled = model.scale.transform(&raw).unwrap();
        let window = scaled.slice_rows(54, 60).select_columns(&[0, 1, 2, 3]).unwrap();
        let manual: Vec<f64> = forward_sequence(&window, &model.weights)
            .unwrap()
            .into_iter()
            .map(|v| v * (model.scale.max[4] - model.scale.min[4]) + model.scale.min[4])
            .collect();
        assert_eq!(model.forecast(&series, None).unwrap(), manual);
    }

    #[test]
    fn sentiment_channel_is_fixed_range() {
        let series = synthetic::ohlcv("T", 60, 5);
        let mut spec = small_spec();
        spec.use_sentiment = true;
        let zeros = vec![0.0; 60];
        let model = LstmForecaster::fit(&series, Some(&zeros), &spec).unwrap();
        assert_eq!(model.weights.input(), 5);
        assert_eq!((model.scale.min[4], model.scale.max[4]), (-1.0, 1.0));
        assert!(LstmForecaster::fit(&series, None, &spec).is_err());
    }
}
