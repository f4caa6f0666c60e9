//! Flat `key = value` run configuration.
//!
//! Every key has a default, unknown keys are rejected, and the resolved
//! text (all keys, sorted) is what gets hashed into reports.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use stockcast::additive::{AdditiveConfig, Growth, HolidayConfig, IntervalConfig, SeasonalityConfig};
use stockcast::boosting::BoostConfig;
use stockcast::evaluation::ModelSpec;
use stockcast::lstm::{LstmSpec, TrainConfig};
use stockcast::market_data::Field;
use stockcast::sarima::{SarimaConfig, SarimaOrder};

use crate::error::CliError;

/// `(key, default, meaning)` for every accepted key.
pub const KEYS: &[(&str, &str, &str)] = &[
    ("seed", "0", "master seed for LSTM init, SARIMA restarts and interval simulation"),
    ("data.files", "", "comma-separated OHLCV CSV paths; the file stem is the symbol"),
    ("data.symbols", "", "symbols to fetch with data.url, or names overriding file stems"),
    ("data.url", "", "endpoint template with {symbol}, {start}, {end}"),
    ("data.start", "2000-01-01", "first date requested from data.url"),
    ("data.end", "2030-12-31", "last date requested from data.url"),
    ("window.lookback", "30", "LSTM input window length L"),
    ("window.horizon", "30", "forecast horizon H"),
    ("folds.count", "5", "number of rolling-origin folds"),
    ("folds.test_len", "", "bars per test window; empty means window.horizon"),
    (
        "models",
        "lstm_univariate,lstm_multivariate,sarima,additive_boost",
        "model families to run; persistence always runs as the baseline",
    ),
    ("lstm.hidden", "64", "hidden units"),
    ("lstm.epochs", "50", "training epochs"),
    ("lstm.learning_rate", "0.001", "Adam step size"),
    ("lstm.batch_size", "32", "minibatch size"),
    ("lstm.clip_norm", "1", "global gradient-norm ceiling; 0 disables clipping"),
    ("lstm.features", "open,high,low,volume", "multivariate input fields"),
    ("lstm.sentiment", "false", "append the daily sentiment score as an input channel"),
    ("additive.growth", "linear", "linear or logistic"),
    ("additive.capacity", "", "logistic capacity C"),
    ("additive.changepoints", "25", "number of potential changepoints"),
    ("additive.changepoint_range", "0.8", "fraction of history holding changepoints"),
    ("additive.lambda", "1", "L1 weight on changepoint rate adjustments"),
    ("additive.weekly_terms", "2", "Fourier terms for the 5-bar week; 0 disables"),
    ("additive.yearly_terms", "10", "Fourier terms for the 252-bar year; 0 disables"),
    ("additive.holidays", "", "file of `name,YYYY-MM-DD` lines"),
    ("additive.interval_level", "0.8", "central coverage of the uncertainty band"),
    ("additive.interval_sims", "1000", "simulated paths per interval"),
    ("additive.max_iter", "10000", "iteration cap for the trend solver"),
    ("additive.tolerance", "1e-10", "convergence tolerance for the trend solver"),
    ("boost.trees", "100", "boosting rounds"),
    ("boost.max_leaves", "15", "leaves per tree"),
    ("boost.max_depth", "8", "depth cap per tree"),
    ("boost.min_leaf", "10", "minimum samples per leaf"),
    ("boost.lambda", "1", "L2 penalty on leaf values"),
    ("boost.learning_rate", "0.1", "shrinkage per tree"),
    ("boost.max_bins", "64", "histogram bins per feature"),
    ("boost.lags", "1,2,3,5", "lagged closes used as booster features"),
    ("sarima.order", "1,1,1", "non-seasonal p,d,q"),
    ("sarima.seasonal", "3,3,1,15", "seasonal P,D,Q,m"),
    ("sarima.max_iter", "5000", "Nelder-Mead iteration cap per run"),
    ("sarima.restarts", "3", "jittered restarts after the first run"),
    ("sentiment.documents", "", "file of `date<TAB>source<TAB>text` lines"),
    ("sentiment.lexicon", "", "file of `word<TAB>category` lines"),
    ("sentiment.model", "", "saved HMM; takes precedence over sentiment.corpus"),
    ("sentiment.corpus", "", "hand-labeled `word/label` corpus used to estimate the HMM"),
    ("sentiment.labels", "positive,negative,neutral", "HMM state labels"),
    ("sentiment.series", "", "daily `date,sentiment` CSV fed to the models"),
    ("tune.model", "additive_boost", "model family searched by `tune`"),
    ("tune.budget", "10000", "maximum evaluations for `tune --grid`"),
    ("plots", "true", "write SVG and CSV plots from backtest and forecast"),
];

/// Keys holding file paths; relative values resolve against the config
/// file's directory when the file is read.
const PATH_KEYS: [&str; 7] = [
    "data.files",
    "additive.holidays",
    "sentiment.documents",
    "sentiment.lexicon",
    "sentiment.model",
    "sentiment.corpus",
    "sentiment.series",
];

const MODEL_NAMES: [&str; 4] = ["lstm_univariate", "lstm_multivariate", "sarima", "additive_boost"];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
    /// `tune.<key>` candidate lists.
    pub tune_space: BTreeMap<String, Vec<f64>>,
    /// Directory that relative paths in the text resolve against.
    base_dir: PathBuf,
}

fn err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn is_key(key: &str) -> bool {
    KEYS.iter().any(|(k, _, _)| *k == key)
}

impl RunConfig {
    pub fn defaults(base_dir: PathBuf) -> Self {
        Self {
            values: KEYS.iter().map(|(k, v, _)| (k.to_string(), v.to_string())).collect(),
            tune_space: BTreeMap::new(),
            base_dir,
        }
    }

    pub fn parse(text: &str, base_dir: PathBuf) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(base_dir);
        let mut seen = BTreeSet::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(format!("line {}: expected `key = value`", no + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("line {}: `{key}` set twice", no + 1)));
            }
            if let Some(target) = key.strip_prefix("tune.").filter(|t| !is_key(key) && is_key(t)) {
                let candidates = parse_f64_list(value).map_err(|m| err(format!("line {}: {key}: {m}", no + 1)))?;
                cfg.tune_space.insert(target.to_string(), candidates);
            } else if PATH_KEYS.contains(&key) {
                let resolved: Vec<String> = value
                    .split(',')
                    .map(str::trim)
                    .filter(|p| !p.is_empty())
                    .map(|p| cfg.resolve(p).display().to_string())
                    .collect();
                cfg.values.insert(key.to_string(), resolved.join(","));
            } else if is_key(key) {
                cfg.values.insert(key.to_string(), value.to_string());
            } else {
                return Err(err(format!("line {}: unknown key `{key}`", no + 1)));
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        match path {
            None => {
                let cfg = Self::defaults(PathBuf::from("."));
                cfg.validate()?;
                Ok(cfg)
            }
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| err(format!("{}: {e}", p.display())))?;
                let base = std::path::absolute(p)
                    .map_err(|e| err(format!("{}: {e}", p.display())))?
                    .parent()
                    .map(Path::to_path_buf)
                    .unwrap_or_default();
                Self::parse(&text, base)
            }
        }
    }

    /// Replaces one value and revalidates.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        if !is_key(key) {
            return Err(err(format!("unknown key `{key}`")));
        }
        self.values.insert(key.to_string(), value.to_string());
        self.validate()
    }

    /// Every key with its effective value, sorted, one `key = value` per
    /// line, followed by the tuning candidates.
    pub fn resolved_text(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.values {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for (k, c) in &self.tune_space {
            let list: Vec<String> = c.iter().map(f64::to_string).collect();
            out.push_str(&format!("tune.{k} = {}\n", list.join(",")));
        }
        out
    }

    pub fn get(&self, key: &str) -> &str {
        self.values.get(key).map(String::as_str).unwrap_or_default()
    }

    fn usize(&self, key: &str) -> Result<usize, CliError> {
        self.get(key)
            .parse()
            .map_err(|_| err(format!("{key} must be a non-negative integer, got `{}`", self.get(key))))
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.get(key)
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| err(format!("{key} must be a number, got `{}`", self.get(key))))
    }

    fn bool(&self, key: &str) -> Result<bool, CliError> {
        match self.get(key) {
            "true" => Ok(true),
            "false" => Ok(false),
            v => Err(err(format!("{key} must be true or false, got `{v}`"))),
        }
    }

    fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(str::to_string)
            .collect()
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        self.list(key)
            .iter()
            .map(|s| s.parse().map_err(|_| err(format!("{key}: `{s}` is not a non-negative integer"))))
            .collect()
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        let v = self.get(key);
        (!v.is_empty()).then(|| PathBuf::from(v))
    }

    fn resolve(&self, p: &str) -> PathBuf {
        let p = Path::new(p);
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn seed(&self) -> u64 {
        self.get("seed").parse().unwrap_or(0)
    }

    pub fn data_files(&self) -> Vec<PathBuf> {
        self.list("data.files").iter().map(PathBuf::from).collect()
    }

    pub fn data_symbols(&self) -> Vec<String> {
        self.list("data.symbols")
    }

    pub fn horizon(&self) -> usize {
        self.usize("window.horizon").unwrap_or(30)
    }

    pub fn fold_count(&self) -> usize {
        self.usize("folds.count").unwrap_or(5)
    }

    pub fn test_len(&self) -> usize {
        match self.get("folds.test_len") {
            "" => self.horizon(),
            v => v.parse().unwrap_or(self.horizon()),
        }
    }

    pub fn plots(&self) -> bool {
        self.bool("plots").unwrap_or(true)
    }

    pub fn model_names(&self) -> Vec<String> {
        self.list("models")
    }

    pub fn tune_budget(&self) -> usize {
        self.usize("tune.budget").unwrap_or(10_000)
    }

    fn train_config(&self) -> Result<TrainConfig, CliError> {
        let clip = self.f64("lstm.clip_norm")?;
        Ok(TrainConfig {
            hidden: self.usize("lstm.hidden")?,
            epochs: self.usize("lstm.epochs")?,
            learning_rate: self.f64("lstm.learning_rate")?,
            seed: self.seed(),
            clip_norm: (clip > 0.0).then_some(clip),
            batch_size: self.usize("lstm.batch_size")?,
        })
    }

    pub fn lstm_spec(&self, multivariate: bool) -> Result<LstmSpec, CliError> {
        let (l, h) = (self.usize("window.lookback")?, self.usize("window.horizon")?);
        let mut spec = if multivariate {
            let mut s = LstmSpec::multivariate(l, h, self.train_config()?);
            s.features = self
                .list("lstm.features")
                .iter()
                .map(|f| Field::parse(f).map_err(|e| err(format!("lstm.features: {e}"))))
                .collect::<Result<_, _>>()?;
            s
        } else {
            LstmSpec::univariate(l, h, self.train_config()?)
        };
        spec.use_sentiment = self.bool("lstm.sentiment")?;
        Ok(spec)
    }

    pub fn additive_config(&self) -> Result<AdditiveConfig, CliError> {
        let growth = match self.get("additive.growth") {
            "linear" => Growth::Linear,
            "logistic" => Growth::Logistic {
                capacity: self.f64("additive.capacity")?,
            },
            g => return Err(err(format!("additive.growth must be linear or logistic, got `{g}`"))),
        };
        let mut seasonalities = Vec::new();
        for (key, period) in [("additive.weekly_terms", 5.0), ("additive.yearly_terms", 252.0)] {
            let terms = self.usize(key)?;
            if terms > 0 {
                seasonalities.push(SeasonalityConfig { period, terms });
            }
        }
        Ok(AdditiveConfig {
            growth,
            n_changepoints: self.usize("additive.changepoints")?,
            changepoint_range: self.f64("additive.changepoint_range")?,
            seasonalities,
            holidays: self.holidays()?,
            lambda_delta: self.f64("additive.lambda")?,
            max_iter: self.usize("additive.max_iter")?,
            tolerance: self.f64("additive.tolerance")?,
        })
    }

    fn holidays(&self) -> Result<Vec<HolidayConfig>, CliError> {
        let Some(path) = self.path("additive.holidays") else {
            return Ok(Vec::new());
        };
        let text = std::fs::read_to_string(&path).map_err(|e| err(format!("{}: {e}", path.display())))?;
        let mut by_name: BTreeMap<String, HolidayConfig> = BTreeMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || err(format!("{}:{}: expected `name,YYYY-MM-DD`", path.display(), no + 1));
            let (name, date) = line.split_once(',').ok_or_else(bad)?;
            let date = chrono::NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").map_err(|_| bad())?;
            by_name
                .entry(name.trim().to_string())
                .or_insert_with(|| HolidayConfig {
                    name: name.trim().to_string(),
                    dates: BTreeSet::new(),
                })
                .dates
                .insert(date);
        }
        Ok(by_name.into_values().collect())
    }

    pub fn interval_config(&self) -> Result<IntervalConfig, CliError> {
        Ok(IntervalConfig {
            n_sims: self.usize("additive.interval_sims")?,
            level: self.f64("additive.interval_level")?,
            seed: self.seed(),
        })
    }

    pub fn boost_config(&self) -> Result<BoostConfig, CliError> {
        Ok(BoostConfig {
            n_trees: self.usize("boost.trees")?,
            max_leaves: self.usize("boost.max_leaves")?,
            max_depth: self.usize("boost.max_depth")?,
            min_samples_leaf: self.usize("boost.min_leaf")?,
            l2_leaf_penalty: self.f64("boost.lambda")?,
            learning_rate: self.f64("boost.learning_rate")?,
            max_bins: self.usize("boost.max_bins")?,
        })
    }

    pub fn lags(&self) -> Result<Vec<usize>, CliError> {
        self.usize_list("boost.lags")
    }

    pub fn sarima(&self) -> Result<(SarimaOrder, SarimaConfig), CliError> {
        let o = self.usize_list("sarima.order")?;
        let s = self.usize_list("sarima.seasonal")?;
        if o.len() != 3 || s.len() != 4 {
            return Err(err("sarima.order needs p,d,q and sarima.seasonal needs P,D,Q,m"));
        }
        Ok((
            SarimaOrder::new(o[0], o[1], o[2], s[0], s[1], s[2], s[3]),
            SarimaConfig {
                max_iter: self.usize("sarima.max_iter")?,
                restarts: self.usize("sarima.restarts")?,
                seed: self.seed(),
            },
        ))
    }

    pub fn model_spec(&self, name: &str) -> Result<ModelSpec, CliError> {
        Ok(match name {
            "persistence" => ModelSpec::Persistence,
            "lstm_univariate" | "lstm_multivariate" => ModelSpec::Lstm {
                name: name.to_string(),
                spec: self.lstm_spec(name == "lstm_multivariate")?,
            },
            "sarima" => {
                let (order, config) = self.sarima()?;
                ModelSpec::Sarima { order, config }
            }
            "additive_boost" => ModelSpec::AdditiveBoost {
                additive: self.additive_config()?,
                boost: self.boost_config()?,
                lags: self.lags()?,
                interval: Some(self.interval_config()?),
            },
            other => return Err(err(format!("unknown model `{other}`; expected one of {}", MODEL_NAMES.join(", ")))),
        })
    }

    /// Persistence first, then the configured families in config order.
    pub fn model_specs(&self) -> Result<Vec<ModelSpec>, CliError> {
        let mut specs = vec![ModelSpec::Persistence];
        for name in self.model_names() {
            specs.push(self.model_spec(&name)?);
        }
        Ok(specs)
    }

    /// Builds every typed view once so that bad values fail before any work.
    pub fn validate(&self) -> Result<(), CliError> {
        self.get("seed")
            .parse::<u64>()
            .map_err(|_| err(format!("seed must be a non-negative integer, got `{}`", self.get("seed"))))?;
        for key in ["window.lookback", "window.horizon", "folds.count", "tune.budget"] {
            if self.usize(key)? == 0 {
                return Err(err(format!("{key} must be at least 1")));
            }
        }
        if !self.get("folds.test_len").is_empty() && self.usize("folds.test_len")? == 0 {
            return Err(err("folds.test_len must be at least 1"));
        }
        self.bool("plots")?;
        let names = self.model_names();
        let mut seen = BTreeSet::new();
        for n in &names {
            if !MODEL_NAMES.contains(&n.as_str()) {
                return Err(err(format!("unknown model `{n}`; expected one of {}", MODEL_NAMES.join(", "))));
            }
            if !seen.insert(n) {
                return Err(err(format!("model `{n}` listed twice")));
            }
        }
        let specs = self.model_specs()?;
        for spec in &specs {
            match spec {
                ModelSpec::Lstm { spec, .. } => {
                    spec.train.validate()?;
                    if self.test_len() != spec.horizon {
                        return Err(err("LSTM models forecast window.horizon bars; folds.test_len must match"));
                    }
                }
                ModelSpec::AdditiveBoost { additive, boost, .. } => {
                    additive.validate()?;
                    boost.validate()?;
                }
                ModelSpec::Sarima { order, .. } => order.validate()?,
                ModelSpec::Persistence => {}
            }
        }
        if !MODEL_NAMES.contains(&self.get("tune.model")) {
            return Err(err(format!("tune.model `{}` is not a model family", self.get("tune.model"))));
        }
        for key in self.tune_space.keys() {
            if key == "seed" || key.starts_with("data.") || key.starts_with("sentiment.") || key.starts_with("tune.") {
                return Err(err(format!("tune.{key}: only model and window settings can be tuned")));
            }
        }
        Ok(())
    }
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>, String> {
    let values: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", s.trim())))
        .collect::<Result<_, _>>()?;
    if values.is_empty() {
        return Err("empty candidate list".into());
    }
    Ok(values)
}
