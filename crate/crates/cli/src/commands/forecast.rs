use stockcast::additive::predict_with_interval;
use stockcast::boosting::HybridModel;
use stockcast::evaluation::Band;
use stockcast::lstm::LstmForecaster;
use stockcast::market_data::next_trading_days;
use stockcast::sarima::SarimaModel;
use stockcast::sentiment::align_sentiment;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{read_text, write_atomic, Workspace};
use crate::plot::Plot;

pub fn run(cfg: &RunConfig, ws: &Workspace) -> Result<(), CliError> {
    let series = super::load_series(ws)?;
    let sentiment = super::load_sentiment(cfg)?;
    let mut written = 0;
    for s in &series {
        let last = s.bars.last().ok_or(stockcast::Error::Empty)?.date;
        for name in cfg.model_names() {
            let path = ws.model_file(&name, &s.symbol);
            if !path.exists() {
                log::warn!("{} has no trained {name} model; run `stockcast train`", s.symbol);
                continue;
            }
            let text = read_text(&path)?;
            let mut band = None;
            let predicted = match name.as_str() {
                "lstm_univariate" | "lstm_multivariate" => {
                    let model = LstmForecaster::load(&text)?;
                    let aligned = sentiment.as_ref().map(|x| align_sentiment(&s.dates(), x));
                    let input = if model.spec.use_sentiment { aligned.as_deref() } else { None };
                    model.forecast(s, input)?
                }
                "additive_boost" => {
                    let model = HybridModel::load(&text)?;
                    let dates = next_trading_days(last, cfg.horizon());
                    let predicted = model.forecast(&dates, None)?;
                    let points = predict_with_interval(&model.additive, &dates, None, &cfg.interval_config()?)?;
                    let (lower, upper) = points
                        .iter()
                        .zip(&predicted)
                        .map(|(p, y)| (p.lower - p.mean + y, p.upper - p.mean + y))
                        .unzip();
                    band = Some(Band { lower, upper });
                    predicted
                }
                "sarima" => SarimaModel::load(&text)?.forecast(cfg.horizon())?,
                other => return Err(CliError::Config(format!("unknown model `{other}`"))),
            };
            let dates = next_trading_days(last, predicted.len());
            let plot = Plot {
                title: format!("{} {name} forecast", s.symbol),
                dates: &dates,
                actual: None,
                predicted: &predicted,
                band: band.as_ref(),
            };
            let stem = format!("{name}_{}", s.symbol);
            write_atomic(&ws.forecast_dir().join(format!("{stem}.csv")), plot.points_csv().as_bytes())?;
            if cfg.plots() {
                write_atomic(&ws.forecast_dir().join(format!("{stem}.svg")), plot.svg().as_bytes())?;
            }
            println!("{} {name}: {} steps from {}", s.symbol, predicted.len(), dates[0]);
            written += 1;
        }
    }
    super::write_resolved(cfg, ws, "forecast")?;
    if written == 0 {
        return Err(CliError::Data("no trained models found; run `stockcast train` first".into()));
    }
    Ok(())
}
