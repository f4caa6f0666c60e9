use stockcast::sentiment::{
    align_sentiment, parse_documents, parse_labeled_corpus, score_documents, supervised_estimate, viterbi, HmmModel,
    Lexicon, SentimentSeries, VOCAB_SIZE,
};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{read_text, write_atomic, Workspace};

pub fn run(cfg: &RunConfig, ws: &Workspace) -> Result<(), CliError> {
    let lexicon_path = cfg
        .path("sentiment.lexicon")
        .ok_or_else(|| CliError::Config("sentiment.lexicon is not set".into()))?;
    let docs_path = cfg
        .path("sentiment.documents")
        .ok_or_else(|| CliError::Config("sentiment.documents is not set".into()))?;
    let lexicon = Lexicon::parse(&read_text(&lexicon_path)?)?;
    let model = load_model(cfg, ws, &lexicon)?;
    let docs = parse_documents(&read_text(&docs_path)?, &lexicon)?;

    let series = if docs.is_empty() {
        log::warn!("{} holds no scorable documents; writing an empty score file", docs_path.display());
        SentimentSeries::default()
    } else {
        let rejected: Vec<String> = docs
            .iter()
            .filter_map(|d| viterbi(&model, &d.tokens).err().map(|e| format!("{} {}: {e}", d.date, d.source)))
            .collect();
        if !rejected.is_empty() {
            for r in &rejected {
                eprintln!("{r}");
            }
            return Err(CliError::Data(format!("{} documents cannot be decoded", rejected.len())));
        }
        score_documents(&model, &docs)?
    };
    write_atomic(&ws.sentiment_file(), series.to_csv().as_bytes())?;
    println!("{} dated scores from {} documents", series.scores.len(), docs.len());

    for symbol in ws.ingested_symbols()? {
        let text = read_text(&ws.series_file(&symbol))?;
        let bars = stockcast::market_data::parse_csv(text.as_bytes(), &symbol)?;
        let dates = bars.dates();
        let aligned = align_sentiment(&dates, &series);
        let mut out = String::from("date,sentiment\n");
        for (d, s) in dates.iter().zip(&aligned) {
            out.push_str(&format!("{d},{s}\n"));
        }
        write_atomic(&ws.root.join(format!("sentiment_{symbol}.csv")), out.as_bytes())?;
    }
    super::write_resolved(cfg, ws, "sentiment")
}

/// A saved HMM, or one estimated from the labeled corpus (and saved to
/// the workspace).
fn load_model(cfg: &RunConfig, ws: &Workspace, lexicon: &Lexicon) -> Result<HmmModel, CliError> {
    if let Some(p) = cfg.path("sentiment.model") {
        return Ok(HmmModel::load(&read_text(&p)?)?);
    }
    let Some(p) = cfg.path("sentiment.corpus") else {
        return Err(CliError::Config("set sentiment.model or sentiment.corpus".into()));
    };
    let labels: Vec<String> = cfg
        .get("sentiment.labels")
        .split(',')
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .collect();
    let corpus = parse_labeled_corpus(&read_text(&p)?, lexicon, &labels)?;
    let model = supervised_estimate(&corpus, &labels, VOCAB_SIZE)?;
    write_atomic(&ws.root.join("hmm.txt"), model.save().as_bytes())?;
    Ok(model)
}
