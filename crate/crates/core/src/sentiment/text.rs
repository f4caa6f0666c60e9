//! Tokenization, the category lexicon and the document/corpus file formats.

use std::collections::HashMap;

use chrono::NaiveDate;

use super::estimate::LabeledSequence;
use crate::{Error, Result};

/// Token categories forming the observation vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    StrongPositive = 0,
    Positive = 1,
    Neutral = 2,
    Negative = 3,
    StrongNegative = 4,
    Numeric = 5,
    Other = 6,
}

pub const VOCAB_SIZE: usize = 7;

impl Category {
    pub const ALL: [Category; VOCAB_SIZE] = [
        Category::StrongPositive,
        Category::Positive,
        Category::Neutral,
        Category::Negative,
        Category::StrongNegative,
        Category::Numeric,
        Category::Other,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::StrongPositive => "strong_positive",
            Category::Positive => "positive",
            Category::Neutral => "neutral",
            Category::Negative => "negative",
            Category::StrongNegative => "strong_negative",
            Category::Numeric => "numeric",
            Category::Other => "other",
        }
    }

    /// Accepts the numeric id or the name.
    pub fn parse(s: &str) -> Option<Category> {
        let s = s.trim();
        if let Ok(id) = s.parse::<usize>() {
            return Category::ALL.get(id).copied();
        }
        Category::ALL.iter().copied().find(|c| c.name() == s)
    }
}

/// Lowercased alphanumeric tokens with URLs and `@handles` removed.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter(|w| {
            let lw = w.to_lowercase();
            !(lw.starts_with("http://") || lw.starts_with("https://") || lw.starts_with("www.") || lw.starts_with('@'))
        })
        .flat_map(|w| {
            w.split(|c: char| !c.is_alphanumeric())
                .filter(|t| !t.is_empty())
                .map(|t| t.to_lowercase())
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Word → category map. Unknown words are `other`, unknown numbers
/// `numeric`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Lexicon {
    words: HashMap<String, Category>,
}

impl Lexicon {
    /// Parse `word<TAB>category` lines; `#` starts a comment line.
    pub fn parse(text: &str) -> Result<Self> {
        let mut words = HashMap::new();
        for (no, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (word, cat) = line.split_once('\t').ok_or_else(|| Error::MalformedRow {
                line: no as u64 + 1,
                message: "expected `word<TAB>category`".into(),
            })?;
            let category = Category::parse(cat).ok_or_else(|| Error::MalformedRow {
                line: no as u64 + 1,
                message: format!("unknown category `{cat}`"),
            })?;
            words.insert(word.trim().to_lowercase(), category);
        }
        Ok(Self { words })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn category(&self, token: &str) -> Category {
        match self.words.get(token) {
            Some(c) => *c,
            None if token.chars().all(|c| c.is_ascii_digit()) => Category::Numeric,
            None => Category::Other,
        }
    }

    pub fn encode(&self, text: &str) -> Vec<usize> {
        tokenize(text).iter().map(|t| self.category(t) as usize).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    pub date: NaiveDate,
    pub source: String,
    pub tokens: Vec<usize>,
}

/// Parse `date<TAB>source<TAB>text` lines. Documents with no tokens are
/// skipped.
pub fn parse_documents(text: &str, lexicon: &Lexicon) -> Result<Vec<DocumentRecord>> {
    let mut docs = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| Error::MalformedRow {
            line: no as u64 + 1,
            message,
        };
        let mut parts = line.splitn(3, '\t');
        let (Some(date), Some(source), Some(body)) = (parts.next(), parts.next(), parts.next()) else {
            return Err(malformed("expected `date<TAB>source<TAB>text`".into()));
        };
        let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d").map_err(|e| malformed(format!("date: {e}")))?;
        let tokens = lexicon.encode(body);
        if tokens.is_empty() {
            log::debug!("line {}: document has no tokens", no + 1);
            continue;
        }
        docs.push(DocumentRecord {
            date,
            source: source.trim().to_string(),
            tokens,
        });
    }
    Ok(docs)
}

/// Parse a hand-labeled corpus: one sequence per line of
/// whitespace-separated `word/label` pairs.
pub fn parse_labeled_corpus(text: &str, lexicon: &Lexicon, labels: &[String]) -> Result<Vec<LabeledSequence>> {
    let mut out = Vec::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut seq = LabeledSequence::default();
        for pair in line.split_whitespace() {
            let (word, label) = pair.rsplit_once('/').ok_or_else(|| Error::MalformedRow {
                line: no as u64 + 1,
                message: format!("`{pair}` is not `word/label`"),
            })?;
            let state = labels.iter().position(|l| l == label).ok_or_else(|| {
                Error::Config(format!("line {}: unseen state label `{label}`", no + 1))
            })?;
            let word = word.to_lowercase();
            seq.tokens.push(lexicon.category(&word) as usize);
            seq.states.push(state);
        }
        out.push(seq);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tokenizer_hygiene() {
        assert_eq!(
            tokenize("Shares SURGE 5% after @acme's report https://x.co/abc, see www.site.com!"),
            vec!["shares", "surge", "5", "after", "report", "see"]
        );
    }

    #[test]
    fn lexicon_lookup() {
        let lex = Lexicon::parse("surge\t0\nslump\tstrong_negative\n# comment\n").unwrap();
        assert_eq!(lex.category("surge"), Category::StrongPositive);
        assert_eq!(lex.category("slump"), Category::StrongNegative);
        assert_eq!(lex.category("42"), Category::Numeric);
        assert_eq!(lex.category("zebra"), Category::Other);
        assert!(Lexicon::parse("bad line").is_err());
        assert!(Lexicon::parse("w\t9").is_err());
    }

    #[test]
    fn documents_and_corpus() {
        let lex = Lexicon::parse("gain\t1\nloss\t3\n").unwrap();
        let docs = parse_documents("2024-01-02\twire\tGain gain loss\n\n2024-01-03\ttweet\t@x\n", &lex).unwrap();
        assert_eq!(docs.len(), 1);
        assert_eq!(docs[0].tokens, vec![1, 1, 3]);
        assert!(parse_documents("2024-01-02 wire text", &lex).is_err());

        let labels: Vec<String> = ["positive", "negative", "neutral"].iter().map(|s| s.to_string()).collect();
        let corpus = parse_labeled_corpus("gain/positive loss/negative the/neutral\n", &lex, &labels).unwrap();
        assert_eq!(corpus[0].tokens, vec![1, 3, 6]);
        assert_eq!(corpus[0].states, vec![0, 1, 2]);
        assert!(matches!(
            parse_labeled_corpus("gain/bullish", &lex, &labels),
            Err(Error::Config(_))
        ));
    }
}
