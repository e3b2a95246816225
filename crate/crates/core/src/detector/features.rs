use std::fmt::Write as _;

use crate::text;
use crate::{Error, Result};

pub const REGISTRY_VERSION: &str = "lexical-12-v1";

/// Feature names in registry order.
pub const FEATURE_NAMES: [&str; 12] = [
    "word_count",
    "mean_word_length",
    "starts_with_digit",
    "contains_digit",
    "question_word_start",
    "second_person_count",
    "demonstrative_start",
    "exclamation_count",
    "question_mark_count",
    "uppercase_word_fraction",
    "stopword_fraction",
    "lexicon_hits",
];

const QUESTION_WORDS: [&str; 6] = ["who", "what", "when", "where", "why", "how"];
const SECOND_PERSON: [&str; 3] = ["you", "your", "yours"];
const DEMONSTRATIVES: [&str; 4] = ["this", "these", "that", "those"];

pub(crate) const DEFAULT_LEXICON: &str = include_str!("../../data/lexicon.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub values: Vec<f64>,
    pub registry_version: String,
}

impl FeatureVector {
    /// Comma-separated values in registry order, as stored in the `detector`
    /// column. Uses the shortest representation that round-trips.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 6);
        for (i, v) in self.values.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{v}");
        }
        out
    }

    pub fn from_csv(csv: &str, registry_version: &str) -> Result<Self> {
        let values = csv
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Input(format!("bad feature value {v:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            values,
            registry_version: registry_version.to_string(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum PhraseToken {
    Word(String),
    Number,
}

/// The 12-feature lexical registry plus its phrase lexicon.
#[derive(Debug, Clone)]
pub struct FeatureExtractor {
    phrases: Vec<String>,
    compiled: Vec<Vec<PhraseToken>>,
}

impl Default for FeatureExtractor {
    fn default() -> Self {
        Self::with_lexicon(parse_lexicon(DEFAULT_LEXICON))
    }
}

/// Lexicon file format: one phrase per line, `#` starts a comment line.
pub(crate) fn parse_lexicon(text: &str) -> Vec<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(str::to_string)
        .collect()
}

impl FeatureExtractor {
    pub fn with_lexicon(phrases: Vec<String>) -> Self {
        let compiled = phrases
            .iter()
            .map(|p| {
                p.split_whitespace()
                    .map(|w| {
                        if w == "N" {
                            PhraseToken::Number
                        } else {
                            PhraseToken::Word(text::fold_token(w))
                        }
                    })
                    .collect::<Vec<_>>()
            })
            .filter(|p| !p.is_empty())
            .collect();
        Self { phrases, compiled }
    }

    pub fn lexicon(&self) -> &[String] {
        &self.phrases
    }

    pub fn registry_version(&self) -> &'static str {
        REGISTRY_VERSION
    }

    pub fn len(&self) -> usize {
        FEATURE_NAMES.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn extract(&self, headline: &str) -> Result<FeatureVector> {
        let words: Vec<&str> = headline.split_whitespace().collect();
        if words.is_empty() {
            return Err(Error::Input("cannot extract features from empty text".into()));
        }
        let tokens: Vec<String> = words.iter().map(|w| text::fold_token(w)).collect();
        let n = words.len() as f64;
        let first = tokens[0].as_str();

        let mean_len = words.iter().map(|w| w.chars().count()).sum::<usize>() as f64 / n;
        let starts_digit = headline.trim_start().starts_with(|c: char| c.is_ascii_digit());
        let has_digit = headline.chars().any(|c| c.is_ascii_digit());
        let second_person = tokens
            .iter()
            .filter(|t| SECOND_PERSON.contains(&t.as_str()))
            .count();
        let (mut bangs, mut questions) = (0usize, 0usize);
        for c in headline.chars() {
            match c {
                '!' => bangs += 1,
                '?' => questions += 1,
                _ => {}
            }
        }
        let uppercase = words.iter().filter(|w| is_uppercase_word(w)).count();
        let stopwords = tokens.iter().filter(|t| text::is_stopword(t)).count();

        let values = vec![
            n,
            mean_len,
            indicator(starts_digit),
            indicator(has_digit),
            indicator(QUESTION_WORDS.contains(&first)),
            second_person as f64,
            indicator(DEMONSTRATIVES.contains(&first)),
            bangs as f64,
            questions as f64,
            uppercase as f64 / n,
            stopwords as f64 / n,
            self.lexicon_hits(&tokens) as f64,
        ];
        Ok(FeatureVector {
            values,
            registry_version: REGISTRY_VERSION.to_string(),
        })
    }

    fn lexicon_hits(&self, tokens: &[String]) -> usize {
        self.compiled
            .iter()
            .map(|phrase| {
                if phrase.len() > tokens.len() {
                    return 0;
                }
                tokens
                    .windows(phrase.len())
                    .filter(|window| {
                        window.iter().zip(phrase).all(|(tok, want)| match want {
                            PhraseToken::Word(w) => tok == w,
                            PhraseToken::Number => {
                                !tok.is_empty() && tok.chars().all(|c| c.is_ascii_digit())
                            }
                        })
                    })
                    .count()
            })
            .sum()
    }
}

fn indicator(b: bool) -> f64 {
    if b {
        1.0
    } else {
        0.0
    }
}

/// At least one letter and no lowercase letters.
fn is_uppercase_word(word: &str) -> bool {
    let mut has_letter = false;
    for c in word.chars().filter(|c| c.is_alphabetic()) {
        if c.is_lowercase() {
            return false;
        }
        has_letter = true;
    }
    has_letter
}

#[cfg(test)]
mod tests {
    use super::*;

    fn features(text: &str) -> Vec<f64> {
        FeatureExtractor::default().extract(text).unwrap().values
    }

    #[test]
    fn you_wont_believe() {
        let f = features("You Won't Believe What Happened Next");
        assert_eq!(f.len(), 12);
        assert_eq!(f[0], 6.0);
        assert_eq!(f[2], 0.0);
        assert_eq!(f[4], 0.0);
        assert_eq!(f[5], 1.0);
        // "won't believe" and "what happened next"
        assert_eq!(f[11], 2.0);
    }

    #[test]
    fn three_word_headline() {
        let f = features("Three word headline");
        assert_eq!(f[0], 3.0);
        assert_eq!(f[7], 0.0);
        assert_eq!(f[8], 0.0);
        assert_eq!(f[10], 0.0);
        assert!((f[1] - 17.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn ten_tips_you_need_now() {
        // Words: "10" "Tips" "You" "Need" "NOW!"; only "NOW!" is fully uppercase.
        let f = features("10 Tips You Need NOW!");
        assert_eq!(f[0], 5.0);
        assert_eq!(f[2], 1.0);
        assert_eq!(f[3], 1.0);
        assert_eq!(f[5], 1.0);
        assert_eq!(f[7], 1.0);
        assert_eq!(f[9], 0.2);
        // "you" is the only stopword.
        assert_eq!(f[10], 0.2);
    }

    #[test]
    fn question_and_demonstrative_starts() {
        let f = features("Why These 7 Dogs Matter?");
        assert_eq!(f[4], 1.0);
        assert_eq!(f[6], 0.0);
        assert_eq!(f[8], 1.0);
        let f = features("These Are The Best Photos");
        assert_eq!(f[4], 0.0);
        assert_eq!(f[6], 1.0);
    }

    #[test]
    fn number_wildcard_in_lexicon() {
        let f = features("Top 10 things nobody tells you");
        // "top N" and "N things" overlap on the number.
        assert_eq!(f[11], 2.0);
        let f = features("Top ten things nobody tells you");
        assert_eq!(f[11], 0.0);
    }

    #[test]
    fn empty_text_is_rejected() {
        assert!(FeatureExtractor::default().extract("   ").is_err());
    }

    #[test]
    fn detector_csv_round_trip() {
        let fv = FeatureExtractor::default().extract("Who Knew This Was Possible?").unwrap();
        let back = FeatureVector::from_csv(&fv.to_csv(), REGISTRY_VERSION).unwrap();
        assert_eq!(back, fv);
    }

    #[test]
    fn default_lexicon_is_loaded() {
        let ex = FeatureExtractor::default();
        assert!(ex.lexicon().iter().any(|p| p == "won't believe"));
        assert!(!ex.lexicon().iter().any(|p| p.starts_with('#')));
    }
}
