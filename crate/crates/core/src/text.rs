//! Word-level helpers shared by the ingest filters and feature extraction.

use std::collections::HashSet;
use std::sync::LazyLock;

/// Built-in English stopword list (50 entries).
pub const STOPWORDS: [&str; 50] = [
    "the", "a", "an", "and", "or", "but", "of", "to", "in", "on", "at", "for", "with", "by",
    "from", "about", "is", "are", "was", "were", "be", "been", "has", "have", "had", "it", "its",
    "this", "that", "these", "those", "he", "she", "they", "we", "you", "i", "his", "her",
    "their", "our", "your", "my", "not", "will", "would", "can", "what", "who", "how",
];

static STOPWORD_SET: LazyLock<HashSet<&'static str>> =
    LazyLock::new(|| STOPWORDS.iter().copied().collect());

pub fn is_stopword(token: &str) -> bool {
    STOPWORD_SET.contains(token)
}

/// Collapses every whitespace run to a single ASCII space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace() {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Words are maximal runs of non-whitespace; punctuation-only runs count.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Case-folded token with surrounding punctuation removed. Curly apostrophes
/// are mapped to ASCII so "won’t" and "won't" compare equal. Returns an empty
/// string for punctuation-only words.
pub fn fold_token(word: &str) -> String {
    word.trim_matches(|c: char| !c.is_alphanumeric())
        .chars()
        .map(|c| if c == '\u{2019}' { '\'' } else { c })
        .flat_map(char::to_lowercase)
        .collect()
}

pub fn folded_tokens(text: &str) -> Vec<String> {
    text.split_whitespace().map(fold_token).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stopword_list_has_fifty_unique_entries() {
        assert_eq!(STOPWORD_SET.len(), 50);
    }

    #[test]
    fn whitespace_is_collapsed() {
        assert_eq!(
            normalize_whitespace("  You  Won't \t\n Believe   "),
            "You Won't Believe"
        );
        assert_eq!(normalize_whitespace(" \n "), "");
    }

    #[test]
    fn punctuation_only_tokens_count_as_words() {
        assert_eq!(word_count("Breaking - news today"), 4);
    }

    #[test]
    fn tokens_are_folded() {
        assert_eq!(fold_token("\"Won’t"), "won't");
        assert_eq!(fold_token("NOW!"), "now");
        assert_eq!(fold_token("--"), "");
    }
}
