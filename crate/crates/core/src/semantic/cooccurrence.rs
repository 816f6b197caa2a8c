use std::collections::{HashMap, HashSet};

use super::svd::SparseMatrix;
use crate::corpus::{Token, Vocabulary};
use crate::error::{Error, Result};

/// Non-stopword, non-numeral word tokens in text order.
pub fn content_stream<'a>(tokens: &'a [Token], stopwords: &HashSet<String>) -> Vec<&'a str> {
    tokens
        .iter()
        .filter(|t| t.is_word() && !t.is_numeral() && !stopwords.contains(&t.surface))
        .map(|t| t.surface.as_str())
        .collect()
}

/// Vocabulary of content words for the semantic space.
pub fn lsa_vocabulary(
    tokens: &[Token],
    max_size: usize,
    min_count: u64,
    stopwords: &HashSet<String>,
) -> Result<Vocabulary> {
    let content: Vec<Token> = content_stream(tokens, stopwords)
        .into_iter()
        .map(Token::word)
        .collect();
    Vocabulary::build(&content, max_size, min_count, &HashSet::new())
}

/// Term x term co-occurrence counts. Rows are every non-`<unk>` word of the
/// vocabulary (in id order); columns are the first `columns.len()` rows,
/// i.e. the most frequent words.
#[derive(Debug, Clone)]
pub struct CooccurrenceMatrix {
    pub rows: Vec<String>,
    pub column_count: usize,
    pub window: usize,
    counts: Vec<HashMap<u32, u64>>,
}

impl CooccurrenceMatrix {
    /// Counts, for each row word at position i, the column words at positions
    /// `i - window ..= i + window` of the content stream (the centre included).
    pub fn build(
        content: &[&str],
        vocab: &Vocabulary,
        column_count: usize,
        window: usize,
    ) -> Result<Self> {
        if window == 0 {
            return Err(Error::invalid("co-occurrence window must be at least 1"));
        }
        let n_rows = vocab.len().saturating_sub(1);
        if column_count > n_rows {
            return Err(Error::invalid(format!(
                "{column_count} columns requested but the vocabulary has {n_rows} words"
            )));
        }
        let unk = vocab.unk_id();
        let row_of: Vec<Option<u32>> = content
            .iter()
            .map(|w| match vocab.id(w) {
                Some(id) if id != unk => Some(id - 1),
                _ => None,
            })
            .collect();
        let mut counts = vec![HashMap::new(); n_rows];
        for (i, row) in row_of.iter().enumerate() {
            let Some(r) = row else { continue };
            let lo = i.saturating_sub(window);
            let hi = (i + window).min(row_of.len() - 1);
            for col in row_of[lo..=hi].iter().flatten() {
                if (*col as usize) < column_count {
                    *counts[*r as usize].entry(*col).or_default() += 1;
                }
            }
        }
        Ok(CooccurrenceMatrix {
            rows: vocab.words().skip(1).map(|(_, w)| w.to_string()).collect(),
            column_count,
            window,
            counts,
        })
    }

    pub fn raw_count(&self, row: &str, col: &str) -> u64 {
        let (Some(r), Some(c)) = (self.row_index(row), self.row_index(col)) else {
            return 0;
        };
        self.counts[r].get(&(c as u32)).copied().unwrap_or(0)
    }

    fn row_index(&self, word: &str) -> Option<usize> {
        self.rows.iter().position(|w| w == word)
    }

    pub fn nnz(&self) -> usize {
        self.counts.iter().map(HashMap::len).sum()
    }

    /// Cells weighted by `ln(1 + count)`.
    pub fn weighted(&self) -> SparseMatrix {
        let rows = self
            .counts
            .iter()
            .map(|row| {
                let mut cells: Vec<(usize, f64)> = row
                    .iter()
                    .map(|(&c, &n)| (c as usize, (n as f64).ln_1p()))
                    .collect();
                cells.sort_by_key(|&(c, _)| c);
                cells
            })
            .collect();
        SparseMatrix::from_rows(self.column_count, rows)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab_of(words: &[&str]) -> Vocabulary {
        let toks: Vec<Token> = words.iter().map(|w| Token::word(*w)).collect();
        Vocabulary::build(&toks, 100, 1, &HashSet::new()).unwrap()
    }

    #[test]
    fn window_pairs_by_hand() {
        let content = ["a", "b", "a"];
        let vocab = vocab_of(&content);
        let m = CooccurrenceMatrix::build(&content, &vocab, 2, 1).unwrap();
        assert_eq!(m.raw_count("a", "b"), 2);
        assert_eq!(m.raw_count("b", "a"), 2);
        assert_eq!(m.raw_count("a", "a"), 2);
        assert_eq!(m.raw_count("b", "b"), 1);
    }

    #[test]
    fn zero_window_rejected() {
        let vocab = vocab_of(&["a"]);
        assert!(CooccurrenceMatrix::build(&["a"], &vocab, 1, 0).is_err());
        assert!(CooccurrenceMatrix::build(&["a"], &vocab, 2, 1).is_err());
    }

    #[test]
    fn out_of_vocabulary_words_hold_positions_only() {
        let vocab = vocab_of(&["a", "b"]);
        let m = CooccurrenceMatrix::build(&["a", "zzz", "b"], &vocab, 2, 1).unwrap();
        assert_eq!(m.raw_count("a", "b"), 0);
        assert_eq!(m.raw_count("a", "zzz"), 0);
        let m = CooccurrenceMatrix::build(&["a", "zzz", "b"], &vocab, 2, 2).unwrap();
        assert_eq!(m.raw_count("a", "b"), 1);
    }

    #[test]
    fn content_stream_drops_stopwords_and_numerals() {
        let toks = crate::corpus::tokenize("The cat, 42 cats.", &Default::default());
        let sw: HashSet<String> = ["the".to_string()].into();
        assert_eq!(content_stream(&toks, &sw), ["cat", "cats"]);
    }

    #[test]
    fn log_weighting() {
        let content = ["a", "b", "a"];
        let vocab = vocab_of(&content);
        let m = CooccurrenceMatrix::build(&content, &vocab, 2, 1).unwrap();
        let w = m.weighted();
        let dense = w.to_dense();
        assert!((dense[0][1] - 3f64.ln()).abs() < 1e-15);
        assert!(dense.iter().flatten().all(|&x| x >= 0.0));
    }
}
