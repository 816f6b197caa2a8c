use std::collections::{HashMap, HashSet};

use crate::corpus::{sentences, Token, Vocabulary, WordId};
use crate::error::{Error, Result};

pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub type NGram = Box<[WordId]>;

/// Raw n-gram counts for orders `1..=order` over boundary-padded sentences.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CountTable {
    order: usize,
    /// `by_order[n - 1]` holds the n-grams.
    by_order: Vec<HashMap<NGram, u64>>,
    total_tokens: u64,
}

/// Vocabulary for language-model training: the capped word vocabulary plus
/// the sentence start/end markers.
pub fn lm_vocabulary(tokens: &[Token], max_size: usize, min_count: u64) -> Result<Vocabulary> {
    let mut vocab = Vocabulary::build(tokens, max_size, min_count, &HashSet::new())?;
    let n_sentences = sentences(tokens).len() as u64;
    vocab.push(BOS, n_sentences, false);
    vocab.push(EOS, n_sentences, false);
    Ok(vocab)
}

/// Maps the word tokens of each sentence to ids (unknowns become `<unk>`).
pub fn sentence_ids(tokens: &[Token], vocab: &Vocabulary) -> Vec<Vec<WordId>> {
    sentences(tokens)
        .into_iter()
        .map(|s| s.into_iter().map(|w| vocab.id_or_unk(w)).collect())
        .collect()
}

impl CountTable {
    pub fn new(order: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("n-gram order must be at least 1"));
        }
        Ok(CountTable {
            order,
            by_order: vec![HashMap::new(); order],
            total_tokens: 0,
        })
    }

    /// Counts every n-gram up to `order` in `<s> sentence </s>`.
    pub fn count(sentences: &[Vec<WordId>], order: usize, bos: WordId, eos: WordId) -> Result<Self> {
        let mut table = CountTable::new(order)?;
        for sentence in sentences {
            let mut padded = Vec::with_capacity(sentence.len() + 2);
            padded.push(bos);
            padded.extend_from_slice(sentence);
            padded.push(eos);
            table.total_tokens += padded.len() as u64;
            for n in 1..=order {
                for gram in padded.windows(n) {
                    *table.by_order[n - 1].entry(gram.into()).or_default() += 1;
                }
            }
        }
        Ok(table)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn is_empty(&self) -> bool {
        self.by_order.iter().all(HashMap::is_empty)
    }

    pub fn get(&self, gram: &[WordId]) -> u64 {
        if gram.is_empty() || gram.len() > self.order {
            return 0;
        }
        self.by_order[gram.len() - 1].get(gram).copied().unwrap_or(0)
    }

    /// N-grams of length `n`.
    pub fn grams(&self, n: usize) -> &HashMap<NGram, u64> {
        &self.by_order[n - 1]
    }

    /// Drops n-grams of order >= 2 seen fewer than `min_counts[n - 1]` times,
    /// together with any n-gram whose (n-1)-prefix was dropped. Unigrams are
    /// always kept so the vocabulary survives.
    pub fn prune(&self, min_counts: &[u64]) -> CountTable {
        let mut pruned = CountTable {
            order: self.order,
            by_order: vec![HashMap::new(); self.order],
            total_tokens: self.total_tokens,
        };
        pruned.by_order[0] = self.by_order[0].clone();
        for n in 2..=self.order {
            let threshold = min_counts.get(n - 1).copied().unwrap_or(1);
            let (lower, upper) = pruned.by_order.split_at_mut(n - 1);
            let lower = &lower[n - 2];
            for (gram, &c) in &self.by_order[n - 1] {
                let prefix_kept = n == 2 || lower.contains_key(&gram[..n - 1]);
                if c >= threshold && prefix_kept {
                    upper[0].insert(gram.clone(), c);
                }
            }
        }
        pruned
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ids(table: &CountTable, vocab: &Vocabulary, n: usize) -> Vec<(Vec<String>, u64)> {
        let mut out: Vec<_> = table
            .grams(n)
            .iter()
            .map(|(g, &c)| (g.iter().map(|&i| vocab.word(i).to_string()).collect(), c))
            .collect();
        out.sort();
        out
    }

    fn setup(text: &str, order: usize) -> (Vocabulary, CountTable) {
        let tokens = crate::corpus::tokenize(text, &Default::default());
        let vocab = lm_vocabulary(&tokens, 100, 1).unwrap();
        let sents = sentence_ids(&tokens, &vocab);
        let bos = vocab.id(BOS).unwrap();
        let eos = vocab.id(EOS).unwrap();
        (vocab.clone(), CountTable::count(&sents, order, bos, eos).unwrap())
    }

    fn v(words: &[&str], c: u64) -> (Vec<String>, u64) {
        (words.iter().map(|s| s.to_string()).collect(), c)
    }

    #[test]
    fn bigrams_with_boundaries() {
        let (vocab, t) = setup("a b", 2);
        assert_eq!(
            ids(&t, &vocab, 2),
            vec![v(&["<s>", "a"], 1), v(&["a", "b"], 1), v(&["b", "</s>"], 1)]
        );
    }

    #[test]
    fn unigrams_with_boundaries() {
        let (vocab, t) = setup("a a a", 1);
        assert_eq!(
            ids(&t, &vocab, 1),
            vec![v(&["</s>"], 1), v(&["<s>"], 1), v(&["a"], 3)]
        );
    }

    #[test]
    fn empty_corpus() {
        let t = CountTable::count(&[], 3, 1, 2).unwrap();
        assert!(t.is_empty());
        assert!(CountTable::count(&[], 0, 1, 2).is_err());
    }

    #[test]
    fn marginals_are_consistent() {
        let (_, t) = setup("a b c. b c a b. c c", 3);
        for n in 1..3 {
            for (gram, &c) in t.grams(n) {
                let ext: u64 = t
                    .grams(n + 1)
                    .iter()
                    .filter(|(g, _)| g[..n] == gram[..])
                    .map(|(_, &c)| c)
                    .sum();
                // n-grams ending a sentence have no continuation
                if ext > 0 {
                    assert_eq!(ext, c);
                }
            }
        }
    }

    #[test]
    fn prune_examples() {
        let (vocab, t) = setup("a b a b", 2);
        let p = t.prune(&[1, 2]);
        assert_eq!(ids(&p, &vocab, 2), vec![v(&["a", "b"], 2)]);
        assert_eq!(p.grams(1), t.grams(1));

        assert_eq!(t.prune(&[1, 1]), t);

        let p = t.prune(&[1, 100]);
        assert!(p.grams(2).is_empty());
        assert!(!p.grams(1).is_empty());
    }

    #[test]
    fn prune_drops_orphaned_extensions() {
        let (_, t) = setup("a b c. a b c. x b c", 3);
        let p = t.prune(&[1, 2, 1]);
        for gram in p.grams(3).keys() {
            assert!(p.get(&gram[..2]) > 0);
        }
        assert_eq!(p.grams(3).len(), 3);
    }
}
