use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::counts::{NGram, BOS, EOS};
use crate::corpus::{Vocabulary, WordId};
use crate::error::{Error, Result};

/// log10 value written for events with no probability mass (ARPA convention).
pub const LOG_ZERO: f64 = -99.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Smoothing {
    #[serde(alias = "mkn")]
    ModifiedKneserNey,
    #[serde(alias = "wb")]
    WittenBell,
}

impl std::str::FromStr for Smoothing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mkn" | "modified-kneser-ney" => Ok(Smoothing::ModifiedKneserNey),
            "wb" | "witten-bell" => Ok(Smoothing::WittenBell),
            other => Err(Error::invalid(format!("unknown smoothing `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelMeta {
    /// `None` for models read from ARPA files.
    pub smoothing: Option<Smoothing>,
    /// Set when modified Kneser-Ney was requested but count-of-count
    /// statistics could not support it.
    pub fallback_to_witten_bell: bool,
    /// Per-order (D1, D2, D3+) discounts when modified Kneser-Ney was used.
    pub discounts: Vec<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub(crate) struct HistoryNode {
    /// log10 backoff weight; `None` when the file/model stores none.
    pub backoff: Option<f64>,
    /// log10 P(w | history) for explicitly stored n-grams.
    pub next: HashMap<WordId, f64>,
}

/// Backoff n-gram model holding log10 probabilities and backoff weights.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    vocab: Vocabulary,
    bos: WordId,
    eos: WordId,
    pub(crate) histories: HashMap<NGram, HistoryNode>,
    pub meta: ModelMeta,
}

impl NGramModel {
    /// Empty model over `vocab`, which must contain the sentence markers.
    pub(crate) fn empty(order: usize, vocab: Vocabulary) -> Result<Self> {
        if order == 0 {
            return Err(Error::invalid("n-gram order must be at least 1"));
        }
        let bos = vocab
            .id(BOS)
            .ok_or_else(|| Error::invalid("vocabulary lacks <s>"))?;
        let eos = vocab
            .id(EOS)
            .ok_or_else(|| Error::invalid("vocabulary lacks </s>"))?;
        Ok(NGramModel {
            order,
            vocab,
            bos,
            eos,
            histories: HashMap::new(),
            meta: ModelMeta::default(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn bos(&self) -> WordId {
        self.bos
    }

    pub fn eos(&self) -> WordId {
        self.eos
    }

    pub(crate) fn set_entry(&mut self, gram: &[WordId], logprob: f64) {
        let (history, word) = gram.split_at(gram.len() - 1);
        self.histories
            .entry(history.into())
            .or_default()
            .next
            .insert(word[0], logprob);
    }

    pub(crate) fn set_backoff(&mut self, gram: &[WordId], backoff: f64) {
        self.histories.entry(gram.into()).or_default().backoff = Some(backoff);
    }

    /// Stored log10 probability of an explicit n-gram.
    pub fn stored_log10(&self, gram: &[WordId]) -> Option<f64> {
        let (history, word) = gram.split_last().map(|(w, h)| (h, *w))?;
        self.histories.get(history)?.next.get(&word).copied()
    }

    /// Stored log10 backoff weight of `gram` used as a history.
    pub fn backoff_log10(&self, gram: &[WordId]) -> f64 {
        self.histories
            .get(gram)
            .and_then(|n| n.backoff)
            .unwrap_or(0.0)
    }

    fn truncate<'a>(&self, history: &'a [WordId]) -> &'a [WordId] {
        let keep = history.len().min(self.order - 1);
        &history[history.len() - keep..]
    }

    /// log10 P(word | history) by backoff recursion; the history is cut to
    /// the last `order - 1` ids.
    pub fn log10_prob(&self, word: WordId, history: &[WordId]) -> f64 {
        let history = self.truncate(history);
        let mut penalty = 0.0;
        for start in 0..=history.len() {
            let ctx = &history[start..];
            if let Some(node) = self.histories.get(ctx) {
                if let Some(&lp) = node.next.get(&word) {
                    return penalty + lp;
                }
                penalty += node.backoff.unwrap_or(0.0);
            }
        }
        LOG_ZERO
    }

    pub fn probability(&self, word: WordId, history: &[WordId]) -> f64 {
        10f64.powf(self.log10_prob(word, history))
    }

    /// Word-level query; unknown words map to `<unk>`.
    pub fn probability_of(&self, word: &str, history: &[&str]) -> f64 {
        let h: Vec<WordId> = history.iter().map(|w| self.vocab.id_or_unk(w)).collect();
        self.probability(self.vocab.id_or_unk(word), &h)
    }

    /// Linear probabilities of every vocabulary id given `history`; the
    /// sentence-start marker is always 0.
    pub fn distribution(&self, history: &[WordId]) -> Vec<f64> {
        let history = self.truncate(history);
        let mut logp = vec![LOG_ZERO; self.vocab.len()];
        if let Some(root) = self.histories.get(&[][..]) {
            for (&w, &lp) in &root.next {
                logp[w as usize] = lp;
            }
        }
        for start in (0..history.len()).rev() {
            let ctx = &history[start..];
            let Some(node) = self.histories.get(ctx) else {
                continue;
            };
            if let Some(b) = node.backoff {
                if b != 0.0 {
                    logp.iter_mut().for_each(|lp| *lp += b);
                }
            }
            for (&w, &lp) in &node.next {
                logp[w as usize] = lp;
            }
        }
        let mut probs: Vec<f64> = logp.into_iter().map(|lp| 10f64.powf(lp)).collect();
        probs[self.bos as usize] = 0.0;
        probs
    }

    /// Number of stored n-grams per order.
    pub fn ngram_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.order];
        for (h, node) in &self.histories {
            if h.len() < self.order {
                counts[h.len()] += node.next.len();
            }
        }
        counts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> NGramModel {
        let mut vocab = Vocabulary::new();
        for w in ["<s>", "</s>", "a", "b"] {
            vocab.push(w, 0, false);
        }
        let mut m = NGramModel::empty(2, vocab).unwrap();
        let id = |w: &str| m.vocab.id(w).unwrap();
        let (unk, bos, eos, a, b) = (id("<unk>"), id("<s>"), id("</s>"), id("a"), id("b"));
        m.set_entry(&[unk], -2.0);
        m.set_entry(&[bos], LOG_ZERO);
        m.set_entry(&[eos], -0.6);
        m.set_entry(&[a], -0.5);
        m.set_entry(&[b], -0.7);
        m.set_backoff(&[a], -0.3);
        m.set_entry(&[a, b], -0.1);
        m
    }

    #[test]
    fn stored_ngram_is_returned_exactly() {
        let m = toy();
        let (a, b) = (m.vocab.id("a").unwrap(), m.vocab.id("b").unwrap());
        assert_eq!(m.log10_prob(b, &[a]), -0.1);
        assert_eq!(m.stored_log10(&[a, b]), Some(-0.1));
    }

    #[test]
    fn unseen_bigram_backs_off() {
        let m = toy();
        let a = m.vocab.id("a").unwrap();
        // backoff(a) * P(a) = 10^-0.3 * 10^-0.5
        let expected = 10f64.powf(-0.3) * 10f64.powf(-0.5);
        assert!((m.probability(a, &[a]) - expected).abs() < 1e-12);
        // no stored backoff for b: weight 1
        let b = m.vocab.id("b").unwrap();
        assert!((m.probability(a, &[b]) - 10f64.powf(-0.5)).abs() < 1e-12);
    }

    #[test]
    fn long_history_is_truncated() {
        let m = toy();
        let (a, b) = (m.vocab.id("a").unwrap(), m.vocab.id("b").unwrap());
        assert_eq!(m.log10_prob(b, &[b, b, b, a]), m.log10_prob(b, &[a]));
    }

    #[test]
    fn dense_distribution_matches_point_queries() {
        let m = toy();
        let a = m.vocab.id("a").unwrap();
        let dist = m.distribution(&[a]);
        for (id, _) in m.vocab.words() {
            if id == m.bos {
                assert_eq!(dist[id as usize], 0.0);
            } else {
                assert!((dist[id as usize] - m.probability(id, &[a])).abs() < 1e-15);
            }
        }
    }
}
