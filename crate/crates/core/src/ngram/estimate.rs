//! Interpolated modified Kneser-Ney and Witten-Bell estimation, stored in
//! backoff form. For an interpolated estimate
//! `P(w|h) = alpha(h,w) + gamma(h) * P(w|h')`, the backoff weight of `h` is
//! exactly `gamma(h)`, so the backoff model reproduces the interpolated one
//! for every word, seen or not.

use std::collections::{HashMap, HashSet};

use super::counts::{CountTable, NGram};
use super::model::{NGramModel, Smoothing, LOG_ZERO};
use crate::corpus::{Vocabulary, WordId};
use crate::error::{Error, Result};

#[derive(Debug, Default, Clone, Copy)]
struct HistoryStats {
    total: u64,
    distinct: u64,
    n1: u64,
    n2: u64,
    n3_plus: u64,
}

impl HistoryStats {
    fn add(&mut self, count: u64) {
        self.total += count;
        self.distinct += 1;
        match count {
            1 => self.n1 += 1,
            2 => self.n2 += 1,
            _ => self.n3_plus += 1,
        }
    }
}

/// Chen-Goodman discounts (D1, D2, D3+) from counts-of-counts; `None` when
/// the statistics are degenerate or a discount leaves its valid range.
pub fn mkn_discounts<I: IntoIterator<Item = u64>>(counts: I) -> Option<[f64; 3]> {
    let mut coc = [0u64; 5];
    for c in counts {
        if (1..=4).contains(&c) {
            coc[c as usize] += 1;
        }
    }
    let [_, n1, n2, n3, n4] = coc.map(|x| x as f64);
    if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 || n4 == 0.0 {
        return None;
    }
    let y = n1 / (n1 + 2.0 * n2);
    let d = [
        1.0 - 2.0 * y * n2 / n1,
        2.0 - 3.0 * y * n3 / n2,
        3.0 - 4.0 * y * n4 / n3,
    ];
    let valid = d
        .iter()
        .enumerate()
        .all(|(i, &di)| di > 0.0 && di < (i + 1) as f64);
    valid.then_some(d)
}

/// Counts the estimator actually discounts: raw counts at the top order and
/// for n-grams starting with `<s>`; continuation counts otherwise (MKN only).
fn adjusted_counts(counts: &CountTable, smoothing: Smoothing, bos: WordId) -> Vec<HashMap<NGram, u64>> {
    let order = counts.order();
    let mut out: Vec<HashMap<NGram, u64>> = (1..=order).map(|n| counts.grams(n).clone()).collect();
    if smoothing == Smoothing::WittenBell {
        return out;
    }
    for n in 1..order {
        let mut continuation: HashMap<&[WordId], u64> = HashMap::new();
        for (gram, &c) in counts.grams(n + 1) {
            if c > 0 {
                *continuation.entry(&gram[1..]).or_default() += 1;
            }
        }
        for (gram, a) in out[n - 1].iter_mut() {
            if gram[0] != bos {
                *a = continuation.get(&gram[..]).copied().unwrap_or(0);
            }
        }
    }
    out
}

struct Estimator {
    smoothing: Smoothing,
    discounts: Vec<[f64; 3]>,
}

impl Estimator {
    fn discount(&self, n: usize, count: u64) -> f64 {
        let d = &self.discounts[n - 1];
        match count {
            0 => 0.0,
            1 => d[0],
            2 => d[1],
            _ => d[2],
        }
    }

    fn alpha(&self, n: usize, count: u64, st: &HistoryStats) -> f64 {
        match self.smoothing {
            Smoothing::ModifiedKneserNey => {
                (count as f64 - self.discount(n, count)).max(0.0) / st.total as f64
            }
            Smoothing::WittenBell => count as f64 / (st.total + st.distinct) as f64,
        }
    }

    fn gamma(&self, n: usize, st: &HistoryStats) -> f64 {
        match self.smoothing {
            Smoothing::ModifiedKneserNey => {
                let d = &self.discounts[n - 1];
                (d[0] * st.n1 as f64 + d[1] * st.n2 as f64 + d[2] * st.n3_plus as f64)
                    / st.total as f64
            }
            Smoothing::WittenBell => st.distinct as f64 / (st.total + st.distinct) as f64,
        }
    }
}

/// Estimates a backoff model from counts. `vocab` must contain `<s>` and
/// `</s>` (see [`super::lm_vocabulary`]).
pub fn estimate(counts: &CountTable, vocab: &Vocabulary, smoothing: Smoothing) -> Result<NGramModel> {
    if counts.is_empty() {
        return Err(Error::invalid("cannot estimate a model from an empty count table"));
    }
    let order = counts.order();
    let mut model = NGramModel::empty(order, vocab.clone())?;
    let bos = model.bos();

    let mut used = smoothing;
    let mut adjusted = adjusted_counts(counts, used, bos);
    let mut discounts = Vec::new();
    if used == Smoothing::ModifiedKneserNey {
        for (n, table) in adjusted.iter().enumerate() {
            let iter = table
                .iter()
                .filter(|(g, _)| !(n == 0 && g[0] == bos))
                .map(|(_, &c)| c);
            match mkn_discounts(iter) {
                Some(d) => discounts.push(d),
                None => {
                    log::warn!(
                        "count-of-count statistics too sparse for modified Kneser-Ney at order {}; using Witten-Bell",
                        n + 1
                    );
                    used = Smoothing::WittenBell;
                    model.meta.fallback_to_witten_bell = true;
                    discounts.clear();
                    adjusted = adjusted_counts(counts, used, bos);
                    break;
                }
            }
        }
    }
    model.meta.smoothing = Some(used);
    model.meta.discounts = discounts.clone();
    let est = Estimator {
        smoothing: used,
        discounts,
    };

    // n-grams to store: positive adjusted count, plus every prefix of a
    // stored longer n-gram so its backoff weight has a home.
    let mut stored: Vec<HashSet<NGram>> = vec![HashSet::new(); order];
    for n in (2..=order).rev() {
        let mut set: HashSet<NGram> = adjusted[n - 1]
            .iter()
            .filter(|(_, &a)| a > 0)
            .map(|(g, _)| g.clone())
            .collect();
        if n < order {
            let prefixes: Vec<NGram> = stored[n].iter().map(|g| g[..n].into()).collect();
            set.extend(prefixes);
        }
        stored[n - 1] = set;
    }

    let stats: Vec<HashMap<NGram, HistoryStats>> = adjusted
        .iter()
        .enumerate()
        .map(|(i, table)| {
            let mut by_history: HashMap<NGram, HistoryStats> = HashMap::new();
            for (gram, &a) in table {
                if a == 0 || (i == 0 && gram[0] == bos) {
                    continue;
                }
                by_history.entry(gram[..i].into()).or_default().add(a);
            }
            by_history
        })
        .collect();

    // unigrams, interpolated with the uniform distribution over V \ {<s>}
    let predictable = (vocab.len() - 1) as f64;
    let root = stats[0].get(&[][..]).copied().unwrap_or_default();
    for (id, _) in vocab.words() {
        if id == bos {
            model.set_entry(&[id], LOG_ZERO);
            continue;
        }
        let p = if root.total == 0 {
            1.0 / predictable
        } else {
            let a = adjusted[0].get(&[id][..]).copied().unwrap_or(0);
            est.alpha(1, a, &root) + est.gamma(1, &root) / predictable
        };
        model.set_entry(&[id], p.log10());
    }

    for n in 2..=order {
        let mut grams: Vec<&NGram> = stored[n - 1].iter().collect();
        grams.sort();
        for gram in grams {
            let (history, word) = gram.split_at(n - 1);
            let lower = model.probability(word[0], &history[1..]);
            let p = match stats[n - 1].get(history) {
                Some(st) if st.total > 0 => {
                    let a = adjusted[n - 1].get(gram).copied().unwrap_or(0);
                    est.alpha(n, a, st) + est.gamma(n, st) * lower
                }
                _ => lower,
            };
            model.set_entry(gram, p.log10());
        }
        for (history, st) in &stats[n - 1] {
            if st.total > 0 {
                model.set_backoff(history, est.gamma(n, st).log10());
            }
        }
    }
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ngram::{lm_vocabulary, sentence_ids, BOS, EOS};

    fn train(text: &str, order: usize, smoothing: Smoothing) -> NGramModel {
        let tokens = crate::corpus::tokenize(text, &Default::default());
        let vocab = lm_vocabulary(&tokens, 1000, 1).unwrap();
        let sents = sentence_ids(&tokens, &vocab);
        let counts = CountTable::count(
            &sents,
            order,
            vocab.id(BOS).unwrap(),
            vocab.id(EOS).unwrap(),
        )
        .unwrap();
        estimate(&counts, &vocab, smoothing).unwrap()
    }

    #[test]
    fn witten_bell_hand_value() {
        // <s> a b a b </s>: c(a b) = 2, one distinct follower of a.
        // unigram: c(a)=2 c(b)=2 c(</s>)=1, N=5, T=3, |V \ <s>| = 4
        // P(b) = (2 + 3/4) / 8 ; P(b|a) = (2 + 1 * P(b)) / 3
        let m = train("a b a b", 2, Smoothing::WittenBell);
        let p_b = (2.0 + 0.75) / 8.0;
        let expected = (2.0 + p_b) / 3.0;
        assert!((m.probability_of("b", &["a"]) - expected).abs() < 1e-10);
    }

    #[test]
    fn single_word_unigram_model() {
        let m = train("a", 1, Smoothing::ModifiedKneserNey);
        assert!(m.meta.fallback_to_witten_bell);
        let total: f64 = ["a", "<unk>", "</s>"]
            .iter()
            .map(|w| m.probability_of(w, &[]))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        // c(a)=1, c(</s>)=1, T=2, |V|=3: P(a) = (1 + 2/3) / 4
        assert!((m.probability_of("a", &[]) - 5.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn empty_counts_rejected() {
        let vocab = lm_vocabulary(&[], 10, 1).unwrap();
        let counts = CountTable::new(2).unwrap();
        assert!(estimate(&counts, &vocab, Smoothing::WittenBell).is_err());
    }

    #[test]
    fn discount_degeneracy() {
        assert!(mkn_discounts([1, 1, 1]).is_none());
        let d = mkn_discounts([1, 1, 1, 2, 2, 3, 4]).unwrap();
        // n1=3 n2=2 n3=1 n4=1, Y = 3/7
        let y = 3.0 / 7.0;
        assert!((d[0] - (1.0 - 2.0 * y * 2.0 / 3.0)).abs() < 1e-15);
        assert!((d[1] - (2.0 - 3.0 * y * 1.0 / 2.0)).abs() < 1e-15);
        assert!((d[2] - (3.0 - 4.0 * y * 1.0 / 1.0)).abs() < 1e-15);
    }

    #[test]
    fn stored_probabilities_normalize() {
        let text = "the cat sat on the mat. the dog sat on the log. a cat and a dog sat. \
                    the cat saw the dog. the dog saw a cat on the mat. the mat is on the log.";
        for smoothing in [Smoothing::ModifiedKneserNey, Smoothing::WittenBell] {
            let m = train(text, 3, smoothing);
            let vocab = m.vocab().clone();
            let words: Vec<WordId> = vocab.words().map(|(i, _)| i).collect();
            for h1 in &words {
                for h2 in &words {
                    let h = [*h1, *h2];
                    let sum: f64 = m.distribution(&h).iter().sum();
                    assert!((sum - 1.0).abs() < 1e-9, "{smoothing:?} {h:?} {sum}");
                }
            }
        }
    }
}
