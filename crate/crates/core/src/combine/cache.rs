use std::collections::VecDeque;

use crate::corpus::WordId;

/// Gaussian recency weight of a cache position (1 = most recent). Peaks at
/// `mu`, with width `mu/3` before the peak and `l/3` after it. Absent words
/// get 0.
pub fn decay_factor(p: Option<usize>, mu: f64, l: f64) -> f64 {
    let Some(p) = p else { return 0.0 };
    let p = p as f64;
    let sigma = if p < mu { mu / 3.0 } else { l / 3.0 };
    let z = (p - mu) / sigma;
    (-0.5 * z * z).exp()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CacheEntry {
    pub word: WordId,
    /// 1 for an occurred word, the cosine for a neighbour.
    pub weight: f64,
}

/// Recency cache, newest entry first. The semantic variant also stores the
/// close neighbours of each occurred word, and stretches its length and
/// decay peak by the average number of entries per occurred word.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheState {
    entries: VecDeque<CacheEntry>,
    length: usize,
    mu: f64,
    beta: f64,
    semantic: bool,
    pushes: u64,
    neighbors_added: u64,
}

impl CacheState {
    pub fn plain(length: usize, mu: f64, beta: f64) -> Self {
        CacheState {
            entries: VecDeque::new(),
            length,
            mu,
            beta,
            semantic: false,
            pushes: 0,
            neighbors_added: 0,
        }
    }

    pub fn semantic(length: usize, mu: f64, beta: f64) -> Self {
        CacheState {
            semantic: true,
            ..Self::plain(length, mu, beta)
        }
    }

    pub fn is_semantic(&self) -> bool {
        self.semantic
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &CacheEntry> {
        self.entries.iter()
    }

    fn scale(&self) -> f64 {
        if self.semantic && self.pushes > 0 {
            1.0 + self.neighbors_added as f64 / self.pushes as f64
        } else {
            1.0
        }
    }

    /// Length l after the semantic stretch.
    pub fn effective_length(&self) -> f64 {
        self.length as f64 * self.scale()
    }

    pub fn effective_mu(&self) -> f64 {
        self.mu * self.scale()
    }

    pub fn capacity(&self) -> usize {
        self.effective_length().ceil() as usize
    }

    /// Prepends the word and, for the semantic cache, its neighbours right
    /// after it. Neighbours are ignored by the plain cache.
    pub fn push(&mut self, word: WordId, neighbors: &[(WordId, f64)]) {
        if self.semantic {
            for &(w, cos) in neighbors.iter().rev() {
                self.entries.push_front(CacheEntry { word: w, weight: cos });
            }
            self.neighbors_added += neighbors.len() as u64;
        }
        self.entries.push_front(CacheEntry { word, weight: 1.0 });
        self.pushes += 1;
        let cap = self.capacity();
        self.entries.truncate(cap);
    }

    pub fn decay_at(&self, p: usize) -> f64 {
        decay_factor(Some(p), self.effective_mu(), self.effective_length())
    }

    /// Sum of `beta * weight * decay` over the entries holding `word`.
    pub fn score(&self, word: WordId) -> f64 {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.word == word)
            .map(|(i, e)| self.beta * e.weight * self.decay_at(i + 1))
            .sum()
    }

    /// Scores for every id below `vocab_len`.
    pub fn scores(&self, vocab_len: usize) -> Vec<f64> {
        let mut out = vec![0.0; vocab_len];
        for (i, e) in self.entries.iter().enumerate() {
            if let Some(slot) = out.get_mut(e.word as usize) {
                *slot += self.beta * e.weight * self.decay_at(i + 1);
            }
        }
        out
    }
}

/// `P'(w) ∝ P_base(w) + score(w)`.
pub fn combine_cache(base: &[f64], cache: &CacheState) -> Vec<f64> {
    let scores = cache.scores(base.len());
    if scores.iter().all(|&s| s == 0.0) {
        return base.to_vec();
    }
    let mut out: Vec<f64> = base.iter().zip(&scores).map(|(p, s)| p + s).collect();
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}
