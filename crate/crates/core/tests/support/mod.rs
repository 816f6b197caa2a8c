//! Generators and independent reference implementations shared by the
//! integration tests and the acceptance run.
#![allow(dead_code)]

use std::collections::hash_map::DefaultHasher;
use std::collections::{HashMap, HashSet};
use std::hash::{Hash, Hasher};

use predict_core::combine::{Prediction, Predictor};
use predict_core::corpus::{default_stopwords, tokenize, Token};
use predict_core::ngram::{self, NGramModel, Smoothing, TrainOptions};
use predict_core::semantic::SemanticSpace;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal, Zipf};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

const ONSETS: [&str; 18] = [
    "b", "c", "d", "f", "g", "l", "m", "n", "p", "r", "s", "t", "v", "br", "st", "tr", "ch", "pl",
];
const VOWELS: [&str; 7] = ["a", "e", "i", "o", "u", "ou", "ai"];
const CODAS: [&str; 6] = ["", "", "n", "r", "s", "l"];

/// `n` distinct lowercase pseudo-words, none of them an English stopword.
pub fn word_pool(rng: &mut TestRng, n: usize) -> Vec<String> {
    let stop = default_stopwords("en").expect("built-in list");
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let syllables = rng.random_range(1..=3);
        let mut w = String::new();
        for _ in 0..syllables {
            w.push_str(ONSETS.choose(rng).unwrap());
            w.push_str(VOWELS.choose(rng).unwrap());
        }
        w.push_str(CODAS.choose(rng).unwrap());
        if !stop.contains(&w) && seen.insert(w.clone()) {
            out.push(w);
        }
    }
    out
}

/// Index in `0..n`, skewed towards small indices.
pub fn zipf_index(rng: &mut TestRng, n: usize, s: f64) -> usize {
    if n == 1 {
        return 0;
    }
    let z = Zipf::new(n as f64, s).expect("valid zipf parameters");
    (z.sample(rng) as usize - 1).min(n - 1)
}

/// Sentences of pool words ending in `.`, `!` or `?`, with the odd comma.
pub fn random_text(rng: &mut TestRng, pool: &[String], sentences: usize, max_len: usize) -> String {
    let mut out = String::new();
    for s in 0..sentences {
        if s > 0 {
            out.push(' ');
        }
        let len = rng.random_range(1..=max_len);
        for i in 0..len {
            if i > 0 {
                if rng.random_bool(0.1) {
                    out.push(',');
                }
                out.push(' ');
            }
            out.push_str(&pool[zipf_index(rng, pool.len(), 1.1)]);
        }
        out.push(*['.', '.', '!', '?'].choose(rng).unwrap());
    }
    out
}

pub fn train_lm(text: &str, order: usize, smoothing: Smoothing) -> NGramModel {
    let tokens = tokenize(text, &Default::default());
    let opts = TrainOptions {
        order,
        smoothing,
        vocab_size: 1_000_000,
        min_count: 1,
        prune: None,
    };
    ngram::train(&tokens, &opts).expect("toy model trains")
}

pub fn gaussian_vector(rng: &mut TestRng, dims: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dims).map(|_| StandardNormal.sample(rng)).collect();
        if v.iter().any(|x: &f64| x.abs() > 1e-3) {
            return v;
        }
    }
}

pub fn random_space(rng: &mut TestRng, words: &[String], dims: usize, density_m: usize) -> SemanticSpace {
    let entries = words
        .iter()
        .map(|w| (w.clone(), gaussian_vector(rng, dims)))
        .collect();
    SemanticSpace::from_vectors(entries, density_m).expect("random vectors are valid")
}

/// A normalized vector of length `n` with roughly `zero_share` of it zero.
pub fn random_distribution(rng: &mut TestRng, n: usize, zero_share: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n)
        .map(|_| {
            if rng.random_bool(zero_share) {
                0.0
            } else {
                rng.random::<f64>().powi(3) + 1e-9
            }
        })
        .collect();
    if v.iter().all(|&p| p == 0.0) {
        v[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = v.iter().sum();
    v.iter_mut().for_each(|p| *p /= total);
    v
}

pub fn sum(v: &[f64]) -> f64 {
    v.iter().sum()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Interpolated modified Kneser-Ney and Witten-Bell evaluated straight from
/// the recursive formulas over raw string n-gram counts.
pub struct BruteForceLm {
    order: usize,
    vocab: Vec<String>,
    raw: HashMap<Vec<String>, u64>,
    left: HashMap<Vec<String>, HashSet<String>>,
    pub kneser_ney: bool,
    discounts: Vec<[f64; 3]>,
}

impl BruteForceLm {
    const BOS: &'static str = "<s>";

    /// `sentences` are the word sequences; `vocab` lists every word type,
    /// `<unk>` and `</s>` (but not `<s>`).
    pub fn new(sentences: &[Vec<String>], vocab: Vec<String>, order: usize, want_kneser_ney: bool) -> Self {
        let mut raw: HashMap<Vec<String>, u64> = HashMap::new();
        for s in sentences {
            let mut padded = vec![Self::BOS.to_string()];
            padded.extend(s.iter().cloned());
            padded.push("</s>".into());
            for n in 1..=order {
                for i in 0..=padded.len().saturating_sub(n) {
                    if i + n <= padded.len() {
                        *raw.entry(padded[i..i + n].to_vec()).or_default() += 1;
                    }
                }
            }
        }
        let mut left: HashMap<Vec<String>, HashSet<String>> = HashMap::new();
        for g in raw.keys().filter(|g| g.len() >= 2) {
            left.entry(g[1..].to_vec()).or_default().insert(g[0].clone());
        }
        let mut lm = BruteForceLm {
            order,
            vocab,
            raw,
            left,
            kneser_ney: want_kneser_ney,
            discounts: Vec::new(),
        };
        if want_kneser_ney {
            for n in 1..=order {
                match lm.chen_goodman(n) {
                    Some(d) => lm.discounts.push(d),
                    None => {
                        lm.kneser_ney = false;
                        lm.discounts.clear();
                        break;
                    }
                }
            }
        }
        lm
    }

    fn raw_count(&self, gram: &[String]) -> u64 {
        self.raw.get(gram).copied().unwrap_or(0)
    }

    /// The count a smoothing step works with: raw at the top order or after
    /// `<s>`, otherwise (Kneser-Ney only) the number of distinct left
    /// extensions.
    fn effective_count(&self, gram: &[String]) -> u64 {
        if !self.kneser_ney || gram.len() == self.order || gram[0] == Self::BOS {
            return self.raw_count(gram);
        }
        self.left.get(gram).map_or(0, |l| l.len() as u64)
    }

    fn chen_goodman(&self, n: usize) -> Option<[f64; 3]> {
        let mut coc = [0.0f64; 5];
        for g in self.raw.keys().filter(|g| g.len() == n) {
            if n == 1 && g[0] == Self::BOS {
                continue;
            }
            let c = self.effective_count(g);
            if (1..=4).contains(&c) {
                coc[c as usize] += 1.0;
            }
        }
        let [_, n1, n2, n3, n4] = coc;
        if n1 == 0.0 || n2 == 0.0 || n3 == 0.0 || n4 == 0.0 {
            return None;
        }
        let y = n1 / (n1 + 2.0 * n2);
        let d = [1.0 - 2.0 * y * n2 / n1, 2.0 - 3.0 * y * n3 / n2, 3.0 - 4.0 * y * n4 / n3];
        if d[0] > 0.0 && d[0] < 1.0 && d[1] > 0.0 && d[1] < 2.0 && d[2] > 0.0 && d[2] < 3.0 {
            Some(d)
        } else {
            None
        }
    }

    fn discount(&self, n: usize, c: u64) -> f64 {
        match c {
            0 => 0.0,
            1 => self.discounts[n - 1][0],
            2 => self.discounts[n - 1][1],
            _ => self.discounts[n - 1][2],
        }
    }

    /// P(word | history); the history is cut to the last `order - 1` words.
    pub fn prob(&self, word: &str, history: &[String]) -> f64 {
        let keep = history.len().min(self.order - 1);
        self.interpolated(word, &history[history.len() - keep..])
    }

    fn interpolated(&self, word: &str, h: &[String]) -> f64 {
        let n = h.len() + 1;
        let lower = if h.is_empty() {
            1.0 / self.vocab.len() as f64
        } else {
            self.interpolated(word, &h[1..])
        };
        let mut followers = Vec::new();
        for v in &self.vocab {
            if h.is_empty() && v == Self::BOS {
                continue;
            }
            let mut g = h.to_vec();
            g.push(v.clone());
            let c = self.effective_count(&g);
            if c > 0 {
                followers.push((v.as_str(), c));
            }
        }
        let total: u64 = followers.iter().map(|&(_, c)| c).sum();
        if total == 0 {
            return lower;
        }
        let total = total as f64;
        let c_w = followers.iter().find(|&&(v, _)| v == word).map_or(0, |&(_, c)| c);
        if self.kneser_ney {
            let mut mass = 0.0;
            for &(_, c) in &followers {
                mass += self.discount(n, c);
            }
            (c_w as f64 - self.discount(n, c_w)).max(0.0) / total + mass / total * lower
        } else {
            let t = followers.len() as f64;
            (c_w as f64 + t * lower) / (total + t)
        }
    }
}

/// Deterministic "predictor" for typing simulations: at each word position
/// the pool is ranked by a hash of (seed, position, word).
pub fn scripted_list(
    seed: u64,
    pool: &[String],
    position: usize,
    prefix: &str,
    n: usize,
    excluded: &HashSet<String>,
) -> Vec<String> {
    let mut ranked: Vec<(u64, &String)> = pool
        .iter()
        .filter(|w| w.starts_with(prefix) && !excluded.contains(*w))
        .map(|w| {
            let mut h = DefaultHasher::new();
            (seed, position, w).hash(&mut h);
            (h.finish(), w)
        })
        .collect();
    ranked.sort();
    ranked.into_iter().take(n).map(|(_, w)| w.clone()).collect()
}

pub struct Scripted {
    pub seed: u64,
    pub pool: Vec<String>,
    pub position: usize,
}

impl Predictor for Scripted {
    fn predict(&mut self, prefix: &str, n: usize, excluded: &HashSet<String>) -> Vec<Prediction> {
        scripted_list(self.seed, &self.pool, self.position, prefix, n, excluded)
            .into_iter()
            .map(|word| Prediction { word, p: 0.1 })
            .collect()
    }

    fn observe(&mut self, token: &Token) {
        if token.is_word() {
            self.position += 1;
        }
    }

    fn probability(&mut self, _word: &str) -> f64 {
        0.1
    }
}

/// Keystroke counting written directly from the interaction rules: for
/// each word, look at the list before every letter; pick the word when it
/// is listed and picking is cheaper than finishing it by hand; otherwise
/// type a letter, and the listed words are not offered again for this
/// word. A typed-out word is followed by a space, a picked one gets its
/// space for free, the last token gets none. `tokens` holds
/// `(surface, is_word)`.
pub fn reference_keystrokes(seed: u64, pool: &[String], tokens: &[(String, bool)], n: usize) -> (u64, u64) {
    let mut kp = 0u64;
    let mut position = 0usize;
    for (i, (surface, is_word)) in tokens.iter().enumerate() {
        let space = if i + 1 == tokens.len() { 0 } else { 1 };
        let letters: Vec<char> = surface.chars().collect();
        if !is_word {
            kp += letters.len() as u64 + space;
            continue;
        }
        let mut offered = HashSet::new();
        let mut typed = 0usize;
        loop {
            let by_hand = (letters.len() - typed) as u64 + space;
            let prefix: String = letters[..typed].iter().collect();
            let list = scripted_list(seed, pool, position, &prefix, n, &offered);
            if by_hand > 1 && list.contains(surface) {
                kp += 1;
                break;
            }
            if typed == letters.len() {
                kp += space;
                break;
            }
            offered.extend(list);
            typed += 1;
            kp += 1;
        }
        position += 1;
    }
    let ka = tokens.iter().map(|(s, _)| s.chars().count() as u64).sum::<u64>() + tokens.len() as u64 - 1;
    (kp, ka)
}

const FUNCTION_WORDS: [&str; 40] = [
    "the", "of", "and", "a", "to", "in", "is", "that", "it", "was", "for", "on", "with", "as", "by", "at",
    "from", "this", "which", "but", "not", "are", "or", "be", "an", "they", "had", "his", "her", "their",
    "has", "have", "were", "been", "its", "into", "after", "than", "there", "when",
];

/// English-like text: documents on one of `topics` themes, each drawing
/// its content words mostly from its theme and repeating a handful of them.
pub struct DeskGenerator {
    topics: Vec<Vec<String>>,
    general: Vec<String>,
}

impl DeskGenerator {
    pub fn new(rng: &mut TestRng, topics: usize, words_per_topic: usize, general: usize) -> Self {
        let pool = word_pool(rng, topics * words_per_topic + general);
        DeskGenerator {
            topics: pool[..topics * words_per_topic]
                .chunks(words_per_topic)
                .map(<[String]>::to_vec)
                .collect(),
            general: pool[topics * words_per_topic..].to_vec(),
        }
    }

    pub fn document(&self, rng: &mut TestRng, sentences: usize) -> String {
        let topic = &self.topics[rng.random_range(0..self.topics.len())];
        let burst: Vec<&String> = (0..8).map(|_| &topic[zipf_index(rng, topic.len(), 1.0)]).collect();
        let mut out = String::new();
        for s in 0..sentences {
            let len = rng.random_range(5..=16);
            let mut words: Vec<&str> = Vec::with_capacity(len);
            for _ in 0..len {
                let w: &str = if rng.random_bool(0.45) {
                    FUNCTION_WORDS[zipf_index(rng, FUNCTION_WORDS.len(), 1.0)]
                } else if rng.random_bool(0.3) {
                    burst.choose(rng).unwrap()
                } else if rng.random_bool(0.75) {
                    &topic[zipf_index(rng, topic.len(), 1.0)]
                } else {
                    &self.general[zipf_index(rng, self.general.len(), 1.0)]
                };
                words.push(w);
            }
            if s > 0 {
                out.push(' ');
            }
            for (i, w) in words.iter().enumerate() {
                if i == 0 {
                    let mut c = w.chars();
                    let first = c.next().unwrap();
                    out.extend(first.to_uppercase());
                    out.push_str(c.as_str());
                } else {
                    if rng.random_bool(0.08) {
                        out.push(',');
                    }
                    out.push(' ');
                    out.push_str(w);
                }
            }
            out.push(if rng.random_bool(0.1) { '?' } else { '.' });
        }
        out
    }

    /// Documents separated by blank lines until `chars` characters.
    pub fn text(&self, rng: &mut TestRng, chars: usize) -> String {
        let mut out = String::new();
        while out.len() < chars {
            if !out.is_empty() {
                out.push_str("\n\n");
            }
            let n = rng.random_range(8..=20);
            out.push_str(&self.document(rng, n));
        }
        out
    }
}
