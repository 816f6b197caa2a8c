use std::collections::{HashSet, VecDeque};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::cache::{combine_cache, CacheState};
use super::config::{CombinerConfig, Method};
use super::interpolate::{confidence_lambda, geometric_interpolate, linear_interpolate, Weights};
use super::rerank::partial_rerank;
use crate::corpus::{is_numeral, Token, TokenKind, WordId};
use crate::error::{Error, Result};
use crate::lsa::{lsa_distribution, ContextVector};
use crate::ngram::NGramModel;
use crate::semantic::{top_by_score, SemanticSpace};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub word: String,
    pub p: f64,
}

/// Anything that can offer next-word candidates and follow the text.
pub trait Predictor {
    /// Up to `n` words starting with `prefix` and not in `excluded`, most
    /// probable first.
    fn predict(&mut self, prefix: &str, n: usize, excluded: &HashSet<String>) -> Vec<Prediction>;

    /// Appends a committed token to the context.
    fn observe(&mut self, token: &Token);

    /// Probability of `word` as the next word (unknown words score as
    /// `<unk>`).
    fn probability(&mut self, word: &str) -> f64;

    /// Whether the word has its own entry in the vocabulary.
    fn is_known(&self, _word: &str) -> bool {
        true
    }
}

/// The n-gram model and optional semantic space, with the id maps and the
/// prefix index shared by every session.
#[derive(Debug)]
pub struct Models {
    lm: NGramModel,
    space: Option<SemanticSpace>,
    lm_to_space: Vec<Option<u32>>,
    space_to_lm: Vec<Option<WordId>>,
    predictable: Vec<bool>,
    prefix_index: Vec<(String, WordId)>,
}

impl Models {
    pub fn new(lm: NGramModel, space: Option<SemanticSpace>) -> Self {
        let vocab = lm.vocab();
        let (unk, bos, eos) = (vocab.unk_id(), lm.bos(), lm.eos());
        let predictable: Vec<bool> = vocab
            .words()
            .map(|(id, w)| {
                id != unk
                    && id != bos
                    && id != eos
                    && w.chars().next().is_some_and(char::is_alphanumeric)
                    && !is_numeral(w)
            })
            .collect();
        let mut prefix_index: Vec<(String, WordId)> = vocab
            .words()
            .filter(|&(id, _)| predictable[id as usize])
            .map(|(id, w)| (w.to_string(), id))
            .collect();
        prefix_index.sort();
        let lm_to_space: Vec<Option<u32>> = match &space {
            Some(s) => vocab.words().map(|(_, w)| s.id(w)).collect(),
            None => vec![None; vocab.len()],
        };
        let space_to_lm = match &space {
            Some(s) => s.words().iter().map(|w| vocab.id(w)).collect(),
            None => Vec::new(),
        };
        Models {
            lm,
            space,
            lm_to_space,
            space_to_lm,
            predictable,
            prefix_index,
        }
    }

    pub fn lm(&self) -> &NGramModel {
        &self.lm
    }

    pub fn space(&self) -> Option<&SemanticSpace> {
        self.space.as_ref()
    }

    pub fn is_predictable(&self, id: WordId) -> bool {
        self.predictable[id as usize]
    }

    pub fn space_id(&self, id: WordId) -> Option<u32> {
        self.lm_to_space[id as usize]
    }

    /// Predictable words starting with `prefix`, in string order.
    pub fn candidates(&self, prefix: &str) -> &[(String, WordId)] {
        let lo = self.prefix_index.partition_point(|(w, _)| w.as_str() < prefix);
        let len = self.prefix_index[lo..].partition_point(|(w, _)| w.starts_with(prefix));
        &self.prefix_index[lo..lo + len]
    }

    /// An LSA distribution moved onto n-gram ids and renormalized over the
    /// words both models know.
    fn project(&self, lsa: &[f64], base: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; base.len()];
        for (sid, &p) in lsa.iter().enumerate() {
            if let Some(id) = self.space_to_lm[sid] {
                out[id as usize] = p;
            }
        }
        let total: f64 = out.iter().sum();
        if total > 0.0 {
            out.iter_mut().for_each(|p| *p /= total);
            out
        } else {
            base.to_vec()
        }
    }
}

/// Shared models plus one combination setting.
#[derive(Debug, Clone)]
pub struct Pipeline {
    models: Arc<Models>,
    config: Arc<CombinerConfig>,
}

impl Pipeline {
    pub fn new(models: Arc<Models>, config: CombinerConfig) -> Result<Self> {
        config.validate()?;
        if config.method.needs_space() && models.space.is_none() {
            return Err(Error::invalid(format!(
                "method `{}` needs a semantic space",
                config.method
            )));
        }
        Ok(Pipeline {
            models,
            config: Arc::new(config),
        })
    }

    pub fn config(&self) -> &CombinerConfig {
        &self.config
    }

    pub fn models(&self) -> &Arc<Models> {
        &self.models
    }

    pub fn session(&self) -> PipelineSession {
        let c = &self.config;
        let cache = match c.method {
            Method::Cache => Some(CacheState::plain(c.cache_size, c.mu, c.beta)),
            Method::SemanticCache => Some(CacheState::semantic(c.cache_size, c.mu, c.beta)),
            _ => None,
        };
        let dims = self.models.space.as_ref().map_or(0, SemanticSpace::dims);
        PipelineSession {
            models: Arc::clone(&self.models),
            config: Arc::clone(&self.config),
            history: vec![self.models.lm.bos()],
            context: ContextVector::zero(dims),
            window: VecDeque::new(),
            cache,
            dist: None,
        }
    }
}

/// Per-text state: n-gram history, context vector and cache. The combined
/// distribution is computed once per context and reused until the next
/// observed token.
#[derive(Debug, Clone)]
pub struct PipelineSession {
    models: Arc<Models>,
    config: Arc<CombinerConfig>,
    history: Vec<WordId>,
    context: ContextVector,
    window: VecDeque<u32>,
    cache: Option<CacheState>,
    dist: Option<Vec<f64>>,
}

impl PipelineSession {
    pub fn config(&self) -> &CombinerConfig {
        &self.config
    }

    pub fn cache(&self) -> Option<&CacheState> {
        self.cache.as_ref()
    }

    pub fn context(&self) -> &ContextVector {
        &self.context
    }

    fn order(&self) -> usize {
        let lm = self.models.lm.order();
        self.config.order.map_or(lm, |o| o.min(lm))
    }

    /// Combined distribution over n-gram vocabulary ids.
    pub fn distribution(&mut self) -> &[f64] {
        if self.dist.is_none() {
            self.dist = Some(self.compute());
        }
        self.dist.as_deref().expect("just computed")
    }

    fn compute(&self) -> Vec<f64> {
        let m = &*self.models;
        let c = &*self.config;
        let keep = self.order() - 1;
        let h = &self.history[self.history.len().saturating_sub(keep)..];
        let base = m.lm.distribution(h);
        let Some(space) = m.space.as_ref().filter(|_| c.method.needs_space()) else {
            return match &self.cache {
                Some(cache) => combine_cache(&base, cache),
                None => base,
            };
        };
        if c.method == Method::SemanticCache {
            return combine_cache(&base, self.cache.as_ref().expect("cache method has a cache"));
        }
        if c.method == Method::Rerank {
            let cos = space.cosines_to(&self.context.v);
            return partial_rerank(&base, c.n_best, c.beta, |w| {
                m.lm_to_space[w as usize].map(|s| (cos[s as usize], space.density_by_id(s)))
            });
        }
        let lsa = lsa_distribution(space, &self.context, c.gamma).expect("validated pipeline");
        let ps = m.project(&lsa.probs, &base);
        let per_word: Vec<f64>;
        let weights = match c.method {
            Method::Li | Method::Gi => Weights::Constant(c.lambda),
            _ => {
                per_word = m
                    .lm_to_space
                    .iter()
                    .map(|s| 1.0 - confidence_lambda(s.map(|s| space.density_by_id(s)), c.beta))
                    .collect();
                Weights::PerWord(&per_word)
            }
        };
        let out = match c.method {
            Method::Li | Method::Cwli => linear_interpolate(&base, &ps, weights),
            _ => geometric_interpolate(&base, &ps, weights),
        };
        out.expect("validated pipeline")
    }

    fn observe_word(&mut self, word: &str) {
        let m = Arc::clone(&self.models);
        let id = m.lm.vocab().id_or_unk(word);
        self.history.push(id);
        let keep = self.order().saturating_sub(1).max(1);
        if self.history.len() > keep {
            self.history.drain(..self.history.len() - keep);
        }
        let sid = m.space.as_ref().and_then(|s| s.id(word));
        if let Some(cache) = &mut self.cache {
            if id != m.lm.vocab().unk_id() {
                let neighbors: Vec<(WordId, f64)> = match (cache.is_semantic(), &m.space, sid) {
                    (true, Some(space), Some(sid)) => space
                        .nearest_ids(sid, self.config.neighbors, self.config.theta)
                        .into_iter()
                        .filter_map(|(n, cos)| m.space_to_lm[n as usize].map(|w| (w, cos)))
                        .collect(),
                    _ => Vec::new(),
                };
                cache.push(id, &neighbors);
            }
        }
        if let (Some(space), Some(sid)) = (&m.space, sid) {
            self.context.add_id(space, sid);
            if let Some(limit) = self.config.context_window {
                self.window.push_back(sid);
                if self.window.len() > limit {
                    let old = self.window.pop_front().expect("non-empty window");
                    self.context.subtract_id(space, old);
                }
            }
        }
    }
}

impl Predictor for PipelineSession {
    fn predict(&mut self, prefix: &str, n: usize, excluded: &HashSet<String>) -> Vec<Prediction> {
        let prefix = prefix.to_lowercase();
        let models = Arc::clone(&self.models);
        let dist = self.distribution();
        let mut scored: Vec<(u32, f64)> = models
            .candidates(&prefix)
            .iter()
            .filter(|(w, _)| !excluded.contains(w))
            .map(|&(_, id)| (id, dist[id as usize]))
            .collect();
        top_by_score(&mut scored, n);
        let vocab = models.lm.vocab();
        scored
            .into_iter()
            .map(|(id, p)| Prediction {
                word: vocab.word(id).to_string(),
                p,
            })
            .collect()
    }

    fn observe(&mut self, token: &Token) {
        match token.kind {
            TokenKind::Word => self.observe_word(&token.surface),
            TokenKind::Punctuation => return,
            TokenKind::SentenceBoundary => {
                self.history.clear();
                self.history.push(self.models.lm.bos());
            }
        }
        self.dist = None;
    }

    fn probability(&mut self, word: &str) -> f64 {
        let id = self.models.lm.vocab().id_or_unk(word);
        self.distribution()[id as usize]
    }

    fn is_known(&self, word: &str) -> bool {
        self.models.lm.vocab().id(word).is_some()
    }
}
