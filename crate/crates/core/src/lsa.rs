//! Context vectors over the semantic space and the cosine-derived word
//! distribution.

use crate::error::{Error, Result};
use crate::semantic::SemanticSpace;

pub const DEFAULT_GAMMA: f64 = 5.0;

/// Plain sum of the unit vectors of the in-space history words.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextVector {
    pub v: Vec<f64>,
    pub word_count: usize,
}

impl ContextVector {
    pub fn zero(dims: usize) -> Self {
        ContextVector {
            v: vec![0.0; dims],
            word_count: 0,
        }
    }

    /// Adds the word's vector; out-of-space words are ignored. Returns
    /// whether the word was in the space.
    pub fn add(&mut self, space: &SemanticSpace, word: &str) -> bool {
        match space.id(word) {
            Some(id) => {
                self.add_id(space, id);
                true
            }
            None => false,
        }
    }

    pub fn add_id(&mut self, space: &SemanticSpace, id: u32) {
        for (a, b) in self.v.iter_mut().zip(space.vector_by_id(id)) {
            *a += b;
        }
        self.word_count += 1;
    }

    pub fn subtract_id(&mut self, space: &SemanticSpace, id: u32) {
        for (a, b) in self.v.iter_mut().zip(space.vector_by_id(id)) {
            *a -= b;
        }
        self.word_count -= 1;
        if self.word_count == 0 {
            self.v.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.word_count == 0
    }
}

pub fn context_vector<S: AsRef<str>>(space: &SemanticSpace, history: &[S]) -> ContextVector {
    let mut ctx = ContextVector::zero(space.dims());
    for w in history {
        ctx.add(space, w.as_ref());
    }
    ctx
}

/// Probabilities indexed by space id, with the cosines they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct LsaDistribution {
    pub probs: Vec<f64>,
    pub cosines: Vec<f64>,
    pub cos_min: f64,
    pub gamma: f64,
    pub degenerate: bool,
}

impl LsaDistribution {
    pub fn prob(&self, space: &SemanticSpace, word: &str) -> Option<f64> {
        space.id(word).map(|id| self.probs[id as usize])
    }
}

/// `(cos(w,h) - cos_min(h))^gamma`, normalized over the whole space. A zero
/// context or a flat cosine profile gives the uniform distribution.
pub fn lsa_distribution(space: &SemanticSpace, ctx: &ContextVector, gamma: f64) -> Result<LsaDistribution> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::invalid(format!("contrast factor must be positive, got {gamma}")));
    }
    if ctx.v.len() != space.dims() {
        return Err(Error::invalid("context vector dimension does not match the space"));
    }
    let n = space.len();
    let cosines = space.cosines_to(&ctx.v);
    let cos_min = cosines.iter().copied().fold(f64::INFINITY, f64::min);
    let uniform = |cosines: Vec<f64>| LsaDistribution {
        probs: vec![1.0 / n as f64; n],
        cosines,
        cos_min,
        gamma,
        degenerate: true,
    };
    if ctx.is_zero() {
        return Ok(uniform(cosines));
    }
    let mut probs: Vec<f64> = cosines.iter().map(|&c| (c - cos_min).powf(gamma)).collect();
    let total: f64 = probs.iter().sum();
    if !(total > 0.0 && total.is_finite()) {
        return Ok(uniform(cosines));
    }
    probs.iter_mut().for_each(|p| *p /= total);
    Ok(LsaDistribution {
        probs,
        cosines,
        cos_min,
        gamma,
        degenerate: false,
    })
}
