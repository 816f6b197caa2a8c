use std::collections::HashMap;

use rayon::prelude::*;

use super::svd::TruncatedSvd;
use crate::error::{Error, Result};

pub const DEFAULT_DENSITY_M: usize = 100;

/// Unit-length term vectors plus the per-term density (mean cosine of the m
/// nearest neighbours).
#[derive(Debug, Clone, PartialEq)]
pub struct SemanticSpace {
    words: Vec<String>,
    index: HashMap<String, u32>,
    dims: usize,
    vectors: Vec<f64>,
    density: Vec<f64>,
    density_m: usize,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl SemanticSpace {
    /// Normalizes each vector and computes densities. Zero vectors and
    /// duplicate words are rejected.
    pub fn from_vectors(entries: Vec<(String, Vec<f64>)>, density_m: usize) -> Result<Self> {
        let mut space = Self::normalized(entries, true)?;
        space.density_m = density_m;
        space.density = space.compute_densities(density_m);
        Ok(space)
    }

    /// Vectors that are already unit length (within 1e-6) and densities
    /// that are already known, as read back from a space file. Vectors are
    /// stored unchanged.
    pub fn with_densities(
        entries: Vec<(String, Vec<f64>)>,
        density: Vec<f64>,
        density_m: usize,
    ) -> Result<Self> {
        if density.len() != entries.len() {
            return Err(Error::invalid("one density per term is required"));
        }
        let mut space = Self::normalized(entries, false)?;
        space.density = density;
        space.density_m = density_m;
        Ok(space)
    }

    fn normalized(entries: Vec<(String, Vec<f64>)>, rescale: bool) -> Result<Self> {
        let dims = entries.first().map_or(0, |(_, v)| v.len());
        if dims == 0 {
            return Err(Error::invalid("semantic space needs at least one non-empty vector"));
        }
        let mut words = Vec::with_capacity(entries.len());
        let mut index = HashMap::with_capacity(entries.len());
        let mut vectors = Vec::with_capacity(entries.len() * dims);
        for (word, v) in entries {
            if v.len() != dims {
                return Err(Error::invalid(format!("vector for `{word}` has wrong dimension")));
            }
            let n = dot(&v, &v).sqrt();
            if !(n > 0.0 && n.is_finite()) {
                return Err(Error::invalid(format!("vector for `{word}` cannot be normalized")));
            }
            if !rescale && (n - 1.0).abs() > 1e-6 {
                return Err(Error::invalid(format!("vector for `{word}` is not unit length")));
            }
            if index.insert(word.clone(), words.len() as u32).is_some() {
                return Err(Error::invalid(format!("duplicate word `{word}`")));
            }
            if rescale {
                vectors.extend(v.iter().map(|x| x / n));
            } else {
                vectors.extend_from_slice(&v);
            }
            words.push(word);
        }
        Ok(SemanticSpace {
            words,
            index,
            dims,
            vectors,
            density: Vec::new(),
            density_m: 0,
        })
    }

    /// Term vectors from the rows of `U_k Σ_k`; rows that vanish in the
    /// reduced space are left out.
    pub fn from_svd(rows: &[String], svd: &TruncatedSvd, density_m: usize) -> Result<Self> {
        let scale = svd.singular_values.first().copied().unwrap_or(0.0);
        let entries: Vec<(String, Vec<f64>)> = rows
            .iter()
            .enumerate()
            .map(|(r, w)| (w.clone(), svd.scaled_row(r)))
            .filter(|(_, v)| dot(v, v).sqrt() > 1e-12 * scale.max(1e-300))
            .collect();
        Self::from_vectors(entries, density_m)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn density_m(&self) -> usize {
        self.density_m
    }

    pub fn id(&self, word: &str) -> Option<u32> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: u32) -> &str {
        &self.words[id as usize]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn vector_by_id(&self, id: u32) -> &[f64] {
        let i = id as usize * self.dims;
        &self.vectors[i..i + self.dims]
    }

    pub fn vector(&self, word: &str) -> Option<&[f64]> {
        self.id(word).map(|id| self.vector_by_id(id))
    }

    fn require(&self, word: &str) -> Result<u32> {
        self.id(word).ok_or_else(|| Error::NotInSpace(word.to_string()))
    }

    pub fn cosine_ids(&self, a: u32, b: u32) -> f64 {
        dot(self.vector_by_id(a), self.vector_by_id(b)).clamp(-1.0, 1.0)
    }

    /// Dot product of the stored unit vectors.
    pub fn cosine(&self, a: &str, b: &str) -> Result<f64> {
        Ok(self.cosine_ids(self.require(a)?, self.require(b)?))
    }

    /// Cosine of every term with an arbitrary vector (0 for a zero vector).
    pub fn cosines_to(&self, v: &[f64]) -> Vec<f64> {
        let n = dot(v, v).sqrt();
        if n == 0.0 {
            return vec![0.0; self.len()];
        }
        self.vectors
            .par_chunks(self.dims)
            .map(|row| (dot(row, v) / n).clamp(-1.0, 1.0))
            .collect()
    }

    /// Up to `m` other terms with cosine strictly above `threshold`, best
    /// first, ties broken by id.
    pub fn nearest_ids(&self, id: u32, m: usize, threshold: f64) -> Vec<(u32, f64)> {
        let query = self.vector_by_id(id);
        let mut scored: Vec<(u32, f64)> = self
            .vectors
            .chunks(self.dims)
            .enumerate()
            .filter(|&(i, _)| i as u32 != id)
            .map(|(i, row)| (i as u32, dot(row, query).clamp(-1.0, 1.0)))
            .filter(|&(_, c)| c > threshold)
            .collect();
        top_by_score(&mut scored, m);
        scored
    }

    pub fn nearest_neighbors(&self, word: &str, m: usize, threshold: f64) -> Result<Vec<(String, f64)>> {
        let id = self.require(word)?;
        Ok(self
            .nearest_ids(id, m, threshold)
            .into_iter()
            .map(|(i, c)| (self.word(i).to_string(), c))
            .collect())
    }

    /// Mean cosine of the `m` nearest neighbours (fewer if the space is
    /// smaller); 0 for a single-term space.
    pub fn density_for(&self, id: u32, m: usize) -> f64 {
        let nn = self.nearest_ids(id, m, f64::NEG_INFINITY);
        if nn.is_empty() {
            0.0
        } else {
            nn.iter().map(|&(_, c)| c).sum::<f64>() / nn.len() as f64
        }
    }

    fn compute_densities(&self, m: usize) -> Vec<f64> {
        (0..self.len() as u32)
            .into_par_iter()
            .map(|id| self.density_for(id, m))
            .collect()
    }

    pub fn density_by_id(&self, id: u32) -> f64 {
        self.density[id as usize]
    }

    /// Stored density (computed with `density_m` neighbours).
    pub fn density(&self, word: &str) -> Result<f64> {
        Ok(self.density_by_id(self.require(word)?))
    }

    pub fn densities(&self) -> &[f64] {
        &self.density
    }
}

/// Sorts descending by score (ties by id) and keeps the first `m`.
pub(crate) fn top_by_score(scored: &mut Vec<(u32, f64)>, m: usize) {
    let cmp = |a: &(u32, f64), b: &(u32, f64)| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0));
    if m < scored.len() {
        if m > 0 {
            scored.select_nth_unstable_by(m - 1, cmp);
        }
        scored.truncate(m);
    }
    scored.sort_by(cmp);
}
