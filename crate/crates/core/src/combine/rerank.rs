use crate::corpus::WordId;
use crate::semantic::top_by_score;

/// The `n_best` ids with the highest probability, ties by id.
pub fn best_n(base: &[f64], n_best: usize) -> Vec<WordId> {
    let mut scored: Vec<(u32, f64)> = base.iter().enumerate().map(|(i, &p)| (i as u32, p)).collect();
    top_by_score(&mut scored, n_best);
    scored.into_iter().map(|(i, _)| i).collect()
}

/// Reranking before the final renormalization. Each in-space member of the
/// n-best list earns `β·cos(w,h)·D(w)` (negative factors count as 0); the
/// total bonus is taken from those same members in proportion to their base
/// probability, and scaled down if it exceeds their mass. `semantics` gives
/// `(cosine with the context, density)` for in-space words.
pub fn rerank_unnormalized(
    base: &[f64],
    n_best: usize,
    beta: f64,
    semantics: impl Fn(WordId) -> Option<(f64, f64)>,
) -> Vec<f64> {
    let mut out = base.to_vec();
    if beta == 0.0 {
        return out;
    }
    let members: Vec<(WordId, f64)> = best_n(base, n_best)
        .into_iter()
        .filter_map(|w| semantics(w).map(|(c, d)| (w, beta * c.max(0.0) * d.max(0.0))))
        .collect();
    let bonus: f64 = members.iter().map(|&(_, b)| b).sum();
    let mass: f64 = members.iter().map(|&(w, _)| base[w as usize]).sum();
    if bonus <= 0.0 || mass <= 0.0 {
        return out;
    }
    let scale = if bonus > mass { mass / bonus } else { 1.0 };
    let keep = (1.0 - bonus * scale / mass).max(0.0);
    for (w, b) in members {
        let i = w as usize;
        out[i] = base[i] * keep + b * scale;
    }
    out
}

pub fn partial_rerank(
    base: &[f64],
    n_best: usize,
    beta: f64,
    semantics: impl Fn(WordId) -> Option<(f64, f64)>,
) -> Vec<f64> {
    let mut out = rerank_unnormalized(base, n_best, beta, semantics);
    if out == base {
        return out;
    }
    let total: f64 = out.iter().sum();
    out.iter_mut().for_each(|p| *p /= total);
    out
}
