//! Backoff n-gram language model: counting, smoothing, querying and ARPA
//! interchange.

mod arpa;
mod counts;
mod estimate;
mod model;

pub use arpa::{export_arpa, import_arpa, read_arpa, write_arpa};
pub use counts::{lm_vocabulary, sentence_ids, CountTable, NGram, BOS, EOS};
pub use estimate::{estimate, mkn_discounts};
pub use model::{ModelMeta, NGramModel, Smoothing, LOG_ZERO};

use crate::corpus::Token;
use crate::error::Result;

#[derive(Debug, Clone)]
pub struct TrainOptions {
    pub order: usize,
    pub smoothing: Smoothing,
    pub vocab_size: usize,
    pub min_count: u64,
    /// Per-order minimum counts applied before estimation.
    pub prune: Option<Vec<u64>>,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            order: 4,
            smoothing: Smoothing::ModifiedKneserNey,
            vocab_size: 141_000,
            min_count: 1,
            prune: None,
        }
    }
}

/// Vocabulary, counting and estimation in one step.
pub fn train(tokens: &[Token], opts: &TrainOptions) -> Result<NGramModel> {
    let vocab = lm_vocabulary(tokens, opts.vocab_size, opts.min_count)?;
    let sents = sentence_ids(tokens, &vocab);
    let bos = vocab.id_or_unk(BOS);
    let eos = vocab.id_or_unk(EOS);
    let mut counts = CountTable::count(&sents, opts.order, bos, eos)?;
    if let Some(min) = &opts.prune {
        counts = counts.prune(min);
    }
    estimate(&counts, &vocab, opts.smoothing)
}
