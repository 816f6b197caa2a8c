//! LSA term space: co-occurrence counting, truncated SVD, cosine queries and
//! neighbourhood density.

mod cooccurrence;
mod io;
mod space;
mod svd;

use std::collections::HashSet;

pub use cooccurrence::{content_stream, lsa_vocabulary, CooccurrenceMatrix};
pub use io::{load_space, read_binary, read_text, save_space, write_binary, write_text};
pub use space::{SemanticSpace, DEFAULT_DENSITY_M};
pub(crate) use space::top_by_score;
pub use svd::{symmetric_eigen, truncated_svd, SparseMatrix, SvdOptions, TruncatedSvd};

use crate::corpus::Token;
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct LsaOptions {
    pub dims: usize,
    pub window: usize,
    pub columns: usize,
    pub vocab_size: usize,
    pub min_count: u64,
    pub density_m: usize,
    pub svd: SvdOptions,
}

impl Default for LsaOptions {
    fn default() -> Self {
        LsaOptions {
            dims: 150,
            window: 100,
            columns: 3000,
            vocab_size: 80_000,
            min_count: 1,
            density_m: DEFAULT_DENSITY_M,
            svd: SvdOptions::default(),
        }
    }
}

/// Builds a space from raw tokens. The column count is clamped to the
/// vocabulary size so small corpora still train.
pub fn train_space(
    tokens: &[Token],
    stopwords: &HashSet<String>,
    opts: &LsaOptions,
) -> Result<SemanticSpace> {
    let vocab = lsa_vocabulary(tokens, opts.vocab_size, opts.min_count, stopwords)?;
    let rows = vocab.len() - 1;
    if rows == 0 {
        return Err(Error::invalid("no content words to build a semantic space from"));
    }
    let content = content_stream(tokens, stopwords);
    let columns = opts.columns.min(rows);
    let matrix = CooccurrenceMatrix::build(&content, &vocab, columns, opts.window)?;
    log::info!(
        "co-occurrence matrix {rows} x {columns}, {} non-zero cells",
        matrix.nnz()
    );
    let svd = truncated_svd(&matrix.weighted(), opts.dims, &opts.svd)?;
    log::info!("svd converged after {} iterations", svd.iterations);
    SemanticSpace::from_svd(&matrix.rows, &svd, opts.density_m)
}
