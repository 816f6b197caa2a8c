//! Tokenization, vocabularies and stopword lists shared by the trainers and
//! the evaluators.

mod stopwords;
mod tokenize;
mod vocab;

pub use stopwords::{default_stopwords, load_stopwords, parse_stopwords};
pub use tokenize::{
    detokenize_words, is_numeral, is_word_char, sentences, tokenize, Token, TokenKind,
    TokenPolicy, BOUNDARY,
};
pub use vocab::{Vocabulary, WordId, UNK};
