pub mod corpus;
pub mod combine;
pub mod error;
pub mod eval;
pub mod lsa;
pub mod ngram;
pub mod semantic;

pub use error::{Error, Result};
