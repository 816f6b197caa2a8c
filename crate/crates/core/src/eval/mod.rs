//! Keystroke saving rate simulation, perplexity and comparison reports.

mod ksr;
mod report;
mod stats;
mod typing;

pub use ksr::{evaluate_text, perplexity, simulate_events, simulate_ksr, KsrReport, PerplexityReport, WordTrace};
pub use report::{evaluate, evaluate_all, Comparison, ConfigSummary, EvalReport, REPORT_VERSION};
pub use stats::pearson;
pub use typing::{ksr, KeyEvent, TypingSession};
