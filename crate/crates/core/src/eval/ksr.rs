use serde::{Deserialize, Serialize};

use super::typing::{ksr, KeyEvent, TypingSession};
use crate::combine::Predictor;
use crate::corpus::{tokenize, Token, TokenKind, TokenPolicy};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordTrace {
    pub word: String,
    pub keystrokes: u64,
    /// Rank picked from the list, if the word was selected.
    pub selected: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KsrReport {
    pub kp: u64,
    pub ka: u64,
    pub ksr: f64,
    pub list_size: usize,
    pub selections: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trace: Vec<WordTrace>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerplexityReport {
    pub perplexity: f64,
    pub tokens: usize,
    pub oov: usize,
    pub log10_sum: f64,
}

impl PerplexityReport {
    fn from_sum(log10_sum: f64, tokens: usize, oov: usize) -> Self {
        PerplexityReport {
            perplexity: 10f64.powf(-log10_sum / tokens as f64),
            tokens,
            oov,
            log10_sum,
        }
    }
}

/// Tokens that are typed (sentence boundaries are implied by punctuation).
fn typed_tokens(text: &str) -> Result<Vec<Token>> {
    let tokens: Vec<Token> = tokenize(text, &TokenPolicy::default())
        .into_iter()
        .filter(|t| t.kind != TokenKind::SentenceBoundary)
        .collect();
    if !tokens.iter().any(Token::is_word) {
        return Err(Error::invalid("text contains no words"));
    }
    Ok(tokens)
}

/// Keystrokes needed to type `text` with an `n`-word list: for each word,
/// select it as soon as the list shows it and selecting is cheaper than
/// finishing it by hand, otherwise type its next letter; a fully typed word
/// is followed by a space. Punctuation is typed. The last token takes no
/// trailing space. Calls `before_word` with the predictor's state just
/// before each word is entered.
fn run<P: Predictor>(
    predictor: P,
    text: &str,
    n: usize,
    mut before_word: impl FnMut(&mut P, &str) -> Result<()>,
) -> Result<(KsrReport, Vec<KeyEvent>, P)> {
    if n == 0 {
        return Err(Error::invalid("list size must be at least 1"));
    }
    let tokens = typed_tokens(text)?;
    let mut session = TypingSession::new(predictor, n);
    let mut events = Vec::new();
    let mut press = |session: &mut TypingSession<P>, ev: KeyEvent| {
        events.push(ev);
        session.apply(ev)
    };
    let mut trace = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        let last = i + 1 == tokens.len();
        let trailing = if last { 0 } else { 1 };
        let start = session.kp();
        let mut selected = None;
        match t.kind {
            TokenKind::Word => {
                before_word(session.predictor_mut(), &t.surface)?;
                let mut remaining = t.surface.chars().count();
                let mut chars = t.surface.chars();
                loop {
                    if remaining + trailing > 1 {
                        if let Some(rank) = session.rank_of(&t.surface) {
                            press(&mut session, KeyEvent::Select(rank))?;
                            selected = Some(rank);
                            break;
                        }
                    }
                    match chars.next() {
                        Some(c) => {
                            press(&mut session, KeyEvent::Char(c))?;
                            remaining -= 1;
                        }
                        None => {
                            if !last {
                                press(&mut session, KeyEvent::Char(' '))?;
                            }
                            break;
                        }
                    }
                }
            }
            _ => {
                for c in t.surface.chars().chain((!last).then_some(' ')) {
                    press(&mut session, KeyEvent::Char(c))?;
                }
            }
        }
        trace.push(WordTrace {
            word: t.surface.clone(),
            keystrokes: session.kp() - start,
            selected,
        });
    }
    let ka: u64 = tokens.iter().map(|t| t.surface.chars().count() as u64).sum::<u64>() + tokens.len() as u64 - 1;
    let report = KsrReport {
        kp: session.kp(),
        ka,
        ksr: ksr(session.kp(), ka),
        list_size: n,
        selections: session.selections(),
        trace,
    };
    Ok((report, events, session.into_predictor()))
}

/// Keystroke saving rate of `text` with an `n`-word list.
pub fn simulate_ksr<P: Predictor>(predictor: P, text: &str, n: usize) -> Result<KsrReport> {
    simulate_events(predictor, text, n).map(|(r, _)| r)
}

/// Like [`simulate_ksr`], also returning the key events the simulated user
/// pressed.
pub fn simulate_events<P: Predictor>(predictor: P, text: &str, n: usize) -> Result<(KsrReport, Vec<KeyEvent>)> {
    run(predictor, text, n, |_, _| Ok(())).map(|(r, e, _)| (r, e))
}

fn score_word<P: Predictor>(p: &mut P, word: &str, sum: &mut f64, tokens: &mut usize, oov: &mut usize) -> Result<()> {
    let prob = p.probability(word);
    if !(prob > 0.0) {
        return Err(Error::ZeroProbability(word.to_string()));
    }
    *sum += prob.log10();
    *tokens += 1;
    if !p.is_known(word) {
        *oov += 1;
    }
    Ok(())
}

/// Perplexity over the word tokens of `text`, feeding every token to the
/// predictor as it goes.
pub fn perplexity<P: Predictor>(predictor: &mut P, text: &str) -> Result<PerplexityReport> {
    let tokens = tokenize(text, &TokenPolicy::default());
    let (mut sum, mut count, mut oov) = (0.0, 0, 0);
    for t in &tokens {
        if t.is_word() {
            score_word(predictor, &t.surface, &mut sum, &mut count, &mut oov)?;
        }
        predictor.observe(t);
    }
    if count == 0 {
        return Err(Error::invalid("text contains no words"));
    }
    Ok(PerplexityReport::from_sum(sum, count, oov))
}

/// KSR and perplexity from a single pass: each word is scored against the
/// same state the typing simulation predicts from.
pub fn evaluate_text<P: Predictor>(predictor: P, text: &str, n: usize) -> Result<(KsrReport, PerplexityReport)> {
    let (mut sum, mut count, mut oov) = (0.0, 0, 0);
    let (report, _, _) = run(predictor, text, n, |p, w| score_word(p, w, &mut sum, &mut count, &mut oov))?;
    Ok((report, PerplexityReport::from_sum(sum, count, oov)))
}
