use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::combine::{Prediction, Predictor};
use crate::corpus::{is_numeral, tokenize, Token, TokenPolicy};
use crate::error::{Error, Result};

/// One key press. Every event costs one keystroke.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", content = "value", rename_all = "kebab-case")]
pub enum KeyEvent {
    /// A letter extends the word being typed; whitespace commits it;
    /// punctuation commits it and is entered itself.
    Char(char),
    /// Picks the 1-based entry of the current list; a space follows for free.
    Select(usize),
    Backspace,
}

/// Interactive typing with a prediction list. Words shown in the list are
/// not offered again while the same word is being typed.
#[derive(Debug, Clone)]
pub struct TypingSession<P> {
    predictor: P,
    list_size: usize,
    policy: TokenPolicy,
    committed: Vec<Token>,
    prefix: String,
    offered: HashSet<String>,
    list: Vec<Prediction>,
    kp: u64,
    selections: u64,
}

impl<P: Predictor> TypingSession<P> {
    pub fn new(mut predictor: P, list_size: usize) -> Self {
        let list = predictor.predict("", list_size, &HashSet::new());
        TypingSession {
            predictor,
            list_size,
            policy: TokenPolicy::default(),
            committed: Vec::new(),
            prefix: String::new(),
            offered: HashSet::new(),
            list,
            kp: 0,
            selections: 0,
        }
    }

    pub fn predictions(&self) -> &[Prediction] {
        &self.list
    }

    pub fn prefix(&self) -> &str {
        &self.prefix
    }

    pub fn committed(&self) -> &[Token] {
        &self.committed
    }

    pub fn offered(&self) -> &HashSet<String> {
        &self.offered
    }

    pub fn list_size(&self) -> usize {
        self.list_size
    }

    pub fn predictor(&self) -> &P {
        &self.predictor
    }

    pub fn predictor_mut(&mut self) -> &mut P {
        &mut self.predictor
    }

    pub fn into_predictor(self) -> P {
        self.predictor
    }

    /// Keystrokes spent so far.
    pub fn kp(&self) -> u64 {
        self.kp
    }

    pub fn selections(&self) -> u64 {
        self.selections
    }

    /// Characters of the entered text (pending word included) with single
    /// spaces between tokens.
    pub fn ka(&self) -> u64 {
        let mut n = 0u64;
        let mut count = 0u64;
        let pending = (!self.prefix.is_empty()).then_some(self.prefix.as_str());
        for s in self.surfaces().chain(pending) {
            n += s.chars().count() as u64;
            count += 1;
        }
        n + count.saturating_sub(1)
    }

    pub fn ksr(&self) -> f64 {
        ksr(self.kp, self.ka())
    }

    fn surfaces(&self) -> impl Iterator<Item = &str> {
        self.committed
            .iter()
            .filter(|t| !matches!(t.kind, crate::corpus::TokenKind::SentenceBoundary))
            .map(|t| t.surface.as_str())
    }

    /// Committed tokens joined by single spaces.
    pub fn text(&self) -> String {
        self.surfaces().collect::<Vec<_>>().join(" ")
    }

    /// 1-based rank of `word` in the current list.
    pub fn rank_of(&self, word: &str) -> Option<usize> {
        self.list.iter().position(|p| p.word == word).map(|i| i + 1)
    }

    fn refresh(&mut self) {
        self.list = self.predictor.predict(&self.prefix, self.list_size, &self.offered);
    }

    fn commit(&mut self, token: Token) {
        self.predictor.observe(&token);
        self.committed.push(token);
    }

    fn commit_prefix(&mut self) {
        if self.prefix.is_empty() {
            return;
        }
        let prefix = std::mem::take(&mut self.prefix);
        for t in tokenize(&prefix, &self.policy) {
            self.commit(t);
        }
    }

    fn extends_word(&self, c: char) -> bool {
        if c.is_alphanumeric() {
            return true;
        }
        if self.prefix.is_empty() {
            return false;
        }
        match c {
            '\'' | '’' | '-' => true,
            '.' | ',' => is_numeral(&self.prefix) && self.prefix.ends_with(|l: char| l.is_ascii_digit()),
            _ => false,
        }
    }

    pub fn apply(&mut self, event: KeyEvent) -> Result<()> {
        match event {
            KeyEvent::Select(rank) => {
                if rank == 0 || rank > self.list.len() {
                    return Err(Error::InvalidRank {
                        rank,
                        available: self.list.len(),
                    });
                }
                let word = self.list[rank - 1].word.clone();
                self.kp += 1;
                self.selections += 1;
                self.prefix.clear();
                self.commit(Token::word(word));
                self.offered.clear();
            }
            KeyEvent::Backspace => {
                self.kp += 1;
                self.prefix.pop();
            }
            KeyEvent::Char(c) => {
                self.kp += 1;
                if c.is_whitespace() {
                    self.commit_prefix();
                    self.offered.clear();
                } else if self.extends_word(c) {
                    let shown: Vec<String> = self.list.iter().map(|p| p.word.clone()).collect();
                    self.offered.extend(shown);
                    let c = if c == '’' { '\'' } else { c };
                    self.prefix.extend(c.to_lowercase());
                } else {
                    self.commit_prefix();
                    self.offered.clear();
                    for t in tokenize(&c.to_string(), &self.policy) {
                        self.commit(t);
                    }
                }
            }
        }
        self.refresh();
        Ok(())
    }
}

pub fn ksr(kp: u64, ka: u64) -> f64 {
    if ka == 0 {
        0.0
    } else {
        (1.0 - kp as f64 / ka as f64) * 100.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Offers a fixed vocabulary in listed order and records what it saw.
    #[derive(Default)]
    struct Fixed {
        words: Vec<String>,
        seen: Vec<Token>,
    }

    impl Predictor for Fixed {
        fn predict(&mut self, prefix: &str, n: usize, excluded: &HashSet<String>) -> Vec<Prediction> {
            self.words
                .iter()
                .filter(|w| w.starts_with(prefix) && !excluded.contains(*w))
                .take(n)
                .map(|w| Prediction { word: w.clone(), p: 0.1 })
                .collect()
        }

        fn observe(&mut self, token: &Token) {
            self.seen.push(token.clone());
        }

        fn probability(&mut self, _word: &str) -> f64 {
            0.1
        }
    }

    fn fixed(words: &[&str]) -> Fixed {
        Fixed {
            words: words.iter().map(|w| w.to_string()).collect(),
            seen: Vec::new(),
        }
    }

    #[test]
    fn select_commits_and_costs_one() {
        let mut s = TypingSession::new(fixed(&["the", "cat"]), 5);
        s.apply(KeyEvent::Select(1)).unwrap();
        assert_eq!(s.text(), "the");
        assert_eq!((s.kp(), s.ka()), (1, 3));
        assert!(matches!(s.apply(KeyEvent::Select(9)), Err(Error::InvalidRank { rank: 9, available: 2 })));
        assert_eq!(s.kp(), 1);
    }

    #[test]
    fn offered_words_do_not_reappear() {
        let mut s = TypingSession::new(fixed(&["ca", "cab", "cat", "dog"]), 2);
        assert_eq!(s.rank_of("ca"), Some(1));
        s.apply(KeyEvent::Char('c')).unwrap();
        assert_eq!(s.predictions().iter().map(|p| p.word.as_str()).collect::<Vec<_>>(), ["cat"]);
        s.apply(KeyEvent::Char('a')).unwrap();
        assert!(s.predictions().is_empty());
        s.apply(KeyEvent::Char(' ')).unwrap();
        assert!(s.offered().is_empty());
        assert_eq!(s.text(), "ca");
        assert_eq!(s.kp(), 3);
    }

    #[test]
    fn punctuation_commits_word_and_boundary() {
        let mut s = TypingSession::new(fixed(&[]), 5);
        for c in "Ok.".chars() {
            s.apply(KeyEvent::Char(c)).unwrap();
        }
        let kinds: Vec<&str> = s.predictor().seen.iter().map(|t| t.surface.as_str()).collect();
        assert_eq!(kinds, ["ok", ".", "</s>"]);
        assert_eq!(s.text(), "ok .");
        assert_eq!(s.ka(), 4);
    }

    #[test]
    fn numerals_and_clitics_stay_in_the_prefix() {
        let mut s = TypingSession::new(fixed(&[]), 5);
        for c in "3.5 l'".chars() {
            s.apply(KeyEvent::Char(c)).unwrap();
        }
        assert_eq!(s.prefix(), "l'");
        assert_eq!(s.text(), "3.5");
    }

    #[test]
    fn backspace_edits_the_prefix() {
        let mut s = TypingSession::new(fixed(&["ab"]), 5);
        s.apply(KeyEvent::Char('x')).unwrap();
        s.apply(KeyEvent::Backspace).unwrap();
        assert_eq!(s.prefix(), "");
        s.apply(KeyEvent::Backspace).unwrap();
        assert_eq!(s.kp(), 3);
        assert_eq!(s.ka(), 0);
    }
}
