use std::iter::Peekable;
use std::str::Chars;

use serde::{Deserialize, Serialize};

/// Surface used for sentence-boundary tokens.
pub const BOUNDARY: &str = "</s>";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TokenKind {
    Word,
    Punctuation,
    SentenceBoundary,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub surface: String,
    pub kind: TokenKind,
}

impl Token {
    pub fn word(surface: impl Into<String>) -> Self {
        Token {
            surface: surface.into(),
            kind: TokenKind::Word,
        }
    }

    pub fn punctuation(c: char) -> Self {
        Token {
            surface: c.to_string(),
            kind: TokenKind::Punctuation,
        }
    }

    pub fn boundary() -> Self {
        Token {
            surface: BOUNDARY.to_string(),
            kind: TokenKind::SentenceBoundary,
        }
    }

    pub fn is_word(&self) -> bool {
        self.kind == TokenKind::Word
    }

    /// Digits with optional interior `.`/`,` separators.
    pub fn is_numeral(&self) -> bool {
        self.is_word() && is_numeral(&self.surface)
    }
}

pub fn is_numeral(s: &str) -> bool {
    s.chars().any(|c| c.is_ascii_digit())
        && s.chars().all(|c| c.is_numeric() || c == '.' || c == ',')
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TokenPolicy {
    pub lowercase: bool,
    /// Split after an apostrophe, so `l'ami` becomes `l'` and `ami`.
    pub split_clitics: bool,
    pub sentence_final: Vec<char>,
}

impl Default for TokenPolicy {
    fn default() -> Self {
        TokenPolicy {
            lowercase: true,
            split_clitics: true,
            sentence_final: vec!['.', '!', '?', '…'],
        }
    }
}

impl TokenPolicy {
    pub fn is_sentence_final(&self, c: char) -> bool {
        self.sentence_final.contains(&c)
    }
}

/// Characters that may appear inside a word token when typed interactively.
pub fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '\'' || c == '’' || c == '-'
}

fn normalize_apostrophe(c: char) -> char {
    if c == '’' {
        '\''
    } else {
        c
    }
}

fn push_char(buf: &mut String, c: char, policy: &TokenPolicy) {
    if policy.lowercase {
        buf.extend(c.to_lowercase());
    } else {
        buf.push(c);
    }
}

fn read_word(chars: &mut Peekable<Chars<'_>>, policy: &TokenPolicy) -> String {
    let mut word = String::new();
    while let Some(&c) = chars.peek() {
        if c.is_alphanumeric() {
            push_char(&mut word, c, policy);
            chars.next();
            continue;
        }
        let mut lookahead = chars.clone();
        lookahead.next();
        let next = lookahead.peek().copied();
        match c {
            '\'' | '’' => {
                if policy.split_clitics {
                    word.push('\'');
                    chars.next();
                    break;
                } else if next.is_some_and(char::is_alphanumeric) {
                    word.push('\'');
                    chars.next();
                } else {
                    // trailing apostrophe still belongs to the word
                    word.push('\'');
                    chars.next();
                    break;
                }
            }
            '-' if next.is_some_and(char::is_alphanumeric) => {
                word.push('-');
                chars.next();
            }
            '.' | ','
                if next.is_some_and(|n| n.is_ascii_digit())
                    && word.chars().last().is_some_and(|l| l.is_ascii_digit()) =>
            {
                word.push(c);
                chars.next();
            }
            _ => break,
        }
    }
    word
}

/// Splits text into lowercase word, punctuation and sentence-boundary tokens.
pub fn tokenize(text: &str, policy: &TokenPolicy) -> Vec<Token> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c.is_alphanumeric() {
            tokens.push(Token::word(read_word(&mut chars, policy)));
        } else {
            chars.next();
            let c = normalize_apostrophe(c);
            tokens.push(Token::punctuation(c));
            if policy.is_sentence_final(c) {
                let run_continues = chars.peek().is_some_and(|&n| policy.is_sentence_final(n));
                if !run_continues {
                    tokens.push(Token::boundary());
                }
            }
        }
    }
    tokens
}

/// Word tokens joined by single spaces.
pub fn detokenize_words(tokens: &[Token]) -> String {
    tokens
        .iter()
        .filter(|t| t.is_word())
        .map(|t| t.surface.as_str())
        .collect::<Vec<_>>()
        .join(" ")
}

/// Splits a token stream into sentences of word tokens; punctuation is dropped.
pub fn sentences(tokens: &[Token]) -> Vec<Vec<&str>> {
    let mut out = Vec::new();
    let mut current = Vec::new();
    for t in tokens {
        match t.kind {
            TokenKind::Word => current.push(t.surface.as_str()),
            TokenKind::Punctuation => {}
            TokenKind::SentenceBoundary => {
                if !current.is_empty() {
                    out.push(std::mem::take(&mut current));
                }
            }
        }
    }
    if !current.is_empty() {
        out.push(current);
    }
    out
}
