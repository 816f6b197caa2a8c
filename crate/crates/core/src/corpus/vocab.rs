use std::collections::{HashMap, HashSet};
use std::io::{BufRead, Write};

use crate::corpus::Token;
use crate::error::{Error, Result};

pub type WordId = u32;

pub const UNK: &str = "<unk>";

const HEADER: &str = "#vocab\tv1";

/// Bidirectional word/id map. Id 0 is always the unknown-word sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    entries: HashMap<String, WordId>,
    words: Vec<String>,
    counts: Vec<u64>,
    stopword: Vec<bool>,
    unk: WordId,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    /// A vocabulary holding only the unknown-word entry.
    pub fn new() -> Self {
        let mut v = Vocabulary {
            entries: HashMap::new(),
            words: Vec::new(),
            counts: Vec::new(),
            stopword: Vec::new(),
            unk: 0,
        };
        v.push(UNK, 0, false);
        v
    }

    /// Keeps the `max_size` most frequent word tokens seen at least `min_count`
    /// times; frequency ties are broken lexicographically.
    pub fn build(
        tokens: &[Token],
        max_size: usize,
        min_count: u64,
        stopwords: &HashSet<String>,
    ) -> Result<Self> {
        if max_size == 0 {
            return Err(Error::invalid("vocabulary max size must be at least 1"));
        }
        let mut freq: HashMap<&str, u64> = HashMap::new();
        for t in tokens.iter().filter(|t| t.is_word()) {
            *freq.entry(t.surface.as_str()).or_default() += 1;
        }
        let mut ranked: Vec<(&str, u64)> = freq
            .iter()
            .filter(|&(w, &c)| c >= min_count && *w != UNK)
            .map(|(&w, &c)| (w, c))
            .collect();
        ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
        ranked.truncate(max_size);

        let mut vocab = Vocabulary::new();
        let mut kept = 0u64;
        for &(w, c) in &ranked {
            vocab.push(w, c, stopwords.contains(w));
            kept += c;
        }
        let total: u64 = freq.values().sum();
        vocab.counts[0] = total - kept;
        Ok(vocab)
    }

    /// Appends a word (no-op returning the existing id if already present).
    pub fn push(&mut self, word: &str, count: u64, stopword: bool) -> WordId {
        if let Some(&id) = self.entries.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.entries.insert(word.to_string(), id);
        self.words.push(word.to_string());
        self.counts.push(count);
        self.stopword.push(stopword);
        id
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn unk_id(&self) -> WordId {
        self.unk
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.entries.get(word).copied()
    }

    pub fn id_or_unk(&self, word: &str) -> WordId {
        self.id(word).unwrap_or(self.unk)
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn count(&self, id: WordId) -> u64 {
        self.counts[id as usize]
    }

    pub fn is_stopword(&self, id: WordId) -> bool {
        self.stopword[id as usize]
    }

    pub fn words(&self) -> impl Iterator<Item = (WordId, &str)> {
        self.words
            .iter()
            .enumerate()
            .map(|(i, w)| (i as WordId, w.as_str()))
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{HEADER}")?;
        for (id, word) in self.words() {
            writeln!(
                out,
                "{id}\t{word}\t{}\t{}",
                self.count(id),
                u8::from(self.is_stopword(id))
            )?;
        }
        Ok(())
    }

    pub fn read_from<R: BufRead>(input: R) -> Result<Self> {
        let mut lines = input.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim_end() == HEADER => {}
            Some(Err(e)) => return Err(e.into()),
            _ => return Err(Error::parse(1, format!("expected header `{HEADER}`"))),
        }
        let mut vocab = Vocabulary {
            entries: HashMap::new(),
            words: Vec::new(),
            counts: Vec::new(),
            stopword: Vec::new(),
            unk: 0,
        };
        for (i, line) in lines.enumerate() {
            let line = line?;
            let lineno = i + 2;
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(Error::parse(lineno, "expected 4 tab-separated fields"));
            }
            let id: usize = fields[0]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad id"))?;
            if id != vocab.len() {
                return Err(Error::parse(lineno, "ids must be dense and ordered"));
            }
            let count = fields[2]
                .parse()
                .map_err(|_| Error::parse(lineno, "bad count"))?;
            let stop = match fields[3] {
                "0" => false,
                "1" => true,
                _ => return Err(Error::parse(lineno, "stopword flag must be 0 or 1")),
            };
            if vocab.entries.contains_key(fields[1]) {
                return Err(Error::parse(lineno, "duplicate word"));
            }
            vocab.push(fields[1], count, stop);
        }
        vocab.unk = vocab
            .id(UNK)
            .ok_or_else(|| Error::parse(1, "vocabulary has no <unk> entry"))?;
        Ok(vocab)
    }
}
