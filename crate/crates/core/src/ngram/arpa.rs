//! ARPA backoff-model text format.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::model::{NGramModel, LOG_ZERO};
use crate::corpus::{Vocabulary, WordId, UNK};
use crate::error::{Error, Result};

fn fmt(x: f64) -> String {
    format!("{x:.6}")
}

/// Writes the model with 6 fractional digits per value.
pub fn write_arpa<W: Write>(model: &NGramModel, out: W) -> Result<()> {
    let mut out = BufWriter::new(out);
    let vocab = model.vocab();
    let order = model.order();

    let mut by_order: Vec<Vec<(Vec<WordId>, f64)>> = vec![Vec::new(); order];
    for (history, node) in &model.histories {
        if history.len() >= order {
            continue;
        }
        for (&w, &lp) in &node.next {
            let mut gram = history.to_vec();
            gram.push(w);
            by_order[history.len()].push((gram, lp));
        }
    }
    for grams in &mut by_order {
        grams.sort_by(|a, b| a.0.cmp(&b.0));
    }

    writeln!(out)?;
    writeln!(out, "\\data\\")?;
    for (i, grams) in by_order.iter().enumerate() {
        writeln!(out, "ngram {}={}", i + 1, grams.len())?;
    }
    for (i, grams) in by_order.iter().enumerate() {
        writeln!(out)?;
        writeln!(out, "\\{}-grams:", i + 1)?;
        for (gram, lp) in grams {
            let words: Vec<&str> = gram.iter().map(|&id| vocab.word(id)).collect();
            write!(out, "{}\t{}", fmt(*lp), words.join(" "))?;
            if let Some(b) = model.histories.get(&gram[..]).and_then(|n| n.backoff) {
                write!(out, "\t{}", fmt(b))?;
            }
            writeln!(out)?;
        }
    }
    writeln!(out)?;
    writeln!(out, "\\end\\")?;
    out.flush()?;
    Ok(())
}

pub fn export_arpa(model: &NGramModel, path: impl AsRef<Path>) -> Result<()> {
    write_arpa(model, File::create(path)?)
}

pub fn import_arpa(path: impl AsRef<Path>) -> Result<NGramModel> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|source| Error::Load {
        path: path.to_path_buf(),
        source,
    })?;
    read_arpa(BufReader::new(file))
}

fn parse_float(s: &str, line: usize) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::parse(line, format!("invalid number `{s}`")))
}

enum Section {
    Preamble,
    Data,
    Grams(usize),
    End,
}

pub fn read_arpa<R: BufRead>(input: R) -> Result<NGramModel> {
    let mut declared: Vec<usize> = Vec::new();
    // entries per order: (words, logprob, backoff)
    let mut entries: Vec<Vec<(Vec<String>, f64, Option<f64>)>> = Vec::new();
    let mut section = Section::Preamble;
    let mut last_line = 0;

    for (i, line) in input.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed == "\\data\\" {
            if !matches!(section, Section::Preamble) {
                return Err(Error::parse(lineno, "unexpected \\data\\ marker"));
            }
            section = Section::Data;
            continue;
        }
        if trimmed == "\\end\\" {
            let Section::Grams(prev) = section else {
                return Err(Error::parse(lineno, "\\end\\ before any n-gram section"));
            };
            check_count(&entries, &declared, prev, lineno)?;
            section = Section::End;
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('\\') {
            let Some(n) = rest
                .strip_suffix("-grams:")
                .and_then(|n| n.parse::<usize>().ok())
            else {
                return Err(Error::parse(lineno, format!("unknown section `{trimmed}`")));
            };
            if n == 0 || n > declared.len() {
                return Err(Error::parse(lineno, format!("section {n}-grams not declared in \\data\\")));
            }
            let expected = match section {
                Section::Data => 1,
                Section::Grams(prev) => prev + 1,
                _ => 0,
            };
            if n != expected {
                return Err(Error::parse(lineno, format!("expected \\{expected}-grams:, found \\{n}-grams:")));
            }
            if let Section::Grams(prev) = section {
                check_count(&entries, &declared, prev, lineno)?;
            }
            section = Section::Grams(n);
            continue;
        }
        match section {
            Section::Preamble => {}
            Section::Data => {
                let spec = trimmed
                    .strip_prefix("ngram ")
                    .ok_or_else(|| Error::parse(lineno, "expected `ngram N=count`"))?;
                let (n, c) = spec
                    .split_once('=')
                    .ok_or_else(|| Error::parse(lineno, "expected `ngram N=count`"))?;
                let n: usize = n.trim().parse().map_err(|_| Error::parse(lineno, "bad order"))?;
                let c: usize = c.trim().parse().map_err(|_| Error::parse(lineno, "bad count"))?;
                if n != declared.len() + 1 {
                    return Err(Error::parse(lineno, "n-gram orders must be declared in sequence"));
                }
                declared.push(c);
                entries.push(Vec::new());
            }
            Section::Grams(n) => {
                let fields: Vec<&str> = trimmed.split_whitespace().collect();
                if fields.len() != n + 1 && fields.len() != n + 2 {
                    return Err(Error::parse(lineno, format!("expected {n} words with a log probability")));
                }
                let lp = parse_float(fields[0], lineno)?;
                let words = fields[1..=n].iter().map(|s| s.to_string()).collect();
                let bow = match fields.get(n + 1) {
                    Some(b) => Some(parse_float(b, lineno)?),
                    None => None,
                };
                entries[n - 1].push((words, lp, bow));
            }
            Section::End => {
                return Err(Error::parse(lineno, "content after \\end\\"));
            }
        }
    }

    match section {
        Section::End => {}
        Section::Grams(n) => {
            check_count(&entries, &declared, n, last_line)?;
            return Err(Error::parse(last_line, "missing \\end\\ marker"));
        }
        _ => return Err(Error::parse(last_line, "missing \\end\\ marker")),
    }
    let n_sections = entries.iter().filter(|e| !e.is_empty()).count().max(1);
    if let Some(n) = (1..=declared.len()).find(|&n| entries[n - 1].len() != declared[n - 1]) {
        return Err(Error::parse(last_line, format!("{n}-gram count does not match header")));
    }
    let order = declared.len().max(n_sections);

    let mut vocab = Vocabulary::new();
    for (words, _, _) in &entries[0] {
        vocab.push(&words[0], 0, false);
    }
    let unk_declared = entries[0].iter().any(|(w, _, _)| w[0] == UNK);
    for marker in [super::BOS, super::EOS] {
        vocab.push(marker, 0, false);
    }
    let mut model = NGramModel::empty(order, vocab)?;
    if !unk_declared {
        model.set_entry(&[model.vocab().unk_id()], LOG_ZERO);
    }
    for grams in &entries {
        for (words, lp, bow) in grams {
            let ids: Vec<WordId> = words
                .iter()
                .map(|w| {
                    model
                        .vocab()
                        .id(w)
                        .ok_or_else(|| Error::parse(0, format!("word `{w}` missing from unigrams")))
                })
                .collect::<Result<_>>()?;
            model.set_entry(&ids, *lp);
            if let Some(b) = bow {
                model.set_backoff(&ids, *b);
            }
        }
    }
    Ok(model)
}

fn check_count(
    entries: &[Vec<(Vec<String>, f64, Option<f64>)>],
    declared: &[usize],
    n: usize,
    lineno: usize,
) -> Result<()> {
    if entries[n - 1].len() != declared[n - 1] {
        return Err(Error::parse(
            lineno,
            format!(
                "header declares {} {n}-grams but section has {}",
                declared[n - 1],
                entries[n - 1].len()
            ),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOLDEN: &str = "\\data\\\nngram 1=3\n\n\\1-grams:\n-0.301030\t<unk>\n-0.477121\tbonjour\n-0.778151\t</s>\n\n\\end\\\n";

    #[test]
    fn golden_unigram_file() {
        let m = read_arpa(GOLDEN.as_bytes()).unwrap();
        assert_eq!(m.order(), 1);
        let p = m.probability_of("bonjour", &[]);
        assert_eq!(p, 10f64.powf(-0.477121));
        assert_eq!(m.probability_of("inconnu", &[]), 10f64.powf(-0.301030));
    }

    #[test]
    fn roundtrip_is_textually_stable() {
        let m = read_arpa(GOLDEN.as_bytes()).unwrap();
        let mut first = Vec::new();
        write_arpa(&m, &mut first).unwrap();
        let again = read_arpa(&first[..]).unwrap();
        let mut second = Vec::new();
        write_arpa(&again, &mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(m, again);
    }

    #[test]
    fn truncated_file_names_end_marker() {
        let truncated = &GOLDEN[..GOLDEN.find("\\end\\").unwrap()];
        let err = read_arpa(truncated.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("\\end\\"), "{err}");
    }

    #[test]
    fn count_mismatch_reports_line() {
        let bad = GOLDEN.replace("ngram 1=3", "ngram 1=4");
        match read_arpa(bad.as_bytes()).unwrap_err() {
            Error::Parse { line, message } => {
                assert!(line > 0);
                assert!(message.contains("1-gram"), "{message}");
            }
            e => panic!("unexpected {e}"),
        }
    }

    #[test]
    fn malformed_lines() {
        let bad = GOLDEN.replace("-0.477121\tbonjour", "oops\tbonjour");
        assert!(matches!(read_arpa(bad.as_bytes()), Err(Error::Parse { line: 6, .. })));
        let undeclared = GOLDEN.replace("\\1-grams:", "\\2-grams:");
        assert!(read_arpa(undeclared.as_bytes()).is_err());
    }

    #[test]
    fn missing_unk_is_added_with_zero_mass() {
        let text = "\\data\\\nngram 1=2\n\n\\1-grams:\n-0.3\ta\n-0.3\t</s>\n\n\\end\\\n";
        let m = read_arpa(text.as_bytes()).unwrap();
        assert_eq!(m.probability_of("zzz", &[]), 10f64.powf(LOG_ZERO));
    }
}
