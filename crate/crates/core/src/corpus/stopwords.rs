use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

const ENGLISH: &str = include_str!("../../data/stopwords/en.txt");
const FRENCH: &str = include_str!("../../data/stopwords/fr.txt");

/// Parses a one-word-per-line list; blank lines are skipped.
pub fn parse_stopwords(text: &str) -> HashSet<String> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty())
        .map(str::to_lowercase)
        .collect()
}

pub fn load_stopwords(path: impl AsRef<Path>) -> Result<HashSet<String>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Load {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(parse_stopwords(&text))
}

/// Bundled list for `en` or `fr`.
pub fn default_stopwords(lang: &str) -> Option<HashSet<String>> {
    match lang {
        "en" => Some(parse_stopwords(ENGLISH)),
        "fr" => Some(parse_stopwords(FRENCH)),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn dedup_and_lowercase() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        write!(f, "le\nla\nLE").unwrap();
        let set = load_stopwords(f.path()).unwrap();
        assert_eq!(set, ["le", "la"].map(String::from).into());
    }

    #[test]
    fn empty_and_blank_lines() {
        let f = tempfile::NamedTempFile::new().unwrap();
        assert!(load_stopwords(f.path()).unwrap().is_empty());
        assert_eq!(parse_stopwords("\n a \n\n").len(), 1);
    }

    #[test]
    fn missing_file_is_a_load_error() {
        let err = load_stopwords("/nonexistent/stopwords.txt").unwrap_err();
        assert!(matches!(err, Error::Load { .. }));
    }

    #[test]
    fn bundled_lists() {
        assert!(default_stopwords("en").unwrap().contains("the"));
        assert!(default_stopwords("fr").unwrap().contains("l'"));
        assert!(default_stopwords("de").is_none());
    }
}
