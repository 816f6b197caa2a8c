//! Combination of the n-gram model with caches and the semantic space, and
//! ranked next-word prediction.

mod cache;
mod config;
mod interpolate;
mod pipeline;
mod rerank;

pub use cache::{combine_cache, decay_factor, CacheEntry, CacheState};
pub use config::{CombinerConfig, Method, CONFIG_VERSION};
pub use interpolate::{confidence_lambda, geometric_interpolate, linear_interpolate, Weights, GI_FLOOR};
pub use pipeline::{Models, Pipeline, PipelineSession, Prediction, Predictor};
pub use rerank::{best_n, partial_rerank, rerank_unnormalized};

#[cfg(test)]
mod tests {
    use std::collections::HashSet;
    use std::sync::Arc;

    use super::*;
    use crate::corpus::{tokenize, Token};
    use crate::ngram::read_arpa;
    use crate::semantic::SemanticSpace;

    const TOY: [(&str, f64); 8] = [
        ("<unk>", 0.05),
        ("chat", 0.25),
        ("chien", 0.15),
        ("chaise", 0.2),
        ("maison", 0.05),
        ("42", 0.1),
        ("</s>", 0.12),
        ("l'", 0.08),
    ];

    fn toy_arpa() -> String {
        let mut s = String::from("\\data\\\nngram 1=9\n\n\\1-grams:\n-99\t<s>\n");
        for (w, p) in TOY {
            s.push_str(&format!("{}\t{w}\n", p.log10()));
        }
        s + "\n\\end\\\n"
    }

    fn models(space: bool) -> Arc<Models> {
        let lm = read_arpa(toy_arpa().as_bytes()).unwrap();
        let space = space.then(|| {
            SemanticSpace::from_vectors(
                vec![
                    ("chat".into(), vec![1.0, 0.1]),
                    ("chien".into(), vec![0.9, 0.3]),
                    ("maison".into(), vec![0.0, 1.0]),
                ],
                2,
            )
            .unwrap()
        });
        Arc::new(Models::new(lm, space))
    }

    fn words(p: &[Prediction]) -> Vec<&str> {
        p.iter().map(|x| x.word.as_str()).collect()
    }

    #[test]
    fn baseline_follows_file_order() {
        let pipe = Pipeline::new(models(false), CombinerConfig::preset("baseline").unwrap()).unwrap();
        let mut s = pipe.session();
        let got = s.predict("", 10, &HashSet::new());
        assert_eq!(words(&got), ["chat", "chaise", "chien", "l'", "maison"]);
        assert_eq!(words(&s.predict("CH", 10, &HashSet::new())), ["chat", "chaise", "chien"]);
        assert_eq!(s.predict("chi", 5, &HashSet::new()).len(), 1);
        assert!(s.predict("xyz", 5, &HashSet::new()).is_empty());
        let excluded: HashSet<String> = ["chat".to_string()].into();
        assert_eq!(words(&s.predict("ch", 2, &excluded)), ["chaise", "chien"]);
        assert!((s.probability("chat") - 0.25).abs() < 1e-12);
        assert!((s.probability("inconnu") - 0.05).abs() < 1e-12);
    }

    #[test]
    fn space_methods_need_a_space() {
        assert!(Pipeline::new(models(false), CombinerConfig::preset("cwgi").unwrap()).is_err());
        assert!(Pipeline::new(models(true), CombinerConfig::preset("cwgi").unwrap()).is_ok());
    }

    #[test]
    fn every_preset_gives_a_distribution() {
        let m = models(true);
        for (name, config) in CombinerConfig::presets() {
            let mut s = Pipeline::new(Arc::clone(&m), config).unwrap().session();
            for t in tokenize("Chat chien. Maison chat", &Default::default()) {
                s.observe(&t);
                let total: f64 = s.distribution().iter().sum();
                assert!((total - 1.0).abs() < 1e-9, "{name}: {total}");
                assert!(s.distribution().iter().all(|&p| p >= 0.0));
            }
        }
    }

    #[test]
    fn cache_boosts_recent_words() {
        let m = models(false);
        let mut base = Pipeline::new(Arc::clone(&m), CombinerConfig::preset("baseline").unwrap())
            .unwrap()
            .session();
        let mut config = CombinerConfig::preset("cache").unwrap();
        config.mu = 1.0;
        let mut cached = Pipeline::new(m, config).unwrap().session();
        let w = Token::word("maison");
        base.observe(&w);
        cached.observe(&w);
        assert!(cached.probability("maison") > base.probability("maison"));
    }

    #[test]
    fn context_window_limits_the_sum() {
        let mut config = CombinerConfig::preset("li").unwrap();
        config.context_window = Some(1);
        let mut s = Pipeline::new(models(true), config).unwrap().session();
        s.observe(&Token::word("chat"));
        s.observe(&Token::word("maison"));
        assert_eq!(s.context().word_count, 1);
        let v = s.context().v.clone();
        let space = models(true);
        for (a, b) in v.iter().zip(space.space().unwrap().vector("maison").unwrap()) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}
