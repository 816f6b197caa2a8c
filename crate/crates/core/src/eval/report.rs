use std::fmt::Write as _;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::ksr::{evaluate_text, KsrReport, PerplexityReport};
use super::stats::pearson;
use super::typing::ksr;
use crate::combine::{CombinerConfig, Models, Pipeline};
use crate::error::Result;

pub const REPORT_VERSION: u32 = 1;

/// Result of one configuration on one text.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub v: u32,
    pub config: String,
    pub file: String,
    pub ksr: KsrReport,
    pub perplexity: f64,
    pub tokens: usize,
    pub oov: usize,
    pub log10_sum: f64,
}

impl EvalReport {
    fn new(config: &str, file: &str, ksr: KsrReport, ppl: PerplexityReport) -> Self {
        EvalReport {
            v: REPORT_VERSION,
            config: config.to_string(),
            file: file.to_string(),
            ksr,
            perplexity: ppl.perplexity,
            tokens: ppl.tokens,
            oov: ppl.oov,
            log10_sum: ppl.log10_sum,
        }
    }
}

/// Runs one configuration over one text, starting from a fresh session.
pub fn evaluate(pipeline: &Pipeline, file: &str, text: &str, list_size: usize) -> Result<EvalReport> {
    let (k, p) = evaluate_text(pipeline.session(), text, list_size)?;
    Ok(EvalReport::new(&pipeline.config().name, file, k, p))
}

/// Totals of one configuration over all texts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigSummary {
    pub config: String,
    pub method: String,
    pub kp: u64,
    pub ka: u64,
    pub ksr: f64,
    pub perplexity: f64,
    pub tokens: usize,
    pub oov: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub v: u32,
    pub list_size: usize,
    pub summaries: Vec<ConfigSummary>,
    pub runs: Vec<EvalReport>,
    /// Correlation of ksr with perplexity over every (config, file) run.
    pub pearson: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pearson_note: Option<String>,
}

/// Every configuration on every text, in parallel.
pub fn evaluate_all(
    models: &Arc<Models>,
    configs: &[CombinerConfig],
    files: &[(String, String)],
    list_size: usize,
) -> Result<Comparison> {
    let pipelines = configs
        .iter()
        .map(|c| Pipeline::new(Arc::clone(models), c.clone()))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..pipelines.len())
        .flat_map(|c| (0..files.len()).map(move |f| (c, f)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(c, f)| {
            let (name, text) = &files[f];
            log::info!("evaluating {} on {name}", pipelines[c].config().name);
            evaluate(&pipelines[c], name, text, list_size)
        })
        .collect::<Result<Vec<_>>>()?;
    let summaries = configs
        .iter()
        .map(|c| {
            let mine: Vec<&EvalReport> = runs.iter().filter(|r| r.config == c.name).collect();
            let kp = mine.iter().map(|r| r.ksr.kp).sum();
            let ka = mine.iter().map(|r| r.ksr.ka).sum();
            let tokens: usize = mine.iter().map(|r| r.tokens).sum();
            let log10_sum: f64 = mine.iter().map(|r| r.log10_sum).sum();
            ConfigSummary {
                config: c.name.clone(),
                method: c.method.to_string(),
                kp,
                ka,
                ksr: ksr(kp, ka),
                perplexity: 10f64.powf(-log10_sum / tokens as f64),
                tokens,
                oov: mine.iter().map(|r| r.oov).sum(),
            }
        })
        .collect();
    let xs: Vec<f64> = runs.iter().map(|r| r.ksr.ksr).collect();
    let ys: Vec<f64> = runs.iter().map(|r| r.perplexity).collect();
    let (pearson, pearson_note) = match pearson(&xs, &ys) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Comparison {
        v: REPORT_VERSION,
        list_size,
        summaries,
        runs,
        pearson,
        pearson_note,
    })
}

impl Comparison {
    /// Plain-text table: one row per configuration, then per-file runs.
    pub fn table(&self) -> String {
        let mut out = String::new();
        let ksr_head = format!("ksr{}", self.list_size);
        let _ = writeln!(
            out,
            "{:<12} {:<15} {:>8} {:>12} {:>9} {:>9} {:>8}",
            "config", "method", ksr_head, "perplexity", "kp", "ka", "oov"
        );
        for s in &self.summaries {
            let _ = writeln!(
                out,
                "{:<12} {:<15} {:>8.2} {:>12.2} {:>9} {:>9} {:>8}",
                s.config, s.method, s.ksr, s.perplexity, s.kp, s.ka, s.oov
            );
        }
        if self.runs.len() > self.summaries.len() {
            let _ = writeln!(out);
            let _ = writeln!(out, "{:<12} {:<24} {:>8} {:>12}", "config", "file", ksr_head, "perplexity");
            for r in &self.runs {
                let _ = writeln!(
                    out,
                    "{:<12} {:<24} {:>8.2} {:>12.2}",
                    r.config, r.file, r.ksr.ksr, r.perplexity
                );
            }
        }
        let _ = writeln!(out);
        match (&self.pearson, &self.pearson_note) {
            (Some(r), _) => {
                let _ = writeln!(out, "pearson(ksr, perplexity) = {r:.4}");
            }
            (None, Some(note)) => {
                let _ = writeln!(out, "pearson(ksr, perplexity) undefined: {note}");
            }
            _ => {}
        }
        out
    }
}
