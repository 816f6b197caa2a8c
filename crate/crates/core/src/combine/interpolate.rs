use crate::error::{Error, Result};

/// Floor applied to LSA probabilities in geometric interpolation.
pub const GI_FLOOR: f64 = 1e-12;

/// Weight of the n-gram distribution, either shared or per word.
#[derive(Debug, Clone, Copy)]
pub enum Weights<'a> {
    Constant(f64),
    PerWord(&'a [f64]),
}

impl Weights<'_> {
    fn check(&self, len: usize) -> Result<()> {
        let ok = |l: f64| (0.0..=1.0).contains(&l);
        match self {
            Weights::Constant(l) if !ok(*l) => {
                Err(Error::invalid(format!("interpolation weight {l} outside [0, 1]")))
            }
            Weights::PerWord(ls) if ls.len() != len => {
                Err(Error::invalid("one interpolation weight per word is required"))
            }
            Weights::PerWord(ls) => match ls.iter().find(|&&l| !ok(l)) {
                Some(l) => Err(Error::invalid(format!("interpolation weight {l} outside [0, 1]"))),
                None => Ok(()),
            },
            _ => Ok(()),
        }
    }

    fn at(&self, i: usize) -> f64 {
        match self {
            Weights::Constant(l) => *l,
            Weights::PerWord(ls) => ls[i],
        }
    }
}

fn check_lengths(base: &[f64], lsa: &[f64]) -> Result<()> {
    if base.len() != lsa.len() {
        return Err(Error::invalid("distributions cover different vocabularies"));
    }
    Ok(())
}

fn normalize(mut v: Vec<f64>) -> Vec<f64> {
    let total: f64 = v.iter().sum();
    if total > 0.0 && total.is_finite() {
        v.iter_mut().for_each(|p| *p /= total);
    }
    v
}

/// `λ_w P_b(w) + (1 - λ_w) P_s(w)`; renormalized only for per-word weights.
pub fn linear_interpolate(base: &[f64], lsa: &[f64], weights: Weights<'_>) -> Result<Vec<f64>> {
    check_lengths(base, lsa)?;
    weights.check(base.len())?;
    let out: Vec<f64> = base
        .iter()
        .zip(lsa)
        .enumerate()
        .map(|(i, (b, s))| {
            let l = weights.at(i);
            l * b + (1.0 - l) * s
        })
        .collect();
    Ok(match weights {
        Weights::Constant(_) => out,
        Weights::PerWord(_) => normalize(out),
    })
}

/// `P_b(w)^λ_w · max(P_s(w), floor)^(1 - λ_w)`, renormalized.
pub fn geometric_interpolate(base: &[f64], lsa: &[f64], weights: Weights<'_>) -> Result<Vec<f64>> {
    check_lengths(base, lsa)?;
    weights.check(base.len())?;
    let out: Vec<f64> = base
        .iter()
        .zip(lsa)
        .enumerate()
        .map(|(i, (&b, &s))| {
            let l = weights.at(i);
            if l == 1.0 {
                b
            } else {
                b.powf(l) * s.max(GI_FLOOR).powf(1.0 - l)
            }
        })
        .collect();
    Ok(normalize(out))
}

/// LSA-side weight `β·D(w)` for words with positive density, else 0.
pub fn confidence_lambda(density: Option<f64>, beta: f64) -> f64 {
    match density {
        Some(d) if d > 0.0 => beta * d,
        _ => 0.0,
    }
}
