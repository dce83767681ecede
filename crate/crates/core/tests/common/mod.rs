#![allow(dead_code)]

use std::collections::BTreeMap;

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Asymptotic Kolmogorov critical value at the 0.1% level, times `1/√n`.
pub const KS_CRIT_0_001: f64 = 1.949;

pub fn phi(z: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(z)
}

/// Mass of `N(mean, var)` on `[a, b)`.
pub fn normal_mass(mean: f64, var: f64, a: f64, b: f64) -> f64 {
    let s = var.sqrt();
    let (za, zb) = ((a - mean) / s, (b - mean) / s);
    if za > 0.0 {
        phi(-za) - phi(-zb)
    } else {
        phi(zb) - phi(za)
    }
}

pub fn ks_statistic<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

pub struct ChiSquare {
    pub stat: f64,
    pub df: usize,
    pub critical: f64,
}

impl ChiSquare {
    pub fn passed(&self) -> bool {
        self.stat < self.critical
    }
}

/// Pearson test of integer-keyed counts against probabilities, merging
/// neighbouring bins until each expects at least 5 draws. Probability not in
/// `probs` goes to an overflow bin joined to the last one.
pub fn chi_square(
    counts: &BTreeMap<i64, u64>,
    probs: &BTreeMap<i64, f64>,
    level: f64,
) -> ChiSquare {
    let n: u64 = counts.values().sum();
    let nf = n as f64;
    let mut keys: Vec<i64> = counts.keys().chain(probs.keys()).copied().collect();
    keys.sort_unstable();
    keys.dedup();
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut obs, mut exp) = (0.0, 0.0);
    for k in &keys {
        obs += *counts.get(k).unwrap_or(&0) as f64;
        exp += probs.get(k).copied().unwrap_or(0.0) * nf;
        if exp >= 5.0 {
            bins.push((obs, exp));
            obs = 0.0;
            exp = 0.0;
        }
    }
    let listed: f64 = probs.values().sum();
    exp += (1.0 - listed).max(0.0) * nf;
    if let Some(last) = bins.last_mut() {
        last.0 += obs;
        last.1 += exp;
    }
    let stat = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let df = bins.len().saturating_sub(1).max(1);
    let critical = ChiSquared::new(df as f64).unwrap().inverse_cdf(1.0 - level);
    ChiSquare { stat, df, critical }
}
