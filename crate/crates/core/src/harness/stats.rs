use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// Asymptotic Kolmogorov tail `Q(λ) = 2 Σ (-1)^{k-1} exp(-2 k² λ²)`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value
/// (effective size correction `sqrt(ne) + 0.12 + 0.11/sqrt(ne)`).
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> Result<KsResult> {
    const MIN: usize = 10;
    if a.len() < MIN || b.len() < MIN {
        return Err(Error::TooFewSamples { needed: MIN, got: a.len().min(b.len()) });
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_by(f64::total_cmp);
    y.sort_by(f64::total_cmp);
    let (n, m) = (x.len(), y.len());
    let (mut i, mut j) = (0, 0);
    let mut d: f64 = 0.0;
    while i < n && j < m {
        let v = x[i].min(y[j]);
        while i < n && x[i] <= v {
            i += 1;
        }
        while j < m && y[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / n as f64 - j as f64 / m as f64).abs());
    }
    let ne = (n * m) as f64 / (n + m) as f64;
    let en = ne.sqrt();
    let p = kolmogorov_q((en + 0.12 + 0.11 / en) * d);
    Ok(KsResult { statistic: d, p_value: p, n_a: n, n_b: m })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
}

/// Pearson goodness of fit against the uniform law on the categories.
pub fn chi_square_uniform(counts: &[u64]) -> Result<ChiSquareResult> {
    if counts.len() < 2 {
        return Err(Error::TooFewSamples { needed: 2, got: counts.len() });
    }
    let total: u64 = counts.iter().sum();
    let expected = total as f64 / counts.len() as f64;
    let statistic: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    let df = counts.len() - 1;
    let p_value = ChiSquared::new(df as f64).expect("df > 0").sf(statistic);
    Ok(ChiSquareResult { statistic, df, p_value })
}
