//! Leakage assessment statistics: Welch's t-test between two trace
//! classes (TVLA), sum-of-squared pairwise t-differences for
//! point-of-interest detection (SOST), and the fixed-Hamming-weight class
//! vector builder the assessments run on.

use super::TraceMatrix;
use crate::rng::Prng;
use crate::{Error, Result};

/// |t| above this threshold flags distinguishable classes.
pub const TVLA_THRESHOLD: f64 = 4.5;

/// Half-width of the sample window taken around each point of interest.
pub const POI_WINDOW_HALFWIDTH: usize = 8;

/// A sample is a point of interest when its SOST reaches this fraction of
/// the maximum.
pub const SOST_POI_FRACTION: f64 = 0.2;

/// Cap substituted for an infinite t (zero variance, unequal means), big
/// enough to keep every verdict and small enough to stay finite math.
pub const T_SENTINEL: f64 = 1e6;

fn mean_and_var(samples: impl Iterator<Item = f64>) -> (f64, f64, usize) {
    let values: Vec<f64> = samples.collect();
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let var = if n < 2 {
        0.0
    } else {
        values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64
    };
    (mean, var, n)
}

/// Welch's t for one sample position. Degenerate zero-variance columns
/// yield 0 when the means agree and the capped sentinel when they do not.
fn welch_t(a: &TraceMatrix, b: &TraceMatrix, j: usize) -> f64 {
    let (ma, va, na) = mean_and_var(a.column(j));
    let (mb, vb, nb) = mean_and_var(b.column(j));
    let denom = (va / na as f64 + vb / nb as f64).sqrt();
    if denom == 0.0 {
        if ma == mb {
            0.0
        } else {
            T_SENTINEL * (ma - mb).signum()
        }
    } else {
        ((ma - mb) / denom).clamp(-T_SENTINEL, T_SENTINEL)
    }
}

/// Result of a two-class TVLA pass.
#[derive(Debug, Clone, PartialEq)]
pub struct TTestReport {
    /// Welch's t per sample position.
    pub t_trace: Vec<f64>,
    /// Largest |t| anywhere in the trace.
    pub max_t_global: f64,
    /// Largest |t| within the windows around the points of interest
    /// (equals the global value when no points of interest were found).
    pub max_t_windowed: f64,
    /// Points of interest feeding the windows.
    pub poi: Vec<usize>,
    pub window_halfwidth: usize,
    /// Distinguishable classes: windowed max |t| beyond the threshold.
    pub leak: bool,
}

impl TTestReport {
    /// `sample_index,t_value` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_index,t_value\n");
        for (j, t) in self.t_trace.iter().enumerate() {
            out.push_str(&format!("{j},{t:.6}\n"));
        }
        out
    }
}

/// Per-sample SOST values and the thresholded points of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct SostReport {
    pub sost: Vec<f64>,
    pub poi: Vec<usize>,
}

impl SostReport {
    /// `sample_index,sost_value,is_poi` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample_index,sost_value,is_poi\n");
        for (j, s) in self.sost.iter().enumerate() {
            let flag = if self.poi.contains(&j) { 1 } else { 0 };
            out.push_str(&format!("{j},{s:.6},{flag}\n"));
        }
        out
    }
}

fn check_compatible(groups: &[&TraceMatrix]) -> Result<usize> {
    if groups.len() < 2 {
        return Err(Error::InvalidParams("need at least two trace groups"));
    }
    let samples = groups[0].samples();
    for g in groups {
        if g.samples() != samples {
            return Err(Error::VariableLength { expected: samples, got: g.samples() });
        }
        if g.traces() < 2 {
            return Err(Error::InvalidParams("each group needs at least two traces"));
        }
    }
    Ok(samples)
}

/// SOST point-of-interest detection over two or more trace groups: per
/// sample, sum the squared pairwise t statistics, then keep the samples
/// reaching 20% of the maximum. An all-zero SOST trace (identical groups)
/// yields no points of interest.
pub fn sost_poi(groups: &[&TraceMatrix]) -> Result<SostReport> {
    let samples = check_compatible(groups)?;
    let mut sost = vec![0.0; samples];
    for (j, s) in sost.iter_mut().enumerate() {
        for gi in 0..groups.len() {
            for gk in gi + 1..groups.len() {
                let t = welch_t(groups[gi], groups[gk], j);
                *s += t * t;
            }
        }
    }
    let max = sost.iter().cloned().fold(0.0_f64, f64::max);
    let poi = if max == 0.0 {
        Vec::new()
    } else {
        sost.iter()
            .enumerate()
            .filter(|(_, &s)| s >= SOST_POI_FRACTION * max)
            .map(|(j, _)| j)
            .collect()
    };
    Ok(SostReport { sost, poi })
}

/// Two-class TVLA: samplewise Welch's t, SOST point-of-interest windows of
/// half-width 8, and the leak verdict on the windowed maximum (global
/// maximum when no points of interest exist).
pub fn tvla_welch_t(a: &TraceMatrix, b: &TraceMatrix) -> Result<TTestReport> {
    let samples = check_compatible(&[a, b])?;
    let t_trace: Vec<f64> = (0..samples).map(|j| welch_t(a, b, j)).collect();
    let max_t_global = t_trace.iter().map(|t| t.abs()).fold(0.0_f64, f64::max);

    let sost = sost_poi(&[a, b])?;
    let max_t_windowed = if sost.poi.is_empty() {
        max_t_global
    } else {
        let mut max = 0.0_f64;
        for &p in &sost.poi {
            let lo = p.saturating_sub(POI_WINDOW_HALFWIDTH);
            let hi = (p + POI_WINDOW_HALFWIDTH).min(samples - 1);
            for t in &t_trace[lo..=hi] {
                max = max.max(t.abs());
            }
        }
        max
    };

    Ok(TTestReport {
        t_trace,
        max_t_global,
        max_t_windowed,
        poi: sost.poi,
        window_halfwidth: POI_WINDOW_HALFWIDTH,
        leak: max_t_windowed > TVLA_THRESHOLD,
    })
}

/// Welch's t on the per-trace total power (the sum over samples), the
/// distinguishability statistic for whole-operation power consumption.
pub fn total_power_t(a: &TraceMatrix, b: &TraceMatrix) -> f64 {
    let sums = |m: &TraceMatrix| -> (f64, f64, usize) {
        mean_and_var(m.rows().iter().map(|r| r.iter().sum::<f64>()))
    };
    let (ma, va, na) = sums(a);
    let (mb, vb, nb) = sums(b);
    let denom = (va / na as f64 + vb / nb as f64).sqrt();
    if denom == 0.0 {
        if ma == mb {
            0.0
        } else {
            T_SENTINEL * (ma - mb).signum()
        }
    } else {
        ((ma - mb) / denom).clamp(-T_SENTINEL, T_SENTINEL)
    }
}

/// Sample a word with exactly the requested Hamming weight: choose that
/// many distinct bit positions uniformly.
fn word_with_weight(weight: u32, word_bits: u32, rng: &mut Prng) -> u64 {
    let mut positions: Vec<u32> = (0..word_bits).collect();
    let mut value = 0u64;
    for k in 0..weight as usize {
        let pick = k + rng.below_u64((positions.len() - k) as u64) as usize;
        positions.swap(k, pick);
        value |= 1u64 << positions[k];
    }
    value
}

/// Two fixed-Hamming-weight input classes of `count` words each.
pub fn build_class_vectors(
    hw_a: u32,
    hw_b: u32,
    count: usize,
    word_bits: u32,
    rng: &mut Prng,
) -> Result<(Vec<u64>, Vec<u64>)> {
    if word_bits == 0 || word_bits > 64 {
        return Err(Error::InvalidParams("word size must lie in 1..=64 bits"));
    }
    if hw_a > word_bits || hw_b > word_bits {
        return Err(Error::InvalidParams("class Hamming weight exceeds the word size"));
    }
    if count == 0 {
        return Err(Error::InvalidParams("class vectors must be non-empty"));
    }
    let a = (0..count).map(|_| word_with_weight(hw_a, word_bits, rng)).collect();
    let b = (0..count).map(|_| word_with_weight(hw_b, word_bits, rng)).collect();
    Ok((a, b))
}
