//! Windowed averages of sampled source values.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::collection::Algorithm;

use super::sweep::SampleRow;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub algorithm: Algorithm,
    pub variability: f64,
    pub mean_value: f64,
    pub mean_abs_rel_error: f64,
    pub window_start: f64,
    pub window_end: f64,
    /// Standard error across seeds of the per-seed mean value.
    #[serde(skip)]
    pub std_error: f64,
    #[serde(skip)]
    pub seeds: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SummaryError {
    #[error("window [{0}, {1}] is empty or inverted")]
    DegenerateWindow(f64, f64),
    #[error("no samples fall inside window [{0}, {1}]")]
    NoSamples(f64, f64),
}

/// Per (algorithm, variability): mean value and mean absolute relative error
/// over samples with `start <= time <= end`, pooled across seeds.
///
/// Samples are summed in (seed, time) order, so the result does not depend on
/// the order of `rows`.
pub fn summarize(rows: &[SampleRow], window: (f64, f64)) -> Result<Vec<SummaryRow>, SummaryError> {
    let (start, end) = window;
    if !(start < end) {
        return Err(SummaryError::DegenerateWindow(start, end));
    }
    let mut cells: BTreeMap<(Algorithm, u64), Vec<&SampleRow>> = BTreeMap::new();
    for r in rows {
        let t = r.time as f64;
        if t >= start && t <= end {
            cells
                .entry((r.algorithm, r.variability.to_bits()))
                .or_default()
                .push(r);
        }
    }
    if cells.is_empty() {
        return Err(SummaryError::NoSamples(start, end));
    }
    let mut out: Vec<SummaryRow> = cells
        .into_iter()
        .map(|((algorithm, vbits), mut samples)| {
            samples.sort_by(|a, b| {
                (a.seed, a.time)
                    .cmp(&(b.seed, b.time))
                    .then(a.value.total_cmp(&b.value))
            });
            let n = samples.len() as f64;
            let mut sum = 0.0;
            let mut err = 0.0;
            let mut per_seed: Vec<f64> = Vec::new();
            for group in samples.chunk_by(|a, b| a.seed == b.seed) {
                let seed_sum: f64 = group.iter().map(|r| r.value).sum();
                per_seed.push(seed_sum / group.len() as f64);
                sum += seed_sum;
                err += group
                    .iter()
                    .map(|r| {
                        let truth = r.true_count as f64;
                        (r.value - truth).abs() / truth
                    })
                    .sum::<f64>();
            }
            SummaryRow {
                algorithm,
                variability: f64::from_bits(vbits),
                mean_value: sum / n,
                mean_abs_rel_error: err / n,
                window_start: start,
                window_end: end,
                std_error: standard_error(&per_seed),
                seeds: per_seed.len(),
            }
        })
        .collect();
    out.sort_by(|a, b| {
        a.variability
            .total_cmp(&b.variability)
            .then(a.algorithm.cmp(&b.algorithm))
    });
    Ok(out)
}

fn standard_error(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return 0.0;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (var / n as f64).sqrt()
}
