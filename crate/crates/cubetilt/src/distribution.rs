//! Weighted distributions over hypercube points.
//!
//! A [`WeightedDistribution`] couples distinct points with nonnegative
//! weights summing to one. Datasets (which may repeat a point across
//! records) collapse onto distributions by summing the repeated mass.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::hypercube::{hamming_distance, Dataset, Point};
use crate::util::compensated_sum;
use crate::{Error, Result};

/// Tolerance on the weight sum. Weights that claim to be a distribution must
/// sum to one within this; renormalization brings drifted vectors back.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

/// Distinct points with probability weights.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedDistribution {
    dim: usize,
    points: Vec<Point>,
    ids: Vec<String>,
    weights: Vec<f64>,
}

impl WeightedDistribution {
    /// Validating constructor. Points must be distinct, ids unique, weights
    /// nonnegative and summing to one within [`WEIGHT_SUM_TOL`].
    pub fn new(
        dim: usize,
        points: Vec<Point>,
        ids: Vec<String>,
        weights: Vec<f64>,
    ) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::Invalid("distribution has no points".into()));
        }
        if points.len() != ids.len() || points.len() != weights.len() {
            return Err(Error::Invalid(format!(
                "mismatched lengths: {} points, {} ids, {} weights",
                points.len(),
                ids.len(),
                weights.len()
            )));
        }
        for p in &points {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: p.dim(),
                });
            }
        }
        let mut seen_points = std::collections::HashSet::with_capacity(points.len());
        for p in &points {
            if !seen_points.insert(p.clone()) {
                return Err(Error::Invalid(format!("duplicate point {p}")));
            }
        }
        let mut seen_ids = std::collections::HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen_ids.insert(id.as_str()) {
                return Err(Error::Invalid(format!("duplicate id {id:?}")));
            }
        }
        for (&w, id) in weights.iter().zip(&ids) {
            if !w.is_finite() || w < 0.0 {
                return Err(Error::Invalid(format!("id {id:?} has invalid weight {w}")));
            }
        }
        let total = compensated_sum(weights.iter().copied());
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::Invalid(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL}"
            )));
        }
        Ok(WeightedDistribution {
            dim,
            points,
            ids,
            weights,
        })
    }

    /// Uniform distribution over the given distinct points.
    pub fn uniform(dim: usize, points: Vec<Point>, ids: Vec<String>) -> Result<Self> {
        let n = points.len();
        if n == 0 {
            return Err(Error::Invalid("distribution has no points".into()));
        }
        let w = normalize(&vec![1.0; n])?;
        WeightedDistribution::new(dim, points, ids, w)
    }

    /// Collapse a dataset onto a distribution: duplicate points are merged
    /// (weights summed, first record's id kept) and the result normalized.
    /// Records without a weight column count as one observation each.
    pub fn from_dataset(ds: &Dataset) -> Result<Self> {
        let mut index: HashMap<&Point, usize> = HashMap::with_capacity(ds.records.len());
        let mut points = Vec::new();
        let mut ids = Vec::new();
        let mut raw = Vec::new();
        for r in &ds.records {
            let w = r.weight.unwrap_or(1.0);
            match index.get(&r.point) {
                Some(&i) => raw[i] += w,
                None => {
                    index.insert(&r.point, points.len());
                    points.push(r.point.clone());
                    ids.push(r.id.clone());
                    raw.push(w);
                }
            }
        }
        let weights = normalize(&raw)?;
        WeightedDistribution::new(ds.dim, points, ids, weights)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Smallest strictly positive weight. `None` only for the degenerate
    /// all-zero case, which the constructor rejects.
    pub fn min_positive_weight(&self) -> Option<f64> {
        self.weights
            .iter()
            .copied()
            .filter(|&w| w > 0.0)
            .min_by(f64::total_cmp)
    }
}

/// Rescale nonnegative weights to sum to one, preserving order.
pub fn normalize(weights: &[f64]) -> Result<Vec<f64>> {
    if weights.is_empty() {
        return Err(Error::Invalid("cannot normalize an empty vector".into()));
    }
    for &w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(Error::Invalid(format!("invalid weight {w}")));
        }
    }
    let total = compensated_sum(weights.iter().copied());
    if total <= 0.0 {
        return Err(Error::AllZero {
            context: "normalization".into(),
        });
    }
    Ok(weights.iter().map(|w| w / total).collect())
}

/// Integer multiplicities approximating `C * weights`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScaledWeights {
    /// `round_half_even(C * w_i)` per point.
    pub multiplicities: Vec<u64>,
    /// Sum of the multiplicities. Close to `C`, but per-coordinate rounding
    /// can drift it by a few units on adversarial weight vectors.
    pub total: u64,
    /// Quantization error bound `1 / (C * min positive weight)`.
    pub error_bound: f64,
}

/// Quantize a distribution to integer unit counts at scale `C`.
pub fn scale_to_multiplicities(p: &WeightedDistribution, scale: u64) -> Result<ScaledWeights> {
    if scale == 0 {
        return Err(Error::Invalid("scale must be at least 1".into()));
    }
    let multiplicities: Vec<u64> = p
        .weights()
        .iter()
        .map(|w| (scale as f64 * w).round_ties_even() as u64)
        .collect();
    let total = multiplicities.iter().sum();
    if total == 0 {
        return Err(Error::AllZero {
            context: format!("scaling to multiplicities at C={scale}"),
        });
    }
    let min_pos = p
        .min_positive_weight()
        .expect("validated distribution has positive mass");
    Ok(ScaledWeights {
        multiplicities,
        total,
        error_bound: 1.0 / (scale as f64 * min_pos),
    })
}

/// Where the spread statistic is attained, and its value.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpreadReport {
    /// `min over support x0 of sqrt(1 + ln E[exp(d(x0, X)^2)])`.
    pub value: f64,
    /// Index (within the distribution) of the minimizing center; lowest
    /// index wins ties.
    pub center_index: usize,
    /// Canonical bit string of the minimizing center.
    pub center: String,
}

/// Concentration statistic of a distribution.
///
/// The exponent `d(x0, x)^2` reaches ~4000 for far pairs in `Q_64`, far past
/// what `exp` can represent, so the expectation is evaluated in log space
/// with max subtraction. The minimization runs over the support only.
pub fn spread(p: &WeightedDistribution) -> SpreadReport {
    let support: Vec<usize> = (0..p.len()).filter(|&i| p.weights()[i] > 0.0).collect();
    debug_assert!(!support.is_empty());
    let mut best: Option<(f64, usize)> = None;
    for &c in &support {
        let log_terms: Vec<f64> = support
            .iter()
            .map(|&i| {
                let dist = hamming_distance(&p.points()[c], &p.points()[i]) as f64;
                p.weights()[i].ln() + dist * dist
            })
            .collect();
        let value = (1.0 + log_sum_exp(&log_terms)).sqrt();
        if best.is_none_or(|(b, _)| value < b) {
            best = Some((value, c));
        }
    }
    let (value, center_index) = best.expect("nonempty support");
    SpreadReport {
        value,
        center_index,
        center: p.points()[center_index].to_bit_string(),
    }
}

fn log_sum_exp(log_terms: &[f64]) -> f64 {
    let m = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    m + log_terms.iter().map(|t| (t - m).exp()).sum::<f64>().ln()
}

/// One line of a weights JSONL file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightLine {
    pub id: String,
    pub w: f64,
}

/// Serialize weight lines, one JSON object per line, preserving order.
pub fn write_weights_jsonl(lines: &[WeightLine], mut out: impl Write) -> Result<()> {
    for line in lines {
        serde_json::to_writer(&mut out, line)?;
        out.write_all(b"\n").map_err(|source| Error::Io {
            path: "<weights jsonl>".into(),
            source,
        })?;
    }
    Ok(())
}

/// Parse a weights JSONL file.
pub fn read_weights_jsonl(text: &str) -> Result<Vec<WeightLine>> {
    text.lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).map_err(Error::from))
        .collect()
}
