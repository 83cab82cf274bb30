//! End-to-end reweigh run over dataset files: load, sample, tilt, mix, and
//! export per-record weights plus a diagnostics report.
//!
//! The run mirrors the intended training workflow. Both datasets are
//! collapsed to distributions; at tilt zero the source passes through
//! byte-identically. Otherwise both sides are sampled (or taken whole), the
//! sampled source is pulled toward the sampled target, and the result is
//! mixed back into the full source as `(1 - alpha) * source + alpha *
//! reweighed`. Record weights are apportioned from point weights by each
//! record's share of its point, so duplicate observations keep their
//! relative importance.
//!
//! Every stage is deterministic in `(datasets, config)`; timings are kept
//! out of the report unless explicitly requested so that report files are
//! reproducible byte for byte.

use std::collections::HashMap;
use std::time::Instant;

use serde::Serialize;

use crate::covering::greedy_cover;
use crate::distribution::{spread, WeightLine, WeightedDistribution};
use crate::greedy::TieBreak;
use crate::hypercube::{Dataset, Point};
use crate::reduce::{greedy_reweigh, greedy_w1, ReweighConfig, ReweighStats};
use crate::sampler::sample_stream;
use crate::util::compensated_sum;
use crate::{Error, Result};

/// Mixture weights are renormalized when their sum drifts past this.
pub const DRIFT_TOL: f64 = 1e-9;

/// One rung of the cover ladder: balls of radius `zeta` needed to cover a
/// support, with the packing-based lower bound on any such cover.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CoverRung {
    pub zeta: u32,
    pub eta: usize,
    pub cover_lower_bound: usize,
}

/// Wall-clock milliseconds of one pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageTiming {
    pub stage: &'static str,
    pub ms: u64,
}

/// Everything a run wants to say about itself. Serializes with fixed field
/// order; identical inputs give identical reports.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub alpha: f64,
    pub scale: u64,
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub tie_break: TieBreak,
    pub dim: usize,
    pub source_records: usize,
    pub source_support: usize,
    pub target_records: usize,
    pub target_support: usize,
    /// Support sizes actually fed to the transport, absent at tilt zero.
    pub sampled_source_support: Option<usize>,
    pub sampled_target_support: Option<usize>,
    pub reweigh: Option<ReweighStats>,
    /// Greedy transport estimate from the untouched source to the target.
    pub w1_source_target: f64,
    /// Same estimate from the reweighed result to the target.
    pub w1_result_target: f64,
    pub source_cover: Vec<CoverRung>,
    pub target_cover: Vec<CoverRung>,
    pub source_spread: f64,
    pub target_spread: f64,
    /// Signed error of the mixture weight sum before any correction.
    pub weight_drift: f64,
    pub drift_rescaled: bool,
    pub timings_ms: Option<Vec<StageTiming>>,
}

/// Result of one pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    /// Reweighed distribution over the source support.
    pub distribution: WeightedDistribution,
    /// Per-record output weights, in source record order.
    pub record_weights: Vec<WeightLine>,
    pub report: RunReport,
}

/// Run the reweigh pipeline. See the module docs for the stages.
pub fn reweigh_pipeline(
    source: &Dataset,
    target: &Dataset,
    config: &ReweighConfig,
) -> Result<PipelineRun> {
    run(source, target, config, false)
}

/// [`reweigh_pipeline`] with stage timings included in the report. The
/// timing values vary run to run; everything else stays deterministic.
pub fn reweigh_pipeline_timed(
    source: &Dataset,
    target: &Dataset,
    config: &ReweighConfig,
) -> Result<PipelineRun> {
    run(source, target, config, true)
}

fn run(
    source: &Dataset,
    target: &Dataset,
    config: &ReweighConfig,
    timed: bool,
) -> Result<PipelineRun> {
    if source.dim != target.dim {
        return Err(Error::DimensionMismatch {
            left: source.dim,
            right: target.dim,
        });
    }
    if !(config.alpha >= 0.0 && config.alpha <= 1.0) {
        return Err(Error::Invalid(format!(
            "tilt must lie in [0, 1], got {}",
            config.alpha
        )));
    }
    if config.sample_size == Some(0) {
        return Err(Error::Invalid("sample size must be at least 1".into()));
    }
    let mut timings = Vec::new();
    let clock = Instant::now();
    let mark = |timings: &mut Vec<StageTiming>, stage: &'static str, since: Instant| {
        timings.push(StageTiming {
            stage,
            ms: since.elapsed().as_millis() as u64,
        });
        Instant::now()
    };

    let p_s = WeightedDistribution::from_dataset(source)?;
    let p_t = WeightedDistribution::from_dataset(target)?;
    let t = mark(&mut timings, "load", clock);

    let (result, scale, sampled, stats) = if config.alpha == 0.0 {
        (
            Mixed::Clean(p_s.clone()),
            config.resolved_scale(&p_s, &p_t),
            None,
            None,
        )
    } else {
        let (p_rs, p_rt) = match config.sample_size {
            Some(m) => (
                sample_stream(&p_s, m, config.seed, 0)?,
                sample_stream(&p_t, m, config.seed, 1)?,
            ),
            None => (p_s.clone(), p_t.clone()),
        };
        let scale = config.resolved_scale(&p_rs, &p_rt);
        let (tilted, stats) = greedy_reweigh(&p_rs, &p_rt, config.alpha, scale)?;
        let mixed = mix(&p_s, &tilted, config.alpha)?;
        (
            mixed,
            scale,
            Some((p_rs.len(), p_rt.len())),
            Some(stats),
        )
    };
    let t = mark(&mut timings, "reweigh", t);

    let (distribution, weight_drift, drift_rescaled) = match result {
        Mixed::Clean(d) => (d, 0.0, false),
        Mixed::Drifted(d, drift, rescaled) => (d, drift, rescaled),
    };

    let w1_source_target = greedy_w1(&p_s, &p_t, scale)?;
    let w1_result_target = if config.alpha == 0.0 {
        w1_source_target
    } else {
        greedy_w1(&distribution, &p_t, scale)?
    };
    let t = mark(&mut timings, "transport_estimates", t);

    let source_cover = cover_ladder(p_s.points(), source.dim)?;
    let target_cover = cover_ladder(p_t.points(), target.dim)?;
    let source_spread = spread(&p_s).value;
    let target_spread = spread(&p_t).value;
    mark(&mut timings, "diagnostics", t);

    let record_weights = if config.alpha == 0.0 {
        passthrough_record_weights(source)
    } else {
        apportion_record_weights(source, &distribution)
    };

    let report = RunReport {
        alpha: config.alpha,
        scale,
        sample_size: config.sample_size,
        seed: config.seed,
        tie_break: config.tie_break,
        dim: source.dim,
        source_records: source.records.len(),
        source_support: p_s.len(),
        target_records: target.records.len(),
        target_support: p_t.len(),
        sampled_source_support: sampled.map(|(s, _)| s),
        sampled_target_support: sampled.map(|(_, t)| t),
        reweigh: stats,
        w1_source_target,
        w1_result_target,
        source_cover,
        target_cover,
        source_spread,
        target_spread,
        weight_drift,
        drift_rescaled,
        timings_ms: timed.then_some(timings),
    };
    Ok(PipelineRun {
        distribution,
        record_weights,
        report,
    })
}

enum Mixed {
    Clean(WeightedDistribution),
    Drifted(WeightedDistribution, f64, bool),
}

/// `(1 - alpha) * base + alpha * tilt` over the base support. The tilt
/// distribution must be supported on points of the base.
fn mix(base: &WeightedDistribution, tilt: &WeightedDistribution, alpha: f64) -> Result<Mixed> {
    let index: HashMap<&Point, usize> = base
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let mut weights: Vec<f64> = base.weights().iter().map(|&w| (1.0 - alpha) * w).collect();
    for (p, &w) in tilt.points().iter().zip(tilt.weights()) {
        let &i = index
            .get(p)
            .ok_or_else(|| Error::Invalid(format!("tilted point {p} is outside the source support")))?;
        weights[i] += alpha * w;
    }
    let total = compensated_sum(weights.iter().copied());
    let drift = total - 1.0;
    let rescaled = drift.abs() > DRIFT_TOL;
    if rescaled {
        for w in &mut weights {
            *w /= total;
        }
    }
    let d = WeightedDistribution::new(
        base.dim(),
        base.points().to_vec(),
        base.ids().to_vec(),
        weights,
    )?;
    Ok(if rescaled || drift != 0.0 {
        Mixed::Drifted(d, drift, rescaled)
    } else {
        Mixed::Clean(d)
    })
}

/// Tilt-zero export: each record's raw weight over the raw total, exactly
/// the normalized input weights.
fn passthrough_record_weights(source: &Dataset) -> Vec<WeightLine> {
    let total = compensated_sum(source.records.iter().map(|r| r.weight.unwrap_or(1.0)));
    source
        .records
        .iter()
        .map(|r| WeightLine {
            id: r.id.clone(),
            w: r.weight.unwrap_or(1.0) / total,
        })
        .collect()
}

/// Split each point's output weight across the records observing it, in
/// proportion to their input weights. A point whose observations all weigh
/// zero splits its output evenly.
fn apportion_record_weights(
    source: &Dataset,
    distribution: &WeightedDistribution,
) -> Vec<WeightLine> {
    let index: HashMap<&Point, usize> = distribution
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| (p, i))
        .collect();
    let mut point_raw = vec![0.0f64; distribution.len()];
    let mut point_count = vec![0usize; distribution.len()];
    for r in &source.records {
        let i = index[&r.point];
        point_raw[i] += r.weight.unwrap_or(1.0);
        point_count[i] += 1;
    }
    source
        .records
        .iter()
        .map(|r| {
            let i = index[&r.point];
            let share = if point_raw[i] > 0.0 {
                r.weight.unwrap_or(1.0) / point_raw[i]
            } else {
                1.0 / point_count[i] as f64
            };
            WeightLine {
                id: r.id.clone(),
                w: distribution.weights()[i] * share,
            }
        })
        .collect()
}

/// Cover sizes at doubling radii, each with its packing lower bound.
fn cover_ladder(points: &[Point], dim: usize) -> Result<Vec<CoverRung>> {
    let mut rungs = Vec::new();
    let mut zeta = 1u32;
    while (zeta as usize) < dim {
        let report = greedy_cover(points, zeta)?;
        rungs.push(CoverRung {
            zeta,
            eta: report.eta,
            cover_lower_bound: report.packing_count,
        });
        zeta *= 2;
    }
    Ok(rungs)
}
