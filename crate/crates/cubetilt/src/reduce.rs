//! Tilted supply/demand construction and the greedy transport estimate.
//!
//! [`greedy_reweigh`] moves a `C`-scaled, `alpha`-tilted image of the target
//! onto the source support and renormalizes what arrived; [`greedy_w1`] runs
//! the same scaled greedy transport between two distributions and reads the
//! cost back off in weight units. Both are deterministic given their inputs.
//!
//! Scaling turns weights into integer multiplicities with round-half-to-even,
//! so every cost here carries a rounding slack of at most `1/(C * w_min)`
//! per side, with `w_min` the smallest positive input weight.

use serde::Serialize;

use crate::distribution::{normalize, scale_to_multiplicities, WeightedDistribution};
use crate::greedy::{capacity_greedy, TieBreak};
use crate::{Error, Result};

/// Hard ceiling on the scale factor, bounding transport unit counts.
pub const MAX_SCALE: u64 = 100_000_000;

/// Units the default scale assigns to the lightest positive weight.
const UNITS_AT_MIN_WEIGHT: f64 = 10_000.0;

/// Knobs of one reweigh run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReweighConfig {
    /// Tilt toward the target, in `[0, 1]`.
    pub alpha: f64,
    /// Scale factor `C`; `None` derives one from the input weights.
    pub scale: Option<u64>,
    /// Per-side sample size; `None` skips sampling and uses the full
    /// distributions.
    pub sample_size: Option<usize>,
    pub seed: u64,
    pub tie_break: TieBreak,
}

impl ReweighConfig {
    /// The scale factor to use against these inputs: the configured one, or
    /// enough units that the lightest weight gets about ten thousand.
    pub fn resolved_scale(
        &self,
        p: &WeightedDistribution,
        q: &WeightedDistribution,
    ) -> u64 {
        self.scale.unwrap_or_else(|| default_scale(p, q))
    }
}

/// `ceil(10^4 / min positive weight)` over both inputs, clamped to
/// [`MAX_SCALE`]. Drives the per-side rounding slack `1/(C * w_min)` down to
/// about `10^-4` while keeping unit counts bounded.
pub fn default_scale(p: &WeightedDistribution, q: &WeightedDistribution) -> u64 {
    let w_min = match (p.min_positive_weight(), q.min_positive_weight()) {
        (Some(a), Some(b)) => a.min(b),
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return 1,
    };
    let raw = (UNITS_AT_MIN_WEIGHT / w_min).ceil();
    if raw >= MAX_SCALE as f64 {
        MAX_SCALE
    } else {
        (raw as u64).max(1)
    }
}

/// Mass accounting of one reweigh run, in scaled units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReweighStats {
    pub scale: u64,
    pub total_supply: u64,
    pub total_demand: u64,
    /// Units shipped: `min(total_supply, total_demand)`.
    pub moved_units: u64,
    /// Fraction of the demand that was fulfilled.
    pub met_fraction: f64,
    /// Supply units discarded because every demand was saturated.
    pub leftover_supply: u64,
}

/// Pull the source toward the target: scale the target to a supply of
/// `C * alpha * weight` units per point, give every source point a demand of
/// `C - C * (1 - alpha) * weight` units, ship greedily, and normalize the
/// met demands into a distribution over the source support.
///
/// `alpha = 0` is rejected here (an empty supply transports nothing);
/// callers wanting the untilted endpoint return the source unchanged.
pub fn greedy_reweigh(
    p_b: &WeightedDistribution,
    p_r: &WeightedDistribution,
    alpha: f64,
    c: u64,
) -> Result<(WeightedDistribution, ReweighStats)> {
    if p_b.dim() != p_r.dim() {
        return Err(Error::DimensionMismatch {
            left: p_b.dim(),
            right: p_r.dim(),
        });
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Invalid(format!(
            "tilt must lie in (0, 1], got {alpha}"
        )));
    }
    if c == 0 {
        return Err(Error::Invalid("scale factor must be at least 1".into()));
    }
    let cf = c as f64;
    let demand: Vec<u64> = p_b
        .weights()
        .iter()
        .map(|&w| {
            // Nonnegative for any weight <= 1; the clamp guards the cast.
            let units = cf - cf * (1.0 - alpha) * w;
            units.round_ties_even().max(0.0) as u64
        })
        .collect();
    if demand.iter().all(|&u| u == 0) {
        return Err(Error::AllZero {
            context: format!("every demand rounded to zero at alpha = {alpha}, C = {c}"),
        });
    }
    let supply: Vec<u64> = p_r
        .weights()
        .iter()
        .map(|&w| (cf * alpha * w).round_ties_even() as u64)
        .collect();
    if supply.iter().all(|&u| u == 0) {
        return Err(Error::AllZero {
            context: format!("every supply rounded to zero at alpha = {alpha}, C = {c}"),
        });
    }

    let plan = capacity_greedy(
        p_r.points(),
        &supply,
        p_b.points(),
        &demand,
        TieBreak::Lex,
    );
    let mut met = vec![0u64; p_b.len()];
    for f in &plan.flows {
        met[f.demand] += f.mass;
    }
    debug_assert!(met.iter().any(|&u| u > 0), "moved at least one unit");
    let weights = normalize(&met.iter().map(|&u| u as f64).collect::<Vec<_>>())?;
    let out = WeightedDistribution::new(
        p_b.dim(),
        p_b.points().to_vec(),
        p_b.ids().to_vec(),
        weights,
    )?;

    let total_supply: u64 = supply.iter().sum();
    let total_demand: u64 = demand.iter().sum();
    let stats = ReweighStats {
        scale: c,
        total_supply,
        total_demand,
        moved_units: plan.moved_mass,
        met_fraction: plan.moved_mass as f64 / total_demand as f64,
        leftover_supply: total_supply - plan.moved_mass.min(total_supply),
    };
    Ok((out, stats))
}

/// Greedy transport cost between two distributions, in weight units: scale
/// both to `C` units, ship greedily, divide the cost by `C`. Upper-bounds
/// the exact cost up to the combined rounding slack of both sides.
pub fn greedy_w1(
    p: &WeightedDistribution,
    q: &WeightedDistribution,
    c: u64,
) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    let sp = scale_to_multiplicities(p, c)?;
    let sq = scale_to_multiplicities(q, c)?;
    let plan = capacity_greedy(
        p.points(),
        &sp.multiplicities,
        q.points(),
        &sq.multiplicities,
        TieBreak::Lex,
    );
    Ok(plan.cost as f64 / c as f64)
}
