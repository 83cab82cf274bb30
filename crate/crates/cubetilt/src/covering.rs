//! Greedy covers and packings, used as cluster-structure diagnostics.
//!
//! Both routines restrict centers to the input points and are fully
//! deterministic. The cover is farthest-first traversal, so its size can
//! exceed the optimum (it carries the usual 2-approximation character of
//! k-center); the packing is a maximal separated subset built by a single
//! scan. The report pairs the cover with a packing at radius `2*zeta + 1`:
//! no ball of radius `zeta` can cover two points that far apart, so the
//! packing size is a certified lower bound on any cover of the same radius.

use serde::Serialize;

use crate::hypercube::{hamming_distance, Point};
use crate::{Error, Result};

/// A covering certificate for one point set at one radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringReport {
    /// Number of balls the greedy cover used.
    pub eta: usize,
    /// Ball radius the cover was asked for.
    pub zeta: u32,
    /// Centers, as indices into the input point list.
    pub centers: Vec<usize>,
    /// Size of a maximal packing at [`CoveringReport::packing_radius`]; a
    /// lower bound on the optimal cover size at `zeta`.
    pub packing_count: usize,
    /// `2 * zeta + 1`.
    pub packing_radius: u32,
}

/// Cover `points` with balls of radius `zeta` centered on points, greedily:
/// start at the lexicographically smallest point, then repeatedly take the
/// point farthest from the chosen centers (lowest index on ties) until
/// everything is covered.
pub fn greedy_cover(points: &[Point], zeta: u32) -> Result<CoveringReport> {
    if points.is_empty() {
        return Err(Error::Invalid("cover of an empty point set".into()));
    }
    let dim = points[0].dim();
    for p in points {
        if p.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: p.dim(),
            });
        }
    }
    let first = points
        .iter()
        .enumerate()
        .min_by(|(ia, a), (ib, b)| a.cmp(b).then(ia.cmp(ib)))
        .map(|(i, _)| i)
        .expect("nonempty");
    let mut centers = vec![first];
    let mut nearest: Vec<u32> = points
        .iter()
        .map(|p| hamming_distance(p, &points[first]))
        .collect();
    loop {
        let (far_idx, far_dist) = nearest
            .iter()
            .enumerate()
            .map(|(i, &d)| (i, d))
            .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
            .expect("nonempty");
        if far_dist <= zeta {
            break;
        }
        centers.push(far_idx);
        for (i, p) in points.iter().enumerate() {
            nearest[i] = nearest[i].min(hamming_distance(p, &points[far_idx]));
        }
    }
    debug_assert!(nearest.iter().all(|&d| d <= zeta));
    let packing_radius = 2 * zeta + 1;
    let packing_count = greedy_packing(points, packing_radius)?.len();
    Ok(CoveringReport {
        eta: centers.len(),
        zeta,
        centers,
        packing_count,
        packing_radius,
    })
}

/// Maximal `r`-separated subset built by one scan in input order: a point is
/// kept iff it sits at distance `>= r` from every point already kept.
/// Returns the kept indices. The result is maximal, hence also an `r`-cover
/// of the input, but it may be smaller than the largest such subset.
pub fn greedy_packing(points: &[Point], r: u32) -> Result<Vec<usize>> {
    if points.is_empty() {
        return Err(Error::Invalid("packing of an empty point set".into()));
    }
    if r == 0 {
        return Err(Error::Invalid("packing radius must be at least 1".into()));
    }
    let mut kept: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if kept
            .iter()
            .all(|&k| hamming_distance(p, &points[k]) >= r)
        {
            kept.push(i);
        }
    }
    Ok(kept)
}
