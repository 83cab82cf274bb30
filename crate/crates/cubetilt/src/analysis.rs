//! Why greedy transport stays close to optimal: alternating-cycle
//! decomposition of a greedy matching against an exact one, the per-cycle
//! separation inequality, and the resulting ratio bounds.
//!
//! The chain of ideas, in the order the functions realize them: overlay a
//! greedy and an exact perfect matching and the disagreement splits into
//! alternating cycles ([`alternating_cycles`]); within one cycle the greedy
//! overshoot forces many well-separated vertices ([`check_structural_lemma`]);
//! the longest cycle caps the global greedy/optimal ratio ([`ratio_ceiling`]);
//! and a cover of the input turns the same mechanism into an a-priori factor
//! depending only on the cluster geometry ([`approx_bound`], [`infer_xi`]).

use serde::Serialize;

use crate::covering::greedy_packing;
use crate::greedy::Matching;
use crate::hypercube::{hamming_distance, Point};
use crate::{Error, Result};

/// Exponent `log2(3/2)` governing every greedy/optimal ratio bound here.
pub const RATIO_EXPONENT: f64 = 0.584_962_500_721_156_2;

/// Side of the overlay a cycle edge came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeKind {
    Greedy,
    Optimal,
}

/// One edge of an alternating cycle, in unit indices of the input sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CycleEdge {
    pub supply: usize,
    pub demand: usize,
    pub distance: u32,
    pub kind: EdgeKind,
}

/// An alternating cycle: edges in walk order, starting and ending at the
/// same supply unit, strictly alternating greedy and optimal edges.
#[derive(Debug, Clone, PartialEq)]
pub struct Cycle {
    pub edges: Vec<CycleEdge>,
    /// Sum of distances over the greedy edges.
    pub greedy_weight: u64,
    /// Sum of distances over the optimal edges.
    pub optimal_weight: u64,
    /// Distinct points visited, in first-visit order.
    pub vertices: Vec<Point>,
}

impl Cycle {
    /// Number of edges. Always even and at least 4.
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Greedy-to-optimal weight ratio, undefined when the optimal edges of
    /// the cycle are all zero-length.
    pub fn alpha(&self) -> Option<f64> {
        if self.optimal_weight == 0 {
            None
        } else {
            Some(self.greedy_weight as f64 / self.optimal_weight as f64)
        }
    }
}

/// All alternating cycles of one greedy/optimal overlay.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleDecomposition {
    pub cycles: Vec<Cycle>,
}

/// Decompose the symmetric difference of two perfect matchings over the same
/// unit sets into alternating cycles. Edges present in both matchings are
/// dropped; each remaining unit lies on exactly one cycle. Distances are
/// recomputed from the points, so stale pair distances cannot leak in.
pub fn alternating_cycles(
    supply: &[Point],
    demand: &[Point],
    greedy: &Matching,
    optimal: &Matching,
) -> Result<CycleDecomposition> {
    let n = supply.len();
    if demand.len() != n {
        return Err(Error::Invalid(format!(
            "cycle decomposition needs equal sides, got {} and {}",
            n,
            demand.len()
        )));
    }
    let g_of = perfect_image(greedy, n, "first")?;
    let o_of = perfect_image(optimal, n, "second")?;
    let mut o_inv = vec![usize::MAX; n];
    for (s, &d) in o_of.iter().enumerate() {
        o_inv[d] = s;
    }

    let mut visited = vec![false; n];
    let mut cycles = Vec::new();
    for start in 0..n {
        if visited[start] || g_of[start] == o_of[start] {
            continue;
        }
        let mut edges = Vec::new();
        let mut vertices = Vec::new();
        let mut seen = std::collections::HashSet::new();
        let mut greedy_weight = 0u64;
        let mut optimal_weight = 0u64;
        let mut s = start;
        loop {
            visited[s] = true;
            if seen.insert(supply[s].clone()) {
                vertices.push(supply[s].clone());
            }
            let d = g_of[s];
            let dist = hamming_distance(&supply[s], &demand[d]);
            greedy_weight += dist as u64;
            edges.push(CycleEdge {
                supply: s,
                demand: d,
                distance: dist,
                kind: EdgeKind::Greedy,
            });
            if seen.insert(demand[d].clone()) {
                vertices.push(demand[d].clone());
            }
            let s_next = o_inv[d];
            let dist = hamming_distance(&supply[s_next], &demand[d]);
            optimal_weight += dist as u64;
            edges.push(CycleEdge {
                supply: s_next,
                demand: d,
                distance: dist,
                kind: EdgeKind::Optimal,
            });
            s = s_next;
            if s == start {
                break;
            }
        }
        debug_assert!(edges.len() >= 4 && edges.len() % 2 == 0);
        cycles.push(Cycle {
            edges,
            greedy_weight,
            optimal_weight,
            vertices,
        });
    }
    Ok(CycleDecomposition { cycles })
}

/// Validate that `m` is a perfect matching on `n` units per side and return
/// the supply-to-demand image.
fn perfect_image(m: &Matching, n: usize, which: &str) -> Result<Vec<usize>> {
    if m.len() != n {
        return Err(Error::Invalid(format!(
            "{which} matching has {} pairs, expected a perfect {n}",
            m.len()
        )));
    }
    let mut image = vec![usize::MAX; n];
    let mut demand_used = vec![false; n];
    for p in &m.pairs {
        if p.supply >= n || p.demand >= n {
            return Err(Error::Invalid(format!(
                "{which} matching references unit ({}, {}) outside 0..{n}",
                p.supply, p.demand
            )));
        }
        if image[p.supply] != usize::MAX || demand_used[p.demand] {
            return Err(Error::Invalid(format!(
                "{which} matching repeats a unit at pair ({}, {})",
                p.supply, p.demand
            )));
        }
        image[p.supply] = p.demand;
        demand_used[p.demand] = true;
    }
    Ok(image)
}

/// Outcome of the separation inequality on one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaCheck {
    /// Cycle weight ratio, the left-hand side.
    pub alpha: f64,
    /// Separation radius used: `ceil(alpha / 2)`, at least 1.
    pub radius: u32,
    /// Size of the separated subset found among the cycle's vertices.
    pub packing: usize,
    pub rhs: f64,
    pub holds: bool,
}

/// Check, on one cycle, that a large greedy overshoot is paid for by many
/// mutually separated vertices:
///
/// ```text
/// alpha <= (packing(radius = ceil(alpha/2)) * (2d - alpha) / alpha) ^ log2(3/2)
/// ```
///
/// The packing is the deterministic greedy one, a lower bound on the true
/// separation number, so a pass here is conservative. Returns `None` when
/// the cycle's optimal weight is zero and the ratio is undefined. Ratios at
/// or below 1 hold vacuously since the right-hand side is at least 1.
pub fn check_structural_lemma(cycle: &Cycle, d: usize) -> Option<LemmaCheck> {
    let alpha = cycle.alpha()?;
    let radius = (alpha / 2.0).ceil().max(1.0) as u32;
    let packing = greedy_packing(&cycle.vertices, radius)
        .expect("cycle vertices are nonempty and radius >= 1")
        .len();
    let factor = (2.0 * d as f64 - alpha) / alpha;
    let rhs = (packing as f64 * factor).powf(RATIO_EXPONENT);
    // factor < 0 (alpha beyond the 2d diameter budget) makes rhs NaN and the
    // check fails loudly rather than vacuously.
    let holds = alpha <= rhs + 1e-12;
    Some(LemmaCheck {
        alpha,
        radius,
        packing,
        rhs,
        holds,
    })
}

/// Worst-case greedy/optimal ratio implied by cycle lengths alone: the
/// longest cycle's edge count raised to `log2(3/2)`. An empty decomposition
/// means greedy was optimal and the ceiling is 1.
pub fn ratio_ceiling(decomposition: &CycleDecomposition) -> f64 {
    decomposition
        .cycles
        .iter()
        .map(|c| c.len())
        .max()
        .map_or(1.0, |len| (len as f64).powf(RATIO_EXPONENT))
}

/// A-priori approximation factor for inputs covered by balls of radius
/// `zeta`, with cluster-count growth exponent `xi` and leading constant `k`:
///
/// ```text
/// max(2 * zeta, k * d ^ ((1 + xi * L) / (xi * (1 + L))))      L = log2(3/2)
/// ```
///
/// Requires `xi > 1`; `xi = infinity` (a single cluster) is accepted and
/// gives the limiting exponent `L / (1 + L)`.
pub fn approx_bound(zeta: u32, d: usize, xi: f64, k: f64) -> Result<f64> {
    if xi.is_nan() || xi <= 1.0 {
        return Err(Error::Invalid(format!(
            "approximation bound needs xi > 1, got {xi}"
        )));
    }
    // (1 + xi L) / (xi (1 + L)) rewritten to stay finite as xi -> infinity.
    let exponent = (1.0 / xi + RATIO_EXPONENT) / (1.0 + RATIO_EXPONENT);
    Ok((2.0 * zeta as f64).max(k * (d as f64).powf(exponent)))
}

/// Largest growth exponent consistent with a measured cover: the biggest
/// `xi` with `eta <= d^(1 / (xi * log2(3/2)))`, floored just above 1 so the
/// result is always a valid [`approx_bound`] input. A cover by one ball puts
/// no constraint on `xi` and yields infinity.
pub fn infer_xi(eta: usize, d: usize) -> f64 {
    let floor = 1.0 + 1e-6;
    if eta <= 1 {
        return f64::INFINITY;
    }
    let xi = (d as f64).ln() / (RATIO_EXPONENT * (eta as f64).ln());
    xi.max(floor)
}
