//! Shortest-edge-first bipartite matching under the Hamming metric.
//!
//! Two granularities share one sweep: [`greedy_match`] works on explicit
//! unit multisets (every element is one unit), while [`capacity_greedy`]
//! works on distinct points carrying integer multiplicities and ships whole
//! blocks of units at once. The capacitated form produces exactly the plan
//! the unit form would produce on the duplicated multiset, without ever
//! materializing the duplicates.

use crate::hypercube::{hamming_distance, Point};

/// Tie-breaking rule among equal-distance candidate edges.
///
/// Only the lexicographic rule exists today: `(distance, supply index,
/// demand index)`, indices being positions in the caller's arrays (file
/// order for datasets). Reports record which rule produced a plan.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TieBreak {
    #[default]
    Lex,
}

/// Which greedy rule to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GreedyVariant {
    /// Repeatedly take the globally shortest remaining edge. This is the
    /// variant the approximation analysis speaks about; it is the default
    /// everywhere.
    GlobalShortestEdge,
    /// Walk supplies in index order, each claiming its nearest free demand.
    /// Cheaper conceptually, but none of the cycle bounds hold for it, so it
    /// must be requested explicitly.
    PerSupplyNearest,
}

/// One matched unit pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MatchPair {
    pub supply: usize,
    pub demand: usize,
    pub distance: u32,
}

/// A (possibly partial) matching over unit multisets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Matching {
    /// Pairs in the order the sweep committed them.
    pub pairs: Vec<MatchPair>,
    /// Sum of matched distances.
    pub total_weight: u64,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Aggregated flow between one supply point and one demand point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct Flow {
    pub supply: usize,
    pub demand: usize,
    pub mass: u64,
    pub distance: u32,
}

/// A transport plan over capacitated point sets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransportPlan {
    /// Flows with positive mass, in commit order.
    pub flows: Vec<Flow>,
    /// Total mass shipped: `min(total supply, total demand)`.
    pub moved_mass: u64,
    /// `sum(mass * distance)` over flows.
    pub cost: u64,
}

/// Greedy matching between unit multisets, smaller side matched completely.
///
/// Deterministic: ties fall to the smallest `(supply, demand)` index pair.
/// Either side may be empty, giving an empty matching.
pub fn greedy_match(supply: &[Point], demand: &[Point]) -> Matching {
    greedy_match_variant(supply, demand, GreedyVariant::GlobalShortestEdge)
}

pub fn greedy_match_variant(
    supply: &[Point],
    demand: &[Point],
    variant: GreedyVariant,
) -> Matching {
    match variant {
        GreedyVariant::GlobalShortestEdge => global_greedy(supply, demand),
        GreedyVariant::PerSupplyNearest => per_supply_nearest(supply, demand),
    }
}

fn global_greedy(supply: &[Point], demand: &[Point]) -> Matching {
    let mut edges = all_edges(supply, demand);
    edges.sort_unstable();
    let mut demand_taken = vec![false; demand.len()];
    let mut supply_taken = vec![false; supply.len()];
    let mut pairs = Vec::with_capacity(supply.len().min(demand.len()));
    let mut total_weight = 0u64;
    for (dist, si, di) in edges {
        let (si, di) = (si as usize, di as usize);
        if supply_taken[si] || demand_taken[di] {
            continue;
        }
        supply_taken[si] = true;
        demand_taken[di] = true;
        total_weight += dist as u64;
        pairs.push(MatchPair {
            supply: si,
            demand: di,
            distance: dist,
        });
        if pairs.len() == supply.len().min(demand.len()) {
            break;
        }
    }
    Matching {
        pairs,
        total_weight,
    }
}

fn per_supply_nearest(supply: &[Point], demand: &[Point]) -> Matching {
    let mut demand_taken = vec![false; demand.len()];
    let mut pairs = Vec::new();
    let mut total_weight = 0u64;
    for (si, s) in supply.iter().enumerate() {
        if pairs.len() == demand.len() {
            break;
        }
        let mut best: Option<(u32, usize)> = None;
        for (di, d) in demand.iter().enumerate() {
            if demand_taken[di] {
                continue;
            }
            let dist = hamming_distance(s, d);
            if best.is_none_or(|b| (dist, di) < b) {
                best = Some((dist, di));
            }
        }
        let (dist, di) = best.expect("free demand exists while pairs < |demand|");
        demand_taken[di] = true;
        total_weight += dist as u64;
        pairs.push(MatchPair {
            supply: si,
            demand: di,
            distance: dist,
        });
    }
    Matching {
        pairs,
        total_weight,
    }
}

fn all_edges(supply: &[Point], demand: &[Point]) -> Vec<(u32, u32, u32)> {
    let mut edges = Vec::with_capacity(supply.len() * demand.len());
    for (si, s) in supply.iter().enumerate() {
        for (di, d) in demand.iter().enumerate() {
            edges.push((hamming_distance(s, d), si as u32, di as u32));
        }
    }
    edges
}

/// Greedy transport between capacitated point sets.
///
/// Equivalent to duplicating point `i` into `mult[i]` units with unit ids
/// ordered `(point index, copy index)` and running [`greedy_match`]: at any
/// moment the globally shortest available unit edge lies between the
/// lexicographically smallest point pair at that distance, and all copies of
/// that pair clear before any other pair at the same distance becomes
/// minimal. A single sorted sweep shipping `min(remaining supply, remaining
/// demand)` therefore reproduces the unit-level plan, aggregated.
pub fn capacity_greedy(
    supply_points: &[Point],
    supply_mult: &[u64],
    demand_points: &[Point],
    demand_mult: &[u64],
    _tie_break: TieBreak,
) -> TransportPlan {
    assert_eq!(supply_points.len(), supply_mult.len());
    assert_eq!(demand_points.len(), demand_mult.len());
    let mut edges = all_edges(supply_points, demand_points);
    edges.sort_unstable();
    let mut rem_s = supply_mult.to_vec();
    let mut rem_d = demand_mult.to_vec();
    let total_supply: u64 = rem_s.iter().sum();
    let total_demand: u64 = rem_d.iter().sum();
    let target = total_supply.min(total_demand);
    let mut flows = Vec::new();
    let mut moved = 0u64;
    let mut cost = 0u64;
    for (dist, si, di) in edges {
        if moved == target {
            break;
        }
        let (si, di) = (si as usize, di as usize);
        let mass = rem_s[si].min(rem_d[di]);
        if mass == 0 {
            continue;
        }
        rem_s[si] -= mass;
        rem_d[di] -= mass;
        moved += mass;
        cost += mass * dist as u64;
        flows.push(Flow {
            supply: si,
            demand: di,
            mass,
            distance: dist,
        });
    }
    debug_assert_eq!(moved, target);
    TransportPlan {
        flows,
        moved_mass: moved,
        cost,
    }
}

/// Matched-edge pairs that contradict the shortest-edge-first order: the
/// shorter cross distance undercuts the shorter matched distance. The sweep
/// can never produce one, so any hit indicates a broken matching.
///
/// `edges` are `(supply index, demand index, distance)` triples with
/// positive mass.
pub fn exchange_violations(
    supply: &[Point],
    demand: &[Point],
    edges: &[(usize, usize, u32)],
) -> Vec<(usize, usize)> {
    let mut violations = Vec::new();
    for (a, &(sa, da, dist_a)) in edges.iter().enumerate() {
        for (b, &(sb, db, dist_b)) in edges.iter().enumerate().skip(a + 1) {
            let cross = hamming_distance(&supply[sa], &demand[db])
                .min(hamming_distance(&supply[sb], &demand[da]));
            if cross < dist_a.min(dist_b) {
                violations.push((a, b));
            }
        }
    }
    violations
}

/// Expand a capacitated side into explicit units, copies adjacent and
/// ordered `(point index, copy index)`. Test and analysis helper.
pub fn expand_units(points: &[Point], mult: &[u64]) -> Vec<Point> {
    let mut units = Vec::new();
    for (p, &m) in points.iter().zip(mult) {
        for _ in 0..m {
            units.push(p.clone());
        }
    }
    units
}
