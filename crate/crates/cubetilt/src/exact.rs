//! Exact transport oracle.
//!
//! Both entry points reduce to one min-cost-flow solver: successive shortest
//! augmenting paths with node potentials over the complete bipartite graph
//! of distinct points. Distances are integers, so with integer unit masses
//! the optimum is computed exactly, with no floating-point inside the solve.
//!
//! [`exact_min_matching`] treats its inputs as unit multisets and must get
//! equal sizes. [`exact_w1`] takes weighted distributions, quantizes each
//! side independently to a common denominator of `10^9` units (largest
//! remainder, so each side totals exactly `10^9`), cancels mass that both
//! sides place on the same point, and solves the remainder. Quantization
//! moves each weight by less than `1e-9`; everything after it is exact
//! integer arithmetic, which keeps the returned values an honest metric
//! (symmetry and triangle inequality hold exactly on the quantized inputs).

use std::collections::HashMap;

use crate::distribution::WeightedDistribution;
use crate::greedy::{Flow, Matching, MatchPair, TransportPlan};
use crate::hypercube::{hamming_distance, Point};
use crate::{Error, Result};

/// Default limit on unit counts (matching) and support sizes (Wasserstein).
/// The solver is quadratic per phase, so this is a guard rail, not a hint.
pub const DEFAULT_UNIT_CAP: usize = 2000;

/// Mass denominator for [`exact_w1`] quantization.
pub const W1_DENOMINATOR: u64 = 1_000_000_000;

/// An exact optimum: integral cost plus the plan attaining it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactResult {
    /// Total distance of the optimal assignment, in unit-distance products.
    pub cost: u64,
    /// Optimal flows over distinct points; indices reference the first
    /// occurrence of each point in the caller's slices.
    pub plan: TransportPlan,
}

/// Minimum-cost perfect assignment between equal-size unit multisets.
pub fn exact_min_matching(supply: &[Point], demand: &[Point]) -> Result<ExactResult> {
    exact_min_matching_with_cap(supply, demand, DEFAULT_UNIT_CAP)
}

pub fn exact_min_matching_with_cap(
    supply: &[Point],
    demand: &[Point],
    cap: usize,
) -> Result<ExactResult> {
    let (groups_s, groups_d) = check_matching_sides(supply, demand, cap)?;
    let (cost, flows) = solve_grouped(supply, demand, &groups_s, &groups_d);
    let moved_mass = supply.len() as u64;
    Ok(ExactResult {
        cost,
        plan: TransportPlan {
            flows,
            moved_mass,
            cost,
        },
    })
}

/// Same optimum as [`exact_min_matching`], expanded to a perfect unit-level
/// [`Matching`] (deterministically: units of a point are consumed in input
/// order). This is the form the cycle analysis consumes.
pub fn exact_perfect_matching(supply: &[Point], demand: &[Point]) -> Result<Matching> {
    exact_perfect_matching_with_cap(supply, demand, DEFAULT_UNIT_CAP)
}

pub fn exact_perfect_matching_with_cap(
    supply: &[Point],
    demand: &[Point],
    cap: usize,
) -> Result<Matching> {
    let (groups_s, groups_d) = check_matching_sides(supply, demand, cap)?;
    let (cost, flows) = solve_grouped(supply, demand, &groups_s, &groups_d);
    // First occurrence index -> queue of unit indices for that point.
    let mut queue_s: HashMap<usize, std::collections::VecDeque<usize>> = HashMap::new();
    for g in &groups_s {
        queue_s.insert(g[0], g.iter().copied().collect());
    }
    let mut queue_d: HashMap<usize, std::collections::VecDeque<usize>> = HashMap::new();
    for g in &groups_d {
        queue_d.insert(g[0], g.iter().copied().collect());
    }
    let mut pairs = Vec::with_capacity(supply.len());
    for f in &flows {
        for _ in 0..f.mass {
            let su = queue_s
                .get_mut(&f.supply)
                .and_then(|q| q.pop_front())
                .expect("flow conserves supply multiplicity");
            let du = queue_d
                .get_mut(&f.demand)
                .and_then(|q| q.pop_front())
                .expect("flow conserves demand multiplicity");
            pairs.push(MatchPair {
                supply: su,
                demand: du,
                distance: f.distance,
            });
        }
    }
    debug_assert_eq!(pairs.len(), supply.len());
    Ok(Matching {
        pairs,
        total_weight: cost,
    })
}

/// Exact 1-Wasserstein distance between two distributions on the same cube.
pub fn exact_w1(p: &WeightedDistribution, q: &WeightedDistribution) -> Result<f64> {
    exact_w1_with_cap(p, q, DEFAULT_UNIT_CAP)
}

pub fn exact_w1_with_cap(
    p: &WeightedDistribution,
    q: &WeightedDistribution,
    cap: usize,
) -> Result<f64> {
    if p.dim() != q.dim() {
        return Err(Error::DimensionMismatch {
            left: p.dim(),
            right: q.dim(),
        });
    }
    for side in [p, q] {
        if side.len() > cap {
            return Err(Error::SizeCap {
                size: side.len(),
                cap,
            });
        }
    }
    let mut units_p = quantize(p.points(), p.weights());
    let mut units_q = quantize(q.points(), q.weights());
    // Mass both sides put on the same point never has to move.
    let index_q: HashMap<&Point, usize> = q
        .points()
        .iter()
        .enumerate()
        .map(|(i, pt)| (pt, i))
        .collect();
    for (i, pt) in p.points().iter().enumerate() {
        if let Some(&j) = index_q.get(pt) {
            let shared = units_p[i].min(units_q[j]);
            units_p[i] -= shared;
            units_q[j] -= shared;
        }
    }
    let sup: Vec<usize> = (0..p.len()).filter(|&i| units_p[i] > 0).collect();
    let dem: Vec<usize> = (0..q.len()).filter(|&j| units_q[j] > 0).collect();
    if sup.is_empty() || dem.is_empty() {
        return Ok(0.0);
    }
    let dists = DistMatrix::build(
        &sup.iter().map(|&i| p.points()[i].clone()).collect::<Vec<_>>(),
        &dem.iter().map(|&j| q.points()[j].clone()).collect::<Vec<_>>(),
    );
    let mut supplies: Vec<u64> = sup.iter().map(|&i| units_p[i]).collect();
    let mut demands: Vec<u64> = dem.iter().map(|&j| units_q[j]).collect();
    let (cost, _) = min_cost_flow(&dists, &mut supplies, &mut demands);
    Ok(cost as f64 / W1_DENOMINATOR as f64)
}

/// Largest-remainder quantization to exactly [`W1_DENOMINATOR`] units.
fn quantize(points: &[Point], weights: &[f64]) -> Vec<u64> {
    let total: f64 = crate::util::compensated_sum(weights.iter().copied());
    let mut units: Vec<u64> = Vec::with_capacity(weights.len());
    let mut remainders: Vec<(f64, usize)> = Vec::with_capacity(weights.len());
    let mut assigned: u64 = 0;
    for (i, &w) in weights.iter().enumerate() {
        let exact = w / total * W1_DENOMINATOR as f64;
        let base = exact.floor() as u64;
        assigned += base;
        units.push(base);
        remainders.push((exact - base as f64, i));
    }
    // Hand out the remaining units to the largest remainders, the smaller
    // point breaking ties, so equal measures quantize identically no matter
    // how their supports happen to be ordered.
    let mut deficit = W1_DENOMINATOR as i64 - assigned as i64;
    remainders.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| points[a.1].cmp(&points[b.1]))
    });
    let mut k = 0;
    while deficit > 0 {
        units[remainders[k % remainders.len()].1] += 1;
        deficit -= 1;
        k += 1;
    }
    // Floating-point drift can in principle overshoot; claw back from the
    // smallest remainders that still hold units.
    k = remainders.len();
    while deficit < 0 {
        k = if k == 0 { remainders.len() - 1 } else { k - 1 };
        let idx = remainders[k].1;
        if units[idx] > 0 {
            units[idx] -= 1;
            deficit += 1;
        }
    }
    debug_assert_eq!(units.iter().sum::<u64>(), W1_DENOMINATOR);
    units
}

/// Unit indices grouped by coincident point.
type PointGroups = Vec<Vec<usize>>;

fn check_matching_sides(
    supply: &[Point],
    demand: &[Point],
    cap: usize,
) -> Result<(PointGroups, PointGroups)> {
    if supply.len() != demand.len() {
        return Err(Error::Invalid(format!(
            "matching needs equal sides, got {} and {}",
            supply.len(),
            demand.len()
        )));
    }
    if supply.is_empty() {
        return Err(Error::Invalid("matching needs at least one unit".into()));
    }
    if supply.len() > cap {
        return Err(Error::SizeCap {
            size: supply.len(),
            cap,
        });
    }
    let dim = supply[0].dim();
    for pt in supply.iter().chain(demand) {
        if pt.dim() != dim {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: pt.dim(),
            });
        }
    }
    Ok((group_by_point(supply), group_by_point(demand)))
}

/// Indices grouped by coincident point, groups ordered by first occurrence.
fn group_by_point(units: &[Point]) -> PointGroups {
    let mut by_point: HashMap<&Point, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, p) in units.iter().enumerate() {
        match by_point.get(p) {
            Some(&g) => groups[g].push(i),
            None => {
                by_point.insert(p, groups.len());
                groups.push(vec![i]);
            }
        }
    }
    groups
}

fn solve_grouped(
    supply: &[Point],
    demand: &[Point],
    groups_s: &[Vec<usize>],
    groups_d: &[Vec<usize>],
) -> (u64, Vec<Flow>) {
    let points_s: Vec<Point> = groups_s.iter().map(|g| supply[g[0]].clone()).collect();
    let points_d: Vec<Point> = groups_d.iter().map(|g| demand[g[0]].clone()).collect();
    let dists = DistMatrix::build(&points_s, &points_d);
    let mut supplies: Vec<u64> = groups_s.iter().map(|g| g.len() as u64).collect();
    let mut demands: Vec<u64> = groups_d.iter().map(|g| g.len() as u64).collect();
    let (cost, raw_flows) = min_cost_flow(&dists, &mut supplies, &mut demands);
    let flows = raw_flows
        .into_iter()
        .map(|f| Flow {
            supply: groups_s[f.supply][0],
            demand: groups_d[f.demand][0],
            mass: f.mass,
            distance: f.distance,
        })
        .collect();
    (cost, flows)
}

struct DistMatrix {
    nd: usize,
    data: Vec<u32>,
}

impl DistMatrix {
    fn build(supply: &[Point], demand: &[Point]) -> Self {
        let mut data = Vec::with_capacity(supply.len() * demand.len());
        for s in supply {
            for d in demand {
                data.push(hamming_distance(s, d));
            }
        }
        DistMatrix {
            nd: demand.len(),
            data,
        }
    }

    #[inline]
    fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.nd + j]
    }
}

/// Successive shortest paths with potentials over the complete bipartite
/// residual graph, shipping `min(total supply, total demand)`.
///
/// Nodes `0..ns` are supplies, `ns..ns+nd` demands. Every phase runs a dense
/// Dijkstra on reduced costs from all supplies with remaining mass and stops
/// at the first demand with remaining capacity; live sources and live sinks
/// provably share one potential value each, so that pop is a true shortest
/// path and reduced costs stay nonnegative.
fn min_cost_flow(
    dists: &DistMatrix,
    supplies: &mut [u64],
    demands: &mut [u64],
) -> (u64, Vec<Flow>) {
    let ns = supplies.len();
    let nd = demands.len();
    let n = ns + nd;
    let target: u64 = supplies.iter().sum::<u64>().min(demands.iter().sum());
    let mut flow: Vec<std::collections::BTreeMap<u32, u64>> = vec![Default::default(); nd];
    let mut pi = vec![0i64; n];
    let mut dist = vec![i64::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut moved = 0u64;
    let mut cost = 0u64;

    while moved < target {
        dist.fill(i64::MAX);
        parent.fill(usize::MAX);
        done.fill(false);
        for i in 0..ns {
            if supplies[i] > 0 {
                dist[i] = 0;
            }
        }
        let sink = loop {
            let mut u = usize::MAX;
            let mut best = i64::MAX;
            for v in 0..n {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            assert_ne!(u, usize::MAX, "complete bipartite graph is connected");
            done[u] = true;
            if u >= ns && demands[u - ns] > 0 {
                break u;
            }
            if u < ns {
                // Forward arcs to every demand.
                let base = dist[u] + pi[u];
                for j in 0..nd {
                    let v = ns + j;
                    if done[v] {
                        continue;
                    }
                    let nd_cost = base + dists.get(u, j) as i64 - pi[v];
                    if nd_cost < dist[v] {
                        dist[v] = nd_cost;
                        parent[v] = u;
                    }
                }
            } else {
                // Backward arcs along existing flow.
                let j = u - ns;
                let base = dist[u] + pi[u];
                for (&i, &f) in &flow[j] {
                    let v = i as usize;
                    if done[v] || f == 0 {
                        continue;
                    }
                    let nd_cost = base - dists.get(v, j) as i64 - pi[v];
                    if nd_cost < dist[v] {
                        dist[v] = nd_cost;
                        parent[v] = u;
                    }
                }
            }
        };
        let dstar = dist[sink];
        for v in 0..n {
            pi[v] += dist[v].min(dstar);
        }
        // Walk back to a source, collecting the bottleneck.
        let mut delta = demands[sink - ns];
        let mut v = sink;
        while parent[v] != usize::MAX {
            let u = parent[v];
            if u >= ns {
                // v -> u is a backward arc in the augmenting direction.
                delta = delta.min(flow[u - ns][&(v as u32)]);
            }
            v = u;
        }
        delta = delta.min(supplies[v]);
        debug_assert!(delta > 0);
        // Apply.
        supplies[v] -= delta;
        demands[sink - ns] -= delta;
        let mut w = sink;
        while parent[w] != usize::MAX {
            let u = parent[w];
            if u < ns {
                *flow[w - ns].entry(u as u32).or_insert(0) += delta;
            } else {
                let slot = flow[u - ns].get_mut(&(w as u32)).expect("backward arc");
                *slot -= delta;
                if *slot == 0 {
                    flow[u - ns].remove(&(w as u32));
                }
            }
            w = u;
        }
        moved += delta;
    }

    let mut flows = Vec::new();
    for (j, into_j) in flow.iter().enumerate() {
        let mut entries: Vec<(u32, u64)> = into_j.iter().map(|(&i, &f)| (i, f)).collect();
        entries.sort_unstable();
        for (i, f) in entries {
            if f > 0 {
                let d = dists.get(i as usize, j);
                cost += f * d as u64;
                flows.push(Flow {
                    supply: i as usize,
                    demand: j,
                    mass: f,
                    distance: d,
                });
            }
        }
    }
    flows.sort_unstable_by_key(|f| (f.supply, f.demand));
    (cost, flows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypercube::parse_point;
    use itertools::Itertools;

    fn pts(bits: &[&str]) -> Vec<Point> {
        bits.iter().map(|b| parse_point(b, b.len()).unwrap()).collect()
    }

    fn dist(entries: &[(&str, f64)]) -> WeightedDistribution {
        let dim = entries[0].0.len();
        let points = entries
            .iter()
            .map(|(b, _)| parse_point(b, dim).unwrap())
            .collect();
        let ids = (0..entries.len()).map(|i| format!("p{i}")).collect();
        let weights = entries.iter().map(|&(_, w)| w).collect();
        WeightedDistribution::new(dim, points, ids, weights).unwrap()
    }

    /// Brute-force optimal assignment over all permutations.
    fn permutation_oracle(supply: &[Point], demand: &[Point]) -> u64 {
        (0..demand.len())
            .permutations(demand.len())
            .map(|perm| {
                perm.iter()
                    .enumerate()
                    .map(|(i, &j)| hamming_distance(&supply[i], &demand[j]) as u64)
                    .sum()
            })
            .min()
            .unwrap()
    }

    fn random_points(n: usize, dim: usize, state: &mut u64) -> Vec<Point> {
        (0..n)
            .map(|_| {
                *state ^= *state >> 12;
                *state ^= *state << 25;
                *state ^= *state >> 27;
                let v = state.wrapping_mul(0x2545F4914F6CDD1D) as usize % (1 << dim);
                let mut p = Point::zero(dim);
                for b in 0..dim {
                    if v >> b & 1 == 1 {
                        p.set(b, true);
                    }
                }
                p
            })
            .collect()
    }

    #[test]
    fn matches_permutation_oracle_on_random_instances() {
        for seed in 0..60u64 {
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(3);
            let n = 1 + (seed as usize % 5);
            let supply = random_points(n, 4, &mut state);
            let demand = random_points(n, 4, &mut state);
            let got = exact_min_matching(&supply, &demand).unwrap();
            assert_eq!(got.cost, permutation_oracle(&supply, &demand), "seed {seed}");
            let plan_cost: u64 = got
                .plan
                .flows
                .iter()
                .map(|f| f.mass * f.distance as u64)
                .sum();
            assert_eq!(plan_cost, got.cost);
            assert_eq!(got.plan.moved_mass, n as u64);
        }
    }

    #[test]
    fn five_by_five_matches_all_permutations() {
        let mut state = 3u64.wrapping_mul(0x9E3779B97F4A7C15);
        let supply = random_points(5, 4, &mut state);
        let demand = random_points(5, 4, &mut state);
        let got = exact_min_matching(&supply, &demand).unwrap().cost;
        assert_eq!(got, permutation_oracle(&supply, &demand));
    }

    #[test]
    fn perfect_matching_expansion_is_consistent() {
        let supply = pts(&["000", "000", "011", "110"]);
        let demand = pts(&["001", "111", "111", "000"]);
        let result = exact_min_matching(&supply, &demand).unwrap();
        let matching = exact_perfect_matching(&supply, &demand).unwrap();
        assert_eq!(matching.total_weight, result.cost);
        assert_eq!(matching.pairs.len(), 4);
        let mut seen_s = [false; 4];
        let mut seen_d = [false; 4];
        for p in &matching.pairs {
            assert!(!seen_s[p.supply] && !seen_d[p.demand]);
            seen_s[p.supply] = true;
            seen_d[p.demand] = true;
            assert_eq!(p.distance, hamming_distance(&supply[p.supply], &demand[p.demand]));
        }
    }

    #[test]
    fn w1_of_crossing_pairs_is_one() {
        let p = dist(&[("000", 0.5), ("011", 0.5)]);
        let q = dist(&[("001", 0.5), ("010", 0.5)]);
        assert!((exact_w1(&p, &q).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn w1_of_point_masses_is_their_distance() {
        let p = dist(&[("000", 1.0)]);
        let q = dist(&[("111", 1.0)]);
        assert_eq!(exact_w1(&p, &q).unwrap(), 3.0);
    }

    #[test]
    fn w1_is_a_metric_on_random_triples() {
        for seed in 0..40u64 {
            let mut state = seed.wrapping_mul(0x9E3779B97F4A7C15).wrapping_add(11);
            let mut mk = |n: usize| {
                let points = random_points_distinct(n, 5, &mut state);
                let ids = (0..points.len()).map(|i| format!("p{i}")).collect();
                let raw: Vec<f64> = (0..points.len())
                    .map(|i| 0.5 + ((seed + i as u64) % 7) as f64 / 7.0)
                    .collect();
                let w = crate::distribution::normalize(&raw).unwrap();
                let dim = 5;
                WeightedDistribution::new(dim, points, ids, w).unwrap()
            };
            let (p, q, r) = (mk(4), mk(3), mk(5));
            let pq = exact_w1(&p, &q).unwrap();
            let qp = exact_w1(&q, &p).unwrap();
            let qr = exact_w1(&q, &r).unwrap();
            let pr = exact_w1(&p, &r).unwrap();
            assert!((pq - qp).abs() <= 1e-9, "symmetry at seed {seed}");
            assert!(pr <= pq + qr + 1e-9, "triangle at seed {seed}");
            assert!(pq >= 0.0);
            assert!(exact_w1(&p, &p).unwrap().abs() <= 1e-12);
        }
    }

    fn random_points_distinct(n: usize, dim: usize, state: &mut u64) -> Vec<Point> {
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        while out.len() < n {
            let p = random_points(1, dim, state).pop().unwrap();
            if seen.insert(p.clone()) {
                out.push(p);
            }
        }
        out
    }

    #[test]
    fn w1_scales_matching_cost_on_uniform_multisets() {
        let supply = pts(&["0000", "0110", "1111"]);
        let demand = pts(&["0001", "0111", "1110"]);
        let matching = exact_min_matching(&supply, &demand).unwrap();
        let p = WeightedDistribution::uniform(
            4,
            supply.clone(),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let q = WeightedDistribution::uniform(
            4,
            demand.clone(),
            vec!["a".into(), "b".into(), "c".into()],
        )
        .unwrap();
        let w1 = exact_w1(&p, &q).unwrap();
        assert!(
            (w1 * 3.0 - matching.cost as f64).abs() < 1e-6,
            "w1 {w1} vs matching {}",
            matching.cost
        );
    }

    #[test]
    fn shared_mass_costs_nothing() {
        let p = dist(&[("0000", 0.6), ("1111", 0.4)]);
        let q = dist(&[("0000", 0.4), ("1111", 0.6)]);
        // 0.2 moves across distance 4.
        assert!((exact_w1(&p, &q).unwrap() - 0.8).abs() < 1e-9);
    }

    #[test]
    fn rejects_bad_inputs() {
        let supply = pts(&["00", "01"]);
        let demand = pts(&["10"]);
        assert!(matches!(
            exact_min_matching(&supply, &demand),
            Err(Error::Invalid(_))
        ));
        assert!(matches!(
            exact_min_matching_with_cap(&supply, &pts(&["10", "11"]), 1),
            Err(Error::SizeCap { .. })
        ));
        let p = dist(&[("00", 1.0)]);
        let q3 = dist(&[("000", 1.0)]);
        assert!(matches!(
            exact_w1(&p, &q3),
            Err(Error::DimensionMismatch { .. })
        ));
        let q = dist(&[("00", 0.5), ("11", 0.5)]);
        assert!(matches!(
            exact_w1_with_cap(&p, &q, 1),
            Err(Error::SizeCap { .. })
        ));
    }

    #[test]
    fn quantize_totals_are_exact() {
        for weights in [
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            vec![1.0 / 7.0; 7],
            vec![0.9999999999, 0.0000000001],
        ] {
            let points: Vec<Point> = (0..weights.len())
                .map(|i| Point::from_ones(8, &[i]).unwrap())
                .collect();
            let units = quantize(&points, &weights);
            assert_eq!(units.iter().sum::<u64>(), W1_DENOMINATOR);
        }
    }

    #[test]
    fn quantization_ignores_support_order() {
        // Equal measures presented in different point orders must land on
        // identical unit vectors, including the leftover-unit tie-break.
        let forward = dist(&[("00", 1.0 / 3.0), ("01", 1.0 / 3.0), ("10", 1.0 / 3.0)]);
        let backward = dist(&[("10", 1.0 / 3.0), ("01", 1.0 / 3.0), ("00", 1.0 / 3.0)]);
        assert_eq!(exact_w1(&forward, &backward).unwrap(), 0.0);
    }
}
