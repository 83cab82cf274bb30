//! Seeded instance generators: clustered dataset pairs whose cover size is
//! known by construction, and a greedy-hostile family with a known
//! greedy/optimal ratio.
//!
//! Everything is a pure function of its spec. Records carry no weight
//! column, so loaders treat both sides as uniform over records; duplicate
//! points across records are intentional and stand for multiplicity.

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::hypercube::{hamming_distance, Dataset, Point, Record};
use crate::{Error, Result};

/// Instance description; `seed` fixes every random choice.
#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub d: usize,
    /// Records per side.
    pub n: usize,
    /// Cluster count.
    pub eta: usize,
    /// Cluster radius.
    pub zeta: u32,
    pub seed: u64,
    pub kind: GenKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GenKind {
    /// Both sides drawn around shared cluster centers; the target tilts
    /// toward low-index clusters with weight proportional to
    /// `exp(-skew * cluster_index)`. `skew = 0` makes the sides
    /// identically distributed.
    Clustered { skew: f64 },
    /// Line construction on which greedy overpays by a factor approaching 3;
    /// `level` controls the size (`2^level` records per side).
    Adversarial { level: u32 },
}

impl GenSpec {
    /// Generate the (source, target) dataset pair for this spec.
    pub fn generate(&self) -> Result<(Dataset, Dataset)> {
        match self.kind {
            GenKind::Clustered { .. } => {
                let inst = gen_clustered(self)?;
                Ok((inst.source, inst.target))
            }
            GenKind::Adversarial { level } => gen_adversarial(level, self.d),
        }
    }
}

/// A clustered pair together with the centers that certify its structure.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusteredInstance {
    pub source: Dataset,
    pub target: Dataset,
    pub centers: Vec<Point>,
}

/// Attempts per center before the spec is declared infeasible.
const CENTER_ATTEMPTS: usize = 10_000;

/// Generate a clustered (source, target) pair: `eta` centers pairwise at
/// least `max(4 * zeta, 1)` apart, every record a center with at most
/// `zeta / 2` bits flipped. The flip budget keeps each cluster's diameter
/// within `zeta`, so a cover by balls of radius `zeta` centered on data
/// points needs at most `eta` balls and the reported cover certifies the
/// spec.
pub fn gen_clustered(spec: &GenSpec) -> Result<ClusteredInstance> {
    let GenKind::Clustered { skew } = spec.kind else {
        return Err(Error::Invalid("spec kind is not clustered".into()));
    };
    if spec.d == 0 || spec.n == 0 || spec.eta == 0 {
        return Err(Error::Invalid(
            "clustered spec needs d, n and eta all positive".into(),
        ));
    }
    if !skew.is_finite() || skew < 0.0 {
        return Err(Error::Invalid(format!(
            "skew must be finite and nonnegative, got {skew}"
        )));
    }
    if spec.zeta as usize * 4 >= spec.d {
        return Err(Error::Invalid(format!(
            "zeta = {} too large for separable clusters in dimension {}",
            spec.zeta, spec.d
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let centers = place_centers(&mut rng, spec.d, spec.eta, (4 * spec.zeta).max(1))?;

    // Target cluster weights, tilted toward low indices and normalized.
    let raw: Vec<f64> = (0..spec.eta).map(|i| (-skew * i as f64).exp()).collect();
    let total: f64 = raw.iter().sum();
    let mut cumulative = Vec::with_capacity(spec.eta);
    let mut acc = 0.0;
    for w in &raw {
        acc += w / total;
        cumulative.push(acc);
    }
    *cumulative.last_mut().expect("eta >= 1") = 1.0;

    let max_flips = spec.zeta / 2;
    let width = id_width(spec.n);
    let mut draw_side = |prefix: char, skewed: bool| -> Vec<Record> {
        (0..spec.n)
            .map(|i| {
                let cluster = if skewed {
                    let r: f64 = rng.random();
                    cumulative.partition_point(|&c| c < r).min(spec.eta - 1)
                } else {
                    rng.random_range(0..spec.eta)
                };
                let mut point = centers[cluster].clone();
                let flips = rng.random_range(0..=max_flips) as usize;
                for pos in sample(&mut rng, spec.d, flips) {
                    point.flip(pos);
                }
                Record {
                    id: format!("{prefix}{i:0width$}"),
                    point,
                    weight: None,
                }
            })
            .collect()
    };
    let source = Dataset::new(spec.d, draw_side('s', false))?;
    let target = Dataset::new(spec.d, draw_side('t', true))?;
    Ok(ClusteredInstance {
        source,
        target,
        centers,
    })
}

fn place_centers(
    rng: &mut ChaCha8Rng,
    d: usize,
    eta: usize,
    min_separation: u32,
) -> Result<Vec<Point>> {
    let mut centers: Vec<Point> = Vec::with_capacity(eta);
    while centers.len() < eta {
        let mut placed = false;
        for _ in 0..CENTER_ATTEMPTS {
            let candidate = random_point(rng, d);
            if centers
                .iter()
                .all(|c| hamming_distance(c, &candidate) >= min_separation)
            {
                centers.push(candidate);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Generator(format!(
                "could not place {eta} centers pairwise {min_separation} apart in dimension {d}"
            )));
        }
    }
    Ok(centers)
}

fn random_point(rng: &mut ChaCha8Rng, d: usize) -> Point {
    let mut p = Point::zero(d);
    for i in 0..d {
        if rng.random::<bool>() {
            p.set(i, true);
        }
    }
    p
}

fn id_width(n: usize) -> usize {
    n.saturating_sub(1).to_string().len().max(4)
}

/// Generate the greedy-hostile pair at the given level: `2^level` supplies
/// on even line positions and `2^level` demands on odd positions of
/// `0..2^(level+1)`, embedded isometrically into the cube by the
/// prefix-of-ones encoding. Supply records are ordered by increasing
/// (2-adic valuation, position) with position 0 last; under the index
/// tie-break this steers the greedy sweep into a chain of displacements and
/// a final edge across the whole line, for a cost of `3 * 2^level - 2`
/// against an optimum of `2^level`.
pub fn gen_adversarial(level: u32, d: usize) -> Result<(Dataset, Dataset)> {
    if level == 0 || level > 20 {
        return Err(Error::Invalid(format!(
            "adversarial level must be in 1..=20, got {level}"
        )));
    }
    let positions = 1usize << (level + 1);
    if d < positions {
        return Err(Error::Invalid(format!(
            "dimension {d} too small for adversarial level {level}, need at least {positions}"
        )));
    }
    let mut supplies: Vec<usize> = (2..positions).step_by(2).collect();
    supplies.sort_by_key(|&p| (p.trailing_zeros(), p));
    supplies.push(0);
    let demands: Vec<usize> = (1..positions).step_by(2).collect();

    let width = id_width(supplies.len());
    let side = |prefix: char, order: &[usize]| -> Result<Dataset> {
        let records = order
            .iter()
            .enumerate()
            .map(|(i, &pos)| {
                Ok(Record {
                    id: format!("{prefix}{i:0width$}"),
                    point: line_point(pos, d)?,
                    weight: None,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Dataset::new(d, records)
    };
    Ok((side('s', &supplies)?, side('t', &demands)?))
}

/// Embed line position `p` as the point with the first `p` coordinates set.
/// Distances along the line are preserved exactly: for `a <= b` the two
/// images differ in precisely the coordinates `a..b`.
pub fn line_point(p: usize, d: usize) -> Result<Point> {
    if p > d {
        return Err(Error::Invalid(format!(
            "line position {p} does not fit in dimension {d}"
        )));
    }
    Point::from_ones(d, &(0..p).collect::<Vec<_>>())
}
