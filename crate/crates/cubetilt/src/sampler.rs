//! Empirical samples of a weighted distribution and the concentration
//! experiment around them: how fast does the transport distance between a
//! sample and its source shrink as the sample grows?
//!
//! Randomness is counter-based: one ChaCha stream per trial index, draws
//! consumed in order within the stream. Reports are therefore identical
//! across runs and worker counts, and a trial's sample at a smaller `m` is a
//! prefix of the same trial's sample at a larger `m`.

use rayon::prelude::*;
use serde::Serialize;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::distribution::{normalize, spread, WeightedDistribution};
use crate::exact::exact_w1;
use crate::reduce::{default_scale, greedy_w1};
use crate::util::thread_pool;
use crate::{Error, Result};

/// Which transport estimate scores a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Estimator {
    Exact,
    Greedy,
}

/// Outcome of all trials at one sample size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleExperimentReport {
    pub m: usize,
    pub trials: usize,
    /// One transport distance per trial, in trial order.
    pub w1_values: Vec<f64>,
    /// `ln(ln(n)) + spread * epsilon_slack`, the scaled concentration level.
    pub threshold: f64,
    /// Fraction of trials at or above the threshold.
    pub exceed_fraction: f64,
}

/// Draw `m` points i.i.d. from `p` (with replacement) and return their
/// empirical distribution. Points never drawn are dropped; drawn points keep
/// their ids from `p`. Deterministic in `(p, m, seed)`.
pub fn random_sample(p: &WeightedDistribution, m: usize, seed: u64) -> Result<WeightedDistribution> {
    sample_stream(p, m, seed, 0)
}

/// [`random_sample`] on a numbered ChaCha stream; trial harnesses use the
/// trial index as the stream so trials stay independent and order-free.
pub fn sample_stream(
    p: &WeightedDistribution,
    m: usize,
    seed: u64,
    stream: u64,
) -> Result<WeightedDistribution> {
    if m == 0 {
        return Err(Error::Invalid("sample size must be at least 1".into()));
    }
    let mut cumulative = Vec::with_capacity(p.len());
    let mut acc = 0.0;
    for &w in p.weights() {
        acc += w;
        cumulative.push(acc);
    }
    *cumulative.last_mut().expect("distribution is nonempty") = 1.0;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; p.len()];
    for _ in 0..m {
        let r: f64 = rng.random();
        // First index whose cumulative weight exceeds r; zero-weight points
        // have empty intervals and are never hit.
        let idx = cumulative.partition_point(|&c| c <= r).min(p.len() - 1);
        counts[idx] += 1;
    }

    let mut points = Vec::new();
    let mut ids = Vec::new();
    let mut raw = Vec::new();
    for (i, &c) in counts.iter().enumerate() {
        if c > 0 {
            points.push(p.points()[i].clone());
            ids.push(p.ids()[i].clone());
            raw.push(c as f64);
        }
    }
    let weights = normalize(&raw)?;
    WeightedDistribution::new(p.dim(), points, ids, weights)
}

/// For each sample size, run independent trials of sample-then-measure
/// against `p` and report the distances next to the concentration threshold
/// `ln(ln(n)) + spread(p) * epsilon_slack` (`n` = support size, floored at 3
/// to keep the iterated logarithm positive). Trials run in parallel and
/// merge in trial order.
pub fn concentration_experiment(
    p: &WeightedDistribution,
    m_values: &[usize],
    trials: usize,
    seed: u64,
    estimator: Estimator,
    epsilon_slack: f64,
) -> Result<Vec<SampleExperimentReport>> {
    if trials == 0 {
        return Err(Error::Invalid("need at least one trial".into()));
    }
    if epsilon_slack.is_nan() || epsilon_slack < 0.0 {
        return Err(Error::Invalid(format!(
            "epsilon slack must be nonnegative, got {epsilon_slack}"
        )));
    }
    let n_eff = p.len().max(3) as f64;
    let threshold = n_eff.ln().ln() + spread(p).value * epsilon_slack;

    let pool = thread_pool();
    let mut reports = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let w1_values: Vec<f64> = pool.install(|| {
            (0..trials)
                .into_par_iter()
                .map(|trial| {
                    let sample = sample_stream(p, m, seed, trial as u64)?;
                    match estimator {
                        Estimator::Exact => exact_w1(&sample, p),
                        Estimator::Greedy => {
                            greedy_w1(&sample, p, default_scale(&sample, p))
                        }
                    }
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let exceed = w1_values.iter().filter(|&&v| v >= threshold).count();
        reports.push(SampleExperimentReport {
            m,
            trials,
            w1_values,
            threshold,
            exceed_fraction: exceed as f64 / trials as f64,
        });
    }
    Ok(reports)
}

/// Plot-ready long-format CSV of an experiment: `m,trial,w1`.
pub fn experiment_csv(reports: &[SampleExperimentReport]) -> String {
    let mut out = String::from("m,trial,w1\n");
    for r in reports {
        for (trial, v) in r.w1_values.iter().enumerate() {
            out.push_str(&format!("{},{},{:.9}\n", r.m, trial, v));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_clustered, GenKind, GenSpec};
    use crate::hypercube::{parse_point, Point};

    fn dist(bits: &[&str], weights: &[f64]) -> WeightedDistribution {
        let dim = bits[0].len();
        let points: Vec<Point> = bits.iter().map(|b| parse_point(b, dim).unwrap()).collect();
        let ids = (0..bits.len()).map(|i| format!("p{i}")).collect();
        WeightedDistribution::new(dim, points, ids, weights.to_vec()).unwrap()
    }

    #[test]
    fn point_mass_samples_to_itself() {
        let p = dist(&["0101"], &[1.0]);
        for m in [1, 7, 100] {
            let s = random_sample(&p, m, 9).unwrap();
            assert_eq!(s.points(), p.points());
            assert_eq!(s.weights(), &[1.0]);
        }
    }

    #[test]
    fn sampling_is_deterministic_and_stream_separated() {
        let p = dist(&["000", "011", "110"], &[0.2, 0.3, 0.5]);
        let a = sample_stream(&p, 50, 4, 1).unwrap();
        let b = sample_stream(&p, 50, 4, 1).unwrap();
        assert_eq!(a, b);
        let c = sample_stream(&p, 50, 4, 2).unwrap();
        assert_ne!(a, c, "distinct streams should draw distinct samples");
        assert!(random_sample(&p, 0, 4).is_err());
    }

    #[test]
    fn zero_weight_points_are_never_drawn() {
        let p = dist(&["00", "01", "10"], &[0.5, 0.0, 0.5]);
        let s = random_sample(&p, 500, 11).unwrap();
        assert!(s.points().iter().all(|pt| pt != &p.points()[1]));
        assert!(s.ids().iter().all(|id| id != "p1"));
    }

    #[test]
    fn large_samples_concentrate_on_the_weights() {
        let p = dist(
            &["0000", "0011", "1100", "1111"],
            &[0.25, 0.25, 0.25, 0.25],
        );
        let s = random_sample(&p, 100_000, 1).unwrap();
        assert_eq!(s.len(), 4);
        for (pt, &w) in s.points().iter().zip(s.weights()) {
            assert!(
                (w - 0.25).abs() < 0.01,
                "point {pt} drifted to {w}"
            );
        }
    }

    #[test]
    fn point_mass_experiment_never_exceeds() {
        let p = dist(&["000"], &[1.0]);
        let reports =
            concentration_experiment(&p, &[10, 100], 8, 3, Estimator::Exact, 0.1).unwrap();
        for r in &reports {
            assert!(r.w1_values.iter().all(|&v| v == 0.0));
            assert_eq!(r.exceed_fraction, 0.0);
            // ln(ln(3)) + 1.0 * 0.1, the point-mass spread being exactly 1.
            assert!((r.threshold - (3f64.ln().ln() + 0.1)).abs() < 1e-12);
        }
    }

    #[test]
    fn experiment_is_reproducible_and_bounded_by_the_diameter() {
        let spec = GenSpec {
            d: 16,
            n: 12,
            eta: 2,
            zeta: 1,
            seed: 21,
            kind: GenKind::Clustered { skew: 0.8 },
        };
        let inst = gen_clustered(&spec).unwrap();
        let p = WeightedDistribution::from_dataset(&inst.source).unwrap();
        let run = || {
            concentration_experiment(&p, &[25, 400], 6, 5, Estimator::Exact, 0.1).unwrap()
        };
        let a = run();
        assert_eq!(a, run());
        for r in &a {
            assert_eq!(r.w1_values.len(), 6);
            assert!(r.w1_values.iter().all(|&v| v <= 16.0));
        }
        // More data gets at least as close in the median.
        let median = |r: &SampleExperimentReport| {
            let mut v = r.w1_values.clone();
            v.sort_by(f64::total_cmp);
            v[v.len() / 2]
        };
        assert!(median(&a[1]) <= median(&a[0]));
    }

    #[test]
    fn greedy_and_exact_estimators_agree_on_tiny_supports() {
        let p = dist(&["0000", "1111"], &[0.5, 0.5]);
        let g = concentration_experiment(&p, &[64], 4, 7, Estimator::Greedy, 0.1).unwrap();
        let e = concentration_experiment(&p, &[64], 4, 7, Estimator::Exact, 0.1).unwrap();
        for (gv, ev) in g[0].w1_values.iter().zip(&e[0].w1_values) {
            assert!((gv - ev).abs() < 1e-3, "greedy {gv} vs exact {ev}");
        }
    }

    #[test]
    fn csv_is_long_format_with_nine_decimals() {
        let reports = vec![SampleExperimentReport {
            m: 5,
            trials: 2,
            w1_values: vec![0.5, 1.25],
            threshold: 0.9,
            exceed_fraction: 0.5,
        }];
        let csv = experiment_csv(&reports);
        assert_eq!(csv, "m,trial,w1\n5,0,0.500000000\n5,1,1.250000000\n");
    }
}
