//! Watch subsample distributions converge to the distribution they came from.
//!
//! Drawing m points with replacement and reweighing by multiplicity gives an
//! empirical measure; its transport distance to the original shrinks as m
//! grows. The experiment also reports how often trials exceed the iterated
//! logarithm threshold that the concentration analysis predicts is rarely
//! crossed.
//!
//! Run with `cargo run --example sampling_concentration`.

use cubetilt::distribution::WeightedDistribution;
use cubetilt::generators::{gen_clustered, GenKind, GenSpec};
use cubetilt::sampler::{concentration_experiment, experiment_csv, Estimator};
use cubetilt::Result;

fn main() -> Result<()> {
    let spec = GenSpec {
        d: 32,
        n: 2_000,
        eta: 4,
        zeta: 2,
        seed: 19,
        kind: GenKind::Clustered { skew: 0.5 },
    };
    let instance = gen_clustered(&spec)?;
    let dist = WeightedDistribution::from_dataset(&instance.source)?;
    println!(
        "sampling from {} distinct points in dimension {}",
        dist.len(),
        spec.d
    );

    let m_values = [50, 200, 800, 3_200];
    let reports = concentration_experiment(&dist, &m_values, 12, 99, Estimator::Greedy, 0.1)?;

    println!();
    println!("m        median w1    max w1       threshold    exceed");
    for r in &reports {
        let mut sorted = r.w1_values.clone();
        sorted.sort_by(f64::total_cmp);
        let median = sorted[sorted.len() / 2];
        let max = sorted.last().copied().unwrap_or(0.0);
        println!(
            "{:>5}    {median:>9.6}    {max:>9.6}    {:>9.6}    {:.2}",
            r.m, r.threshold, r.exceed_fraction
        );
    }

    println!();
    println!("long-format rows for plotting:");
    for line in experiment_csv(&reports).lines().take(5) {
        println!("  {line}");
    }
    println!("  ...");
    Ok(())
}
