//! Compare the greedy transport estimate against the exact optimum.
//!
//! Greedy matching ships mass along the globally shortest edge first, which
//! is fast but can overshoot the optimal cost. This example prints both
//! estimates side by side on random weighted pairs, then shows how the
//! integer mass scale trades resolution for unit count.
//!
//! Run with `cargo run --example w1_estimates`.

use cubetilt::distribution::WeightedDistribution;
use cubetilt::exact::exact_w1;
use cubetilt::hypercube::Point;
use cubetilt::reduce::{default_scale, greedy_w1};
use cubetilt::Result;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_distribution(rng: &mut StdRng, dim: usize, n: usize) -> Result<WeightedDistribution> {
    let mut points = Vec::new();
    let mut weights = Vec::new();
    while points.len() < n {
        let mut p = Point::zero(dim);
        for i in 0..dim {
            p.set(i, rng.random_bool(0.5));
        }
        if !points.contains(&p) {
            points.push(p);
            weights.push(rng.random_range(0.1..1.0));
        }
    }
    let ids = (0..n).map(|i| format!("x{i}")).collect();
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    WeightedDistribution::new(dim, points, ids, weights)
}

fn main() -> Result<()> {
    let mut rng = StdRng::seed_from_u64(42);

    println!("instance    greedy         exact          ratio");
    for i in 0..8 {
        let p = random_distribution(&mut rng, 10, 6)?;
        let q = random_distribution(&mut rng, 10, 6)?;
        let scale = default_scale(&p, &q);
        let greedy = greedy_w1(&p, &q, scale)?;
        let exact = exact_w1(&p, &q)?;
        println!(
            "{i:>8}    {greedy:>11.9}    {exact:>11.9}    {:.4}",
            greedy / exact
        );
    }

    // Coarser scales quantize the weights harder; the estimate drifts by at
    // most 1/(scale * min weight) per side.
    let p = random_distribution(&mut rng, 10, 6)?;
    let q = random_distribution(&mut rng, 10, 6)?;
    println!();
    println!("scale      greedy estimate");
    for scale in [10, 100, 1_000, 10_000, 100_000] {
        println!("{scale:>7}    {:>11.9}", greedy_w1(&p, &q, scale)?);
    }
    Ok(())
}
