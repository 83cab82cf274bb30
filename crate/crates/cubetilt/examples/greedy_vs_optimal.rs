//! Dissect where greedy matching loses to the optimum.
//!
//! The hostile generator builds instances where greedy's shortest-edge rule
//! cascades into long detours. Overlaying the greedy and optimal matchings
//! yields alternating cycles; each cycle's weight ratio is what the
//! structural analysis bounds. This example prints the ratios level by
//! level, then opens up one instance's cycles.
//!
//! Run with `cargo run --example greedy_vs_optimal`.

use cubetilt::analysis::{alternating_cycles, check_structural_lemma, ratio_ceiling};
use cubetilt::exact::exact_perfect_matching;
use cubetilt::generators::gen_adversarial;
use cubetilt::greedy::greedy_match;
use cubetilt::Result;

fn main() -> Result<()> {
    println!("level    units    greedy    exact    ratio");
    for level in 1..=5 {
        let d = 2usize.pow(level + 1);
        let (source, target) = gen_adversarial(level, d)?;
        let supply = source.points();
        let demand = target.points();
        let greedy = greedy_match(&supply, &demand);
        let exact = exact_perfect_matching(&supply, &demand)?;
        println!(
            "{level:>5}    {:>5}    {:>6}    {:>5}    {:.4}",
            supply.len(),
            greedy.total_weight,
            exact.total_weight,
            greedy.total_weight as f64 / exact.total_weight as f64
        );
    }

    let d = 16;
    let (source, target) = gen_adversarial(3, d)?;
    let supply = source.points();
    let demand = target.points();
    let greedy = greedy_match(&supply, &demand);
    let optimal = exact_perfect_matching(&supply, &demand)?;
    let decomposition = alternating_cycles(&supply, &demand, &greedy, &optimal)?;

    println!();
    println!(
        "level 3 instance: {} alternating cycle(s), ratio ceiling {:.4}",
        decomposition.cycles.len(),
        ratio_ceiling(&decomposition)
    );
    for (i, cycle) in decomposition.cycles.iter().enumerate() {
        let alpha = cycle.alpha();
        print!(
            "cycle {i}: {} edges, greedy {} vs optimal {}",
            cycle.len(),
            cycle.greedy_weight,
            cycle.optimal_weight
        );
        match (alpha, check_structural_lemma(cycle, d)) {
            (Some(a), Some(check)) => println!(
                ", alpha {a:.4} <= {:.4} at packing radius {} (separated set of {})",
                check.rhs, check.radius, check.packing
            ),
            _ => println!(", alpha undefined (zero optimal weight)"),
        }
    }
    Ok(())
}
