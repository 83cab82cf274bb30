//! Probe how tightly a dataset clusters using covers, packings, and spread.
//!
//! A cover certifies that few balls of a given radius reach every point; a
//! packing of separated points is the matching lower bound. Together they
//! bracket the true covering number at each radius, and the inferred
//! cluster exponent feeds the a-priori approximation bound for greedy
//! transport on that dataset.
//!
//! Run with `cargo run --example covering_diagnostics`.

use cubetilt::analysis::{approx_bound, infer_xi};
use cubetilt::covering::{greedy_cover, greedy_packing};
use cubetilt::distribution::{spread, WeightedDistribution};
use cubetilt::generators::{gen_clustered, GenKind, GenSpec};
use cubetilt::Result;

fn main() -> Result<()> {
    let spec = GenSpec {
        d: 64,
        n: 500,
        eta: 4,
        zeta: 2,
        seed: 11,
        kind: GenKind::Clustered { skew: 0.0 },
    };
    let instance = gen_clustered(&spec)?;
    let dist = WeightedDistribution::from_dataset(&instance.source)?;
    let points = dist.points();
    println!(
        "clustered source: {} records, {} distinct points in dimension {}",
        instance.source.records.len(),
        points.len(),
        spec.d
    );

    println!();
    println!("radius    cover size    packing lower bound");
    for zeta in [1, 2, 4, 8, 16, 32] {
        let report = greedy_cover(points, zeta)?;
        println!(
            "{zeta:>6}    {:>10}    {:>19}",
            report.eta, report.packing_count
        );
    }

    // The generator promised eta balls of radius zeta; the greedy cover
    // finds a certificate at least that good.
    let at_promised = greedy_cover(points, spec.zeta)?;
    println!();
    println!(
        "promised ({}, {}), certified ({}, {})",
        spec.eta, spec.zeta, at_promised.eta, at_promised.zeta
    );

    let separated = greedy_packing(points, 2 * spec.zeta + 1)?;
    println!(
        "any cover at radius {} needs at least {} balls",
        spec.zeta,
        separated.len()
    );

    let s = spread(&dist);
    println!();
    println!(
        "spread {:.6} at center {} ({})",
        s.value,
        dist.ids()[s.center_index],
        s.center
    );

    let xi = infer_xi(at_promised.eta, spec.d);
    let bound = approx_bound(spec.zeta, spec.d, xi, 1.0)?;
    println!();
    println!("cluster exponent xi = {xi:.4}");
    println!("a-priori greedy/exact bound at unit constant = {bound:.4}");
    Ok(())
}
