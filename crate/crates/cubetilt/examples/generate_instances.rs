//! Generate synthetic dataset pairs and write them in the exchange format.
//!
//! Two families are available. Clustered pairs concentrate both sides on a
//! few well-separated centers, the regime where greedy transport carries a
//! dimension-based guarantee. Hostile pairs sit on a path embedded into the
//! cube and force greedy into its worst cascading behavior.
//!
//! Run with `cargo run --example generate_instances`.

use cubetilt::generators::{gen_adversarial, gen_clustered, GenKind, GenSpec};
use cubetilt::hypercube::Dataset;
use cubetilt::Result;

fn preview(label: &str, ds: &Dataset) {
    println!("{label}: {} records in dimension {}", ds.records.len(), ds.dim);
    for r in ds.records.iter().take(3) {
        match r.weight {
            Some(w) => println!("  {}\t{}\t{w}", r.id, r.point),
            None => println!("  {}\t{}", r.id, r.point),
        }
    }
    if ds.records.len() > 3 {
        println!("  ... {} more", ds.records.len() - 3);
    }
}

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("cubetilt-instances");
    std::fs::create_dir_all(&dir).map_err(|e| cubetilt::Error::Io {
        path: dir.display().to_string(),
        source: e,
    })?;

    let spec = GenSpec {
        d: 64,
        n: 1_000,
        eta: 4,
        zeta: 2,
        seed: 13,
        kind: GenKind::Clustered { skew: 0.8 },
    };
    let clustered = gen_clustered(&spec)?;
    preview("clustered source", &clustered.source);
    preview("clustered target", &clustered.target);
    println!(
        "centers used: {}",
        clustered
            .centers
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );

    let (adv_source, adv_target) = gen_adversarial(3, 16)?;
    println!();
    preview("hostile source", &adv_source);
    preview("hostile target", &adv_target);

    for (name, ds) in [
        ("clustered_source.tsv", &clustered.source),
        ("clustered_target.tsv", &clustered.target),
        ("hostile_source.tsv", &adv_source),
        ("hostile_target.tsv", &adv_target),
    ] {
        let path = dir.join(name);
        ds.write(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
