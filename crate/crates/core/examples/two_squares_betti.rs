//! Persistent Betti numbers of the two-squares cloud, computed three ways.

use qpersist::operators::persistent_laplacian;
use qpersist::prelude::*;

fn main() -> qpersist::Result<()> {
    let ctx = FiltrationContext::new(two_squares());
    let pairs = [(1.2, 1.2), (1.8, 1.8), (1.2, 1.8)];

    println!("{:>12} {:>8} {:>10} {:>7}", "scales", "chain", "projected", "oracle");
    for (a, b) in pairs {
        let chain = persistent_laplacian(1, a, b, &ctx, Variant::ChainRestricted)?;
        let proj = persistent_laplacian(1, a, b, &ctx, Variant::Projected)?;
        println!(
            "{:>12} {:>8} {:>10} {:>7}",
            format!("({a}, {b})"),
            kernel_dimension(&chain, KernelMode::default())?,
            kernel_dimension(&proj, KernelMode::ExactRational)?,
            betti_homology_oracle(1, a, b, &ctx)?,
        );
    }

    let table = betti_table(&ctx, 1, &[1.2, 1.8], Variant::ChainRestricted)?;
    println!("{}", table.to_json_string(1)?);
    Ok(())
}
