//! Persistent Betti numbers over all pairs of critical scales of a cloud.
//!
//! Usage: `cargo run --example betti_sweep -- [points.csv] [k]`

use qpersist::geometry::{load_point_cloud, PointFormat};
use qpersist::prelude::*;

fn main() -> qpersist::Result<()> {
    let mut args = std::env::args().skip(1);
    let cloud = match args.next() {
        Some(path) => load_point_cloud(&path, PointFormat::from_path(path.as_ref()))?,
        None => two_squares(),
    };
    let k: isize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let ctx = FiltrationContext::new(cloud);
    let scales: Vec<f64> = ctx.critical_scales().iter().copied().take(8).collect();
    let table = betti_table(&ctx, k, &scales, Variant::ChainRestricted)?;

    print!("{:>8}", "");
    for s in &scales {
        print!("{s:>8.4}");
    }
    println!();
    for (i, a) in scales.iter().enumerate() {
        print!("{a:>8.4}");
        for j in 0..scales.len() {
            match table.get(k, i, j) {
                Some(b) => print!("{b:>8}"),
                None => print!("{:>8}", "."),
            }
        }
        println!();
    }
    Ok(())
}
