//! Simulated phase estimation on the persistent Dirac operator, with the
//! Betti number read off the peak at `p = l * xi`.
//!
//! Usage: `cargo run --example phase_estimation -- [eps] [eps2] [M]`

use qpersist::prelude::*;

fn main() -> qpersist::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let eps = args.first().copied().unwrap_or(1.2);
    let eps2 = args.get(1).copied().unwrap_or(eps);
    let m = args.get(2).map_or(16, |&v| v as usize);
    let l = 3;

    let ctx = FiltrationContext::new(two_squares());
    let dirac = persistent_dirac(1, eps, eps2, 1.0, &ctx, Variant::Projected, true)?;
    let dist = phase_estimation(&dirac, l, m, Evolution::Exact)?;

    for (p, prob) in dist.probs.iter().enumerate() {
        let bar = "#".repeat((prob * 200.0).round() as usize);
        println!("{p:>4} {prob:.5} {bar}");
    }
    let est = betti_from_distribution(&dist)?;
    println!(
        "N = {}, N*P({l}) = {:.4}, beta = {}, leakage = {:+.4}",
        dist.hilbert_dim, est.unrounded, est.betti, est.leakage
    );

    let counts = sample_counts(&dist, 1000, 7)?;
    println!("1000 shots, seed 7: {} hits at p = {l}", counts[l]);
    Ok(())
}
