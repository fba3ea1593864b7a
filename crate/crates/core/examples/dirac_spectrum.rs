//! Spectra of the persistent Dirac operator on the two-squares cloud.
//!
//! Each `+xi` eigenvalue is a persistent loop; the other eigenvalues come in
//! pairs `±sqrt(gamma + xi^2)` over the nonzero Laplacian eigenvalues `gamma`.

use qpersist::prelude::*;

fn main() -> qpersist::Result<()> {
    let ctx = FiltrationContext::new(two_squares());
    let xi = 1.0;
    for (a, b, drop) in [(1.2, 1.2, true), (1.2, 1.2, false), (1.8, 1.8, true), (1.2, 1.8, true)] {
        let dirac = persistent_dirac(1, a, b, xi, &ctx, Variant::Projected, drop)?;
        let [lower, middle, upper] = dirac.block_sizes();
        println!("scales ({a}, {b}), drop_isolated = {drop}: N = {} ({lower} + {middle} + {upper})", dirac.dim());
        for (value, mult) in spectrum(&dirac, 1e-9)?.iter() {
            println!("  {value:>+9.5} x{mult}");
        }
    }
    Ok(())
}
