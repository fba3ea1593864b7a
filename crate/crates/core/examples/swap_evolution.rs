//! Simulating `e^{-itB/N}` by repeated interaction with ancilla copies of the
//! uniform state through the weighted SWAP `S|a,b> = B(a,b)|b,a>`.

use qpersist::prelude::*;

fn main() -> qpersist::Result<()> {
    let ctx = FiltrationContext::new(two_squares());
    let dirac = persistent_dirac(1, 1.2, 1.2, 1.0, &ctx, Variant::Projected, true)?;

    let t = 2.0;
    let mut previous = None;
    println!("{:>6} {:>12} {:>7}", "steps", "error", "ratio");
    for steps in [4, 8, 16, 32, 64, 128] {
        let err = trotter_exponential(&dirac, t, steps)?.operator_error();
        let ratio = previous.map_or(String::new(), |p: f64| format!("{:.3}", p / err));
        println!("{steps:>6} {err:>12.3e} {ratio:>7}");
        previous = Some(err);
    }

    let exact = phase_estimation(&dirac, 3, 16, Evolution::Exact)?;
    let approx = phase_estimation(&dirac, 3, 16, Evolution::Trotter { steps: 4000 })?;
    println!("P(3): exact {:.5}, SWAP evolution {:.5}", exact.probs[3], approx.probs[3]);
    Ok(())
}
