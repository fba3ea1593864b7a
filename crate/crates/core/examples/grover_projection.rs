//! Amplitude amplification from the uniform state over `2^q` values onto the
//! first `N` of them, as used to prepare the register for phase estimation.

use std::f64::consts::PI;

use qpersist::prelude::*;
use qpersist::qsim::{grover_steps, uniform_state, Register};

fn main() -> qpersist::Result<()> {
    for n in [5, 8, 12, 22, 40] {
        let s = uniform_state(n)?;
        println!("N = {n:>2}: {} qubits, amplitude {:.6} per state", s.layout()[0].qubits, s.amplitudes()[0].re);
    }

    // one marked state out of 64
    let q = 6;
    let mut psi = StateVector::zero(vec![Register::new("search", q)]);
    psi.hadamard_all(0);
    let theta = (1.0 / 64f64).sqrt().asin();
    let (out, k) = grover_project(&psi, |i| i == 42)?;
    println!(
        "64 states, 1 marked: K = {k} (floor(pi/4theta) = {}), success amplitude {:.6}, closed form {:.6}",
        (PI / (4.0 * theta)).floor(),
        out.amplitudes()[42].norm(),
        ((2 * grover_steps(theta) + 1) as f64 * theta).sin()
    );
    Ok(())
}
