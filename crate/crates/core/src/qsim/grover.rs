//! Amplitude amplification onto the image of a coordinate projector.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::state::{qubits_for, Register, StateVector};
use crate::error::{Error, Result};
use crate::operators::DiracOperator;

/// Number of Grover iterations for initial overlap angle `theta`.
pub fn grover_steps(theta: f64) -> usize {
    (PI / (4.0 * theta)).floor() as usize
}

/// Rotate `psi` towards the subspace spanned by the basis states accepted by
/// `oracle`, using `K = floor(pi / 4 theta)` applications of
/// `U_G = -(I - 2|psi><psi|)(I - 2P)`, where `sin theta = |P psi|`.
///
/// After `K` steps the overlap with the subspace is `sin((2K + 1) theta)`.
pub fn grover_project(
    psi: &StateVector,
    oracle: impl Fn(usize) -> bool,
) -> Result<(StateVector, usize)> {
    let sin_theta = psi.projected_norm(&oracle) / psi.norm_sqr().sqrt();
    if sin_theta == 0.0 {
        return Err(Error::NoMarkedStates);
    }
    let theta = sin_theta.min(1.0).asin();
    let steps = grover_steps(theta);
    let reference = psi.amplitudes().to_vec();
    let mut amps = reference.clone();
    for _ in 0..steps {
        for (i, a) in amps.iter_mut().enumerate() {
            if oracle(i) {
                *a = -*a;
            }
        }
        let overlap: Complex64 = reference.iter().zip(&amps).map(|(r, a)| r.conj() * a).sum();
        for (a, r) in amps.iter_mut().zip(&reference) {
            *a = 2.0 * overlap * r - *a;
        }
    }
    let out = StateVector::from_amplitudes(psi.layout().to_vec(), amps)?;
    Ok((out, steps))
}

/// The uniform superposition over the `N` composite basis states of `b`,
/// embedded in a register of `ceil(log2 N)` qubits.
///
/// Prepared as on hardware: Hadamards give the uniform state over `2^q`
/// values, amplitude amplification rotates it towards the first `N` values,
/// and postselection on the membership oracle removes the residue.
pub fn uniform_projected_state(b: &DiracOperator) -> Result<StateVector> {
    uniform_state(b.dim())
}

pub fn uniform_state(n: usize) -> Result<StateVector> {
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let mut s = StateVector::zero(vec![Register::new("system", qubits_for(n))]);
    s.hadamard_all(0);
    let (mut s, _) = grover_project(&s, |i| i < n)?;
    s.postselect(|i| i < n)?;
    Ok(s)
}
