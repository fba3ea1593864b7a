//! Exact statevector simulation of the persistent-Dirac algorithm.

pub mod evolution;
pub mod grover;
pub mod qpe;
pub mod state;

pub use evolution::{exact_exponential, trotter_exponential, DensityMatrix, SwapEvolution};
pub use grover::{grover_project, grover_steps, uniform_projected_state, uniform_state};
pub use qpe::{
    analytic_distribution, analytic_leakage, betti_from_distribution, peak_weight,
    phase_estimation, sample_counts, simulation_cap, BettiEstimate, Evolution, PhaseDistribution,
};
pub use state::{Register, StateVector};
