//! Persistent Betti numbers of point clouds, computed two ways.
//!
//! The classical path builds Vietoris–Rips bases as bitmask simplices,
//! assembles persistent combinatorial Laplacians and reads Betti numbers off
//! their kernels. The quantum path assembles the persistent Dirac operator,
//! whose square contains the Laplacian shifted by `xi^2`, and simulates the
//! phase-estimation circuit on an exact statevector; the multiplicity of the
//! eigenvalue `+xi` is recovered from the peak height at `p = l * xi`.
//!
//! ```
//! use qpersist::prelude::*;
//!
//! let ctx = FiltrationContext::new(two_squares());
//! let lap = persistent_laplacian(1, 1.2, 1.8, &ctx, Variant::ChainRestricted).unwrap();
//! assert_eq!(kernel_dimension(&lap, KernelMode::Float(1e-8)).unwrap(), 0);
//!
//! let dirac = persistent_dirac(1, 1.2, 1.2, 1.0, &ctx, Variant::Projected, true).unwrap();
//! let dist = phase_estimation(&dirac, 3, 16, Evolution::Exact).unwrap();
//! assert_eq!(betti_from_distribution(&dist).unwrap().betti, 1);
//! ```

pub mod cli;
pub mod complex;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod operators;
pub mod qsim;
pub mod spectral;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::complex::{
        critical_scales, enumerate_basis, simplex_diameter, vr_membership, FiltrationContext,
        SimplexBasis, SimplexMask,
    };
    pub use crate::error::{Error, Result};
    pub use crate::geometry::{distance_matrix, two_squares, DistanceMatrix, Metric, PointCloud};
    pub use crate::operators::{
        boundary, chain_restricted_boundary, dirac_square_check, persistent_dirac,
        persistent_laplacian, projector, restricted_boundary_projected, DiracOperator,
        SparseOperator, Variant,
    };
    pub use crate::qsim::{
        betti_from_distribution, exact_exponential, grover_project, phase_estimation,
        sample_counts, trotter_exponential, uniform_projected_state, Evolution,
        PhaseDistribution, StateVector,
    };
    pub use crate::spectral::{
        betti_homology_oracle, betti_table, kernel_dimension, spectrum, BettiTable, KernelMode,
        Spectrum,
    };
}
