//! Time evolution under a Dirac operator: exact exponentials by
//! eigendecomposition, and the SWAP-operator construction that reaches
//! `e^{-i t B / N}` through repeated short interactions with a fresh copy of
//! the uniform state.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{SymmetricSource, MAX_DENSE_DIM};

pub type DensityMatrix = DMatrix<Complex64>;

/// Largest Dirac dimension accepted by the SWAP construction.
pub const MAX_TROTTER_DIM: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `e^{i t B}` for a real symmetric `B`.
pub fn exact_exponential(b: &impl SymmetricSource, t: f64) -> Result<DMatrix<Complex64>> {
    let m = b.dense();
    let n = m.nrows();
    if n > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            dim: n,
            cap: MAX_DENSE_DIM,
        });
    }
    if n == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    let eig = m.symmetric_eigen();
    let v = eig.eigenvectors.map(|x| Complex64::new(x, 0.0));
    let phases = DMatrix::from_diagonal(
        &eig.eigenvalues
            .map(|lambda| Complex64::from_polar(1.0, t * lambda)),
    );
    Ok(&v * phases * v.transpose())
}

/// Repeated SWAP-operator evolution approximating `e^{-i t B / N}`.
///
/// One step couples the system to an ancilla prepared in the uniform state
/// `|s>` through `e^{-i dt S}`, `S = sum_{x,y} B(x,y) |y><x| ⊗ |x><y|`
/// (ancilla first), and traces the ancilla out. `S` maps `|a>|b>` to
/// `B(a,b) |b>|a>`, so it is one-sparse and its exponential acts on the
/// two-dimensional spans `{|a,b>, |b,a>}`. The step is evaluated through its
/// Kraus operators `K_a = <a| e^{-i dt S} |s>`.
#[derive(Debug, Clone)]
pub struct SwapEvolution {
    b: DMatrix<f64>,
    time: f64,
    dt: f64,
    steps: usize,
}

pub fn trotter_exponential(b: &impl SymmetricSource, t: f64, steps: usize) -> Result<SwapEvolution> {
    if steps == 0 {
        return Err(Error::InvalidParameter("steps must be >= 1".into()));
    }
    let b = b.dense();
    if b.nrows() > MAX_TROTTER_DIM {
        return Err(Error::TooLarge {
            dim: b.nrows(),
            cap: MAX_TROTTER_DIM,
        });
    }
    if b.nrows() == 0 {
        return Err(Error::EmptyBasis);
    }
    Ok(SwapEvolution {
        b,
        time: t,
        dt: t / steps as f64,
        steps,
    })
}

impl SwapEvolution {
    pub fn dim(&self) -> usize {
        self.b.nrows()
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `e^{-i t B / N}`, the evolution this construction approximates.
    pub fn target_unitary(&self) -> DMatrix<Complex64> {
        exact_exponential(&self.b, -self.time / self.dim() as f64).expect("dimension checked")
    }

    /// Column `a` of `K_a / s_a` apart from the diagonal:
    /// `e^{-i dt B_aa} e_a - i sum_{x != a} sin(dt B_xa) e_x`.
    fn kraus_column(&self, a: usize) -> Vec<Complex64> {
        (0..self.dim())
            .map(|x| {
                if x == a {
                    Complex64::from_polar(1.0, -self.dt * self.b[(a, a)])
                } else {
                    Complex64::new(0.0, -(self.dt * self.b[(x, a)]).sin())
                }
            })
            .collect()
    }

    /// Diagonal of `K_a / s_a` away from column `a`: `cos(dt B_ab)`, zero at `a`.
    fn kraus_diagonal(&self, a: usize) -> Vec<f64> {
        (0..self.dim())
            .map(|b| if b == a { 0.0 } else { (self.dt * self.b[(a, b)]).cos() })
            .collect()
    }

    /// One SWAP interaction followed by the partial trace over the ancilla.
    pub fn step(&self, rho: &DensityMatrix) -> DensityMatrix {
        let n = self.dim();
        let weight = 1.0 / n as f64;
        let mut out = DMatrix::from_element(n, n, ZERO);
        for a in 0..n {
            let d = self.kraus_diagonal(a);
            let u = self.kraus_column(a);
            let raa = rho[(a, a)];
            for j in 0..n {
                let uj = u[j].conj();
                let raj = rho[(a, j)];
                for i in 0..n {
                    let mut v = rho[(i, j)] * (d[i] * d[j]);
                    v += rho[(i, a)] * uj * d[i];
                    v += u[i] * raj * d[j];
                    v += u[i] * uj * raa;
                    out[(i, j)] += v * weight;
                }
            }
        }
        out
    }

    /// Re-projection onto the composite subspace. Every operator here lives
    /// on that subspace already, so only the trace is renormalised.
    fn reproject(rho: &mut DensityMatrix) {
        let tr: Complex64 = rho.trace();
        if tr.norm() > 0.0 {
            *rho /= tr;
        }
    }

    /// All `steps` interactions applied to a density matrix.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let mut r = rho.clone();
        for _ in 0..self.steps {
            r = self.step(&r);
            Self::reproject(&mut r);
        }
        r
    }

    pub fn apply_to_state(&self, psi: &[Complex64]) -> Result<DensityMatrix> {
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "state of length {} for a {}-dimensional operator",
                psi.len(),
                self.dim()
            )));
        }
        let v = DMatrix::from_column_slice(psi.len(), 1, psi);
        Ok(self.apply(&(&v * v.adjoint())))
    }

    /// `<s| e^{-i dt S} |s>` as an operator on the system: the action of one
    /// interaction on a coherence whose other branch leaves its ancilla
    /// untouched.
    pub fn coherence_step(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let weight = 1.0 / n as f64;
        let mut k = DMatrix::from_element(n, n, ZERO);
        for a in 0..n {
            let d = self.kraus_diagonal(a);
            let u = self.kraus_column(a);
            for b in 0..n {
                k[(b, b)] += d[b] * weight;
                k[(b, a)] += u[b] * weight;
            }
        }
        k
    }

    /// Matrix of one step acting on column-major `vec(rho)`.
    pub fn step_superoperator(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut sup = DMatrix::from_element(n * n, n * n, ZERO);
        let mut e = DMatrix::from_element(n, n, ZERO);
        for j in 0..n {
            for i in 0..n {
                e[(i, j)] = Complex64::new(1.0, 0.0);
                let img = self.step(&e);
                e[(i, j)] = ZERO;
                for (row, v) in img.iter().enumerate() {
                    sup[(row, i + j * n)] = *v;
                }
            }
        }
        sup
    }

    /// Matrix of the full evolution acting on `vec(rho)`.
    pub fn superoperator(&self) -> DMatrix<Complex64> {
        let step = self.step_superoperator();
        let mut result = DMatrix::identity(step.nrows(), step.ncols());
        let mut base = step;
        let mut e = self.steps;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Matrix of `rho -> U rho U^dagger` for the target unitary.
    pub fn target_superoperator(&self) -> DMatrix<Complex64> {
        let u = self.target_unitary();
        u.conjugate().kronecker(&u)
    }

    /// Spectral norm of the difference between the simulated and the exact
    /// superoperators.
    pub fn operator_error(&self) -> f64 {
        let diff = self.superoperator() - self.target_superoperator();
        diff.singular_values().max()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn small_b() -> DMatrix<f64> {
        DMatrix::from_row_slice(4, 4, &[
            -1.0, 1.0, 0.0, 0.0, //
            1.0, 1.0, -1.0, 0.0, //
            0.0, -1.0, 1.0, 1.0, //
            0.0, 0.0, 1.0, -1.0,
        ])
    }

    /// Dense reference: exponentiate `S` on the doubled space and trace the
    /// ancilla out explicitly.
    fn dilation_step(b: &DMatrix<f64>, dt: f64, rho: &DensityMatrix) -> DensityMatrix {
        let n = b.nrows();
        let mut s = DMatrix::<f64>::zeros(n * n, n * n);
        for x in 0..n {
            for y in 0..n {
                // |y><x| ⊗ |x><y| maps |x>|y> to |y>|x>
                s[(y * n + x, x * n + y)] += b[(x, y)];
            }
        }
        let u = exact_exponential(&s, -dt).unwrap();
        let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
        let anc = DMatrix::from_element(n, n, amp * amp);
        let big = &u * anc.kronecker(rho) * u.adjoint();
        let mut out = DMatrix::from_element(n, n, ZERO);
        for a in 0..n {
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += big[(a * n + i, a * n + j)];
                }
            }
        }
        out
    }

    #[test]
    fn kraus_step_matches_dilation() {
        let b = small_b();
        let evo = trotter_exponential(&b, 0.7, 1).unwrap();
        let mut rho = DMatrix::from_fn(4, 4, |i, j| Complex64::new((i + 2 * j) as f64, i as f64 - j as f64));
        rho = &rho * rho.adjoint();
        let tr = rho.trace();
        rho /= tr;
        let fast = evo.step(&rho);
        let slow = dilation_step(&b, 0.7, &rho);
        assert!((fast - slow).camax() < 1e-12);
    }

    #[test]
    fn exponential_basics() {
        let b = small_b();
        let id = exact_exponential(&b, 0.0).unwrap();
        assert!((id - DMatrix::identity(4, 4)).camax() < 1e-12);
        let d = DMatrix::from_row_slice(2, 2, &[-1.0, 0.0, 0.0, 1.0]);
        let u = exact_exponential(&d, PI).unwrap();
        assert!((u - DMatrix::<Complex64>::identity(2, 2) * Complex64::new(-1.0, 0.0)).camax() < 1e-12);
        let u = exact_exponential(&b, 1.3).unwrap();
        assert!((&u * u.adjoint() - DMatrix::identity(4, 4)).camax() < 1e-10);
    }

    #[test]
    fn zero_time_is_identity_channel() {
        let evo = trotter_exponential(&small_b(), 0.0, 3).unwrap();
        let sup = evo.superoperator();
        assert!((sup - DMatrix::identity(16, 16)).camax() < 1e-14);
    }

    #[test]
    fn channel_is_trace_preserving() {
        let evo = trotter_exponential(&small_b(), 2.0, 5).unwrap();
        let psi: Vec<Complex64> = (0..4).map(|i| Complex64::new(0.5, 0.1 * i as f64)).collect();
        let norm = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<Complex64> = psi.iter().map(|a| a / norm).collect();
        let rho = evo.apply_to_state(&psi).unwrap();
        assert!((rho.trace() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((&rho - rho.adjoint()).camax() < 1e-12);
    }

    #[test]
    fn converges_at_first_order_in_the_step() {
        // The per-step mismatch is O(dt^2); summed over t/dt steps the global
        // error is O(dt), so doubling the steps halves it.
        let b = small_b();
        let errors: Vec<f64> = [8, 16, 32, 64]
            .iter()
            .map(|&s| trotter_exponential(&b, 1.0, s).unwrap().operator_error())
            .collect();
        for w in errors.windows(2) {
            let ratio = w[0] / w[1];
            assert!((1.8..2.2).contains(&ratio), "{errors:?}");
        }
        assert!(errors[3] < 0.02, "{errors:?}");
    }

    #[test]
    fn rejects_bad_input() {
        assert!(trotter_exponential(&small_b(), 1.0, 0).is_err());
        let big = DMatrix::<f64>::identity(65, 65);
        assert!(matches!(trotter_exponential(&big, 1.0, 1), Err(Error::TooLarge { .. })));
    }
}
