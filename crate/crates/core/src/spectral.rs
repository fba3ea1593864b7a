//! Dense eigendecomposition, kernel dimensions, the homology-rank oracle and
//! persistent Betti tables.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::complex::{enumerate_basis, FiltrationContext};
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;
use crate::operators::{
    boundary, persistent_laplacian, restricted_boundary_projected, DiracOperator, SparseOperator,
    Variant,
};

/// Largest matrix handed to the dense eigensolver.
pub const MAX_DENSE_DIM: usize = 4096;

/// Default clustering tolerance for eigenvalues.
pub const CLUSTER_TOL: f64 = 1e-9;

/// Default kernel tolerance, relative to the largest eigenvalue magnitude.
pub const KERNEL_TOL: f64 = 1e-8;

/// Anything that can be viewed as a dense real symmetric matrix.
pub trait SymmetricSource {
    fn dense(&self) -> DMatrix<f64>;
}

impl SymmetricSource for SparseOperator {
    fn dense(&self) -> DMatrix<f64> {
        self.to_dense()
    }
}

impl SymmetricSource for DiracOperator {
    fn dense(&self) -> DMatrix<f64> {
        self.to_dense()
    }
}

impl SymmetricSource for DMatrix<f64> {
    fn dense(&self) -> DMatrix<f64> {
        self.clone()
    }
}

/// Eigenvalues clustered at `tol`, ascending, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub multiplicities: Vec<usize>,
    pub tol: f64,
}

impl Spectrum {
    /// Cluster sorted raw eigenvalues; each cluster is reported by its mean.
    pub fn from_raw(mut raw: Vec<f64>, tol: f64) -> Self {
        raw.sort_by(f64::total_cmp);
        let mut groups: Vec<Vec<f64>> = Vec::new();
        for v in raw {
            match groups.last_mut() {
                Some(g) if v - g[g.len() - 1] <= tol => g.push(v),
                _ => groups.push(vec![v]),
            }
        }
        let eigenvalues = groups.iter().map(|g| g.iter().sum::<f64>() / g.len() as f64).collect();
        let multiplicities = groups.iter().map(Vec::len).collect();
        Self {
            eigenvalues,
            multiplicities,
            tol,
        }
    }

    pub fn dim(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Multiplicity of the cluster within `tol` of `value`, zero if none.
    pub fn multiplicity_of(&self, value: f64, tol: f64) -> usize {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .filter(|(e, _)| (*e - value).abs() <= tol)
            .map(|(_, m)| m)
            .sum()
    }

    /// Eigenvalues repeated by multiplicity.
    pub fn expanded(&self) -> Vec<f64> {
        self.eigenvalues
            .iter()
            .zip(&self.multiplicities)
            .flat_map(|(&e, &m)| std::iter::repeat_n(e, m))
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, usize)> + '_ {
        self.eigenvalues.iter().copied().zip(self.multiplicities.iter().copied())
    }
}

fn max_asymmetry(m: &DMatrix<f64>) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..m.nrows() {
        for j in (i + 1)..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst
}

/// Raw ascending eigenvalues of a symmetric matrix.
pub fn symmetric_eigenvalues(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    if m.nrows() != m.ncols() {
        return Err(Error::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    if m.nrows() > MAX_DENSE_DIM {
        return Err(Error::TooLarge {
            dim: m.nrows(),
            cap: MAX_DENSE_DIM,
        });
    }
    let asym = max_asymmetry(m);
    let scale = m.amax().max(1.0);
    if asym > 1e-12 * scale {
        return Err(Error::NotSymmetric(asym));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let mut ev: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

pub fn spectrum(op: &impl SymmetricSource, tol: f64) -> Result<Spectrum> {
    Ok(Spectrum::from_raw(symmetric_eigenvalues(&op.dense())?, tol))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelMode {
    /// Count eigenvalues below `tol * max(1, |lambda|_max)`.
    Float(f64),
    ExactRational,
}

impl Default for KernelMode {
    fn default() -> Self {
        KernelMode::Float(KERNEL_TOL)
    }
}

pub fn kernel_dimension(op: &SparseOperator, mode: KernelMode) -> Result<usize> {
    if op.nrows() != op.ncols() {
        return Err(Error::NotSquare {
            rows: op.nrows(),
            cols: op.ncols(),
        });
    }
    match mode {
        KernelMode::Float(tol) => {
            let ev = symmetric_eigenvalues(&op.to_dense())?;
            let scale = ev.iter().fold(1.0f64, |a, v| a.max(v.abs()));
            Ok(ev.iter().filter(|v| v.abs() < tol * scale).count())
        }
        KernelMode::ExactRational => {
            let m = op
                .to_rational()
                .ok_or_else(|| Error::InvalidParameter("non-finite matrix entry".into()))?;
            Ok(kernel_dimension_exact(&m))
        }
    }
}

pub fn kernel_dimension_exact(m: &RationalMatrix) -> usize {
    m.cols() - m.rank()
}

fn rational(op: &SparseOperator) -> RationalMatrix {
    op.to_rational().expect("boundary entries are finite")
}

/// Persistent Betti number straight from the definition
/// `dim Z_k^eps - dim(B_k^eps' ∩ Z_k^eps)`, with exact ranks.
///
/// `B_k^eps'` is first intersected with the coordinate subspace `C_k(S^eps)`:
/// those are the images of `(k+1)`-chains of `S^eps'` whose boundary has no
/// component on a `k`-simplex outside `S^eps`. The intersection with the
/// cycles then follows from `dim(A∩B) = dim A + dim B - dim(A+B)`.
pub fn betti_homology_oracle(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
) -> Result<usize> {
    if eps > eps_prime || eps.is_nan() || eps_prime.is_nan() {
        return Err(Error::ScaleOrder { eps, eps_prime });
    }
    let cycles = rational(&restricted_boundary_projected(k, eps, eps, ctx)?).null_space();

    let small = enumerate_basis(k, eps, ctx);
    let big = enumerate_basis(k, eps_prime, ctx);
    let cofaces = enumerate_basis(k + 1, eps_prime, ctx);
    let d = rational(&boundary(k + 1, &big, &cofaces)?);
    let forbidden: Vec<usize> = (0..big.len()).filter(|&i| !small.contains(big.mask(i))).collect();
    let allowed: Vec<usize> = (0..big.len()).filter(|&i| small.contains(big.mask(i))).collect();
    let admissible = d.select_rows(&forbidden).null_space();
    // generators of B_k^eps' ∩ C_k(S^eps), in S_k^eps coordinates
    let boundaries = d.select_rows(&allowed).mul(&admissible);

    let dim_cycles = cycles.cols();
    let dim_boundaries = boundaries.rank();
    let dim_sum = cycles.hcat(&boundaries).rank();
    let dim_intersection = dim_cycles + dim_boundaries - dim_sum;
    Ok(dim_cycles - dim_intersection)
}

/// Persistent Betti numbers `beta_k^{eps_i, eps_j}` for `k <= k_max` and all
/// `i <= j`. Scale indices are zero-based positions in `scales`.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiTable {
    pub scales: Vec<f64>,
    pub k_max: isize,
    pub variant: Variant,
    entries: BTreeMap<(isize, usize, usize), usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BettiTableJson {
    pub k: isize,
    pub scales: Vec<f64>,
    /// Keys are `"i,j"` with one-based scale positions, matching `eps_1, eps_2, ...`.
    pub betti: BTreeMap<String, usize>,
}

impl BettiTable {
    pub fn get(&self, k: isize, i: usize, j: usize) -> Option<usize> {
        self.entries.get(&(k, i, j)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = ((isize, usize, usize), usize)> + '_ {
        self.entries.iter().map(|(&key, &v)| (key, v))
    }

    pub fn to_json(&self, k: isize) -> BettiTableJson {
        let betti = self
            .entries
            .iter()
            .filter(|((kk, _, _), _)| *kk == k)
            .map(|(&(_, i, j), &v)| (format!("{},{}", i + 1, j + 1), v))
            .collect();
        BettiTableJson {
            k,
            scales: self.scales.clone(),
            betti,
        }
    }

    pub fn to_json_string(&self, k: isize) -> Result<String> {
        Ok(serde_json::to_string(&self.to_json(k))?)
    }
}

pub fn betti_table(
    ctx: &FiltrationContext,
    k_max: isize,
    scales: &[f64],
    variant: Variant,
) -> Result<BettiTable> {
    if scales.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidParameter("scales must be sorted ascending".into()));
    }
    let mut entries = BTreeMap::new();
    for k in 0..=k_max {
        for i in 0..scales.len() {
            for j in i..scales.len() {
                let lap = persistent_laplacian(k, scales[i], scales[j], ctx, variant)?;
                entries.insert((k, i, j), kernel_dimension(&lap, KernelMode::default())?);
            }
        }
    }
    Ok(BettiTable {
        scales: scales.to_vec(),
        k_max,
        variant,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{two_squares, PointCloud};
    use crate::operators::{persistent_dirac, persistent_laplacian_exact};

    const E1: f64 = 1.2;
    const E2: f64 = 1.8;

    fn ctx() -> FiltrationContext {
        FiltrationContext::new(two_squares())
    }

    #[test]
    fn identity_single_cluster() {
        let s = spectrum(&DMatrix::<f64>::identity(3, 3), CLUSTER_TOL).unwrap();
        assert_eq!(s.eigenvalues, vec![1.0]);
        assert_eq!(s.multiplicities, vec![3]);
    }

    #[test]
    fn rejects_asymmetric_and_rectangular() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(spectrum(&m, 1e-9), Err(Error::NotSymmetric(_))));
        let r = DMatrix::<f64>::zeros(2, 3);
        assert!(matches!(spectrum(&r, 1e-9), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn dirac_spectrum_small_square() {
        let b = persistent_dirac(1, E1, E1, 1.0, &ctx(), Variant::Projected, true).unwrap();
        let s = spectrum(&b, CLUSTER_TOL).unwrap();
        let (r3, r5) = (3f64.sqrt(), 5f64.sqrt());
        let want = [(-r5, 1), (-r3, 2), (-1.0, 1), (1.0, 1), (r3, 2), (r5, 1)];
        assert_eq!(s.eigenvalues.len(), want.len());
        for ((e, m), (we, wm)) in s.iter().zip(want) {
            assert!((e - we).abs() < 1e-10);
            assert_eq!(m, wm);
        }
    }

    #[test]
    fn dirac_spectrum_persistent_pair() {
        let b = persistent_dirac(1, E1, E2, 1.0, &ctx(), Variant::Projected, true).unwrap();
        let s = spectrum(&b, CLUSTER_TOL).unwrap();
        let r5 = 5f64.sqrt();
        assert_eq!(s.multiplicities, vec![4, 4, 4]);
        for (e, w) in s.eigenvalues.iter().zip([-r5, -1.0, r5]) {
            assert!((e - w).abs() < 1e-10);
        }
    }

    #[test]
    fn kernel_dimensions() {
        let c = ctx();
        let zero = SparseOperator::from_triplets(
            crate::operators::Axis::Chains { k: 0, dim: 5 },
            crate::operators::Axis::Chains { k: 0, dim: 5 },
            vec![],
        );
        assert_eq!(kernel_dimension(&zero, KernelMode::default()).unwrap(), 5);
        assert_eq!(kernel_dimension(&zero, KernelMode::ExactRational).unwrap(), 5);
        let l22 = persistent_laplacian(1, E2, E2, &c, Variant::ChainRestricted).unwrap();
        assert_eq!(kernel_dimension(&l22, KernelMode::default()).unwrap(), 1);
        for v in [Variant::Projected, Variant::ChainRestricted] {
            let l12 = persistent_laplacian(1, E1, E2, &c, v).unwrap();
            assert_eq!(kernel_dimension(&l12, KernelMode::default()).unwrap(), 0);
        }
        let rect = restricted_boundary_projected(1, E1, E1, &c).unwrap();
        assert!(matches!(
            kernel_dimension(&rect, KernelMode::default()),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn float_and_exact_kernels_agree() {
        let c = ctx();
        for v in [Variant::Projected, Variant::ChainRestricted] {
            for (a, b) in [(E1, E1), (E1, E2), (E2, E2), (1.0, 3.0)] {
                for k in 0..3 {
                    let f = persistent_laplacian(k, a, b, &c, v).unwrap();
                    let e = persistent_laplacian_exact(k, a, b, &c, v).unwrap();
                    assert_eq!(
                        kernel_dimension(&f, KernelMode::default()).unwrap(),
                        kernel_dimension_exact(&e)
                    );
                }
            }
        }
    }

    #[test]
    fn oracle_two_squares() {
        let c = ctx();
        assert_eq!(betti_homology_oracle(1, E1, E1, &c).unwrap(), 1);
        assert_eq!(betti_homology_oracle(1, E2, E2, &c).unwrap(), 1);
        assert_eq!(betti_homology_oracle(1, E1, E2, &c).unwrap(), 0);
        assert_eq!(betti_homology_oracle(0, E1, E1, &c).unwrap(), 5);
        assert_eq!(betti_homology_oracle(0, E1, E2, &c).unwrap(), 2);
        assert!(matches!(
            betti_homology_oracle(1, E2, E1, &c),
            Err(Error::ScaleOrder { .. })
        ));
    }

    #[test]
    fn oracle_isolated_points() {
        let pts = (0..5).map(|i| vec![10.0 * i as f64]).collect();
        let c = FiltrationContext::new(PointCloud::new(pts).unwrap());
        assert_eq!(betti_homology_oracle(0, 1.0, 1.0, &c).unwrap(), 5);
    }

    #[test]
    fn two_squares_table() {
        let t = betti_table(&ctx(), 1, &[E1, E2], Variant::ChainRestricted).unwrap();
        assert_eq!(t.get(1, 0, 0), Some(1));
        assert_eq!(t.get(1, 1, 1), Some(1));
        assert_eq!(t.get(1, 0, 1), Some(0));
        assert_eq!(t.get(1, 1, 0), None);
        assert_eq!(
            t.to_json_string(1).unwrap(),
            r#"{"k":1,"scales":[1.2,1.8],"betti":{"1,1":1,"1,2":0,"2,2":1}}"#
        );
        let empty = betti_table(&ctx(), 2, &[], Variant::ChainRestricted).unwrap();
        assert!(empty.is_empty());
        assert!(betti_table(&ctx(), 1, &[E2, E1], Variant::Projected).is_err());
    }
}
