//! Boundary operators, projectors, restricted boundaries, persistent
//! Laplacians and persistent Dirac operators over explicit simplex bases.
//!
//! Two restrictions of the upper boundary are supported. [`Variant::Projected`]
//! sandwiches `d_{k+1}` between coordinate projectors, `P_k^eps d P_{k+1}^eps'`,
//! which is what the quantum circuit applies. [`Variant::ChainRestricted`]
//! restricts `d_{k+1}` to the chains of `S^eps'` whose boundary lies in
//! `C_k(S^eps)`; its Laplacian kernel is the persistent Betti number.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::complex::{enumerate_basis, FiltrationContext, SimplexBasis};
use crate::error::{Error, Result};
use crate::exact::RationalMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    Projected,
    #[serde(rename = "chain")]
    ChainRestricted,
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "projected" => Ok(Variant::Projected),
            "chain" | "chain-restricted" => Ok(Variant::ChainRestricted),
            other => Err(Error::InvalidParameter(format!("unknown variant {other:?}"))),
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Projected => "projected",
            Variant::ChainRestricted => "chain",
        })
    }
}

/// Qutrit label of a Dirac block: `-1` for `(k-1)`-simplices, `0` for
/// `k`-simplices, `+1` for the `(k+1)` block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Block {
    Lower,
    Middle,
    Upper,
}

impl Block {
    pub fn qutrit(self) -> i8 {
        match self {
            Block::Lower => -1,
            Block::Middle => 0,
            Block::Upper => 1,
        }
    }

    /// Diagonal sign: `-xi, +xi, -xi`.
    pub fn diagonal_sign(self) -> f64 {
        match self {
            Block::Middle => 1.0,
            _ => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CompositeLabel {
    pub block: Block,
    pub index: usize,
}

/// Index set of one side of an operator.
#[derive(Debug, Clone, PartialEq)]
pub enum Axis {
    Simplices(Arc<SimplexBasis>),
    /// Orthonormal basis of a chain subspace, `dim` vectors of degree `k`.
    Chains { k: isize, dim: usize },
    Composite(Vec<CompositeLabel>),
}

impl Axis {
    pub fn len(&self) -> usize {
        match self {
            Axis::Simplices(b) => b.len(),
            Axis::Chains { dim, .. } => *dim,
            Axis::Composite(labels) => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn describe(&self) -> String {
        match self {
            Axis::Simplices(b) => format!("S_{}^{} ({} simplices)", b.k(), b.epsilon(), b.len()),
            Axis::Chains { k, dim } => format!("Z_{k} ({dim} orthonormal chains)"),
            Axis::Composite(l) => format!("composite ({} states)", l.len()),
        }
    }
}

/// Real sparse matrix in coordinate form between two indexed bases. Entries
/// are unique per position and nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOperator {
    rows: Axis,
    cols: Axis,
    entries: Vec<(usize, usize, f64)>,
}

impl SparseOperator {
    /// Build from triplets; duplicates are summed and zeros dropped.
    pub fn from_triplets(rows: Axis, cols: Axis, mut triplets: Vec<(usize, usize, f64)>) -> Self {
        debug_assert!(triplets.iter().all(|&(r, c, _)| r < rows.len() && c < cols.len()));
        triplets.sort_by_key(|&(r, c, _)| (r, c));
        let mut entries: Vec<(usize, usize, f64)> = Vec::with_capacity(triplets.len());
        for (r, c, v) in triplets {
            match entries.last_mut() {
                Some(last) if last.0 == r && last.1 == c => last.2 += v,
                _ => entries.push((r, c, v)),
            }
        }
        entries.retain(|e| e.2 != 0.0);
        Self { rows, cols, entries }
    }

    pub fn from_dense(rows: Axis, cols: Axis, m: &DMatrix<f64>) -> Self {
        assert_eq!((m.nrows(), m.ncols()), (rows.len(), cols.len()));
        let mut entries = Vec::new();
        for r in 0..m.nrows() {
            for c in 0..m.ncols() {
                let v = m[(r, c)];
                if v != 0.0 {
                    entries.push((r, c, v));
                }
            }
        }
        Self { rows, cols, entries }
    }

    pub fn rows(&self) -> &Axis {
        &self.rows
    }

    pub fn cols(&self) -> &Axis {
        &self.cols
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.cols.len()
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.nrows(), self.ncols());
        for &(r, c, v) in &self.entries {
            m[(r, c)] = v;
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let t = self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.cols.clone(), self.rows.clone(), t)
    }

    /// Exact rational copy; `None` if an entry is not finite.
    pub fn to_rational(&self) -> Option<RationalMatrix> {
        let mut m = RationalMatrix::zeros(self.nrows(), self.ncols());
        for &(r, c, v) in &self.entries {
            m.set(r, c, BigRational::from_float(v)?);
        }
        Some(m)
    }

    /// Coordinate-list text: two header lines naming the bases, then one
    /// `row col value` line per entry.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# rows: {}\n# cols: {}\n",
            self.rows.describe(),
            self.cols.describe()
        );
        for &(r, c, v) in &self.entries {
            out.push_str(&format!("{r} {c} {v}\n"));
        }
        out
    }
}

/// `d_k` from `cols` (k-simplices) to `rows` ((k-1)-simplices). Faces absent
/// from `rows` are dropped, which is exactly the projection onto `rows`.
pub fn boundary(k: isize, rows: &Arc<SimplexBasis>, cols: &Arc<SimplexBasis>) -> Result<SparseOperator> {
    if rows.k() != k - 1 || cols.k() != k {
        return Err(Error::DimensionMismatch(format!(
            "boundary of degree {k} needs bases of degree {} and {k}, got {} and {}",
            k - 1,
            rows.k(),
            cols.k()
        )));
    }
    let mut triplets = Vec::new();
    for (c, &sigma) in cols.masks().iter().enumerate() {
        if k == 0 {
            break;
        }
        for (face, sign) in sigma.faces() {
            if let Some(r) = rows.index_of(face) {
                triplets.push((r, c, f64::from(sign)));
            }
        }
    }
    Ok(SparseOperator::from_triplets(
        Axis::Simplices(rows.clone()),
        Axis::Simplices(cols.clone()),
        triplets,
    ))
}

/// Diagonal 0/1 matrix on `full` selecting the members of `sub`.
pub fn projector(sub: &SimplexBasis, full: &Arc<SimplexBasis>) -> Result<SparseOperator> {
    if !sub.is_subset_of(full) {
        return Err(Error::NotASubset);
    }
    let triplets = sub
        .masks()
        .iter()
        .filter_map(|&m| full.index_of(m))
        .map(|i| (i, i, 1.0))
        .collect();
    Ok(SparseOperator::from_triplets(
        Axis::Simplices(full.clone()),
        Axis::Simplices(full.clone()),
        triplets,
    ))
}

fn check_scales(eps: f64, eps_prime: f64) -> Result<()> {
    if eps > eps_prime || eps.is_nan() || eps_prime.is_nan() {
        return Err(Error::ScaleOrder { eps, eps_prime });
    }
    Ok(())
}

/// `P_{k-1}^eps d_k P_k^eps'`, from `S_k^eps'` to `S_{k-1}^eps`.
pub fn restricted_boundary_projected(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
) -> Result<SparseOperator> {
    check_scales(eps, eps_prime)?;
    let rows = enumerate_basis(k - 1, eps, ctx);
    let cols = enumerate_basis(k, eps_prime, ctx);
    boundary(k, &rows, &cols)
}

/// The subspace `{x in C_k(S^eps') : d x in C_{k-1}(S^eps)}` and `d_k`
/// restricted to it.
#[derive(Debug, Clone)]
pub struct ChainRestriction {
    /// `S_k^eps'`, the ambient simplices of the subspace.
    pub source: Arc<SimplexBasis>,
    /// Exact basis of the subspace, one column per vector.
    pub exact_basis: RationalMatrix,
    /// Orthonormalised basis, `|S_k^eps'| x dim`.
    pub basis: DMatrix<f64>,
    /// `d_k` on the orthonormal basis, in coordinates of `S_{k-1}^eps`.
    pub op: SparseOperator,
}

impl ChainRestriction {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

fn rational_boundary(op: &SparseOperator) -> RationalMatrix {
    let mut m = RationalMatrix::zeros(op.nrows(), op.ncols());
    for &(r, c, v) in op.entries() {
        m.set(r, c, BigRational::from_integer(BigInt::from(v as i64)));
    }
    m
}

/// Modified Gram–Schmidt with one reorthogonalisation pass. The input
/// columns are linearly independent.
fn orthonormalize(m: &DMatrix<f64>) -> DMatrix<f64> {
    let mut q = m.clone();
    for j in 0..q.ncols() {
        for _ in 0..2 {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                q.column_mut(j).axpy(-proj, &qi, 1.0);
            }
        }
        let norm = q.column(j).norm();
        q.column_mut(j).scale_mut(1.0 / norm);
    }
    q
}

pub fn chain_restricted_boundary(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
) -> Result<ChainRestriction> {
    check_scales(eps, eps_prime)?;
    let source = enumerate_basis(k, eps_prime, ctx);
    let faces_prime = enumerate_basis(k - 1, eps_prime, ctx);
    let allowed = enumerate_basis(k - 1, eps, ctx);

    let full = rational_boundary(&boundary(k, &faces_prime, &source)?);
    let forbidden: Vec<usize> = faces_prime
        .masks()
        .iter()
        .enumerate()
        .filter(|(_, m)| !allowed.contains(**m))
        .map(|(i, _)| i)
        .collect();
    let exact_basis = full.select_rows(&forbidden).null_space();
    let dim = exact_basis.cols();
    let raw = DMatrix::from_row_slice(source.len(), dim, &exact_basis.to_f64());
    let basis = orthonormalize(&raw);

    let d_allowed = boundary(k, &allowed, &source)?.to_dense();
    let op = SparseOperator::from_dense(
        Axis::Simplices(allowed),
        Axis::Chains { k, dim },
        &(d_allowed * &basis),
    );
    Ok(ChainRestriction {
        source,
        exact_basis,
        basis,
        op,
    })
}

/// The restricted `d_{k+1}` feeding the up-Laplacian of degree `k`.
fn upper_boundary(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
    variant: Variant,
) -> Result<(SparseOperator, Option<ChainRestriction>)> {
    match variant {
        Variant::Projected => Ok((restricted_boundary_projected(k + 1, eps, eps_prime, ctx)?, None)),
        Variant::ChainRestricted => {
            let chain = chain_restricted_boundary(k + 1, eps, eps_prime, ctx)?;
            Ok((chain.op.clone(), Some(chain)))
        }
    }
}

/// Persistent combinatorial Laplacian on `S_k^eps`:
/// `D_k^T D_k + U U^T` with `D_k` the boundary of the `eps` complex and `U`
/// the chosen restriction of `d_{k+1}`.
pub fn persistent_laplacian(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
    variant: Variant,
) -> Result<SparseOperator> {
    check_scales(eps, eps_prime)?;
    let down = restricted_boundary_projected(k, eps, eps, ctx)?.to_dense();
    let (up, _) = upper_boundary(k, eps, eps_prime, ctx, variant)?;
    let up = up.to_dense();
    let lap = down.transpose() * &down + &up * up.transpose();
    let basis = enumerate_basis(k, eps, ctx);
    Ok(SparseOperator::from_dense(
        Axis::Simplices(basis.clone()),
        Axis::Simplices(basis),
        &lap,
    ))
}

/// The same Laplacian over the rationals. For the chain-restricted variant
/// the up term is `A N (N^T N)^{-1} N^T A^T` with `N` the exact subspace
/// basis, which equals `U U^T` for any orthonormal basis of the subspace.
pub fn persistent_laplacian_exact(
    k: isize,
    eps: f64,
    eps_prime: f64,
    ctx: &FiltrationContext,
    variant: Variant,
) -> Result<RationalMatrix> {
    check_scales(eps, eps_prime)?;
    let down = rational_boundary(&restricted_boundary_projected(k, eps, eps, ctx)?);
    let down_term = down.transpose().mul(&down);
    let up_term = match variant {
        Variant::Projected => {
            let up = rational_boundary(&restricted_boundary_projected(k + 1, eps, eps_prime, ctx)?);
            up.mul(&up.transpose())
        }
        Variant::ChainRestricted => {
            let chain = chain_restricted_boundary(k + 1, eps, eps_prime, ctx)?;
            let allowed = enumerate_basis(k, eps, ctx);
            let a = rational_boundary(&boundary(k + 1, &allowed, &chain.source)?);
            let n = &chain.exact_basis;
            let gram_inv = n
                .transpose()
                .mul(n)
                .inverse()
                .expect("null-space basis has full column rank");
            let an = a.mul(n);
            an.mul(&gram_inv).mul(&an.transpose())
        }
    };
    Ok(down_term.add(&up_term))
}

/// Basis of the `+1` block.
#[derive(Debug, Clone)]
pub enum UpperBasis {
    Simplices(Arc<SimplexBasis>),
    Chains(ChainRestriction),
}

impl UpperBasis {
    pub fn len(&self) -> usize {
        match self {
            UpperBasis::Simplices(b) => b.len(),
            UpperBasis::Chains(c) => c.dim(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Persistent Dirac operator
///
/// ```text
///  [ -xi P_{k-1}   D_k         0       ]
///  [  D_k^T       +xi P_k      U       ]
///  [  0            U^T     -xi P_{k+1} ]
/// ```
///
/// with `D_k = P_{k-1}^eps d_k P_k^eps` and `U` the chosen restriction of
/// `d_{k+1}`. Its square has `L_k + xi^2` as the middle block, so the
/// multiplicity of the eigenvalue `+xi` is `dim ker L_k`.
#[derive(Debug, Clone)]
pub struct DiracOperator {
    k: isize,
    eps: f64,
    eps_prime: f64,
    xi: f64,
    variant: Variant,
    drop_isolated: bool,
    lower: Arc<SimplexBasis>,
    middle: Arc<SimplexBasis>,
    upper: UpperBasis,
    d_lower: SparseOperator,
    d_upper: SparseOperator,
    labels: Vec<CompositeLabel>,
}

pub fn persistent_dirac(
    k: isize,
    eps: f64,
    eps_prime: f64,
    xi: f64,
    ctx: &FiltrationContext,
    variant: Variant,
    drop_isolated: bool,
) -> Result<DiracOperator> {
    check_scales(eps, eps_prime)?;
    if xi == 0.0 {
        return Err(Error::ZeroXi);
    }
    if !xi.is_finite() {
        return Err(Error::InvalidParameter(format!("xi must be finite, got {xi}")));
    }
    let d_lower = restricted_boundary_projected(k, eps, eps, ctx)?;
    let (d_upper, chain) = upper_boundary(k, eps, eps_prime, ctx, variant)?;
    let lower = enumerate_basis(k - 1, eps, ctx);
    let middle = enumerate_basis(k, eps, ctx);
    let upper = match chain {
        Some(c) => UpperBasis::Chains(c),
        None => UpperBasis::Simplices(enumerate_basis(k + 1, eps_prime, ctx)),
    };

    let mut lower_coupled = vec![false; lower.len()];
    for &(r, _, _) in d_lower.entries() {
        lower_coupled[r] = true;
    }
    let mut upper_coupled = vec![false; upper.len()];
    for &(_, c, _) in d_upper.entries() {
        upper_coupled[c] = true;
    }
    // Only the -xi blocks are pruned: an uncoupled state there is an
    // eigenvector with eigenvalue -xi, so the +xi eigenspace is untouched.
    let keep = |coupled: bool| coupled || !drop_isolated;
    let labels = (0..lower.len())
        .filter(|&i| keep(lower_coupled[i]))
        .map(|index| CompositeLabel { block: Block::Lower, index })
        .chain((0..middle.len()).map(|index| CompositeLabel { block: Block::Middle, index }))
        .chain(
            (0..upper.len())
                .filter(|&i| keep(upper_coupled[i]))
                .map(|index| CompositeLabel { block: Block::Upper, index }),
        )
        .collect();

    Ok(DiracOperator {
        k,
        eps,
        eps_prime,
        xi,
        variant,
        drop_isolated,
        lower,
        middle,
        upper,
        d_lower,
        d_upper,
        labels,
    })
}

impl DiracOperator {
    pub fn k(&self) -> isize {
        self.k
    }

    pub fn scales(&self) -> (f64, f64) {
        (self.eps, self.eps_prime)
    }

    pub fn xi(&self) -> f64 {
        self.xi
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn drop_isolated(&self) -> bool {
        self.drop_isolated
    }

    /// Number of composite basis states.
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[CompositeLabel] {
        &self.labels
    }

    pub fn lower_basis(&self) -> &Arc<SimplexBasis> {
        &self.lower
    }

    pub fn middle_basis(&self) -> &Arc<SimplexBasis> {
        &self.middle
    }

    pub fn upper_basis(&self) -> &UpperBasis {
        &self.upper
    }

    pub fn lower_boundary(&self) -> &SparseOperator {
        &self.d_lower
    }

    pub fn upper_boundary(&self) -> &SparseOperator {
        &self.d_upper
    }

    /// Sizes of the kept `(-1, 0, +1)` blocks.
    pub fn block_sizes(&self) -> [usize; 3] {
        let mut sizes = [0; 3];
        for l in &self.labels {
            sizes[(l.block.qutrit() + 1) as usize] += 1;
        }
        sizes
    }

    /// Positions of the middle block inside the composite basis.
    pub fn middle_range(&self) -> std::ops::Range<usize> {
        let [lo, mid, _] = self.block_sizes();
        lo..lo + mid
    }

    /// Nonzero entries in composite coordinates.
    pub fn to_sparse(&self) -> SparseOperator {
        let n = self.dim();
        let mut pos = [vec![usize::MAX; self.lower.len()], vec![usize::MAX; self.middle.len()], vec![
            usize::MAX;
            self.upper.len()
        ]];
        for (i, l) in self.labels.iter().enumerate() {
            pos[(l.block.qutrit() + 1) as usize][l.index] = i;
        }
        let mut t = Vec::with_capacity(n + 2 * (self.d_lower.nnz() + self.d_upper.nnz()));
        for (i, l) in self.labels.iter().enumerate() {
            t.push((i, i, self.xi * l.block.diagonal_sign()));
        }
        for &(r, c, v) in self.d_lower.entries() {
            let (a, b) = (pos[0][r], pos[1][c]);
            t.push((a, b, v));
            t.push((b, a, v));
        }
        for &(r, c, v) in self.d_upper.entries() {
            let (a, b) = (pos[1][r], pos[2][c]);
            t.push((a, b, v));
            t.push((b, a, v));
        }
        let axis = Axis::Composite(self.labels.clone());
        SparseOperator::from_triplets(axis.clone(), axis, t)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        self.to_sparse().to_dense()
    }

    /// Copy with the diagonal of the middle block negated; breaks the
    /// square identity. Used to exercise [`dirac_square_check`].
    pub fn with_flipped_middle_sign(&self) -> FlippedDirac<'_> {
        FlippedDirac(self)
    }
}

/// A Dirac operator whose middle diagonal carries `-xi` instead of `+xi`.
pub struct FlippedDirac<'a>(&'a DiracOperator);

impl FlippedDirac<'_> {
    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = self.0.to_dense();
        for i in self.0.middle_range() {
            m[(i, i)] = -m[(i, i)];
        }
        m
    }
}

/// Check the square of a Dirac matrix against `lap`: the middle diagonal
/// block of `B^2` must equal `lap + xi^2 I` and the middle off-diagonal
/// blocks of `B^2` must vanish, within `tol` in max-abs norm.
pub fn dirac_square_check(b: &DiracOperator, lap: &SparseOperator, tol: f64) -> Result<bool> {
    square_check_dense(&b.to_dense(), b.middle_range(), b.xi(), lap, tol)
}

pub fn square_check_dense(
    b: &DMatrix<f64>,
    middle: std::ops::Range<usize>,
    xi: f64,
    lap: &SparseOperator,
    tol: f64,
) -> Result<bool> {
    let m = middle.len();
    if lap.nrows() != m || lap.ncols() != m {
        return Err(Error::DimensionMismatch(format!(
            "Laplacian is {}x{}, Dirac middle block is {m}x{m}",
            lap.nrows(),
            lap.ncols()
        )));
    }
    if b.nrows() == 0 {
        return Ok(true);
    }
    let sq = b * b;
    let l = lap.to_dense();
    let mut worst = 0.0f64;
    for (a, i) in middle.clone().enumerate() {
        for j in 0..b.ncols() {
            let expected = if middle.contains(&j) {
                let c = j - middle.start;
                l[(a, c)] + if a == c { xi * xi } else { 0.0 }
            } else {
                0.0
            };
            worst = worst.max((sq[(i, j)] - expected).abs());
        }
    }
    Ok(worst <= tol)
}
