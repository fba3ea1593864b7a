//! Bitmask simplices, the Vietoris–Rips membership test and enumeration of
//! the simplex bases `S_k^eps`.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{distance_matrix, DistanceMatrix, PointCloud};

/// A simplex stored as an `n`-bit word: bit `i` is set iff vertex `i` belongs
/// to the simplex. A `k`-simplex has `k + 1` set bits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SimplexMask(pub u64);

impl SimplexMask {
    pub fn from_vertices(vertices: &[usize]) -> Self {
        SimplexMask(vertices.iter().fold(0u64, |acc, &v| acc | (1 << v)))
    }

    #[inline]
    pub fn bits(self) -> u64 {
        self.0
    }

    #[inline]
    pub fn vertex_count(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Simplex dimension `k = popcount - 1`, or `None` for the empty mask.
    pub fn dim(self) -> Option<usize> {
        self.vertex_count().checked_sub(1)
    }

    pub fn contains(self, vertex: usize) -> bool {
        self.0 & (1 << vertex) != 0
    }

    /// Vertices in ascending order.
    pub fn vertices(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let v = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(v)
            }
        })
    }

    /// Codimension-one faces with their orientation sign. The face obtained
    /// by clearing the `l`-th set bit (ascending vertex order) carries
    /// `(-1)^l`.
    pub fn faces(self) -> impl Iterator<Item = (SimplexMask, i8)> {
        self.vertices().enumerate().map(move |(l, v)| {
            let sign = if l % 2 == 0 { 1 } else { -1 };
            (SimplexMask(self.0 & !(1 << v)), sign)
        })
    }
}

impl fmt::Display for SimplexMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in self.vertices() {
            if !first {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

/// Largest pairwise distance among the vertices of `mask`; zero for a vertex.
pub fn simplex_diameter(mask: SimplexMask, dmat: &DistanceMatrix) -> Result<f64> {
    if mask.0 == 0 {
        return Err(Error::EmptyMask);
    }
    let verts: Vec<usize> = mask.vertices().collect();
    let mut diam = 0.0f64;
    for (a, &i) in verts.iter().enumerate() {
        for &j in &verts[a + 1..] {
            diam = diam.max(dmat.get(i, j));
        }
    }
    Ok(diam)
}

/// Classical stand-in for the membership oracle: `diam(sigma) <= eps`.
pub fn vr_membership(mask: SimplexMask, epsilon: f64, dmat: &DistanceMatrix) -> bool {
    match simplex_diameter(mask, dmat) {
        Ok(d) => d <= epsilon,
        Err(_) => false,
    }
}

/// Sorted, deduplicated off-diagonal distances.
pub fn critical_scales(dmat: &DistanceMatrix) -> Vec<f64> {
    let n = dmat.len();
    let mut scales: Vec<f64> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .map(|(i, j)| dmat.get(i, j))
        .collect();
    scales.sort_by(f64::total_cmp);
    // merge rounding twins, keeping the larger so every merged edge is present
    scales.dedup_by(|later, earlier| {
        let close = (*later - *earlier).abs() <= 1e-12 * later.abs().max(1.0);
        if close {
            *earlier = *later;
        }
        close
    });
    scales
}

/// Point cloud, its distance matrix and the scales at which the filtration
/// changes.
#[derive(Debug, Clone)]
pub struct FiltrationContext {
    cloud: PointCloud,
    dmat: DistanceMatrix,
    critical_scales: Vec<f64>,
}

impl FiltrationContext {
    pub fn new(cloud: PointCloud) -> Self {
        let dmat = distance_matrix(&cloud);
        let critical_scales = critical_scales(&dmat);
        Self {
            cloud,
            dmat,
            critical_scales,
        }
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn dmat(&self) -> &DistanceMatrix {
        &self.dmat
    }

    pub fn n(&self) -> usize {
        self.cloud.len()
    }

    pub fn critical_scales(&self) -> &[f64] {
        &self.critical_scales
    }

    /// Neighbour bitmasks at scale `eps`.
    fn adjacency(&self, eps: f64) -> Vec<u64> {
        let n = self.n();
        (0..n)
            .map(|i| {
                (0..n)
                    .filter(|&j| j != i && self.dmat.get(i, j) <= eps)
                    .fold(0u64, |acc, j| acc | (1 << j))
            })
            .collect()
    }
}

/// The `k`-simplices of the Vietoris–Rips complex at scale `epsilon`, in
/// ascending mask order.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexBasis {
    k: isize,
    epsilon: f64,
    masks: Vec<SimplexMask>,
    index: HashMap<SimplexMask, usize>,
}

impl SimplexBasis {
    /// Build a basis from arbitrary masks; they are sorted and deduplicated.
    pub fn from_masks(k: isize, epsilon: f64, mut masks: Vec<SimplexMask>) -> Self {
        masks.sort();
        masks.dedup();
        let index = masks.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        Self {
            k,
            epsilon,
            masks,
            index,
        }
    }

    pub fn empty(k: isize, epsilon: f64) -> Self {
        Self::from_masks(k, epsilon, Vec::new())
    }

    pub fn k(&self) -> isize {
        self.k
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn masks(&self) -> &[SimplexMask] {
        &self.masks
    }

    pub fn mask(&self, i: usize) -> SimplexMask {
        self.masks[i]
    }

    pub fn index_of(&self, mask: SimplexMask) -> Option<usize> {
        self.index.get(&mask).copied()
    }

    pub fn contains(&self, mask: SimplexMask) -> bool {
        self.index.contains_key(&mask)
    }

    pub fn is_subset_of(&self, other: &SimplexBasis) -> bool {
        self.masks.iter().all(|&m| other.contains(m))
    }

    /// One simplex per line, vertices as sorted comma-separated indices.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for m in &self.masks {
            out.push_str(&m.to_string());
            out.push('\n');
        }
        out
    }
}

/// Gosper's hack: next larger word with the same popcount.
#[inline]
fn next_same_popcount(x: u64) -> Option<u64> {
    let c = x & x.wrapping_neg();
    let r = x.checked_add(c)?;
    Some((((r ^ x) >> 2) / c) | r)
}

/// All `k`-simplices of diameter at most `epsilon`. A simplex is in the
/// complex iff all of its edges are, so candidates are tested against the
/// neighbour masks at `epsilon`. Out-of-range `k` yields an empty basis.
pub fn enumerate_basis(k: isize, epsilon: f64, ctx: &FiltrationContext) -> Arc<SimplexBasis> {
    let n = ctx.n();
    if k < 0 || k as usize >= n {
        return Arc::new(SimplexBasis::empty(k, epsilon));
    }
    let size = k as usize + 1;
    if size == 1 {
        let masks = (0..n).map(|v| SimplexMask(1 << v)).collect();
        return Arc::new(SimplexBasis::from_masks(k, epsilon, masks));
    }
    let adj = ctx.adjacency(epsilon);
    let limit = 1u64 << n;
    let mut masks = Vec::new();
    let mut m = (1u64 << size) - 1;
    while m < limit {
        let clique = SimplexMask(m)
            .vertices()
            .all(|v| m & !(adj[v] | (1 << v)) == 0);
        if clique {
            masks.push(SimplexMask(m));
        }
        match next_same_popcount(m) {
            Some(next) => m = next,
            None => break,
        }
    }
    Arc::new(SimplexBasis::from_masks(k, epsilon, masks))
}
