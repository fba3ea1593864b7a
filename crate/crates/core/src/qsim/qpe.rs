//! Phase estimation on the maximally entangled state of two copies of the
//! composite register, and extraction of the Betti number from the peak at
//! `p = l * xi`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::evolution::{exact_exponential, trotter_exponential};
use super::grover::uniform_projected_state;
use super::state::{qubits_for, Register, StateVector};
use crate::error::{Error, Result};
use crate::operators::DiracOperator;

/// Default cap on the total statevector length.
pub const DEFAULT_SIM_CAP: usize = 1 << 26;

/// Statevector cap, overridable through `QPERSIST_MAX_DIM`.
pub fn simulation_cap() -> usize {
    std::env::var("QPERSIST_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_SIM_CAP)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Evolution {
    /// `e^{2 pi i l y B / M}` from the eigendecomposition of `B`.
    #[default]
    Exact,
    /// The SWAP construction with `steps` interactions per unit of the
    /// control value `y`.
    Trotter { steps: usize },
}

impl FromStr for Evolution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "exact" {
            return Ok(Evolution::Exact);
        }
        match s.strip_prefix("trotter=").map(str::parse::<usize>) {
            Some(Ok(steps)) if steps > 0 => Ok(Evolution::Trotter { steps }),
            _ => Err(Error::InvalidParameter(format!(
                "evolution must be `exact` or `trotter=N` with N >= 1, got {s:?}"
            ))),
        }
    }
}

impl fmt::Display for Evolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Evolution::Exact => f.write_str("exact"),
            Evolution::Trotter { steps } => write!(f, "trotter={steps}"),
        }
    }
}

/// Outcome distribution of the phase register.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseDistribution {
    pub l: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub xi: f64,
    /// Number of composite basis states of the Dirac operator.
    #[serde(rename = "N")]
    pub hilbert_dim: usize,
    #[serde(rename = "P")]
    pub probs: Vec<f64>,
}

impl PhaseDistribution {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    /// Two columns, `p,probability`, with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("p,probability\n");
        for (p, v) in self.probs.iter().enumerate() {
            out.push_str(&format!("{p},{v:e}\n"));
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Minimal SVG bar chart of the distribution.
    pub fn to_svg(&self) -> String {
        let (w, h, pad) = (640.0, 320.0, 30.0);
        let bar = (w - 2.0 * pad) / self.m as f64;
        let top = self.probs.iter().copied().fold(0.0f64, f64::max).max(1e-12);
        let mut svg = format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <line x1=\"{pad}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n",
            b = h - pad,
            r = w - pad
        );
        for (p, v) in self.probs.iter().enumerate() {
            let bh = (h - 2.0 * pad) * v / top;
            let x = pad + p as f64 * bar;
            svg.push_str(&format!(
                "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"steelblue\"><title>p={p} P={v:.6}</title></rect>\n",
                x + 0.1 * bar,
                h - pad - bh,
                0.8 * bar,
                bh
            ));
            svg.push_str(&format!(
                "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{p}</text>\n",
                x + 0.5 * bar,
                h - pad + 12.0
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

/// `g(p) = |(1/M) sum_y e^{2 pi i (l lambda - p) y / M}|^2`, which is 1 at an
/// exact peak `l lambda = p` and needs no special casing there.
pub fn peak_weight(lambda: f64, p: usize, l: usize, m: usize) -> f64 {
    let phase = 2.0 * PI * (l as f64 * lambda - p as f64) / m as f64;
    let sum: Complex64 = (0..m).map(|y| Complex64::from_polar(1.0, phase * y as f64)).sum();
    (sum / m as f64).norm_sqr()
}

/// Closed-form outcome distribution for eigenvalues listed with
/// multiplicity.
pub fn analytic_distribution(eigenvalues: &[f64], l: usize, m: usize) -> Vec<f64> {
    let n = eigenvalues.len() as f64;
    (0..m)
        .map(|p| eigenvalues.iter().map(|&e| peak_weight(e, p, l, m)).sum::<f64>() / n)
        .collect()
}

fn check_params(l: usize, m: usize) -> Result<usize> {
    if m < 2 || !m.is_power_of_two() {
        return Err(Error::BadM(m));
    }
    if l == 0 {
        return Err(Error::InvalidParameter("l must be >= 1".into()));
    }
    Ok(m.trailing_zeros() as usize)
}

/// Embed `u` in the top-left corner of a `dim x dim` identity.
fn embed(u: &DMatrix<Complex64>, dim: usize) -> DMatrix<Complex64> {
    let mut out = DMatrix::identity(dim, dim);
    out.view_mut((0, 0), (u.nrows(), u.ncols())).copy_from(u);
    out
}

/// Simulate the phase-estimation circuit and return the exact marginal of
/// the phase register.
///
/// Registers 1 and 2 hold `ceil(log2 N)` qubits each and R holds
/// `log2 M`. Register 1 is prepared in the uniform state over the `N`
/// composite basis states, copied into register 2 with CNOTs, R is put in
/// uniform superposition, `U^y = e^{2 pi i l y B / M}` acts on register 2
/// controlled by R (one `U^{2^j}` per qubit), and R is Fourier transformed.
/// Basis states beyond `N` carry zero amplitude throughout.
pub fn phase_estimation(
    b: &DiracOperator,
    l: usize,
    m: usize,
    evolution: Evolution,
) -> Result<PhaseDistribution> {
    let r_qubits = check_params(l, m)?;
    let n = b.dim();
    if n == 0 {
        return Err(Error::EmptyBasis);
    }
    let q = qubits_for(n);
    let total = 1usize
        .checked_shl((2 * q + r_qubits) as u32)
        .unwrap_or(usize::MAX);
    let cap = simulation_cap();
    if total > cap {
        return Err(Error::TooLarge { dim: total, cap });
    }
    let probs = match evolution {
        Evolution::Exact => simulate_exact(b, l, m, q, r_qubits)?,
        Evolution::Trotter { steps } => simulate_swap(b, l, m, steps)?,
    };
    Ok(PhaseDistribution {
        l,
        m,
        xi: b.xi(),
        hilbert_dim: n,
        probs,
    })
}

fn simulate_exact(b: &DiracOperator, l: usize, m: usize, q: usize, r_qubits: usize) -> Result<Vec<f64>> {
    let system = uniform_projected_state(b)?;
    let mut state = system
        .tensor(&StateVector::zero(vec![Register::new("copy", q)]))
        .tensor(&StateVector::zero(vec![Register::new("phase", r_qubits)]));
    for k in 0..q {
        state.cnot(0, k, 1, k);
    }
    state.hadamard_all(2);
    let base = 2.0 * PI * l as f64 / m as f64;
    for j in 0..r_qubits {
        let u = exact_exponential(b, base * (1u64 << j) as f64)?;
        state.apply_register_unitary(1, &embed(&u, 1 << q), Some((2, j)));
    }
    state.qft(2);
    Ok(state.marginal(2))
}

/// Phase estimation with the SWAP construction. Each branch `y` of the
/// phase register interacts with `y * steps` fresh ancillas; the branch
/// overlaps `<Psi_y'|Psi_y>` (`y >= y'`) are `tr(C^{(y-y') steps} Phi^{y' steps}(I/N))`
/// with `Phi` the one-step channel and `C = <s|e^{-i dt S}|s>` the action on
/// a coherence whose partner branch leaves its ancilla untouched. The
/// Fourier transform of the overlaps gives the marginal of R exactly.
fn simulate_swap(b: &DiracOperator, l: usize, m: usize, steps: usize) -> Result<Vec<f64>> {
    let n = b.dim();
    // e^{2 pi i l y B / M} = e^{-i t_y B / N} with t_y = -2 pi l y N / M
    let t_unit = -2.0 * PI * l as f64 * n as f64 / m as f64;
    let evo = trotter_exponential(b, t_unit, steps)?;
    let coherence = evo.coherence_step();
    let mut c_unit = DMatrix::identity(n, n);
    for _ in 0..steps {
        c_unit = &coherence * c_unit;
    }
    let mut c_pow = Vec::with_capacity(m);
    c_pow.push(DMatrix::<Complex64>::identity(n, n));
    for d in 1..m {
        let next = &c_unit * &c_pow[d - 1];
        c_pow.push(next);
    }

    let mut overlaps = DMatrix::from_element(m, m, Complex64::new(0.0, 0.0));
    let mut rho = DMatrix::<Complex64>::identity(n, n) / Complex64::new(n as f64, 0.0);
    for y_lo in 0..m {
        for y in y_lo..m {
            let g: Complex64 = (&c_pow[y - y_lo] * &rho).trace();
            overlaps[(y, y_lo)] = g;
            overlaps[(y_lo, y)] = g.conj();
        }
        rho = evo.apply(&rho);
    }

    let probs = (0..m)
        .map(|p| {
            let mut acc = Complex64::new(0.0, 0.0);
            for y in 0..m {
                for y2 in 0..m {
                    let phase = -2.0 * PI * (p as f64) * (y as f64 - y2 as f64) / m as f64;
                    acc += Complex64::from_polar(1.0, phase) * overlaps[(y, y2)];
                }
            }
            (acc.re / (m * m) as f64).max(0.0)
        })
        .collect();
    Ok(probs)
}

/// Betti number read off the peak at `p = l * xi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettiEstimate {
    pub betti: usize,
    /// `N * P(l xi)` before rounding.
    pub unrounded: f64,
    /// `P(l xi) - betti / N`: the weight leaking into the peak from other
    /// eigenvalues.
    pub leakage: f64,
}

pub fn betti_from_distribution(dist: &PhaseDistribution) -> Result<BettiEstimate> {
    let peak = dist.l as f64 * dist.xi;
    let bin = peak.round();
    if (peak - bin).abs() > 1e-9 || bin < 0.0 || bin >= dist.m as f64 {
        return Err(Error::NonIntegerPeak(peak));
    }
    let prob = dist.probs[bin as usize];
    let unrounded = dist.hilbert_dim as f64 * prob;
    let nearest = unrounded.round();
    if (unrounded - nearest).abs() > 0.3 {
        return Err(Error::AmbiguousRounding(unrounded));
    }
    let betti = nearest.max(0.0) as usize;
    Ok(BettiEstimate {
        betti,
        unrounded,
        leakage: prob - betti as f64 / dist.hilbert_dim as f64,
    })
}

/// The leakage into bin `l * xi` predicted from the spectrum: the summed
/// peak weight of every eigenvalue other than `xi`, divided by `N`.
pub fn analytic_leakage(eigenvalues: &[f64], xi: f64, l: usize, m: usize, tol: f64) -> f64 {
    let bin = (l as f64 * xi).round() as usize;
    eigenvalues
        .iter()
        .filter(|&&e| (e - xi).abs() > tol)
        .map(|&e| peak_weight(e, bin, l, m))
        .sum::<f64>()
        / eigenvalues.len() as f64
}

/// Finite-shot histogram of the phase register, deterministic per seed.
pub fn sample_counts(dist: &PhaseDistribution, shots: usize, seed: u64) -> Result<Vec<u64>> {
    if shots == 0 {
        return Err(Error::InvalidParameter("shots must be >= 1".into()));
    }
    let weights: Vec<f64> = dist.probs.iter().map(|p| p.max(0.0)).collect();
    let index = WeightedIndex::new(&weights)
        .map_err(|e| Error::InvalidParameter(format!("invalid distribution: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; dist.probs.len()];
    for _ in 0..shots {
        counts[index.sample(&mut rng)] += 1;
    }
    Ok(counts)
}
