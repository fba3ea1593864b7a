//! Statevector over a stack of qubit registers.
//!
//! Registers are laid out most-significant first: the amplitude index is
//! `sum_r value_r * stride_r` with the last register contiguous. Within a
//! register, qubit `j` is bit `j` of the register value.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Gate2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

pub fn hadamard_gate() -> Gate2 {
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    [[h, h], [h, -h]]
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Register {
    pub name: String,
    pub qubits: usize,
}

impl Register {
    pub fn new(name: impl Into<String>, qubits: usize) -> Self {
        Self {
            name: name.into(),
            qubits,
        }
    }

    pub fn dim(&self) -> usize {
        1 << self.qubits
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    layout: Vec<Register>,
    strides: Vec<usize>,
}

/// Smallest `q` with `2^q >= n`.
pub fn qubits_for(n: usize) -> usize {
    n.max(1).next_power_of_two().trailing_zeros() as usize
}

fn strides_for(layout: &[Register]) -> Vec<usize> {
    let mut strides = vec![1; layout.len()];
    for r in (0..layout.len().saturating_sub(1)).rev() {
        strides[r] = strides[r + 1] * layout[r + 1].dim();
    }
    strides
}

impl StateVector {
    /// All registers in `|0>`.
    pub fn zero(layout: Vec<Register>) -> Self {
        let dim = layout.iter().map(Register::dim).product();
        let mut amps = vec![ZERO; dim];
        amps[0] = ONE;
        let strides = strides_for(&layout);
        Self {
            amps,
            layout,
            strides,
        }
    }

    pub fn from_amplitudes(layout: Vec<Register>, amps: Vec<Complex64>) -> Result<Self> {
        let dim: usize = layout.iter().map(Register::dim).product();
        if amps.len() != dim {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a register space of dimension {dim}",
                amps.len()
            )));
        }
        let strides = strides_for(&layout);
        Ok(Self {
            amps,
            layout,
            strides,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn layout(&self) -> &[Register] {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) {
        let n = self.norm_sqr().sqrt();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// Register value encoded in a global index.
    #[inline]
    pub fn register_value(&self, index: usize, reg: usize) -> usize {
        (index / self.strides[reg]) % self.layout[reg].dim()
    }

    /// `self ⊗ other`, with `other`'s registers appended.
    pub fn tensor(&self, other: &Self) -> Self {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            amps.extend(other.amps.iter().map(|b| a * b));
        }
        let layout: Vec<Register> = self.layout.iter().chain(&other.layout).cloned().collect();
        let strides = strides_for(&layout);
        Self {
            amps,
            layout,
            strides,
        }
    }

    fn qubit_stride(&self, reg: usize, qubit: usize) -> usize {
        assert!(qubit < self.layout[reg].qubits, "qubit out of range");
        self.strides[reg] << qubit
    }

    pub fn apply_gate(&mut self, reg: usize, qubit: usize, g: &Gate2) {
        let s = self.qubit_stride(reg, qubit);
        for i in 0..self.amps.len() {
            if i & s == 0 {
                let (a0, a1) = (self.amps[i], self.amps[i | s]);
                self.amps[i] = g[0][0] * a0 + g[0][1] * a1;
                self.amps[i | s] = g[1][0] * a0 + g[1][1] * a1;
            }
        }
    }

    pub fn hadamard_all(&mut self, reg: usize) {
        let h = hadamard_gate();
        for q in 0..self.layout[reg].qubits {
            self.apply_gate(reg, q, &h);
        }
    }

    /// Controlled NOT from `(creg, cq)` onto `(treg, tq)`.
    pub fn cnot(&mut self, creg: usize, cq: usize, treg: usize, tq: usize) {
        let c = self.qubit_stride(creg, cq);
        let t = self.qubit_stride(treg, tq);
        for i in 0..self.amps.len() {
            if i & c != 0 && i & t == 0 {
                self.amps.swap(i, i | t);
            }
        }
    }

    /// Multiply by `e^{i phase}` where both qubits are set.
    pub fn controlled_phase(&mut self, reg: usize, q1: usize, q2: usize, phase: f64) {
        let m = self.qubit_stride(reg, q1) | self.qubit_stride(reg, q2);
        let f = Complex64::from_polar(1.0, phase);
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & m == m {
                *a *= f;
            }
        }
    }

    pub fn swap_qubits(&mut self, reg: usize, q1: usize, q2: usize) {
        if q1 == q2 {
            return;
        }
        let (s1, s2) = (self.qubit_stride(reg, q1), self.qubit_stride(reg, q2));
        for i in 0..self.amps.len() {
            if i & s1 != 0 && i & s2 == 0 {
                self.amps.swap(i, (i & !s1) | s2);
            }
        }
    }

    /// Apply a `dim(reg) x dim(reg)` matrix to one register, optionally only
    /// on the branch where a control qubit is set.
    pub fn apply_register_unitary(
        &mut self,
        reg: usize,
        u: &DMatrix<Complex64>,
        control: Option<(usize, usize)>,
    ) {
        let d = self.layout[reg].dim();
        assert_eq!((u.nrows(), u.ncols()), (d, d));
        let stride = self.strides[reg];
        let cmask = control.map(|(r, q)| self.qubit_stride(r, q));
        let mut buf = vec![ZERO; d];
        for base in 0..self.amps.len() {
            if self.register_value(base, reg) != 0 {
                continue;
            }
            if let Some(c) = cmask {
                if base & c == 0 {
                    continue;
                }
            }
            for (v, slot) in buf.iter_mut().enumerate() {
                *slot = self.amps[base + v * stride];
            }
            for r in 0..d {
                let mut acc = ZERO;
                for c in 0..d {
                    acc += u[(r, c)] * buf[c];
                }
                self.amps[base + r * stride] = acc;
            }
        }
    }

    /// Fourier transform `|y> -> M^{-1/2} sum_p e^{-2 pi i p y / M} |p>` on
    /// one register, built from Hadamards, controlled phases and a final
    /// qubit reversal.
    pub fn qft(&mut self, reg: usize) {
        let m = self.layout[reg].qubits;
        let h = hadamard_gate();
        for j in (0..m).rev() {
            self.apply_gate(reg, j, &h);
            for k in (0..j).rev() {
                let angle = -std::f64::consts::PI / (1u64 << (j - k)) as f64;
                self.controlled_phase(reg, k, j, angle);
            }
        }
        for i in 0..m / 2 {
            self.swap_qubits(reg, i, m - 1 - i);
        }
    }

    /// Probability of each value of one register.
    pub fn marginal(&self, reg: usize) -> Vec<f64> {
        let mut p = vec![0.0; self.layout[reg].dim()];
        for (i, a) in self.amps.iter().enumerate() {
            p[self.register_value(i, reg)] += a.norm_sqr();
        }
        p
    }

    /// Norm of the component on indices accepted by `keep`.
    pub fn projected_norm(&self, keep: impl Fn(usize) -> bool) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| keep(*i))
            .map(|(_, a)| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Zero the amplitudes outside `keep` and renormalise; postselection on
    /// the oracle qubit.
    pub fn postselect(&mut self, keep: impl Fn(usize) -> bool) -> Result<f64> {
        let norm = self.projected_norm(&keep);
        if norm == 0.0 {
            return Err(Error::NoMarkedStates);
        }
        for (i, a) in self.amps.iter_mut().enumerate() {
            if keep(i) {
                *a /= norm;
            } else {
                *a = ZERO;
            }
        }
        Ok(norm * norm)
    }
}
