//! Dense statevector simulator.
//!
//! Basis convention: qubit 0 is the least significant bit of the basis
//! index. Global phase is unconstrained; comparisons should go through
//! overlaps or probabilities.

mod circuit;

pub use circuit::{build_ansatz, AnsatzSpec, Circuit, CircuitOp, Entanglement, Param, RotationLayer};

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::PauliSum;

const NORM_TOL: f64 = 1e-10;

/// Unit-norm complex amplitude vector over `2^n` basis states.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zeros computational basis state.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[0] = Complex64::ONE;
        Self { n_qubits, amps }
    }

    /// A single computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if index >= 1 << n_qubits {
            return Err(Error::OutOfRange(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::ZERO; 1 << n_qubits];
        amps[index] = Complex64::ONE;
        Ok(Self { n_qubits, amps })
    }

    /// Uniform superposition over all basis states.
    pub fn uniform(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Self {
            n_qubits,
            amps: vec![amp; dim],
        }
    }

    /// Wrap raw amplitudes; the L2 norm must be 1 within 1e-10.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if !dim.is_power_of_two() || dim == 0 {
            return Err(Error::DimensionMismatch(format!(
                "amplitude count {dim} is not a power of two"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidParameter(format!(
                "state norm {norm} deviates from 1 by more than {NORM_TOL}"
            )));
        }
        Ok(Self {
            n_qubits: dim.trailing_zeros() as usize,
            amps,
        })
    }

    /// Normalize and wrap raw amplitudes.
    pub fn from_unnormalized(amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParameter("cannot normalize zero vector".into()));
        }
        Self::from_amplitudes(amps.into_iter().map(|a| a / norm).collect())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Measurement probabilities `|amplitude|^2`.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Inner product `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "overlap of {}-qubit and {}-qubit states",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Apply one gate in place.
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        match gate {
            Gate::Ry { target, theta } => {
                let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
                self.apply_single(*target, [
                    Complex64::new(c, 0.0),
                    Complex64::new(-s, 0.0),
                    Complex64::new(s, 0.0),
                    Complex64::new(c, 0.0),
                ])
            }
            Gate::Rz { target, theta } => {
                let half = theta / 2.0;
                self.apply_single(*target, [
                    Complex64::from_polar(1.0, -half),
                    Complex64::ZERO,
                    Complex64::ZERO,
                    Complex64::from_polar(1.0, half),
                ])
            }
            Gate::X { target } => self.apply_single(*target, [
                Complex64::ZERO,
                Complex64::ONE,
                Complex64::ONE,
                Complex64::ZERO,
            ]),
            Gate::H { target } => {
                let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                self.apply_single(*target, [h, h, h, -h])
            }
            Gate::Cnot { control, target } => self.apply_cnot(*control, *target),
            Gate::ControlledUnitary {
                controls,
                targets,
                matrix,
            } => self.apply_controlled_unitary(controls, targets, matrix),
        }
    }

    /// 2x2 gate `[[m[0], m[1]], [m[2], m[3]]]` on `target`.
    fn apply_single(&mut self, target: usize, m: [Complex64; 4]) -> Result<()> {
        self.check_qubit(target)?;
        let bit = 1usize << target;
        for base in 0..self.amps.len() {
            if base & bit == 0 {
                let i0 = base;
                let i1 = base | bit;
                let (a0, a1) = (self.amps[i0], self.amps[i1]);
                self.amps[i0] = m[0] * a0 + m[1] * a1;
                self.amps[i1] = m[2] * a0 + m[3] * a1;
            }
        }
        Ok(())
    }

    fn apply_cnot(&mut self, control: usize, target: usize) -> Result<()> {
        self.check_qubit(control)?;
        self.check_qubit(target)?;
        if control == target {
            return Err(Error::InvalidParameter(
                "CNOT control and target must differ".into(),
            ));
        }
        let (cb, tb) = (1usize << control, 1usize << target);
        for i in 0..self.amps.len() {
            if i & cb != 0 && i & tb == 0 {
                self.amps.swap(i, i | tb);
            }
        }
        Ok(())
    }

    fn apply_controlled_unitary(
        &mut self,
        controls: &[usize],
        targets: &[usize],
        matrix: &Array2<Complex64>,
    ) -> Result<()> {
        for &q in controls.iter().chain(targets) {
            self.check_qubit(q)?;
        }
        for &c in controls {
            if targets.contains(&c) {
                return Err(Error::InvalidParameter(format!(
                    "qubit {c} is both control and target"
                )));
            }
        }
        let k = targets.len();
        let sub = 1usize << k;
        if matrix.dim() != (sub, sub) {
            return Err(Error::DimensionMismatch(format!(
                "unitary payload is {:?}, expected {sub}x{sub} for {k} targets",
                matrix.dim()
            )));
        }
        if !is_unitary(matrix, 1e-10) {
            return Err(Error::InvalidParameter(
                "controlled-unitary payload is not unitary within 1e-10".into(),
            ));
        }
        let cmask: usize = controls.iter().map(|&c| 1usize << c).sum();
        let tmask: usize = targets.iter().map(|&t| 1usize << t).sum();
        let mut local = vec![Complex64::ZERO; sub];
        let mut out = vec![Complex64::ZERO; sub];
        for base in 0..self.amps.len() {
            // visit each target-subspace fiber once, via its all-zero representative
            if base & tmask != 0 || base & cmask != cmask {
                continue;
            }
            for (li, slot) in local.iter_mut().enumerate() {
                let mut idx = base;
                for (bit, &t) in targets.iter().enumerate() {
                    if li >> bit & 1 == 1 {
                        idx |= 1 << t;
                    }
                }
                *slot = self.amps[idx];
            }
            for (r, slot) in out.iter_mut().enumerate() {
                *slot = (0..sub).map(|c| matrix[[r, c]] * local[c]).sum();
            }
            for (li, value) in out.iter().enumerate() {
                let mut idx = base;
                for (bit, &t) in targets.iter().enumerate() {
                    if li >> bit & 1 == 1 {
                        idx |= 1 << t;
                    }
                }
                self.amps[idx] = *value;
            }
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n_qubits {
            return Err(Error::OutOfRange(format!(
                "qubit {q} out of range for {}-qubit state",
                self.n_qubits
            )));
        }
        Ok(())
    }

    /// Exact expectation value of a Pauli sum, `sum_j c_j <psi|P_j|psi>`.
    pub fn expectation(&self, sum: &PauliSum) -> Result<f64> {
        if sum.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit operator applied to {}-qubit state",
                sum.n_qubits(),
                self.n_qubits
            )));
        }
        let mut total = Complex64::ZERO;
        for term in sum.terms() {
            let (xmask, zmask, ny) = term.string.masks();
            let base_phase = Complex64::i().powu((ny % 4) as u32);
            let mut acc = Complex64::ZERO;
            for b in 0..self.amps.len() {
                let a = b ^ xmask;
                let mut ph = base_phase;
                if (b & zmask).count_ones() % 2 == 1 {
                    ph = -ph;
                }
                // <psi|P|psi> = sum_b conj(psi[a]) * phase(b) * psi[b], a = b ^ x
                acc += self.amps[a].conj() * ph * self.amps[b];
            }
            total += acc * term.coefficient;
        }
        debug_assert!(total.im.abs() < 1e-9, "imaginary expectation {}", total.im);
        Ok(total.re)
    }

    /// Quadratic form `<psi|M|psi>` against a dense matrix.
    pub fn quadratic_form(&self, m: &Array2<Complex64>) -> Result<Complex64> {
        let d = self.amps.len();
        if m.dim() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "matrix {:?} against {d}-dim state",
                m.dim()
            )));
        }
        let mut acc = Complex64::ZERO;
        for i in 0..d {
            let mut row = Complex64::ZERO;
            for j in 0..d {
                row += m[[i, j]] * self.amps[j];
            }
            acc += self.amps[i].conj() * row;
        }
        Ok(acc)
    }

    /// Multinomial sample of basis outcomes; counts indexed by basis state.
    /// Deterministic for a fixed seed.
    pub fn sample(&self, shots: u64, seed: u64) -> Result<Vec<u64>> {
        if shots == 0 {
            return Err(Error::InvalidParameter("shots must be at least 1".into()));
        }
        Ok(multinomial(&self.probabilities(), shots, seed))
    }
}

/// Draw `shots` outcomes from a probability vector with a seeded generator.
pub(crate) fn multinomial(probs: &[f64], shots: u64, seed: u64) -> Vec<u64> {
    let mut cdf = Vec::with_capacity(probs.len());
    let mut acc = 0.0;
    for &p in probs {
        acc += p;
        cdf.push(acc);
    }
    let total = acc;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = vec![0u64; probs.len()];
    for _ in 0..shots {
        let u: f64 = rng.random::<f64>() * total;
        let idx = cdf.partition_point(|&c| c < u).min(probs.len() - 1);
        counts[idx] += 1;
    }
    counts
}

/// One gate application on a statevector.
#[derive(Debug, Clone)]
pub enum Gate {
    Ry { target: usize, theta: f64 },
    Rz { target: usize, theta: f64 },
    X { target: usize },
    H { target: usize },
    Cnot { control: usize, target: usize },
    /// Dense unitary on `targets` (bit `k` of the local index is qubit
    /// `targets[k]`), applied when all `controls` are 1. An empty control
    /// list applies the unitary unconditionally.
    ControlledUnitary {
        controls: Vec<usize>,
        targets: Vec<usize>,
        matrix: Arc<Array2<Complex64>>,
    },
}

pub(crate) fn is_unitary(m: &Array2<Complex64>, tol: f64) -> bool {
    let (r, c) = m.dim();
    if r != c {
        return false;
    }
    let mut frob = 0.0;
    for i in 0..r {
        for j in 0..r {
            let mut dot = Complex64::ZERO;
            for k in 0..r {
                dot += m[[i, k]] * m[[j, k]].conj();
            }
            let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
            frob += (dot - expect).norm_sqr();
        }
    }
    frob.sqrt() <= tol
}
