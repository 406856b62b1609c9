//! Phase estimation over a dense unitary, used to read the
//! minimum-magnitude eigenphase of `exp(-i Q_H)`.
//!
//! The register layout places the query qubits at `0..n` and the precision
//! qubits at `n..n+t`; controlled powers `U^(2^j)` are built by repeated
//! matrix squaring and applied as controlled dense unitaries.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hermitize::UnitaryOperator;
use crate::qsim::{multinomial, Gate, StateVector};

/// Query-register preparation.
#[derive(Debug, Clone)]
pub enum QpeInput {
    /// Uniform superposition; overlaps every eigenvector of the unitary.
    Uniform,
    /// A caller-supplied query state.
    State(StateVector),
}

/// Phase-estimation configuration.
#[derive(Debug, Clone)]
pub struct QpeConfig {
    pub precision_qubits: usize,
    pub query_qubits: usize,
    pub shots: u64,
    pub seed: u64,
    pub input: QpeInput,
}

impl QpeConfig {
    pub fn new(precision_qubits: usize, query_qubits: usize) -> Self {
        Self {
            precision_qubits,
            query_qubits,
            shots: 500_000,
            seed: 0,
            input: QpeInput::Uniform,
        }
    }

    fn validate(&self, u: &UnitaryOperator) -> Result<()> {
        if self.precision_qubits == 0 {
            return Err(Error::InvalidParameter(
                "at least one precision qubit is required".into(),
            ));
        }
        if 1usize << self.query_qubits != u.dim() {
            return Err(Error::DimensionMismatch(format!(
                "query register of {} qubits cannot hold a {}-dimensional unitary",
                self.query_qubits,
                u.dim()
            )));
        }
        if let QpeInput::State(s) = &self.input {
            if s.n_qubits() != self.query_qubits {
                return Err(Error::DimensionMismatch(format!(
                    "input state has {} qubits, query register has {}",
                    s.n_qubits(),
                    self.query_qubits
                )));
            }
        }
        Ok(())
    }
}

/// Outcome of a phase-estimation run.
#[derive(Debug, Clone)]
pub struct QpeResult {
    /// Nonzero `(bin, counts)` pairs over the precision register, ascending.
    pub histogram: Vec<(u64, u64)>,
    /// Selected phase `k / 2^t`.
    pub phase: f64,
    /// Eigenvalue of the generator surrogate recovered from the phase,
    /// folded to `(-pi, pi]`.
    pub lambda_schlogl: f64,
    /// Corresponding unitary eigenvalue `exp(-i lambda)`.
    pub lambda_unitary: Complex64,
    /// Phase-grid spacing `2 pi / 2^t` in eigenvalue units.
    pub resolution: f64,
}

/// Convert a phase in `[0, 1)` to the eigenvalue `lambda` of the Hermitian
/// generator surrogate, folding `-2 pi phase` into `(-pi, pi]` (the
/// boundary maps to `+pi`).
pub fn phase_to_eigenvalue(phase: f64) -> f64 {
    let mut lambda = -std::f64::consts::TAU * phase;
    while lambda <= -std::f64::consts::PI {
        lambda += std::f64::consts::TAU;
    }
    while lambda > std::f64::consts::PI {
        lambda -= std::f64::consts::TAU;
    }
    lambda
}

/// Exact pre-measurement probabilities over the precision register.
pub fn qpe_probabilities(u: &UnitaryOperator, cfg: &QpeConfig) -> Result<Vec<f64>> {
    cfg.validate(u)?;
    let state = run_circuit(u, cfg)?;
    let n = cfg.query_qubits;
    let t = cfg.precision_qubits;
    let mut probs = vec![0.0f64; 1 << t];
    for (idx, amp) in state.amplitudes().iter().enumerate() {
        probs[idx >> n] += amp.norm_sqr();
    }
    Ok(probs)
}

/// Sampled phase estimation: `cfg.shots` measurements of the precision
/// register, then minimum-|lambda| selection above the noise floor
/// `4 * shots / 2^t`.
pub fn qpe_run(u: &UnitaryOperator, cfg: &QpeConfig) -> Result<QpeResult> {
    if cfg.shots == 0 {
        return Err(Error::InvalidParameter(
            "shots must be at least 1; use qpe_run_exact for the noiseless mode".into(),
        ));
    }
    let probs = qpe_probabilities(u, cfg)?;
    let counts = multinomial(&probs, cfg.shots, cfg.seed);
    let histogram: Vec<(u64, u64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(k, &c)| (k as u64, c))
        .collect();
    let floor = cfg.shots as f64 * 4.0 / (1u64 << cfg.precision_qubits) as f64;
    select_minimum(histogram, floor, cfg.precision_qubits)
}

/// Noiseless phase estimation: selection runs directly on the exact
/// probabilities, with the same relative noise floor `4 / 2^t`.
pub fn qpe_run_exact(u: &UnitaryOperator, cfg: &QpeConfig) -> Result<QpeResult> {
    let probs = qpe_probabilities(u, cfg)?;
    let scale = 1e12;
    let histogram: Vec<(u64, u64)> = probs
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0.0)
        .map(|(k, &p)| (k as u64, (p * scale) as u64))
        .collect();
    let floor = scale * 4.0 / (1u64 << cfg.precision_qubits) as f64;
    select_minimum(histogram, floor, cfg.precision_qubits)
}

fn select_minimum(histogram: Vec<(u64, u64)>, floor: f64, t: usize) -> Result<QpeResult> {
    let grid = (1u64 << t) as f64;
    let mut best: Option<(f64, f64)> = None; // (lambda, phase)
    for &(k, c) in &histogram {
        if (c as f64) <= floor {
            continue;
        }
        let phase = k as f64 / grid;
        let lambda = phase_to_eigenvalue(phase);
        let better = match best {
            None => true,
            Some((bl, _)) => {
                lambda.abs() < bl.abs() - 1e-15
                    || ((lambda.abs() - bl.abs()).abs() <= 1e-15 && lambda > bl)
            }
        };
        if better {
            best = Some((lambda, phase));
        }
    }
    let (lambda, phase) = best.ok_or(Error::PhaseEstimation {
        histogram: histogram.clone(),
    })?;
    Ok(QpeResult {
        histogram,
        phase,
        lambda_schlogl: lambda,
        lambda_unitary: Complex64::from_polar(1.0, -lambda),
        resolution: std::f64::consts::TAU / grid,
    })
}

/// Assemble and run the phase-estimation circuit, returning the final
/// statevector over query + precision registers.
fn run_circuit(u: &UnitaryOperator, cfg: &QpeConfig) -> Result<StateVector> {
    let n = cfg.query_qubits;
    let t = cfg.precision_qubits;
    let total = n + t;
    let mut state = match &cfg.input {
        QpeInput::Uniform => {
            let mut s = StateVector::zero(total);
            for q in 0..n {
                s.apply(&Gate::H { target: q })?;
            }
            s
        }
        QpeInput::State(query) => {
            let mut amps = vec![Complex64::ZERO; 1 << total];
            amps[..1 << n].copy_from_slice(query.amplitudes());
            StateVector::from_amplitudes(amps)?
        }
    };
    for j in 0..t {
        state.apply(&Gate::H { target: n + j })?;
    }
    // controlled powers U^(2^j), control = precision qubit j
    let mut power = u.matrix().clone();
    for j in 0..t {
        state.apply(&Gate::ControlledUnitary {
            controls: vec![n + j],
            targets: (0..n).collect(),
            matrix: Arc::new(power.clone()),
        })?;
        if j + 1 < t {
            power = power.dot(&power);
        }
    }
    // inverse QFT on the precision register
    let targets: Vec<usize> = (n..n + t).collect();
    for gate in inverse_qft_ops(&targets) {
        state.apply(&gate)?;
    }
    Ok(state)
}

fn phase_gate(control: usize, target: usize, angle: f64) -> Gate {
    let mut m = Array2::<Complex64>::eye(2);
    m[[1, 1]] = Complex64::from_polar(1.0, angle);
    Gate::ControlledUnitary {
        controls: vec![control],
        targets: vec![target],
        matrix: Arc::new(m),
    }
}

/// Forward QFT gate list on `qubits` (ascending significance):
/// `|x> -> 2^{-t/2} sum_y exp(2 pi i x y / 2^t) |y>`.
fn qft_ops(qubits: &[usize]) -> Vec<Gate> {
    let t = qubits.len();
    let mut ops = Vec::new();
    for j in (0..t).rev() {
        ops.push(Gate::H { target: qubits[j] });
        for m in (0..j).rev() {
            let angle = std::f64::consts::PI / (1u64 << (j - m)) as f64;
            ops.push(phase_gate(qubits[m], qubits[j], angle));
        }
    }
    for j in 0..t / 2 {
        let (a, b) = (qubits[j], qubits[t - 1 - j]);
        ops.push(Gate::Cnot { control: a, target: b });
        ops.push(Gate::Cnot { control: b, target: a });
        ops.push(Gate::Cnot { control: a, target: b });
    }
    ops
}

/// Inverse QFT: the forward list reversed with conjugated phases.
fn inverse_qft_ops(qubits: &[usize]) -> Vec<Gate> {
    let mut ops = qft_ops(qubits);
    ops.reverse();
    for op in &mut ops {
        if let Gate::ControlledUnitary { matrix, .. } = op {
            let mut m = (**matrix).clone();
            m[[1, 1]] = m[[1, 1]].conj();
            *matrix = Arc::new(m);
        }
    }
    ops
}
