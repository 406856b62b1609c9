//! Parameterized circuits and the two-local ansatz family.

use std::fmt;
use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qsim::{Gate, StateVector};

/// A gate angle: fixed, or bound to a variational parameter slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Param {
    Fixed(f64),
    Var(usize),
}

impl Param {
    fn resolve(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Param::Fixed(v) => Ok(v),
            Param::Var(i) => params.get(i).copied().ok_or_else(|| {
                Error::OutOfRange(format!("parameter index {i} out of range"))
            }),
        }
    }
}

/// One operation in a circuit.
#[derive(Debug, Clone)]
pub enum CircuitOp {
    Ry { target: usize, param: Param },
    Rz { target: usize, param: Param },
    X { target: usize },
    H { target: usize },
    Cnot { control: usize, target: usize },
    ControlledUnitary {
        controls: Vec<usize>,
        targets: Vec<usize>,
        matrix: Arc<Array2<Complex64>>,
    },
}

/// Ordered gate list over a fixed qubit register, with dense parameter slots.
#[derive(Debug, Clone, Default)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
    n_params: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            ops: Vec::new(),
            n_params: 0,
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn push(&mut self, op: CircuitOp) {
        if let CircuitOp::Ry { param: Param::Var(i), .. }
        | CircuitOp::Rz { param: Param::Var(i), .. } = op
        {
            self.n_params = self.n_params.max(i + 1);
        }
        self.ops.push(op);
    }

    /// Allocate the next parameter slot.
    pub fn new_param(&mut self) -> Param {
        let p = Param::Var(self.n_params);
        self.n_params += 1;
        p
    }

    /// Run the circuit on `initial`, consuming one bound value per `Var` slot.
    pub fn run(&self, params: &[f64], initial: &StateVector) -> Result<StateVector> {
        if initial.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch(format!(
                "{}-qubit circuit on {}-qubit state",
                self.n_qubits,
                initial.n_qubits()
            )));
        }
        if params.len() != self.n_params {
            return Err(Error::DimensionMismatch(format!(
                "circuit expects {} parameters, got {}",
                self.n_params,
                params.len()
            )));
        }
        let mut state = initial.clone();
        for op in &self.ops {
            let gate = match op {
                CircuitOp::Ry { target, param } => Gate::Ry {
                    target: *target,
                    theta: param.resolve(params)?,
                },
                CircuitOp::Rz { target, param } => Gate::Rz {
                    target: *target,
                    theta: param.resolve(params)?,
                },
                CircuitOp::X { target } => Gate::X { target: *target },
                CircuitOp::H { target } => Gate::H { target: *target },
                CircuitOp::Cnot { control, target } => Gate::Cnot {
                    control: *control,
                    target: *target,
                },
                CircuitOp::ControlledUnitary {
                    controls,
                    targets,
                    matrix,
                } => Gate::ControlledUnitary {
                    controls: controls.clone(),
                    targets: targets.clone(),
                    matrix: matrix.clone(),
                },
            };
            state.apply(&gate)?;
        }
        Ok(state)
    }

    /// Run from the all-zeros state.
    pub fn prepare(&self, params: &[f64]) -> Result<StateVector> {
        self.run(params, &StateVector::zero(self.n_qubits))
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "circuit {} qubits, {} parameters", self.n_qubits, self.n_params)?;
        for op in &self.ops {
            match op {
                CircuitOp::Ry { target, param } => match param {
                    Param::Fixed(v) => writeln!(f, "ry({v:.6}) q{target}")?,
                    Param::Var(i) => writeln!(f, "ry(t{i}) q{target}")?,
                },
                CircuitOp::Rz { target, param } => match param {
                    Param::Fixed(v) => writeln!(f, "rz({v:.6}) q{target}")?,
                    Param::Var(i) => writeln!(f, "rz(t{i}) q{target}")?,
                },
                CircuitOp::X { target } => writeln!(f, "x q{target}")?,
                CircuitOp::H { target } => writeln!(f, "h q{target}")?,
                CircuitOp::Cnot { control, target } => writeln!(f, "cnot q{control} q{target}")?,
                CircuitOp::ControlledUnitary { controls, targets, .. } => {
                    writeln!(f, "cunitary controls={controls:?} targets={targets:?}")?
                }
            }
        }
        Ok(())
    }
}

/// Rotation content of each ansatz layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RotationLayer {
    Ry,
    RyRz,
}

/// Entangling pattern between rotation layers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entanglement {
    /// CNOT chain `0->1, 1->2, ...`.
    Linear,
}

/// Two-local hardware-efficient ansatz: alternating rotation and
/// entanglement layers, closed by a final rotation layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_qubits: usize,
    pub reps: usize,
    pub rotation: RotationLayer,
    pub entanglement: Entanglement,
}

impl AnsatzSpec {
    pub fn ry(n_qubits: usize, reps: usize) -> Self {
        Self {
            n_qubits,
            reps,
            rotation: RotationLayer::Ry,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn ry_rz(n_qubits: usize, reps: usize) -> Self {
        Self {
            n_qubits,
            reps,
            rotation: RotationLayer::RyRz,
            entanglement: Entanglement::Linear,
        }
    }

    pub fn param_count(&self) -> usize {
        let per_layer = match self.rotation {
            RotationLayer::Ry => self.n_qubits,
            RotationLayer::RyRz => 2 * self.n_qubits,
        };
        per_layer * (self.reps + 1)
    }
}

/// Build the circuit for a two-local ansatz specification.
pub fn build_ansatz(spec: &AnsatzSpec) -> Result<Circuit> {
    if spec.n_qubits == 0 {
        return Err(Error::InvalidParameter("ansatz needs at least one qubit".into()));
    }
    if spec.reps == 0 {
        return Err(Error::InvalidParameter("ansatz needs at least one repetition".into()));
    }
    let mut circuit = Circuit::new(spec.n_qubits);
    let rotation_layer = |circuit: &mut Circuit| {
        for q in 0..spec.n_qubits {
            let p = circuit.new_param();
            circuit.push(CircuitOp::Ry { target: q, param: p });
        }
        if spec.rotation == RotationLayer::RyRz {
            for q in 0..spec.n_qubits {
                let p = circuit.new_param();
                circuit.push(CircuitOp::Rz { target: q, param: p });
            }
        }
    };
    for _ in 0..spec.reps {
        rotation_layer(&mut circuit);
        match spec.entanglement {
            Entanglement::Linear => {
                for q in 0..spec.n_qubits.saturating_sub(1) {
                    circuit.push(CircuitOp::Cnot { control: q, target: q + 1 });
                }
            }
        }
    }
    rotation_layer(&mut circuit);
    debug_assert_eq!(circuit.n_params(), spec.param_count());
    Ok(circuit)
}
