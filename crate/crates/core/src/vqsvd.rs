//! Variational singular value decomposition and the steady-state recovery
//! pipeline built on it.
//!
//! Two independently parameterized RY-RZ circuits applied to distinct
//! computational basis states produce orthonormal left/right families; the
//! optimizer maximizes the weighted sum of `Re <psi_i|M|phi_i>`. Combined
//! with the phase-estimation eigenvalue, the null space of
//! `U - exp(-i lambda_min) I` yields the steady state.

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hermitize::{block_embed, unitary_of};
use crate::oracle;
use crate::qpe::{qpe_run, QpeConfig};
use crate::qsim::{build_ansatz, AnsatzSpec, StateVector};
use crate::system::SchloglSystem;
use crate::variational::optim::{adam, AdamOptions};

/// Estimated singular values above this threshold mean the null space was
/// not found.
const NULL_SPACE_THRESHOLD: f64 = 0.1;

/// Hyperparameters of the variational SVD.
#[derive(Debug, Clone, Serialize)]
pub struct VqsvdConfig {
    /// Number of singular pairs to resolve.
    pub rank: usize,
    /// Strictly descending positive weights, one per pair.
    pub weights: Vec<f64>,
    pub learning_rate: f64,
    /// Fixed optimizer iteration budget.
    pub iterations: usize,
    /// Parameterized-gate budget per register; the rotation-layer count is
    /// derived so each register holds about this many rotation gates.
    pub circuit_depth: usize,
    pub seed: u64,
}

impl VqsvdConfig {
    /// Defaults for a matrix of dimension `dim`: full rank, arithmetic
    /// weights `3 * rank, ..., 6, 3`, learning rate 0.02, 200 iterations,
    /// depth budget 55.
    pub fn for_dim(dim: usize) -> Self {
        Self {
            rank: dim,
            weights: (1..=dim).rev().map(|i| 3.0 * i as f64).collect(),
            learning_rate: 0.02,
            iterations: 200,
            circuit_depth: 55,
            seed: 0,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if self.rank == 0 || self.rank > dim {
            return Err(Error::InvalidParameter(format!(
                "rank {} outside 1..={dim}",
                self.rank
            )));
        }
        if self.weights.len() != self.rank {
            return Err(Error::InvalidParameter(format!(
                "{} weights for rank {}",
                self.weights.len(),
                self.rank
            )));
        }
        for w in self.weights.windows(2) {
            if w[1] >= w[0] {
                return Err(Error::InvalidParameter(
                    "weights must be strictly descending".into(),
                ));
            }
        }
        if self.weights.last().copied().unwrap_or(0.0) <= 0.0 {
            return Err(Error::InvalidParameter("weights must be positive".into()));
        }
        if self.iterations == 0 || self.learning_rate <= 0.0 {
            return Err(Error::InvalidParameter(
                "iterations and learning rate must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Rotation-layer repetitions: as many layers as fit the per-register
    /// parameterized-gate budget (an RY-RZ layer holds `2 n` gates).
    fn reps(&self, n_qubits: usize) -> usize {
        let per_layer = 2 * n_qubits;
        let layers = ((self.circuit_depth as f64 / per_layer as f64).round() as usize).max(2);
        layers - 1
    }
}

/// Estimated singular triplets, descending by value.
#[derive(Debug, Clone)]
pub struct VqsvdResult {
    pub singular_values: Vec<f64>,
    pub left_states: Vec<StateVector>,
    pub right_states: Vec<StateVector>,
    /// Loss value per optimizer iteration.
    pub loss_trace: Vec<f64>,
    /// False when the loss had not plateaued by the iteration budget.
    pub converged: bool,
}

/// Variationally approximate the top-`rank` singular triplets of `m`.
pub fn vqsvd_decompose(m: &Array2<Complex64>, cfg: &VqsvdConfig) -> Result<VqsvdResult> {
    let (rows, cols) = m.dim();
    if rows != cols || !rows.is_power_of_two() {
        return Err(Error::DimensionMismatch(format!(
            "matrix must be square with power-of-two dimension, got {rows}x{cols}"
        )));
    }
    cfg.validate(rows)?;
    let n_qubits = rows.trailing_zeros() as usize;
    let spec = AnsatzSpec::ry_rz(n_qubits, cfg.reps(n_qubits));
    let left = build_ansatz(&spec)?;
    let right = build_ansatz(&spec)?;
    let p = left.n_params();

    let basis: Vec<StateVector> = (0..cfg.rank)
        .map(|i| StateVector::basis(n_qubits, i))
        .collect::<Result<_>>()?;

    let loss = |theta: &[f64]| -> Result<f64> {
        let mut total = 0.0;
        for (i, start) in basis.iter().enumerate() {
            let psi = left.run(&theta[..p], start)?;
            let phi = right.run(&theta[p..], start)?;
            total -= cfg.weights[i] * overlap_through(m, &psi, &phi)?.re;
        }
        Ok(total)
    };

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let x0: Vec<f64> = (0..2 * p)
        .map(|_| rng.random_range(-std::f64::consts::PI..std::f64::consts::PI))
        .collect();

    let error_slot = std::cell::RefCell::new(None::<Error>);
    let eval = |x: &[f64], g: &mut [f64]| -> f64 {
        let mut run = || -> Result<f64> {
            let f = loss(x)?;
            const H: f64 = 1e-5;
            let mut shifted = x.to_vec();
            for i in 0..x.len() {
                shifted[i] = x[i] + H;
                let plus = loss(&shifted)?;
                shifted[i] = x[i] - H;
                let minus = loss(&shifted)?;
                shifted[i] = x[i];
                g[i] = (plus - minus) / (2.0 * H);
            }
            Ok(f)
        };
        match run() {
            Ok(f) if f.is_finite() => f,
            Ok(_) => {
                *error_slot.borrow_mut() =
                    Some(Error::Solver("loss diverged to a non-finite value".into()));
                f64::INFINITY
            }
            Err(e) => {
                *error_slot.borrow_mut() = Some(e);
                f64::INFINITY
            }
        }
    };

    let outcome = adam(
        eval,
        x0,
        &AdamOptions {
            learning_rate: cfg.learning_rate,
            iterations: cfg.iterations,
            ..Default::default()
        },
    );
    if let Some(e) = error_slot.into_inner() {
        return Err(e);
    }

    let theta = outcome.x;
    let mut triplets = Vec::with_capacity(cfg.rank);
    for start in basis.iter() {
        let psi = left.run(&theta[..p], start)?;
        let phi = right.run(&theta[p..], start)?;
        let sigma = overlap_through(m, &psi, &phi)?.re;
        triplets.push((sigma, psi, phi));
    }
    triplets.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));

    let loss_trace: Vec<f64> = outcome.trace.iter().map(|&(_, f)| f).collect();
    let converged = plateaued(&loss_trace);
    Ok(VqsvdResult {
        singular_values: triplets.iter().map(|t| t.0).collect(),
        left_states: triplets.iter().map(|t| t.1.clone()).collect(),
        right_states: triplets.iter().map(|t| t.2.clone()).collect(),
        loss_trace,
        converged,
    })
}

/// `<psi| M |phi>`.
fn overlap_through(
    m: &Array2<Complex64>,
    psi: &StateVector,
    phi: &StateVector,
) -> Result<Complex64> {
    let d = m.nrows();
    let (a, b) = (psi.amplitudes(), phi.amplitudes());
    if a.len() != d || b.len() != d {
        return Err(Error::DimensionMismatch("state sizes against matrix".into()));
    }
    let mut acc = Complex64::ZERO;
    for i in 0..d {
        let mut row = Complex64::ZERO;
        for j in 0..d {
            row += m[[i, j]] * b[j];
        }
        acc += a[i].conj() * row;
    }
    Ok(acc)
}

fn plateaued(trace: &[f64]) -> bool {
    if trace.len() < 11 {
        return false;
    }
    let last = trace[trace.len() - 1];
    let earlier = trace[trace.len() - 11];
    (earlier - last).abs() <= 1e-6 * (1.0 + last.abs())
}

/// Steady-state recovery report.
#[derive(Debug, Clone, Serialize)]
pub struct ZeromodeReport {
    /// Probability distribution over the retained (right) half of the
    /// block-embedding basis; sums to one.
    pub zeromode: Vec<f64>,
    /// Root-mean-square deviation against the classical zeromode over the
    /// retained components (a fraction, not a percent).
    pub rmsd_vs_oracle: f64,
    /// `<u0|Q_H|u0>` on the full recovered state.
    pub qh_expectation: f64,
    /// Eigenvalue recovered by phase estimation.
    pub lambda_min: f64,
    /// Smallest variational singular value of `U - exp(-i lambda_min) I`.
    pub sigma_min: f64,
}

impl ZeromodeReport {
    /// RMSD in percent, the conventional reporting unit.
    pub fn rmsd_percent(&self) -> f64 {
        100.0 * self.rmsd_vs_oracle
    }
}

/// Recover the non-equilibrium steady state of a system through phase
/// estimation plus variational SVD.
///
/// Builds `Q -> Q_H -> U = exp(-i Q_H)`, estimates the minimum-magnitude
/// eigenphase, variationally decomposes `U - exp(-i lambda_min) I`, and
/// reads the zeromode from the right singular vector of the smallest
/// singular value: the first (left) half of its components is discarded,
/// magnitudes are taken, and the remainder is renormalized to unit sum.
pub fn steady_state_pipeline(
    sys: &SchloglSystem,
    qpe_cfg: &QpeConfig,
    svd_cfg: &VqsvdConfig,
) -> Result<ZeromodeReport> {
    let q = sys.generator();
    let d = q.dim();
    let qh = block_embed(&q);
    let u = unitary_of(&qh)?;
    let qpe = qpe_run(&u, qpe_cfg)?;
    let lambda_min = qpe.lambda_schlogl;

    let shift = Complex64::from_polar(1.0, -lambda_min);
    let mut m = u.matrix().clone();
    for i in 0..m.nrows() {
        m[[i, i]] -= shift;
    }

    let svd = vqsvd_decompose(&m, svd_cfg)?;
    let sigma_min = *svd
        .singular_values
        .last()
        .ok_or_else(|| Error::Solver("empty SVD result".into()))?;
    if sigma_min > NULL_SPACE_THRESHOLD {
        return Err(Error::NullSpaceNotFound(sigma_min));
    }

    // The null space of M is spanned by two embedding vectors, only one of
    // which carries steady-state weight in its right half. If the smallest
    // slot landed on the other one, take the near-null slot with the most
    // retained weight.
    let retained_norm = |s: &StateVector| -> f64 {
        s.amplitudes()[d..2 * d]
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    };
    let mut candidate = svd.right_states.last().unwrap();
    if retained_norm(candidate) < 1e-6 {
        for (sigma, state) in svd
            .singular_values
            .iter()
            .zip(&svd.right_states)
            .rev()
            .skip(1)
        {
            if *sigma <= NULL_SPACE_THRESHOLD && retained_norm(state) > retained_norm(candidate) {
                candidate = state;
            }
        }
    }

    let mut zeromode: Vec<f64> = candidate.amplitudes()[d..2 * d]
        .iter()
        .map(|a| a.norm())
        .collect();
    let total: f64 = zeromode.iter().sum();
    if total == 0.0 {
        return Err(Error::Solver(
            "recovered zeromode has no weight in the retained half".into(),
        ));
    }
    for x in &mut zeromode {
        *x /= total;
    }

    let reference = oracle::zeromode(&q)?;
    let mdiff: f64 = zeromode
        .iter()
        .zip(&reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / d as f64;
    let qh_expectation = candidate.quadratic_form(qh.matrix())?.re;

    Ok(ZeromodeReport {
        zeromode,
        rmsd_vs_oracle: mdiff.sqrt(),
        qh_expectation,
        lambda_min,
        sigma_min,
    })
}
